"""Acceptance criteria, runnable from pytest and from ``darkstate-lab verify``."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import dynamics as dyn
from . import perturbation as pt
from .biortho import biorthogonalize, default_order
from .model import ModelParams, commutator_norm
from .spectra import analytic_n2, dark_branch, exceptional_point_scan, manifold_system, sweep_u

U_DEMO = 0.5
T_DEMO = 20.0
T_PARITY = 50.0


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def _phase_aligned_diff(a: np.ndarray, b: np.ndarray) -> float:
    ov = np.vdot(a, b)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.abs(b - phase * a).max())


def harmonic_classification() -> CriterionResult:
    params = ModelParams(omega=1.0, u=0.0, local_dim=6)
    worst, ok = 0.0, True
    for n in range(6):
        rates = manifold_system(params, n).decay_rates
        worst = max(worst, float(np.abs(np.sort(rates) - np.arange(n + 1)).max()))
        ok &= int(np.sum(np.abs(rates) < 1e-10)) == 1
    ok &= worst <= 1e-10
    return CriterionResult(1, "harmonic classification", ok, f"max |Gamma - k gamma| = {worst:.2e}, one dark per N: {ok}")


def n2_closed_forms() -> CriterionResult:
    worst_l = worst_v = 0.0
    for u in (0.0, 0.5, 1.0, 1.9, 2.5):
        params = ModelParams(omega=1.0, u=u)
        num, ana = manifold_system(params, 2), analytic_n2(params)
        cost = np.abs(num.eigenvalues[:, None] - ana.eigenvalues[None, :])
        rows, cols = linear_sum_assignment(cost)
        for i, j in zip(rows, cols):
            worst_l = max(worst_l, cost[i, j])
            worst_v = max(worst_v, _phase_aligned_diff(ana.pairs[j].right, num.pairs[i].right))
    ok = worst_l <= 1e-10 and worst_v <= 1e-8
    return CriterionResult(2, "N=2 closed forms", ok, f"max |dlambda| = {worst_l:.2e}, max |dpsi| = {worst_v:.2e}")


def exceptional_point() -> CriterionResult:
    eps = exceptional_point_scan(ModelParams(), 2, 1.5, 2.5)
    if len(eps) != 1:
        return CriterionResult(3, "exceptional point", False, f"found {len(eps)} EPs in (1.5, 2.5)")
    ep = eps[0]
    ok = abs(ep.u - 2.0) <= 1e-6 and ep.self_overlap < 1e-3
    return CriterionResult(3, "exceptional point", ok,
                           f"u* - 2 = {ep.u - 2:.1e}, |<L|R>| = {ep.self_overlap:.1e}, gap = {ep.gap:.1e}")


def perturbative_closed_forms() -> CriterionResult:
    u = 0.3
    params = ModelParams(u=u)
    ds, bs = pt.dark_state(params, 2), pt.bright_state(params, 2)
    d_lam = abs(pt.total_energy_correction(params, 2) - (-u / 2 - 1j * u ** 2 / 8))
    d_phi1 = float(np.abs(pt.first_order_state(params, 2) - 1j * u / 4 * bs).max())
    d_phi2 = float(np.abs(pt.second_order_state(params, 2) + 0.5 * (u / 4) ** 2 * ds).max())
    ok = max(d_lam, d_phi1, d_phi2) <= 1e-12
    return CriterionResult(4, "perturbative closed forms", ok,
                           f"|dlambda_c| = {d_lam:.1e}, |dphi1| = {d_phi1:.1e}, |dphi2| = {d_phi2:.1e}")


def order_of_accuracy() -> CriterionResult:
    grid = np.linspace(0.0, 0.1, 21)
    i_half, i_full = 10, 20
    ratios, overlay, ok = {}, 0.0, True
    for n in (2, 3, 4):
        params = ModelParams()
        dark = dark_branch(sweep_u(params, n, grid))
        analytic = np.array([n * params.omega + pt.total_energy_correction(params.with_u(u), n) for u in grid])
        resid = np.abs(dark - analytic)
        ratios[n] = resid[i_full] / resid[i_half]
        overlay = max(overlay, float(resid.max()))
        ok &= 6.0 <= ratios[n] <= 10.0
    ok &= overlay <= 1e-3
    detail = ", ".join(f"N={n}: {r:.2f}" for n, r in ratios.items())
    return CriterionResult(5, "O(U^3) residual scaling", bool(ok),
                           f"ratio r(0.1)/r(0.05) {detail} (need [6,10]); max overlay residual {overlay:.1e}")


def selection_rule() -> CriterionResult:
    u = 1.0
    params = ModelParams(u=u)
    forbidden = expected = 0.0
    for n in range(6):
        m = pt.selection_rule_elements(params, n)
        mask = np.ones(n + 1, dtype=bool)
        mask[[k for k in (0, 2) if k <= n]] = False
        if mask.any():
            forbidden = max(forbidden, float(m[mask].max()))
        if n >= 2:
            expected = max(expected, abs(m[2] - u * np.sqrt(n * (n - 1)) / (2 * np.sqrt(2))))
    ok = forbidden <= 1e-12 and expected <= 1e-12
    return CriterionResult(6, "selection rule", ok, f"max forbidden = {forbidden:.1e}, k=2 error = {expected:.1e}")


def biorthogonalization() -> CriterionResult:
    params = ModelParams(u=U_DEMO)
    system = manifold_system(params, 2)
    order = default_order(system, params)
    bb = biorthogonalize([p.right for p in system.pairs], [p.left for p in system.pairs], order)
    defect = float(np.abs(bb.overlap() - np.eye(3)).max())
    changes = []
    for pos, idx in enumerate(order):
        p = system.pairs[idx]
        changes.append(max(np.linalg.norm(bb.rights[pos] - p.right), np.linalg.norm(bb.lefts[pos] - p.left)))
    ok = defect <= 1e-10 and changes[0] < 1e-12 and changes[-1] < 1e-12
    return CriterionResult(7, "biorthogonalization", ok,
                           f"|<L_i|R_j> - delta| = {defect:.1e}, changes (first, middle, last) = "
                           + ", ".join(f"{c:.1e}" for c in changes))


@lru_cache(maxsize=None)
def demo_trajectories():
    params = ModelParams(u=U_DEMO)
    num = dyn.evolve(params, dyn.numerical_dark_state(params, 2), T_DEMO)
    per = dyn.evolve(params, pt.assemble_state(params, 2, 2), T_DEMO)
    return num, per


@lru_cache(maxsize=None)
def control_trajectory():
    params = ModelParams(u=0.0)
    return dyn.evolve(params, pt.assemble_state(params, 2, 2), T_DEMO)


@lru_cache(maxsize=None)
def parity_trajectories():
    params = ModelParams(u=U_DEMO)
    return {n: dyn.evolve(params, pt.assemble_state(params, n, 2), T_PARITY, keep_states=False) for n in (2, 3)}


def dynamics_agreement() -> CriterionResult:
    num, per = demo_trajectories()
    dev = float(np.abs(num.manifold_populations() - per.manifold_populations()).max())
    g_num, g_per = num.records[-1]["pop_ground"], per.records[-1]["pop_ground"]
    ok = dev <= 0.02 and g_num >= 0.99 and g_per >= 0.99
    return CriterionResult(8, "numerical vs perturbative dynamics", ok,
                           f"max population deviation = {dev:.1e}; ground at t={T_DEMO:g}: "
                           f"{g_num:.4f} / {g_per:.4f} (need >= 0.99)")


def superradiant_burst() -> CriterionResult:
    num, per = demo_trajectories()
    parts, ok = [], True
    for name, traj in (("numerical", num), ("perturbative", per)):
        series = dyn.intensity(traj)
        b = dyn.burst_metrics(traj.times, series)
        k = int(np.argmax(series))
        non_monotone = 0 < k < len(series) - 1
        ok &= b.is_burst and b.t_peak > 0 and b.i_peak > b.i_initial and non_monotone
        parts.append(f"{name} t_peak={b.t_peak:.2f} I0={b.i_initial:.4f} Ipk={b.i_peak:.4f}")
    ctrl = float(np.abs(dyn.intensity(control_trajectory())).max())
    ok &= ctrl < 1e-12
    return CriterionResult(9, "superradiant burst", bool(ok), "; ".join(parts) + f"; U=0 max I = {ctrl:.1e}")


def parity_trapping() -> CriterionResult:
    trajs = parity_trajectories()
    t3 = trajs[3]
    p1 = t3.series("pop_n1_dark")
    drift = abs(p1[-1] - p1[-2]) / (t3.times[-1] - t3.times[-2])
    g2 = trajs[2].records[-1]["pop_ground"]
    ok = p1[-1] > 0.1 and drift < 1e-6 and g2 >= 0.99
    return CriterionResult(10, "parity trapping", bool(ok),
                           f"N=3 n1_dark = {p1[-1]:.7f}, drift = {drift:.1e}/gamma^-1; N=2 ground = {g2:.4f}")


def rk4_convergence_factor(dt: float = 0.1, t_end: float = 5.0) -> float:
    params = ModelParams(u=U_DEMO)
    rho0 = dyn.numerical_dark_state(params, 2)

    def final(step):
        return dyn.evolve(params, rho0, t_end, step, sample_every=t_end, keep_states=False).final_state

    ref = final(dt / 8)
    return float(np.linalg.norm(final(dt) - ref) / np.linalg.norm(final(dt / 2) - ref))


def integrator_hygiene() -> CriterionResult:
    trajs = [*demo_trajectories(), control_trajectory(), *parity_trajectories().values()]
    drift = max(float(np.abs(t.series("trace") - 1).max()) for t in trajs)
    herm = max(float(t.hermiticity_defect.max()) for t in trajs)
    min_eig = min(float(t.min_eigenvalue.min()) for t in trajs)
    factor = rk4_convergence_factor()
    ok = drift <= 1e-8 and herm <= 1e-10 and min_eig >= -1e-8 and 12 <= factor <= 20
    return CriterionResult(11, "integrator hygiene", ok,
                           f"trace drift {drift:.1e}, hermiticity {herm:.1e}, min eig {min_eig:.1e}, "
                           f"RK4 factor {factor:.2f}")


def commutator_diagnostic() -> CriterionResult:
    zero_u = commutator_norm(ModelParams(u=0.0))
    qubit = commutator_norm(ModelParams(u=1.0, local_dim=2))
    full = commutator_norm(ModelParams(u=1.0))
    ok = zero_u == 0.0 and qubit == 0.0 and full > 0
    return CriterionResult(12, "commutator diagnostic", ok,
                           f"U=0: {zero_u:.1e}, local_dim=2: {qubit:.1e}, U=gamma: {full:.3f}")


CRITERIA = [
    harmonic_classification,
    n2_closed_forms,
    exceptional_point,
    perturbative_closed_forms,
    order_of_accuracy,
    selection_rule,
    biorthogonalization,
    dynamics_agreement,
    superradiant_burst,
    parity_trapping,
    integrator_hygiene,
    commutator_diagnostic,
]


def run_all(echo=print) -> list[CriterionResult]:
    results = []
    for crit in CRITERIA:
        try:
            res = crit()
        except Exception as exc:  # a crash counts as a failure, keep going
            res = CriterionResult(0, crit.__name__, False, f"raised {type(exc).__name__}: {exc}")
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
