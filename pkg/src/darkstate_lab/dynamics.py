"""Fixed-step RK4 propagation of the collective-decay master equation."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fock_space import collective_mode_state, manifold_block
from .model import ModelParams, build_collective_op, build_h_bh, build_h_eff, total_number

MODES = ("lindblad", "nonhermitian_renormalized")
TRACE_ABORT = 1e-6
DEFAULT_DT = 0.005
DEFAULT_SAMPLE = 0.05


class IntegrationError(RuntimeError):
    """Trace drift exceeded the abort threshold; the step size is unstable."""


@dataclass(frozen=True)
class Generator:
    """Precomputed operators: rhs(rho) = A rho + rho A^dag + C rho C^dag."""

    a: np.ndarray
    c: np.ndarray

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        ar = self.a @ rho
        return ar + ar.conj().T + self.c @ rho @ self.c.conj().T


@lru_cache(maxsize=32)
def generator(params: ModelParams, mode: str = "lindblad") -> Generator:
    basis = params.basis()
    c = build_collective_op(params, basis)
    if mode == "lindblad":
        a = -1j * build_h_bh(params, basis) - 0.5 * c.conj().T @ c
    elif mode == "nonhermitian_renormalized":
        a = -1j * build_h_eff(params, basis)
    else:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    a.flags.writeable = False
    c.flags.writeable = False
    return Generator(a, c)


def lindblad_rhs(params: ModelParams, rho: np.ndarray) -> np.ndarray:
    """-i[H_BH, rho] + C rho C^dag - {C^dag C, rho}/2."""
    return generator(params, "lindblad")(np.asarray(rho, dtype=complex))


def rk4_step(f, rho: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(rho)
    k2 = f(rho + 0.5 * dt * k1)
    k3 = f(rho + 0.5 * dt * k2)
    k4 = f(rho + dt * k3)
    return rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass(frozen=True)
class ObservableSet:
    """Operators needed for per-sample observables."""

    number: np.ndarray
    bright_number: np.ndarray
    manifolds: np.ndarray
    n1_dark: np.ndarray
    gamma: float


@lru_cache(maxsize=8)
def observable_set(params: ModelParams) -> ObservableSet:
    basis = params.basis()
    c = build_collective_op(params, basis)
    ntot = basis.total_number()
    dk1 = collective_mode_state(basis, 0, 1)
    return ObservableSet(
        number=np.real(np.diag(total_number(params, basis))),
        bright_number=(c.conj().T @ c) / params.gamma,
        manifolds=ntot,
        n1_dark=dk1,
        gamma=params.gamma,
    )


def measure(obs: ObservableSet, rho: np.ndarray) -> dict:
    diag = np.real(np.diag(rho))
    n_max = int(obs.manifolds.max())
    pops = np.bincount(obs.manifolds, weights=diag, minlength=n_max + 1)
    return {
        "trace": float(diag.sum()),
        "purity": float(np.real(np.vdot(rho, rho))),
        "total_n": float(diag @ obs.number),
        "intensity": float(obs.gamma * np.real(np.trace(obs.bright_number @ rho))),
        "pop_ground": float(diag[0]),
        "pop_n1_dark": float(np.real(np.vdot(obs.n1_dark, rho @ obs.n1_dark))),
        "pop_by_manifold": pops,
    }


@dataclass
class Trajectory:
    times: np.ndarray
    records: list[dict]
    states: list[np.ndarray] = field(default_factory=list)
    mode: str = "lindblad"
    # per-sample integrator hygiene: ||rho - rho^dag||_max and min eigenvalue
    hermiticity_defect: np.ndarray = field(default_factory=lambda: np.zeros(0))
    min_eigenvalue: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def series(self, key: str) -> np.ndarray:
        return np.array([r[key] for r in self.records])

    def manifold_populations(self) -> np.ndarray:
        return np.array([r["pop_by_manifold"] for r in self.records])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def evolve(params: ModelParams, rho0: np.ndarray, t_end: float, dt: float = DEFAULT_DT,
           mode: str = "lindblad", sample_every: float = DEFAULT_SAMPLE,
           keep_states: bool = True) -> Trajectory:
    """Propagate rho0 to t_end with fixed-step RK4.

    ``lindblad`` integrates the master equation as written.
    ``nonhermitian_renormalized`` integrates -i(H_eff rho - rho H_eff^dag) + C rho C^dag
    and rescales the trace to one after every step.
    """
    if dt <= 0 or t_end < 0:
        raise ValueError("need dt > 0 and t_end >= 0")
    f = generator(params, mode)
    rho = np.array(rho0, dtype=complex)
    if rho.shape != (params.basis().dim,) * 2:
        raise ValueError(f"rho0 has shape {rho.shape}, expected {(params.basis().dim,) * 2}")
    n_steps = int(round(t_end / dt))
    stride = max(1, int(round(sample_every / dt)))
    obs = observable_set(params)

    times, records, states, herm, mins = [], [], [], [], []

    def record(step):
        times.append(step * dt)
        records.append(measure(obs, rho))
        herm.append(float(np.abs(rho - rho.conj().T).max()))
        mins.append(float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()))
        if keep_states:
            states.append(rho.copy())

    record(0)
    for step in range(1, n_steps + 1):
        rho = rk4_step(f, rho, dt)
        tr = np.trace(rho).real
        if mode == "nonhermitian_renormalized":
            rho = rho / tr
        elif abs(tr - 1.0) > TRACE_ABORT:
            raise IntegrationError(
                f"trace drift {abs(tr - 1.0):.2e} at t={step * dt:.4g}; reduce dt (now {dt})"
            )
        if step % stride == 0 or step == n_steps:
            record(step)
    if not keep_states:
        states = [rho.copy()]
    return Trajectory(np.array(times), records, states, mode, np.array(herm), np.array(mins))


def intensity(trajectory: Trajectory) -> np.ndarray:
    """Emission rate gamma <b^dag b>(t), positive while photons leave."""
    return trajectory.series("intensity")


@dataclass
class BurstMetrics:
    t_peak: float
    i_peak: float
    i_initial: float
    is_burst: bool


def burst_metrics(times, intensity_series) -> BurstMetrics:
    times = np.asarray(times, dtype=float)
    series = np.asarray(intensity_series, dtype=float)
    if series.size == 0:
        raise ValueError("empty intensity series")
    k = int(np.argmax(series))
    t_peak, i_peak, i0 = float(times[k]), float(series[k]), float(series[0])
    return BurstMetrics(t_peak, i_peak, i0, bool(i_peak > i0 + 1e-6 and t_peak > 0))


@dataclass
class ParityEndpoint:
    ground_pop: float
    n1_dark_pop: float
    n1_dark_drift: float  # |d pop_n1_dark / dt| over the last sample interval


def parity_endpoint(params: ModelParams, n: int, t_end: float = 50.0, dt: float = DEFAULT_DT,
                    order: int = 2) -> ParityEndpoint:
    """Terminal populations after relaxing the perturbatively corrected dark state of manifold N."""
    from .perturbation import assemble_state

    if n < 1:
        raise ValueError("N must be >= 1")
    traj = evolve(params, assemble_state(params, n, order), t_end, dt, keep_states=False)
    p1 = traj.series("pop_n1_dark")
    drift = abs(p1[-1] - p1[-2]) / (traj.times[-1] - traj.times[-2]) if len(p1) > 1 else 0.0
    return ParityEndpoint(traj.records[-1]["pop_ground"], float(p1[-1]), float(drift))


def numerical_dark_state(params: ModelParams, n: int) -> np.ndarray:
    """Projector on the Gram-Schmidt-prepared dark-descended eigenvector of manifold N.

    Raises ExceptionalPointProximityError when two eigenvalues sit closer than
    the exceptional-point gap tolerance: floating-point eigenvectors there are
    split by ~sqrt(eps), so the Gram-Schmidt pivot floor alone never triggers.
    """
    from .biortho import ExceptionalPointProximityError, biorthogonalize, default_order
    from .fock_space import embed_vector
    from .perturbation import physical_state
    from .spectra import EP_GAP_TOL, eig_nonhermitian

    basis = params.basis()
    system = eig_nonhermitian(manifold_block(build_h_eff(params, basis), basis, n), n, params.u)
    lam = system.eigenvalues
    gaps = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(gaps, np.inf)
    if len(lam) > 1 and gaps.min() < EP_GAP_TOL:
        raise ExceptionalPointProximityError(
            f"eigenvalue gap {gaps.min():.1e} < {EP_GAP_TOL:g} in manifold {n} at U={params.u:g}"
        )
    order = default_order(system, params)
    bb = biorthogonalize([p.right for p in system.pairs], [p.left for p in system.pairs], order)
    v = embed_vector(bb.rights[-1], basis, n)
    return physical_state(np.outer(v, v.conj()))


def trajectory_rows(traj: Trajectory, n_max: int | None = None):
    """CSV rows matching (t, trace, purity, total_n, intensity, pop_ground, pop_n1_dark, pop_manifold_*)."""
    n_max = len(traj.records[0]["pop_by_manifold"]) - 1 if n_max is None else n_max
    header = ["t", "trace", "purity", "total_n", "intensity", "pop_ground", "pop_n1_dark"]
    header += [f"pop_manifold_{k}" for k in range(n_max + 1)]
    rows = []
    for t, r in zip(traj.times, traj.records):
        rows.append([t, r["trace"], r["purity"], r["total_n"], r["intensity"], r["pop_ground"],
                     r["pop_n1_dark"], *r["pop_by_manifold"][: n_max + 1]])
    return header, rows
