"""Left/right eigensystems of H_eff manifold blocks, sweeps and exceptional points."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import eigensolver
from .fock_space import collective_mode_state, manifold_block, restrict_vector
from .model import ModelParams, build_h_eff

SELF_ORTHO_FLOOR = 1e-10
EP_GAP_TOL = 1e-6
EP_BISECT_TOL = 1e-9
AMBIGUITY_MARGIN = 0.1


@dataclass
class EigenPair:
    lam: complex
    right: np.ndarray
    left: np.ndarray
    manifold: int
    # |<L|R>| for unit-norm L and R; ~0 at an exceptional point
    self_overlap: float = 1.0
    label: str = ""
    tag: str = ""

    @property
    def decay_rate(self) -> float:
        return -self.lam.imag

    @property
    def energy(self) -> float:
        return self.lam.real


@dataclass
class EigenSystem:
    manifold: int
    pairs: list[EigenPair]
    u_value: float | None = None
    degenerate: bool = False

    def __len__(self):
        return len(self.pairs)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs])

    @property
    def decay_rates(self) -> np.ndarray:
        return np.array([p.decay_rate for p in self.pairs])

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.pairs]

    def rights(self) -> np.ndarray:
        return np.column_stack([p.right for p in self.pairs])

    def lefts(self) -> np.ndarray:
        return np.column_stack([p.left for p in self.pairs])

    def biorthogonality(self) -> np.ndarray:
        """Matrix of <L_i|R_j>."""
        return self.lefts().conj().T @ self.rights()

    def by_label(self, label: str) -> EigenPair:
        for p in self.pairs:
            if p.label == label:
                return p
        raise KeyError(label)


def _phase_fix(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    mags = np.abs(v)
    first = int(np.argmax(mags > 1e-10 * mags.max()))
    return v * (abs(v[first]) / v[first])


def _pair_left(right: np.ndarray, left: np.ndarray) -> tuple[np.ndarray, float]:
    left = left / np.linalg.norm(left)
    ov = np.vdot(left, right)
    if abs(ov) > SELF_ORTHO_FLOOR:
        return left / np.conj(ov), float(abs(ov))
    return left, float(abs(ov))


def eig_nonhermitian(block: np.ndarray, manifold: int = -1, u_value: float | None = None) -> EigenSystem:
    """Right and left eigenpairs of a square block, classified and sorted by decay rate.

    Right vectors are unit norm with their first nonzero entry real-positive;
    left vectors come from the adjoint block and are scaled to <L|R> = 1
    unless the pair is self-orthogonal.
    """
    block = np.asarray(block, dtype=complex)
    lam_r, vr = eigensolver.eig(block)
    lam_l, vl = eigensolver.eig(block.conj().T)
    cost = np.abs(lam_l[None, :] - np.conj(lam_r)[:, None])
    _, match = linear_sum_assignment(cost)
    pairs = []
    for i, lam in enumerate(lam_r):
        right = _phase_fix(vr[:, i])
        left, so = _pair_left(right, vl[:, match[i]])
        pairs.append(EigenPair(complex(lam), right, left, manifold, so))
    return classify(EigenSystem(manifold, pairs, u_value))


def classify(system: EigenSystem) -> EigenSystem:
    """Sort by decay rate and label dark / faint_k / bright."""
    pairs = sorted(system.pairs, key=lambda p: (round(p.decay_rate, 10), p.lam.real))
    n = len(pairs)
    out = []
    for k, p in enumerate(pairs):
        if k == 0:
            label = "dark"
        elif k == n - 1:
            label = "bright"
        else:
            label = f"faint_{k}"
        out.append(replace(p, label=label))
    return replace(system, pairs=out)


def manifold_system(params: ModelParams, n: int) -> EigenSystem:
    basis = params.basis()
    block = manifold_block(build_h_eff(params, basis), basis, n)
    return eig_nonhermitian(block, n, params.u)


def full_spectrum(params: ModelParams) -> list[EigenSystem]:
    basis = params.basis()
    return [manifold_system(params, n) for n in range(basis.max_excitation + 1)]


@dataclass
class Sweep:
    """Branch-tracked eigensystems over a U grid.

    ``order[g, b]`` is the index into ``systems[g].pairs`` of branch ``b``;
    branch ids follow the classification order at the first grid point.
    """

    manifold: int
    u_grid: np.ndarray
    systems: list[EigenSystem]
    order: np.ndarray
    ambiguous: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def branch(self, b: int) -> list[EigenPair]:
        return [s.pairs[self.order[g, b]] for g, s in enumerate(self.systems)]

    def values(self) -> np.ndarray:
        """Eigenvalues, shape (len(u_grid), n_branches)."""
        return np.array([[s.pairs[j].lam for j in self.order[g]] for g, s in enumerate(self.systems)])

    def initial_labels(self) -> list[str]:
        return [self.systems[0].pairs[j].label for j in self.order[0]]


def track_branches(systems: list[EigenSystem]) -> tuple[np.ndarray, np.ndarray]:
    n_u = len(systems)
    dim = len(systems[0])
    order = np.zeros((n_u, dim), dtype=int)
    order[0] = np.arange(dim)
    ambiguous = np.zeros(n_u, dtype=bool)
    for g in range(1, n_u):
        prev = systems[g - 1].rights()[:, order[g - 1]]
        cur = systems[g].rights()
        ov = np.abs(prev.conj().T @ cur)
        rows, cols = linear_sum_assignment(-ov)
        order[g, rows] = cols
        if dim > 1:
            srt = np.sort(ov, axis=1)
            chosen = ov[rows, cols]
            ambiguous[g] = bool(np.any(chosen - srt[:, -2] < AMBIGUITY_MARGIN))
    return order, ambiguous


def sweep_u(params: ModelParams, n: int, u_grid) -> Sweep:
    u_grid = np.asarray(u_grid, dtype=float)
    if u_grid.ndim != 1 or len(u_grid) == 0:
        raise ValueError("u_grid must be a non-empty 1-D sequence")
    if np.any(u_grid < 0):
        raise ValueError("u_grid values must be >= 0")
    systems = [manifold_system(params.with_u(u), n) for u in u_grid]
    order, ambiguous = track_branches(systems)
    return Sweep(n, u_grid, systems, order, ambiguous)


def dark_branch(sweep: Sweep) -> np.ndarray:
    """Eigenvalues along the branch that is dark at the first grid point."""
    b = sweep.initial_labels().index("dark")
    return sweep.values()[:, b]


def analytic_n2(params: ModelParams) -> EigenSystem:
    """Closed-form N=2 eigensystem; sub-basis order |02>, |11>, |20>."""
    w, u, g = params.omega, params.u, params.gamma
    s = np.sqrt(complex(u * u - 4 * g * g))
    lams = [
        2 * w - u - 1j * g,
        2 * w - u / 2 - 1j * g - s / 2,
        2 * w - u / 2 - 1j * g + s / 2,
    ]
    vecs = [
        np.array([-1.0, 0.0, 1.0], dtype=complex),
        np.array([1.0, 1j * (u - s) / (np.sqrt(2) * g), 1.0]),
        np.array([1.0, 1j * (u + s) / (np.sqrt(2) * g), 1.0]),
    ]
    pairs = []
    for k, (lam, v) in enumerate(zip(lams, vecs), start=1):
        right = _phase_fix(v)
        left, so = _pair_left(right, right.conj())
        pairs.append(EigenPair(complex(lam), right, left, 2, so, tag=f"psi{k}"))
    degenerate = bool(abs(s) < EP_GAP_TOL)
    return replace(classify(EigenSystem(2, pairs, u)), degenerate=degenerate)


@dataclass
class ExceptionalPoint:
    u: float
    pair: tuple[int, int]
    gap: float
    self_overlap: float


def _closest_pair(system: EigenSystem) -> tuple[int, int, complex]:
    lam = system.eigenvalues
    best = (0, 0, np.inf)
    for i in range(len(lam)):
        for j in range(i + 1, len(lam)):
            d = lam[i] - lam[j]
            if abs(d) < abs(best[2]):
                best = (i, j, d)
    return best


def exceptional_point_scan(params: ModelParams, n: int, u_lo: float, u_hi: float,
                           n_grid: int = 201) -> list[ExceptionalPoint]:
    """Locate eigenvalue coalescences of manifold N in [u_lo, u_hi].

    Local minima of the smallest pair gap on a grid are refined by bisection
    on the squared gap of the closest pair, which crosses zero linearly at a
    square-root branch point. Candidates whose final gap is not below
    EP_GAP_TOL are discarded.
    """
    if not u_lo < u_hi:
        raise ValueError("need u_lo < u_hi")
    if len(params.basis().manifold(n)) < 2:
        return []
    grid = np.linspace(u_lo, u_hi, n_grid)

    def probe(u):
        sys_ = manifold_system(params.with_u(u), n)
        i, j, d = _closest_pair(sys_)
        return sys_, i, j, d

    gaps = np.array([abs(probe(u)[3]) for u in grid])
    found: list[ExceptionalPoint] = []
    for k in range(1, n_grid - 1):
        if not (gaps[k] <= gaps[k - 1] and gaps[k] <= gaps[k + 1]):
            continue
        if not (gaps[k] < gaps[k - 1] or gaps[k] < gaps[k + 1]):
            continue
        lo, hi = grid[k - 1], grid[k + 1]
        f_lo, f_hi = probe(lo)[3] ** 2, probe(hi)[3] ** 2
        direction = np.conj(f_hi - f_lo)
        if abs(direction) == 0:
            continue
        s_lo = (f_lo * direction).real
        s_hi = (f_hi * direction).real
        if s_lo * s_hi > 0:
            continue
        # bisect well past EP_BISECT_TOL: the gap only closes as sqrt(|u - u*|)
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            s_mid = (probe(mid)[3] ** 2 * direction).real
            if s_mid == 0:
                lo = hi = mid
                break
            if (s_mid < 0) == (s_lo < 0):
                lo, s_lo = mid, s_mid
            else:
                hi = mid
        cands = [probe(lo), probe(hi)]
        u_star, (sys_, i, j, d) = min(zip((lo, hi), cands), key=lambda c: abs(c[1][3]))
        if abs(d) >= EP_GAP_TOL:
            continue
        if found and abs(found[-1].u - u_star) < grid[1] - grid[0]:
            continue
        so = max(sys_.pairs[i].self_overlap, sys_.pairs[j].self_overlap)
        found.append(ExceptionalPoint(float(u_star), (i, j), float(abs(d)), so))
    return found


def dark_overlap_with_harmonic(system: EigenSystem, params: ModelParams) -> float:
    """|<DS_N|R_dark>| against the harmonic dark state."""
    basis = params.basis()
    ds = restrict_vector(collective_mode_state(basis, 0, system.manifold), basis, system.manifold)
    return float(abs(np.vdot(ds, system.by_label("dark").right)))


def spectrum_rows(system: EigenSystem, branch_ids=None, u=None):
    """Rows of (manifold, branch_id, u, re_lambda, im_lambda, decay_rate, class)."""
    ids = range(len(system)) if branch_ids is None else branch_ids
    u = system.u_value if u is None else u
    rows = []
    for b, idx in enumerate(ids):
        p = system.pairs[idx]
        rows.append((system.manifold, b, u, p.lam.real, p.lam.imag, p.decay_rate, p.label))
    return rows
