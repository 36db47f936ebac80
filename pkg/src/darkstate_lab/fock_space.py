"""Two-site bosonic Fock basis, ladder operators and excitation manifolds."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import factorial, sqrt

import numpy as np

BLOCK_TOL = 1e-12
DUMP_TOL = 1e-14


class TruncationError(ValueError):
    """A requested state needs a site occupation >= local_dim."""


class NotBlockDiagonalError(ValueError):
    """Operator couples different excitation manifolds."""


@dataclass(frozen=True)
class BasisMap:
    """Lexicographic basis of |n1, n2> with 0 <= n1, n2 < local_dim."""

    local_dim: int
    labels: tuple[tuple[int, int], ...] = field(repr=False)
    manifold_index: dict[int, tuple[int, ...]] = field(repr=False, compare=False, hash=False)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def max_excitation(self) -> int:
        return 2 * (self.local_dim - 1)

    def index(self, n1: int, n2: int) -> int:
        if not (0 <= n1 < self.local_dim and 0 <= n2 < self.local_dim):
            raise TruncationError(f"|{n1},{n2}> outside local_dim={self.local_dim}")
        return n1 * self.local_dim + n2

    def manifold(self, n: int) -> tuple[int, ...]:
        try:
            return self.manifold_index[n]
        except KeyError:
            raise ValueError(f"manifold N={n} not in basis (0..{self.max_excitation})") from None

    def manifold_labels(self, n: int) -> list[tuple[int, int]]:
        return [self.labels[i] for i in self.manifold(n)]

    def total_number(self) -> np.ndarray:
        return np.array([n1 + n2 for n1, n2 in self.labels])


def enumerate_basis(local_dim: int = 6) -> BasisMap:
    if int(local_dim) != local_dim or local_dim < 2:
        raise ValueError(f"local_dim must be an integer >= 2, got {local_dim!r}")
    local_dim = int(local_dim)
    labels = tuple((n1, n2) for n1 in range(local_dim) for n2 in range(local_dim))
    manifolds: dict[int, list[int]] = {}
    for i, (n1, n2) in enumerate(labels):
        manifolds.setdefault(n1 + n2, []).append(i)
    return BasisMap(local_dim, labels, {n: tuple(v) for n, v in sorted(manifolds.items())})


def site_annihilation(basis: BasisMap, site: int) -> np.ndarray:
    """Matrix of a_site (site is 1 or 2) on the full basis."""
    if site not in (1, 2):
        raise ValueError(f"site must be 1 or 2, got {site!r}")
    a = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, (n1, n2) in enumerate(basis.labels):
        n = n1 if site == 1 else n2
        if n == 0:
            continue
        row = basis.index(n1 - 1, n2) if site == 1 else basis.index(n1, n2 - 1)
        a[row, col] = sqrt(n)
    return a


def site_number(basis: BasisMap, site: int) -> np.ndarray:
    occ = [lab[site - 1] for lab in basis.labels] if site in (1, 2) else None
    if occ is None:
        raise ValueError(f"site must be 1 or 2, got {site!r}")
    return np.diag(np.asarray(occ, dtype=complex))


def bright_mode(basis: BasisMap) -> np.ndarray:
    """b = (a1 + a2)/sqrt(2)."""
    return (site_annihilation(basis, 1) + site_annihilation(basis, 2)) / sqrt(2)


def dark_mode(basis: BasisMap) -> np.ndarray:
    """d = (a1 - a2)/sqrt(2)."""
    return (site_annihilation(basis, 1) - site_annihilation(basis, 2)) / sqrt(2)


def swap_operator(basis: BasisMap) -> np.ndarray:
    """Site exchange |n1,n2> -> |n2,n1>."""
    p = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, (n1, n2) in enumerate(basis.labels):
        p[basis.index(n2, n1), col] = 1.0
    return p


def fock_state(basis: BasisMap, n1: int, n2: int) -> np.ndarray:
    v = np.zeros(basis.dim, dtype=complex)
    v[basis.index(n1, n2)] = 1.0
    return v


def collective_mode_state(basis: BasisMap, k_bright: int, m_dark: int) -> np.ndarray:
    """Normalized (b^dag)^k (d^dag)^m |00> on the full basis.

    Expanded binomially in site operators; any component needing a site
    occupation >= local_dim raises TruncationError instead of being clipped.
    """
    if k_bright < 0 or m_dark < 0:
        raise ValueError("mode occupations must be non-negative")
    n_total = k_bright + m_dark
    if n_total > basis.local_dim - 1:
        raise TruncationError(
            f"(k={k_bright}, m={m_dark}) needs occupation {n_total} >= local_dim={basis.local_dim}"
        )
    # (a1+a2)^k (a1-a2)^m / sqrt(2)^(k+m) acting on |00>, coefficients of a1^p a2^q
    coeff: dict[int, float] = {}
    for i in range(k_bright + 1):
        ck = factorial(k_bright) / (factorial(i) * factorial(k_bright - i))
        for j in range(m_dark + 1):
            cm = factorial(m_dark) / (factorial(j) * factorial(m_dark - j)) * (-1) ** (m_dark - j)
            p = i + j
            coeff[p] = coeff.get(p, 0.0) + ck * cm
    v = np.zeros(basis.dim, dtype=complex)
    for p, c in coeff.items():
        q = n_total - p
        v[basis.index(p, q)] += c * sqrt(factorial(p) * factorial(q))
    norm = np.linalg.norm(v)
    return v / norm


def manifold_block(op: np.ndarray, basis: BasisMap, n: int, tol: float = BLOCK_TOL) -> np.ndarray:
    """Restrict an excitation-conserving operator to manifold N."""
    op = np.asarray(op)
    if op.shape != (basis.dim, basis.dim):
        raise ValueError(f"operator shape {op.shape} does not match basis dim {basis.dim}")
    ntot = basis.total_number()
    cross = np.abs(op[ntot[:, None] != ntot[None, :]])
    if cross.size and cross.max() > tol:
        raise NotBlockDiagonalError(
            f"operator couples different manifolds (max cross entry {cross.max():.3e})"
        )
    idx = np.asarray(basis.manifold(n))
    return op[np.ix_(idx, idx)].copy()


def restrict_vector(v: np.ndarray, basis: BasisMap, n: int) -> np.ndarray:
    return np.asarray(v)[list(basis.manifold(n))].copy()


def embed_vector(v: np.ndarray, basis: BasisMap, n: int) -> np.ndarray:
    """Lift a manifold-N sub-basis vector to the full basis."""
    idx = basis.manifold(n)
    if len(v) != len(idx):
        raise ValueError(f"vector length {len(v)} != manifold size {len(idx)}")
    full = np.zeros(basis.dim, dtype=complex)
    full[list(idx)] = v
    return full


def manifold_projector(basis: BasisMap, n: int) -> np.ndarray:
    p = np.zeros(basis.dim)
    p[list(basis.manifold(n))] = 1.0
    return np.diag(p)


def dump_matrix_csv(op: np.ndarray, path, tol: float = DUMP_TOL) -> int:
    """Write nonzero entries as row,col,re,im. Returns the number of rows written."""
    op = np.asarray(op)
    rows, cols = np.nonzero(np.abs(op) > tol)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "re", "im"])
        for r, c in zip(rows, cols):
            z = complex(op[r, c])
            w.writerow([int(r), int(c), repr(z.real), repr(z.imag)])
    return len(rows)
