"""Simultaneous left/right Gram-Schmidt for non-Hermitian eigenbases."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .fock_space import swap_operator
from .spectra import EigenSystem

PIVOT_FLOOR = 1e-10
PIVOT_WARN = 0.2


class ExceptionalPointProximityError(ArithmeticError):
    """A pivot <L_j|R_j> is numerically zero: the pair is self-orthogonal."""


class ExceptionalPointProximityWarning(RuntimeWarning):
    pass


@dataclass
class BiorthoBasis:
    rights: list[np.ndarray]
    lefts: list[np.ndarray]
    order: tuple[int, ...]
    pivots: list[float]

    def overlap(self) -> np.ndarray:
        lefts = np.column_stack(self.lefts)
        rights = np.column_stack(self.rights)
        return lefts.conj().T @ rights


def biorthogonalize(rights, lefts, order=None) -> BiorthoBasis:
    """Deflate each right vector against earlier corrected lefts and vice versa.

    Vectors are processed in ``order`` and returned in that order. Each output
    right vector has unit norm and its left partner is scaled so <L|R> = 1.
    """
    rights = [np.asarray(v, dtype=complex) for v in rights]
    lefts = [np.asarray(v, dtype=complex) for v in lefts]
    if len(rights) != len(lefts):
        raise ValueError("need as many left as right vectors")
    if len({v.shape for v in rights + lefts}) > 1:
        raise ValueError("all vectors must share one dimension")
    order = tuple(range(len(rights))) if order is None else tuple(order)
    if sorted(order) != list(range(len(rights))):
        raise ValueError(f"order {order} is not a permutation of 0..{len(rights) - 1}")

    out_r: list[np.ndarray] = []
    out_l: list[np.ndarray] = []
    pivots = []
    for idx in order:
        psi_r, psi_l = rights[idx], lefts[idx]
        phi_r, phi_l = psi_r.copy(), psi_l.copy()
        for r_j, l_j in zip(out_r, out_l):
            # <L_j|R_j> = 1 for every stored pair, so no denominators are needed
            phi_r -= np.vdot(l_j, psi_r) * r_j
            phi_l -= np.vdot(r_j, psi_l) * l_j
        nr, nl = np.linalg.norm(phi_r), np.linalg.norm(phi_l)
        if nr == 0 or nl == 0:
            raise ExceptionalPointProximityError(f"vector {idx} vanished under deflation")
        pivot = np.vdot(phi_l, phi_r) / (nr * nl)
        pivots.append(float(abs(pivot)))
        if abs(pivot) <= PIVOT_FLOOR:
            raise ExceptionalPointProximityError(
                f"|<L|R>| = {abs(pivot):.2e} for vector {idx}: too close to an exceptional point"
            )
        if abs(pivot) < PIVOT_WARN:
            warnings.warn(
                f"|<L|R>| = {abs(pivot):.3f} for vector {idx}; near an exceptional point",
                ExceptionalPointProximityWarning,
                stacklevel=2,
            )
        phi_r = phi_r / nr
        phi_l = phi_l / np.conj(np.vdot(phi_l, phi_r))
        out_r.append(phi_r)
        out_l.append(phi_l)
    return BiorthoBasis(out_r, out_l, order, pivots)


def _parity(v: np.ndarray, swap: np.ndarray) -> float:
    return float(np.vdot(v, swap @ v).real / np.vdot(v, v).real)


def default_order(system: EigenSystem, params) -> tuple[int, ...]:
    """Processing order: opposite-parity states first, dark-descended state last.

    Manifolds N <= 1 carry no anharmonic coupling and keep the identity order.
    """
    n = system.manifold
    if n <= 1:
        return tuple(range(len(system)))
    basis = params.basis()
    idx = list(basis.manifold(n))
    swap = swap_operator(basis)[np.ix_(idx, idx)]
    ds_parity = (-1) ** n  # (d^dag)^N |00> changes sign N times under exchange
    dark = system.labels.index("dark")
    rest = [k for k in range(len(system)) if k != dark]
    opposite = [k for k in rest if _parity(system.pairs[k].right, swap) * ds_parity < 0]
    same = [k for k in rest if k not in opposite]
    opposite.sort(key=lambda k: (system.pairs[k].decay_rate, system.pairs[k].lam.real))
    same.sort(key=lambda k: (system.pairs[k].decay_rate, system.pairs[k].lam.real))
    return tuple(opposite + same + [dark])
