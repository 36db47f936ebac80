"""Bose-Hubbard pair with a single collective decay channel (hbar = 1)."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from math import sqrt

import numpy as np

from .fock_space import BasisMap, enumerate_basis, site_annihilation


@dataclass(frozen=True)
class ModelParams:
    """Identical sites; omega and u in units of gamma. Tunneling is zero."""

    omega: float = 0.0
    u: float = 0.0
    gamma: float = 1.0
    local_dim: int = 6

    def __post_init__(self):
        if not np.isfinite(self.omega):
            raise ValueError("omega must be finite")
        if not (np.isfinite(self.u) and self.u >= 0):
            raise ValueError(f"u must be finite and >= 0, got {self.u!r}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be > 0, got {self.gamma!r}")
        if int(self.local_dim) != self.local_dim or self.local_dim < 2:
            raise ValueError(f"local_dim must be an integer >= 2, got {self.local_dim!r}")

    def with_u(self, u: float) -> "ModelParams":
        return replace(self, u=float(u))

    def basis(self) -> BasisMap:
        return _basis(self.local_dim)


@lru_cache(maxsize=None)
def _basis(local_dim: int) -> BasisMap:
    return enumerate_basis(local_dim)


@lru_cache(maxsize=None)
def _site_ops(local_dim: int):
    basis = _basis(local_dim)
    a1 = site_annihilation(basis, 1)
    a2 = site_annihilation(basis, 2)
    a1.flags.writeable = False
    a2.flags.writeable = False
    return a1, a2


def _ops(params: ModelParams, basis: BasisMap | None):
    if basis is not None and basis.local_dim != params.local_dim:
        raise ValueError("basis local_dim does not match params.local_dim")
    return _site_ops(params.local_dim)


def _number_ops(a1, a2):
    return a1.conj().T @ a1, a2.conj().T @ a2


def interaction_operator(params: ModelParams, basis: BasisMap | None = None) -> np.ndarray:
    """sum_j n_j (n_j - 1), diagonal."""
    a1, a2 = _ops(params, basis)
    n1, n2 = _number_ops(a1, a2)
    eye = np.eye(n1.shape[0])
    return n1 @ (n1 - eye) + n2 @ (n2 - eye)


def hopping_sum(params: ModelParams, basis: BasisMap | None = None) -> np.ndarray:
    """sum_{i,j} a_i^dag a_j = 2 b^dag b."""
    a1, a2 = _ops(params, basis)
    s = a1 + a2
    return s.conj().T @ s


def total_number(params: ModelParams, basis: BasisMap | None = None) -> np.ndarray:
    a1, a2 = _ops(params, basis)
    n1, n2 = _number_ops(a1, a2)
    return n1 + n2


def build_h_bh(params: ModelParams, basis: BasisMap | None = None) -> np.ndarray:
    return params.omega * total_number(params, basis) - 0.5 * params.u * interaction_operator(params, basis)


def build_collective_op(params: ModelParams, basis: BasisMap | None = None) -> np.ndarray:
    a1, a2 = _ops(params, basis)
    return sqrt(params.gamma / 2) * (a1 + a2)


def build_h_eff(params: ModelParams, basis: BasisMap | None = None) -> np.ndarray:
    # anti-Hermitian part is -(i gamma/2) sum_ij a_i^dag a_j = -i gamma b^dag b
    return build_h_bh(params, basis) - 0.5j * params.gamma * hopping_sum(params, basis)


def split_h0_h1(params: ModelParams, basis: BasisMap | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Harmonic+dissipative part H0 and anharmonic perturbation H1."""
    h0 = params.omega * total_number(params, basis) - 0.5j * params.gamma * hopping_sum(params, basis)
    h1 = -0.5 * params.u * interaction_operator(params, basis)
    return h0, h1


def commutator_norm(params: ModelParams, basis: BasisMap | None = None) -> float:
    a = 0.5 * params.u * interaction_operator(params, basis)
    b = 0.5j * params.gamma * hopping_sum(params, basis)
    return float(np.linalg.norm(a @ b - b @ a))
