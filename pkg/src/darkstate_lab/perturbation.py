"""Non-Hermitian perturbation theory in the anharmonicity for manifold dark states.

Everything is evaluated from matrix elements in the collective-mode basis
|k bright, N-k dark>, which diagonalizes H0 within manifold N with
<H0>_k = N omega - i k gamma. No closed forms are used here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock_space import collective_mode_state, manifold_block, restrict_vector
from .model import ModelParams, build_collective_op, split_h0_h1

PSD_CLIP = 1e-12


@dataclass
class CollectiveFrame:
    """Collective basis of one manifold and the operator matrix elements in it."""

    manifold: int
    states: np.ndarray  # full-basis columns, column k = |k bright, N-k dark>
    h0: np.ndarray  # <k|H0|k'>
    h1: np.ndarray  # <k|H1|k'>

    @property
    def denominators(self) -> np.ndarray:
        """<H0>_k - E_DS for every k; entry 0 is zero by construction."""
        e = np.diag(self.h0)
        return e - e[0].real


def collective_frame(params: ModelParams, n: int) -> CollectiveFrame:
    basis = params.basis()
    states = np.column_stack([collective_mode_state(basis, k, n - k) for k in range(n + 1)])
    h0, h1 = split_h0_h1(params, basis)
    return CollectiveFrame(n, states, states.conj().T @ h0 @ states, states.conj().T @ h1 @ states)


def dark_state(params: ModelParams, n: int) -> np.ndarray:
    return collective_mode_state(params.basis(), 0, n)


def bright_state(params: ModelParams, n: int) -> np.ndarray:
    return collective_mode_state(params.basis(), n, 0)


def first_order_energy(params: ModelParams, n: int) -> float:
    ds = dark_state(params, n)
    _, h1 = split_h0_h1(params, params.basis())
    return float(np.vdot(ds, h1 @ ds).real)


def _first_order_coeffs(frame: CollectiveFrame) -> np.ndarray:
    c = np.zeros(frame.manifold + 1, dtype=complex)
    den = frame.denominators
    for k in range(1, frame.manifold + 1):
        if abs(den[k]) == 0:
            raise ZeroDivisionError(f"vanishing denominator for collective state k={k}")
        c[k] = -frame.h1[k, 0] / den[k]
    return c


def first_order_state(params: ModelParams, n: int) -> np.ndarray:
    """phi_1 = -sum_{k != 0} <k|H1|DS> / (<H0>_k - E_DS) |k>, on the full basis."""
    if n < 2:
        return np.zeros(params.basis().dim, dtype=complex)
    frame = collective_frame(params, n)
    return frame.states @ _first_order_coeffs(frame)


def second_order_energy(params: ModelParams, n: int) -> complex:
    if n < 2:
        return 0j
    ds = dark_state(params, n)
    _, h1 = split_h0_h1(params, params.basis())
    return complex(np.vdot(ds, h1 @ first_order_state(params, n)))


def total_energy_correction(params: ModelParams, n: int) -> complex:
    return first_order_energy(params, n) + second_order_energy(params, n)


def closed_form_correction(params: ModelParams, n: int) -> complex:
    """-N(N-1)U/4 - i N(N-1) U^2 / (16 gamma); the real-part sign follows <DS|H1|DS>."""
    c = n * (n - 1)
    return -c * params.u / 4 - 1j * c * params.u ** 2 / (16 * params.gamma)


def second_order_terms(params: ModelParams, n: int) -> dict[str, np.ndarray]:
    """The four contributions to phi_2 as full-basis vectors.

    ``jump`` is the collective-operator term projected back onto manifold N;
    it vanishes identically because the jump operator lowers N by one.
    """
    dim = params.basis().dim
    if n < 2:
        z = np.zeros(dim, dtype=complex)
        return {"double": z, "energy_shift": z.copy(), "normalization": z.copy(), "jump": z.copy()}
    frame = collective_frame(params, n)
    den = frame.denominators
    m = frame.h1
    rng = range(1, n + 1)
    double = np.zeros(n + 1, dtype=complex)
    shift = np.zeros(n + 1, dtype=complex)
    norm = 0.0
    for a in rng:
        double[a] = sum(m[a, b] * m[b, 0] / (den[a] * den[b]) for b in rng)
        shift[a] = -m[0, 0] * m[a, 0] / den[a] ** 2
        norm += abs(m[a, 0]) ** 2 / abs(den[a]) ** 2
    normalization = np.zeros(n + 1, dtype=complex)
    normalization[0] = -0.5 * norm

    basis = params.basis()
    c_op = build_collective_op(params, basis)
    phi1 = frame.states @ _first_order_coeffs(frame)
    ds = frame.states[:, 0]
    jump = np.zeros(n + 1, dtype=complex)
    bra = np.vdot(phi1, c_op.conj().T @ ds)
    for a in rng:
        jump[a] = -params.gamma * np.vdot(frame.states[:, a], c_op @ phi1) * bra / den[a]
    return {
        "double": frame.states @ double,
        "energy_shift": frame.states @ shift,
        "normalization": frame.states @ normalization,
        "jump": frame.states @ jump,
    }


def second_order_state(params: ModelParams, n: int) -> np.ndarray:
    terms = second_order_terms(params, n)
    return terms["double"] + terms["energy_shift"] + terms["normalization"]


@dataclass
class PerturbedDarkState:
    manifold: int
    psi0: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    e1: float
    e2: complex
    rho0: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray

    @property
    def energy_correction(self) -> complex:
        return self.e1 + self.e2


def perturbed_dark_state(params: ModelParams, n: int) -> PerturbedDarkState:
    psi0 = dark_state(params, n)
    phi1 = first_order_state(params, n)
    phi2 = second_order_state(params, n) if n >= 2 else np.zeros_like(psi0)
    rho0, rho1, rho2 = _densities(psi0, phi1, phi2)
    return PerturbedDarkState(n, psi0, phi1, phi2, first_order_energy(params, n),
                              second_order_energy(params, n), rho0, rho1, rho2)


def _densities(psi0, phi1, phi2):
    outer = np.outer
    rho0 = outer(psi0, psi0.conj())
    rho1 = outer(psi0, phi1.conj()) + outer(phi1, psi0.conj())
    rho2 = outer(psi0, phi2.conj()) + outer(phi1, phi1.conj()) + outer(phi2, psi0.conj())
    return rho0, rho1, rho2


def corrected_density(params: ModelParams, n: int):
    if n < 1:
        raise ValueError("corrected_density needs N >= 1")
    s = perturbed_dark_state(params, n)
    return s.rho0, s.rho1, s.rho2


def physical_state(rho: np.ndarray, clip: float = PSD_CLIP) -> np.ndarray:
    """Hermitize, renormalize and clip negative eigenvalues below -clip."""
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    w, v = np.linalg.eigh(rho)
    if w.min() < -clip:
        w = np.clip(w, 0.0, None)
        rho = (v * w) @ v.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        rho = rho / np.trace(rho).real
    return rho


def assemble_state(params: ModelParams, n: int, order: int = 2, renormalize: bool = True) -> np.ndarray:
    """rho_0 + rho_1 + rho_2 truncated at ``order``, made physical unless renormalize=False."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if n == 0:
        rho = np.outer(dark_state(params, 0), dark_state(params, 0).conj())
    else:
        parts = corrected_density(params, n)
        rho = sum(parts[: order + 1])
    return physical_state(rho) if renormalize else rho


def selection_rule_elements(params: ModelParams, n: int) -> np.ndarray:
    """|<k bright, N-k dark| H1 | DS_N>| for k = 0..N."""
    return np.abs(collective_frame(params, n).h1[:, 0])


def block_h1(params: ModelParams, n: int) -> np.ndarray:
    basis = params.basis()
    return manifold_block(split_h0_h1(params, basis)[1], basis, n)


def restrict(v: np.ndarray, params: ModelParams, n: int) -> np.ndarray:
    return restrict_vector(v, params.basis(), n)
