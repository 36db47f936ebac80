"""Dense complex eigensolver for small non-Hermitian blocks.

Householder reduction to Hessenberg form, implicit single-shift QR with
Wilkinson shifts to a complex Schur form, then eigenvectors by triangular
back-substitution with an inverse-iteration polish.
"""

from __future__ import annotations

import numpy as np

EPS = np.finfo(float).eps
MAX_ITER_PER_EIGENVALUE = 60


class ConvergenceError(RuntimeError):
    """QR iteration hit its cap; the matrix is probably near-defective."""


def hessenberg(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (H, Q) with A = Q H Q^H and H upper Hessenberg."""
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = h[k + 1:, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * xnorm
        v /= np.linalg.norm(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
    return h, q


def _givens(x: complex, y: complex) -> np.ndarray:
    """Unitary G with G @ [x, y] = [r, 0]."""
    if y == 0:
        return np.eye(2, dtype=complex)
    ax = abs(x)
    r = np.hypot(ax, abs(y))
    if ax == 0:
        c, s = 0.0, np.conj(y) / abs(y)
    else:
        c = ax / r
        s = (x / ax) * np.conj(y) / r
    return np.array([[c, s], [-np.conj(s), c]], dtype=complex)


def _wilkinson_shift(a: complex, b: complex, c: complex, d: complex) -> complex:
    """Eigenvalue of [[a, b], [c, d]] closer to d."""
    tr_half = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    mu1, mu2 = tr_half + disc, tr_half - disc
    return mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2


def schur(a: np.ndarray, max_iter_per_eig: int = MAX_ITER_PER_EIGENVALUE):
    """Complex Schur form A = Z T Z^H with T upper triangular."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    h, z = hessenberg(a)
    if n <= 1:
        return h, z
    hi = n - 1
    its = 0
    total = 0
    cap = max_iter_per_eig * n
    while hi > 0:
        lo = hi
        while lo > 0:
            scale = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if scale == 0.0:
                scale = np.abs(h).max()
            if abs(h[lo, lo - 1]) <= EPS * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if total > cap:
            raise ConvergenceError(f"QR iteration did not converge after {cap} sweeps")
        if its % 11 == 0:
            # exceptional shift breaks rare cycling
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        x = h[lo, lo] - mu
        y = h[lo + 1, lo]
        for k in range(lo, hi):
            g = _givens(x, y)
            c0 = max(k - 1, 0)
            h[k:k + 2, c0:] = g @ h[k:k + 2, c0:]
            if k > lo:
                h[k + 1, k - 1] = 0.0
            r1 = min(k + 3, n)
            h[:r1, k:k + 2] = h[:r1, k:k + 2] @ g.conj().T
            z[:, k:k + 2] = z[:, k:k + 2] @ g.conj().T
            if k < hi - 1:
                x = h[k + 1, k]
                y = h[k + 2, k]
    return np.triu(h), z


def _triangular_eigvecs(t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    small = max(EPS * np.abs(t).max(), np.finfo(float).tiny)
    x = np.zeros((n, n), dtype=complex)
    for k in range(n):
        x[k, k] = 1.0
        lam = t[k, k]
        for i in range(k - 1, -1, -1):
            rhs = -(t[i, i + 1:k + 1] @ x[i + 1:k + 1, k])
            den = t[i, i] - lam
            if abs(den) < small:
                den = small
            x[i, k] = rhs / den
        x[:, k] /= np.linalg.norm(x[:, k])
    return x


def _polish(a: np.ndarray, lam: complex, v: np.ndarray, steps: int = 2) -> np.ndarray:
    n = a.shape[0]
    anorm = max(np.linalg.norm(a), 1.0)
    for _ in range(steps):
        if np.linalg.norm(a @ v - lam * v) <= 1e-13 * anorm:
            break
        shift = lam + 1e-13 * anorm
        try:
            w = np.linalg.solve(a - shift * np.eye(n), v)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(w)) or np.linalg.norm(w) == 0:
            break
        w /= np.linalg.norm(w)
        if np.linalg.norm(a @ w - lam * w) < np.linalg.norm(a @ v - lam * v):
            v = w
        else:
            break
    return v


def eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit-norm right eigenvectors (columns) of a square complex matrix."""
    a = np.asarray(a, dtype=complex)
    t, z = schur(a)
    lam = np.diag(t).copy()
    vecs = z @ _triangular_eigvecs(t)
    for k in range(len(lam)):
        v = vecs[:, k] / np.linalg.norm(vecs[:, k])
        vecs[:, k] = _polish(a, lam[k], v)
    return lam, vecs
