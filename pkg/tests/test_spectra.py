import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkstate_lab.fock_space import collective_mode_state, manifold_block, restrict_vector
from darkstate_lab.model import ModelParams, build_h_eff
from darkstate_lab.spectra import (
    analytic_n2,
    dark_branch,
    dark_overlap_with_harmonic,
    eig_nonhermitian,
    exceptional_point_scan,
    full_spectrum,
    manifold_system,
    spectrum_rows,
    sweep_u,
)


def _block(p, n):
    return manifold_block(build_h_eff(p), p.basis(), n)


def _phase_aligned(a, b):
    ov = np.vdot(a, b)
    return np.abs(b - ov / abs(ov) * a).max()


def test_n0_block():
    s = manifold_system(ModelParams(), 0)
    assert len(s) == 1 and s.eigenvalues[0] == 0 and s.labels == ["dark"]


def test_n2_u0_eigenvalues():
    s = manifold_system(ModelParams(omega=1.0), 2)
    assert np.allclose(s.eigenvalues, [2, 2 - 1j, 2 - 2j], atol=1e-12)
    assert s.labels == ["dark", "faint_1", "bright"]


def test_n2_u_gamma_eigenvalues():
    w = 0.3
    s = manifold_system(ModelParams(omega=w, u=1.0), 2)
    expected = {2 * w - 1 - 1j, 2 * w - 0.5 - 1j - 0.5j * np.sqrt(3), 2 * w - 0.5 - 1j + 0.5j * np.sqrt(3)}
    for lam in s.eigenvalues:
        assert min(abs(lam - e) for e in expected) < 1e-10


@pytest.mark.parametrize("n", range(6))
def test_u0_classification(n):
    s = manifold_system(ModelParams(omega=1.0), n)
    assert np.allclose(s.decay_rates, np.arange(n + 1), atol=1e-10)
    assert s.by_label("dark").decay_rate <= 1e-10
    assert dark_overlap_with_harmonic(s, ModelParams()) >= 1 - 1e-10


def test_dark_acquires_decay():
    assert manifold_system(ModelParams(u=0.5), 2).by_label("dark").decay_rate > 0


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 3), st.integers(1, 5))
def test_pair_invariants(u, n):
    p = ModelParams(omega=0.4, u=u)
    block = _block(p, n)
    s = eig_nonhermitian(block, n, u)
    norm = np.linalg.norm(block)
    assert len(s) == n + 1
    assert abs(s.eigenvalues.sum() - np.trace(block)) <= 1e-9 * max(norm, 1)
    for pair in s.pairs:
        assert np.linalg.norm(block @ pair.right - pair.lam * pair.right) <= 1e-9 * norm
        assert np.linalg.norm(block.conj().T @ pair.left - np.conj(pair.lam) * pair.left) <= 1e-9 * norm
        assert pair.decay_rate >= -1e-9
        first = pair.right[np.flatnonzero(np.abs(pair.right) > 1e-12)[0]]
        assert abs(first.imag) < 1e-12 and first.real > 0
    assert np.all(np.diff(s.decay_rates) >= -1e-10)


@pytest.mark.parametrize("u", [0.0, 0.5, 1.0, 1.5, 2.5])
def test_left_is_conjugate_of_right(u):
    s = manifold_system(ModelParams(u=u), 2)
    for pair in s.pairs:
        assert _phase_aligned(pair.right.conj(), pair.left / np.linalg.norm(pair.left)) <= 1e-8
        assert abs(np.vdot(pair.left, pair.right) - 1) < 1e-10


@pytest.mark.parametrize("u", [0.0, 0.5, 1.0, 1.7, 2.5])
def test_analytic_matches_numeric(u):
    p = ModelParams(omega=1.0, u=u)
    num, ana = manifold_system(p, 2), analytic_n2(p)
    for a in ana.pairs:
        k = int(np.argmin(np.abs(num.eigenvalues - a.lam)))
        assert abs(num.eigenvalues[k] - a.lam) < 1e-10
        assert _phase_aligned(a.right, num.pairs[k].right) < 1e-8
        assert _phase_aligned(a.right.conj(), a.left / np.linalg.norm(a.left)) < 1e-12


def test_analytic_u0_dark_is_harmonic():
    p = ModelParams()
    psi3 = next(x for x in analytic_n2(p).pairs if x.tag == "psi3")
    ds = restrict_vector(collective_mode_state(p.basis(), 0, 2), p.basis(), 2)
    assert abs(abs(np.vdot(ds, psi3.right)) - 1) < 1e-12
    psi1 = next(x for x in analytic_n2(p).pairs if x.tag == "psi1")
    assert _phase_aligned(np.array([-1, 0, 1]) / np.sqrt(2), psi1.right) < 1e-12


def test_analytic_at_ep_is_degenerate():
    a = analytic_n2(ModelParams(omega=1.0, u=2.0))
    assert a.degenerate
    psi2, psi3 = (next(x for x in a.pairs if x.tag == t) for t in ("psi2", "psi3"))
    assert np.allclose(psi2.right, psi3.right)
    assert abs(psi2.lam - (1 - 1j)) < 1e-12
    assert not analytic_n2(ModelParams(u=1.9)).degenerate


def test_sweep_faint_branch_linear():
    grid = np.linspace(0, 2.5, 51)
    sw = sweep_u(ModelParams(omega=0.5), 2, grid)
    faint = sw.values()[:, sw.initial_labels().index("faint_1")]
    assert np.allclose(faint, 1.0 - grid - 1j, atol=1e-10)


def test_sweep_above_ep():
    s = manifold_system(ModelParams(u=2.5), 2)
    root = np.sqrt(2.5**2 - 4)
    coupled = sorted((x for x in s.eigenvalues if abs(x.real + 2.5) > 1e-6), key=lambda z: z.real)
    assert np.allclose([z.imag for z in coupled], -1, atol=1e-10)
    assert np.allclose([z.real for z in coupled], [-1.25 - root / 2, -1.25 + root / 2], atol=1e-10)


def test_sweep_below_ep():
    s = manifold_system(ModelParams(u=1.5), 2)
    coupled = [x for x in s.eigenvalues if abs(x.real + 1.5) > 1e-6]
    assert np.allclose([z.real for z in coupled], -0.75, atol=1e-10)
    assert len({round(z.imag, 8) for z in coupled}) == 2


def test_sweep_branch_continuity_and_dark():
    grid = np.linspace(0, 1.5, 31)
    sw = sweep_u(ModelParams(), 3, grid)
    vals = sw.values()
    assert np.abs(np.diff(vals, axis=0)).max() < 0.2
    assert not sw.ambiguous.any()
    assert np.allclose(dark_branch(sw)[0], 0)


def test_n4_central_faint_branch():
    grid = np.linspace(0, 2.5, 26)
    sw = sweep_u(ModelParams(), 4, grid)
    central = sw.values()[:, sw.initial_labels().index("faint_2")]
    assert np.allclose(central.imag, -2.0, atol=1e-9)


def test_small_u_dark_imaginary_part():
    # Richardson on Im(lambda)/U^2 removes the U^4 term
    for n in (2, 3, 4):
        h = 0.02
        f = [manifold_system(ModelParams(u=u), n).by_label("dark").lam.imag / u**2 for u in (h, h / 2)]
        extrapolated = (4 * f[1] - f[0]) / 3
        assert extrapolated == pytest.approx(-n * (n - 1) / 16, rel=1e-6)


def test_ep_scan_n2():
    eps = exceptional_point_scan(ModelParams(), 2, 1.5, 2.5)
    assert len(eps) == 1
    assert abs(eps[0].u - 2.0) <= 1e-6
    assert eps[0].self_overlap < 1e-3
    assert eps[0].gap < 1e-6


def test_ep_scan_other_manifolds():
    assert exceptional_point_scan(ModelParams(), 1, 0.0, 3.0) == []
    assert exceptional_point_scan(ModelParams(), 0, 0.0, 3.0) == []
    assert exceptional_point_scan(ModelParams(), 3, 0.0, 2.5) == []
    with pytest.raises(ValueError):
        exceptional_point_scan(ModelParams(), 2, 1.0, 1.0)


def test_full_spectrum_and_rows():
    systems = full_spectrum(ModelParams(omega=1.0))
    rows = [r for s in systems for r in spectrum_rows(s)]
    assert len(rows) == 36
    n4 = [r for r in rows if r[0] == 4]
    assert sum(r[5] < 1e-10 for r in n4) == 1
    assert len(full_spectrum(ModelParams(local_dim=2))) == 3
