"""Grid, transform, derivative and norm tests for the spectral workspace.

Oracle values are hand-derived on the 2-pi periodic square:
integral of sin^2 or cos^2 of a single mode is (1/2)(2 pi)^2 = 2 pi^2,
and the L^p norm of a constant c is |c| (2 pi)^{2/p}.
"""

import numpy as np
import pytest

from nskqg.spectral import (
    SpectralWorkspace,
    SymTensorField,
    VectorField,
    bilaplacian,
    differentiate,
    div,
    div_perp,
    div_tensor,
    grad,
    laplacian,
    lp_norm,
    perp_grad,
    sym_gradient,
)


def test_workspace_rejects_bad_sizes():
    with pytest.raises(ValueError, match="even"):
        SpectralWorkspace(15)
    with pytest.raises(ValueError, match=">= 4"):
        SpectralWorkspace(2)


def test_grid_layout(ws16):
    assert ws16.x1.shape == (16, 16)
    assert ws16.x1[0, 0] == 0.0
    assert ws16.x1[1, 0] == pytest.approx(2 * np.pi / 16)
    assert ws16.x2[0, 1] == pytest.approx(2 * np.pi / 16)
    # rfft2 storage: full first axis, half-plus-one second axis
    assert ws16.k1.shape == (16, 1)
    assert ws16.k2.shape == (1, 9)


def test_nyquist_rows_are_zeroed(ws16):
    # Derivative symbols must not see the unpaired Nyquist mode.
    assert ws16.k1[8, 0] == 0.0
    assert ws16.k2[0, 8] == 0.0
    assert ws16.k1[7, 0] == 7.0
    assert ws16.k1[9, 0] == -7.0


def test_dealias_mask_cutoff():
    # N=8: keep max(|k1|,|k2|) <= 8//3 = 2, inclusive.
    ws = SpectralWorkspace(8)
    kept1 = sorted({int(k) for k in np.asarray(ws.k1).ravel()[np.any(ws.dealias_mask, axis=1)]})
    assert kept1 == [-2, -1, 0, 1, 2]
    assert ws.dealias_mask[0, 2] and not ws.dealias_mask[0, 3]


def test_roundtrip_random(ws32, rng):
    f = rng.standard_normal((32, 32))
    assert np.max(np.abs(ws32.inv(ws32.fwd(f)) - f)) <= 1e-12


def test_parseval(ws32, rng):
    f = rng.standard_normal((32, 32))
    fh = ws32.fwd(f)
    # rfft2 halves: double the k2>0 columns, count k2=0 (and Nyquist col) once
    w = np.full(fh.shape, 2.0)
    w[:, 0] = 1.0
    w[:, -1] = 1.0
    spectral = np.sum(w * np.abs(fh) ** 2) / 32**4 * (2 * np.pi) ** 2
    assert spectral == pytest.approx(ws32.integrate(f**2), rel=1e-12)


def test_first_derivatives(ws32):
    f = np.sin(2 * ws32.x1) * np.cos(3 * ws32.x2)
    g = grad(f, ws32)
    assert np.allclose(g.u1, 2 * np.cos(2 * ws32.x1) * np.cos(3 * ws32.x2), atol=1e-12)
    assert np.allclose(g.u2, -3 * np.sin(2 * ws32.x1) * np.sin(3 * ws32.x2), atol=1e-12)


def test_laplacian_and_bilaplacian(ws32):
    f = np.cos(2 * ws32.x1 + ws32.x2)
    assert np.allclose(laplacian(f, ws32), -5.0 * f, atol=1e-11)
    assert np.allclose(bilaplacian(f, ws32), 25.0 * f, atol=1e-10)


def test_div_and_perp_operators(ws32):
    phi = np.sin(ws32.x1 + 2 * ws32.x2)
    v = perp_grad(phi, ws32)
    assert np.allclose(v.u1, -2 * np.cos(ws32.x1 + 2 * ws32.x2), atol=1e-12)
    assert np.allclose(v.u2, np.cos(ws32.x1 + 2 * ws32.x2), atol=1e-12)
    # perp gradients are divergence free
    assert np.max(np.abs(div(v, ws32))) <= 1e-12
    # div_perp recovers the vorticity -Delta is not involved: div_perp(grad phi) = 0
    assert np.max(np.abs(div_perp(grad(phi, ws32), ws32))) <= 1e-12
    assert np.allclose(div_perp(v, ws32), laplacian(phi, ws32), atol=1e-11)


def test_sym_gradient_and_div_tensor(ws32):
    # u = (sin x2, 0): D(u) = [[0, cos(x2)/2], [cos(x2)/2, 0]]
    u = VectorField(np.sin(ws32.x2), np.zeros_like(ws32.x2))
    D = sym_gradient(u, ws32)
    assert np.allclose(D.t11, 0.0, atol=1e-13)
    assert np.allclose(D.t12, 0.5 * np.cos(ws32.x2), atol=1e-12)
    assert np.allclose(D.t22, 0.0, atol=1e-13)
    d = div_tensor(SymTensorField(2 * D.t11, 2 * D.t12, 2 * D.t22), ws32)
    assert np.allclose(d.u1, -np.sin(ws32.x2), atol=1e-12)
    assert np.allclose(d.u2, 0.0, atol=1e-13)


def test_differentiate_dispatch(ws32):
    f = np.cos(ws32.x1)
    assert np.allclose(differentiate(f, "laplacian", ws32), -f, atol=1e-12)
    with pytest.raises(ValueError, match="unknown derivative kind"):
        differentiate(f, "curl3d", ws32)
    with pytest.raises(TypeError, match="scalar"):
        differentiate(VectorField(f, f), "grad", ws32)


def test_lp_norm_constant(ws32):
    c = -1.7
    f = np.full((32, 32), c)
    for p in (1.0, 4.0 / 3.0, 2.0, 4.0):
        assert lp_norm(f, p, ws32) == pytest.approx(abs(c) * (2 * np.pi) ** (2 / p), rel=1e-12)
    assert lp_norm(f, np.inf, ws32) == pytest.approx(abs(c))


def test_lp_norm_single_mode(ws32):
    f = np.sin(ws32.x1)
    # sqrt(2 pi^2) = pi sqrt(2)
    assert lp_norm(f, 2.0, ws32) == pytest.approx(np.pi * np.sqrt(2.0), rel=1e-12)
    assert lp_norm(f, np.inf, ws32) == pytest.approx(1.0, rel=1e-12)


def test_lp_norm_vector_euclidean(ws32):
    v = VectorField(3.0 * np.ones((32, 32)), 4.0 * np.ones((32, 32)))
    # |v| = 5 everywhere
    assert lp_norm(v, 2.0, ws32) == pytest.approx(5.0 * 2 * np.pi, rel=1e-12)


def test_lp_norm_rejects_p_below_one(ws32):
    with pytest.raises(ValueError, match="must be >= 1"):
        lp_norm(np.ones((32, 32)), 0.5, ws32)


def test_dealias_idempotent(ws32, rng):
    f = rng.standard_normal((32, 32))
    once = ws32.dealias(f)
    assert np.allclose(ws32.dealias(once), once, atol=1e-14)


def test_integrate_mean(ws16):
    f = 2.5 + np.cos(ws16.x1)
    assert ws16.integrate(f) == pytest.approx(2.5 * (2 * np.pi) ** 2, rel=1e-13)
    assert ws16.mean(f) == pytest.approx(2.5, rel=1e-13)
