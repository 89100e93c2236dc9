"""Spectral grid, transforms and differential operators on the 2D torus.

All fields live on a uniform N x N grid over [0, 2pi)^2, sampled at
x_ij = (2*pi*i/N, 2*pi*j/N) in row-major order (first index is x1).
Transforms use the real-to-complex layout of ``numpy.fft.rfft2``: the
half-spectrum has shape (N, N//2 + 1) with wavenumber k1 running over
0..N/2-1, -N/2..-1 along axis 0 and k2 over 0..N/2 along axis 1.

The Nyquist wavenumber N/2 has no sign information in a real transform,
so it is zeroed in every derivative symbol (k1, k2, |k|^2, ...).  The
2/3-rule dealiasing mask keeps the modes with max(|k1|, |k2|) <= N//3;
quadratic products of masked fields are then alias-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ScalarField = np.ndarray


@dataclass
class VectorField:
    """A velocity-like field with components (u1, u2), each an N x N array."""

    u1: ScalarField
    u2: ScalarField

    def copy(self) -> "VectorField":
        return VectorField(self.u1.copy(), self.u2.copy())


@dataclass
class SymTensorField:
    """A symmetric 2-tensor field stored as the three components (t11, t12, t22)."""

    t11: ScalarField
    t12: ScalarField
    t22: ScalarField


class SpectralWorkspace:
    """Precomputed grid data for an N x N periodic pseudospectral discretization.

    The workspace is immutable after creation: the wavenumber arrays and
    the dealiasing mask are marked read-only, and all operators take the
    workspace as an explicit argument.

    Attributes:
        N: grid points per direction (even, >= 4).
        dx: grid spacing 2*pi/N.
        x1, x2: sample coordinate arrays of shape (N, N).
        k1: derivative symbol along x1, shape (N, 1), Nyquist entry zeroed.
        k2: derivative symbol along x2, shape (1, N//2 + 1), Nyquist entry zeroed.
        k_sq: |k|^2 = k1^2 + k2^2 built from the zeroed symbols.
        dealias_mask: boolean array, True iff max(|k1|, |k2|) <= N//3.
    """

    def __init__(self, N: int):
        if N < 4 or N % 2 != 0:
            raise ValueError(f"grid size must be even and >= 4, got N={N}")
        self.N = N
        self.dx = 2.0 * np.pi / N

        x = np.arange(N) * self.dx
        self.x1, self.x2 = np.meshgrid(x, x, indexing="ij")

        k1 = np.fft.fftfreq(N, d=1.0 / N).reshape(N, 1)
        k2 = np.arange(N // 2 + 1, dtype=float).reshape(1, N // 2 + 1)
        kc = N // 3
        self.dealias_mask = (np.abs(k1) <= kc) & (np.abs(k2) <= kc)

        # Derivative symbols carry no Nyquist mode (its sign is ambiguous
        # in a real transform, and an odd derivative of it is not real).
        k1 = k1.copy()
        k1[N // 2, 0] = 0.0
        k2 = k2.copy()
        k2[0, -1] = 0.0
        self.k1 = k1
        self.k2 = k2
        self.k_sq = k1**2 + k2**2

        for arr in (self.x1, self.x2, self.k1, self.k2, self.k_sq, self.dealias_mask):
            arr.setflags(write=False)
        self._cache: dict = {}

    def fwd(self, f: ScalarField) -> np.ndarray:
        """Forward real transform to the (N, N//2+1) half-spectrum."""
        return np.fft.rfft2(f)

    def inv(self, fh: np.ndarray) -> ScalarField:
        """Inverse transform back to the N x N grid."""
        return np.fft.irfft2(fh, s=(self.N, self.N))

    def dealias(self, f: ScalarField) -> ScalarField:
        """Project a grid field onto the modes with max(|k1|,|k2|) <= N//3."""
        return self.inv(self.fwd(f) * self.dealias_mask)

    def integrate(self, f: ScalarField) -> float:
        """Trapezoid-exact quadrature of a periodic grid field: sum(f) * dx^2."""
        return float(np.sum(f)) * self.dx**2

    def mean(self, f: ScalarField) -> float:
        return float(np.mean(f))


def grad(f: ScalarField, ws: SpectralWorkspace) -> VectorField:
    """Spectral gradient (d1 f, d2 f)."""
    fh = ws.fwd(f)
    return VectorField(ws.inv(1j * ws.k1 * fh), ws.inv(1j * ws.k2 * fh))


def div(v: VectorField, ws: SpectralWorkspace) -> ScalarField:
    """Spectral divergence d1 v1 + d2 v2."""
    return ws.inv(1j * ws.k1 * ws.fwd(v.u1) + 1j * ws.k2 * ws.fwd(v.u2))


def laplacian(f: ScalarField, ws: SpectralWorkspace) -> ScalarField:
    return ws.inv(-ws.k_sq * ws.fwd(f))


def bilaplacian(f: ScalarField, ws: SpectralWorkspace) -> ScalarField:
    return ws.inv(ws.k_sq**2 * ws.fwd(f))


def perp_grad(f: ScalarField, ws: SpectralWorkspace) -> VectorField:
    """Rotated gradient (-d2 f, d1 f); divergence-free by construction."""
    fh = ws.fwd(f)
    return VectorField(ws.inv(-1j * ws.k2 * fh), ws.inv(1j * ws.k1 * fh))


def div_perp(v: VectorField, ws: SpectralWorkspace) -> ScalarField:
    """Rotated divergence -d2 v1 + d1 v2 (the scalar curl)."""
    return ws.inv(-1j * ws.k2 * ws.fwd(v.u1) + 1j * ws.k1 * ws.fwd(v.u2))


_KINDS = {
    "grad": grad,
    "div": div,
    "laplacian": laplacian,
    "bilaplacian": bilaplacian,
    "perp_grad": perp_grad,
    "div_perp": div_perp,
}

_SCALAR_KINDS = {"grad", "laplacian", "bilaplacian", "perp_grad"}


def differentiate(f, kind: str, ws: SpectralWorkspace):
    """Dispatch a named derivative; checks the argument rank against the kind.

    Args:
        f: ScalarField for grad/laplacian/bilaplacian/perp_grad,
           VectorField for div/div_perp.
        kind: one of 'grad', 'div', 'laplacian', 'bilaplacian',
            'perp_grad', 'div_perp'.
        ws: the workspace whose grid f lives on.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown derivative kind {kind!r}; expected one of {sorted(_KINDS)}")
    needs_scalar = kind in _SCALAR_KINDS
    if needs_scalar and not isinstance(f, np.ndarray):
        raise TypeError(f"{kind} expects a scalar field, got {type(f).__name__}")
    if not needs_scalar and not isinstance(f, VectorField):
        raise TypeError(f"{kind} expects a VectorField, got {type(f).__name__}")
    return _KINDS[kind](f, ws)


def sym_gradient(v: VectorField, ws: SpectralWorkspace) -> SymTensorField:
    """Symmetric gradient D(v) = (grad v + grad v^T) / 2."""
    v1h = ws.fwd(v.u1)
    v2h = ws.fwd(v.u2)
    d11 = ws.inv(1j * ws.k1 * v1h)
    d22 = ws.inv(1j * ws.k2 * v2h)
    d12 = ws.inv(0.5j * (ws.k2 * v1h + ws.k1 * v2h))
    return SymTensorField(d11, d12, d22)


def div_tensor(T: SymTensorField, ws: SpectralWorkspace) -> VectorField:
    """Row-wise divergence of a symmetric tensor: (d1 T11 + d2 T12, d1 T12 + d2 T22)."""
    t11h = ws.fwd(T.t11)
    t12h = ws.fwd(T.t12)
    t22h = ws.fwd(T.t22)
    out1 = ws.inv(1j * ws.k1 * t11h + 1j * ws.k2 * t12h)
    out2 = ws.inv(1j * ws.k1 * t12h + 1j * ws.k2 * t22h)
    return VectorField(out1, out2)


def lp_norm(f, p: float, ws: SpectralWorkspace) -> float:
    """Discrete L^p norm over the torus, p in [1, inf].

    Scalar fields use |f|; vector fields use the pointwise Euclidean
    magnitude.  For finite p the quadrature weight is dx^2 = (2*pi/N)^2,
    so lp_norm(c, p) = |c| * (2*pi)^(2/p) for a constant c.  p = inf
    returns the grid maximum.

    Raises:
        ValueError: if p < 1 (not a norm).
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got p={p}")
    if isinstance(f, VectorField):
        mag = np.sqrt(f.u1**2 + f.u2**2)
    elif isinstance(f, np.ndarray):
        mag = np.abs(f)
    else:
        raise TypeError(f"expected ScalarField or VectorField, got {type(f).__name__}")
    if np.isinf(p):
        return float(np.max(mag))
    return float((np.sum(mag**p) * ws.dx**2) ** (1.0 / p))
