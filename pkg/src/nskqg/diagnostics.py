"""Energy functionals, modulated energy, convergence norms and rate fitting.

The two energy identities being monitored are

    d/dt E_eps + D_eps = 0,   E_eps = int( eps^-2 h(rho) + (1/2) rho |u|^2
                                           + kappa |grad sigma(rho)|^2 ),
                              D_eps = 2 int mu(rho) |D(u)|^2,

(the capillary weight kappa is forced by the balance: the force
2 kappa rho grad(sigma' lap sigma) feeds kinetic energy at rate
-kappa d/dt int |grad sigma|^2, so any other weight leaves a
dt-independent residual in the identity),
    d/dt E_0   + D_0   = 0,   E_0   = (1/2) int( |grad phi|^2 + phi^2 ),
                              D_0   = 2 mu(1) int |D(perp_grad phi)|^2,

and the modulated energy coupling a compressible state to a QG profile,

    H_eps = int( (1/2) rho |u - perp_grad phi|^2
                 + (1/2) (G_eps(phi_eps) - phi)^2
                 + 2 kappa |grad sigma(rho)|^2 )
            + int_0^t 2 int mu(rho) |D(u) - D(perp_grad phi)|^2 ds,

with phi_eps = (rho - 1)/eps always derived from the density, never
evolved.  The time integral is accumulated by the caller via trapezoid on
the shared step grid (cross_dissipation supplies the integrand).
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import constitutive as law
from .constitutive import Params
from .errors import DomainError
from .nsk import NskState
from .qg import QgState
from .spectral import (
    SpectralWorkspace,
    VectorField,
    grad,
    lp_norm,
    perp_grad,
    sym_gradient,
)


@dataclass
class DiagnosticsRow:
    """One co-stepped sample of every monitored functional; CSV column order."""

    t: float
    mass: float
    E_eps: float
    D_eps: float
    E_0: float
    D_0: float
    H_eps: float
    visc_accum: float
    norm_rho_gamma: float
    norm_mom: float
    norm_kinetic: float
    norm_G: float
    norm_cap: float


CSV_COLUMNS = tuple(f.name for f in fields(DiagnosticsRow))


def _check_rho(rho) -> None:
    if np.min(rho) <= 0.0:
        raise DomainError(f"density must be positive, got min {np.min(rho):.6g}")


def energy_nsk(state: NskState, params: Params, ws: SpectralWorkspace) -> tuple[float, float]:
    """Energy E_eps and dissipation D_eps of the compressible state."""
    _check_rho(state.rho)
    rho = state.rho
    u = VectorField(state.mom.u1 / rho, state.mom.u2 / rho)
    gs = grad(law.sigma(rho, params), ws)
    e = (
        law.internal_energy(rho, params) / params.eps**2
        + 0.5 * rho * (u.u1**2 + u.u2**2)
        + params.kappa * (gs.u1**2 + gs.u2**2)
    )
    D = sym_gradient(u, ws)
    d = 2.0 * law.mu(rho, params) * (D.t11**2 + 2.0 * D.t12**2 + D.t22**2)
    return ws.integrate(e), ws.integrate(d)


def energy_qg(state: QgState, params: Params, ws: SpectralWorkspace) -> tuple[float, float]:
    """Energy E_0 and dissipation D_0 of the QG profile."""
    gp = grad(state.phi, ws)
    e = 0.5 * (gp.u1**2 + gp.u2**2 + state.phi**2)
    D = sym_gradient(perp_grad(state.phi, ws), ws)
    d = 2.0 * float(law.mu(1.0, params)) * (D.t11**2 + 2.0 * D.t12**2 + D.t22**2)
    return ws.integrate(e), ws.integrate(d)


def cross_dissipation(
    nsk: NskState, qg: QgState, params: Params, ws: SpectralWorkspace
) -> float:
    """Integrand 2 int mu(rho) |D(u) - D(perp_grad phi)|^2 of the H_eps time term."""
    _check_rho(nsk.rho)
    u = VectorField(nsk.mom.u1 / nsk.rho, nsk.mom.u2 / nsk.rho)
    Du = sym_gradient(u, ws)
    Dv = sym_gradient(perp_grad(qg.phi, ws), ws)
    d11 = Du.t11 - Dv.t11
    d12 = Du.t12 - Dv.t12
    d22 = Du.t22 - Dv.t22
    return ws.integrate(2.0 * law.mu(nsk.rho, params) * (d11**2 + 2.0 * d12**2 + d22**2))


def _check_times(t1: float, t2: float, dt: float | None) -> None:
    tol = 0.5 * dt if dt is not None else 1e-9 * max(1.0, abs(t1))
    if abs(t1 - t2) > tol:
        raise ValueError(f"state times differ: {t1} vs {t2} (tolerance {tol:.3g})")


def modulated_energy(
    nsk: NskState,
    qg: QgState,
    visc_accum: float,
    params: Params,
    ws: SpectralWorkspace,
    dt: float | None = None,
) -> float:
    """Modulated energy H_eps >= 0 of the pair; visc_accum is the caller's
    trapezoid accumulation of cross_dissipation along the run."""
    _check_times(nsk.t, qg.t, dt)
    _check_rho(nsk.rho)
    rho = nsk.rho
    v = perp_grad(qg.phi, ws)
    w1 = nsk.mom.u1 / rho - v.u1
    w2 = nsk.mom.u2 / rho - v.u2
    phi_eps = (rho - 1.0) / params.eps
    g_diff = law.g_eps(phi_eps, params) - qg.phi
    gs = grad(law.sigma(rho, params), ws)
    e = (
        0.5 * rho * (w1**2 + w2**2)
        + 0.5 * g_diff**2
        + 2.0 * params.kappa * (gs.u1**2 + gs.u2**2)
    )
    return ws.integrate(e) + visc_accum


def diagnostics_row(
    nsk: NskState,
    qg: QgState,
    visc_accum: float,
    params: Params,
    ws: SpectralWorkspace,
    dt: float | None = None,
) -> DiagnosticsRow:
    """Evaluate every monitored functional for a co-stepped state pair.

    Single-solver runs pass the trivial partner (phi = 0, or rho = 1 with
    m = 0); the cross terms then collapse to single-solver content.
    """
    _check_times(nsk.t, qg.t, dt)
    _check_rho(nsk.rho)
    rho = nsk.rho
    eps = params.eps
    E_eps, D_eps = energy_nsk(nsk, params, ws)
    E_0, D_0 = energy_qg(qg, params, ws)

    v = perp_grad(qg.phi, ws)
    u = VectorField(nsk.mom.u1 / rho, nsk.mom.u2 / rho)
    w = VectorField(u.u1 - v.u1, u.u2 - v.u2)
    sq = np.sqrt(rho)
    phi_eps = (rho - 1.0) / eps
    g_diff = law.g_eps(phi_eps, params) - qg.phi
    gs = grad(law.sigma(rho, params), ws)

    norm_kinetic = lp_norm(VectorField(sq * w.u1, sq * w.u2), 2.0, ws)
    norm_G = lp_norm(g_diff, 2.0, ws)
    norm_cap = eps ** (params.alpha - 1.0) * lp_norm(gs, 2.0, ws)
    H = 0.5 * norm_kinetic**2 + 0.5 * norm_G**2 + 2.0 * norm_cap**2 + visc_accum

    return DiagnosticsRow(
        t=nsk.t,
        mass=ws.integrate(rho),
        E_eps=E_eps,
        D_eps=D_eps,
        E_0=E_0,
        D_0=D_0,
        H_eps=H,
        visc_accum=visc_accum,
        norm_rho_gamma=lp_norm(rho - 1.0, params.gamma, ws),
        norm_mom=lp_norm(
            VectorField(nsk.mom.u1 - v.u1, nsk.mom.u2 - v.u2),
            2.0 * params.gamma / (params.gamma + 1.0),
            ws,
        ),
        norm_kinetic=norm_kinetic,
        norm_G=norm_G,
        norm_cap=norm_cap,
    )


@dataclass(frozen=True)
class WellPrep:
    """The four preparedness discrepancies of an initial data triple."""

    d1: float  # ||G_eps(phi_eps0) - phi0||_L2
    d2: float  # ||(rho0 - 1)/eps - phi0||_L2
    d3: float  # ||sqrt(rho0) u0 - perp_grad phi0||_L2
    d4: float  # eps^(alpha-1) ||grad sqrt(rho0)||_L2


def wellprep_check(
    rho0, u0: VectorField, phi0, params: Params, ws: SpectralWorkspace
) -> WellPrep:
    """Measure how well (rho0, u0) is prepared for the QG profile phi0.

    Generator data rho0 = 1 + eps*phi0, u0 = perp_grad phi0 give d2 = 0
    exactly, d1 = 0 for gamma = 2, and d4 = O(eps^alpha).
    """
    _check_rho(rho0)
    phi_eps = (rho0 - 1.0) / params.eps
    v = perp_grad(phi0, ws)
    sq = np.sqrt(rho0)
    return WellPrep(
        d1=lp_norm(law.g_eps(phi_eps, params) - phi0, 2.0, ws),
        d2=lp_norm(phi_eps - phi0, 2.0, ws),
        d3=lp_norm(VectorField(sq * u0.u1 - v.u1, sq * u0.u2 - v.u2), 2.0, ws),
        d4=params.eps ** (params.alpha - 1.0) * lp_norm(grad(sq, ws), 2.0, ws),
    )


def fit_rate(points, min_points: int = 3) -> tuple[float, float, float]:
    """Least-squares power-law fit value ~ C * eps^slope.

    Args:
        points: iterable of (eps, value) with eps > 0 distinct, value > 0.

    Returns:
        (slope, intercept, max_residual) of the line on (log eps, log value).
    """
    pts = [(float(e), float(v)) for e, v in points]
    if len(pts) < min_points:
        raise ValueError(f"need at least {min_points} points, got {len(pts)}")
    eps = np.array([p[0] for p in pts])
    val = np.array([p[1] for p in pts])
    if np.any(eps <= 0.0):
        raise ValueError("eps values must be positive")
    if len(set(eps.tolist())) != len(eps):
        raise ValueError("eps values must be distinct")
    if np.any(val <= 0.0):
        raise ValueError("fitted values must be positive")
    x = np.log(eps)
    y = np.log(val)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.max(np.abs(resid)))


def momentum_norm_chain(
    nsk: NskState, qg: QgState, params: Params, ws: SpectralWorkspace
) -> tuple[float, float]:
    """The Hoelder chain bounding norm_mom; returns (lhs, rhs) with lhs <= rhs.

    rho u - perp_grad phi = sqrt(rho) * sqrt(rho)(u - perp_grad phi)
                            + (rho - 1) perp_grad phi,
    so with p = 2 gamma/(gamma+1) (1/p = 1/(2 gamma) + 1/2):
    lhs <= ||sqrt(rho)||_{2 gamma} * norm_kinetic
           + ||rho - 1||_p * ||perp_grad phi||_inf.
    """
    rho = nsk.rho
    g = params.gamma
    p = 2.0 * g / (g + 1.0)
    v = perp_grad(qg.phi, ws)
    lhs = lp_norm(VectorField(nsk.mom.u1 - v.u1, nsk.mom.u2 - v.u2), p, ws)
    sq = np.sqrt(rho)
    w = VectorField(sq * (nsk.mom.u1 / rho - v.u1), sq * (nsk.mom.u2 / rho - v.u2))
    rhs = lp_norm(sq, 2.0 * g, ws) * lp_norm(w, 2.0, ws) + lp_norm(
        rho - 1.0, p, ws
    ) * lp_norm(v, np.inf, ws)
    return lhs, rhs


def identity_residual(ts, energies, dissipations) -> float:
    """Max over t of |E(t) + int_0^t D ds - E(0)| / E(0), trapezoid in time."""
    t = np.asarray(ts, dtype=float)
    E = np.asarray(energies, dtype=float)
    D = np.asarray(dissipations, dtype=float)
    if t.shape != E.shape or t.shape != D.shape or t.size < 2:
        raise ValueError("need equal-length t, E, D with at least 2 samples")
    accum = np.concatenate(
        [[0.0], np.cumsum(0.5 * (D[1:] + D[:-1]) * np.diff(t))]
    )
    if E[0] == 0.0:
        return float(np.max(np.abs(E + accum - E[0])))
    return float(np.max(np.abs(E + accum - E[0])) / abs(E[0]))
