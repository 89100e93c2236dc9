"""Viscous quasi-geostrophic solver via the Helmholtz splitting u = phi - lap phi.

The target equation for the stream potential phi,

    d_t (lap phi - phi) + (perp_grad phi . grad) lap phi = mu(1) lap^2 phi,

is integrated through the equivalent first-order form in u = phi - lap phi:

    d_t u = mu lap u + (perp_grad phi . grad)(phi - u) - mu (phi - u),
    phi   = helmholtz_solve(u),

where phi - u = lap phi.  Stiff diffusion is handled exactly per mode by
the integrating factor exp(-mu |k|^2 dt); the transport and zeroth-order
terms advance by an explicit midpoint rule in the transformed variable, so
the only step restriction is the advective CFL.  The step accepts an
externally imposed dt, letting a co-stepped compressible run share its
time grid exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constitutive as law
from .constitutive import Params
from .errors import BlowUpError
from .spectral import ScalarField, SpectralWorkspace, grad, perp_grad
from .nsk import TimeControls


@dataclass
class QgState:
    """Stream potential phi and time; u = phi - lap phi is recovered spectrally."""

    phi: ScalarField
    t: float

    def copy(self) -> "QgState":
        return QgState(self.phi.copy(), self.t)


def helmholtz_solve(u: ScalarField, ws: SpectralWorkspace) -> ScalarField:
    """Solve -lap phi + phi = u: phi_hat = u_hat / (1 + |k|^2).

    Uses the workspace's Nyquist-zeroed |k|^2, so it is the exact inverse
    of the discrete u = phi - lap phi built from the same symbols.
    """
    return ws.inv(ws.fwd(u) / (1.0 + ws.k_sq))


def phi_to_u(phi: ScalarField, ws: SpectralWorkspace) -> ScalarField:
    """The auxiliary variable u = phi - lap phi."""
    return ws.inv((1.0 + ws.k_sq) * ws.fwd(phi))


def _nonlinear(u_hat: np.ndarray, params: Params, ws: SpectralWorkspace) -> np.ndarray:
    """Hat-space tendency of everything but diffusion: transport and -mu(phi-u)."""
    phi_hat = u_hat / (1.0 + ws.k_sq)
    psi_hat = phi_hat - u_hat  # lap phi
    v1 = ws.inv(-1j * ws.k2 * phi_hat)
    v2 = ws.inv(1j * ws.k1 * phi_hat)
    g1 = ws.inv(1j * ws.k1 * psi_hat)
    g2 = ws.inv(1j * ws.k2 * psi_hat)
    transport = ws.fwd(v1 * g1 + v2 * g2) * ws.dealias_mask
    mu1 = float(law.mu(1.0, params))
    return transport - mu1 * psi_hat


def qg_rhs(state: QgState, params: Params, ws: SpectralWorkspace) -> ScalarField:
    """Tendency d_u = mu lap u + (perp_grad phi . grad)(phi - u) - mu (phi - u)."""
    if not np.all(np.isfinite(state.phi)):
        raise BlowUpError(state.t, "phi")
    u_hat = (1.0 + ws.k_sq) * ws.fwd(state.phi)
    mu1 = float(law.mu(1.0, params))
    d_u_hat = -mu1 * ws.k_sq * u_hat + _nonlinear(u_hat, params, ws)
    return ws.inv(d_u_hat)


def qg_step(
    state: QgState, dt: float, params: Params, ws: SpectralWorkspace
) -> QgState:
    """One integrating-factor midpoint step of size dt on u = phi - lap phi."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    mu1 = float(law.mu(1.0, params))
    E_half = np.exp(-mu1 * ws.k_sq * (0.5 * dt))
    u0 = (1.0 + ws.k_sq) * ws.fwd(state.phi)
    u_mid = E_half * (u0 + (0.5 * dt) * _nonlinear(u0, params, ws))
    u1 = E_half * (E_half * u0 + dt * _nonlinear(u_mid, params, ws))
    phi = ws.inv(u1 / (1.0 + ws.k_sq))
    if not np.all(np.isfinite(phi)):
        raise BlowUpError(state.t + dt, "phi")
    return QgState(phi, state.t + dt)


def qg_dt(state: QgState, controls: TimeControls, ws: SpectralWorkspace) -> float:
    """Fixed dt, or the advective CFL bound on the geostrophic velocity."""
    if controls.dt > 0.0:
        return controls.dt
    v = perp_grad(state.phi, ws)
    speed = np.sqrt(v.u1**2 + v.u2**2)
    return controls.c_adv * ws.dx / float(np.max(speed + 1.0))


def qg_run(
    init: QgState,
    params: Params,
    T: float,
    controls: TimeControls,
    ws: SpectralWorkspace,
    observer=None,
) -> QgState:
    """Step from init.t to init.t + T; observer(t, state) after each step."""
    if T < 0.0:
        raise ValueError(f"T must be >= 0, got {T}")
    state = init
    t_end = init.t + T
    step = 0
    while state.t < t_end - 1e-12 * max(1.0, t_end):
        dt = min(qg_dt(state, controls, ws), t_end - state.t)
        step += 1
        try:
            state = qg_step(state, dt, params, ws)
        except BlowUpError as e:
            e.args = (f"step {step}: {e.args[0]}",)
            raise
        if observer is not None:
            observer(state.t, state)
    return state


def qg_residual(states: list[QgState], params: Params, ws: SpectralWorkspace) -> float:
    """Self-check: how well a trajectory satisfies the PDE.

    Uses centered time differences of w = lap phi - phi on >= 3 uniformly
    spaced states and returns the maximum over interior times of the L2
    norm of d_t w + (perp_grad phi . grad) lap phi - mu lap^2 phi; O(dt^2)
    for a solver trajectory.
    """
    if len(states) < 3:
        raise ValueError(f"need at least 3 states, got {len(states)}")
    ts = np.array([s.t for s in states])
    dts = np.diff(ts)
    dt = dts[0]
    if np.any(np.abs(dts - dt) > 1e-9 * max(1.0, abs(dt))):
        raise ValueError("states must be uniformly spaced in time")
    mu1 = float(law.mu(1.0, params))
    worst = 0.0
    for i in range(1, len(states) - 1):
        w_prev = ws.fwd(states[i - 1].phi) * (-ws.k_sq - 1.0)
        w_next = ws.fwd(states[i + 1].phi) * (-ws.k_sq - 1.0)
        dtw = (w_next - w_prev) / (2.0 * dt)
        phi_hat = ws.fwd(states[i].phi)
        v1 = ws.inv(-1j * ws.k2 * phi_hat)
        v2 = ws.inv(1j * ws.k1 * phi_hat)
        lap_hat = -ws.k_sq * phi_hat
        g1 = ws.inv(1j * ws.k1 * lap_hat)
        g2 = ws.inv(1j * ws.k2 * lap_hat)
        transport = ws.fwd(v1 * g1 + v2 * g2) * ws.dealias_mask
        res_hat = dtw + transport - mu1 * ws.k_sq**2 * phi_hat
        res = ws.inv(res_hat)
        worst = max(worst, float(np.sqrt(np.sum(res**2) * ws.dx**2)))
    return worst
