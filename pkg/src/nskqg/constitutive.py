"""Constitutive laws: pressure, internal energy, capillarity and viscosity coefficients.

The model is closed by power laws in the density,

    p(rho)     = rho^gamma / gamma,                 gamma > 1,
    sigma(rho) = rho^s,                             0 < s <= 1,
    mu(rho)    = rho^m,                             m = s + 1/2,

together with the internal-energy deviation h and the rescaled deviation
G_eps used by the modulated energy,

    h(rho)       = (rho^gamma - 1 - gamma*(rho - 1)) / (gamma*(gamma - 1)),
    G_eps(phi)   = sign(phi) * sqrt(2*h(1 + eps*phi)) / eps,

so that h(1) = h'(1) = 0, h''(rho) = rho^(gamma-2), and
(1/2)*G_eps(phi)^2 = eps^(-2)*h(1 + eps*phi) identically.  For gamma = 2
these reduce to h = (rho-1)^2/2 and G_eps(phi) = phi, implemented as exact
branches.  The capillarity potential S with S'(rho) = rho*sigma'(rho)^2 is
fixed by S(0) = 0, giving S = (s/2)*rho^(2s) and S'' = s^2*(2s-1)*rho^(2s-2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class Params:
    """Admissible model parameters.

    The scaling ties the exponents together: gamma > 1, 0 < s <= 1,
    m = s + 1/2 <= (gamma + 1)/2, 0 < alpha < 1 and 0 < eps < 1.  The
    capillarity strength is kappa = eps^(2*(alpha - 1)) (large for small
    eps), so the capillary term 2*kappa*... in the momentum equation
    carries the full eps dependence through this single factor.
    """

    gamma: float
    s: float
    alpha: float
    eps: float

    def __post_init__(self):
        problems = _violations(self.gamma, self.s, self.alpha, self.eps)
        if problems:
            raise ParameterError("; ".join(problems))

    @property
    def m(self) -> float:
        return self.s + 0.5

    @property
    def kappa(self) -> float:
        return self.eps ** (2.0 * (self.alpha - 1.0))


def _violations(gamma: float, s: float, alpha: float, eps: float) -> list[str]:
    problems = []
    if not gamma > 1.0:
        problems.append(f"gamma must be > 1 (got {gamma})")
    if not (0.0 < s <= 1.0):
        problems.append(f"s must be in (0, 1] (got {s})")
    if s + 0.5 > (gamma + 1.0) / 2.0 + 1e-15:
        problems.append(
            f"m = s + 1/2 = {s + 0.5} exceeds (gamma + 1)/2 = {(gamma + 1.0) / 2.0}"
        )
    if not (0.0 < alpha < 1.0):
        problems.append(f"alpha must be in (0, 1) (got {alpha})")
    if not (0.0 < eps < 1.0):
        problems.append(f"eps must be in (0, 1) (got {eps})")
    return problems


def validate_params(gamma: float, s: float, alpha: float, eps: float) -> Params:
    """Build a Params, raising ParameterError naming every violated constraint."""
    return Params(float(gamma), float(s), float(alpha), float(eps))


def _check_nonneg(rho: np.ndarray, what: str) -> None:
    if np.any(rho < 0.0):
        raise DomainError(f"{what} requires rho >= 0, got min {np.min(rho):.6g}")


def _scalar_like(x, template) -> float | np.ndarray:
    return float(x) if np.ndim(template) == 0 else x


def pressure(rho, params: Params):
    """Pressure p(rho) = rho^gamma / gamma for rho >= 0."""
    r = np.asarray(rho, dtype=float)
    _check_nonneg(r, "pressure")
    return _scalar_like(r**params.gamma / params.gamma, rho)


def internal_energy(rho, params: Params):
    """Internal-energy deviation h(rho) >= 0 with h(1) = h'(1) = 0.

    Near rho = 1 the closed form cancels catastrophically, so for
    |rho - 1| < 1e-4 the value comes from the binomial series
    z^2*(1/2 + (gamma-2)*z/6 + (gamma-2)*(gamma-3)*z^2/24), accurate to
    ~1e-13 relative at the branch point.  gamma = 2 short-circuits to the
    exact (rho-1)^2/2.  Tiny negative rounding residues are clamped to 0.
    """
    g = params.gamma
    r = np.asarray(rho, dtype=float)
    _check_nonneg(r, "internal_energy")
    z = r - 1.0
    if g == 2.0:
        return _scalar_like(0.5 * z * z, rho)
    h = (r**g - 1.0 - g * z) / (g * (g - 1.0))
    series = z * z * (0.5 + (g - 2.0) * z / 6.0 + (g - 2.0) * (g - 3.0) * z * z / 24.0)
    h = np.where(np.abs(z) < 1e-4, series, h)
    return _scalar_like(np.maximum(h, 0.0), rho)


def g_eps(phi, params: Params):
    """Rescaled energy deviation G_eps(phi) = sign(phi)*sqrt(2*h(1+eps*phi))/eps.

    Satisfies (1/2)*G_eps^2 = eps^(-2)*h(1 + eps*phi) exactly (both sides
    share the computed h) and reduces to the identity map for gamma = 2.

    Raises:
        DomainError: if 1 + eps*phi < 0 anywhere (beyond vacuum).
    """
    p = np.asarray(phi, dtype=float)
    if params.gamma == 2.0:
        return _scalar_like(p.copy(), phi)
    r = 1.0 + params.eps * p
    if np.any(r < 0.0):
        raise DomainError(
            f"g_eps requires 1 + eps*phi >= 0, got min {np.min(r):.6g}"
        )
    h = internal_energy(r, params)
    return _scalar_like(np.sign(p) * np.sqrt(2.0 * np.asarray(h)) / params.eps, phi)


def _power(rho, q: float, what: str):
    r = np.asarray(rho, dtype=float)
    _check_nonneg(r, what)
    if q < 0.0 and np.any(r == 0.0):
        raise DomainError(f"{what} has exponent {q} < 0 and requires rho > 0")
    return r**q


def sigma(rho, params: Params):
    """Capillarity coefficient sigma(rho) = rho^s."""
    return _scalar_like(_power(rho, params.s, "sigma"), rho)


def sigma_prime(rho, params: Params):
    """sigma'(rho) = s * rho^(s-1); needs rho > 0 when s < 1."""
    return _scalar_like(params.s * _power(rho, params.s - 1.0, "sigma'"), rho)


def mu(rho, params: Params):
    """Viscosity mu(rho) = rho^m with m = s + 1/2; mu(1) = 1 always."""
    return _scalar_like(_power(rho, params.m, "mu"), rho)


def S(rho, params: Params):
    """Capillarity potential S(rho) = (s/2) * rho^(2s), the S'(rho) = rho*sigma'(rho)^2 antiderivative with S(0) = 0."""
    return _scalar_like(0.5 * params.s * _power(rho, 2.0 * params.s, "S"), rho)


def S_second(rho, params: Params):
    """S''(rho) = s^2 * (2s - 1) * rho^(2s-2); needs rho > 0 when s < 1."""
    q = params.s**2 * (2.0 * params.s - 1.0)
    return _scalar_like(q * _power(rho, 2.0 * params.s - 2.0, "S''"), rho)


_WHICH = {
    "sigma": sigma,
    "mu": mu,
    "S": S,
    "sigma'": sigma_prime,
    "S''": S_second,
}


def sigma_mu_S(rho, which: str, params: Params):
    """Dispatch one of the power-law coefficients by name.

    Args:
        which: one of 'sigma', 'mu', 'S', "sigma'", "S''".
    """
    if which not in _WHICH:
        raise ValueError(f"unknown coefficient {which!r}; expected one of {sorted(_WHICH)}")
    return _WHICH[which](rho, params)
