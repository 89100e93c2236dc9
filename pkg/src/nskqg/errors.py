"""Exception types shared across the package."""

from __future__ import annotations


class ParameterError(ValueError):
    """A physical parameter violates the admissibility constraints."""


class DomainError(ValueError):
    """A constitutive law was evaluated outside its domain (e.g. negative density)."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""


class VacuumError(RuntimeError):
    """The density dropped to the vacuum floor during a run."""

    def __init__(self, t: float, min_rho: float, rho_min: float):
        super().__init__(
            f"density reached {min_rho:.6g} at t={t:.6g} (vacuum floor {rho_min:.6g})"
        )
        self.t = t
        self.min_rho = min_rho
        self.rho_min = rho_min


class BlowUpError(RuntimeError):
    """A state stopped being finite during a run."""

    def __init__(self, t: float, what: str = "state"):
        super().__init__(f"{what} became non-finite at t={t:.6g}")
        self.t = t


class SweepError(RuntimeError):
    """Too few sweep members succeeded to fit convergence rates."""
