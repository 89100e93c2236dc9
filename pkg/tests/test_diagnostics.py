"""Diagnostics tests.

Hand-derived reference values (domain (2pi)^2, so int cos^2 = int sin^2
= 2 pi^2):

* rho = 1, m = perp_grad(cos x1) = (0, -sin x1):
  E_eps = (1/2) int sin^2 = pi^2, and D(u) has only the off-diagonal
  entry -cos(x1)/2, so D_eps = 2 int 2 (cos/2)^2 = 2 pi^2.
* phi = cos x1: E_0 = (1/2)(2pi^2 + 2pi^2) = 2 pi^2, D_0 = 2 pi^2.
* Rest state rho = 1 + 0.3 cos x1, m = 0, gamma = 2, s = 1, alpha = 1/2,
  eps = 0.2 (kappa = 5): sigma = rho so int |grad sigma|^2 = 0.18 pi^2,
  int h = 0.09 pi^2, hence
      E_eps = 25 * 0.09 pi^2 + 5 * 0.18 pi^2            = 3.15 pi^2,
      H_eps = 2.25 pi^2 + 2 * 5 * 0.18 pi^2 (phi = 0)   = 4.05 pi^2.
  The differing capillary weights (kappa in E, 2 kappa in H) are both
  pinned here.
"""

import numpy as np
import pytest

from nskqg.checks import random_band_limited
from nskqg.constitutive import Params, internal_energy
from nskqg.diagnostics import (
    CSV_COLUMNS,
    DiagnosticsRow,
    cross_dissipation,
    diagnostics_row,
    energy_nsk,
    energy_qg,
    fit_rate,
    identity_residual,
    modulated_energy,
    momentum_norm_chain,
    wellprep_check,
)
from nskqg.errors import DomainError
from nskqg.nsk import NskState
from nskqg.qg import QgState
from nskqg.spectral import VectorField, perp_grad

PI2 = np.pi**2


def _params(**kw):
    base = dict(gamma=2.0, s=0.5, alpha=0.5, eps=0.2)
    base.update(kw)
    return Params(**base)


def _rest_state(ws):
    """The closed-form rest state from the module docstring (s = 1)."""
    rho = 1.0 + 0.3 * np.cos(ws.x1)
    mom = VectorField(np.zeros_like(rho), np.zeros_like(rho))
    return NskState(rho, mom, 0.0), _params(s=1.0)


class TestEnergyNsk:
    def test_kinetic_hand_value(self, ws32):
        rho = np.ones((32, 32))
        mom = perp_grad(np.cos(ws32.x1), ws32)
        E, D = energy_nsk(NskState(rho, mom, 0.0), _params(), ws32)
        assert E == pytest.approx(PI2, rel=1e-12)
        assert D == pytest.approx(2 * PI2, rel=1e-12)

    def test_kinetic_quadratic_scaling(self, ws32):
        rho = np.ones((32, 32))
        v = perp_grad(np.cos(ws32.x1), ws32)
        E1, D1 = energy_nsk(NskState(rho, v, 0.0), _params(), ws32)
        E2, D2 = energy_nsk(
            NskState(rho, VectorField(2 * v.u1, 2 * v.u2), 0.0), _params(), ws32
        )
        assert E2 == pytest.approx(4 * E1, rel=1e-12)
        assert D2 == pytest.approx(4 * D1, rel=1e-12)

    def test_rest_state_hand_value(self, ws32):
        state, params = _rest_state(ws32)
        E, D = energy_nsk(state, params, ws32)
        assert E == pytest.approx(3.15 * PI2, rel=1e-12)
        assert D == 0.0

    def test_uniform_rest_is_zero(self, ws32):
        rho = np.ones((32, 32))
        mom = VectorField(np.zeros_like(rho), np.zeros_like(rho))
        E, D = energy_nsk(NskState(rho, mom, 0.0), _params(), ws32)
        assert E == 0.0 and D == 0.0

    def test_vacuum_rejected(self, ws16):
        rho = np.ones((16, 16))
        rho[3, 5] = -0.2
        mom = VectorField(np.zeros_like(rho), np.zeros_like(rho))
        with pytest.raises(DomainError, match="positive"):
            energy_nsk(NskState(rho, mom, 0.0), _params(), ws16)


class TestEnergyQg:
    def test_single_mode_hand_value(self, ws32):
        E, D = energy_qg(QgState(np.cos(ws32.x1), 0.0), _params(), ws32)
        assert E == pytest.approx(2 * PI2, rel=1e-12)
        assert D == pytest.approx(2 * PI2, rel=1e-12)

    def test_constant_profile(self, ws32):
        c = 0.7
        E, D = energy_qg(QgState(np.full((32, 32), c), 0.0), _params(), ws32)
        assert E == pytest.approx(0.5 * c**2 * (2 * np.pi) ** 2, rel=1e-12)
        assert D == pytest.approx(0.0, abs=1e-13)


class TestCrossDissipation:
    def test_matched_velocities_vanish(self, ws32):
        phi = np.cos(ws32.x1) + 0.5 * np.cos(ws32.x2)
        v = perp_grad(phi, ws32)
        nsk = NskState(np.ones((32, 32)), v, 0.0)
        assert cross_dissipation(nsk, QgState(phi, 0.0), _params(), ws32) == pytest.approx(
            0.0, abs=1e-13
        )

    def test_zero_profile_recovers_dissipation(self, ws32):
        rho = np.ones((32, 32))
        mom = perp_grad(np.cos(ws32.x1), ws32)
        nsk = NskState(rho, mom, 0.0)
        params = _params()
        _, D = energy_nsk(nsk, params, ws32)
        got = cross_dissipation(nsk, QgState(np.zeros((32, 32)), 0.0), params, ws32)
        assert got == pytest.approx(D, rel=1e-12)


class TestModulatedEnergy:
    def test_zero_pair(self, ws16):
        rho = np.ones((16, 16))
        nsk = NskState(rho, VectorField(np.zeros_like(rho), np.zeros_like(rho)), 0.0)
        qg = QgState(np.zeros((16, 16)), 0.0)
        assert modulated_energy(nsk, qg, 0.0, _params(), ws16) == 0.0

    def test_visc_accum_passthrough(self, ws16):
        rho = np.ones((16, 16))
        nsk = NskState(rho, VectorField(np.zeros_like(rho), np.zeros_like(rho)), 0.0)
        qg = QgState(np.zeros((16, 16)), 0.0)
        params = _params()
        h0 = modulated_energy(nsk, qg, 0.0, params, ws16)
        assert modulated_energy(nsk, qg, 0.7, params, ws16) == pytest.approx(h0 + 0.7)

    def test_rest_state_hand_value(self, ws32):
        state, params = _rest_state(ws32)
        qg = QgState(np.zeros((32, 32)), 0.0)
        H = modulated_energy(state, qg, 0.0, params, ws32)
        assert H == pytest.approx(4.05 * PI2, rel=1e-12)

    def test_g_term_equals_internal_energy(self, ws32):
        """With phi = 0 the G contribution is eps^-2 int h(rho) for any gamma."""
        rho = 1.0 + 0.3 * np.cos(ws32.x1)
        mom = VectorField(np.zeros_like(rho), np.zeros_like(rho))
        for gamma in (2.0, 3.0):
            params = _params(gamma=gamma, s=1.0)
            H = modulated_energy(
                NskState(rho, mom, 0.0), QgState(np.zeros((32, 32)), 0.0), 0.0, params, ws32
            )
            cap = 2.0 * params.kappa * ws32.integrate(
                perp_grad(rho, ws32).u1 ** 2 + perp_grad(rho, ws32).u2 ** 2
            )
            want = ws32.integrate(internal_energy(rho, params)) / params.eps**2 + cap
            assert H == pytest.approx(want, rel=1e-10)

    def test_nonnegative_on_random_pair(self, ws32, rng):
        params = _params()
        phi = random_band_limited(ws32, rng)
        rho = 1.0 + 0.2 * random_band_limited(ws32, rng)
        mom = VectorField(
            rho * random_band_limited(ws32, rng), rho * random_band_limited(ws32, rng)
        )
        H = modulated_energy(NskState(rho, mom, 0.0), QgState(phi, 0.0), 0.0, params, ws32)
        assert H >= 0.0

    def test_time_mismatch_rejected(self, ws16):
        rho = np.ones((16, 16))
        nsk = NskState(rho, VectorField(np.zeros_like(rho), np.zeros_like(rho)), 0.1)
        qg = QgState(np.zeros((16, 16)), 0.2)
        with pytest.raises(ValueError, match="state times differ"):
            modulated_energy(nsk, qg, 0.0, _params(), ws16)
        # an explicit step size widens the tolerance to dt/2
        assert modulated_energy(nsk, qg, 0.0, _params(), ws16, dt=0.5) == pytest.approx(0.0)


class TestDiagnosticsRow:
    def test_csv_columns(self):
        assert CSV_COLUMNS[0] == "t"
        assert len(CSV_COLUMNS) == 13
        assert CSV_COLUMNS == (
            "t", "mass", "E_eps", "D_eps", "E_0", "D_0", "H_eps", "visc_accum",
            "norm_rho_gamma", "norm_mom", "norm_kinetic", "norm_G", "norm_cap",
        )

    def test_zero_pair_row(self, ws16):
        rho = np.ones((16, 16))
        nsk = NskState(rho, VectorField(np.zeros_like(rho), np.zeros_like(rho)), 0.0)
        row = diagnostics_row(nsk, QgState(np.zeros((16, 16)), 0.0), 0.0, _params(), ws16)
        assert row.mass == pytest.approx((2 * np.pi) ** 2, rel=1e-14)
        for name in CSV_COLUMNS[2:]:
            assert getattr(row, name) == 0.0, name

    def test_rest_state_norms(self, ws32):
        state, params = _rest_state(ws32)
        row = diagnostics_row(state, QgState(np.zeros((32, 32)), 0.0), 0.0, params, ws32)
        # norm_G = ||1.5 cos||_2, norm_rho_gamma = ||0.3 cos||_2,
        # norm_cap^2 = kappa int |grad rho|^2 = 0.9 pi^2
        assert row.norm_G == pytest.approx(1.5 * np.pi * np.sqrt(2), rel=1e-12)
        assert row.norm_rho_gamma == pytest.approx(0.3 * np.pi * np.sqrt(2), rel=1e-12)
        assert row.norm_cap**2 == pytest.approx(0.9 * PI2, rel=1e-12)
        assert row.norm_kinetic == 0.0 and row.norm_mom == 0.0
        assert row.E_eps == pytest.approx(3.15 * PI2, rel=1e-12)
        assert row.H_eps == pytest.approx(4.05 * PI2, rel=1e-12)

    def test_row_matches_modulated_energy(self, ws32, rng):
        params = _params()
        phi = random_band_limited(ws32, rng)
        rho = 1.0 + 0.2 * random_band_limited(ws32, rng)
        mom = VectorField(
            rho * random_band_limited(ws32, rng), rho * random_band_limited(ws32, rng)
        )
        nsk, qg = NskState(rho, mom, 0.0), QgState(phi, 0.0)
        row = diagnostics_row(nsk, qg, 0.3, params, ws32)
        assert row.H_eps == pytest.approx(
            modulated_energy(nsk, qg, 0.3, params, ws32), rel=1e-12
        )
        assert row.H_eps == pytest.approx(
            0.5 * row.norm_kinetic**2 + 0.5 * row.norm_G**2 + 2 * row.norm_cap**2 + 0.3,
            rel=1e-12,
        )

    def test_time_mismatch_rejected(self, ws16):
        rho = np.ones((16, 16))
        nsk = NskState(rho, VectorField(np.zeros_like(rho), np.zeros_like(rho)), 0.0)
        with pytest.raises(ValueError, match="state times differ"):
            diagnostics_row(nsk, QgState(np.zeros((16, 16)), 1.0), 0.0, _params(), ws16)


class TestWellPrep:
    def test_generator_data_exact(self, ws32):
        """Snapped profile: d2 = 0 bit-exactly, and d1 = 0 at gamma = 2."""
        params = _params()
        rho0 = 1.0 + params.eps * (np.cos(ws32.x1) + 0.5 * np.cos(ws32.x2))
        phi0 = (rho0 - 1.0) / params.eps
        wp = wellprep_check(rho0, perp_grad(phi0, ws32), phi0, params, ws32)
        assert wp.d2 == 0.0
        assert wp.d1 == 0.0
        assert wp.d3 > 0.0  # sqrt(rho) u - perp_grad phi = (sqrt(rho)-1) u != 0

    def test_d1_positive_off_gamma_two(self, ws32):
        params = _params(gamma=3.0)
        rho0 = 1.0 + params.eps * np.cos(ws32.x1)
        phi0 = (rho0 - 1.0) / params.eps
        wp = wellprep_check(rho0, perp_grad(phi0, ws32), phi0, params, ws32)
        assert wp.d2 == 0.0
        assert wp.d1 > 1e-8  # G_eps deviates from identity at gamma != 2

    def test_d3_small_eps_asymptotics(self, ws32):
        # sqrt(1+eps phi) u - u ~ (eps phi / 2) u
        eps = 0.01
        params = _params(eps=eps)
        phi0 = np.cos(ws32.x1)
        rho0 = 1.0 + eps * phi0
        v = perp_grad(phi0, ws32)
        wp = wellprep_check(rho0, v, phi0, params, ws32)
        want = np.sqrt(
            ws32.integrate((0.5 * eps * phi0) ** 2 * (v.u1**2 + v.u2**2))
        )
        assert wp.d3 == pytest.approx(want, rel=1e-2)

    def test_d4_scaling(self, ws32):
        phi0 = np.cos(ws32.x1) + 0.5 * np.cos(ws32.x1 + ws32.x2 + 0.3)
        pts = []
        for eps in (0.4, 0.2, 0.1):
            params = _params(eps=eps)
            rho0 = 1.0 + eps * phi0
            wp = wellprep_check(rho0, perp_grad(phi0, ws32), phi0, params, ws32)
            pts.append((eps, wp.d4))
        slope, _, _ = fit_rate(pts)
        assert slope >= params.alpha - 0.1

    def test_vacuum_rejected(self, ws16):
        rho0 = np.full((16, 16), -1.0)
        z = np.zeros((16, 16))
        with pytest.raises(DomainError, match="positive"):
            wellprep_check(rho0, VectorField(z, z), z, _params(), ws16)


class TestFitRate:
    def test_exact_power_law(self):
        eps = [0.4, 0.2, 0.1, 0.05]
        slope, intercept, resid = fit_rate([(e, 3.0 * e**2) for e in eps])
        assert slope == pytest.approx(2.0, abs=1e-12)
        assert intercept == pytest.approx(np.log(3.0), abs=1e-12)
        assert resid <= 1e-12

    def test_constant_values(self):
        slope, _, resid = fit_rate([(e, 5.0) for e in (0.4, 0.2, 0.1)])
        assert slope == pytest.approx(0.0, abs=1e-13)
        assert resid <= 1e-13

    def test_noisy_power_law(self, rng):
        eps = np.array([0.4, 0.28, 0.2, 0.14, 0.1])
        vals = 2.0 * eps**1.5 * (1.0 + 0.05 * rng.standard_normal(eps.size))
        slope, _, _ = fit_rate(list(zip(eps, vals)))
        assert slope == pytest.approx(1.5, abs=0.2)

    @pytest.mark.parametrize(
        "points,msg",
        [
            ([(0.4, 1.0), (0.2, 0.5)], "at least 3"),
            ([(0.4, 1.0), (0.2, 0.5), (0.1, -0.1)], "positive"),
            ([(0.4, 1.0), (0.4, 0.5), (0.1, 0.2)], "distinct"),
            ([(0.4, 1.0), (-0.2, 0.5), (0.1, 0.2)], "positive"),
        ],
    )
    def test_invalid_inputs(self, points, msg):
        with pytest.raises(ValueError, match=msg):
            fit_rate(points)


class TestMomentumNormChain:
    @pytest.mark.parametrize("gamma", [1.5, 2.0, 3.0])
    def test_holder_bound_holds(self, ws32, rng, gamma):
        params = _params(gamma=gamma)
        phi = random_band_limited(ws32, rng)
        rho = 1.0 + 0.2 * random_band_limited(ws32, rng)
        v = perp_grad(phi, ws32)
        mom = VectorField(
            rho * (v.u1 + 0.3 * random_band_limited(ws32, rng)),
            rho * (v.u2 + 0.3 * random_band_limited(ws32, rng)),
        )
        lhs, rhs = momentum_norm_chain(
            NskState(rho, mom, 0.0), QgState(phi, 0.0), params, ws32
        )
        assert lhs <= rhs * (1.0 + 1e-12)

    def test_uniform_density_bound(self, ws32):
        # rho = 1, phi = 0: rhs = ||1||_4 ||m||_2 = (2 pi)^(1/2) pi sqrt(2)
        params = _params()
        mom = perp_grad(np.cos(ws32.x1), ws32)
        lhs, rhs = momentum_norm_chain(
            NskState(np.ones((32, 32)), mom, 0.0), QgState(np.zeros((32, 32)), 0.0),
            params, ws32,
        )
        assert lhs <= rhs * (1.0 + 1e-12)
        assert rhs == pytest.approx(2.0 * np.pi**1.5, rel=1e-12)


class TestIdentityResidual:
    def test_exact_linear_balance(self):
        ts = np.linspace(0.0, 2.0, 9)
        E = 5.0 - 1.5 * ts
        D = np.full_like(ts, 1.5)
        assert identity_residual(ts, E, D) <= 1e-15

    def test_exact_quadratic_balance(self):
        # E = 1 - t^2, D = 2t: trapezoid integrates the linear D exactly
        ts = np.linspace(0.0, 0.5, 11)
        assert identity_residual(ts, 1.0 - ts**2, 2.0 * ts) <= 1e-14

    def test_known_violation(self):
        assert identity_residual([0.0, 1.0], [1.0, 0.9], [0.0, 0.0]) == pytest.approx(0.1)

    def test_zero_initial_energy_absolute(self):
        assert identity_residual([0.0, 1.0], [0.0, 0.1], [0.0, 0.0]) == pytest.approx(0.1)

    def test_invalid_shapes(self):
        with pytest.raises(ValueError, match="equal-length"):
            identity_residual([0.0, 1.0], [1.0, 1.0, 1.0], [0.0, 0.0])
        with pytest.raises(ValueError, match="at least 2"):
            identity_residual([0.0], [1.0], [0.0])
