"""Tests for exact diabatic and close-coupled adiabatic propagation."""

import math

import numpy as np
import pytest

from epencircle.model import PulseParams, SystemParams, tau_for_area
from epencircle.propagator import (
    BranchTrackingError,
    PropagationOptions,
    propagate_adiabatic,
    propagate_diabatic,
    survival_probability,
)


@pytest.fixture(scope="module")
def lossless():
    """Real dipole, zero width: unitary dynamics, exact area theorem."""
    return SystemParams(omega_r=1.502242, gamma=0.0, mu=-0.192572 + 0.0j)


class TestAreaTheorem:
    @pytest.mark.parametrize("phi", [0.5 * math.pi, math.pi, 2 * math.pi, 3 * math.pi])
    def test_resonant_pulse_area(self, lossless, phi):
        # zero detuning, zero chirp: p_bound = cos^2(phi / 2)
        eps0 = 1e-3
        p = PulseParams(eps0_max=eps0, tau=tau_for_area(lossless, eps0, phi), alpha=0.0)
        assert survival_probability(lossless, p) == pytest.approx(
            math.cos(0.5 * phi) ** 2, abs=1e-8
        )

    def test_zero_field_shortcut(self, lossless):
        p = PulseParams(eps0_max=0.0, tau=100.0, alpha=0.0)
        assert survival_probability(lossless, p) == 1.0


class TestDiabatic:
    def test_norm_non_increasing(self, helium_real, eps0_ep):
        # with Im mu = 0 the only non-Hermitian piece is the decay +i gamma/2,
        # so the total norm can never grow
        p = PulseParams(eps0_max=4 * eps0_ep, tau=tau_for_area(helium_real, 4 * eps0_ep, 3 * math.pi), alpha=1.0)
        res = propagate_diabatic(
            helium_real, p, PropagationOptions(keep_trajectory=True)
        )
        assert res.max_norm_growth < 1e-12

    def test_trajectory_shape_and_start(self, helium, eps0_ep):
        p = PulseParams(eps0_max=2 * eps0_ep, tau=500.0, alpha=0.5)
        res = propagate_diabatic(helium, p, PropagationOptions(keep_trajectory=True, n_samples=301))
        assert res.trajectory is not None
        assert res.trajectory.shape == (301, 4)
        assert res.trajectory[0, 0] == pytest.approx(-p.t_span)
        assert res.trajectory[0, 1] == pytest.approx(1.0, abs=1e-9)
        assert abs(res.trajectory[0, 2]) < 1e-9

    def test_p_bound_in_unit_interval(self, helium, eps0_ep):
        for ratio, alpha in [(0.5, 0.0), (4.0, 1.0), (8.0, 2.0)]:
            eps0 = ratio * eps0_ep
            p = PulseParams(eps0_max=eps0, tau=tau_for_area(helium, eps0, 2 * math.pi), alpha=alpha)
            pb = survival_probability(helium, p)
            assert 0.0 <= pb <= 1.0 + 1e-12

    def test_tolerance_convergence(self, helium, eps0_ep):
        eps0 = 6 * eps0_ep
        p = PulseParams(eps0_max=eps0, tau=tau_for_area(helium, eps0, 3 * math.pi), alpha=1.5)
        loose = propagate_diabatic(helium, p, PropagationOptions(rtol=1e-7, atol=1e-9))
        tight = propagate_diabatic(helium, p, PropagationOptions(rtol=1e-11, atol=1e-13))
        assert loose.p_bound == pytest.approx(tight.p_bound, abs=1e-7)


class TestAdiabatic:
    def test_matches_diabatic(self, helium, eps0_ep):
        eps0 = 8 * eps0_ep
        p = PulseParams(eps0_max=eps0, tau=tau_for_area(helium, eps0, 3 * math.pi), alpha=2.0)
        amps, res_ad = propagate_adiabatic(helium, p)
        res_di = propagate_diabatic(helium, p)
        assert res_ad.p_bound == pytest.approx(res_di.p_bound, rel=1e-6)
        assert res_ad.final_state.c_bound == pytest.approx(
            res_di.final_state.c_bound, rel=1e-5
        )
        assert abs(amps.a_minus) ** 2 + abs(amps.a_plus) ** 2 == pytest.approx(
            1.0, rel=0.5
        )

    def test_zero_field_shortcut(self, helium):
        p = PulseParams(eps0_max=0.0, tau=100.0, alpha=0.0)
        amps, res = propagate_adiabatic(helium, p)
        assert amps.a_minus == 1.0 and amps.a_plus == 0.0
        assert res.p_bound == 1.0

    def test_pinch_raises(self, helium_real, eps0_ep):
        # exact on-axis degeneracy: adiabatic labels are undefined
        p = PulseParams(eps0_max=math.sqrt(math.e) * eps0_ep, tau=400.0, alpha=0.0)
        with pytest.raises(BranchTrackingError):
            propagate_adiabatic(helium_real, p)

    def test_near_pinch_still_tracks(self, helium, eps0_ep):
        # the physical dipole has a small imaginary part, lifting the axis
        # crossing slightly; tracking must survive and agree with diabatic
        eps0 = 2 * eps0_ep
        p = PulseParams(eps0_max=eps0, tau=tau_for_area(helium, eps0, math.pi), alpha=0.01)
        _, res_ad = propagate_adiabatic(helium, p)
        res_di = propagate_diabatic(helium, p)
        assert res_ad.p_bound == pytest.approx(res_di.p_bound, rel=1e-5)
