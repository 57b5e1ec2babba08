"""Tests for branch-continuous square-root tracking and phase tables."""

import cmath
import math

import numpy as np
import pytest

from epencircle.model import PulseParams, frequency_scale
from epencircle.tracking import (
    BranchTrackingError,
    PhaseTable,
    integrate_tracked_root,
    split_squared_x,
    split_squared_x_prime,
    track_segment,
)


class TestTrackSegment:
    def test_identity_branch(self):
        # fg(z) = z^2 tracked from r0 = z0 gives the root z itself
        zs, roots = track_segment(lambda z: z * z, 1.0 + 0.0j, 2.0 + 1.0j, 1.0 + 0.0j)
        assert np.allclose(roots, zs, rtol=1e-12)

    def test_negative_branch(self):
        zs, roots = track_segment(lambda z: z * z, 1.0 + 0.0j, 2.0 + 1.0j, -1.0 + 0.0j)
        assert np.allclose(roots, -zs, rtol=1e-12)

    def test_continuity_around_winding(self):
        # fg(z) = exp(2z): tracked root is exp(z) even when Im z advances by
        # several pi (the principal branch would flip repeatedly)
        z0, z1 = 0.0 + 0.0j, 0.0 + 8.0j
        zs, roots = track_segment(lambda z: np.exp(2 * z), z0, z1, 1.0 + 0.0j)
        assert np.allclose(roots, np.exp(zs), rtol=1e-10)

    def test_step_continuity(self):
        zs, roots = track_segment(lambda z: np.exp(2 * z), 0.0j, 3.0 + 5.0j, 1.0 + 0.0j)
        jumps = np.abs(np.diff(roots))
        scale = np.abs(roots[:-1]) + np.abs(roots[1:])
        assert np.all(jumps < 0.5 * scale)


class TestIntegrateTrackedRoot:
    def test_polynomial_closed_form(self):
        # int_z0^z1 z dz = (z1^2 - z0^2) / 2
        z0, z1 = 1.0 + 0.5j, 3.0 - 2.0j
        val, r_end = integrate_tracked_root(lambda z: z * z, z0, z1, z0)
        assert val == pytest.approx(0.5 * (z1 * z1 - z0 * z0), rel=1e-9)
        assert r_end == pytest.approx(z1, rel=1e-12)

    def test_exponential_closed_form(self):
        z0, z1 = 0.0 + 0.0j, 1.0 + 4.0j
        val, r_end = integrate_tracked_root(lambda z: np.exp(2 * z), z0, z1, 1.0 + 0.0j)
        assert val == pytest.approx(cmath.exp(z1) - cmath.exp(z0), rel=1e-9)
        assert r_end == pytest.approx(cmath.exp(z1), rel=1e-10)

    def test_branch_sign_respected(self):
        z0, z1 = 1.0 + 0.5j, 3.0 - 2.0j
        val, _ = integrate_tracked_root(lambda z: z * z, z0, z1, -z0)
        assert val == pytest.approx(-0.5 * (z1 * z1 - z0 * z0), rel=1e-9)


class TestSplitSquared:
    def test_prime_matches_finite_difference(self, helium):
        p = PulseParams(eps0_max=2e-3, tau=300.0, alpha=1.5)
        h = 1e-6
        for x in (0.0, 0.7 - 0.4j, -1.3 + 0.9j):
            fd = (split_squared_x(helium, p, x + h) - split_squared_x(helium, p, x - h)) / (2 * h)
            assert split_squared_x_prime(helium, p, x) == pytest.approx(fd, rel=1e-7)

    def test_tau_independence(self, helium):
        a = PulseParams(eps0_max=2e-3, tau=100.0, alpha=1.5)
        b = PulseParams(eps0_max=2e-3, tau=900.0, alpha=1.5)
        x = 0.8 - 0.3j
        assert split_squared_x(helium, a, x) == pytest.approx(
            split_squared_x(helium, b, x), rel=1e-14
        )


@pytest.fixture(scope="module")
def table(helium, eps0_ep):
    p = PulseParams(eps0_max=4 * eps0_ep, tau=400.0, alpha=1.0)
    return PhaseTable.build(helium, p)


class TestPhaseTable:

    def test_root_squares_back(self, table, helium):
        for x in (-5.0, -1.2, 0.0, 0.9, 3.7):
            r = table.root(x)
            assert r * r == pytest.approx(
                split_squared_x(helium, table.p, x), rel=1e-12
            )

    def test_integral_additivity(self, table):
        a, b, c = -4.0, 0.3, 5.1
        whole = table.integral_root(a, c)
        parts = table.integral_root(a, b) + table.integral_root(b, c)
        assert whole == pytest.approx(parts, rel=1e-11)

    def test_cumulative_endpoints(self, table):
        assert table.cumulative_root(-table.p.t_span) == 0.0
        assert table.cumulative_root(-100.0) == 0.0
        assert table.cumulative_root(table.p.t_span) == pytest.approx(
            table.integral_root(-table.p.t_span, table.p.t_span), rel=1e-12
        )

    def test_integral_root_vs_quadrature(self, table):
        # brute-force Simpson over the tracked root on a flip-free interval
        a, b = 1.5, 2.5
        xs = np.linspace(a, b, 4001)
        vals = np.array([table.root(x) for x in xs])
        h = (b - a) / (len(xs) - 1)
        ref = h / 3 * (vals[0] + vals[-1] + 4 * vals[1:-1:2].sum() + 2 * vals[2:-1:2].sum())
        assert table.integral_root(a, b) == pytest.approx(ref, rel=1e-9)

    def test_integral_delta_closed_form(self, table, helium):
        p = table.p
        a, b = -2.0, 3.0
        xs = np.linspace(a, b, 8001)
        c = 0.5 * p.alpha * p.eps0_max * helium.mu.real
        deltas = c * xs + 0.5j * helium.gamma
        ref = np.trapezoid(deltas, xs)
        assert table.integral_delta(a, b) == pytest.approx(ref, rel=1e-10)

    def test_min_abs_positive_off_pinch(self, table, helium):
        w0 = frequency_scale(helium, table.p)
        assert table.min_abs_split() > 1e-3 * w0

    def test_pinch_detected(self, helium_real, eps0_ep):
        # zero chirp, real dipole, above-critical strength: the split vanishes
        # on the real axis at x = +-sqrt(2 ln r)
        p = PulseParams(eps0_max=math.sqrt(math.e) * eps0_ep, tau=400.0, alpha=0.0)
        w0 = frequency_scale(helium_real, p)
        try:
            table = PhaseTable.build(helium_real, p)
        except BranchTrackingError:
            return
        assert table.min_abs_split() < 1e-6 * w0
