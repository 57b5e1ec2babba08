"""Continuity tracking of sqrt(delta^2 + rabi^2) along paths in complex time.

The adiabatic energy split is -sqrt(g) with g = delta^2 + rabi^2; g is entire
but its square root has branch points at the dynamical EPs.  Everything here
works in the dimensionless variable x = t / tau (g depends on t only through
x), enforcing continuity of the root instead of any fixed principal branch.
"""

from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import PulseParams, SystemParams, pulse_at

# Gauss-Legendre 7-point rule on [-1, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(7)


def split_squared_x(sys: SystemParams, p: PulseParams, x: complex) -> complex:
    """g(x) = delta^2 + rabi^2 at t = x * tau (independent of tau)."""
    f = pulse_at(sys, p, x * p.tau)
    return f.delta * f.delta + f.omega_rabi * f.omega_rabi


def split_squared_x_prime(sys: SystemParams, p: PulseParams, x: complex) -> complex:
    """dg/dx, analytic (no numerical differentiation)."""
    f = pulse_at(sys, p, x * p.tau)
    dd = 0.5 * p.alpha * p.eps0_max * sys.mu.real
    dw = -x * f.omega_rabi
    return 2.0 * (f.delta * dd + f.omega_rabi * dw)


def _matched_sqrt(g: complex, prev: complex) -> complex:
    """Square root of g on the branch closer to ``prev``."""
    r = cmath.sqrt(g)
    if abs(r - prev) > abs(r + prev):
        r = -r
    return r


class BranchTrackingError(RuntimeError):
    """Adiabatic labels are ambiguous (energy split too close to zero)."""


def track_segment(fg, z0: complex, z1: complex, r0: complex, n_min: int = 32,
                  max_doublings: int = 14):
    """Follow sqrt(fg) continuously from z0 (value r0) to z1.

    Returns (samples s in [0,1], tracked root values), refined until the
    winding of fg between consecutive samples is small.  ``r0`` must be a
    square root of fg(z0).
    """
    n = n_min
    for _ in range(max_doublings):
        s = np.linspace(0.0, 1.0, n + 1)
        zs = z0 + (z1 - z0) * s
        gs = np.array([fg(z) for z in zs], dtype=complex)
        mags = np.abs(gs)
        # intervals where g is negligible (segment ending at a root) carry no
        # phase information and no weight; exempt them from the winding test
        live = (mags[:-1] > 1e-9 * mags.max()) & (mags[1:] > 1e-9 * mags.max())
        ratios = gs[1:][live] / gs[:-1][live]
        if np.all(np.abs(np.angle(ratios)) < 0.7):
            break
        n *= 2
    roots = np.empty(len(gs), dtype=complex)
    prev = r0
    for i, g in enumerate(gs):
        prev = _matched_sqrt(g, prev)
        roots[i] = prev
    return zs, roots


def integrate_tracked_root(fg, z0: complex, z1: complex, r0: complex,
                           rel_tol: float = 1e-10):
    """Integral of the tracked sqrt(fg) along the straight segment z0 -> z1.

    Returns (integral, root value at z1).  Composite Simpson with doubling
    until the change is below rel_tol (or 2^16 panels).
    """
    prev_val = None
    n = 64
    while True:
        zs, roots = track_segment(fg, z0, z1, r0, n_min=n)
        m = len(zs) - 1
        if m % 2 == 1:
            zs, roots = track_segment(fg, z0, z1, r0, n_min=m + 1)
            m = len(zs) - 1
        h = (z1 - z0) / m
        val = h / 3.0 * (
            roots[0] + roots[-1]
            + 4.0 * np.sum(roots[1:-1:2])
            + 2.0 * np.sum(roots[2:-1:2])
        )
        if prev_val is not None and abs(val - prev_val) <= rel_tol * max(abs(val), 1e-300):
            return val, roots[-1]
        if m >= 1 << 16:
            return val, roots[-1]
        prev_val = val
        n = 2 * m


@dataclass
class PhaseTable:
    """Tracked root R(x) on the real-axis window and its running integral.

    R is the continuous branch of sqrt(g) that starts at +delta(x0) (so the
    bound state correlates with eps_minus there).  ``flips`` are the points
    where R equals minus the principal square root of g.
    """

    sys: SystemParams
    p: PulseParams
    xs: np.ndarray
    cum: np.ndarray          # int_{x0}^{xs[i]} R dx
    flips: list
    sign0: int
    _min_abs: float

    @classmethod
    def build(cls, sys: SystemParams, p: PulseParams, n_base: int = 2048) -> "PhaseTable":
        x0, x1 = -p.t_span, p.t_span

        def fg(z):
            return split_squared_x(sys, p, z)

        f0 = pulse_at(sys, p, x0 * p.tau)
        r_principal = cmath.sqrt(fg(x0))
        sign0 = 1 if abs(r_principal - f0.delta) <= abs(r_principal + f0.delta) else -1

        probe = np.abs([fg(x) for x in np.linspace(x0, x1, n_base + 1)])
        if probe.min() < 1e-18 * probe.max():
            raise BranchTrackingError(
                "the energy split vanishes on the real time axis; "
                "adiabatic labels are undefined there"
            )
        zs, roots = track_segment(fg, x0, x1, sign0 * r_principal,
                                  n_min=n_base, max_doublings=5)
        xs = zs.real
        # locate principal-branch flips and bisect them to high precision
        principal = np.array([cmath.sqrt(fg(x)) for x in xs], dtype=complex)
        signs = np.where(np.abs(roots - principal) <= np.abs(roots + principal), 1, -1)
        flips = []
        for i in np.nonzero(signs[1:] != signs[:-1])[0]:
            a, b = xs[i], xs[i + 1]
            sa = signs[i]
            ra = roots[i]
            while b - a > 1e-12:
                m = 0.5 * (a + b)
                rm = _matched_sqrt(fg(m), ra)
                sm = 1 if abs(rm - cmath.sqrt(fg(m))) <= abs(rm + cmath.sqrt(fg(m))) else -1
                if sm == sa:
                    a, ra = m, rm
                else:
                    b = m
            flips.append(0.5 * (a + b))

        # refine the on-axis minimum of |g| so a root sitting on (or next to)
        # the real axis is detected regardless of grid resolution
        mags = np.abs([fg(x) for x in xs])
        k = int(np.argmin(mags))
        a, b = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
        for _ in range(80):
            m1 = a + (b - a) / 3.0
            m2 = b - (b - a) / 3.0
            if abs(fg(m1)) < abs(fg(m2)):
                b = m2
            else:
                a = m1
        min_abs = math.sqrt(abs(fg(0.5 * (a + b))))

        table = cls(sys=sys, p=p, xs=xs, cum=np.zeros_like(xs), flips=flips,
                    sign0=sign0, _min_abs=min_abs)
        # running integral of R, Gauss-Legendre per grid interval (flip points
        # fall on interval interiors only to within 1e-12, harmless at GL order)
        nodes = list(xs)
        for f in flips:
            bisect.insort(nodes, f)
        nodes = np.array(nodes)
        seg_vals = [
            table._gl_segment(nodes[i], nodes[i + 1]) for i in range(len(nodes) - 1)
        ]
        cum_nodes = np.concatenate([[0.0 + 0.0j], np.cumsum(seg_vals)])
        table._nodes = nodes
        table._cum_nodes = cum_nodes
        table.cum = np.interp(xs, nodes, cum_nodes.real) + 1j * np.interp(
            xs, nodes, cum_nodes.imag
        )
        return table

    # -- branch sign -----------------------------------------------------

    def _sign_at(self, x: float) -> int:
        k = bisect.bisect_left(self.flips, x)
        return self.sign0 * (1 if k % 2 == 0 else -1)

    def root(self, x: float) -> complex:
        """Tracked R(x) = sign(x) * principal sqrt of g(x)."""
        return self._sign_at(x) * cmath.sqrt(split_squared_x(self.sys, self.p, x))

    def min_abs_split(self) -> float:
        return self._min_abs

    # -- integrals -------------------------------------------------------

    def _gl_segment(self, a: float, b: float) -> complex:
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        # evaluate strictly inside (a, b): GL nodes are interior, so the
        # branch sign is constant on the open segment
        vals = np.array([self.root(mid + half * xi) for xi in _GL_X], dtype=complex)
        return half * complex(np.dot(_GL_W, vals))

    def cumulative_root(self, x: float) -> complex:
        """int_{x_start}^{x} R dx' along the real axis."""
        nodes = self._nodes
        if x <= nodes[0]:
            return 0.0 + 0.0j
        if x >= nodes[-1]:
            return complex(self._cum_nodes[-1])
        i = bisect.bisect_right(nodes, x) - 1
        return complex(self._cum_nodes[i]) + self._gl_segment(nodes[i], x)

    def integral_root(self, a: float, b: float) -> complex:
        return self.cumulative_root(b) - self.cumulative_root(a)

    def integral_delta(self, a: float, b: float) -> complex:
        """int delta dx, closed form (linear chirp plus constant width term)."""
        c = 0.5 * self.p.alpha * self.p.eps0_max * self.sys.mu.real
        return 0.5 * c * (b * b - a * a) + 0.5j * self.sys.gamma * (b - a)
