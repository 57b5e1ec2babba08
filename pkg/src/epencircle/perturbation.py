"""First-order non-adiabatic transition amplitude by real-axis quadrature.

The coupling between the adiabatic states has simple poles at the dynamical
EPs; on the real axis it is smooth for every physical parameter set (a pole
can pinch the axis only in the exactly symmetric zero-chirp, real-dipole case,
which is rejected).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    PulseParams,
    SystemParams,
    cw_exceptional_point,
    frequency_scale,
    pulse_at,
)
from .tracking import BranchTrackingError, PhaseTable

TOL_EP = 1e-12


class PerturbativeSingularity(RuntimeError):
    """The integration contour pinches a dynamical EP; the integral is singular."""


@dataclass(frozen=True)
class FirstOrderResult:
    """First-order amplitude of the coupled adiabatic state after the pulse.

    ``a_plus`` carries the closing phase that maps it onto the final bound
    amplitude in the label-exchange regime, so p_bound_pert = |a_plus|^2 is
    directly comparable with the exact survival probability there.
    ``a_plus_bare`` is the amplitude with phases anchored at the pulse peak
    (the object the residue-sum model expands).
    """

    a_plus: complex
    a_plus_bare: complex
    p_bound_pert: float
    phase_samples: np.ndarray
    error_estimate: float


def nonadiabatic_coupling(sys: SystemParams, p: PulseParams, t: complex) -> complex:
    """Coupling N(t) between the adiabatic states, analytic closed form.

    N = (1/4i) d(W/delta)/dt [1/(i + W/delta) + 1/(i - W/delta)] with
    W the Rabi frequency; the derivative is evaluated analytically.
    """
    f = pulse_at(sys, p, t)
    if f.omega_rabi == 0.0:
        return 0.0 + 0.0j
    r = f.omega_rabi / f.delta
    ddelta = 0.5 * p.alpha * p.eps0_max * sys.mu.real / p.tau
    drabi = -(t / (p.tau * p.tau)) * f.omega_rabi
    drdt = (drabi * f.delta - f.omega_rabi * ddelta) / (f.delta * f.delta)
    s2 = f.delta * f.delta + f.omega_rabi * f.omega_rabi
    w0 = frequency_scale(sys, p)
    if abs(s2) < TOL_EP * w0 * w0:
        raise PerturbativeSingularity(
            f"dynamical EP pole at t/tau = {t / p.tau:.6g}"
        )
    return drdt / (4.0j) * (1.0 / (1.0j + r) + 1.0 / (1.0j - r))


def window_dressing_integral(table: PhaseTable) -> complex:
    """X = int_{x0}^{0} eps_- dx + int_{0}^{x1} eps_+ dx in x = t/tau units.

    exp(i tau X) maps the peak-anchored first-order amplitude onto the final
    bound amplitude when the adiabatic labels exchange across the pulse.
    """
    p = table.p
    x0, x1 = -p.t_span, p.t_span
    int_delta = table.integral_delta(x0, x1)
    return 0.5 * (
        int_delta - table.integral_root(x0, 0.0) + table.integral_root(0.0, x1)
    )


def _check_pinch_static(sys: SystemParams, p: PulseParams) -> None:
    _, eps0_ep = cw_exceptional_point(sys)
    if p.alpha == 0.0 and sys.mu.imag == 0.0 and p.eps0_max > eps0_ep:
        raise PerturbativeSingularity(
            "contour pinches a dynamical EP; perturbative integral singular "
            "(alpha = 0, Im mu = 0, eps0_max > eps0_EP)"
        )


def _check_pinch(sys: SystemParams, p: PulseParams, table: PhaseTable) -> None:
    w0 = frequency_scale(sys, p)
    if table.min_abs_split() ** 2 < TOL_EP * w0 * w0:
        raise PerturbativeSingularity(
            "contour pinches a dynamical EP; perturbative integral singular"
        )


def a_plus_first_order(
    sys: SystemParams,
    p: PulseParams,
    rel_tol: float = 1e-8,
    table: PhaseTable | None = None,
) -> FirstOrderResult:
    """a_plus = -int N(t) exp(i int_0^t (eps_- - eps_+) dt') dt over the window.

    The oscillatory phase is accumulated with the continuity-tracked branch of
    the energy split, anchored at the pulse peak; the result is then dressed
    with the closing adiabatic phase (see FirstOrderResult).
    """
    if p.eps0_max == 0.0:
        return FirstOrderResult(0.0j, 0.0j, 0.0, np.empty((0, 2)), 0.0)
    _check_pinch_static(sys, p)
    if table is None:
        try:
            table = PhaseTable.build(sys, p)
        except BranchTrackingError as exc:
            raise PerturbativeSingularity(
                "contour pinches a dynamical EP; perturbative integral singular"
            ) from exc
    _check_pinch(sys, p, table)

    tau = p.tau
    cum0 = table.cumulative_root(0.0)
    cum_cache: dict[float, complex] = {}

    def phase(x: float) -> complex:
        # S0(x) = int_0^{x tau} (eps_- - eps_+) dt = -tau (cum(x) - cum(0))
        c = cum_cache.get(x)
        if c is None:
            c = table.cumulative_root(x)
            cum_cache[x] = c
        return -tau * (c - cum0)

    def integrand(x: float) -> complex:
        n = nonadiabatic_coupling(sys, p, x * tau)
        return -tau * n * cmath.exp(1j * phase(x))

    x0, x1 = -p.t_span, p.t_span
    n_panels = 256
    prev = None
    err = math.inf
    val = 0.0j
    while True:
        xs = np.linspace(x0, x1, n_panels + 1)
        vals = np.array([integrand(x) for x in xs], dtype=complex)
        h = (x1 - x0) / n_panels
        val = h / 3.0 * (
            vals[0] + vals[-1] + 4.0 * np.sum(vals[1:-1:2]) + 2.0 * np.sum(vals[2:-1:2])
        )
        if prev is not None:
            err = abs(val - prev)
            if err <= rel_tol * max(abs(val), 1e-300) or n_panels >= 1 << 16:
                break
        prev = val
        n_panels *= 2

    dressing = cmath.exp(1j * tau * window_dressing_integral(table))
    a_bare = complex(val)
    a_dressed = dressing * a_bare
    samples = np.column_stack([xs, [phase(x) for x in xs]])
    return FirstOrderResult(
        a_plus=a_dressed,
        a_plus_bare=a_bare,
        p_bound_pert=abs(a_dressed) ** 2,
        phase_samples=samples,
        error_estimate=float(err),
    )
