"""Two-level non-Hermitian model: pulse contour, Hamiltonian, adiabatic energies.

Atomic units throughout (hbar = 1).  A bound state at energy 0 is coupled to a
decaying resonance; the laser is a Gaussian envelope with a linear chirp.  The
detuning carries the resonance half-width on its imaginary part,

    delta(t) = omega(t) - omega_r + i*gamma/2,
    omega(t) = omega_r + (alpha*t / 2 tau) * eps0_max * Re(mu),
    rabi(t)  = mu * eps0_max * exp(-(t/tau)^2 / 2),

all of which are entire functions of t, so evaluation at complex t is the
analytic continuation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

SQRT_2PI = math.sqrt(2.0 * math.pi)

#: default threshold on the normalized |delta^2 + rabi^2| below which a point
#: counts as sitting on a dynamical exceptional point
TOL_EP = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """Field-free two-level system: resonance frequency, width and dipole."""

    omega_r: float
    gamma: float
    mu: complex

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.mu.real == 0.0:
            raise ValueError("Re(mu) = 0: exceptional point at infinite field")


@dataclass(frozen=True)
class PulseParams:
    """Gaussian linearly chirped pulse: peak strength, duration, chirp."""

    eps0_max: float
    tau: float
    alpha: float
    t_span: float = 6.0

    def __post_init__(self):
        if self.eps0_max < 0.0:
            raise ValueError(f"eps0_max must be >= 0, got {self.eps0_max}")
        if self.tau <= 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.t_span < 4.0:
            raise ValueError(f"t_span must be >= 4, got {self.t_span}")

    def area(self, sys: SystemParams) -> float:
        """Temporal pulse area phi = eps0_max * tau * |Re mu| * sqrt(2 pi)."""
        return self.eps0_max * self.tau * abs(sys.mu.real) * SQRT_2PI


@dataclass(frozen=True)
class StateVector:
    """Diabatic amplitudes (bound, resonance) in the rotating frame."""

    c_bound: complex
    c_res: complex
    t: float


@dataclass(frozen=True)
class ComplexFrequencyPair:
    """Instantaneous detuning and Rabi frequency of the driven pair."""

    delta: complex
    omega_rabi: complex


@dataclass(frozen=True)
class AdiabaticSplit:
    """Instantaneous adiabatic energies; near_ep flags a (near-)degeneracy."""

    eps_minus: complex
    eps_plus: complex
    split: complex
    near_ep: bool


def helium_preset() -> SystemParams:
    """He* 1s2p -> He** 2p^2 autoionizing transition (values in a.u.)."""
    return SystemParams(
        omega_r=1.502242,  # -0.621581 - (-2.123823)
        gamma=0.000215,
        mu=-0.192572 + 0.000347j,
    )


def pulse_at(sys: SystemParams, p: PulseParams, t: complex) -> ComplexFrequencyPair:
    """Detuning and Rabi frequency of the chirped Gaussian pulse at (complex) t."""
    x = t / p.tau
    chirp = 0.5 * p.alpha * x * p.eps0_max * sys.mu.real
    delta = chirp + 0.5j * sys.gamma
    omega_rabi = sys.mu * p.eps0_max * cmath.exp(-0.5 * x * x)
    return ComplexFrequencyPair(delta=delta, omega_rabi=omega_rabi)


def hamiltonian(sys: SystemParams, p: PulseParams, t: complex) -> np.ndarray:
    """2x2 complex-symmetric interaction Hamiltonian [[0, W/2], [W/2, delta]]."""
    f = pulse_at(sys, p, t)
    half = 0.5 * f.omega_rabi
    return np.array([[0.0, half], [half, f.delta]], dtype=complex)


def frequency_scale(sys: SystemParams, p: PulseParams) -> float:
    """Characteristic frequency used to nondimensionalize split residuals."""
    return max(abs(sys.mu) * p.eps0_max, 0.5 * sys.gamma, 1e-300)


def split_squared(sys: SystemParams, p: PulseParams, t: complex) -> complex:
    """delta^2 + rabi^2 at (complex) t; zeros are the dynamical EPs."""
    f = pulse_at(sys, p, t)
    return f.delta * f.delta + f.omega_rabi * f.omega_rabi


def adiabatic_split(
    sys: SystemParams, p: PulseParams, t: complex, tol_ep: float = TOL_EP
) -> AdiabaticSplit:
    """Adiabatic energies eps_pm = (delta +- sqrt(delta^2 + rabi^2)) / 2.

    Standalone calls use the principal square-root branch; callers that follow
    a path must impose continuity themselves (see the branch tracking helpers
    in the complextime module).
    """
    f = pulse_at(sys, p, t)
    s2 = f.delta * f.delta + f.omega_rabi * f.omega_rabi
    root = cmath.sqrt(s2)
    w0 = frequency_scale(sys, p)
    near_ep = abs(s2) < tol_ep * w0 * w0
    return AdiabaticSplit(
        eps_minus=0.5 * (f.delta - root),
        eps_plus=0.5 * (f.delta + root),
        split=-root,
        near_ep=near_ep,
    )


def cw_exceptional_point(sys: SystemParams) -> tuple[float, float]:
    """cw exceptional point (omega_EP, eps0_EP) in the frequency-strength plane."""
    re_mu = sys.mu.real
    if re_mu == 0.0:
        raise ValueError("Re(mu) = 0: exceptional point at infinite field")
    omega_ep = sys.omega_r - 0.5 * sys.gamma * sys.mu.imag / re_mu
    eps0_ep = 0.5 * sys.gamma / abs(re_mu)
    return omega_ep, eps0_ep


def tau_for_area(sys: SystemParams, eps0_max: float, phi: float) -> float:
    """Pulse duration that realizes area phi at the given peak strength."""
    if eps0_max <= 0.0:
        raise ValueError("eps0_max must be > 0 to fix the pulse area")
    return phi / (eps0_max * abs(sys.mu.real) * SQRT_2PI)


# -- config files -------------------------------------------------------------

_SYSTEM_KEYS = ("mu_re", "mu_im", "gamma", "omega_r")
_PULSE_KEYS = ("eps0_max", "tau", "alpha", "t_span", "phi")


def parse_config(text: str) -> dict[str, float]:
    """Parse key=value lines; '#' starts a comment; unknown keys are errors."""
    known = set(_SYSTEM_KEYS) | set(_PULSE_KEYS)
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {val.strip()!r}") from exc
    return values


def params_from_config(
    text: str, defaults: SystemParams | None = None
) -> tuple[SystemParams, PulseParams | None]:
    """Build parameter sets from config text.

    System keys fall back to ``defaults`` (helium if None).  A PulseParams is
    returned only when the pulse is fully determined; ``phi`` may replace
    ``tau`` (and must agree with it when both are given).
    """
    values = parse_config(text)
    base = defaults if defaults is not None else helium_preset()
    sys = SystemParams(
        omega_r=values.get("omega_r", base.omega_r),
        gamma=values.get("gamma", base.gamma),
        mu=complex(values.get("mu_re", base.mu.real), values.get("mu_im", base.mu.imag)),
    )
    has_pulse = any(k in values for k in ("eps0_max", "tau", "phi", "alpha"))
    if not has_pulse:
        return sys, None
    if "eps0_max" not in values:
        raise ValueError("pulse parameters given without eps0_max")
    eps0_max = values["eps0_max"]
    tau = values.get("tau")
    if "phi" in values:
        tau_phi = tau_for_area(sys, eps0_max, values["phi"])
        if tau is not None and abs(tau - tau_phi) > 1e-9 * tau_phi:
            raise ValueError(f"tau={tau} inconsistent with phi={values['phi']}")
        tau = tau_phi
    if tau is None:
        raise ValueError("pulse parameters need tau or phi")
    pulse = PulseParams(
        eps0_max=eps0_max,
        tau=tau,
        alpha=values.get("alpha", 0.0),
        t_span=values.get("t_span", 6.0),
    )
    return sys, pulse


def load_config(path) -> tuple[SystemParams, PulseParams | None]:
    """Read a key=value config file; see ``params_from_config``."""
    with open(path, encoding="utf-8") as fh:
        return params_from_config(fh.read())


def with_area(sys: SystemParams, p: PulseParams, phi: float) -> PulseParams:
    """Rescale tau so the pulse area equals phi (peak strength unchanged)."""
    return replace(p, tau=tau_for_area(sys, p.eps0_max, phi))
