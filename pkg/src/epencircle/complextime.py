"""Complex-time analysis: dynamical EPs, residue exponents, separatrix.

All positions are in units of x = t / tau.  The dynamical EPs are the zeros
of g(x) = delta^2(x) + rabi^2(x); the exponent sigma_k attached to a root
controls the pulse-area dependence of the first-order amplitude through
a_plus ~ -sum_k a_k exp(-phi sigma_k / sqrt(2 pi)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .model import (
    SQRT_2PI,
    PulseParams,
    SystemParams,
    cw_exceptional_point,
    frequency_scale,
    pulse_at,
)
from .tracking import (
    PhaseTable,
    integrate_tracked_root,
    split_squared_x,
    split_squared_x_prime,
)


class RootSearchError(RuntimeError):
    """Newton iteration failed to resolve a sign-change cell."""


class PathBlockedError(RuntimeError):
    """No admissible quadrature path clears the neighbouring roots."""


class DegenerateModelError(RuntimeError):
    """The residue-sum design matrix is ill conditioned (near coalescence)."""


@dataclass(frozen=True)
class SearchRegion:
    re_min: float = -4.0
    re_max: float = 4.0
    im_min: float = -3.0
    im_max: float = 3.0


@dataclass(frozen=True)
class DynamicalEP:
    """A zero of delta^2 + rabi^2 in complex x = t/tau."""

    t_k: complex
    residual: float
    sigma_k: complex | None = None
    a_k: complex | None = None
    pair_id: int | None = None


@dataclass(frozen=True)
class SeparatrixPoint:
    alpha: float
    eps0_crit_ratio: float
    s_star: float
    n_bisections: int
    bracket: tuple[float, float]


@dataclass(frozen=True)
class ResidueFit:
    """Least-squares amplitudes for the residue-sum model."""

    eps: list
    a_k: np.ndarray
    residual_norm: float
    rel_residual: float
    condition: float
    oscillation_period: float | None


def _g_grid(sys: SystemParams, p: PulseParams, z: np.ndarray) -> np.ndarray:
    c = 0.5 * p.alpha * p.eps0_max * sys.mu.real
    delta = c * z + 0.5j * sys.gamma
    rabi = sys.mu * p.eps0_max * np.exp(-0.5 * z * z)
    return delta * delta + rabi * rabi


def _g_prime_grid(sys: SystemParams, p: PulseParams, z: np.ndarray) -> np.ndarray:
    c = 0.5 * p.alpha * p.eps0_max * sys.mu.real
    delta = c * z + 0.5j * sys.gamma
    rabi = sys.mu * p.eps0_max * np.exp(-0.5 * z * z)
    return 2.0 * (delta * c - z * rabi * rabi)


def _polish_double(sys: SystemParams, p: PulseParams, z: complex) -> complex:
    """Newton on g' (a double root of g is a simple zero of g')."""
    c = 0.5 * p.alpha * p.eps0_max * sys.mu.real
    for _ in range(60):
        rabi = sys.mu * p.eps0_max * cmath.exp(-0.5 * z * z)
        delta = c * z + 0.5j * sys.gamma
        gp = 2.0 * (delta * c - z * rabi * rabi)
        gpp = 2.0 * (c * c + (2.0 * z * z - 1.0) * rabi * rabi)
        if abs(gpp) < 1e-30:
            break
        step = gp / gpp
        z = z - step
        if abs(step) < 1e-14 * (1.0 + abs(z)):
            break
    return complex(z)


def _newton_from_seeds(
    sys: SystemParams,
    p: PulseParams,
    seeds: np.ndarray,
    w0_sq: float,
    tol_residual: float,
    max_iter: int = 80,
) -> np.ndarray:
    z = seeds.astype(complex).copy()
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        for _ in range(max_iter):
            f = _g_grid(sys, p, z)
            fp = _g_prime_grid(sys, p, z)
            bad = np.abs(fp) < 1e-30
            fp = np.where(bad, 1.0, fp)
            step = f / fp
            mag = np.abs(step)
            step = np.where(mag > 1.0, step / np.where(mag > 0.0, mag, 1.0), step)
            z = z - np.where(bad, 0.0, step)
            if np.all((np.abs(f) < tol_residual * w0_sq) | np.isnan(z.real)):
                break
        f = _g_grid(sys, p, z)
        ok = np.abs(f) < tol_residual * w0_sq
    return z[ok & np.isfinite(z)]


def find_dynamical_eps(
    sys: SystemParams,
    p: PulseParams,
    region: SearchRegion | None = None,
    grid: tuple[int, int] = (80, 60),
    tol_residual: float = 1e-12,
    dedup: float = 1e-8,
) -> list[DynamicalEP]:
    """All simple zeros of delta^2 + rabi^2 inside the search rectangle.

    Newton iteration with the analytic derivative, seeded from a uniform grid
    that is refined until the root count is stable on two successive
    refinements.  Roots are sorted by |Im x| ascending (nearest to the real
    axis first), then by Re x.
    """
    region = region or SearchRegion()
    w0 = frequency_scale(sys, p)
    w0_sq = w0 * w0

    def search(nx: int, ny: int) -> list[complex]:
        xs = np.linspace(region.re_min, region.re_max, nx)
        ys = np.linspace(region.im_min, region.im_max, ny)
        seeds = (xs[None, :] + 1j * ys[:, None]).ravel()
        z = _newton_from_seeds(sys, p, seeds, w0_sq, tol_residual)
        margin = 1e-6
        keep = (
            (z.real >= region.re_min - margin)
            & (z.real <= region.re_max + margin)
            & (z.imag >= region.im_min - margin)
            & (z.imag <= region.im_max + margin)
        )
        z = z[keep]
        roots: list[complex] = []
        for zi in sorted(z, key=lambda w: (round(w.real, 6), round(w.imag, 6))):
            if all(abs(zi - r) > dedup for r in roots):
                roots.append(complex(zi))
        # near a double root the residual tolerance admits a disk of points of
        # radius ~sqrt(tol); merge clusters whose derivative is tiny there and
        # polish the representative on g' (simple zero at the coalescence)
        merged: list[complex] = []
        for zi in roots:
            fp = abs(_g_prime_grid(sys, p, np.array([zi]))[0]) / w0_sq
            if fp <= 1e-3:
                zi = _polish_double(sys, p, zi)
                radius = 10.0 * math.sqrt(tol_residual)
            else:
                radius = dedup
            if all(abs(zi - r) > radius for r in merged):
                merged.append(zi)
        return merged

    nx, ny = grid
    roots = search(nx, ny)
    for _ in range(4):
        finer = search(2 * nx, 2 * ny)
        if len(finer) == len(roots):
            roots = finer
            break
        roots, (nx, ny) = finer, (2 * nx, 2 * ny)

    eps: list[DynamicalEP] = []
    for z in roots:
        res = abs(split_squared_x(sys, p, z)) / w0_sq
        fp = abs(split_squared_x_prime(sys, p, z)) / w0_sq
        if fp <= 1e-6:
            # double root (coalescence): keep it, flagged by a None pair later
            pass
        eps.append(DynamicalEP(t_k=z, residual=res))
    eps.sort(key=lambda e: (abs(e.t_k.imag), e.t_k.real, e.t_k.imag))
    return _assign_pairs(eps, dedup=1e-6)


def _assign_pairs(eps: list[DynamicalEP], dedup: float) -> list[DynamicalEP]:
    """Link roots related by x -> -conj(x) (the time-symmetry partners)."""
    out = list(eps)
    used: set[int] = set()
    pair_id = 0
    for i, e in enumerate(out):
        if i in used:
            continue
        target = -e.t_k.conjugate()
        for j in range(i + 1, len(out)):
            if j in used:
                continue
            if abs(out[j].t_k - target) < max(dedup, 1e-4 * abs(e.t_k) + 1e-8):
                out[i] = replace(out[i], pair_id=pair_id)
                out[j] = replace(out[j], pair_id=pair_id)
                used.update((i, j))
                pair_id += 1
                break
    return out


def _segment_clearance(z0: complex, z1: complex, pts: list) -> float:
    """Minimum distance from pts to the segment z0 -> z1."""
    if not pts:
        return math.inf
    d = z1 - z0
    L2 = abs(d) ** 2
    best = math.inf
    for w in pts:
        if L2 == 0.0:
            best = min(best, abs(w - z0))
            continue
        s = ((w - z0) * d.conjugate()).real / L2
        s = min(1.0, max(0.0, s))
        best = min(best, abs(w - (z0 + s * d)))
    return best


def sigma_k(
    sys: SystemParams,
    p: PulseParams,
    ep: DynamicalEP,
    table: PhaseTable | None = None,
    other_roots: list | None = None,
    clearance: float = 1e-2,
    rel_tol: float = 1e-10,
) -> complex:
    """Residue exponent of a dynamical EP (dimensionless, area-independent).

    sigma_k = (i / (eps0_max |Re mu|)) * [int_0^{x_k} R dx - X], where R is
    the branch-tracked square root of delta^2 + rabi^2, the path runs from
    the pulse peak along the real axis and then straight to the root, and X
    is the window closing integral that maps the peak-anchored amplitude onto
    the final bound amplitude (see perturbation.window_dressing_integral).
    exp(-phi sigma_k / sqrt(2 pi)) then multiplies the pole's contribution to
    the survival amplitude, independent of tau and of the pulse area.
    """
    from .perturbation import window_dressing_integral

    if table is None:
        table = PhaseTable.build(sys, p)
    if other_roots is None:
        other_roots = [
            e.t_k for e in find_dynamical_eps(sys, p) if abs(e.t_k - ep.t_k) > 1e-7
        ]
    else:
        other_roots = [w for w in other_roots if abs(w - ep.t_k) > 1e-7]

    def fg(z: complex) -> complex:
        return split_squared_x(sys, p, z)

    corner = complex(ep.t_k.real, 0.0)
    candidates = [corner]
    for off in (0.03, -0.03, 0.06, -0.06):
        candidates.append(corner + off)
    path = None
    for c in candidates:
        seg1_ok = _segment_clearance(complex(0.0), c, other_roots) > clearance
        seg2_ok = _segment_clearance(c, ep.t_k, other_roots) > clearance
        if seg1_ok and seg2_ok:
            path = c
            break
    if path is None:
        near = sorted(other_roots, key=lambda w: abs(w - ep.t_k))[:2]
        raise PathBlockedError(
            f"quadrature path to {ep.t_k:.6g} blocked by nearby roots {near}"
        )

    # real-axis leg via the phase table (same tracked branch as the
    # perturbative quadrature), then straight legs with local continuity
    integral = table.integral_root(0.0, path.real)
    r_here = table.root(path.real)
    z_here = complex(path.real, 0.0)
    for z_next in ([path, ep.t_k] if path != z_here else [ep.t_k]):
        leg, r_here = integrate_tracked_root(fg, z_here, z_next, r_here, rel_tol=rel_tol)
        integral += leg
        z_here = z_next

    x_dress = window_dressing_integral(table)
    scale = p.eps0_max * abs(sys.mu.real)
    return 1j * (integral - x_dress) / scale


def attach_sigmas(
    sys: SystemParams,
    p: PulseParams,
    eps: list[DynamicalEP],
    k: int = 2,
    table: PhaseTable | None = None,
) -> list[DynamicalEP]:
    """Return the k nearest-to-real-axis roots with sigma_k filled in."""
    if table is None:
        table = PhaseTable.build(sys, p)
    roots = [e.t_k for e in eps]
    out = []
    for e in eps[:k]:
        sig = sigma_k(sys, p, e, table=table, other_roots=roots)
        out.append(replace(e, sigma_k=sig))
    return out


def residue_model_fit(
    sys: SystemParams,
    p_shape: PulseParams,
    phi_samples,
    k: int = 2,
    a_plus_values=None,
    cond_limit: float = 1e12,
) -> ResidueFit:
    """Fit the pole amplitudes a_k in a_plus(phi) = -sum_k a_k e^{-phi sigma_k / sqrt(2 pi)}.

    ``p_shape`` fixes the contour shape (eps0_max, alpha); tau is rescaled per
    phi sample.  ``a_plus_values`` may carry precomputed dressed first-order
    amplitudes for the phi samples; otherwise they are computed here.
    """
    from .model import with_area
    from .perturbation import a_plus_first_order

    phi_samples = list(phi_samples)
    if len(phi_samples) < 2 * k:
        raise ValueError(f"need at least {2 * k} phi samples for K={k}")

    eps_all = find_dynamical_eps(sys, p_shape)
    if len(eps_all) < k:
        raise DegenerateModelError(f"only {len(eps_all)} usable roots, need {k}")
    eps_k = attach_sigmas(sys, p_shape, eps_all, k=k)
    sigmas = np.array([e.sigma_k for e in eps_k], dtype=complex)
    if k >= 2:
        for i in range(k):
            for j in range(i + 1, k):
                if abs(sigmas[i] - sigmas[j]) < 1e-6 * max(abs(sigmas[i]), 1.0):
                    raise DegenerateModelError("near coalescence; model degenerate")

    if a_plus_values is None:
        a_plus_values = []
        for phi in phi_samples:
            p_phi = with_area(sys, p_shape, phi)
            a_plus_values.append(a_plus_first_order(sys, p_phi).a_plus)
    b = np.asarray(a_plus_values, dtype=complex)

    design = -np.exp(
        -np.outer(np.asarray(phi_samples, float), sigmas) / SQRT_2PI
    )
    cond = float(np.linalg.cond(design))
    if cond > cond_limit:
        raise DegenerateModelError(f"near coalescence; model degenerate (cond={cond:.3g})")
    a_k, *_ = np.linalg.lstsq(design, b, rcond=None)
    resid = design @ a_k - b
    rnorm = float(np.linalg.norm(resid))
    rel = rnorm / max(float(np.linalg.norm(b)), 1e-300)

    period = None
    lead = eps_k[0]
    if k >= 2 and abs(lead.t_k.real) > 1e-6:
        dim = abs((sigmas[0] - sigmas[1]).imag)
        if dim > 0.0:
            # node-to-node spacing of |a_plus|^2 in phi for the beating pair
            period = 2.0 * math.pi * SQRT_2PI / dim
    eps_out = [replace(e, a_k=complex(a)) for e, a in zip(eps_k, a_k)]
    return ResidueFit(
        eps=eps_out,
        a_k=a_k,
        residual_norm=rnorm,
        rel_residual=rel,
        condition=cond,
        oscillation_period=period,
    )


# -- separatrix ---------------------------------------------------------------


def _nearest_pair(
    sys: SystemParams, p: PulseParams, region: SearchRegion
) -> tuple[DynamicalEP, DynamicalEP]:
    eps = find_dynamical_eps(sys, p, region=region)
    if len(eps) < 2:
        raise RootSearchError(
            f"fewer than two roots at eps0_max={p.eps0_max:g}, alpha={p.alpha:g}"
        )
    return eps[0], eps[1]


def _pair_indicator(sys: SystemParams, p: PulseParams, region: SearchRegion) -> float:
    """Positive when the nearest pair straddles the imaginary axis, negative
    when it is stacked along it."""
    e1, e2 = _nearest_pair(sys, p, region)
    d = e1.t_k - e2.t_k
    return abs(d.real) - abs(d.imag)


def find_separatrix(
    sys: SystemParams,
    alpha_list,
    phi: float | None = None,
    bracket: tuple[float, float] | None = None,
    rel_tol: float = 1e-4,
    region: SearchRegion | None = None,
) -> list[SeparatrixPoint]:
    """Critical peak-strength ratio eps0_crit / eps0_EP for each chirp.

    At the critical strength the two dynamical EPs nearest the real axis
    coalesce; the indicator is the orientation of the nearest-pair splitting
    (across vs along the imaginary axis), bisected in the ratio.  ``phi`` is
    accepted for interface symmetry but the root geometry is area-independent.
    """
    del phi
    _, eps0_ep = cw_exceptional_point(sys)
    region = region or SearchRegion()
    out: list[SeparatrixPoint] = []
    for alpha in alpha_list:
        def make(ratio: float) -> PulseParams:
            return PulseParams(eps0_max=ratio * eps0_ep, tau=1.0, alpha=alpha)

        def ind(ratio: float) -> float:
            return _pair_indicator(sys, make(ratio), region)

        if bracket is not None:
            lo, hi = bracket
            f_lo, f_hi = ind(lo), ind(hi)
            if f_lo >= 0.0 or f_hi <= 0.0:
                raise RootSearchError(
                    f"no coalescence in range [{lo}, {hi}] at alpha={alpha:g}"
                )
        else:
            lo, hi = _auto_bracket(ind, alpha)
        n = 0
        while hi - lo > rel_tol * hi:
            mid = 0.5 * (lo + hi)
            if ind(mid) < 0.0:
                lo = mid
            else:
                hi = mid
            n += 1
            if n > 200:
                break
        crit = 0.5 * (lo + hi)
        e1, e2 = _nearest_pair(sys, make(crit), region)
        s_star = 0.5 * (e1.t_k.imag + e2.t_k.imag)
        out.append(
            SeparatrixPoint(
                alpha=float(alpha),
                eps0_crit_ratio=float(crit),
                s_star=float(s_star),
                n_bisections=n,
                bracket=(lo, hi),
            )
        )
    return out


def _auto_bracket(ind, alpha: float) -> tuple[float, float]:
    """Expand geometrically from ratio ~1 until the indicator changes sign."""
    lo = None
    hi = None
    for r in (0.9, 0.97, 0.8, 0.6, 0.4):
        try:
            if ind(r) < 0.0:
                lo = r
                break
        except RootSearchError:
            continue
    for r in (1.05, 1.2, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0):
        try:
            if ind(r) > 0.0:
                hi = r
                break
        except RootSearchError:
            continue
    if lo is None or hi is None:
        raise RootSearchError(f"no coalescence in range at alpha={alpha:g}")
    return lo, hi
