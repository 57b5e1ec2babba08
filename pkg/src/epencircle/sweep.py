"""Fixed-area parameter sweeps, contour export, and deterministic file output.

A sweep evaluates the survival probability on a grid over
(eps0_max / eps0_EP, alpha) holding the pulse area phi fixed, which means the
duration tau is derived per grid point.  Output ordering is row-major
(eps_ratio outer, alpha inner) and independent of the worker count.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .complextime import PathBlockedError
from .model import (
    PulseParams,
    SystemParams,
    cw_exceptional_point,
    helium_preset,
    pulse_at,
    tau_for_area,
)
from .perturbation import PerturbativeSingularity, a_plus_first_order
from .propagator import ConvergenceError, survival_probability

STATUS_OK = "ok"
STATUS_SOLVER = "solver-failed"
STATUS_PERT = "pert-singular"


@dataclass(frozen=True)
class SweepSpec:
    """Grid specification: ranges are (min, max, n) with n >= 2."""

    eps_ratio_range: tuple[float, float, int]
    alpha_range: tuple[float, float, int]
    phi: float
    mode: str = "exact"
    t_span: float = 6.0

    def __post_init__(self):
        if self.phi <= 0.0:
            raise ValueError(f"phi must be > 0, got {self.phi}")
        if self.mode not in ("exact", "perturbative", "both"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for name, rng in (("eps_ratio", self.eps_ratio_range), ("alpha", self.alpha_range)):
            lo, hi, n = rng
            if n < 2:
                raise ValueError(f"{name} axis needs n >= 2, got {n}")
            if hi < lo:
                raise ValueError(f"{name} range inverted: [{lo}, {hi}]")

    def eps_ratios(self) -> np.ndarray:
        lo, hi, n = self.eps_ratio_range
        return np.linspace(lo, hi, int(n))

    def alphas(self) -> np.ndarray:
        lo, hi, n = self.alpha_range
        return np.linspace(lo, hi, int(n))


@dataclass(frozen=True)
class SweepRow:
    eps_ratio: float
    alpha: float
    tau: float
    p_bound_exact: float | None
    p_bound_pert: float | None
    status: str


@dataclass
class SweepResult:
    rows: list[SweepRow]
    metadata: dict = field(default_factory=dict)


def _sweep_point(sys: SystemParams, spec: SweepSpec, eps_ratio: float,
                 alpha: float, eps0_ep: float) -> SweepRow:
    if eps_ratio == 0.0:
        # no field: the bound state is untouched; tau is undefined at fixed phi
        return SweepRow(eps_ratio, alpha, math.nan,
                        1.0 if spec.mode != "perturbative" else None,
                        0.0 if spec.mode != "exact" else None, STATUS_OK)
    eps0 = eps_ratio * eps0_ep
    tau = tau_for_area(sys, eps0, spec.phi)
    p = PulseParams(eps0_max=eps0, tau=tau, alpha=alpha, t_span=spec.t_span)
    p_exact = None
    p_pert = None
    status = STATUS_OK
    if spec.mode in ("exact", "both"):
        try:
            p_exact = survival_probability(sys, p)
        except ConvergenceError:
            status = STATUS_SOLVER
    if status == STATUS_OK and spec.mode in ("perturbative", "both"):
        try:
            p_pert = a_plus_first_order(sys, p).p_bound_pert
        except (PerturbativeSingularity, PathBlockedError):
            status = STATUS_PERT
    return SweepRow(eps_ratio, alpha, tau, p_exact, p_pert, status)


def run_sweep(spec: SweepSpec, sys: SystemParams | None = None,
              threads: int = 1) -> SweepResult:
    """Evaluate the grid; failed points carry a status, never silent numbers."""
    sys = sys if sys is not None else helium_preset()
    _, eps0_ep = cw_exceptional_point(sys)
    points = [(r, a) for r in spec.eps_ratios() for a in spec.alphas()]
    t0 = time.monotonic()
    if threads <= 1:
        rows = [_sweep_point(sys, spec, r, a, eps0_ep) for r, a in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(
                lambda q: _sweep_point(sys, spec, q[0], q[1], eps0_ep), points
            ))
    meta = {
        "spec": asdict(spec),
        "system": {"omega_r": sys.omega_r, "gamma": sys.gamma,
                   "mu_re": sys.mu.real, "mu_im": sys.mu.imag},
        "eps0_ep": eps0_ep,
        "wall_time_s": time.monotonic() - t0,
        "threads": threads,
    }
    return SweepResult(rows=rows, metadata=meta)


@dataclass(frozen=True)
class ContourSample:
    t_over_tau: float
    omega: float
    eps0: float


def emit_contour(sys: SystemParams, p: PulseParams, n_samples: int = 256):
    """Sample the pulse contour [omega(t), eps0(t)]; metadata carries the cw EP.

    The contour lives in the laser frequency-strength plane; the plot layer
    marks whether it encircles the cw exceptional point.
    """
    omega_ep, eps0_ep = cw_exceptional_point(sys)
    xs = np.linspace(-p.t_span, p.t_span, n_samples)
    samples = []
    for x in xs:
        f = pulse_at(sys, p, x * p.tau)
        omega = sys.omega_r + (f.delta - 0.5j * sys.gamma).real
        eps0 = p.eps0_max * math.exp(-0.5 * x * x)
        samples.append(ContourSample(float(x), float(omega), float(eps0)))
    meta = {"omega_ep": omega_ep, "eps0_ep": eps0_ep,
            "eps0_max": p.eps0_max, "alpha": p.alpha, "tau": p.tau}
    return samples, meta


def split_field(sys: SystemParams, p: PulseParams, region=None,
                grid: tuple[int, int] = (121, 91)):
    """|energy split| sampled on a rectangle in complex x = t/tau.

    Returns (re_axis, im_axis, field) with field[i, j] = |split| at
    re_axis[i] + 1j * im_axis[j]; the plot layer renders the log-magnitude
    surface with the dynamical EPs as its zeros.
    """
    from .complextime import SearchRegion
    from .tracking import split_squared_x

    region = region or SearchRegion()
    nx, ny = grid
    xs = np.linspace(region.re_min, region.re_max, nx)
    ys = np.linspace(region.im_min, region.im_max, ny)
    field = np.empty((nx, ny))
    for i, re in enumerate(xs):
        for j, im in enumerate(ys):
            field[i, j] = abs(split_squared_x(sys, p, complex(re, im))) ** 0.5
    return xs, ys, field


def count_nodes(values, rel_prominence: float = 1e-3) -> int:
    """Number of interior local minima of a sampled curve.

    A minimum counts only if the curve rises by at least ``rel_prominence``
    (relative to the dynamic range) on both sides, filtering solver jitter.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return 0
    vmax, vmin = float(np.max(v)), float(np.min(v))
    tol = rel_prominence * max(vmax - vmin, 1e-300)
    n = 0
    i = 1
    while i < v.size - 1:
        if v[i] <= v[i - 1] and v[i] < v[i + 1]:
            # walk the plateau/valley and check prominence on both sides
            left = np.max(v[: i + 1])
            j = i
            while j < v.size - 1 and v[j + 1] <= v[i]:
                j += 1
            right = np.max(v[j:])
            depth = min(left, right) - v[i]
            if depth > tol:
                n += 1
            i = j + 1
        else:
            i += 1
    return n


# -- serialization ------------------------------------------------------------

_SWEEP_COLUMNS = ("eps_ratio", "alpha", "tau", "p_bound_exact", "p_bound_pert",
                  "status")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return "%.17g" % x


def sweep_rows_csv(result: SweepResult) -> str:
    lines = [",".join(_SWEEP_COLUMNS)]
    for r in result.rows:
        lines.append(",".join(_fmt(getattr(r, c)) for c in _SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"


def sweep_to_json(result: SweepResult) -> str:
    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None
        return x

    payload = {
        "metadata": result.metadata,
        "rows": [{c: clean(getattr(r, c)) for c in _SWEEP_COLUMNS}
                 for r in result.rows],
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def contour_csv(samples, meta) -> str:
    lines = ["# " + json.dumps(meta, sort_keys=True),
             "t_over_tau,omega,eps0"]
    for s in samples:
        lines.append(",".join(_fmt(v) for v in (s.t_over_tau, s.omega, s.eps0)))
    return "\n".join(lines) + "\n"


def contour_to_json(samples, meta) -> str:
    payload = {"metadata": meta,
               "rows": [asdict(s) for s in samples]}
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def separatrix_csv(points) -> str:
    lines = ["alpha,eps0_crit_ratio,s_star"]
    for q in points:
        lines.append(",".join(_fmt(v) for v in
                              (q.alpha, q.eps0_crit_ratio, q.s_star)))
    return "\n".join(lines) + "\n"


def separatrix_to_json(points) -> str:
    payload = {"rows": [{"alpha": q.alpha,
                         "eps0_crit_ratio": q.eps0_crit_ratio,
                         "s_star": q.s_star,
                         "n_bisections": q.n_bisections}
                        for q in points]}
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def dyn_eps_records(eps) -> list[dict]:
    recs = []
    for e in eps:
        recs.append({
            "re_t_over_tau": e.t_k.real,
            "im_t_over_tau": e.t_k.imag,
            "residual": e.residual,
            "re_sigma": None if e.sigma_k is None else e.sigma_k.real,
            "im_sigma": None if e.sigma_k is None else e.sigma_k.imag,
            "re_a": None if e.a_k is None else e.a_k.real,
            "im_a": None if e.a_k is None else e.a_k.imag,
            "pair_id": e.pair_id,
        })
    return recs


def dyn_eps_csv(eps) -> str:
    cols = ("re_t_over_tau", "im_t_over_tau", "residual", "re_sigma",
            "im_sigma", "re_a", "im_a", "pair_id")
    lines = [",".join(cols)]
    for rec in dyn_eps_records(eps):
        lines.append(",".join(_fmt(rec[c]) for c in cols))
    return "\n".join(lines) + "\n"


def dyn_eps_to_json(eps) -> str:
    return json.dumps({"rows": dyn_eps_records(eps)},
                      indent=1, sort_keys=True) + "\n"


def field_csv(xs, ys, field, meta) -> str:
    lines = ["# " + json.dumps(meta, sort_keys=True),
             "re_t_over_tau,im_t_over_tau,abs_split"]
    for i, re in enumerate(xs):
        for j, im in enumerate(ys):
            lines.append(",".join(_fmt(v) for v in (re, im, field[i, j])))
    return "\n".join(lines) + "\n"


def field_to_json(xs, ys, field, meta) -> str:
    payload = {"metadata": meta,
               "re_axis": list(map(float, xs)),
               "im_axis": list(map(float, ys)),
               "abs_split": [[float(v) for v in row] for row in field]}
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
