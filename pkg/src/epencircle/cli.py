"""Command-line interface: every operation behind one tool with file outputs.

Exit codes: 0 success, 2 input/usage error, 3 numerical failure.  All file
outputs are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys as _sys

import numpy as np

from . import complextime as ct
from .model import (
    PulseParams,
    SystemParams,
    cw_exceptional_point,
    helium_preset,
    load_config,
    tau_for_area,
)
from .perturbation import PerturbativeSingularity, a_plus_first_order
from .propagator import (
    BranchTrackingError,
    ConvergenceError,
    propagate_diabatic,
    survival_probability,
)
from .sweep import (
    SweepSpec,
    contour_csv,
    contour_to_json,
    dyn_eps_csv,
    dyn_eps_to_json,
    emit_contour,
    field_csv,
    field_to_json,
    run_sweep,
    split_field,
    separatrix_csv,
    separatrix_to_json,
    sweep_rows_csv,
    sweep_to_json,
    write_atomic,
)

NUMERICAL_ERRORS = (
    ConvergenceError,
    BranchTrackingError,
    PerturbativeSingularity,
    ct.RootSearchError,
    ct.PathBlockedError,
    ct.DegenerateModelError,
)


class UsageError(Exception):
    pass


def _parse_range(text: str) -> tuple[float, float, int]:
    """min:max:n grid axis."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"expected min:max:n, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}: {exc}") from exc


def _parse_seed_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise UsageError(f"expected NxM, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise UsageError(f"bad seed grid {text!r}") from exc


def _load_system(args) -> tuple[SystemParams, PulseParams | None]:
    if getattr(args, "config", None):
        try:
            return load_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        except ValueError as exc:
            raise UsageError(f"bad config: {exc}") from exc
    return helium_preset(), None


def _pulse_from_args(sys_p: SystemParams, args,
                     cfg_pulse: PulseParams | None) -> PulseParams:
    _, eps0_ep = cw_exceptional_point(sys_p)
    eps0 = None
    if getattr(args, "eps0_max", None) is not None:
        eps0 = args.eps0_max
    elif getattr(args, "ratio", None) is not None:
        eps0 = args.ratio * eps0_ep
    elif cfg_pulse is not None:
        eps0 = cfg_pulse.eps0_max
    if eps0 is None:
        raise UsageError("need --eps0-max, --ratio, or a config with a pulse")
    tau = getattr(args, "tau", None)
    phi = getattr(args, "phi", None)
    if phi is not None:
        tau = tau_for_area(sys_p, eps0, phi)
    elif tau is None and cfg_pulse is not None:
        tau = cfg_pulse.tau
    if tau is None:
        raise UsageError("need --tau or --phi")
    alpha = getattr(args, "alpha", None)
    if alpha is None:
        alpha = cfg_pulse.alpha if cfg_pulse is not None else 0.0
    t_span = getattr(args, "t_span", None)
    if t_span is None:
        t_span = cfg_pulse.t_span if cfg_pulse is not None else 6.0
    try:
        return PulseParams(eps0_max=eps0, tau=tau, alpha=alpha, t_span=t_span)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(args, csv_text: str, json_text: str) -> None:
    text = json_text if args.format == "json" else csv_text
    if args.out:
        write_atomic(args.out, text)
    else:
        _sys.stdout.write(text)


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return max(1, args.threads)
    env = os.environ.get("EP_ENCIRCLE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError(f"bad EP_ENCIRCLE_THREADS={env!r}") from exc
    return 1


# -- subcommands --------------------------------------------------------------


def _cmd_ep(args) -> int:
    sys_p, _ = _load_system(args)
    omega_ep, eps0_ep = cw_exceptional_point(sys_p)
    payload = {"omega_ep": omega_ep, "eps0_ep": eps0_ep}
    if args.format == "json":
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        text = f"omega_ep,eps0_ep\n%.17g,%.17g\n" % (omega_ep, eps0_ep)
    if args.out:
        write_atomic(args.out, text)
    else:
        _sys.stdout.write(text)
    return 0


def _cmd_propagate(args) -> int:
    sys_p, cfg_pulse = _load_system(args)
    p = _pulse_from_args(sys_p, args, cfg_pulse)
    res = propagate_diabatic(sys_p, p)
    payload = {
        "p_bound": res.p_bound,
        "c_bound_re": res.final_state.c_bound.real,
        "c_bound_im": res.final_state.c_bound.imag,
        "c_res_re": res.final_state.c_res.real,
        "c_res_im": res.final_state.c_res.imag,
        "n_steps": res.n_steps,
        "phi": p.area(sys_p),
    }
    cols = list(payload)
    csv_text = ",".join(cols) + "\n" + ",".join(
        "%.17g" % payload[c] for c in cols) + "\n"
    _emit(args, csv_text, json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return 0


def _cmd_perturb(args) -> int:
    sys_p, cfg_pulse = _load_system(args)
    p = _pulse_from_args(sys_p, args, cfg_pulse)
    res = a_plus_first_order(sys_p, p, rel_tol=args.tol)
    payload = {
        "a_plus_re": res.a_plus.real,
        "a_plus_im": res.a_plus.imag,
        "p_bound_pert": res.p_bound_pert,
        "error_estimate": res.error_estimate,
        "phi": p.area(sys_p),
    }
    cols = list(payload)
    csv_text = ",".join(cols) + "\n" + ",".join(
        "%.17g" % payload[c] for c in cols) + "\n"
    _emit(args, csv_text, json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return 0


def _cmd_dyn_eps(args) -> int:
    sys_p, cfg_pulse = _load_system(args)
    p = _pulse_from_args(sys_p, args, cfg_pulse)
    grid = _parse_seed_grid(args.seed_grid)
    eps = ct.find_dynamical_eps(sys_p, p, grid=grid, tol_residual=args.tol)
    if args.k > 0:
        eps = ct.attach_sigmas(sys_p, p, eps, k=args.k) + eps[args.k:]
    if args.field_out:
        xs, ys, field = split_field(sys_p, p,
                                    grid=_parse_seed_grid(args.field_grid))
        meta = {"eps0_max": p.eps0_max, "alpha": p.alpha, "tau": p.tau,
                "mu_im": sys_p.mu.imag}
        text = (field_to_json(xs, ys, field, meta) if args.format == "json"
                else field_csv(xs, ys, field, meta))
        write_atomic(args.field_out, text)
    _emit(args, dyn_eps_csv(eps), dyn_eps_to_json(eps))
    return 0


def _cmd_sigma(args) -> int:
    sys_p, cfg_pulse = _load_system(args)
    p = _pulse_from_args(sys_p, args, cfg_pulse)
    eps = ct.find_dynamical_eps(sys_p, p)
    eps = ct.attach_sigmas(sys_p, p, eps, k=min(args.k, len(eps)))
    _emit(args, dyn_eps_csv(eps), dyn_eps_to_json(eps))
    return 0


def _cmd_fit(args) -> int:
    sys_p, cfg_pulse = _load_system(args)
    p = _pulse_from_args(sys_p, args, cfg_pulse)
    phi0 = args.phi0
    phis = list(np.linspace(phi0, 2.0 * phi0, args.n_samples))
    fit = ct.residue_model_fit(sys_p, p, phis, k=args.k)
    payload = {
        "phi_samples": phis,
        "rel_residual": fit.rel_residual,
        "condition": fit.condition,
        "oscillation_period": fit.oscillation_period,
        "poles": [
            {"re_t": e.t_k.real, "im_t": e.t_k.imag,
             "re_sigma": e.sigma_k.real, "im_sigma": e.sigma_k.imag,
             "re_a": e.a_k.real, "im_a": e.a_k.imag}
            for e in fit.eps
        ],
    }
    json_text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    cols = ("re_t", "im_t", "re_sigma", "im_sigma", "re_a", "im_a")
    lines = [",".join(cols)]
    for pole in payload["poles"]:
        lines.append(",".join("%.17g" % pole[c] for c in cols))
    _emit(args, "\n".join(lines) + "\n", json_text)
    return 0


def _cmd_separatrix(args) -> int:
    sys_p, _ = _load_system(args)
    lo, hi, n = _parse_range(args.alpha)
    alphas = list(np.linspace(lo, hi, n))
    points = ct.find_separatrix(sys_p, alphas, phi=args.phi)
    _emit(args, separatrix_csv(points), separatrix_to_json(points))
    return 0


def _cmd_sweep(args) -> int:
    sys_p, _ = _load_system(args)
    try:
        spec = SweepSpec(
            eps_ratio_range=_parse_range(args.eps),
            alpha_range=_parse_range(args.alpha),
            phi=args.phi,
            mode=args.mode,
            t_span=args.t_span,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = run_sweep(spec, sys=sys_p, threads=_threads(args))
    _emit(args, sweep_rows_csv(result), sweep_to_json(result))
    return 0


def _cmd_contour(args) -> int:
    sys_p, cfg_pulse = _load_system(args)
    p = _pulse_from_args(sys_p, args, cfg_pulse)
    samples, meta = emit_contour(sys_p, p, n_samples=args.n_samples)
    _emit(args, contour_csv(samples, meta), contour_to_json(samples, meta))
    return 0


def _add_common(sp, pulse: bool = True):
    sp.add_argument("--config", help="key=value parameter file")
    sp.add_argument("--out", help="output path (stdout if omitted)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    if pulse:
        sp.add_argument("--eps0-max", dest="eps0_max", type=float)
        sp.add_argument("--ratio", type=float,
                        help="peak strength in units of eps0_EP")
        sp.add_argument("--tau", type=float)
        sp.add_argument("--phi", type=float, help="pulse area (overrides --tau)")
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--t-span", dest="t_span", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="epencircle",
        description="Driven two-level resonance model: propagation, "
                    "complex-time analysis, and parameter sweeps.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ep", help="print the cw exceptional point")
    _add_common(sp, pulse=False)
    sp.set_defaults(func=_cmd_ep)

    sp = sub.add_parser("propagate", help="exact survival probability")
    _add_common(sp)
    sp.set_defaults(func=_cmd_propagate)

    sp = sub.add_parser("perturb", help="first-order amplitude")
    _add_common(sp)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(func=_cmd_perturb)

    sp = sub.add_parser("dyn-eps", help="dynamical EPs in complex time")
    _add_common(sp)
    sp.add_argument("--seed-grid", default="80x60")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--k", type=int, default=0,
                    help="attach sigma to the k nearest roots")
    sp.add_argument("--field-out", dest="field_out",
                    help="also export the |split| field on a complex-time grid")
    sp.add_argument("--field-grid", dest="field_grid", default="121x91")
    sp.set_defaults(func=_cmd_dyn_eps)

    sp = sub.add_parser("sigma", help="residue exponents of the nearest roots")
    _add_common(sp)
    sp.add_argument("--k", type=int, default=2)
    sp.set_defaults(func=_cmd_sigma)

    sp = sub.add_parser("fit", help="fit the residue-sum model")
    _add_common(sp)
    sp.add_argument("--phi0", type=float, required=True)
    sp.add_argument("--n-samples", dest="n_samples", type=int, default=8)
    sp.add_argument("--k", type=int, default=2)
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("separatrix", help="critical strength vs chirp")
    _add_common(sp, pulse=False)
    sp.add_argument("--alpha", required=True, help="min:max:n")
    sp.add_argument("--phi", type=float)
    sp.set_defaults(func=_cmd_separatrix)

    sp = sub.add_parser("sweep", help="fixed-area p_bound grid")
    _add_common(sp, pulse=False)
    sp.add_argument("--phi", type=float, required=True)
    sp.add_argument("--eps", required=True, help="eps_ratio min:max:n")
    sp.add_argument("--alpha", required=True, help="alpha min:max:n")
    sp.add_argument("--mode", choices=("exact", "perturbative", "both"),
                    default="exact")
    sp.add_argument("--t-span", dest="t_span", type=float, default=6.0)
    sp.add_argument("--threads", type=int)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("contour", help="pulse contour in the (omega, eps0) plane")
    _add_common(sp)
    sp.add_argument("--n-samples", dest="n_samples", type=int, default=256)
    sp.set_defaults(func=_cmd_contour)

    return ap


def cli_main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=_sys.stderr)
        return 3


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
