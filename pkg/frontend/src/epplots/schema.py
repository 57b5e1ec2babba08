"""Parsers and writers for the simulator's CSV/JSON file formats.

This package never links against the simulator; these file schemas are the
entire interface.  Every reader validates the header/shape it expects and
raises SchemaError with the offending path and reason.  Writers emit the
identical format so that read -> write -> read round-trips exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


class SchemaError(ValueError):
    """An input file does not match the documented schema."""


SWEEP_COLUMNS = ("eps_ratio", "alpha", "tau", "p_bound_exact", "p_bound_pert",
                 "status")
SEPARATRIX_COLUMNS = ("alpha", "eps0_crit_ratio", "s_star")
DYN_EPS_COLUMNS = ("re_t_over_tau", "im_t_over_tau", "residual", "re_sigma",
                   "im_sigma", "re_a", "im_a", "pair_id")
CONTOUR_COLUMNS = ("t_over_tau", "omega", "eps0")
FIELD_COLUMNS = ("re_t_over_tau", "im_t_over_tau", "abs_split")


@dataclass(frozen=True)
class SweepTable:
    """Survival-probability grid in long form plus optional metadata."""

    eps_ratio: np.ndarray
    alpha: np.ndarray
    tau: np.ndarray
    p_bound_exact: np.ndarray
    p_bound_pert: np.ndarray
    status: list
    metadata: dict = field(default_factory=dict)

    def pivot(self, column: str = "p_bound_exact"):
        """(eps_axis, alpha_axis, grid) for heatmap rendering.

        Requires a complete rectangular grid; missing combinations render as
        NaN cells rather than failing.
        """
        eps_axis = np.unique(self.eps_ratio)
        alpha_axis = np.unique(self.alpha)
        grid = np.full((len(eps_axis), len(alpha_axis)), np.nan)
        values = getattr(self, column)
        ei = np.searchsorted(eps_axis, self.eps_ratio)
        aj = np.searchsorted(alpha_axis, self.alpha)
        grid[ei, aj] = values
        return eps_axis, alpha_axis, grid


@dataclass(frozen=True)
class SeparatrixCurve:
    alpha: np.ndarray
    eps0_crit_ratio: np.ndarray
    s_star: np.ndarray


@dataclass(frozen=True)
class DynEpsRecords:
    t: np.ndarray          # complex positions in t/tau
    residual: np.ndarray
    sigma: np.ndarray      # complex, NaN where absent
    a: np.ndarray          # complex, NaN where absent
    pair_id: list


@dataclass(frozen=True)
class ContourTable:
    t_over_tau: np.ndarray
    omega: np.ndarray
    eps0: np.ndarray
    metadata: dict


@dataclass(frozen=True)
class SplitField:
    re_axis: np.ndarray
    im_axis: np.ndarray
    abs_split: np.ndarray  # shape (len(re_axis), len(im_axis))
    metadata: dict


def _float_or_nan(text: str) -> float:
    if text == "" or text is None:
        return math.nan
    try:
        return float(text)
    except ValueError as exc:
        raise SchemaError(f"bad numeric field {text!r}") from exc


def _read_csv_rows(path, columns, allow_meta: bool = False):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read: {exc}") from exc
    meta = {}
    lines = text.splitlines()
    if allow_meta and lines and lines[0].startswith("# "):
        try:
            meta = json.loads(lines[0][2:])
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: bad metadata line: {exc}") from exc
        lines = lines[1:]
    reader = csv.reader(io.StringIO("\n".join(lines)))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{path}: empty file") from None
    if tuple(header) != tuple(columns):
        raise SchemaError(
            f"{path}: header {header} does not match expected {list(columns)}"
        )
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(columns):
            raise SchemaError(
                f"{path}: line {lineno}: expected {len(columns)} fields, got {len(row)}"
            )
        rows.append(row)
    return rows, meta


def read_sweep(path) -> SweepTable:
    """Read a sweep table, CSV or JSON depending on the file extension."""
    if str(path).endswith(".json"):
        return _read_sweep_json(path)
    rows, _ = _read_csv_rows(path, SWEEP_COLUMNS)
    cols = list(zip(*rows)) if rows else [[] for _ in SWEEP_COLUMNS]
    try:
        return SweepTable(
            eps_ratio=np.array([_float_or_nan(v) for v in cols[0]]),
            alpha=np.array([_float_or_nan(v) for v in cols[1]]),
            tau=np.array([_float_or_nan(v) for v in cols[2]]),
            p_bound_exact=np.array([_float_or_nan(v) for v in cols[3]]),
            p_bound_pert=np.array([_float_or_nan(v) for v in cols[4]]),
            status=list(cols[5]),
        )
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def _read_sweep_json(path) -> SweepTable:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    rows = payload.get("rows")
    if not isinstance(rows, list):
        raise SchemaError(f"{path}: missing 'rows' list")

    def col(name, numeric=True):
        out = []
        for r in rows:
            if name not in r:
                raise SchemaError(f"{path}: row missing field {name!r}")
            v = r[name]
            out.append(math.nan if v is None else v)
        return np.array(out) if numeric else out

    return SweepTable(
        eps_ratio=col("eps_ratio"),
        alpha=col("alpha"),
        tau=col("tau"),
        p_bound_exact=col("p_bound_exact"),
        p_bound_pert=col("p_bound_pert"),
        status=[r.get("status") for r in rows],
        metadata=payload.get("metadata", {}),
    )


def write_sweep_csv(table: SweepTable) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for i in range(len(table.eps_ratio)):
        vals = (table.eps_ratio[i], table.alpha[i], table.tau[i],
                table.p_bound_exact[i], table.p_bound_pert[i])
        fields = ["" if (isinstance(v, float) and math.isnan(v) and j >= 3) else "%.17g" % v
                  for j, v in enumerate(vals)]
        # tau prints nan explicitly; probability columns go blank when absent
        lines.append(",".join(fields) + f",{table.status[i]}")
    return "\n".join(lines) + "\n"


def read_separatrix(path) -> SeparatrixCurve:
    rows, _ = _read_csv_rows(path, SEPARATRIX_COLUMNS)
    if not rows:
        raise SchemaError(f"{path}: separatrix file has no rows")
    cols = list(zip(*rows))
    return SeparatrixCurve(
        alpha=np.array([_float_or_nan(v) for v in cols[0]]),
        eps0_crit_ratio=np.array([_float_or_nan(v) for v in cols[1]]),
        s_star=np.array([_float_or_nan(v) for v in cols[2]]),
    )


def write_separatrix_csv(curve: SeparatrixCurve) -> str:
    lines = [",".join(SEPARATRIX_COLUMNS)]
    for i in range(len(curve.alpha)):
        lines.append("%.17g,%.17g,%.17g" % (
            curve.alpha[i], curve.eps0_crit_ratio[i], curve.s_star[i]))
    return "\n".join(lines) + "\n"


def read_dyn_eps(path) -> DynEpsRecords:
    rows, _ = _read_csv_rows(path, DYN_EPS_COLUMNS)
    t, residual, sigma, amp, pair = [], [], [], [], []
    for row in rows:
        t.append(complex(_float_or_nan(row[0]), _float_or_nan(row[1])))
        residual.append(_float_or_nan(row[2]))
        sigma.append(complex(_float_or_nan(row[3]), _float_or_nan(row[4])))
        amp.append(complex(_float_or_nan(row[5]), _float_or_nan(row[6])))
        pair.append(None if row[7] == "" else int(float(row[7])))
    return DynEpsRecords(
        t=np.array(t, dtype=complex),
        residual=np.array(residual),
        sigma=np.array(sigma, dtype=complex),
        a=np.array(amp, dtype=complex),
        pair_id=pair,
    )


def read_contour(path) -> ContourTable:
    rows, meta = _read_csv_rows(path, CONTOUR_COLUMNS, allow_meta=True)
    if not rows:
        raise SchemaError(f"{path}: contour file has no rows")
    cols = list(zip(*rows))
    return ContourTable(
        t_over_tau=np.array([_float_or_nan(v) for v in cols[0]]),
        omega=np.array([_float_or_nan(v) for v in cols[1]]),
        eps0=np.array([_float_or_nan(v) for v in cols[2]]),
        metadata=meta,
    )


def read_field(path) -> SplitField:
    rows, meta = _read_csv_rows(path, FIELD_COLUMNS, allow_meta=True)
    if not rows:
        raise SchemaError(f"{path}: field file has no rows")
    re = np.array([_float_or_nan(r[0]) for r in rows])
    im = np.array([_float_or_nan(r[1]) for r in rows])
    val = np.array([_float_or_nan(r[2]) for r in rows])
    re_axis = np.unique(re)
    im_axis = np.unique(im)
    if len(re_axis) * len(im_axis) != len(rows):
        raise SchemaError(
            f"{path}: {len(rows)} samples do not fill a "
            f"{len(re_axis)}x{len(im_axis)} grid"
        )
    grid = np.full((len(re_axis), len(im_axis)), np.nan)
    grid[np.searchsorted(re_axis, re), np.searchsorted(im_axis, im)] = val
    if np.isnan(grid).any():
        raise SchemaError(f"{path}: duplicate grid samples leave holes")
    return SplitField(re_axis=re_axis, im_axis=im_axis, abs_split=grid,
                      metadata=meta)


def write_field_csv(fld: SplitField) -> str:
    lines = ["# " + json.dumps(fld.metadata, sort_keys=True),
             ",".join(FIELD_COLUMNS)]
    for i, re in enumerate(fld.re_axis):
        for j, im in enumerate(fld.im_axis):
            lines.append("%.17g,%.17g,%.17g" % (re, im, fld.abs_split[i, j]))
    return "\n".join(lines) + "\n"
