"""Grid evaluation of the closed-form outputs and CSV emission.

Rows are always assembled by grid index, never by completion order, so the
CSV bytes do not depend on the number of worker processes.
"""

from __future__ import annotations

import io
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import analytic
from .config import OUTPUTS, resolved_config_text
from .exceptions import CasimirKickError
from .params import reduce

__all__ = ["BASE_COLUMNS", "columns", "evaluate", "point_row", "run_sweep", "format_csv"]

BASE_COLUMNS = ("r", "theta", "n_th", "eps_kick")
UNITS = {
    "r": "-",
    "theta": "rad",
    "n_th": "-",
    "temperature": "K",
    "v0": "m/s",
    "L": "m",
    "eps_kick": "J",
    "delta_k": "J",
    "f": "-",
    "dvar_paper": "J^2",
    "mean_n": "-",
    "snr": "-",
}


def evaluate(groups, outputs=OUTPUTS):
    """Closed-form outputs at one parameter point, as a dict."""
    shift = analytic.mean_kinetic_shift(groups.r, groups.theta, groups.n_th, groups.eps_kick)
    dvar = analytic.variance_shift_paper(groups.r, groups.theta, groups.n_th, groups.eps_kick, groups.k0).dvar_paper
    values = {
        "delta_k": shift.delta_k,
        "f": shift.f,
        "dvar_paper": dvar,
        "mean_n": analytic.mean_photons(groups.r, groups.theta, groups.n_th),
        "snr": shift.delta_k / math.sqrt(dvar) if dvar > 0 else 0.0,
    }
    return {k: values[k] for k in outputs}


def _point_groups(cavity, electron, assignment):
    for name, value in assignment:
        if name == "temperature":
            cavity = replace(cavity, temperature=value, n_th=None)
        elif name == "v0":
            electron = replace(electron, v0=value)
        elif name == "L":
            electron = replace(electron, flight_length=value)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        groups = reduce(cavity, electron)
    direct = {name: value for name, value in assignment if name in ("r", "theta", "n_th")}
    return replace(groups, **direct) if direct else groups


def point_row(cavity, electron, assignment, outputs=OUTPUTS):
    """One result row for the given ``((name, value), ...)`` assignment.

    Failures are captured in the ``error`` field rather than raised.
    """
    row = {f"axis{i + 1}_{name}": value for i, (name, value) in enumerate(assignment)}
    try:
        groups = _point_groups(cavity, electron, assignment)
        row.update({k: getattr(groups, k) for k in BASE_COLUMNS})
        row.update(evaluate(groups, outputs))
        row["error"] = ""
    except (CasimirKickError, ValueError, ArithmeticError) as exc:
        for k in BASE_COLUMNS + tuple(outputs):
            row.setdefault(k, math.nan)
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def columns(spec):
    axis_cols = [f"axis{i + 1}_{a.name}" for i, a in enumerate(spec.axes)]
    return axis_cols + list(BASE_COLUMNS) + list(spec.outputs) + ["error"]


def _grid(spec):
    if spec.axis2 is None:
        return [((spec.axis1.name, float(v)),) for v in spec.axis1.values()]
    return [
        ((spec.axis1.name, float(u)), (spec.axis2.name, float(v)))
        for u in spec.axis1.values()
        for v in spec.axis2.values()
    ]


def _chunk_rows(args):
    cavity, electron, assignments, outputs = args
    return [point_row(cavity, electron, a, outputs) for a in assignments]


def run_sweep(cfg, workers=1):
    """Evaluate the configured grid; rows in lexicographic (axis1, axis2) order."""
    spec = cfg.sweep
    if spec is None:
        raise CasimirKickError("configuration has no [sweep] section")
    grid = _grid(spec)
    if workers <= 1:
        return [point_row(cfg.cavity, cfg.electron, a, spec.outputs) for a in grid]
    size = max(1, math.ceil(len(grid) / (4 * workers)))
    chunks = [(cfg.cavity, cfg.electron, grid[i : i + size], spec.outputs) for i in range(0, len(grid), size)]
    rows = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_chunk_rows, chunks):
            rows.extend(part)
    return rows


def _cell(value):
    if isinstance(value, str):
        if any(c in value for c in ',"\n'):
            return '"' + value.replace('"', '""').replace("\n", " ") + '"'
        return value
    return repr(float(value))


def format_csv(rows, cols, cfg):
    """CSV text: ``#`` lines echoing the resolved config, a header, then rows."""
    buf = io.StringIO()
    for line in resolved_config_text(cfg).splitlines():
        buf.write(f"# {line}\n" if line else "#\n")
    for w in cfg.warnings:
        buf.write(f"# warning: {w}\n")
    buf.write("# units: " + ", ".join(f"{c} [{UNITS.get(c.split('_', 1)[-1] if c.startswith('axis') else c, '-')}]" for c in cols if c != "error") + "\n")
    buf.write(",".join(cols) + "\n")
    for row in rows:
        buf.write(",".join(_cell(row.get(c, "")) for c in cols) + "\n")
    return buf.getvalue()
