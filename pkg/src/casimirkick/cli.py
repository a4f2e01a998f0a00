"""Command-line entry point: ``casimirkick {analytic,simulate,validate,sweep}``.

Exit status: 0 success, 1 physics or validation check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import analytic, propagator
from .config import OUTPUTS, load_config, resolved_config_text
from .exceptions import CasimirKickError, ConfigError, IntegrationError, ValidationError
from .propagator import GaussianMoments
from .svg import emit_svg
from .sweep import BASE_COLUMNS, columns, evaluate, format_csv, run_sweep
from .validation import run_all

log = logging.getLogger("casimirkick")

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2


def _echo(cfg):
    lines = [f"# {line}" if line else "#" for line in resolved_config_text(cfg).splitlines()]
    lines += [f"# warning: {w}" for w in cfg.warnings]
    return "\n".join(lines) + "\n"


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path!r}: {exc.strerror}") from None


def cmd_analytic(cfg, args):
    groups = cfg.groups
    row = {k: getattr(groups, k) for k in BASE_COLUMNS}
    row.update(evaluate(groups, OUTPUTS))
    row["error"] = ""
    cols = list(BASE_COLUMNS) + list(OUTPUTS) + ["error"]
    text = format_csv([row], cols, cfg)
    sys.stdout.write(text)
    out = args.out or cfg.output.csv
    if out:
        _write(out, text)
    return EXIT_OK


def simulate_report(cfg):
    """Propagate with the configured flags and compare against the closed forms."""
    groups = cfg.groups
    tm = propagator.propagate(cfg.flags, groups, tol=cfg.tol)
    init = GaussianMoments.thermal(groups, cfg.electron_state, cfg.narrowing)
    rep = propagator.kinetic_moments(tm, init, groups)
    shift = analytic.mean_kinetic_shift(groups.r, groups.theta, groups.n_th, groups.eps_kick)
    photons = analytic.mean_photons(groups.r, groups.theta, groups.n_th)
    scale = groups.eps_kick * (1.0 + 2.0 * groups.n_th)
    dev_k = abs(rep.delta_k - shift.delta_k) / scale
    dev_n = abs(rep.mean_n - photons) / (photons + 0.5)
    bound = 10.0 * cfg.tol
    report = {
        "flags": cfg.flags.as_dict(),
        "tol": cfg.tol,
        "r": groups.r,
        "theta": groups.theta,
        "n_th": groups.n_th,
        "mean_k": rep.mean_k,
        "var_k": rep.var_k,
        "delta_k": rep.delta_k,
        "delta_var_k": rep.delta_var_k,
        "mean_n": rep.mean_n,
        "commutator_residual": rep.commutator_residual,
        "analytic_delta_k": shift.delta_k,
        "analytic_mean_n": photons,
        "deviation_delta_k": dev_k,
        "deviation_mean_n": dev_n,
        "deviation_bound": bound,
        "within_bound": bool(dev_k <= bound and dev_n <= bound),
        "rhs_evaluations": tm.nfev,
    }
    return {k: float(v) if type(v).__module__ == "numpy" else v for k, v in report.items()}


def cmd_simulate(cfg, args):
    report = simulate_report(cfg)
    lines = [_echo(cfg).rstrip("\n")]
    for key, value in report.items():
        shown = ", ".join(f"{k}={v}" for k, v in value.items()) if isinstance(value, dict) else repr(value)
        lines.append(f"{key} = {shown}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    if cfg.flags.is_canonical and not report["within_bound"]:
        log.error("canonical propagation deviates from the closed forms beyond %g", report["deviation_bound"])
        return EXIT_CHECK
    return EXIT_OK


def cmd_validate(cfg, args):
    results = run_all(cfg)
    sys.stdout.write(_echo(cfg))
    for res in results:
        sys.stdout.write(res.line() + "\n")
    ok = all(r.passed for r in results)
    sys.stdout.write(("ALL PASS" if ok else "FAILED: " + ", ".join(r.name for r in results if not r.passed)) + "\n")
    if args.out:
        payload = {"config": resolved_config_text(cfg), "passed": ok, "checks": [r.as_dict() for r in results]}
        _write(args.out, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_sweep(cfg, args):
    if cfg.sweep is None:
        raise ConfigError("sweep needs a [sweep] section with at least axis1")
    rows = run_sweep(cfg, workers=args.workers)
    text = format_csv(rows, columns(cfg.sweep), cfg)
    out = args.out or cfg.output.csv
    if out:
        _write(out, text)
    else:
        sys.stdout.write(text)
    svg_path = args.svg or cfg.output.svg
    if svg_path:
        column = cfg.output.svg_column
        if column not in cfg.sweep.outputs:
            raise ConfigError(f"svg_column {column!r} is not among the sweep outputs")
        axis2 = cfg.sweep.axis2.name if cfg.sweep.axis2 else None
        _write(svg_path, emit_svg(rows, column, cfg.sweep.axis1.name, axis2))
    failed = sum(1 for r in rows if r["error"])
    if failed:
        log.warning("%d of %d sweep points failed; see the error column", failed, len(rows))
    return EXIT_OK


COMMANDS = {"analytic": cmd_analytic, "simulate": cmd_simulate, "validate": cmd_validate, "sweep": cmd_sweep}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="casimirkick",
        description="Electron kinetic-energy signatures of parametric photon generation in a cavity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", help="output file (CSV for analytic/sweep, JSON for simulate/validate)")
        p.add_argument("--tol", type=float, help="integrator tolerance, overrides [model] tol")
        p.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
        if name == "sweep":
            p.add_argument("--svg", help="write a single-panel SVG of the configured column")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg = load_config(args.config)
        if args.tol is not None:
            try:
                cfg = cfg.with_tol(args.tol)
            except ValidationError as exc:
                raise ConfigError(f"--tol: {exc}") from None
        for w in cfg.warnings:
            log.warning("%s", w)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except IntegrationError as exc:
        log.error("integration failed: %s", exc)
        return EXIT_CHECK
    except CasimirKickError as exc:
        log.error("%s", exc)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
