"""Command-line entry point.

Subcommands:

    simulate <config>      integrate to the target time, write CSV + snapshot
    reconnect <config>     full reconnection pipeline, write report + ledger
    bounds <config>        amplitude/frequency scaling sweep
    check-lemmas <config>  closed-form and estimate checks (exit 1 on failure)
    nulls <snapshot>       census nulls of a stored field
    norms <snapshot>       norm battery of a stored field

Exit codes: 0 success, 1 check failure, 2 configuration error, 3 runtime
failure (blow-up, I/O).  MHD_THREADS caps internal FFT parallelism.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, default_config_text, parse_config
from .diagnostics import norm_report
from .experiments import (
    ExperimentConfig,
    run_global_bounds,
    run_lemma_checks,
    run_reconnection,
)
from .initial_data import build_initial_magnetic, build_initial_velocity
from .snapshot import SnapshotError, emit_timeseries, read_snapshot, write_snapshot
from .solver import BlowUpError, simulate
from .topology import find_nulls_detailed

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

logger = logging.getLogger(__name__)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _cmd_simulate(args) -> int:
    config = parse_config(args.config)
    grid = config.grid.build()
    u0 = build_initial_velocity(config.data, grid)
    b0 = build_initial_magnetic(config.data, grid)
    from .experiments import TraceObserver

    trace = TraceObserver(u0, b0, r=config.r)
    state = simulate(
        u0, b0, config.mhd_params(), config.data.T,
        observer=trace, cadence=config.cadence(),
    )
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_timeseries(trace.rows, out / "timeseries.csv")
    write_snapshot(state, out / "final.snap")
    print(f"integrated to t = {state.t:g} in {state.step_count} steps")
    print(f"wrote {out / 'timeseries.csv'} and {out / 'final.snap'}")
    if trace.violations:
        print("invariant violations:")
        for v in trace.violations:
            print(f"  {v}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_reconnect(args) -> int:
    config = parse_config(args.config)
    report = run_reconnection(config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_text(out / "reconnection_report.txt", report.to_text())
    _write_text(out / "reconnection_ledger.txt", "\n".join(report.ledger_lines()) + "\n")
    emit_timeseries(report.trace_rows, out / "timeseries.csv")
    print(report.to_text())
    print(f"wrote report and ledger under {out}/")
    return EXIT_OK


def _cmd_bounds(args) -> int:
    config = parse_config(args.config)
    rho_list = [float(x) for x in args.rho.split(",")] if args.rho else [1e-2, 1e-3, 1e-4]
    n_list = [float(x) for x in args.N.split(",")] if args.N else [config.data.N]
    table = run_global_bounds(config, rho_list, n_list)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_text(out / "bounds_report.txt", table.to_text())
    _write_text(out / "bounds_ledger.txt", "\n".join(table.ledger_lines()) + "\n")
    print(table.to_text())
    return EXIT_OK


def _cmd_check_lemmas(args) -> int:
    config = parse_config(args.config)
    ledger = run_lemma_checks(config, profile="smoke" if args.smoke else "full")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_text(out / "lemma_ledger.txt", "\n".join(ledger.ledger_lines()) + "\n")
    for line in ledger.lines():
        print(line)
    return EXIT_OK if ledger.all_passed else EXIT_CHECK_FAILED


def _load_vector(snapshot_path, field_name):
    snap = read_snapshot(snapshot_path)
    names = snap.field_names()
    if field_name is None:
        if len(names) == 1:
            field_name = names[0]
        else:
            raise SnapshotError(
                f"snapshot holds {names}; pick one with --field"
            )
    if field_name in snap.fields:
        raise SnapshotError(f"{field_name!r} is a scalar field; nulls/norms need a vector")
    return snap, snap.vector(field_name), field_name


def _cmd_nulls(args) -> int:
    snap, field, name = _load_vector(args.snapshot, args.field)
    center = tuple(float(x) for x in args.center.split(",")) if args.center else (0.0, 0.0, 0.0)
    search = find_nulls_detailed(field, center=center, radius=args.radius)
    print(
        f"{name}: {len(search.points)} null(s) in radius {args.radius} around {center} "
        f"({search.seeds_total} seeds, {search.seeds_dropped} dropped)"
    )
    for p in search.points:
        eigs = ", ".join(f"{z.real:+.4f}{z.imag:+.4f}i" for z in p.eigenvalues)
        print(
            f"  x = ({p.x[0]:+.6f}, {p.x[1]:+.6f}, {p.x[2]:+.6f})  |F| = {p.residual:.2e}  "
            f"{p.classification}  eig = [{eigs}]"
        )
    return EXIT_OK


def _cmd_norms(args) -> int:
    snap = read_snapshot(args.snapshot)
    names = snap.field_names()
    name = args.field
    if name is None:
        if len(names) != 1:
            raise SnapshotError(f"snapshot holds {names}; pick one with --field")
        name = names[0]
    target = snap.fields[name] if name in snap.fields else snap.vector(name)
    report = norm_report(target, name)
    print(f"norms of {name} (n = {snap.grid.n}, L = {snap.grid.L:g}, t = {snap.t:g}):")
    for line in report.lines():
        print(f"  {line}")
    return EXIT_OK


def _cmd_print_config(_args) -> int:
    print(default_config_text(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhdreconnect",
        description="Pseudo-spectral resistive MHD with topological reconnection diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the configured data to the target time")
    p.add_argument("config")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("reconnect", help="run the reconnection pipeline")
    p.add_argument("config")
    p.set_defaults(func=_cmd_reconnect)

    p = sub.add_parser("bounds", help="amplitude/frequency scaling sweep")
    p.add_argument("config")
    p.add_argument("--rho", help="comma-separated amplitudes (default 1e-2,1e-3,1e-4)")
    p.add_argument("--N", help="comma-separated Beltrami frequencies (default: config value)")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("check-lemmas", help="run the verification battery")
    p.add_argument("config")
    p.add_argument("--smoke", action="store_true", help="reduced grids (plumbing test)")
    p.set_defaults(func=_cmd_check_lemmas)

    p = sub.add_parser("nulls", help="census nulls of a snapshot field")
    p.add_argument("snapshot")
    p.add_argument("--field", help="vector field name (needed when several are stored)")
    p.add_argument("--radius", type=float, default=None, help="census ball radius (default: whole box)")
    p.add_argument("--center", help="ball center as 'x,y,z' (default origin)")
    p.set_defaults(func=_cmd_nulls)

    p = sub.add_parser("norms", help="norm battery of a snapshot field")
    p.add_argument("snapshot")
    p.add_argument("--field")
    p.set_defaults(func=_cmd_norms)

    p = sub.add_parser("print-config", help="print a fully commented default configuration")
    p.set_defaults(func=_cmd_print_config)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (SnapshotError, OSError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
