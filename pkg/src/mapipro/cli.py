"""Command-line entry point: solve, simulate, compare, emit-linker, verify.

Exit codes: 0 success, 1 usage or input error, 2 infeasible instance,
3 solver time limit reached (best placement still written), 4 verification
mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .compare import STRATEGIES, UnknownStrategyError, compare, normalize_strategy_name, report_to_csv, report_to_json
from .documents import parse_placement, result_to_json
from .errors import InfeasibleError, MapiproError, PlacementError, ProfileError
from .instances import verify
from .linker import emit_linker, emit_placement_table
from .model import (
    EdpScaling,
    LatencyMode,
    PowerModel,
    bundled_device,
    parse_device_spec,
    parse_power,
    parse_profile,
)
from .simulator import simulate
from .solver import EXHAUSTIVE_MAX_ITEMS, Algorithm, SolveOptions, empirical_baseline, parse_energy_table, solve

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_TIME_LIMIT = 3
EXIT_MISMATCH = 4

DEFAULT_DEVICE = "msp430fr6989"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; that code means "infeasible" here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _read(path: str) -> str:
    p = Path(path)
    try:
        return p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ProfileError("file not found", str(p)) from None
    except OSError as exc:
        raise ProfileError(f"cannot read file: {exc.strerror}", str(p)) from None


def _parse(parser, path):
    try:
        return parser(_read(path))
    except ProfileError as exc:
        if exc.path == str(Path(path)):
            raise
        raise ProfileError(f"{path}: {exc}") from None


def _device(args):
    if args.device is None:
        return bundled_device(DEFAULT_DEVICE)
    return _parse(parse_device_spec, args.device)


def _power(args) -> PowerModel:
    power = _parse(parse_power, args.power) if getattr(args, "power", None) else PowerModel(0)
    failures = getattr(args, "failures", None)
    if failures is not None:
        if failures < 0:
            raise UsageError("--failures must be non-negative")
        power = replace(power, failure_count=failures)
    scaling = getattr(args, "edp_scaling", None)
    if scaling is not None:
        power = replace(power, edp_scaling=EdpScaling(scaling))
    return power


def _options(args, power) -> SolveOptions:
    return SolveOptions(
        latency_mode=LatencyMode(args.latency_mode),
        power=power,
        time_limit=args.time_limit,
        algorithm=Algorithm(getattr(args, "algorithm", Algorithm.BRANCH_AND_BOUND.value)),
        backup_region=False if args.no_backup_region else None,
    )


def _write(path: str | Path, text: str) -> None:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True)
    p.write_bytes(text.encode("utf-8"))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def run_solve(args) -> int:
    profile = _parse(parse_profile, args.profile)
    device = _device(args)
    power = _power(args)
    if args.time_limit <= 0:
        raise UsageError("--time-limit must be positive")
    options = _options(args, power)
    result = solve(profile, device, options)
    out = args.out or f"{profile.application}.placement.json"
    _write(out, result_to_json(result, profile, options))
    print(f"objective: {float(result.objective):.6g} nJ*cycles")
    print(f"proven_optimal: {str(result.proven_optimal).lower()}")
    print(f"placement: {out}")
    if not result.proven_optimal:
        print("warning: time limit reached, placement is best found", file=sys.stderr)
        return EXIT_TIME_LIMIT
    return EXIT_OK


def run_simulate(args) -> int:
    profile = _parse(parse_profile, args.profile)
    device = _device(args)
    placement = _parse(lambda t: parse_placement(t, profile), args.placement)
    power = _power(args)
    backup = (not args.no_backup_region) and device.backup_region
    report = simulate(placement, profile, device, power, backup, LatencyMode(args.latency_mode))
    doc = {
        "application": profile.application,
        "failure_count": power.failure_count,
        "backup_region": report.backup_region,
        "energy_nj": float(report.total_energy_nj),
        "cycles": report.total_cycles,
        "nc_execute": report.nc_execute,
        "nc_backup": report.nc_backup,
        "nc_restore": report.nc_restore,
        "eta": float(report.eta),
        "progress": float(report.progress),
        "edp": float(report.edp_system),
        "completed": report.completed,
        "reexecutions": report.reexecutions,
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def _strategies(text: str) -> list[str]:
    names = [s for s in (p.strip() for p in text.split(",")) if s]
    if not names:
        raise UsageError("--strategies is empty")
    return [normalize_strategy_name(n) for n in names]


def run_compare(args) -> int:
    if args.failures is not None and args.failures < 0:
        raise UsageError("--failures must be non-negative")
    strategies = _strategies(args.strategies)
    table = _parse(parse_energy_table, args.energy_table) if args.energy_table else None

    if args.profile is None:
        # the measured table alone can answer the empirical method
        if strategies != ["empirical"] or table is None:
            raise UsageError("--profile is required unless only 'empirical' runs from --energy-table")
        scenario = args.scenario or ("unstable" if (args.failures or 0) > 0 else "stable")
        choice = empirical_baseline(table, scenario)
        doc = {"scenario": scenario, "config": choice.config, "energy": choice.energy}
        print(json.dumps(doc, indent=2))
        if args.out:
            _write(args.out, json.dumps(doc, indent=2) + "\n")
        return EXIT_OK

    profile = _parse(parse_profile, args.profile)
    device = _device(args)
    power = _power(args)
    options = _options(args, power)
    flash = _parse(parse_device_spec, args.flash_device) if args.flash_device else None
    report = compare(
        profile,
        device,
        power,
        strategies,
        args.normalize,
        options=options,
        flash_device=flash,
        energy_table=table,
        scenario=args.scenario,
    )
    as_json = report_to_json(report)
    as_csv = report_to_csv(report)
    if args.out:
        out = Path(args.out)
        _write(out.with_suffix(".json"), as_json)
        _write(out.with_suffix(".csv"), as_csv)
    sys.stdout.write(as_csv if args.format == "csv" else as_json)
    return EXIT_OK


def run_emit_linker(args) -> int:
    profile = _parse(parse_profile, args.profile)
    placement = _parse(lambda t: parse_placement(t, profile), args.placement)
    fragment = emit_linker(placement, profile)
    if args.out_dir:
        cmd, hdr = fragment.write(args.out_dir)
        print(f"wrote {cmd}")
        print(f"wrote {hdr}")
    else:
        sys.stdout.write(fragment.render())
    if args.table:
        sys.stdout.write(emit_placement_table(placement))
    return EXIT_OK


def run_verify(args) -> int:
    if args.instances < 0:
        raise UsageError("--instances must be non-negative")
    if not 1 <= args.max_items <= EXHAUSTIVE_MAX_ITEMS:
        raise UsageError(f"--max-items must be in [1, {EXHAUSTIVE_MAX_ITEMS}] for exhaustive enumeration")
    if args.instances == 0:
        print("warning: --instances 0, nothing to verify", file=sys.stderr)
        return EXIT_OK
    mismatches = verify(args.instances, args.max_items, args.seed)
    if not mismatches:
        print(f"ok: {args.instances} instances, branch-and-bound matches enumeration")
        return EXIT_OK
    for m in mismatches:
        print(
            f"MISMATCH instance {m.index} (P={m.failure_count}): "
            f"bnb={m.bnb_objective} exhaustive={m.exhaustive_objective}",
            file=sys.stderr,
        )
        print(m.profile_json, file=sys.stderr)
    print(f"{len(mismatches)} of {args.instances} instances disagree", file=sys.stderr)
    return EXIT_MISMATCH


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _model_flags(p, power=True):
    p.add_argument("--device", help=f"device document (default: bundled {DEFAULT_DEVICE})")
    if power:
        p.add_argument("--power", help="power document; default is P=0")
        p.add_argument("--failures", type=int, help="override the failure count P")
        p.add_argument("--edp-scaling", choices=[e.value for e in EdpScaling])
    p.add_argument("--latency-mode", choices=[m.value for m in LatencyMode], default=LatencyMode.PER_REGION.value)
    p.add_argument("--no-backup-region", action="store_true", help="restart from scratch after each failure")
    p.add_argument("--time-limit", type=float, default=60.0, help="solver time limit in seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mapipro", description="EDP-optimal SRAM/FRAM placement for MSP430-class devices")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="compute the optimal placement")
    p.add_argument("--profile", required=True)
    _model_flags(p)
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm], default=Algorithm.BRANCH_AND_BOUND.value)
    p.add_argument("--out", help="placement document path (default: <app>.placement.json)")
    p.set_defaults(func=run_solve)

    p = sub.add_parser("simulate", help="replay a placement under power failures")
    p.add_argument("--profile", required=True)
    p.add_argument("--placement", required=True)
    _model_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=run_simulate)

    p = sub.add_parser("compare", help="evaluate strategies side by side")
    p.add_argument("--profile")
    p.add_argument("--strategies", default=",".join(STRATEGIES), help="comma list of strategies")
    _model_flags(p)
    p.add_argument("--normalize", default="fram-only")
    p.add_argument("--energy-table", help="measured eight-configuration table for the empirical method")
    p.add_argument("--scenario", choices=["stable", "unstable"])
    p.add_argument("--flash-device", help="SRAM + Flash device for sram-flash-ilp")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", help="report path; a .json and a .csv are written")
    p.set_defaults(func=run_compare)

    p = sub.add_parser("emit-linker", help="render linker fragment and pragmas")
    p.add_argument("--profile", required=True)
    p.add_argument("--placement", required=True)
    p.add_argument("--out-dir", help="write <app>.mapipro.cmd and <app>.mapipro.pragmas.h here")
    p.add_argument("--table", action="store_true", help="also print the per-function placement table")
    p.set_defaults(func=run_emit_linker)

    p = sub.add_parser("verify", help="check branch-and-bound against enumeration")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--max-items", type=int, default=16)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=run_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except UnknownStrategyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InfeasibleError, PlacementError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ProfileError, MapiproError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
