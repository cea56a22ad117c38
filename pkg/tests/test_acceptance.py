"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines are printed in
the terminal summary) or ``python tests/test_acceptance.py``.
"""

import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import ACCEPTANCE_LINES, app, toy_device
from linker_cases import CASES
from mapipro.cli import main
from mapipro.compare import compare
from mapipro.cost import Placement, edp_stable, item_energy
from mapipro.errors import BackupFitError, InfeasibleError, ProfileError
from mapipro.instances import generate_instances, verify
from mapipro.linker import emit_linker
from mapipro.model import (
    GlobalVariable,
    PlacementItem,
    PowerModel,
    bundled_device,
    bundled_profile,
    bundled_text,
    flatten,
)
from mapipro.simulator import simulate
from mapipro.solver import (
    BaselineKind,
    SolveOptions,
    baseline_placement,
    empirical_baseline,
    empirical_placement,
    parse_energy_table,
    placement_objective,
    solve,
)

GOLDENS = Path(__file__).parent / "goldens"
SMALL_APPS = ("fir", "16bit_2dim", "matrix_mult", "qsort_small")
LARGE_APPS = ("aes", "sha", "qsort_large", "susan")


def record(number, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_oracle_equivalence(capsys):
    start = time.perf_counter()
    code = main(["verify", "--instances", "200", "--max-items", "16", "--seed", "7"])
    elapsed = time.perf_counter() - start
    capsys.readouterr()
    # same instances through the library, to count and inspect them
    mismatches = verify(200, 16, 7)
    n = len(generate_instances(200, 16, 7))
    ok = code == 0 and not mismatches and n == 200 and elapsed < 60
    record(1, "branch-and-bound equals enumeration on 200 instances", ok, f"exit {code}, {elapsed:.2f} s")


def test_criterion_2_empirical_table():
    rows = parse_energy_table(bundled_text("tables", "qsort_small_empirical.json"))
    stable = empirical_baseline(rows, "stable")
    unstable = empirical_baseline(rows, "unstable")
    ok = (stable.config, stable.energy) == ("SSS", 16.70) and (unstable.config, unstable.energy) == ("SFS", 33.79)
    record(2, "empirical table argmins", ok, f"stable {{{stable.config}}} {stable.energy} mJ, "
           f"unstable {{{unstable.config}}} {unstable.energy} mJ")


def test_criterion_3_energy_spot_values():
    fr = bundled_device("msp430fr6989")
    flash = bundled_device("msp430f5529").region("FLASH")
    it = PlacementItem("x", 8, 10, 5, 1, 100)
    e_sram = item_energy(it, fr.region("SRAM"))
    e_fram = item_energy(it, fr.region("FRAM_N"))
    e_flash_w = item_energy(PlacementItem("w", 8, 0, 1, 1, 0), flash)
    ok = e_sram == 83000 and e_fram == 168875 and e_flash_w == 31198 and flash.write_energy == 31198
    record(3, "energy-model spot values", ok, f"SRAM {e_sram} nJ, FRAM {e_fram} nJ, Flash write {e_flash_w} nJ")


def test_criterion_4_dominance():
    fr = bundled_device("msp430fr6989")
    instances = generate_instances(100, 20, 4)
    violations = []
    checked = 0
    for k, inst in enumerate(instances):
        opts = inst.options
        best = solve(inst.profile, fr, opts).objective
        rivals = {"fram-only": baseline_placement(BaselineKind.FRAM_ONLY, inst.profile, fr, opts).objective}
        try:
            rivals["sram-only"] = baseline_placement(BaselineKind.SRAM_ONLY, inst.profile, fr, opts).objective
        except InfeasibleError:
            pass
        try:
            rivals["empirical"] = empirical_placement(inst.profile, fr, opts)[1].objective
        except InfeasibleError:
            pass
        for name, value in rivals.items():
            checked += 1
            if best > value:
                violations.append((k, name))
    record(4, "optimum never worse than a baseline", not violations and len(instances) == 100,
           f"{checked} comparisons, {len(violations)} violations")


def test_criterion_5_intermittency_accounting():
    fr = bundled_device("msp430fr6989")
    p = bundled_profile("qsort_small")
    pl = solve(p, fr).placement
    stable = simulate(pl, p, fr, PowerModel(0), backup_region=False)
    restart = simulate(pl, p, fr, PowerModel(4), backup_region=False)
    p0 = simulate(pl, p, fr, PowerModel(0), backup_region=True)
    reference = edp_stable(pl, p, fr).edp
    rel = abs(Fraction(p0.edp_system) - reference) / reference
    ok = restart.nc_execute == 5 * stable.nc_execute and p0.eta == 1 and rel <= Fraction(1, 10**9)
    record(5, "intermittency accounting", ok, f"execute x{restart.nc_execute / stable.nc_execute:g}, eta {p0.eta}, rel err {float(rel):.1e}")


def test_criterion_6_monotonicity():
    fr = bundled_device("msp430fr6989")
    p = bundled_profile("qsort_small")
    pl = solve(p, fr, SolveOptions(power=PowerModel(4))).placement
    reports = [simulate(pl, p, fr, PowerModel(k)) for k in (0, 1, 2, 4, 8, 16)]
    edps = [r.edp_system for r in reports]
    etas = [r.eta for r in reports]
    ok = (
        reports[0].backup_bytes > 0
        and all(a <= b for a, b in zip(edps, edps[1:]))
        and all(a > b for a, b in zip(etas, etas[1:]))
    )
    record(6, "EDP non-decreasing and eta strictly decreasing in P", ok, f"eta {float(etas[0]):.4f} .. {float(etas[-1]):.4f}")


def test_criterion_7_backup_fit():
    # SRAM large enough to exceed the 3072 B backup area, which must reject it
    dev = toy_device(sram=4096, fram_b=3072, backup=False)
    p = app("fit", [GlobalVariable(f"g{i}", 1024, 5000, 5000, 1000) for i in range(4)], [])
    over = Placement({"g0": "SRAM", "g1": "SRAM", "g2": "SRAM", "g3": "FRAM_N"})
    opts = SolveOptions(power=PowerModel(2), backup_region=True)
    rejected = []
    try:
        simulate(over, p, dev, PowerModel(2), backup_region=True)
    except BackupFitError:
        rejected.append("simulator")
    try:
        placement_objective(over, p, dev, opts)
    except BackupFitError:
        rejected.append("solver objective")
    best = solve(p, dev, opts)
    sram_used = best.placement.sram_bytes(flatten(p))
    if sram_used + dev.register_file_bytes <= 3072:
        rejected.append("solver optimum")
    # the unconstrained optimum would take three items into SRAM
    free = solve(p, dev, SolveOptions(power=PowerModel(2), backup_region=False))
    try:
        toy_device(sram=4096, fram_b=3072, backup=True)
    except ProfileError:
        rejected.append("device document")
    ok = len(rejected) == 4 and free.placement.sram_bytes(flatten(p)) > 3072 - 64
    record(7, "backup-fit violations rejected", ok, ", ".join(rejected))


def test_criterion_8_golden_emission(tmp_path):
    diffs = []
    for case, make in sorted(CASES.items()):
        profile, placement = make()
        cmd, hdr = emit_linker(placement, profile).write(tmp_path)
        for produced in (cmd, hdr):
            if produced.read_bytes() != (GOLDENS / produced.name).read_bytes():
                diffs.append(produced.name)
    sram_cmd = (GOLDENS / "stack_sram.mapipro.cmd").read_text()
    mixed_h = (GOLDENS / "mixed.mapipro.pragmas.h").read_text()
    ok = (
        not diffs
        and ".stack : {} > RAM (HIGH)" in sram_cmd
        and "#pragma DATA_SECTION ( func_1, .Localvars)" in mixed_h
    )
    record(8, "golden linker emission", ok, "3 cases byte-identical" if not diffs else f"differs: {diffs}")


def _edp(report, strategy):
    return report.row(strategy).report.edp_system


def test_criterion_9_qualitative_shape():
    fr = bundled_device("msp430fr6989")
    f5529 = bundled_device("msp430f5529")
    failures = []
    totals = {}
    for scenario, P in (("stable", 0), ("unstable", 4), ("unstable", 8)):
        fram_total = flash_total = 0
        for name in SMALL_APPS + LARGE_APPS:
            p = bundled_profile(name)
            rep = compare(
                p, fr, PowerModel(P),
                ["fram-only", "sram-only", "sram-flash-ilp", "sram-fram-ilp-no-br", "proposed"],
                flash_device=f5529,
            )
            proposed = _edp(rep, "proposed")
            if scenario == "stable" and name in SMALL_APPS:
                if not _edp(rep, "sram-only") <= proposed <= _edp(rep, "fram-only"):
                    failures.append(f"{name} P={P}: sram-only <= proposed <= fram-only")
            if P >= 4 and not proposed < _edp(rep, "sram-fram-ilp-no-br"):
                failures.append(f"{name} P={P}: proposed < no-br")
            flash = _edp(rep, "sram-flash-ilp")
            if not proposed <= flash or (name in LARGE_APPS and not proposed < flash):
                failures.append(f"{name} P={P}: FRAM device below Flash device")
            fram_total += proposed
            flash_total += flash
        totals[P] = float(fram_total / flash_total)
        if not fram_total < flash_total:
            failures.append(f"suite P={P}: FRAM total below Flash total")
    detail = "FRAM/Flash suite EDP " + ", ".join(f"P={k}: {v:.3f}" for k, v in totals.items())
    record(9, "qualitative orderings on the fixture suite", not failures, detail if not failures else "; ".join(failures))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
