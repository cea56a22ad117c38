"""Side-by-side evaluation of the proposed placement and the baseline strategies."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

from .cost import Exact, Placement
from .errors import InfeasibleError, MapiproError, PlacementError
from .model import ApplicationProfile, DeviceSpec, PowerModel
from .simulator import SimulationReport, simulate
from .solver import (
    BaselineKind,
    EmpiricalChoice,
    EnergyRow,
    SolveOptions,
    baseline_placement,
    empirical_placement,
    flash_variant,
    solve,
)

STRATEGIES = (
    "fram-only",
    "sram-only",
    "empirical",
    "sram-flash-ilp",
    "sram-fram-ilp-no-br",
    "proposed",
)

# Only the ILP variant without the backup region loses progress on failure;
# every other strategy checkpoints volatile state into the backup area.
_USES_BACKUP = {
    "fram-only": True,
    "sram-only": True,
    "empirical": True,
    "sram-flash-ilp": True,
    "sram-fram-ilp-no-br": False,
    "proposed": True,
}

COLUMNS = (
    "strategy",
    "status",
    "energy_nj",
    "cycles",
    "edp",
    "eta",
    "progress",
    "normalized_edp",
    "completed",
    "reexecutions",
)


class UnknownStrategyError(MapiproError, ValueError):
    pass


@dataclass(frozen=True)
class ComparisonRow:
    strategy: str
    report: SimulationReport | None
    normalized_edp: Exact | None = None
    infeasible: str | None = None
    placement: Placement | None = None

    @property
    def edp(self) -> Exact | None:
        return None if self.report is None else self.report.edp_system


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    normalization: str
    application: str = ""
    failure_count: int = 0
    empirical_choice: EmpiricalChoice | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def row(self, strategy: str) -> ComparisonRow:
        for r in self.rows:
            if r.strategy == strategy:
                return r
        raise KeyError(strategy)


def normalize_strategy_name(name: str) -> str:
    key = name.strip().lower().replace("_", "-")
    if key not in STRATEGIES:
        raise UnknownStrategyError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}")
    return key


def _place(strategy, profile, device, options, flash_device, energy_table, scenario):
    """Return (placement, device actually used, empirical choice or None)."""
    if strategy == "proposed":
        res = solve(profile, device, options)
        return res.placement, device, None
    if strategy == "empirical":
        choice, res = empirical_placement(profile, device, options, energy_table, scenario)
        return res.placement, device, choice
    kind = {
        "fram-only": BaselineKind.FRAM_ONLY,
        "sram-only": BaselineKind.SRAM_ONLY,
        "sram-flash-ilp": BaselineKind.SRAM_FLASH_ILP,
        "sram-fram-ilp-no-br": BaselineKind.SRAM_FRAM_ILP_NO_BR,
    }[strategy]
    res = baseline_placement(kind, profile, device, options, flash_device)
    return res.placement, res.device or device, None


def compare(
    profile: ApplicationProfile,
    device: DeviceSpec,
    power: PowerModel,
    strategies: Iterable[str],
    normalize: str = "fram-only",
    *,
    options: SolveOptions | None = None,
    flash_device: DeviceSpec | None = None,
    energy_table: Iterable[EnergyRow] | None = None,
    scenario: str | None = None,
) -> ComparisonReport:
    names = [normalize_strategy_name(s) for s in strategies]
    normalize = normalize_strategy_name(normalize)
    if normalize not in names:
        names.append(normalize)
    options = replace(options or SolveOptions(), power=power)
    if flash_device is None and "sram-flash-ilp" in names:
        flash_device = flash_variant(device)

    rows = []
    choice = None
    for name in names:
        try:
            placement, used_device, picked = _place(
                name, profile, device, options, flash_device, energy_table, scenario
            )
            backup = _USES_BACKUP[name] and options.uses_backup(used_device)
            report = simulate(placement, profile, used_device, power, backup, options.latency_mode)
        except (InfeasibleError, PlacementError) as exc:
            rows.append(ComparisonRow(name, None, infeasible=str(exc)))
            continue
        if picked is not None:
            choice = picked
        rows.append(ComparisonRow(name, report, placement=placement))

    base = next(r for r in rows if r.strategy == normalize)
    notes = []
    if base.report is None or base.report.edp_system == 0:
        notes.append(f"normalization row {normalize} has no positive EDP; rows left unnormalized")
    else:
        rows = [
            r if r.report is None else replace(r, normalized_edp=Fraction(r.report.edp_system) / Fraction(base.report.edp_system))
            for r in rows
        ]
    return ComparisonReport(
        rows=tuple(rows),
        normalization=normalize,
        application=profile.application,
        failure_count=power.failure_count,
        empirical_choice=choice,
        notes=tuple(notes),
    )


def _num(value):
    if value is None:
        return None
    if isinstance(value, int):
        return value
    return float(value)


def row_to_dict(row: ComparisonRow) -> dict:
    rep = row.report
    if rep is None:
        return {
            "strategy": row.strategy,
            "status": "infeasible",
            "energy_nj": None,
            "cycles": None,
            "edp": None,
            "eta": None,
            "progress": None,
            "normalized_edp": None,
            "completed": False,
            "reexecutions": None,
            "reason": row.infeasible,
        }
    return {
        "strategy": row.strategy,
        "status": "ok",
        "energy_nj": _num(rep.total_energy_nj),
        "cycles": rep.total_cycles,
        "edp": _num(rep.edp_system),
        "eta": float(rep.eta),
        "progress": float(rep.progress),
        "normalized_edp": _num(row.normalized_edp),
        "completed": rep.completed,
        "reexecutions": rep.reexecutions,
    }


def report_to_dict(report: ComparisonReport) -> dict:
    out = {
        "application": report.application,
        "failure_count": report.failure_count,
        "normalization": report.normalization,
        "rows": [row_to_dict(r) for r in report.rows],
    }
    if report.empirical_choice is not None:
        out["empirical_choice"] = {
            "config": report.empirical_choice.config,
            "energy": report.empirical_choice.energy,
            "scenario": report.empirical_choice.scenario,
        }
    if report.notes:
        out["notes"] = list(report.notes)
    return out


def report_to_json(report: ComparisonReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def report_to_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in report.rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row_to_dict(row).items()})
    return buf.getvalue()
