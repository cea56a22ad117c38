"""EDP-optimal SRAM / non-volatile memory placement for intermittently powered MCUs."""

from .cost import CostBreakdown, Placement, edp_stable, edp_system, eta, item_cycles, item_energy
from .errors import (
    BackupFitError,
    IllegalRegionError,
    InfeasibleError,
    MapiproError,
    PlacementError,
    ProfileError,
    UndefinedProgressError,
)
from .linker import LinkerFragment, emit_linker, emit_placement_table
from .model import (
    ApplicationProfile,
    DeviceSpec,
    EdpScaling,
    FunctionProfile,
    GlobalVariable,
    LatencyMode,
    MemoryRegion,
    PlacementItem,
    PowerModel,
    RegionId,
    SectionKind,
    SectionProfile,
    bundled_device,
    bundled_profile,
    flatten,
    parse_device_spec,
    parse_power,
    parse_profile,
)
from .simulator import SimulationReport, progress_of, simulate
from .solver import (
    Algorithm,
    BaselineKind,
    SolveOptions,
    SolveResult,
    baseline_placement,
    empirical_baseline,
    exhaustive_oracle,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "ApplicationProfile",
    "BackupFitError",
    "baseline_placement",
    "BaselineKind",
    "bundled_device",
    "bundled_profile",
    "CostBreakdown",
    "DeviceSpec",
    "edp_stable",
    "edp_system",
    "EdpScaling",
    "emit_linker",
    "emit_placement_table",
    "empirical_baseline",
    "eta",
    "exhaustive_oracle",
    "flatten",
    "FunctionProfile",
    "GlobalVariable",
    "IllegalRegionError",
    "InfeasibleError",
    "item_cycles",
    "item_energy",
    "LatencyMode",
    "LinkerFragment",
    "MapiproError",
    "MemoryRegion",
    "parse_device_spec",
    "parse_power",
    "parse_profile",
    "Placement",
    "PlacementError",
    "PlacementItem",
    "PowerModel",
    "ProfileError",
    "progress_of",
    "RegionId",
    "SectionKind",
    "SectionProfile",
    "simulate",
    "SimulationReport",
    "solve",
    "SolveOptions",
    "SolveResult",
    "UndefinedProgressError",
]
