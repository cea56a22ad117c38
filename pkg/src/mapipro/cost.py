"""Energy, cycle and EDP evaluation of a placement.

Everything here is exact: integral inputs stay ``int`` and float energies are
lifted to :class:`fractions.Fraction` (the exact binary value), so two
placements can be compared without rounding noise. Reports convert to float
at the edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from .errors import BackupFitError, IllegalRegionError, PlacementError, UndefinedProgressError
from .model import (
    REGION_RANK,
    ApplicationProfile,
    DeviceSpec,
    EdpScaling,
    LatencyMode,
    MemoryRegion,
    PlacementItem,
    PowerModel,
    RegionId,
    flatten,
)

Exact = Union[int, Fraction]


def exact(x) -> Exact:
    if isinstance(x, (int, Fraction)):
        return x
    return Fraction(x)


@dataclass(frozen=True)
class Placement:
    """Total map from placement-item id to the region holding it."""

    assignment: Mapping[str, RegionId]

    def __post_init__(self):
        clean = {}
        for item_id, region in self.assignment.items():
            region = RegionId(region)
            if region is RegionId.FRAM_B:
                raise IllegalRegionError(f"{item_id}: FRAM_B is reserved for checkpoints")
            clean[item_id] = region
        object.__setattr__(self, "assignment", MappingProxyType(clean))

    def __getitem__(self, item_id: str) -> RegionId:
        return self.assignment[item_id]

    def __len__(self):
        return len(self.assignment)

    @classmethod
    def uniform(cls, items: Iterable[PlacementItem], region: RegionId) -> "Placement":
        return cls({i.id: region for i in items})

    @classmethod
    def from_vector(cls, items, regions) -> "Placement":
        return cls({i.id: r for i, r in zip(items, regions, strict=True)})

    def bytes_in(self, region: RegionId, items: Iterable[PlacementItem]) -> int:
        return sum(i.size_bytes for i in items if self.assignment[i.id] is region)

    def sram_bytes(self, items: Iterable[PlacementItem]) -> int:
        return self.bytes_in(RegionId.SRAM, items)

    def vector(self, items: Iterable[PlacementItem]) -> tuple[int, ...]:
        """Region ranks in item order; the tie-break compares these lexicographically."""
        return tuple(REGION_RANK[self.assignment[i.id]] for i in items)

    def validate(self, items, device: DeviceSpec, backup_region: bool = False) -> None:
        """Raise unless the placement is total, uses real regions and fits every capacity."""
        items = list(items)
        ids = {i.id for i in items}
        missing = [i.id for i in items if i.id not in self.assignment]
        if missing:
            raise PlacementError(f"placement is not total; unassigned: {', '.join(missing[:5])}")
        extra = sorted(set(self.assignment) - ids)
        if extra:
            raise PlacementError(f"placement names unknown items: {', '.join(extra[:5])}")
        used = {}
        for item in items:
            region = self.assignment[item.id]
            if not device.has(region):
                raise IllegalRegionError(f"{item.id}: device has no {region.value} region")
            used[region] = used.get(region, 0) + item.size_bytes
        for region, nbytes in used.items():
            cap = device.region(region).capacity_bytes
            if nbytes > cap:
                raise PlacementError(f"{region.value} holds {nbytes} B, capacity {cap} B")
        if backup_region:
            check_backup_fit(used.get(RegionId.SRAM, 0), device)


def check_backup_fit(sram_bytes: int, device: DeviceSpec) -> None:
    if not device.has(RegionId.FRAM_B):
        raise BackupFitError("backup requested but the device has no FRAM_B region")
    need = sram_bytes + device.register_file_bytes
    cap = device.region(RegionId.FRAM_B).capacity_bytes
    if need > cap:
        raise BackupFitError(
            f"checkpoint of {sram_bytes} B SRAM + {device.register_file_bytes} B registers "
            f"exceeds FRAM_B ({cap} B)"
        )


@dataclass(frozen=True)
class ItemCost:
    energy_nj: Exact
    cycles: int

    @property
    def edp(self) -> Exact:
        return self.energy_nj * self.cycles


@dataclass(frozen=True)
class CostBreakdown:
    """Totals over all items; ``edp`` is the sum of per-item energy x cycles."""

    energy_nj: Exact
    cycles: int
    edp: Exact
    per_item: Mapping[str, ItemCost]

    @property
    def aggregate_edp(self) -> Exact:
        """Whole-run energy times whole-run cycles."""
        return self.energy_nj * self.cycles


def item_energy(item: PlacementItem, region: MemoryRegion) -> Exact:
    if not region.is_placement_target:
        raise IllegalRegionError(f"{item.id}: {region.id.value} is not a placement region")
    per_call = exact(region.read_energy) * item.reads + exact(region.write_energy) * item.writes
    return per_call * item.weight


def item_cycles(
    item: PlacementItem, region: MemoryRegion, latency_mode: LatencyMode = LatencyMode.PER_REGION
) -> int:
    if LatencyMode(latency_mode) is LatencyMode.FIXED:
        return item.base_cycles * item.weight
    stall = item.accesses * (region.cycles_per_access - 1)
    return (item.base_cycles + stall) * item.weight


def edp_stable(
    placement: Placement,
    profile: ApplicationProfile,
    device: DeviceSpec,
    latency_mode: LatencyMode = LatencyMode.PER_REGION,
    items: list[PlacementItem] | None = None,
) -> CostBreakdown:
    if items is None:
        items = flatten(profile)
    per_item = {}
    energy: Exact = 0
    cycles = 0
    edp: Exact = 0
    for item in items:
        try:
            region = device.region(placement[item.id])
        except KeyError:
            raise PlacementError(f"{item.id} has no usable region in this placement") from None
        cost = ItemCost(item_energy(item, region), item_cycles(item, region, latency_mode))
        per_item[item.id] = cost
        energy += cost.energy_nj
        cycles += cost.cycles
        edp += cost.edp
    return CostBreakdown(energy, cycles, edp, MappingProxyType(per_item))


def eta(nc_execute: int, nc_backup: int, nc_restore: int) -> Fraction:
    """Share of all cycles spent executing rather than checkpointing."""
    if nc_execute <= 0:
        raise UndefinedProgressError("progress is undefined without execute cycles")
    return Fraction(nc_execute, nc_backup + nc_execute + nc_restore)


def scale_edp(stable: Exact, ratio: Fraction, scaling: EdpScaling) -> Exact:
    if EdpScaling(scaling) is EdpScaling.ETA_LITERAL:
        return stable * ratio
    return stable / ratio


def edp_system(
    placement: Placement,
    profile: ApplicationProfile,
    device: DeviceSpec,
    power: PowerModel,
    backup_cycles: int,
    restore_cycles: int,
    latency_mode: LatencyMode = LatencyMode.PER_REGION,
) -> Exact:
    breakdown = edp_stable(placement, profile, device, latency_mode)
    if backup_cycles == 0 and restore_cycles == 0:
        return breakdown.edp
    return scale_edp(breakdown.edp, eta(breakdown.cycles, backup_cycles, restore_cycles), power.edp_scaling)


def checkpoint_bytes(sram_bytes: int, device: DeviceSpec) -> int:
    return sram_bytes + device.register_file_bytes
