"""Replay of one application run under an evenly spaced power-failure schedule.

Two recovery disciplines are modelled. With the backup region, every failure
copies the occupied SRAM plus the register file into ``FRAM_B`` and copies it
back on power-on, so execution resumes where it stopped. Without it, the run
restarts from scratch and every interrupted attempt is charged as a full run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cost import Exact, Placement, checkpoint_bytes, edp_stable, eta, exact, scale_edp
from .model import ApplicationProfile, DeviceSpec, LatencyMode, PowerModel, flatten


@dataclass(frozen=True)
class SimulationReport:
    total_energy_nj: Exact
    total_cycles: int
    nc_execute: int
    nc_backup: int
    nc_restore: int
    eta: Fraction
    progress: Fraction
    edp_system: Exact
    failures_served: int
    completed: bool
    reexecutions: int
    execute_energy_nj: Exact = 0
    backup_energy_nj: Exact = 0
    restore_energy_nj: Exact = 0
    backup_bytes: int = 0
    backup_region: bool = False

    @property
    def edp_aggregate(self) -> Exact:
        """Whole-run energy times whole-run cycles, checkpoint traffic included."""
        return self.total_energy_nj * self.total_cycles


def failure_schedule(nc_execute: int, failure_count: int) -> list[Fraction]:
    """Cycle marks of ``failure_count`` failures spread evenly over one run."""
    if failure_count < 0:
        raise ValueError("failure count must be non-negative")
    return [Fraction(k * nc_execute, failure_count + 1) for k in range(1, failure_count + 1)]


def simulate(
    placement: Placement,
    profile: ApplicationProfile,
    device: DeviceSpec,
    power: PowerModel,
    backup_region: bool = True,
    latency_mode: LatencyMode = LatencyMode.PER_REGION,
) -> SimulationReport:
    items = flatten(profile)
    placement.validate(items, device, backup_region=backup_region)
    stable = edp_stable(placement, profile, device, latency_mode, items=items)
    marks = failure_schedule(stable.cycles, power.failure_count)

    if not backup_region:
        runs = len(marks) + 1
        return SimulationReport(
            total_energy_nj=stable.energy_nj * runs,
            total_cycles=stable.cycles * runs,
            nc_execute=stable.cycles * runs,
            nc_backup=0,
            nc_restore=0,
            eta=Fraction(1),
            progress=Fraction(1),
            edp_system=stable.edp * runs,
            failures_served=len(marks),
            completed=True,
            reexecutions=len(marks),
            execute_energy_nj=stable.energy_nj * runs,
        )

    volume = checkpoint_bytes(placement.sram_bytes(items), device)
    backup_e = exact(device.backup_energy_per_byte) * volume
    restore_e = exact(device.restore_energy_per_byte) * volume
    position = Fraction(0)
    executed = Fraction(0)
    nc_backup = nc_restore = 0
    energy_backup: Exact = 0
    energy_restore: Exact = 0
    for mark in marks:
        executed += mark - position
        position = mark
        nc_backup += volume * device.backup_cycles_per_byte
        energy_backup += backup_e
        # restore runs at power-on, before execution resumes from the mark
        nc_restore += volume * device.restore_cycles_per_byte
        energy_restore += restore_e
    executed += stable.cycles - position
    assert executed == stable.cycles

    if nc_backup + nc_restore == 0:
        ratio = Fraction(1)
        edp = stable.edp
    else:
        ratio = eta(stable.cycles, nc_backup, nc_restore)
        edp = scale_edp(stable.edp, ratio, power.edp_scaling)
    return SimulationReport(
        total_energy_nj=stable.energy_nj + energy_backup + energy_restore,
        total_cycles=stable.cycles + nc_backup + nc_restore,
        nc_execute=stable.cycles,
        nc_backup=nc_backup,
        nc_restore=nc_restore,
        eta=ratio,
        progress=ratio,
        edp_system=edp,
        failures_served=len(marks),
        completed=True,
        reexecutions=0,
        execute_energy_nj=stable.energy_nj,
        backup_energy_nj=energy_backup,
        restore_energy_nj=energy_restore,
        backup_bytes=volume,
        backup_region=True,
    )


def progress_of(report: SimulationReport) -> Fraction:
    """Useful share of the run; the progress function is taken as the identity on eta."""
    return report.eta
