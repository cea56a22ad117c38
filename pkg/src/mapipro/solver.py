"""EDP-optimal SRAM / non-volatile placement.

Each placement item is a binary choice between SRAM and one non-volatile
region. Items interact only through the capacity limits and through the
checkpoint volume, which grows with SRAM occupancy and stretches the run by
``P * (sram_bytes + registers) * (backup + restore cycles per byte)``. The
objective is the stable per-item EDP scaled by the resulting execute ratio,
which is not separable, so the branch-and-bound works directly on the
rational objective with bounds that are monotone in each aggregate.

All arithmetic inside the search is on integers: item energies are brought to
a common denominator once, and objectives are compared as exact fractions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .cost import (
    Exact,
    Placement,
    check_backup_fit,
    edp_system,
    item_cycles,
    item_energy,
)
from .errors import InfeasibleError, MapiproError, ProfileError
from .model import (
    SECTION_ORDER,
    ApplicationProfile,
    DeviceSpec,
    EdpScaling,
    LatencyMode,
    PowerModel,
    RegionId,
    SectionKind,
    _load_json,
    _Reader,
    bundled_device,
    flatten,
)

EXHAUSTIVE_MAX_ITEMS = 24


class Algorithm(str, Enum):
    BRANCH_AND_BOUND = "branch_and_bound"
    EXHAUSTIVE = "exhaustive"


class BaselineKind(str, Enum):
    FRAM_ONLY = "fram_only"
    SRAM_ONLY = "sram_only"
    SRAM_FLASH_ILP = "sram_flash_ilp"
    SRAM_FRAM_ILP_NO_BR = "sram_fram_ilp_no_br"


class OracleLimitError(MapiproError, ValueError):
    pass


@dataclass(frozen=True)
class SolveOptions:
    latency_mode: LatencyMode = LatencyMode.PER_REGION
    power: PowerModel = PowerModel()
    time_limit: float = 60.0
    algorithm: Algorithm = Algorithm.BRANCH_AND_BOUND
    # None defers to the device document
    backup_region: bool | None = None
    nv_region: RegionId | None = None

    def __post_init__(self):
        object.__setattr__(self, "latency_mode", LatencyMode(self.latency_mode))
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.nv_region is not None:
            object.__setattr__(self, "nv_region", RegionId(self.nv_region))
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")

    @property
    def edp_scaling(self) -> EdpScaling:
        return self.power.edp_scaling

    def uses_backup(self, device: DeviceSpec) -> bool:
        return device.backup_region if self.backup_region is None else self.backup_region

    def nv_for(self, device: DeviceSpec) -> RegionId:
        rid = self.nv_region or device.default_nv_region
        if rid not in (RegionId.FRAM_N, RegionId.FLASH) or not device.has(rid):
            raise ProfileError(f"device has no {rid.value} placement region")
        return rid

    def to_dict(self) -> dict:
        return {
            "latency_mode": self.latency_mode.value,
            "edp_scaling": self.edp_scaling.value,
            "failure_count": self.power.failure_count,
            "time_limit": self.time_limit,
            "algorithm": self.algorithm.value,
            "backup_region": self.backup_region,
            "nv_region": None if self.nv_region is None else self.nv_region.value,
        }


@dataclass(frozen=True)
class SolveResult:
    placement: Placement
    objective: Exact
    proven_optimal: bool
    nodes_explored: int
    device: DeviceSpec | None = None


def checkpoint_cycles(sram_bytes: int, device: DeviceSpec, power: PowerModel, backup_region: bool):
    """Backup and restore cycle totals for a run with the given SRAM occupancy."""
    if not backup_region:
        return 0, 0
    volume = power.failure_count * (sram_bytes + device.register_file_bytes)
    return volume * device.backup_cycles_per_byte, volume * device.restore_cycles_per_byte


def placement_objective(
    placement: Placement, profile: ApplicationProfile, device: DeviceSpec, options: SolveOptions
) -> Exact:
    """The solver objective, recomputed through the cost model."""
    items = flatten(profile)
    backup = options.uses_backup(device)
    placement.validate(items, device, backup_region=backup)
    nc_b, nc_r = checkpoint_cycles(placement.sram_bytes(items), device, options.power, backup)
    return edp_system(placement, profile, device, options.power, nc_b, nc_r, options.latency_mode)


class _Instance:
    """Integer-scaled per-item costs for one (profile, device, options) triple."""

    def __init__(self, profile: ApplicationProfile, device: DeviceSpec, options: SolveOptions):
        self.profile = profile
        self.device = device
        self.options = options
        self.items = flatten(profile)
        if not self.items:
            raise InfeasibleError("nothing to place")
        self.n = len(self.items)
        self.nv = options.nv_for(device)
        sram, nvreg = device.region(RegionId.SRAM), device.region(self.nv)
        mode = options.latency_mode

        energies_s = [item_energy(i, sram) for i in self.items]
        energies_n = [item_energy(i, nvreg) for i in self.items]
        self.c_s = [item_cycles(i, sram, mode) for i in self.items]
        self.c_n = [item_cycles(i, nvreg, mode) for i in self.items]
        edp_s = [e * c for e, c in zip(energies_s, self.c_s)]
        edp_n = [e * c for e, c in zip(energies_n, self.c_n)]
        self.scale = math.lcm(*(Fraction(v).denominator for v in edp_s + edp_n))
        self.a_s = [int(v * self.scale) for v in edp_s]
        self.a_n = [int(v * self.scale) for v in edp_n]
        self.sizes = [i.size_bytes for i in self.items]

        self.backup = options.uses_backup(device)
        self.cap_s = sram.capacity_bytes
        if self.backup:
            check_backup_fit(0, device)
            self.cap_s = min(self.cap_s, device.region(RegionId.FRAM_B).capacity_bytes - device.register_file_bytes)
        self.cap_n = nvreg.capacity_bytes
        power = options.power
        if self.backup:
            self.k = power.failure_count * (device.backup_cycles_per_byte + device.restore_cycles_per_byte)
            self.r = device.register_file_bytes
        else:
            self.k = 0
            self.r = 0
        self.literal = power.edp_scaling is EdpScaling.ETA_LITERAL

    def objective(self, a: int, c: int, s: int) -> Fraction | None:
        """Scaled objective for aggregate EDP ``a``, cycles ``c`` and SRAM bytes ``s``.

        None when checkpoints are taken but nothing executes: progress is
        undefined there, so such a placement is not a candidate.
        """
        extra = self.k * (s + self.r)
        if extra == 0:
            return Fraction(a)
        if c == 0:
            return None
        if self.literal:
            return Fraction(a * c, c + extra)
        return Fraction(a * (c + extra), c)

    def evaluate(self, nv_flags) -> tuple[Fraction, int, int] | None:
        """(objective, sram bytes, nv bytes) or None when a capacity is exceeded."""
        a = c = s = nbytes = 0
        for i, on_nv in enumerate(nv_flags):
            if on_nv:
                a += self.a_n[i]
                c += self.c_n[i]
                nbytes += self.sizes[i]
            else:
                a += self.a_s[i]
                c += self.c_s[i]
                s += self.sizes[i]
        if s > self.cap_s or nbytes > self.cap_n:
            return None
        value = self.objective(a, c, s)
        return None if value is None else (value, s, nbytes)

    def placement(self, nv_flags) -> Placement:
        return Placement(
            {it.id: (self.nv if f else RegionId.SRAM) for it, f in zip(self.items, nv_flags)}
        )

    def unscale(self, value: Fraction) -> Exact:
        out = Fraction(value) / self.scale
        return out.numerator if out.denominator == 1 else out

    def check_total_capacity(self):
        total = sum(self.sizes)
        if total > self.cap_s + self.cap_n:
            raise InfeasibleError(
                f"{self.profile.application} needs {total} B but only "
                f"{self.cap_s + self.cap_n} B of placement capacity exist"
            )


class _BranchAndBound:
    """Depth-first search over NV flags.

    With ``target`` set the search only looks for a placement of objective
    ``target`` under the ``forced`` flags and stops at the first one.
    """

    def __init__(self, inst: _Instance, deadline: float, forced: dict[int, bool] | None = None, target=None):
        self.inst = inst
        self.deadline = deadline
        self.forced = forced or {}
        self.target = target
        self.nodes = 0
        self.timed_out = False
        n = inst.n
        delta = [inst.a_n[i] - inst.a_s[i] for i in range(n)]
        self.order = sorted(range(n), key=lambda i: (-Fraction(abs(delta[i]), max(inst.sizes[i], 1)), i))
        self.pos = {item: p for p, item in enumerate(self.order)}

        suf = lambda f: _suffix([f(i) for i in self.order])  # noqa: E731
        self.suf_min_a = suf(lambda i: min(inst.a_s[i], inst.a_n[i]))
        self.suf_max_c = suf(lambda i: max(inst.c_s[i], inst.c_n[i]))
        self.suf_min_c = suf(lambda i: min(inst.c_s[i], inst.c_n[i]))
        self.suf_size = suf(lambda i: inst.sizes[i])

        # SRAM-preferring items by saving density, for the fractional-knapsack penalty
        pref = [i for i in range(n) if delta[i] > 0]
        self.pref = sorted(
            pref,
            key=lambda i: (0, -delta[i], i) if inst.sizes[i] == 0 else (1, -Fraction(delta[i], inst.sizes[i]), i),
        )
        self.delta = delta

        self.best: Fraction | None = target
        self.best_flags: list[bool] | None = None

    def _offer(self, flags):
        res = self.inst.evaluate(flags)
        if res is not None and (self.best is None or res[0] < self.best):
            self.best = res[0]
            self.best_flags = list(flags)

    def _seed(self):
        inst = self.inst
        flags = [False] * inst.n
        s = nb = 0
        for i in self.order:
            size = inst.sizes[i]
            want_sram = inst.a_s[i] <= inst.a_n[i]
            fits_s = s + size <= inst.cap_s
            fits_n = nb + size <= inst.cap_n
            if (want_sram and fits_s) or not fits_n:
                flags[i] = False
                s += size
            else:
                flags[i] = True
                nb += size
        self._offer(flags)
        self._offer([True] * inst.n)

    def _knapsack_penalty(self, depth: int, room: int) -> Fraction:
        """Least extra EDP forced on SRAM-preferring free items by the SRAM room left."""
        inst = self.inst
        penalty = Fraction(0)
        for i in self.pref:
            if self.pos[i] < depth:
                continue
            size = inst.sizes[i]
            if size <= room:
                room -= size
            else:
                penalty += Fraction(self.delta[i] * (size - room), size)
                room = 0
        return penalty

    def _bound(self, depth, a_fix, c_fix, s_fix, n_fix) -> Fraction:
        inst = self.inst
        a_lo = a_fix + self.suf_min_a[depth] + self._knapsack_penalty(depth, inst.cap_s - s_fix)
        if inst.k == 0:
            return a_lo
        if inst.literal:
            c_lo = c_fix + self.suf_min_c[depth]
            s_hi = s_fix + min(self.suf_size[depth], inst.cap_s - s_fix)
            denom = c_lo + inst.k * (s_hi + inst.r)
            return a_lo if denom == 0 else a_lo * c_lo / denom
        c_hi = c_fix + self.suf_max_c[depth]
        s_lo = s_fix + max(0, self.suf_size[depth] - (inst.cap_n - n_fix))
        if c_hi == 0:
            return a_lo
        return a_lo * (c_hi + inst.k * (s_lo + inst.r)) / c_hi

    def run(self):
        if self.target is None:
            self._seed()
        flags = [False] * self.inst.n
        self._dfs(0, 0, 0, 0, 0, flags)

    def _done(self) -> bool:
        return self.timed_out or (self.target is not None and self.best_flags is not None)

    def _dfs(self, depth, a_fix, c_fix, s_fix, n_fix, flags):
        inst = self.inst
        self.nodes += 1
        if self.nodes % 512 == 1 and time.monotonic() > self.deadline:
            self.timed_out = True
        if self._done():
            return
        if s_fix > inst.cap_s or n_fix > inst.cap_n:
            return
        if self.suf_size[depth] > (inst.cap_s - s_fix) + (inst.cap_n - n_fix):
            return
        if depth == inst.n:
            value = inst.objective(a_fix, c_fix, s_fix)
            if value is None:
                return
            if self.target is not None:
                if value == self.target:
                    self.best_flags = list(flags)
            elif self.best is None or value < self.best:
                self.best = value
                self.best_flags = list(flags)
            return
        if self.best is not None:
            bound = self._bound(depth, a_fix, c_fix, s_fix, n_fix)
            if bound > self.best or (bound == self.best and self.target is None):
                return
        i = self.order[depth]
        size = inst.sizes[i]
        if i in self.forced:
            branches = (self.forced[i],)
        elif inst.a_s[i] <= inst.a_n[i]:
            branches = (False, True)
        else:
            branches = (True, False)
        for on_nv in branches:
            flags[i] = on_nv
            if on_nv:
                self._dfs(depth + 1, a_fix + inst.a_n[i], c_fix + inst.c_n[i], s_fix, n_fix + size, flags)
            else:
                self._dfs(depth + 1, a_fix + inst.a_s[i], c_fix + inst.c_s[i], s_fix + size, n_fix, flags)
        flags[i] = False


def _suffix(values):
    out = [0] * (len(values) + 1)
    for k in range(len(values) - 1, -1, -1):
        out[k] = out[k + 1] + values[k]
    return out


def solve(profile: ApplicationProfile, device: DeviceSpec, options: SolveOptions = SolveOptions()) -> SolveResult:
    """Minimum-objective placement subject to exclusivity and every capacity limit.

    Raises :class:`InfeasibleError` when no placement fits. When the time
    limit expires the best placement found so far is returned with
    ``proven_optimal=False``.
    """
    if options.algorithm is Algorithm.EXHAUSTIVE:
        return exhaustive_oracle(profile, device, options)
    inst = _Instance(profile, device, options)
    inst.check_total_capacity()
    deadline = time.monotonic() + options.time_limit
    bnb = _BranchAndBound(inst, deadline)
    bnb.run()
    if bnb.best_flags is None:
        raise InfeasibleError(f"no placement of {profile.application} satisfies the capacity limits")
    flags, nodes = bnb.best_flags, bnb.nodes
    if not bnb.timed_out:
        flags, nodes = _smallest_optimal(inst, flags, bnb.best, deadline, nodes)
    return SolveResult(
        placement=inst.placement(flags),
        objective=inst.unscale(bnb.best),
        proven_optimal=not bnb.timed_out,
        nodes_explored=nodes,
        device=device,
    )


def _smallest_optimal(inst: _Instance, flags, value, deadline, nodes):
    """Among placements of objective ``value``, the one preferring SRAM item by item."""
    flags = list(flags)
    for j in range(inst.n):
        if not flags[j]:
            continue
        forced = {i: flags[i] for i in range(j)}
        forced[j] = False
        probe = _BranchAndBound(inst, deadline, forced, target=value)
        probe.run()
        nodes += probe.nodes
        if probe.timed_out:
            break
        if probe.best_flags is not None:
            flags = probe.best_flags
    return flags, nodes


def exhaustive_oracle(
    profile: ApplicationProfile, device: DeviceSpec, options: SolveOptions = SolveOptions()
) -> SolveResult:
    """Enumerate every assignment; ties go to the lexicographically smallest vector.

    Objectives are screened in float64 and every assignment within 1e-9
    relative of the running minimum is re-evaluated exactly, so the result is
    exact.
    """
    inst = _Instance(profile, device, options)
    n = inst.n
    if n > EXHAUSTIVE_MAX_ITEMS:
        raise OracleLimitError(f"{n} items exceed the exhaustive limit of {EXHAUSTIVE_MAX_ITEMS}")
    inst.check_total_capacity()

    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    sizes = np.array(inst.sizes, dtype=np.float64)
    a_s = np.array([float(v) for v in inst.a_s])
    d_a = np.array([float(n_ - s_) for n_, s_ in zip(inst.a_n, inst.a_s)])
    c_s = np.array(inst.c_s, dtype=np.float64)
    d_c = np.array([n_ - s_ for n_, s_ in zip(inst.c_n, inst.c_s)], dtype=np.float64)
    total_size = float(sizes.sum())

    best: Fraction | None = None
    best_mask = None
    best_float = math.inf
    chunk = 1 << min(n, 16)
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, start + chunk, dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(np.float64)
        a = a_s.sum() + bits @ d_a
        c = c_s.sum() + bits @ d_c
        nv_bytes = bits @ sizes
        s = total_size - nv_bytes
        feasible = (s <= inst.cap_s) & (nv_bytes <= inst.cap_n)
        extra = inst.k * (s + inst.r)
        with np.errstate(divide="ignore", invalid="ignore"):
            if inst.k == 0:
                f = a
            elif inst.literal:
                f = np.where(extra == 0, a, a * c / (c + extra))
            else:
                f = np.where(extra == 0, a, a * (c + extra) / c)
        undefined = (c == 0) & (extra > 0)
        f = np.where(feasible & ~undefined & ~np.isnan(f), f, np.inf)
        low = f.min()
        if not np.isfinite(low) or low > best_float * (1 + 1e-9):
            continue
        window = low + abs(low) * 1e-9
        for mask in masks[f <= window].tolist():
            flags = [bool((mask >> (n - 1 - i)) & 1) for i in range(n)]
            res = inst.evaluate(flags)
            if res is not None and (best is None or res[0] < best):
                best, best_mask = res[0], flags
        best_float = min(best_float, float(low))
    if best_mask is None:
        raise InfeasibleError(f"no placement of {profile.application} satisfies the capacity limits")
    return SolveResult(
        placement=inst.placement(best_mask),
        objective=inst.unscale(best),
        proven_optimal=True,
        nodes_explored=1 << n,
        device=device,
    )


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------


def _fixed(profile, device, options, region) -> SolveResult:
    placement = Placement.uniform(flatten(profile), region)
    try:
        objective = placement_objective(placement, profile, device, options)
    except MapiproError as exc:
        raise InfeasibleError(f"{profile.application}: {exc}") from exc
    return SolveResult(placement, objective, False, 0, device)


def flash_variant(device: DeviceSpec, flash_device: DeviceSpec | None = None) -> DeviceSpec:
    """The SRAM + Flash device to compare against ``device``."""
    if device.has(RegionId.FLASH):
        return device
    return flash_device if flash_device is not None else bundled_device("msp430f5529")


def baseline_placement(
    kind: BaselineKind | str,
    profile: ApplicationProfile,
    device: DeviceSpec,
    options: SolveOptions = SolveOptions(),
    flash_device: DeviceSpec | None = None,
) -> SolveResult:
    kind = BaselineKind(kind)
    if kind is BaselineKind.FRAM_ONLY:
        return _fixed(profile, device, options, options.nv_for(device))
    if kind is BaselineKind.SRAM_ONLY:
        total = profile.total_bytes
        cap = device.sram.capacity_bytes
        if total > cap:
            raise InfeasibleError(
                f"{profile.application} needs {total} B and will not run from {cap} B of SRAM alone"
            )
        return _fixed(profile, device, options, RegionId.SRAM)
    if kind is BaselineKind.SRAM_FLASH_ILP:
        flash = flash_variant(device, flash_device)
        return solve(profile, flash, replace(options, nv_region=RegionId.FLASH))
    return solve(profile, device, replace(options, backup_region=False, nv_region=RegionId.FRAM_N))


# ---------------------------------------------------------------------------
# Empirical eight-configuration method
# ---------------------------------------------------------------------------

CONFIGS = tuple(a + b + c for a in "SF" for b in "SF" for c in "SF")  # text, data, stack


@dataclass(frozen=True)
class EnergyRow:
    config: str
    stable: float
    unstable: float


@dataclass(frozen=True)
class EmpiricalChoice:
    config: str
    energy: float
    scenario: str


def _config_key(config: str):
    return (-config.count("S"), config.replace("S", "0").replace("F", "1"))


def check_energy_table(rows: Iterable[EnergyRow]) -> dict[str, EnergyRow]:
    table = {}
    for row in rows:
        if row.config not in CONFIGS:
            raise ProfileError(f"unknown configuration {row.config!r}", "rows")
        if row.config in table:
            raise ProfileError(f"configuration {row.config} listed twice", "rows")
        table[row.config] = row
    missing = [c for c in CONFIGS if c not in table]
    if missing:
        raise ProfileError(f"missing configuration row {{{missing[0]}}}", "rows")
    return table


def empirical_baseline(energy_table: Iterable[EnergyRow] | Mapping[str, EnergyRow], scenario: str) -> EmpiricalChoice:
    """Pick the cheapest of the eight {S,F}^3 (text, data, stack) configurations.

    Ties prefer more SRAM letters, then lexicographic order with S before F.
    Infinite energies mark configurations that do not fit.
    """
    rows = energy_table.values() if isinstance(energy_table, Mapping) else energy_table
    table = check_energy_table(rows)
    if scenario not in ("stable", "unstable"):
        raise ValueError(f"unknown scenario {scenario!r}")
    best = min(CONFIGS, key=lambda c: (getattr(table[c], scenario), _config_key(c)))
    energy = getattr(table[best], scenario)
    if not math.isfinite(energy):
        raise InfeasibleError("no configuration of the empirical table fits the device")
    return EmpiricalChoice(best, energy, scenario)


def parse_energy_table(text: str | bytes) -> list[EnergyRow]:
    """Read ``{"rows": [{"config": "SFS", "stable": .., "unstable": ..}, ...]}``."""
    doc = _Reader(_load_json(text)).obj()
    rows = []
    for r in doc.items("rows"):
        config = r.get("config", kind=str).strip("{} ").upper()
        stable = r.get("stable", kind=(int, float))
        unstable = r.get("unstable", kind=(int, float))
        rows.append(EnergyRow(config, stable, unstable))
    check_energy_table(rows)
    return rows


def config_placement(config: str, profile: ApplicationProfile, nv_region: RegionId = RegionId.FRAM_N) -> Placement:
    """Every function's sections follow the letters; globals follow the data letter."""
    if config not in CONFIGS:
        raise ValueError(f"unknown configuration {config!r}")
    region = {"S": RegionId.SRAM, "F": nv_region}
    by_kind = dict(zip(SECTION_ORDER, config))
    assignment = {}
    for item in flatten(profile):
        letter = by_kind[item.kind] if item.kind is not None else by_kind[SectionKind.DATA]
        assignment[item.id] = region[letter]
    return Placement(assignment)


def synthesize_energy_table(
    profile: ApplicationProfile, device: DeviceSpec, options: SolveOptions = SolveOptions()
) -> list[EnergyRow]:
    """Model-derived stand-in for the measured table: energies in nJ.

    The unstable column checkpoints SRAM on every failure; a configuration that
    overflows a region or the backup area gets an infinite energy.
    """
    from .simulator import simulate

    nv = options.nv_for(device)
    rows = []
    for config in CONFIGS:
        placement = config_placement(config, profile, nv)
        try:
            stable = simulate(placement, profile, device, replace(options.power, failure_count=0),
                              backup_region=False, latency_mode=options.latency_mode)
            unstable = simulate(placement, profile, device, options.power,
                                backup_region=True, latency_mode=options.latency_mode)
            rows.append(EnergyRow(config, float(stable.total_energy_nj), float(unstable.total_energy_nj)))
        except MapiproError:
            rows.append(EnergyRow(config, math.inf, math.inf))
    return rows


def empirical_placement(
    profile: ApplicationProfile,
    device: DeviceSpec,
    options: SolveOptions = SolveOptions(),
    energy_table: Iterable[EnergyRow] | None = None,
    scenario: str | None = None,
) -> tuple[EmpiricalChoice, SolveResult]:
    if scenario is None:
        scenario = "unstable" if options.power.failure_count > 0 else "stable"
    table = energy_table if energy_table is not None else synthesize_energy_table(profile, device, options)
    choice = empirical_baseline(table, scenario)
    placement = config_placement(choice.config, profile, options.nv_for(device))
    try:
        objective = placement_objective(placement, profile, device, options)
    except MapiproError as exc:
        raise InfeasibleError(f"configuration {{{choice.config}}} does not fit: {exc}") from exc
    return choice, SolveResult(placement, objective, False, 0, device)
