"""Application, device and power data model.

Holds the immutable value types consumed by every other layer, the JSON
readers and writers for the three input documents, and :func:`flatten`, which
turns a profile into the uniform list of binary placement decisions.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Mapping

from .errors import ProfileError

U64_MAX = 2**64 - 1
DEFAULT_REGISTER_FILE_BYTES = 64

_SYMBOL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_APP_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")


class SectionKind(str, Enum):
    TEXT = "text"
    DATA = "data"
    STACK = "stack"


SECTION_ORDER = (SectionKind.TEXT, SectionKind.DATA, SectionKind.STACK)


class RegionId(str, Enum):
    SRAM = "SRAM"
    FRAM_N = "FRAM_N"
    FRAM_B = "FRAM_B"
    FLASH = "FLASH"


# Tie-break rank used wherever assignments are compared lexicographically.
REGION_RANK = {RegionId.SRAM: 0, RegionId.FRAM_N: 1, RegionId.FLASH: 2}
NV_PLACEMENT_REGIONS = (RegionId.FRAM_N, RegionId.FLASH)


class Spacing(str, Enum):
    EVENLY_SPACED = "evenly_spaced"


class EdpScaling(str, Enum):
    ETA_LITERAL = "eta_literal"
    INVERSE_ETA = "inverse_eta"


class LatencyMode(str, Enum):
    FIXED = "fixed"
    PER_REGION = "per_region"


# ---------------------------------------------------------------------------
# Application profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalVariable:
    name: str
    size_bytes: int
    reads: int = 0
    writes: int = 0
    base_cycles: int = 0

    def __post_init__(self):
        _check_symbol(self.name, "name")
        _check_count(self.size_bytes, "size_bytes", minimum=1)
        _check_count(self.reads, "reads")
        _check_count(self.writes, "writes")
        _check_count(self.base_cycles, "base_cycles")


@dataclass(frozen=True)
class SectionProfile:
    kind: SectionKind
    size_bytes: int = 0
    reads: int = 0
    writes: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", SectionKind(self.kind))
        _check_count(self.size_bytes, "size_bytes")
        _check_count(self.reads, "reads")
        _check_count(self.writes, "writes")


@dataclass(frozen=True)
class FunctionProfile:
    name: str
    call_count: int
    base_cycles: int
    sections: tuple[SectionProfile, ...]

    def __post_init__(self):
        _check_symbol(self.name, "name")
        _check_count(self.call_count, "call_count", minimum=1)
        _check_count(self.base_cycles, "base_cycles")
        by_kind = {}
        for sec in self.sections:
            if sec.kind in by_kind:
                raise ProfileError(f"section {sec.kind.value!r} given twice", "sections")
            by_kind[sec.kind] = sec
        for kind in SECTION_ORDER:
            if kind not in by_kind:
                raise ProfileError(f"missing section {kind.value!r}", "sections")
        # canonical order keeps equality independent of declaration order
        object.__setattr__(self, "sections", tuple(by_kind[k] for k in SECTION_ORDER))

    def section(self, kind: SectionKind | str) -> SectionProfile:
        return self.sections[SECTION_ORDER.index(SectionKind(kind))]

    @property
    def size_bytes(self) -> int:
        return sum(s.size_bytes for s in self.sections)


@dataclass(frozen=True)
class ApplicationProfile:
    """A program as seen by the placer: its globals and per-function sections.

    A profile with no functions is constructible (the linker emitter handles
    globals-only programs) but :func:`parse_profile` rejects it.
    """

    application: str
    globals: tuple[GlobalVariable, ...] = ()
    functions: tuple[FunctionProfile, ...] = ()

    def __post_init__(self):
        if not isinstance(self.application, str) or not _APP_RE.match(self.application):
            raise ProfileError(f"invalid application name {self.application!r}", "application")
        object.__setattr__(self, "globals", tuple(self.globals))
        object.__setattr__(self, "functions", tuple(self.functions))
        seen = set()
        for sym in [g.name for g in self.globals] + [f.name for f in self.functions]:
            if sym in seen:
                raise ProfileError(f"duplicate name {sym!r}")
            seen.add(sym)

    @property
    def total_bytes(self) -> int:
        return sum(g.size_bytes for g in self.globals) + sum(f.size_bytes for f in self.functions)

    def function(self, name: str) -> FunctionProfile:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)


# ---------------------------------------------------------------------------
# Device
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MemoryRegion:
    id: RegionId
    capacity_bytes: int
    read_energy: float
    write_energy: float
    cycles_per_access: int = 1

    def __post_init__(self):
        object.__setattr__(self, "id", RegionId(self.id))
        _check_count(self.capacity_bytes, "capacity_bytes")
        _check_energy(self.read_energy, "read_energy_nj")
        _check_energy(self.write_energy, "write_energy_nj")
        _check_count(self.cycles_per_access, "cycles_per_access", minimum=1)

    @property
    def is_placement_target(self) -> bool:
        return self.id is not RegionId.FRAM_B


@dataclass(frozen=True)
class DeviceSpec:
    """Memory map and checkpoint costs of one microcontroller.

    ``backup_region`` says whether the reserved ``FRAM_B`` area is used for
    checkpoints by default; it defaults to whether such a region is declared.
    While enabled, ``FRAM_B`` must be able to hold all of SRAM plus the
    register file.
    """

    regions: tuple[MemoryRegion, ...]
    register_file_bytes: int = DEFAULT_REGISTER_FILE_BYTES
    backup_energy_per_byte: float = 0.0
    backup_cycles_per_byte: int = 0
    restore_energy_per_byte: float = 0.0
    restore_cycles_per_byte: int = 0
    backup_region: bool | None = None
    name: str | None = None

    def __post_init__(self):
        regions = tuple(self.regions)
        object.__setattr__(self, "regions", regions)
        ids = [r.id for r in regions]
        if len(set(ids)) != len(ids):
            raise ProfileError("region declared twice", "regions")
        if RegionId.SRAM not in ids:
            raise ProfileError("device has no SRAM region", "regions")
        if not any(i in ids for i in NV_PLACEMENT_REGIONS):
            raise ProfileError("device has no non-volatile placement region", "regions")
        _check_count(self.register_file_bytes, "register_file_bytes")
        _check_energy(self.backup_energy_per_byte, "backup_energy_per_byte_nj")
        _check_count(self.backup_cycles_per_byte, "backup_cycles_per_byte")
        _check_energy(self.restore_energy_per_byte, "restore_energy_per_byte_nj")
        _check_count(self.restore_cycles_per_byte, "restore_cycles_per_byte")
        if self.backup_region is None:
            object.__setattr__(self, "backup_region", RegionId.FRAM_B in ids)
        if self.backup_region:
            if RegionId.FRAM_B not in ids:
                raise ProfileError("backup region enabled but no FRAM_B declared", "backup_region")
            need = self.region(RegionId.SRAM).capacity_bytes + self.register_file_bytes
            have = self.region(RegionId.FRAM_B).capacity_bytes
            if have < need:
                raise ProfileError(
                    f"FRAM_B holds {have} B but SRAM + registers need {need} B",
                    "regions",
                )

    def region(self, rid: RegionId | str) -> MemoryRegion:
        rid = RegionId(rid)
        for r in self.regions:
            if r.id is rid:
                return r
        raise KeyError(rid.value)

    def has(self, rid: RegionId | str) -> bool:
        return any(r.id is RegionId(rid) for r in self.regions)

    @property
    def sram(self) -> MemoryRegion:
        return self.region(RegionId.SRAM)

    @property
    def default_nv_region(self) -> RegionId:
        for rid in NV_PLACEMENT_REGIONS:
            if self.has(rid):
                return rid
        raise KeyError("no non-volatile placement region")  # unreachable after validation


@dataclass(frozen=True)
class PowerModel:
    failure_count: int = 0
    spacing: Spacing = Spacing.EVENLY_SPACED
    edp_scaling: EdpScaling = EdpScaling.INVERSE_ETA

    def __post_init__(self):
        object.__setattr__(self, "spacing", Spacing(self.spacing))
        object.__setattr__(self, "edp_scaling", EdpScaling(self.edp_scaling))
        _check_count(self.failure_count, "failure_count")


# ---------------------------------------------------------------------------
# Placement items
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlacementItem:
    """One binary region decision: a global or one section of one function."""

    id: str
    size_bytes: int
    reads: int
    writes: int
    weight: int
    base_cycles: int
    function: str | None = None
    kind: SectionKind | None = None

    @property
    def is_global(self) -> bool:
        return self.function is None

    @property
    def origin(self) -> str:
        return "global" if self.kind is None else self.kind.value

    @property
    def accesses(self) -> int:
        return self.reads + self.writes


def section_item_id(function: str, kind: SectionKind | str) -> str:
    return f"{function}.{SectionKind(kind).value}"


def flatten(profile: ApplicationProfile) -> list[PlacementItem]:
    """Globals in declaration order, then each function's text, data, stack.

    Every section inherits the function's call count as its weight and the
    function's cycle count as its base cycles.
    """
    items = [
        PlacementItem(g.name, g.size_bytes, g.reads, g.writes, 1, g.base_cycles)
        for g in profile.globals
    ]
    for fn in profile.functions:
        for sec in fn.sections:
            items.append(
                PlacementItem(
                    section_item_id(fn.name, sec.kind),
                    sec.size_bytes,
                    sec.reads,
                    sec.writes,
                    fn.call_count,
                    fn.base_cycles,
                    function=fn.name,
                    kind=sec.kind,
                )
            )
    return items


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------


def _check_symbol(value, path):
    if not isinstance(value, str) or not _SYMBOL_RE.match(value):
        raise ProfileError(f"invalid identifier {value!r}", path)


def _check_count(value, path, minimum=0):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProfileError(f"expected an integer, got {value!r}", path)
    if value < minimum:
        if value < 0:
            raise ProfileError(f"negative count {value}", path)
        raise ProfileError(f"must be >= {minimum}, got {value}", path)
    if value > U64_MAX:
        raise ProfileError(f"{value} exceeds the 64-bit count range", path)


def _check_energy(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProfileError(f"expected a number, got {value!r}", path)
    if not math.isfinite(value) or value < 0:
        raise ProfileError(f"energy must be finite and non-negative, got {value!r}", path)


class _Reader:
    """Walks a decoded JSON document while tracking the field path for errors."""

    def __init__(self, data, path=""):
        self.data = data
        self.path = path

    def _sub(self, key):
        if isinstance(key, int):
            return f"{self.path}[{key}]"
        return f"{self.path}.{key}" if self.path else key

    def obj(self):
        if not isinstance(self.data, dict):
            raise ProfileError("expected an object", self.path)
        return self

    def get(self, key, default=..., kind=None):
        self.obj()
        if key not in self.data:
            if default is ...:
                raise ProfileError("missing field", self._sub(key))
            return default
        value = self.data[key]
        if kind is not None and ((isinstance(value, bool) and kind is not bool) or not isinstance(value, kind)):
            raise ProfileError(f"expected {_kind_name(kind)}, got {value!r}", self._sub(key))
        return value

    def child(self, key):
        return _Reader(self.get(key), self._sub(key))

    def items(self, key, default=...):
        value = self.get(key, default)
        if not isinstance(value, list):
            raise ProfileError("expected an array", self._sub(key))
        return [_Reader(v, self._sub(key) + f"[{i}]").obj() for i, v in enumerate(value)]


def _kind_name(kind):
    if kind is int:
        return "an integer"
    if kind is str:
        return "a string"
    if kind is bool:
        return "a boolean"
    return "a number"


def _load_json(text: str | bytes):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileError(f"syntax error: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc


def _build(ctor, reader, *args, **kwargs):
    """Run a constructor, prefixing any field path in its error with the reader's path."""
    try:
        return ctor(*args, **kwargs)
    except ProfileError as exc:
        path = ".".join(p for p in (reader.path, exc.path) if p)
        raise ProfileError(exc.message, path, exc.line) from exc


# ---------------------------------------------------------------------------
# Profile document
# ---------------------------------------------------------------------------


def parse_profile(text: str | bytes) -> ApplicationProfile:
    doc = _Reader(_load_json(text)).obj()
    application = doc.get("application", kind=str)
    globals_ = []
    for g in doc.items("globals", []):
        globals_.append(
            _build(
                GlobalVariable,
                g,
                g.get("name", kind=str),
                g.get("size_bytes", kind=int),
                g.get("reads", kind=int),
                g.get("writes", kind=int),
                g.get("base_cycles", kind=int),
            )
        )
    functions = []
    for f in doc.items("functions"):
        secs_reader = f.child("sections").obj()
        extra = set(secs_reader.data) - {k.value for k in SectionKind}
        if extra:
            raise ProfileError(f"unknown section kind {sorted(extra)[0]!r}", secs_reader.path)
        sections = []
        for kind in SECTION_ORDER:
            if kind.value not in secs_reader.data:
                raise ProfileError(f"missing section {kind.value!r}", secs_reader.path)
            s = secs_reader.child(kind.value).obj()
            sections.append(
                _build(
                    SectionProfile,
                    s,
                    kind,
                    s.get("size_bytes", kind=int),
                    s.get("reads", kind=int),
                    s.get("writes", kind=int),
                )
            )
        functions.append(
            _build(
                FunctionProfile,
                f,
                f.get("name", kind=str),
                f.get("call_count", kind=int),
                f.get("base_cycles", kind=int),
                tuple(sections),
            )
        )
    if not functions:
        raise ProfileError("a profile needs at least one function", "functions")
    return _build(ApplicationProfile, doc, application, tuple(globals_), tuple(functions))


def profile_to_dict(profile: ApplicationProfile) -> dict[str, Any]:
    return {
        "application": profile.application,
        "globals": [
            {
                "name": g.name,
                "size_bytes": g.size_bytes,
                "reads": g.reads,
                "writes": g.writes,
                "base_cycles": g.base_cycles,
            }
            for g in profile.globals
        ],
        "functions": [
            {
                "name": f.name,
                "call_count": f.call_count,
                "base_cycles": f.base_cycles,
                "sections": {
                    s.kind.value: {"size_bytes": s.size_bytes, "reads": s.reads, "writes": s.writes}
                    for s in f.sections
                },
            }
            for f in profile.functions
        ],
    }


def dump_profile(profile: ApplicationProfile) -> str:
    return json.dumps(profile_to_dict(profile), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Device document
# ---------------------------------------------------------------------------


def parse_device_spec(text: str | bytes) -> DeviceSpec:
    doc = _Reader(_load_json(text)).obj()
    regions = []
    for r in doc.items("regions"):
        rid = r.get("id", kind=str)
        try:
            rid = RegionId(rid)
        except ValueError:
            raise ProfileError(f"unknown region id {rid!r}", r.path + ".id") from None
        regions.append(
            _build(
                MemoryRegion,
                r,
                rid,
                r.get("capacity_bytes", kind=int),
                r.get("read_energy_nj", kind=(int, float)),
                r.get("write_energy_nj", kind=(int, float)),
                r.get("cycles_per_access", kind=int),
            )
        )
    return _build(
        DeviceSpec,
        doc,
        tuple(regions),
        register_file_bytes=doc.get("register_file_bytes", DEFAULT_REGISTER_FILE_BYTES, kind=int),
        backup_energy_per_byte=doc.get("backup_energy_per_byte_nj", kind=(int, float)),
        backup_cycles_per_byte=doc.get("backup_cycles_per_byte", kind=int),
        restore_energy_per_byte=doc.get("restore_energy_per_byte_nj", kind=(int, float)),
        restore_cycles_per_byte=doc.get("restore_cycles_per_byte", kind=int),
        backup_region=doc.get("backup_region", None, kind=bool),
        name=doc.get("device", None, kind=str),
    )


def device_to_dict(device: DeviceSpec) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if device.name is not None:
        out["device"] = device.name
    out["regions"] = [
        {
            "id": r.id.value,
            "capacity_bytes": r.capacity_bytes,
            "read_energy_nj": r.read_energy,
            "write_energy_nj": r.write_energy,
            "cycles_per_access": r.cycles_per_access,
        }
        for r in device.regions
    ]
    out.update(
        register_file_bytes=device.register_file_bytes,
        backup_energy_per_byte_nj=device.backup_energy_per_byte,
        backup_cycles_per_byte=device.backup_cycles_per_byte,
        restore_energy_per_byte_nj=device.restore_energy_per_byte,
        restore_cycles_per_byte=device.restore_cycles_per_byte,
        backup_region=device.backup_region,
    )
    return out


def dump_device_spec(device: DeviceSpec) -> str:
    return json.dumps(device_to_dict(device), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Power document
# ---------------------------------------------------------------------------


def parse_power(text: str | bytes) -> PowerModel:
    doc = _Reader(_load_json(text)).obj()
    spacing = doc.get("spacing", Spacing.EVENLY_SPACED.value, kind=str)
    scaling = doc.get("edp_scaling", EdpScaling.INVERSE_ETA.value, kind=str)
    try:
        spacing = Spacing(spacing)
    except ValueError:
        raise ProfileError(f"unknown spacing {spacing!r}", "spacing") from None
    try:
        scaling = EdpScaling(scaling)
    except ValueError:
        raise ProfileError(f"unknown edp_scaling {scaling!r}", "edp_scaling") from None
    return _build(PowerModel, doc, doc.get("failure_count", kind=int), spacing, scaling)


def power_to_dict(power: PowerModel) -> dict[str, Any]:
    return {
        "failure_count": power.failure_count,
        "spacing": power.spacing.value,
        "edp_scaling": power.edp_scaling.value,
    }


def dump_power(power: PowerModel) -> str:
    return json.dumps(power_to_dict(power), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Bundled documents
# ---------------------------------------------------------------------------


def _data_text(*parts: str) -> str:
    from importlib.resources import files

    return files("mapipro").joinpath("data", *parts).read_text(encoding="utf-8")


def bundled_device(name: str) -> DeviceSpec:
    """Load a shipped device document, e.g. ``"msp430fr6989"``."""
    return parse_device_spec(_data_text("devices", f"{name}.json"))


def bundled_profile(name: str) -> ApplicationProfile:
    return parse_profile(_data_text("profiles", f"{name}.json"))


def bundled_profile_names() -> list[str]:
    from importlib.resources import files

    root = files("mapipro").joinpath("data", "profiles")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_text(*parts: str) -> str:
    return _data_text(*parts)


def sum_sizes(items: Iterable[PlacementItem]) -> int:
    return sum(i.size_bytes for i in items)


def index_items(items: Iterable[PlacementItem]) -> Mapping[str, PlacementItem]:
    return {i.id: i for i in items}


__all__ = [
    "ApplicationProfile",
    "DeviceSpec",
    "EdpScaling",
    "FunctionProfile",
    "GlobalVariable",
    "LatencyMode",
    "MemoryRegion",
    "PlacementItem",
    "PowerModel",
    "RegionId",
    "SectionKind",
    "SectionProfile",
    "Spacing",
    "flatten",
    "parse_device_spec",
    "parse_power",
    "parse_profile",
]
