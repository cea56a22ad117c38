"""Render a placement as CCS linker-command lines and source directives.

Two artifacts come out of a placement: a linker fragment (``.cmd``) holding
the stack, text and data-segment directives, and a header of
``DATA_SECTION`` pragmas and ``ramfunc`` markers to include from the sources.
Output is a pure function of its inputs with ``\\n`` line endings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .cost import Placement
from .model import ApplicationProfile, RegionId, SectionKind, section_item_id

_LINKER_NAME = {RegionId.SRAM: "RAM", RegionId.FRAM_N: "FRAM", RegionId.FLASH: "FLASH"}
_SEGMENT = {
    RegionId.FRAM_N: ("NEW_DATASECTION", ".Localvars"),
    RegionId.SRAM: ("NEW_DATASECTION_RAM", ".LocalvarsRam"),
    RegionId.FLASH: ("NEW_DATASECTION_FLASH", ".LocalvarsFlash"),
}
_SEGMENT_ORDER = (RegionId.FRAM_N, RegionId.SRAM, RegionId.FLASH)

TEXT_BLOCK = (
    "#ifndef __LARGE_CODE_MODEL__",
    ".text : {} > FRAM",
    "#else",
    ".text : {} >> SRAM",
)


@dataclass(frozen=True)
class DataSegment:
    block: str
    segment: str
    region: RegionId
    members: tuple[str, ...]


@dataclass(frozen=True)
class LinkerFragment:
    application: str
    stack_directive: str | None
    stack_overrides: tuple[tuple[str, RegionId], ...] = ()
    text_directive_block: tuple[str, ...] = ()
    data_section_blocks: tuple[DataSegment, ...] = ()
    ramfunc_attributes: tuple[str, ...] = ()
    stack_owner: str | None = None

    def cmd_text(self) -> str:
        lines = [f"/* mapipro placement for {self.application} */"]
        if self.stack_directive is not None:
            lines.append(self.stack_directive)
        for func, region in self.stack_overrides:
            lines.append(
                f"/* WARNING: stack of {func} goes to {_LINKER_NAME[region]}, "
                f"unlike {self.stack_owner}; emitted as its own segment */"
            )
            lines.append(f".stack_{func} : {{}} > {_LINKER_NAME[region]}")
        if self.text_directive_block:
            lines.extend(self.text_directive_block)
            lines.append("#endif")
        for seg in self.data_section_blocks:
            lines.append(f"{seg.block} : {{}} > {_LINKER_NAME[seg.region]}")
            lines.append(f"{seg.segment} : {{}} > {seg.block}")
        return "\n".join(lines) + "\n"

    def pragmas_text(self) -> str:
        lines = [f"/* mapipro section directives for {self.application} */"]
        for seg in self.data_section_blocks:
            for member in seg.members:
                lines.append(f"#pragma DATA_SECTION ( {member}, {seg.segment})")
        for func in self.ramfunc_attributes:
            lines.append(f"#define MAPIPRO_RAMFUNC_{func} __attribute__((ramfunc))")
        return "\n".join(lines) + "\n"

    def render(self) -> str:
        return self.cmd_text() + "\n" + self.pragmas_text()

    def write(self, directory: str | Path) -> tuple[Path, Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        cmd = directory / f"{self.application}.mapipro.cmd"
        hdr = directory / f"{self.application}.mapipro.pragmas.h"
        cmd.write_bytes(self.cmd_text().encode("utf-8"))
        hdr.write_bytes(self.pragmas_text().encode("utf-8"))
        return cmd, hdr


def stack_directive(region: RegionId) -> str:
    if region is RegionId.SRAM:
        return ".stack : {} > RAM (HIGH)"
    return f".stack : {{}} > {_LINKER_NAME[region]}"


def emit_linker(placement: Placement, profile: ApplicationProfile) -> LinkerFragment:
    """Build the fragment; the global ``.stack`` follows ``main`` (else the first function)."""
    funcs = profile.functions
    stack_line = None
    overrides = []
    owner = None
    if funcs:
        owner = "main" if any(f.name == "main" for f in funcs) else funcs[0].name
        owner_region = placement[section_item_id(owner, SectionKind.STACK)]
        stack_line = stack_directive(owner_region)
        for f in funcs:
            region = placement[section_item_id(f.name, SectionKind.STACK)]
            if region is not owner_region:
                overrides.append((f.name, region))

    members: dict[RegionId, list[str]] = {}
    for g in profile.globals:
        members.setdefault(placement[g.name], []).append(g.name)
    for f in funcs:
        members.setdefault(placement[section_item_id(f.name, SectionKind.DATA)], []).append(f.name)
    segments = tuple(
        DataSegment(*_SEGMENT[r], r, tuple(members[r])) for r in _SEGMENT_ORDER if r in members
    )
    ramfuncs = tuple(
        f.name for f in funcs if placement[section_item_id(f.name, SectionKind.TEXT)] is RegionId.SRAM
    )
    return LinkerFragment(
        application=profile.application,
        stack_directive=stack_line,
        stack_overrides=tuple(overrides),
        text_directive_block=TEXT_BLOCK if funcs else (),
        data_section_blocks=segments,
        ramfunc_attributes=ramfuncs,
        stack_owner=owner,
    )


# ---------------------------------------------------------------------------
# Per-function placement table
# ---------------------------------------------------------------------------

_TABLE_NAME = {RegionId.SRAM: "SRAM", RegionId.FRAM_N: "FRAM", RegionId.FLASH: "Flash"}
_TABLE_REGION = {v.upper(): k for k, v in _TABLE_NAME.items()}
_TABLE_COLUMNS = (SectionKind.STACK, SectionKind.TEXT, SectionKind.DATA)


def emit_placement_table(placement: Placement) -> str:
    """One ``name | stack | text | data`` row per function, in placement order."""
    functions: list[str] = []
    for item_id in placement.assignment:
        if "." in item_id:
            func = item_id.rsplit(".", 1)[0]
            if func not in functions:
                functions.append(func)
    lines = ["Function | Stack | Text | Data"]
    for func in functions:
        cells = [_TABLE_NAME[placement[section_item_id(func, k)]] for k in _TABLE_COLUMNS]
        lines.append(" | ".join([func, *cells]))
    return "\n".join(lines) + "\n"


_ROW_RE = re.compile(r"^\s*([^|]+?)\s*\|\s*(\S+)\s*\|\s*(\S+)\s*\|\s*(\S+)\s*$")


def parse_placement_table(text: str) -> dict[str, RegionId]:
    """Inverse of :func:`emit_placement_table`: section item id to region."""
    out = {}
    lines = [ln for ln in text.splitlines() if ln.strip()]
    for ln in lines[1:]:
        m = _ROW_RE.match(ln)
        if not m:
            raise ValueError(f"malformed table row: {ln!r}")
        func, *cells = m.groups()
        for kind, cell in zip(_TABLE_COLUMNS, cells):
            out[section_item_id(func, kind)] = _TABLE_REGION[cell.upper()]
    return out

