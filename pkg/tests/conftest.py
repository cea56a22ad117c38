from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from mapipro.model import (
    ApplicationProfile,
    DeviceSpec,
    FunctionProfile,
    GlobalVariable,
    MemoryRegion,
    RegionId,
    SectionKind,
    SectionProfile,
    bundled_device,
)

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fr6989():
    return bundled_device("msp430fr6989")


@pytest.fixture(scope="session")
def f5529():
    return bundled_device("msp430f5529")


def toy_device(sram=2048, nv=124928, backup=None, regs=64, fram_b=3072, bc=2, rc=2, be=9312.5, re=7962.5):
    """FR6989-like device with adjustable capacities."""
    regions = [
        MemoryRegion(RegionId.SRAM, sram, 5500, 5600, 1),
        MemoryRegion(RegionId.FRAM_N, nv, 10325, 13125, 2),
    ]
    if fram_b is not None:
        regions.append(MemoryRegion(RegionId.FRAM_B, fram_b, 10325, 13125, 2))
    return DeviceSpec(
        tuple(regions),
        register_file_bytes=regs,
        backup_energy_per_byte=be,
        backup_cycles_per_byte=bc,
        restore_energy_per_byte=re,
        restore_cycles_per_byte=rc,
        backup_region=backup,
        name="toy",
    )


def function(name, sizes=(64, 16, 32), accesses=((100, 0), (10, 5), (20, 20)), calls=1, cycles=1000):
    sections = tuple(
        SectionProfile(kind, size, r, w) for kind, size, (r, w) in zip(SectionKind, sizes, accesses)
    )
    return FunctionProfile(name, calls, cycles, sections)


def app(name="toy", globals_=(), functions=()):
    return ApplicationProfile(name, tuple(globals_), tuple(functions))


def random_app(seed: int, n_globals=2, n_funcs=2, max_size=1024) -> ApplicationProfile:
    rng = random.Random(seed)
    gs = [
        GlobalVariable(f"g{i}", rng.randint(1, max_size), rng.randint(0, 5000), rng.randint(0, 5000), rng.randint(100, 10**5))
        for i in range(n_globals)
    ]
    fs = [
        function(
            f"f{i}",
            tuple(rng.randint(1, max_size) for _ in range(3)),
            tuple((rng.randint(0, 5000), rng.randint(0, 5000)) for _ in range(3)),
            rng.randint(1, 10),
            rng.randint(100, 10**5),
        )
        for i in range(n_funcs)
    ]
    return app(f"rand{seed}", gs, fs)


names = st.from_regex(r"[a-z][a-z0-9_]{0,6}", fullmatch=True)
counts = st.integers(0, 10**5)


@st.composite
def profiles(draw, max_globals=3, max_funcs=3, max_size=2048):
    n_g = draw(st.integers(0, max_globals))
    n_f = draw(st.integers(1, max_funcs))
    syms = draw(st.lists(names, min_size=n_g + n_f, max_size=n_g + n_f, unique=True))
    gs = [
        GlobalVariable(syms[i], draw(st.integers(1, max_size)), draw(counts), draw(counts), draw(st.integers(0, 10**6)))
        for i in range(n_g)
    ]
    fs = []
    for name in syms[n_g:]:
        sections = tuple(
            SectionProfile(kind, draw(st.integers(0, max_size)), draw(counts), draw(counts)) for kind in SectionKind
        )
        fs.append(FunctionProfile(name, draw(st.integers(1, 20)), draw(st.integers(0, 10**6)), sections))
    return app("hyp", gs, fs)
