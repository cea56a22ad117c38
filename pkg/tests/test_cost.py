from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import app, function, profiles, toy_device
from mapipro.cost import Placement, edp_stable, edp_system, eta, item_cycles, item_energy, scale_edp
from mapipro.errors import IllegalRegionError, PlacementError, UndefinedProgressError
from mapipro.model import (
    DeviceSpec,
    EdpScaling,
    GlobalVariable,
    LatencyMode,
    MemoryRegion,
    PlacementItem,
    PowerModel,
    RegionId,
    flatten,
)

SRAM = MemoryRegion(RegionId.SRAM, 2048, 5500, 5600, 1)
FRAM = MemoryRegion(RegionId.FRAM_N, 124928, 10325, 13125, 2)
FLASH = MemoryRegion(RegionId.FLASH, 124928, 23876, 31198, 2)
FRAM_B = MemoryRegion(RegionId.FRAM_B, 3072, 10325, 13125, 2)


def item(reads=10, writes=5, weight=1, base=100, size=8):
    return PlacementItem("x", size, reads, writes, weight, base)


def test_item_energy_sram():
    assert item_energy(item(), SRAM) == 83000


def test_item_energy_fram():
    assert item_energy(item(), FRAM) == 168875


def test_flash_write_path():
    assert item_energy(item(reads=0, writes=1), FLASH) == 31198
    assert item_energy(item(reads=1, writes=0), FLASH) == 23876


def test_zero_access_energy():
    for region in (SRAM, FRAM, FLASH):
        assert item_energy(item(0, 0), region) == 0


def test_fram_b_not_a_placement_region():
    with pytest.raises(IllegalRegionError):
        item_energy(item(), FRAM_B)
    with pytest.raises(IllegalRegionError):
        Placement({"x": RegionId.FRAM_B})


def test_item_cycles():
    it = item(reads=20, writes=10, base=100)
    assert item_cycles(it, SRAM, LatencyMode.PER_REGION) == 100
    assert item_cycles(it, SRAM, LatencyMode.FIXED) == 100
    assert item_cycles(it, FRAM, LatencyMode.PER_REGION) == 130
    assert item_cycles(it, FRAM, LatencyMode.FIXED) == 100


def test_energy_scales_with_weight():
    assert item_energy(item(weight=3), FRAM) == 3 * 168875
    assert item_cycles(item(reads=20, writes=10, weight=3), FRAM) == 390


@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_energy_linear_in_counts(r1, w1, r2, w2):
    a, b = item(r1, w1), item(r2, w2)
    both = item(r1 + r2, w1 + w2)
    for region in (SRAM, FRAM, FLASH):
        assert item_energy(both, region) == item_energy(a, region) + item_energy(b, region)


@given(st.integers(0, 10**5), st.integers(0, 10**5), st.integers(0, 10**6))
def test_fram_never_cheaper_than_sram(r, w, base):
    it = item(r, w, base=base)
    assert item_energy(it, FRAM) >= item_energy(it, SRAM)
    assert item_cycles(it, FRAM) >= item_cycles(it, SRAM)


def _single_global_profile(reads, writes, base):
    return app(globals_=[GlobalVariable("x", 8, reads, writes, base)], functions=[])


def test_edp_zero_energy():
    p = app(functions=[function("main", accesses=((0, 0), (0, 0), (0, 0)))])
    dev = toy_device()
    assert edp_stable(Placement.uniform(flatten(p), RegionId.SRAM), p, dev).edp == 0


def test_edp_single_item():
    dev = toy_device()
    p = _single_global_profile(10, 5, 3)
    res = edp_stable(Placement({"x": RegionId.SRAM}), p, dev)
    assert res.edp == 83000 * 3


def test_edp_two_items_sum():
    dev = toy_device()
    p = app(globals_=[GlobalVariable("a", 8, 10, 5, 100), GlobalVariable("b", 8, 20, 10, 100)], functions=[])
    p_ab = Placement({"a": RegionId.SRAM, "b": RegionId.FRAM_N})
    res = edp_stable(p_ab, p, dev)
    # b: 20 reads + 10 writes in FRAM costs 2 x 168875 and 100 + 30 cycles
    assert res.per_item["a"].energy_nj == 83000 and res.per_item["a"].cycles == 100
    assert res.per_item["b"].energy_nj == 337750 and res.per_item["b"].cycles == 130
    assert res.edp == 83000 * 100 + 337750 * 130


def test_edp_example_value():
    dev = toy_device()
    # b runs 115 base cycles plus 15 FRAM access stalls: 130 cycles
    p = app(globals_=[GlobalVariable("a", 8, 10, 5, 100), GlobalVariable("b", 8, 10, 5, 115)], functions=[])
    res = edp_stable(Placement({"a": RegionId.SRAM, "b": RegionId.FRAM_N}), p, dev)
    assert (res.per_item["b"].energy_nj, res.per_item["b"].cycles) == (168875, 130)
    assert res.edp == 30_253_750
    fixed = edp_stable(Placement({"a": RegionId.SRAM, "b": RegionId.FRAM_N}), p, dev, LatencyMode.FIXED)
    assert fixed.edp == 83000 * 100 + 168875 * 115


def test_edp_requires_total_placement():
    dev = toy_device()
    p = app(globals_=[GlobalVariable("a", 8)], functions=[function("f")])
    with pytest.raises(PlacementError):
        edp_stable(Placement({"a": RegionId.SRAM}), p, dev)


def test_eta_values():
    assert eta(1000, 0, 0) == 1
    assert eta(1000, 100, 100) == Fraction(5, 6)
    tiny = eta(1, 10**9, 10**9)
    assert 0 < tiny < 1e-9


def test_eta_undefined():
    with pytest.raises(UndefinedProgressError):
        eta(0, 1, 1)


def test_scale_edp():
    assert scale_edp(1000, Fraction(4, 5), EdpScaling.ETA_LITERAL) == 800
    assert scale_edp(1000, Fraction(4, 5), EdpScaling.INVERSE_ETA) == 1250


def test_edp_system_at_zero_checkpoint_equals_stable():
    dev = toy_device()
    p = app(functions=[function("main")])
    pl = Placement.uniform(flatten(p), RegionId.SRAM)
    stable = edp_stable(pl, p, dev).edp
    for scaling in EdpScaling:
        assert edp_system(pl, p, dev, PowerModel(0, edp_scaling=scaling), 0, 0) == stable


@given(st.integers(1, 10**6), st.integers(0, 10**6), st.integers(1, 10**6))
def test_inverse_eta_monotone_in_backup(nc, backup, extra):
    lo = scale_edp(1000, eta(nc, backup, 0), EdpScaling.INVERSE_ETA)
    hi = scale_edp(1000, eta(nc, backup + extra, 0), EdpScaling.INVERSE_ETA)
    assert eta(nc, backup + extra, 0) < eta(nc, backup, 0)
    assert hi > lo


@given(profiles(max_size=256), st.integers(1, 50))
@settings(max_examples=40, deadline=None)
def test_energy_scale_equivariance(p, k):
    """Multiplying every energy by k multiplies energy and EDP by k."""
    dev = toy_device()
    scaled = DeviceSpec(
        tuple(
            MemoryRegion(r.id, r.capacity_bytes, r.read_energy * k, r.write_energy * k, r.cycles_per_access)
            for r in dev.regions
        ),
        register_file_bytes=dev.register_file_bytes,
        backup_region=dev.backup_region,
    )
    items = flatten(p)
    pl = Placement.from_vector(items, [RegionId.SRAM if i % 2 else RegionId.FRAM_N for i in range(len(items))])
    a = edp_stable(pl, p, dev)
    b = edp_stable(pl, p, scaled)
    assert b.energy_nj == k * a.energy_nj and b.edp == k * a.edp and b.cycles == a.cycles


def test_placement_validation():
    dev = toy_device(sram=100)
    p = app(globals_=[GlobalVariable("a", 80), GlobalVariable("b", 80)], functions=[])
    items = flatten(p)
    with pytest.raises(PlacementError, match="SRAM"):
        Placement({"a": "SRAM", "b": "SRAM"}).validate(items, dev)
    with pytest.raises(PlacementError, match="unknown"):
        Placement({"a": "SRAM", "b": "SRAM", "c": "SRAM"}).validate(items, dev)
    with pytest.raises(IllegalRegionError):
        Placement({"a": "FLASH", "b": "SRAM"}).validate(items, dev)
    Placement({"a": "SRAM", "b": "FRAM_N"}).validate(items, dev)
