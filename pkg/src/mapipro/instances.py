"""Random placement instances and the solver-versus-enumeration check."""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .model import (
    ApplicationProfile,
    DeviceSpec,
    FunctionProfile,
    GlobalVariable,
    PowerModel,
    SectionKind,
    SectionProfile,
    bundled_device,
    dump_profile,
)
from .solver import SolveOptions, exhaustive_oracle, solve

MIN_SIZE, MAX_SIZE = 16, 8192
MAX_ACCESSES = 100_000
MIN_CYCLES, MAX_CYCLES = 100, 10_000_000
MAX_CALLS = 20
MAX_FAILURES = 8


@dataclass(frozen=True)
class Instance:
    profile: ApplicationProfile
    device: DeviceSpec
    options: SolveOptions


def _size(rng: random.Random) -> int:
    return int(round(math.exp(rng.uniform(math.log(MIN_SIZE), math.log(MAX_SIZE)))))


def random_profile(rng: random.Random, max_items: int | None = None, name: str = "random_app") -> ApplicationProfile:
    """Sizes log-uniform in [16 B, 8 KiB]; 0-5 globals and 1-5 functions.

    Draws of (globals, functions) whose item count exceeds ``max_items`` are
    redrawn.
    """
    while True:
        n_globals = rng.randint(0, 5)
        n_funcs = rng.randint(1, 5)
        if max_items is None or n_globals + 3 * n_funcs <= max_items:
            break
    globals_ = tuple(
        GlobalVariable(
            f"g{i}",
            _size(rng),
            rng.randint(0, MAX_ACCESSES),
            rng.randint(0, MAX_ACCESSES),
            rng.randint(MIN_CYCLES, MAX_CYCLES),
        )
        for i in range(n_globals)
    )
    functions = tuple(
        FunctionProfile(
            f"f{i}",
            rng.randint(1, MAX_CALLS),
            rng.randint(MIN_CYCLES, MAX_CYCLES),
            tuple(
                SectionProfile(kind, _size(rng), rng.randint(0, MAX_ACCESSES), rng.randint(0, MAX_ACCESSES))
                for kind in SectionKind
            ),
        )
        for i in range(n_funcs)
    )
    return ApplicationProfile(name, globals_, functions)


def random_instance(rng: random.Random, max_items: int | None = None, device: DeviceSpec | None = None) -> Instance:
    profile = random_profile(rng, max_items)
    power = PowerModel(failure_count=rng.randint(0, MAX_FAILURES))
    return Instance(profile, device or bundled_device("msp430fr6989"), SolveOptions(power=power))


@dataclass(frozen=True)
class Mismatch:
    index: int
    profile_json: str
    failure_count: int
    bnb_objective: object
    exhaustive_objective: object


def _check(args):
    index, inst = args
    bnb = solve(inst.profile, inst.device, inst.options)
    ex = exhaustive_oracle(inst.profile, inst.device, inst.options)
    if bnb.objective != ex.objective:
        return Mismatch(index, dump_profile(inst.profile), inst.options.power.failure_count, bnb.objective, ex.objective)
    return None


def generate_instances(count: int, max_items: int, seed: int) -> list[Instance]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = random_instance(rng, max_items)
        # keep only instances with at least one feasible placement
        if inst.profile.total_bytes <= _placement_capacity(inst):
            out.append(inst)
    return out


def _placement_capacity(inst: Instance) -> int:
    dev = inst.device
    nv = dev.region(inst.options.nv_for(dev)).capacity_bytes
    return nv + dev.sram.capacity_bytes


def verify(count: int, max_items: int, seed: int, workers: int | None = None) -> list[Mismatch]:
    """Compare branch-and-bound with enumeration on ``count`` random instances."""
    instances = generate_instances(count, max_items, seed)
    if workers is None:
        workers = int(os.environ.get("MAPIPRO_THREADS", "1") or 1)
    jobs = list(enumerate(instances))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_check, jobs, chunksize=4))
    else:
        results = [_check(j) for j in jobs]
    return [r for r in results if r is not None]


__all__ = ["Instance", "Mismatch", "generate_instances", "random_instance", "random_profile", "verify"]
