"""Compare the greedy "text to SRAM if it fits" rule with the exact optimum.

The solver already decides text sections jointly with everything else; this
script only shows how far the greedy rule lands from it on the bundled
profiles. Usage: python3 scripts/text_heuristic_compare.py [--failures N]
"""

import argparse

from mapipro.cost import Placement
from mapipro.errors import MapiproError
from mapipro.model import PowerModel, RegionId, SectionKind, bundled_device, bundled_profile, flatten
from mapipro.solver import SolveOptions, placement_objective, solve

APPS = ("fir", "16bit_2dim", "matrix_mult", "qsort_small", "aes", "sha", "qsort_large", "susan")


def greedy_text(profile, device, options):
    """Keep the optimum for non-text items, then move text to SRAM while space remains."""
    items = flatten(profile)
    regions = dict(solve(profile, device, options).placement.assignment)
    for item in items:
        if item.kind is SectionKind.TEXT:
            regions[item.id] = RegionId.FRAM_N
    cap = device.region(RegionId.SRAM).capacity_bytes
    if options.uses_backup(device):
        cap = min(cap, device.region(RegionId.FRAM_B).capacity_bytes - device.register_file_bytes)
    used = Placement(regions).sram_bytes(items)
    for item in items:
        if item.kind is SectionKind.TEXT and used + item.size_bytes <= cap:
            regions[item.id] = RegionId.SRAM
            used += item.size_bytes
    return Placement(regions)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--failures", type=int, default=0)
    args = ap.parse_args(argv)
    device = bundled_device("msp430fr6989")
    options = SolveOptions(power=PowerModel(args.failures))
    print(f"{'app':<12} {'optimal EDP':>16} {'greedy EDP':>16} {'ratio':>7}")
    for name in APPS:
        profile = bundled_profile(name)
        best = solve(profile, device, options).objective
        try:
            greedy = placement_objective(greedy_text(profile, device, options), profile, device, options)
        except MapiproError as exc:
            print(f"{name:<12} {float(best):>16.4g} {'n/a':>16} ({exc})")
            continue
        print(f"{name:<12} {float(best):>16.4g} {float(greedy):>16.4g} {float(greedy / best):>7.3f}")


if __name__ == "__main__":
    main()
