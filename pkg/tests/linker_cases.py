"""Fixture placements behind the stored linker goldens."""

from conftest import app, function
from mapipro.cost import Placement
from mapipro.model import GlobalVariable, RegionId, flatten

S, F = RegionId.SRAM, RegionId.FRAM_N


def stack_sram():
    p = app("stack_sram", [], [function("main"), function("func_1")])
    return p, Placement.uniform(flatten(p), S)


def stack_fram():
    p = app("stack_fram", [], [function("main"), function("func_1")])
    return p, Placement.uniform(flatten(p), F)


def mixed():
    p = app(
        "mixed",
        [GlobalVariable("g_buf", 256), GlobalVariable("g_flag", 2)],
        [function("main"), function("func_1"), function("func_2")],
    )
    regions = {
        "g_buf": F,
        "g_flag": S,
        "main.text": F,
        "main.data": S,
        "main.stack": S,
        "func_1.text": S,
        "func_1.data": F,
        "func_1.stack": F,
        "func_2.text": F,
        "func_2.data": F,
        "func_2.stack": S,
    }
    return p, Placement(regions)


CASES = {"stack_sram": stack_sram, "stack_fram": stack_fram, "mixed": mixed}
