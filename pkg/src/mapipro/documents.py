"""Placement document: the solver's JSON output and the input of later stages."""

from __future__ import annotations

import json
from typing import Any

from .cost import Placement
from .errors import ProfileError
from .model import ApplicationProfile, RegionId, _load_json, _Reader, flatten
from .solver import SolveOptions, SolveResult


def placement_to_dict(
    placement: Placement,
    profile: ApplicationProfile,
    objective=None,
    proven_optimal: bool | None = None,
    options: SolveOptions | None = None,
    **extra: Any,
) -> dict[str, Any]:
    rows = []
    for item in flatten(profile):
        row = {"item": item.id, "origin": item.origin}
        if item.function is not None:
            row["function"] = item.function
        row["region"] = placement[item.id].value
        rows.append(row)
    out: dict[str, Any] = {"application": profile.application, "assignments": rows}
    if objective is not None:
        out["objective_nj_cycles"] = objective if isinstance(objective, int) else float(objective)
    if proven_optimal is not None:
        out["proven_optimal"] = proven_optimal
    if options is not None:
        out["options"] = options.to_dict()
    out.update(extra)
    return out


def result_to_json(result: SolveResult, profile: ApplicationProfile, options: SolveOptions) -> str:
    doc = placement_to_dict(
        result.placement,
        profile,
        result.objective,
        result.proven_optimal,
        options,
        nodes_explored=result.nodes_explored,
    )
    if result.device is not None and result.device.name:
        doc["device"] = result.device.name
    return json.dumps(doc, indent=2) + "\n"


def parse_placement(text: str | bytes, profile: ApplicationProfile | None = None) -> Placement:
    """Read the ``assignments`` of a placement document.

    With a profile, the application name must match and the placement must
    cover exactly the profile's items.
    """
    doc = _Reader(_load_json(text)).obj()
    assignment = {}
    for row in doc.items("assignments"):
        item = row.get("item", kind=str)
        region = row.get("region", kind=str)
        try:
            region = RegionId(region)
        except ValueError:
            raise ProfileError(f"unknown region {region!r}", row.path + ".region") from None
        if item in assignment:
            raise ProfileError(f"item {item!r} assigned twice", row.path)
        assignment[item] = region
    placement = Placement(assignment)
    if profile is not None:
        app = doc.get("application", kind=str)
        if app != profile.application:
            raise ProfileError(f"placement is for {app!r}, profile is {profile.application!r}", "application")
        expected = {i.id for i in flatten(profile)}
        if set(assignment) != expected:
            diff = sorted(expected ^ set(assignment))
            raise ProfileError(f"placement and profile disagree on items: {', '.join(diff[:5])}", "assignments")
    return placement
