"""JSON round-tripping of regions, grids and grid sets."""
from __future__ import annotations

import json

import numpy as np

from .errors import ParameterError
from .geometry import Ball, Box, BoxUnion, Cylinder, Grid, GridSet, HalfSpace, Slab


def to_dict(obj) -> dict:
    if isinstance(obj, Box):
        return {"type": "box", "lower": list(obj.lower), "upper": list(obj.upper)}
    if isinstance(obj, Cylinder):
        return {"type": "cylinder", "base": to_dict(obj.base), "a": obj.a, "b": obj.b}
    if isinstance(obj, Slab):
        return {"type": "slab", "a": obj.a, "b": obj.b, "dim": obj.dim}
    if isinstance(obj, HalfSpace):
        return {"type": "halfspace", "normal": list(obj.normal), "offset": obj.offset}
    if isinstance(obj, Ball):
        return {"type": "ball", "center": list(obj.center), "radius": obj.radius}
    if isinstance(obj, BoxUnion):
        return {"type": "box_union", "dim": obj.dim, "boxes": [to_dict(b) for b in obj.boxes]}
    if isinstance(obj, Grid):
        return {"type": "grid", "box": to_dict(obj.box), "counts": list(obj.counts)}
    if isinstance(obj, GridSet):
        return {"type": "grid_set", "grid": to_dict(obj.grid), "mask": obj.mask.astype(int).reshape(-1).tolist()}
    raise ParameterError(f"cannot serialize {type(obj).__name__}")


def from_dict(data: dict):
    kind = data.get("type")
    if kind == "box":
        return Box(data["lower"], data["upper"])
    if kind == "cylinder":
        return Cylinder(from_dict(data["base"]), data["a"], data["b"])
    if kind == "slab":
        return Slab(data["a"], data["b"], data["dim"])
    if kind == "halfspace":
        return HalfSpace(data["normal"], data["offset"])
    if kind == "ball":
        return Ball(data["center"], data["radius"])
    if kind == "box_union":
        return BoxUnion(tuple(from_dict(b) for b in data["boxes"]), data["dim"])
    if kind == "grid":
        return Grid(from_dict(data["box"]), tuple(data["counts"]))
    if kind == "grid_set":
        grid = from_dict(data["grid"])
        return GridSet(grid, np.asarray(data["mask"], dtype=bool).reshape(grid.counts))
    raise ParameterError(f"unknown object type {kind!r}")


def dumps(obj) -> str:
    return json.dumps(to_dict(obj))


def loads(text: str):
    return from_dict(json.loads(text))
