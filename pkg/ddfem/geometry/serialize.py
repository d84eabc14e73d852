"""
JSON form of SDF trees.

Schema (one object per node)::

    {"kind": "ball", "radius": 1.0, "center": [0, 0], "name": "Ball0", "epsilon": 0.05}
    {"kind": "box", "size": [2, 1], "center": [0, 0]}
    {"kind": "half_plane", "normal": [0, 1], "offset": 0.0}
    {"kind": "union" | "intersection" | "subtraction" | "xor", "children": [a, b]}
    {"kind": "invert", "children": [a]}
    {"kind": "translate", "offset": [dx, dy], "children": [a]}
    {"kind": "rotate", "angle": 0.3, "children": [a]}        # or "matrix": [[...]]
    {"kind": "scale", "factor": 2.0, "children": [a]}
    {"kind": "round", "radius": 0.1, "children": [a]}
    {"kind": "extrusion", "height": 3.2, "children": [a]}
    {"kind": "revolution", "children": [a]}

"name" and "epsilon" are optional on every node. Boolean operators with more
than two children are folded left to right. A node may be given as
{"ref": "<name>"} to reuse an already defined named node.
"""

from typing import Any, Callable

from ddfem.errors import GeometryError
from ddfem.geometry.base import SDF
from ddfem.geometry.operators import (
    Extrusion,
    Intersection,
    Invert,
    Revolution,
    Rotate,
    Round,
    Scale,
    Subtraction,
    Translate,
    Union,
    Xor,
)
from ddfem.geometry.primitives import Ball, Box, HalfPlane

_BINARY = {
    "union": Union,
    "intersection": Intersection,
    "subtraction": Subtraction,
    "xor": Xor,
}


def _require(data: dict, key: str) -> Any:
    if key not in data:
        raise GeometryError(f"Missing '{key}' in {data.get('kind')} node", {"node": data})
    return data[key]


def _children(data: dict, build: Callable[[dict], SDF], count: int | None) -> list[SDF]:
    raw = _require(data, "children")
    if not isinstance(raw, list) or not raw or (count is not None and len(raw) != count):
        raise GeometryError(
            f"'{data['kind']}' expects {count or 'at least 2'} children", {"node": data}
        )
    return [build(child) for child in raw]


def sdf_from_dict(data: dict) -> SDF:
    """
    Build an SDF tree from its JSON form.

    Args:
        data: Parsed JSON object of the root node.

    Returns:
        The root SDF node.

    Raises:
        GeometryError: If a node is malformed or its kind is unknown.
    """
    named: dict[str, SDF] = {}

    def build(node: dict) -> SDF:
        if not isinstance(node, dict):
            raise GeometryError("Geometry nodes must be JSON objects", {"node": node})
        if "ref" in node:
            if node["ref"] not in named:
                raise GeometryError(f"Unknown node reference '{node['ref']}'", {"known": list(named)})
            return named[node["ref"]]
        kind = _require(node, "kind")
        handler = _get_builder(kind)
        if handler is None:
            raise GeometryError(f"Unknown geometry kind '{kind}'", {"known": sorted(_builders())})
        result = handler(node, build)
        if node.get("name") is not None:
            result.name = str(node["name"])
            named[result.name] = result
        if node.get("epsilon") is not None:
            result.epsilon = float(node["epsilon"])
        return result

    return build(data)


def _build_binary(node: dict, build) -> SDF:
    op = _BINARY[node["kind"]]
    raw = _require(node, "children")
    if not isinstance(raw, list) or len(raw) < 2:
        raise GeometryError(f"'{node['kind']}' expects at least 2 children", {"node": node})
    children = [build(child) for child in raw]
    result = children[0]
    for child in children[1:]:
        result = op(result, child)
    return result


def _builders() -> dict[str, Callable[[dict, Callable], SDF]]:
    builders: dict[str, Callable[[dict, Callable], SDF]] = {
        "ball": lambda n, b: Ball(_require(n, "radius"), _require(n, "center")),
        "box": lambda n, b: Box(_require(n, "size"), _require(n, "center")),
        "half_plane": lambda n, b: HalfPlane(_require(n, "normal"), n.get("offset", 0.0)),
        "invert": lambda n, b: Invert(*_children(n, b, 1)),
        "translate": lambda n, b: Translate(*_children(n, b, 1), _require(n, "offset")),
        "rotate": lambda n, b: Rotate(*_children(n, b, 1), angle=n.get("angle"), matrix=n.get("matrix")),
        "scale": lambda n, b: Scale(*_children(n, b, 1), _require(n, "factor")),
        "round": lambda n, b: Round(*_children(n, b, 1), _require(n, "radius")),
        "extrusion": lambda n, b: Extrusion(*_children(n, b, 1), _require(n, "height")),
        "revolution": lambda n, b: Revolution(*_children(n, b, 1)),
    }
    for kind in _BINARY:
        builders[kind] = _build_binary
    return builders


def _get_builder(kind: str) -> Callable[[dict, Callable], SDF] | None:
    return _builders().get(kind)


def sdf_to_dict(node: SDF) -> dict:
    """Inverse of sdf_from_dict, used to echo geometry into run manifests."""
    kinds = {
        Ball: "ball",
        Box: "box",
        HalfPlane: "half_plane",
        Union: "union",
        Intersection: "intersection",
        Subtraction: "subtraction",
        Xor: "xor",
        Invert: "invert",
        Translate: "translate",
        Rotate: "rotate",
        Scale: "scale",
        Round: "round",
        Extrusion: "extrusion",
        Revolution: "revolution",
    }
    kind = kinds.get(type(node))
    if kind is None:
        raise GeometryError(f"{type(node).__name__} has no JSON form")
    out: dict[str, Any] = {"kind": kind}
    if isinstance(node, Ball):
        out.update(radius=node.radius, center=node.center.tolist())
    elif isinstance(node, Box):
        out.update(size=node.size.tolist(), center=node.center.tolist())
    elif isinstance(node, HalfPlane):
        out.update(normal=node.normal.tolist(), offset=node.offset)
    elif isinstance(node, Translate):
        out["offset"] = node.offset.tolist()
    elif isinstance(node, Rotate):
        out["matrix"] = node.matrix.tolist()
    elif isinstance(node, Scale):
        out["factor"] = node.factor
    elif isinstance(node, Round):
        out["radius"] = node.radius
    elif isinstance(node, Extrusion):
        out["height"] = node.height
    if node.children:
        out["children"] = [sdf_to_dict(child) for child in node.children]
    if node.name is not None:
        out["name"] = node.name
    if node._epsilon is not None:
        out["epsilon"] = node._epsilon
    return out
