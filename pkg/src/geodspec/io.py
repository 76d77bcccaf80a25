"""JSON mesh files and report serialization.

Output is deterministic: keys are sorted and floats use Python's shortest
round-trip representation, so equal inputs give byte-identical files and
parsing a written file recovers every value exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .complex import build_complex
from .errors import ComplexError, MetricError, ParseError, ValidationError
from .manifolds import VertexedMesh, manifold_from_tag
from .metric import MetricComplex, validate_metric

FORMAT_VERSION = "1"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, allow_nan=False) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def mesh_to_dict(mesh: VertexedMesh | MetricComplex) -> dict:
    mc = mesh.metric_complex if isinstance(mesh, VertexedMesh) else mesh
    cx = mc.complex
    out = {
        "format_version": FORMAT_VERSION,
        "dimension": cx.dimension,
        "num_vertices": cx.num_vertices,
        "top_simplices": cx.top_simplices.tolist(),
        "edge_lengths": [{"i": int(a), "j": int(b), "length": float(l)}
                         for (a, b), l in zip(cx.edges, mc.edge_lengths)],
    }
    if isinstance(mesh, VertexedMesh):
        out["positions"] = mesh.positions.tolist()
        out["manifold"] = mesh.manifold.tag()
    return out


def save_mesh(mesh, path) -> None:
    write_json(mesh_to_dict(mesh), path)


def _require(data: dict, key: str, kind):
    if key not in data:
        raise ParseError(f"missing field {key!r}")
    if not isinstance(data[key], kind):
        raise ParseError(f"field {key!r} has wrong type {type(data[key]).__name__}")
    return data[key]


def mesh_from_dict(data: dict) -> VertexedMesh | MetricComplex:
    """Validate a parsed mesh document and build the corresponding object.

    Raises
    ------
    ParseError
        Structural problems: missing fields, wrong types, bad version.
    ValidationError
        The complex or its metric is invalid; ``report`` carries details.
    """
    if not isinstance(data, dict):
        raise ParseError("mesh document must be a JSON object")
    version = _require(data, "format_version", str)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}")
    dim = _require(data, "dimension", int)
    nv = _require(data, "num_vertices", int)
    simplices = _require(data, "top_simplices", list)
    edge_list = _require(data, "edge_lengths", list)

    try:
        cx = build_complex(dim, nv, simplices)
    except ComplexError as exc:
        raise ValidationError(f"invalid complex: {exc}") from None

    lengths = {}
    for k, rec in enumerate(edge_list):
        if not isinstance(rec, dict) or not {"i", "j", "length"} <= rec.keys():
            raise ParseError(f"edge_lengths[{k}] must have keys i, j, length")
        i, j = int(rec["i"]), int(rec["j"])
        key = (min(i, j), max(i, j))
        if key in lengths and lengths[key] != float(rec["length"]):
            raise ValidationError(f"edge {key} listed twice with different lengths")
        lengths[key] = float(rec["length"])
    try:
        mc = MetricComplex.from_mapping(cx, lengths)
    except MetricError as exc:
        raise ValidationError(str(exc)) from None

    report = validate_metric(mc)
    if not report.ok:
        raise ValidationError("metric validation failed", report=report.to_dict())

    if "positions" in data and "manifold" in data:
        positions = np.asarray(data["positions"], dtype=float)
        if positions.shape[0] != nv:
            raise ParseError(f"positions has {positions.shape[0]} rows, expected {nv}")
        try:
            manifold = manifold_from_tag(data["manifold"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"bad manifold tag: {exc}") from None
        return VertexedMesh(mc, positions, manifold)
    return mc


def load_mesh(path) -> VertexedMesh | MetricComplex:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, offset=exc.colno) from None
    return mesh_from_dict(data)
