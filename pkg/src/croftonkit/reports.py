"""Report envelopes, canonical JSON, CSV emission, and body descriptors.

Envelopes serialize deterministically: two runs with identical config and
seed produce byte-identical JSON except for wall-time fields."""

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import (Cap, ConvexBody, Ellipsoid, HalfSpaceCut, ImplicitConvex,
                       LatLonBox, RegionComplement, RegionIntersection,
                       RegionUnion, Sphere, SurfacePatch, TransformedBody,
                       TriangleMesh, WholeBoundary)

TOOL_NAME = "croftonkit"
TOOL_VERSION = "0.1.0"


def _plain(obj):
    """Coerce numpy scalars/arrays into JSON-friendly builtins."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_json(payload) -> str:
    return json.dumps(_plain(payload), sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def describe_body(body: ConvexBody) -> dict:
    if isinstance(body, Sphere):
        return {"kind": "sphere", "dim": body.dim, "radius": body.radius,
                "center": body.center.tolist()}
    if isinstance(body, Ellipsoid):
        return {"kind": "ellipsoid", "semi_axes": body.semi_axes.tolist()}
    if isinstance(body, ImplicitConvex):
        return {"kind": "implicit", "name": body.name, "dim": body.dim,
                "bounding_radius": body.bounding_radius}
    if isinstance(body, TriangleMesh):
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(body.vertices).tobytes())
        digest.update(np.ascontiguousarray(body.faces).tobytes())
        return {"kind": "mesh", "n_vertices": int(len(body.vertices)),
                "n_faces": int(len(body.faces)), "digest": digest.hexdigest()[:16]}
    if isinstance(body, TransformedBody):
        return {"kind": "transformed", "base": describe_body(body.base),
                "rotation": body.rotation.tolist(),
                "translation": body.translation.tolist()}
    raise TypeError(f"not a convex body: {type(body)!r}")


def describe_region(region) -> dict:
    if isinstance(region, WholeBoundary):
        return {"op": "whole"}
    if isinstance(region, Cap):
        return {"op": "cap", "axis": region.axis.tolist(), "height": region.height}
    if isinstance(region, LatLonBox):
        return {"op": "latlon", "lat": list(region.lat), "lon": list(region.lon)}
    if isinstance(region, HalfSpaceCut):
        return {"op": "halfspace", "normal": region.normal.tolist(),
                "offset": region.offset}
    if isinstance(region, RegionUnion):
        return {"op": "union", "parts": [describe_region(p) for p in region.parts]}
    if isinstance(region, RegionIntersection):
        return {"op": "intersection", "parts": [describe_region(p) for p in region.parts]}
    if isinstance(region, RegionComplement):
        return {"op": "complement", "part": describe_region(region.part)}
    raise TypeError(f"not a region: {type(region)!r}")


def describe_patch(patch: SurfacePatch) -> dict:
    return {"body": describe_body(patch.body),
            "region": describe_region(patch.region)}


def body_hash(body: ConvexBody) -> str:
    return hashlib.sha256(canonical_json(describe_body(body)).encode()).hexdigest()[:16]


@dataclass
class ReportEnvelope:
    """Self-describing result container: config echo plus result payloads.

    `tables` holds named tabular payloads (column list + row list) that are
    additionally written as CSV files."""

    command: str
    config: dict
    results: dict
    tables: dict = field(default_factory=dict)
    wall_time: float = 0.0
    tool: str = TOOL_NAME
    version: str = TOOL_VERSION

    def to_payload(self) -> dict:
        return _plain({
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "wall_time": self.wall_time,
        })

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_payload(), sort_keys=True, indent=indent,
                          allow_nan=False)


def emit_report(envelope: ReportEnvelope, out_stem) -> list:
    """Write `<stem>.json` plus one `<stem>.<table>.csv` per tabular payload.

    Returns the list of paths written."""
    stem = Path(out_stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    json_path = Path(str(stem) + ".json")
    json_path.write_text(envelope.to_json() + "\n")
    written.append(json_path)
    for name, spec in envelope.tables.items():
        path = Path(f"{stem}.{name}.csv")
        with path.open("w", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(spec["columns"])
            for row in spec["rows"]:
                writer.writerow(_plain(list(row)))
        written.append(path)
    return written
