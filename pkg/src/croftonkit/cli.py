"""Command-line frontend.

Every subcommand is a thin dispatcher around one estimator or curvature
entry point; the core modules never read flags or files, and the CLI never
computes mathematics.  Exit codes: 0 success, 1 runtime/estimator failure,
2 usage error.
"""

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import estimators as est
from . import meshio
from .curvature import (kernel_local_asymptotic, principal_curvatures,
                        second_fundamental_form, sphere_certificate,
                        umbilic_defect)
from .errors import CroftonkitError
from .geometry import (Cap, ConvexBody, Ellipsoid, HalfSpaceCut, ImplicitConvex,
                       LatLonBox, RegionComplement, RegionIntersection,
                       RegionUnion, Sphere, SurfacePatch, WholeBoundary,
                       surface_area_exact)
from .intersect import line_hits_batch
from .reports import ReportEnvelope, body_hash, describe_body, emit_report
from .rng import RandomStream
from .sampling import surface_points

_DEFAULTS = {
    "samples": 1_000_000,
    "pairs": 200_000,
    "seed": 42,
    "cells": 48,
    "cv_threshold": 0.01,
    "defect_threshold": 0.01,
    "dims": "8,16,32,64",
    "d_grid": "0.25,0.5,0.75,1.0,1.25,1.5,1.75,2.0",
    "t_grid": "-0.75,-0.5,-0.25,0.0,0.25,0.5,0.75",
    "eps_grid": "1e-1:1e-3:9",
    "dim": 3,
}

_CONFIG_KEYS = {
    "body", "patch", "patches", "samples", "pairs", "seed", "workers", "out",
    "cells", "dims", "d_grid", "t_grid", "eps_grid", "point", "tangent",
    "cv_threshold", "defect_threshold", "dim", "mesh", "bounding_radius",
}


@dataclass
class RunConfig:
    """Validated invocation: command plus every knob a subcommand may read."""

    command: str
    body: dict | None = None
    patches: list = field(default_factory=list)
    samples: int = _DEFAULTS["samples"]
    pairs: int = _DEFAULTS["pairs"]
    seed: int = _DEFAULTS["seed"]
    workers: int | None = None
    out: str | None = None
    cells: int = _DEFAULTS["cells"]
    dims: list = field(default_factory=list)
    d_grid: list = field(default_factory=list)
    t_grid: list = field(default_factory=list)
    eps_grid: list = field(default_factory=list)
    point: list | None = None
    tangent: list | None = None
    cv_threshold: float = _DEFAULTS["cv_threshold"]
    defect_threshold: float = _DEFAULTS["defect_threshold"]
    dim: int = _DEFAULTS["dim"]
    mesh: str | None = None
    bounding_radius: float | None = None

    _ECHO_KEYS = {
        "chord-cdf": ("body", "d_grid", "samples", "bounding_radius"),
        "hit-dist": ("body", "patches", "samples", "bounding_radius"),
        "crofton-area": ("body", "patches", "samples", "bounding_radius"),
        "quad-crofton": ("body", "patches", "samples", "pairs", "bounding_radius"),
        "independence": ("body", "cells", "samples"),
        "dot-moment": ("dim", "samples"),
        "chord-scaling": ("dims", "samples"),
        "pair-prob": ("body", "patches", "samples", "pairs"),
        "archimedes": ("t_grid", "samples"),
        "kernel-scan": ("body", "point", "tangent", "eps_grid"),
        "curvature": ("body", "point", "samples"),
        "certify": ("body", "pairs", "samples", "cv_threshold", "defect_threshold"),
        "mesh-area": ("mesh", "samples", "bounding_radius"),
    }

    def echo(self) -> dict:
        out = {"command": self.command, "seed": self.seed}
        for key in self._ECHO_KEYS.get(self.command, ()):
            val = getattr(self, key)
            if val is not None and val != []:
                out[key] = val
        return out


# ---------------------------------------------------------------------------
# descriptor parsing
# ---------------------------------------------------------------------------

_IMPLICIT_REGISTRY = {}


def _register_builtin_implicits():
    if _IMPLICIT_REGISTRY:
        return

    def ball_fn(x):
        x = np.asarray(x, dtype=float)
        return np.sum(x * x, axis=-1) - 1.0

    def ball_grad(x):
        return 2.0 * np.asarray(x, dtype=float)

    def ball_hess(x):
        return 2.0 * np.eye(3)

    def quartic_fn(x):
        x = np.asarray(x, dtype=float)
        return np.sum(x ** 4, axis=-1) - 1.0

    def quartic_grad(x):
        return 4.0 * np.asarray(x, dtype=float) ** 3

    def quartic_hess(x):
        return np.diag(12.0 * np.asarray(x, dtype=float) ** 2)

    _IMPLICIT_REGISTRY["unitball"] = ImplicitConvex(
        ball_fn, ball_grad, bounding_radius=1.25, hessian=ball_hess, name="unitball")
    _IMPLICIT_REGISTRY["quartic"] = ImplicitConvex(
        quartic_fn, quartic_grad, bounding_radius=1.3, hessian=quartic_hess,
        name="quartic")


def parse_body_spec(text: str, dim: int = 3) -> dict:
    """CLI shorthand -> body descriptor dict."""
    head, _, rest = text.partition(":")
    if head == "sphere":
        radius = float(rest) if rest else 1.0
        return {"kind": "sphere", "dim": dim, "radius": radius}
    if head == "ellipsoid":
        if not rest:
            raise ValueError("ellipsoid needs semi-axes, e.g. ellipsoid:1,1,1.5")
        return {"kind": "ellipsoid",
                "semi_axes": [float(v) for v in rest.split(",")]}
    if head == "mesh":
        if not rest:
            raise ValueError("mesh needs a path, e.g. mesh:cube.off")
        return {"kind": "mesh", "path": rest}
    if head == "implicit":
        if not rest:
            raise ValueError("implicit needs a name, e.g. implicit:quartic")
        return {"kind": "implicit", "name": rest}
    raise ValueError(f"unknown body spec {text!r}")


def build_body(desc: dict) -> ConvexBody:
    kind = desc.get("kind")
    if kind == "sphere":
        return Sphere(dim=int(desc.get("dim", 3)),
                      radius=float(desc.get("radius", 1.0)),
                      center=desc.get("center"))
    if kind == "ellipsoid":
        return Ellipsoid(np.asarray(desc["semi_axes"], dtype=float))
    if kind == "mesh":
        return meshio.load_mesh(desc["path"])
    if kind == "implicit":
        _register_builtin_implicits()
        name = desc["name"]
        if name not in _IMPLICIT_REGISTRY:
            raise ValueError(f"unknown implicit body {name!r}; "
                             f"available: {sorted(_IMPLICIT_REGISTRY)}")
        return _IMPLICIT_REGISTRY[name]
    raise ValueError(f"unknown body kind {kind!r}")


def parse_patch_spec(text: str) -> dict:
    parts = text.split(":")
    op = parts[0]
    if op == "whole":
        return {"op": "whole"}
    if op == "cap":
        if len(parts) != 3:
            raise ValueError("cap spec is cap:ax,ay,az:height")
        return {"op": "cap", "axis": [float(v) for v in parts[1].split(",")],
                "height": float(parts[2])}
    if op == "halfspace":
        if len(parts) != 3:
            raise ValueError("halfspace spec is halfspace:wx,wy,wz:offset")
        return {"op": "halfspace", "normal": [float(v) for v in parts[1].split(",")],
                "offset": float(parts[2])}
    if op == "latlon":
        if len(parts) != 3:
            raise ValueError("latlon spec is latlon:lat1,lat2:lon1,lon2 (radians)")
        return {"op": "latlon", "lat": [float(v) for v in parts[1].split(",")],
                "lon": [float(v) for v in parts[2].split(",")]}
    raise ValueError(f"unknown patch spec {text!r}")


def build_region(desc: dict):
    op = desc.get("op")
    if op == "whole":
        return WholeBoundary()
    if op == "cap":
        return Cap(np.asarray(desc["axis"], dtype=float), float(desc["height"]))
    if op == "halfspace":
        return HalfSpaceCut(np.asarray(desc["normal"], dtype=float),
                            float(desc["offset"]))
    if op == "latlon":
        return LatLonBox(tuple(map(float, desc["lat"])),
                         tuple(map(float, desc["lon"])))
    if op == "union":
        return RegionUnion(tuple(build_region(p) for p in desc["parts"]))
    if op == "intersection":
        return RegionIntersection(tuple(build_region(p) for p in desc["parts"]))
    if op == "complement":
        return RegionComplement(build_region(desc["part"]))
    raise ValueError(f"unknown patch op {op!r}")


def _parse_floats(text: str) -> list:
    return [float(v) for v in str(text).split(",") if v != ""]


def _parse_eps_grid(text: str) -> list:
    if ":" in str(text):
        lo, hi, num = str(text).split(":")
        return np.geomspace(float(lo), float(hi), int(num)).tolist()
    return _parse_floats(text)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_COMMANDS = ("chord-cdf", "hit-dist", "crofton-area", "quad-crofton",
             "independence", "dot-moment", "chord-scaling", "pair-prob",
             "archimedes", "kernel-scan", "curvature", "certify", "mesh-area")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="croftonkit",
        description="Monte Carlo integral geometry over kinematic-measure lines")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} estimator")
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--body", help="sphere[:r] | ellipsoid:a,b,c | mesh:path | implicit:name")
        p.add_argument("--patch", action="append",
                       help="whole | cap:ax,ay,az:t | halfspace:w:b | latlon:..; repeatable")
        p.add_argument("--samples", "-n", type=int, help="number of lines/points (default 1000000)")
        p.add_argument("--pairs", "-m", type=int, help="number of surface pairs (default 200000)")
        p.add_argument("--seed", type=int, help="random seed (default 42)")
        p.add_argument("--workers", type=int,
                       help="worker threads (default: CROFTONKIT_WORKERS or all cores)")
        p.add_argument("--out", help="output stem; writes <out>.json and CSV tables")
        p.add_argument("--dim", type=int, help="ambient dimension for sphere bodies (default 3)")
        p.add_argument("--cells", type=int, help="partition cells for independence (default 48)")
        p.add_argument("--dims", help="comma list of dimensions for chord-scaling")
        p.add_argument("--d-grid", dest="d_grid", help="comma list of chord-length thresholds")
        p.add_argument("--t-grid", dest="t_grid", help="comma list of cap heights")
        p.add_argument("--eps-grid", dest="eps_grid", help="lo:hi:num geometric grid or comma list")
        p.add_argument("--point", help="boundary point x,y,z")
        p.add_argument("--tangent", help="tangent direction x,y,z")
        p.add_argument("--cv-threshold", dest="cv_threshold", type=float,
                       help="kernel constancy threshold (default 0.01)")
        p.add_argument("--defect-threshold", dest="defect_threshold", type=float,
                       help="umbilicity threshold (default 0.01)")
        p.add_argument("--mesh", help="mesh path (mesh-area)")
        p.add_argument("--bounding-radius", dest="bounding_radius", type=float,
                       help="override the rejection-sampling ball radius")
    return parser


def parse_config(argv) -> RunConfig:
    """Parse flags, merge an optional JSON config file (flags win), and
    validate everything into a RunConfig."""
    parser = build_parser()
    args = parser.parse_args(argv)
    file_cfg = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        unknown = set(file_cfg) - _CONFIG_KEYS
        if unknown:
            parser.error(f"unknown config keys: {sorted(unknown)}")

    def pick(flag_val, key, default=None):
        if flag_val is not None:
            return flag_val
        if key in file_cfg:
            return file_cfg[key]
        return default

    try:
        dim = int(pick(args.dim, "dim", _DEFAULTS["dim"]))
        body_desc = None
        body_spec = pick(args.body, "body")
        if body_spec is not None:
            body_desc = body_spec if isinstance(body_spec, dict) \
                else parse_body_spec(str(body_spec), dim=dim)
        patch_specs = args.patch if args.patch else \
            file_cfg.get("patches", file_cfg.get("patch"))
        patches = []
        if patch_specs:
            if isinstance(patch_specs, (str, dict)):
                patch_specs = [patch_specs]
            for spec in patch_specs:
                patches.append(spec if isinstance(spec, dict)
                               else parse_patch_spec(str(spec)))
        cfg = RunConfig(
            command=args.command,
            body=body_desc,
            patches=patches,
            samples=int(pick(args.samples, "samples", _DEFAULTS["samples"])),
            pairs=int(pick(args.pairs, "pairs", _DEFAULTS["pairs"])),
            seed=int(pick(args.seed, "seed", _DEFAULTS["seed"])),
            workers=pick(args.workers, "workers"),
            out=pick(args.out, "out"),
            cells=int(pick(args.cells, "cells", _DEFAULTS["cells"])),
            dims=[int(v) for v in _parse_floats(pick(args.dims, "dims", _DEFAULTS["dims"]))],
            d_grid=_parse_floats(pick(args.d_grid, "d_grid", _DEFAULTS["d_grid"])),
            t_grid=_parse_floats(pick(args.t_grid, "t_grid", _DEFAULTS["t_grid"])),
            eps_grid=_parse_eps_grid(pick(args.eps_grid, "eps_grid", _DEFAULTS["eps_grid"])),
            point=_parse_floats(args.point) if args.point else file_cfg.get("point"),
            tangent=_parse_floats(args.tangent) if args.tangent else file_cfg.get("tangent"),
            cv_threshold=float(pick(args.cv_threshold, "cv_threshold",
                                    _DEFAULTS["cv_threshold"])),
            defect_threshold=float(pick(args.defect_threshold, "defect_threshold",
                                        _DEFAULTS["defect_threshold"])),
            dim=dim,
            mesh=pick(args.mesh, "mesh"),
            bounding_radius=pick(args.bounding_radius, "bounding_radius"),
        )
    except ValueError as exc:
        parser.error(str(exc))
    if cfg.workers is not None:
        cfg.workers = int(cfg.workers)
    if cfg.bounding_radius is not None:
        cfg.bounding_radius = float(cfg.bounding_radius)
    return cfg


# ---------------------------------------------------------------------------
# dispatch helpers
# ---------------------------------------------------------------------------

def _require_body(cfg: RunConfig, default: dict | None = None) -> ConvexBody:
    desc = cfg.body if cfg.body is not None else default
    if desc is None:
        raise ValueError(f"{cfg.command} needs --body")
    return build_body(desc)


def _patch_for(cfg: RunConfig, body: ConvexBody, index: int = 0,
               default: dict | None = None) -> SurfacePatch:
    if index < len(cfg.patches):
        return SurfacePatch(body, build_region(cfg.patches[index]))
    if default is not None:
        return SurfacePatch(body, build_region(default))
    raise ValueError(f"{cfg.command} needs --patch")


def _default_boundary_point(body: ConvexBody) -> np.ndarray:
    """Boundary point where the +z ray from the origin exits the body."""
    n = 3
    P = np.zeros((1, n))
    U = np.zeros((1, n))
    U[0, -1] = 1.0
    hits = line_hits_batch(body, P, U)
    if not bool(hits.hit[0]):
        raise ValueError("cannot find a default boundary point; pass --point")
    return (P[0] + float(hits.t_exit[0]) * U[0])


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _run_chord_cdf(cfg: RunConfig) -> ReportEnvelope:
    body = _require_body(cfg, default={"kind": "sphere", "dim": cfg.dim})
    res = est.chord_cdf(body, cfg.d_grid, cfg.samples, cfg.seed,
                        workers=cfg.workers, bounding_radius=cfg.bounding_radius)
    results = {"mean_chord": res.mean_chord.to_dict(),
               "body_hash": body_hash(body)}
    tables = {"cdf": {"columns": ["d", "cdf", "stderr"], "rows": res.rows}}
    return ReportEnvelope("chord-cdf", cfg.echo(), results, tables)


def _run_hit_dist(cfg: RunConfig) -> ReportEnvelope:
    body = _require_body(cfg, default={"kind": "sphere", "dim": cfg.dim})
    patch = _patch_for(cfg, body)
    dist = est.estimate_hit_distribution(patch, cfg.samples, cfg.seed,
                                         workers=cfg.workers,
                                         bounding_radius=cfg.bounding_radius)
    results = dist.to_dict()
    results["body_hash"] = body_hash(body)
    return ReportEnvelope("hit-dist", cfg.echo(), results)


def _run_crofton_area(cfg: RunConfig) -> ReportEnvelope:
    body = _require_body(cfg)
    patch = _patch_for(cfg, body, default={"op": "whole"})
    rep = est.crofton_area(patch, cfg.samples, cfg.seed, workers=cfg.workers,
                           bounding_radius=cfg.bounding_radius)
    results = {"area": rep.to_dict(), "body_hash": body_hash(body)}
    exact = surface_area_exact(body)
    if exact is not None and isinstance(patch.region, WholeBoundary):
        results["exact_area"] = exact
    return ReportEnvelope("crofton-area", cfg.echo(), results)


def _run_quad_crofton(cfg: RunConfig) -> ReportEnvelope:
    body = _require_body(cfg, default={"kind": "sphere", "dim": 3})
    patch = _patch_for(cfg, body, default={"op": "cap", "axis": [0, 0, 1], "height": 0.0})
    lhs, rhs = est.quad_crofton_check(patch, cfg.samples, cfg.pairs, cfg.seed,
                                      workers=cfg.workers,
                                      bounding_radius=cfg.bounding_radius)
    gap = abs(lhs.estimate - rhs.estimate)
    combined = math.hypot(lhs.stderr, rhs.stderr)
    results = {"lhs": lhs.to_dict(), "rhs": rhs.to_dict(), "abs_difference": gap,
               "combined_stderr": combined, "body_hash": body_hash(body)}
    return ReportEnvelope("quad-crofton", cfg.echo(), results)


def _run_independence(cfg: RunConfig) -> ReportEnvelope:
    body = _require_body(cfg, default={"kind": "sphere", "dim": 3})
    res = est.independence_chisq(body, cfg.cells, cfg.samples, cfg.seed,
                                 workers=cfg.workers)
    results = res.to_dict()
    results["body_hash"] = body_hash(body)
    k = res.partition.n_cells
    rows = [[i] + res.table[i].tolist() for i in range(k)]
    tables = {"contingency": {"columns": ["entry_cell"] + [f"exit_{j}" for j in range(k)],
                              "rows": rows}}
    return ReportEnvelope("independence", cfg.echo(), results, tables)


def _run_dot_moment(cfg: RunConfig) -> ReportEnvelope:
    rep = est.dot_moment(cfg.dim, cfg.samples, cfg.seed, workers=cfg.workers)
    return ReportEnvelope("dot-moment", cfg.echo(), {"dot_moment": rep.to_dict()})


def _run_chord_scaling(cfg: RunConfig) -> ReportEnvelope:
    res = est.chord_scaling(cfg.dims, cfg.samples, cfg.seed, workers=cfg.workers)
    results = {"slope": res.slope, "slope_stderr": res.slope_stderr}
    tables = {"scaling": {"columns": ["dim", "mean_chord", "stderr"], "rows": res.rows}}
    return ReportEnvelope("chord-scaling", cfg.echo(), results, tables)


def _run_pair_prob(cfg: RunConfig) -> ReportEnvelope:
    body = _require_body(cfg, default={"kind": "sphere", "dim": cfg.dim})
    if len(cfg.patches) < 2:
        raise ValueError("pair-prob needs two --patch arguments")
    pa = _patch_for(cfg, body, 0)
    pb = _patch_for(cfg, body, 1)
    res = est.pair_hit_probability(pa, pb, cfg.samples, cfg.pairs, cfg.seed,
                                   workers=cfg.workers)
    results = res.to_dict()
    results["body_hash"] = body_hash(body)
    return ReportEnvelope("pair-prob", cfg.echo(), results)


def _run_archimedes(cfg: RunConfig) -> ReportEnvelope:
    res = est.archimedes_check(cfg.t_grid, cfg.samples, cfg.seed,
                               workers=cfg.workers)
    results = {"slope": res.slope, "intercept": res.intercept,
               "max_std_residual": res.max_std_residual}
    tables = {"cap_areas": {"columns": ["t", "mc_area", "exact_area", "stderr"],
                            "rows": res.rows}}
    return ReportEnvelope("archimedes", cfg.echo(), results, tables)


def _run_kernel_scan(cfg: RunConfig) -> ReportEnvelope:
    body = _require_body(cfg, default={"kind": "sphere", "dim": 3})
    point = np.asarray(cfg.point, float) if cfg.point else _default_boundary_point(body)
    tangent = np.asarray(cfg.tangent, float) if cfg.tangent else np.array([1.0, 0.0, 0.0])
    rows = kernel_local_asymptotic(body, point, tangent, cfg.eps_grid)
    results = {"point": point.tolist(), "body_hash": body_hash(body)}
    tables = {"kernel_scan": {"columns": ["eps", "kernel", "predicted"], "rows": rows}}
    return ReportEnvelope("kernel-scan", cfg.echo(), results, tables)


def _run_curvature(cfg: RunConfig) -> ReportEnvelope:
    body = _require_body(cfg, default={"kind": "sphere", "dim": 3})
    if cfg.point:
        pts = np.asarray([cfg.point], dtype=float)
    else:
        n = min(cfg.samples, 512)
        pts = surface_points(body, n, RandomStream(cfg.seed, 7).generator())
    rows = []
    worst = 0.0
    for p in pts:
        form = second_fundamental_form(body, p)
        lam = principal_curvatures(form)
        d = umbilic_defect(form)
        worst = max(worst, d)
        rows.append([*map(float, p), float(lam[0]), float(lam[-1]), float(d)])
    results = {"max_umbilic_defect": worst, "n_points": len(pts),
               "body_hash": body_hash(body)}
    tables = {"curvature": {"columns": ["x", "y", "z", "lambda_min", "lambda_max",
                                        "umbilic_defect"], "rows": rows}}
    return ReportEnvelope("curvature", cfg.echo(), results, tables)


def _run_certify(cfg: RunConfig) -> ReportEnvelope:
    body = _require_body(cfg, default={"kind": "sphere", "dim": 3})
    cert = sphere_certificate(body, n_pairs=cfg.pairs,
                              n_points=min(cfg.samples, 512), seed=cfg.seed,
                              cv_threshold=cfg.cv_threshold,
                              defect_threshold=cfg.defect_threshold)
    results = cert.to_dict()
    results["body_hash"] = body_hash(body)
    return ReportEnvelope("certify", cfg.echo(), results)


def _run_mesh_area(cfg: RunConfig) -> ReportEnvelope:
    path = cfg.mesh
    if path is None and cfg.body and cfg.body.get("kind") == "mesh":
        path = cfg.body["path"]
    if path is None:
        raise ValueError("mesh-area needs --mesh PATH")
    mesh = meshio.load_mesh(path)
    rep = est.crofton_area(mesh, cfg.samples, cfg.seed, workers=cfg.workers,
                           bounding_radius=cfg.bounding_radius)
    results = {"exact_area": surface_area_exact(mesh),
               "crofton_area": rep.to_dict(),
               "is_closed": mesh.is_closed,
               "body_hash": body_hash(mesh)}
    return ReportEnvelope("mesh-area", cfg.echo(), results)


_DISPATCH = {
    "chord-cdf": _run_chord_cdf,
    "hit-dist": _run_hit_dist,
    "crofton-area": _run_crofton_area,
    "quad-crofton": _run_quad_crofton,
    "independence": _run_independence,
    "dot-moment": _run_dot_moment,
    "chord-scaling": _run_chord_scaling,
    "pair-prob": _run_pair_prob,
    "archimedes": _run_archimedes,
    "kernel-scan": _run_kernel_scan,
    "curvature": _run_curvature,
    "certify": _run_certify,
    "mesh-area": _run_mesh_area,
}


def main(argv=None) -> int:
    cfg = parse_config(argv)
    t0 = time.perf_counter()
    try:
        envelope = _DISPATCH[cfg.command](cfg)
    except (CroftonkitError, ValueError, OSError) as exc:
        print(f"croftonkit {cfg.command}: error: {exc}", file=sys.stderr)
        return 1
    envelope.wall_time = time.perf_counter() - t0
    if cfg.out:
        paths = emit_report(envelope, cfg.out)
        for p in paths:
            print(f"wrote {p}")
    else:
        print(envelope.to_json())
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
