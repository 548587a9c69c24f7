"""Line-boundary intersection: closed forms for spheres and ellipsoids,
bracketed root finding for implicit convex bodies, and watertight
ray-triangle counting for meshes."""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import NonConvexityDetected, TangentialContact
from .geometry import (ConvexBody, DirectedLine, Ellipsoid, ImplicitConvex,
                       Sphere, SurfacePatch, TransformedBody, TriangleMesh,
                       body_dim, enclosing_radius, region_mask)

EPS_TAN_REL = 1e-12     # tangency tolerance, scaled by body size
_BARY_TOL = 1e-9        # barycentric tolerance for on-edge/vertex hits
_MESH_CHUNK_ELEMS = 2_000_000   # lines x faces elements per processing chunk


@dataclass(frozen=True)
class HitRecord:
    """Ordered boundary crossings of a directed line.

    `params` / `points` list transversal crossings sorted along the
    direction; tangential (grazing) contacts are flagged and kept separate
    so they are never silently counted."""

    params: tuple = ()
    points: tuple = ()
    tangential: bool = False
    tangent_params: tuple = ()

    @property
    def n_transversal(self) -> int:
        return len(self.params)


class BatchHits(NamedTuple):
    """Two-point intersection data for a batch of lines with a convex body."""

    t_enter: np.ndarray
    t_exit: np.ndarray
    hit: np.ndarray          # exactly two transversal crossings
    tangential: np.ndarray   # grazing contact; resample these
    multi: np.ndarray        # more than two crossings (mesh diagnostics)


# ---------------------------------------------------------------------------
# batch kernels
# ---------------------------------------------------------------------------

def _sphere_hits(P: np.ndarray, U: np.ndarray, radius: float, center: np.ndarray):
    Q = P - center
    b = np.sum(Q * U, axis=1)
    perp_sq = np.maximum(np.sum(Q * Q, axis=1) - b * b, 0.0)
    perp = np.sqrt(perp_sq)
    tang = np.abs(perp - radius) < EPS_TAN_REL * radius
    disc = radius * radius - perp_sq
    hit = (disc > 0.0) & ~tang
    s = np.sqrt(np.maximum(disc, 0.0))
    return -b - s, -b + s, hit, tang


def _ellipsoid_hits(P: np.ndarray, U: np.ndarray, semi_axes: np.ndarray):
    Ps = P / semi_axes
    Us = U / semi_axes
    alpha = np.sum(Us * Us, axis=1)
    beta = np.sum(Ps * Us, axis=1)
    gamma = np.sum(Ps * Ps, axis=1) - 1.0
    disc = beta * beta - alpha * gamma
    # perpendicular offset in rescaled coordinates; body scale there is 1
    perp = np.sqrt(np.maximum(gamma + 1.0 - beta * beta / alpha, 0.0))
    tang = np.abs(perp - 1.0) < EPS_TAN_REL
    hit = (disc > 0.0) & ~tang
    s = np.sqrt(np.maximum(disc, 0.0))
    return (-beta - s) / alpha, (-beta + s) / alpha, hit, tang


def _implicit_hits(P: np.ndarray, U: np.ndarray, body: ImplicitConvex):
    """Roots of g along each line.

    The restriction of g to a line is assumed convex, so the inside segment
    is an interval: we locate the 1-D minimum by golden-section search and
    bracket the two roots from there.  A coarse grid scan (body.grid_nodes)
    guards against non-convex level functions, which would silently corrupt
    estimates otherwise."""
    R = float(body.bounding_radius)
    span = 2.5 * R        # |P| <= R for kinematic proposals, so ends lie outside
    L = len(P)

    def g_at(s):
        return np.asarray(body.fn(P + s[:, None] * U), dtype=float)

    nodes = np.linspace(-span, span, body.grid_nodes)
    vals = np.asarray(body.fn(P[:, None, :] + nodes[None, :, None] * U[:, None, :]),
                      dtype=float)
    inside = vals < 0.0
    changes = np.sum(inside[:, 1:] != inside[:, :-1], axis=1)
    if np.any(changes > 2):
        bad = int(np.nonzero(changes > 2)[0][0])
        raise NonConvexityDetected(
            f"line {bad} crosses the level set {int(changes[bad])} times; "
            "the level function is not convex along lines")

    # golden-section search for the per-line minimum of g (one evaluation
    # per iteration, reusing the surviving interior value)
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a = np.full(L, -span)
    b = np.full(L, span)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = g_at(c)
    fd = g_at(d)
    for _ in range(70):
        left = fc < fd
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        c_old, fc_old, fd_old = c, fc, fd
        c = np.where(left, b - inv_phi * (b - a), d)
        d = np.where(left, c_old, a + inv_phi * (b - a))
        fresh = g_at(np.where(left, c, d))
        fc = np.where(left, fresh, fd_old)
        fd = np.where(left, fc_old, fresh)
    s_min = 0.5 * (a + b)
    g_min = g_at(s_min)

    hit = g_min < 0.0
    t1 = _bisect_root(g_at, np.full(L, -span), s_min)
    t2 = _bisect_root(g_at, np.full(L, span), s_min)
    lo = np.where(hit, np.minimum(t1, t2), np.nan)
    hi = np.where(hit, np.maximum(t1, t2), np.nan)
    # tangential-degenerate: the line minimum of g sits within noise of a
    # double root (either sign), or the chord is so short that the two roots
    # are numerically one
    g_ref = np.maximum(np.abs(vals[:, 0]), np.abs(vals[:, -1]))
    tang = np.abs(g_min) < 1e-12 * np.maximum(g_ref, 1e-300)
    tang |= hit & (hi - lo < 1e-6 * R)
    hit = hit & ~tang
    return lo, hi, hit, tang


def _bisect_root(g_at, s_out, s_in, iters: int = 52):
    """Bisection between an outside point (g > 0) and an inside point (g < 0)."""
    lo = s_out.astype(float).copy()
    hi = s_in.astype(float).copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        pos = g_at(mid) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return 0.5 * (lo + hi)


def _mesh_hit_stats(mesh: TriangleMesh, P: np.ndarray, U: np.ndarray,
                    region=None, body=None):
    """Per-line crossing counts (and entry/exit parameters) for a mesh.

    Moeller-Trumbore over all faces, chunked by lines.  Hits that land on a
    shared edge or vertex are counted only by the owning face, so each
    geometric crossing contributes exactly once.  When `region` is given,
    also counts the crossings whose points fall inside the region."""
    L = len(P)
    F = len(mesh.faces)
    v0 = mesh.vertices[mesh.faces[:, 0]]
    e1 = mesh.vertices[mesh.faces[:, 1]] - v0
    e2 = mesh.vertices[mesh.faces[:, 2]] - v0
    edge_owner, vertex_owner = mesh._simplex_owner

    counts = np.zeros(L, dtype=np.int64)
    in_region = np.zeros(L, dtype=np.int64) if region is not None else None
    t_min = np.full(L, np.inf)
    t_max = np.full(L, -np.inf)

    chunk = max(1, _MESH_CHUNK_ELEMS // max(F, 1))
    for start in range(0, L, chunk):
        sl = slice(start, min(start + chunk, L))
        Pc, Uc = P[sl], U[sl]
        pvec = np.cross(Uc[:, None, :], e2[None, :, :])
        det = np.einsum("fk,lfk->lf", e1, pvec)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / det
            tvec = Pc[:, None, :] - v0[None, :, :]
            u = np.einsum("lfk,lfk->lf", tvec, pvec) * inv
            qvec = np.cross(tvec, e1[None, :, :])
            v = np.einsum("lk,lfk->lf", Uc, qvec) * inv
            t = np.einsum("fk,lfk->lf", e2, qvec) * inv
            w = 1.0 - u - v
        finite = np.isfinite(u) & np.isfinite(v) & np.isfinite(t)
        interior = finite & (u > _BARY_TOL) & (v > _BARY_TOL) & (w > _BARY_TOL)
        boundary = (finite & (u >= -_BARY_TOL) & (v >= -_BARY_TOL)
                    & (w >= -_BARY_TOL) & ~interior)
        counted = interior
        if np.any(boundary):
            counted = interior.copy()
            for li, fi in np.argwhere(boundary):
                if _owns_boundary_hit(mesh, edge_owner, vertex_owner, int(fi),
                                      float(u[li, fi]), float(v[li, fi]), float(w[li, fi])):
                    counted[li, fi] = True
        counts[sl] += counted.sum(axis=1)
        tt = np.where(counted, t, np.inf)
        t_min[sl] = np.minimum(t_min[sl], tt.min(axis=1))
        tt = np.where(counted, t, -np.inf)
        t_max[sl] = np.maximum(t_max[sl], tt.max(axis=1))
        if region is not None:
            li, fi = np.nonzero(counted)
            if li.size:
                pts = Pc[li] + t[li, fi][:, None] * Uc[li]
                inmask = region_mask(region, body, pts)
                np.add.at(in_region, li + start, inmask.astype(np.int64))
    return counts, t_min, t_max, in_region


def _owns_boundary_hit(mesh, edge_owner, vertex_owner, face_idx, u, v, w):
    tri = mesh.faces[face_idx]
    zero = [k for k, val in ((0, w), (1, u), (2, v)) if val < _BARY_TOL]
    if len(zero) >= 2:
        # at a vertex: the only non-near-zero coordinate names it
        alive = ({0, 1, 2} - set(zero)).pop() if len(zero) == 2 else 0
        return vertex_owner.get(int(tri[alive])) == face_idx
    k = zero[0]
    others = [int(tri[j]) for j in (0, 1, 2) if j != k]
    e = (min(others), max(others))
    return edge_owner.get(e) == face_idx


def line_hits_batch(body: ConvexBody, P: np.ndarray, U: np.ndarray) -> BatchHits:
    """Two-point transversal intersection for a batch of lines.

    For meshes, lines with more than two crossings are reported in `multi`
    (allowed for rectifiable-mode counting, rejected by chord samplers)."""
    L = len(P)
    no_multi = np.zeros(L, dtype=bool)
    if isinstance(body, Sphere):
        t1, t2, hit, tang = _sphere_hits(P, U, body.radius, body.center)
        return BatchHits(t1, t2, hit, tang, no_multi)
    if isinstance(body, Ellipsoid):
        t1, t2, hit, tang = _ellipsoid_hits(P, U, body.semi_axes)
        return BatchHits(t1, t2, hit, tang, no_multi)
    if isinstance(body, ImplicitConvex):
        t1, t2, hit, tang = _implicit_hits(P, U, body)
        return BatchHits(t1, t2, hit, tang, no_multi)
    if isinstance(body, TriangleMesh):
        counts, t_min, t_max, _ = _mesh_hit_stats(body, P, U)
        hit = counts == 2
        return BatchHits(t_min, t_max, hit, np.zeros(L, dtype=bool), counts > 2)
    if isinstance(body, TransformedBody):
        # rigid maps preserve the line parameter, so t values carry over
        return line_hits_batch(body.base, body.to_local(P), U @ body.rotation)
    raise TypeError(f"not a convex body: {type(body)!r}")


# ---------------------------------------------------------------------------
# single-line API
# ---------------------------------------------------------------------------

def _record_from_batch(line: DirectedLine, hits: BatchHits, body) -> HitRecord:
    if bool(hits.tangential[0]):
        return HitRecord(tangential=True,
                         tangent_params=(float(hits.t_enter[0]),))
    if not bool(hits.hit[0]):
        return HitRecord()
    t1, t2 = float(hits.t_enter[0]), float(hits.t_exit[0])
    return HitRecord(params=(t1, t2), points=(line.at(t1), line.at(t2)))


def intersect_sphere(line: DirectedLine, radius: float = 1.0,
                     center=None) -> HitRecord:
    """Closed-form line/sphere intersection."""
    c = np.zeros(line.dim) if center is None else np.asarray(center, dtype=float)
    t1, t2, hit, tang = _sphere_hits(line.point[None, :], line.direction[None, :],
                                     float(radius), c)
    return _record_from_batch(line, BatchHits(t1, t2, hit, tang, np.zeros(1, bool)), None)


def intersect_ellipsoid(line: DirectedLine, semi_axes) -> HitRecord:
    a = np.asarray(semi_axes, dtype=float)
    t1, t2, hit, tang = _ellipsoid_hits(line.point[None, :], line.direction[None, :], a)
    return _record_from_batch(line, BatchHits(t1, t2, hit, tang, np.zeros(1, bool)), None)


def intersect_implicit(line: DirectedLine, body: ImplicitConvex) -> HitRecord:
    t1, t2, hit, tang = _implicit_hits(line.point[None, :], line.direction[None, :], body)
    return _record_from_batch(line, BatchHits(t1, t2, hit, tang, np.zeros(1, bool)), None)


def intersect_mesh(line: DirectedLine, mesh: TriangleMesh) -> HitRecord:
    """All boundary crossings of the line, deduplicated at shared simplices.

    Non-convex meshes are allowed; the count may exceed two."""
    P = line.point[None, :]
    U = line.direction[None, :]
    v0 = mesh.vertices[mesh.faces[:, 0]]
    e1 = mesh.vertices[mesh.faces[:, 1]] - v0
    e2 = mesh.vertices[mesh.faces[:, 2]] - v0
    edge_owner, vertex_owner = mesh._simplex_owner
    pvec = np.cross(U, e2)
    det = np.einsum("fk,fk->f", e1, pvec)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / det
        tvec = P - v0
        u = np.einsum("fk,fk->f", tvec, pvec) * inv
        qvec = np.cross(tvec, e1)
        v = np.einsum("k,fk->f", line.direction, qvec) * inv
        t = np.einsum("fk,fk->f", e2, qvec) * inv
        w = 1.0 - u - v
    finite = np.isfinite(u) & np.isfinite(v) & np.isfinite(t)
    interior = finite & (u > _BARY_TOL) & (v > _BARY_TOL) & (w > _BARY_TOL)
    boundary = (finite & (u >= -_BARY_TOL) & (v >= -_BARY_TOL)
                & (w >= -_BARY_TOL) & ~interior)
    ts = list(t[interior])
    for fi in np.nonzero(boundary)[0]:
        if _owns_boundary_hit(mesh, edge_owner, vertex_owner, int(fi),
                              float(u[fi]), float(v[fi]), float(w[fi])):
            ts.append(float(t[fi]))
    ts.sort()
    return HitRecord(params=tuple(ts), points=tuple(line.at(tt) for tt in ts))


def intersect_line(line: DirectedLine, body: ConvexBody) -> HitRecord:
    if isinstance(body, Sphere):
        return intersect_sphere(line, body.radius, body.center)
    if isinstance(body, Ellipsoid):
        return intersect_ellipsoid(line, body.semi_axes)
    if isinstance(body, ImplicitConvex):
        return intersect_implicit(line, body)
    if isinstance(body, TriangleMesh):
        return intersect_mesh(line, body)
    if isinstance(body, TransformedBody):
        inner = DirectedLine.through(body.to_local(line.point),
                                     line.direction @ body.rotation)
        # rigid maps preserve arc length but the foot point shifts: recover
        # world-frame parameters from world-frame points
        rec = intersect_line(inner, body.base)
        pts = tuple(body.to_world(p) for p in rec.points)
        params = tuple(float((p - line.point) @ line.direction) for p in pts)
        return HitRecord(params=params, points=pts, tangential=rec.tangential,
                         tangent_params=rec.tangent_params)
    raise TypeError(f"not a convex body: {type(body)!r}")


def count_patch_hits(line: DirectedLine, patch: SurfacePatch) -> int:
    """Number of boundary crossings that land inside the patch."""
    rec = intersect_line(line, patch.body)
    if rec.tangential:
        raise TangentialContact("line grazes the boundary; resample it")
    if not rec.points:
        return 0
    pts = np.vstack(rec.points)
    return int(np.count_nonzero(region_mask(patch.region, patch.body, pts)))
