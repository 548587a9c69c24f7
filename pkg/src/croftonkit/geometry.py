"""Core geometric types: vectors, directed lines, convex bodies, surface patches.

Measures with closed forms (spherical caps, sphere areas, mesh areas) are
computed exactly here; everything else is left to the Monte Carlo layers.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np
from scipy import special

UNIT_TOL = 1e-12          # unit-norm / foot-point orthogonality tolerance
ON_SURFACE_RTOL = 1e-9    # boundary membership tolerance, scaled by body diameter


def as_vec(x, dim: int | None = None) -> np.ndarray:
    """Validate and return a finite 1-D float vector of length >= 2."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError(f"expected a vector in R^n, n >= 2, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise ValueError(f"expected dimension {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def unit_vector(v) -> np.ndarray:
    v = as_vec(v)
    n = float(np.linalg.norm(v))
    if n < 1e-300:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def _frozen_array(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# directed lines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectedLine:
    """Oriented line stored canonically: `point` is the foot of the
    perpendicular from the origin, so <point, direction> = 0."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        p = as_vec(self.point)
        u = as_vec(self.direction, dim=p.size)
        if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
            raise ValueError("direction must be a unit vector (within 1e-12)")
        if abs(float(p @ u)) > UNIT_TOL * max(1.0, float(np.linalg.norm(p))):
            raise ValueError("point must be the perpendicular foot (<p,u> = 0)")
        object.__setattr__(self, "point", _frozen_array(p))
        object.__setattr__(self, "direction", _frozen_array(u))

    @classmethod
    def through(cls, point, direction) -> "DirectedLine":
        """Canonicalize an arbitrary (point, direction) pair."""
        u = unit_vector(direction)
        p = as_vec(point, dim=u.size)
        return cls(p - (p @ u) * u, u)

    def canonical(self) -> "DirectedLine":
        return DirectedLine.through(self.point, self.direction)

    @property
    def dim(self) -> int:
        return self.point.size

    def at(self, t: float) -> np.ndarray:
        return self.point + t * self.direction


# ---------------------------------------------------------------------------
# convex bodies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sphere:
    """Round sphere; defaults give the unit sphere S^(dim-1) at the origin."""

    dim: int = 3
    radius: float = 1.0
    center: np.ndarray | None = None

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be >= 2")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError("radius must be positive and finite")
        c = np.zeros(self.dim) if self.center is None else as_vec(self.center, self.dim)
        object.__setattr__(self, "center", _frozen_array(c))


def unit_sphere(dim: int = 3) -> Sphere:
    return Sphere(dim=dim)


@dataclass(frozen=True)
class Ellipsoid:
    """Axis-aligned ellipsoid sum(x_i^2 / a_i^2) <= 1, centered at the origin."""

    semi_axes: np.ndarray

    def __post_init__(self):
        a = as_vec(self.semi_axes)
        if np.any(a <= 0):
            raise ValueError("semi-axes must be positive")
        object.__setattr__(self, "semi_axes", _frozen_array(a))

    @property
    def dim(self) -> int:
        return self.semi_axes.size


@dataclass(frozen=True)
class ImplicitConvex:
    """Smooth convex body K = {g <= 0} with g(0) < 0 and boundary inside the
    bounding ball.  `fn` must be vectorized over points shaped (..., dim);
    `gradient` likewise over (..., dim); `hessian` takes a single point."""

    fn: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    bounding_radius: float
    hessian: Callable[[np.ndarray], np.ndarray] | None = None
    dim: int = 3
    name: str = "implicit"
    grid_nodes: int = 64   # scan resolution for the non-convexity diagnostic

    def __post_init__(self):
        if not (self.bounding_radius > 0 and math.isfinite(self.bounding_radius)):
            raise ValueError("bounding_radius must be positive and finite")
        g0 = float(np.asarray(self.fn(np.zeros(self.dim))))
        if not g0 < 0:
            raise ValueError(f"level function must be negative at the origin, got {g0}")


@dataclass(frozen=True)
class TriangleMesh:
    """Closed triangle surface in R^3 (closedness checked, convexity assumed)."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        f = np.asarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must have shape (V, 3)")
        if f.ndim != 2 or f.shape[1] != 3:
            raise ValueError("faces must have shape (F, 3), triangles only")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise ValueError("face index out of range")
        v = np.array(v)
        v.setflags(write=False)
        f = np.array(f)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @property
    def dim(self) -> int:
        return 3

    @cached_property
    def face_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.faces[:, k]] for k in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    @cached_property
    def face_normals(self) -> np.ndarray:
        a, b, c = (self.vertices[self.faces[:, k]] for k in range(3))
        n = np.cross(b - a, c - a)
        lens = np.linalg.norm(n, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = n / lens[:, None]
        return out

    @cached_property
    def _edge_face_count(self) -> dict:
        count: dict[tuple[int, int], int] = {}
        for tri in self.faces:
            for i in range(3):
                e = (int(min(tri[i], tri[(i + 1) % 3])), int(max(tri[i], tri[(i + 1) % 3])))
                count[e] = count.get(e, 0) + 1
        return count

    @cached_property
    def open_edges(self) -> list:
        return sorted(e for e, c in self._edge_face_count.items() if c == 1)

    @cached_property
    def nonmanifold_edges(self) -> list:
        return sorted(e for e, c in self._edge_face_count.items() if c > 2)

    @property
    def is_closed(self) -> bool:
        return not self.open_edges and not self.nonmanifold_edges

    @cached_property
    def _simplex_owner(self) -> tuple[dict, dict]:
        """Owner face for every edge and vertex: the incident face whose sorted
        vertex triple is lexicographically smallest.  Used to count hits that
        land exactly on a shared simplex exactly once."""
        keys = [tuple(sorted(map(int, tri))) for tri in self.faces]
        edge_owner: dict[tuple[int, int], int] = {}
        vertex_owner: dict[int, int] = {}
        for fi, tri in enumerate(self.faces):
            for i in range(3):
                a, b = int(tri[i]), int(tri[(i + 1) % 3])
                e = (min(a, b), max(a, b))
                cur = edge_owner.get(e)
                if cur is None or keys[fi] < keys[cur]:
                    edge_owner[e] = fi
            for vid in map(int, tri):
                cur = vertex_owner.get(vid)
                if cur is None or keys[fi] < keys[cur]:
                    vertex_owner[vid] = fi
        return edge_owner, vertex_owner

    @cached_property
    def enclosing_radius(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())


@dataclass(frozen=True)
class TransformedBody:
    """Rigid motion (rotation + translation) applied to a base body."""

    base: "ConvexBody"
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        n = body_dim(self.base)
        R = np.asarray(self.rotation, dtype=float)
        t = as_vec(self.translation, n)
        if R.shape != (n, n):
            raise ValueError(f"rotation must be {n}x{n}")
        if np.max(np.abs(R @ R.T - np.eye(n))) > 1e-9 or np.linalg.det(R) < 0:
            raise ValueError("rotation must be orthonormal with determinant +1")
        object.__setattr__(self, "rotation", _frozen_array(R))
        object.__setattr__(self, "translation", _frozen_array(t))

    def to_local(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x) - self.translation) @ self.rotation

    def to_world(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x) @ self.rotation.T + self.translation


ConvexBody = Union[Sphere, Ellipsoid, ImplicitConvex, TriangleMesh, TransformedBody]


def body_dim(body: ConvexBody) -> int:
    return body.dim if not isinstance(body, TransformedBody) else body_dim(body.base)


def enclosing_radius(body: ConvexBody) -> float:
    """Radius of an origin-centered ball guaranteed to contain the body."""
    if isinstance(body, Sphere):
        return float(np.linalg.norm(body.center)) + body.radius
    if isinstance(body, Ellipsoid):
        return float(body.semi_axes.max())
    if isinstance(body, ImplicitConvex):
        return float(body.bounding_radius)
    if isinstance(body, TriangleMesh):
        return body.enclosing_radius
    if isinstance(body, TransformedBody):
        return enclosing_radius(body.base) + float(np.linalg.norm(body.translation))
    raise TypeError(f"not a convex body: {type(body)!r}")


def body_diameter(body: ConvexBody) -> float:
    return 2.0 * enclosing_radius(body)


def boundary_gap(body: ConvexBody, x) -> float:
    """Approximate distance from x to the boundary surface."""
    x = as_vec(x, body_dim(body))
    if isinstance(body, Sphere):
        return abs(float(np.linalg.norm(x - body.center)) - body.radius)
    if isinstance(body, Ellipsoid):
        rho = float(np.sqrt(np.sum((x / body.semi_axes) ** 2)))
        grad = (x / body.semi_axes**2)
        gn = float(np.linalg.norm(grad))
        if gn < 1e-300:
            return float(body.semi_axes.min())
        return abs(rho * rho - 1.0) / (2.0 * gn)
    if isinstance(body, ImplicitConvex):
        g = float(np.asarray(body.fn(x)))
        gn = float(np.linalg.norm(np.asarray(body.gradient(x), dtype=float)))
        return abs(g) / max(gn, 1e-300)
    if isinstance(body, TriangleMesh):
        return _point_mesh_distance(body, x)
    if isinstance(body, TransformedBody):
        return boundary_gap(body.base, body.to_local(x))
    raise TypeError(f"not a convex body: {type(body)!r}")


def on_boundary(body: ConvexBody, x, rtol: float = ON_SURFACE_RTOL) -> bool:
    return boundary_gap(body, x) <= rtol * body_diameter(body)


def _point_mesh_distance(mesh: TriangleMesh, x: np.ndarray) -> float:
    """Exact distance from a point to the closest triangle (linear scan).

    The closest point on a triangle is the plane projection when its
    barycentric coordinates are valid, else lies on an edge or vertex; we
    take the minimum over all candidates."""
    a = mesh.vertices[mesh.faces[:, 0]]
    b = mesh.vertices[mesh.faces[:, 1]]
    c = mesh.vertices[mesh.faces[:, 2]]
    ab, ac = b - a, c - a
    ap = x[None, :] - a
    d00 = np.sum(ab * ab, axis=1)
    d01 = np.sum(ab * ac, axis=1)
    d11 = np.sum(ac * ac, axis=1)
    d20 = np.sum(ap * ab, axis=1)
    d21 = np.sum(ap * ac, axis=1)
    denom = d00 * d11 - d01 * d01
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.where(denom > 0, (d11 * d20 - d01 * d21) / denom, 0.0)
        w = np.where(denom > 0, (d00 * d21 - d01 * d20) / denom, 0.0)
    best = np.full(len(a), np.inf)
    for p0, e in ((a, ab), (a, ac), (b, c - b)):
        t = np.sum((x[None, :] - p0) * e, axis=1) / np.maximum(np.sum(e * e, axis=1), 1e-300)
        cand = p0 + np.clip(t, 0.0, 1.0)[:, None] * e
        best = np.minimum(best, np.linalg.norm(cand - x[None, :], axis=1))
    inside = (v >= 0) & (w >= 0) & (v + w <= 1) & (denom > 0)
    proj = a + v[:, None] * ab + w[:, None] * ac
    d_in = np.where(inside, np.linalg.norm(proj - x[None, :], axis=1), np.inf)
    return float(np.minimum(best, d_in).min())


# ---------------------------------------------------------------------------
# surface patches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cap:
    """{x on a sphere : <(x - center)/radius, axis> >= height}; closed set."""

    axis: np.ndarray
    height: float

    def __post_init__(self):
        a = unit_vector(self.axis)
        if not -1.0 <= self.height <= 1.0:
            raise ValueError("cap height must lie in [-1, 1]")
        object.__setattr__(self, "axis", _frozen_array(a))


@dataclass(frozen=True)
class LatLonBox:
    """Latitude/longitude window on a sphere; pole along the last axis.

    lat interval in [-pi/2, pi/2]; lon interval in [-pi, pi], lo > hi wraps."""

    lat: tuple
    lon: tuple

    def __post_init__(self):
        la, lb = self.lat
        if not (-math.pi / 2 - 1e-12 <= la <= lb <= math.pi / 2 + 1e-12):
            raise ValueError("lat interval must be ordered inside [-pi/2, pi/2]")
        lo, hi = self.lon
        if not (-math.pi - 1e-12 <= lo <= math.pi + 1e-12 and -math.pi - 1e-12 <= hi <= math.pi + 1e-12):
            raise ValueError("lon endpoints must lie in [-pi, pi]")


@dataclass(frozen=True)
class HalfSpaceCut:
    """{x on the boundary : <normal, x> >= offset}, in world coordinates."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        w = as_vec(self.normal)
        if np.linalg.norm(w) < 1e-300:
            raise ValueError("half-space normal must be nonzero")
        object.__setattr__(self, "normal", _frozen_array(w))


@dataclass(frozen=True)
class RegionUnion:
    parts: tuple


@dataclass(frozen=True)
class RegionIntersection:
    parts: tuple


@dataclass(frozen=True)
class RegionComplement:
    part: object


@dataclass(frozen=True)
class WholeBoundary:
    pass


Region = Union[Cap, LatLonBox, HalfSpaceCut, RegionUnion, RegionIntersection,
               RegionComplement, WholeBoundary]


@dataclass(frozen=True)
class SurfacePatch:
    body: ConvexBody
    region: Region


def whole_boundary(body) -> SurfacePatch:
    return SurfacePatch(body, WholeBoundary())


def cap_patch(body, axis, height) -> SurfacePatch:
    return SurfacePatch(body, Cap(np.asarray(axis, dtype=float), float(height)))


def half_space_patch(body, normal, offset) -> SurfacePatch:
    return SurfacePatch(body, HalfSpaceCut(np.asarray(normal, dtype=float), float(offset)))


def lat_lon_patch(body, lat, lon) -> SurfacePatch:
    return SurfacePatch(body, LatLonBox(tuple(map(float, lat)), tuple(map(float, lon))))


def patch_union(*patches) -> SurfacePatch:
    _same_body(patches)
    return SurfacePatch(patches[0].body, RegionUnion(tuple(p.region for p in patches)))


def patch_intersection(*patches) -> SurfacePatch:
    _same_body(patches)
    return SurfacePatch(patches[0].body, RegionIntersection(tuple(p.region for p in patches)))


def patch_complement(patch: SurfacePatch) -> SurfacePatch:
    return SurfacePatch(patch.body, RegionComplement(patch.region))


def _same_body(patches):
    if not patches:
        raise ValueError("need at least one patch")
    first = patches[0].body
    for p in patches[1:]:
        if p.body is not first:
            raise ValueError("patch algebra requires a shared body")


def _sphere_local(body, points: np.ndarray) -> np.ndarray:
    """Map world points to unit-sphere coordinates of a Sphere body."""
    if isinstance(body, Sphere):
        return (points - body.center) / body.radius
    if isinstance(body, TransformedBody) and isinstance(body.base, Sphere):
        local = body.to_local(points)
        return (local - body.base.center) / body.base.radius
    raise ValueError("cap / lat-lon predicates are defined on sphere bodies only")


def region_mask(region: Region, body, points: np.ndarray) -> np.ndarray:
    """Vectorized membership of boundary points in a region (no surface check)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(region, WholeBoundary):
        return np.ones(len(pts), dtype=bool)
    if isinstance(region, Cap):
        u = _sphere_local(body, pts)
        return u @ region.axis >= region.height
    if isinstance(region, LatLonBox):
        u = _sphere_local(body, pts)
        z = np.clip(u[:, -1], -1.0, 1.0)
        lat = np.arcsin(z)
        lon = np.arctan2(u[:, 1], u[:, 0])
        la, lb = region.lat
        in_lat = (lat >= la) & (lat <= lb)
        lo, hi = region.lon
        if lo <= hi:
            in_lon = (lon >= lo) & (lon <= hi)
        else:
            in_lon = (lon >= lo) | (lon <= hi)
        return in_lat & in_lon
    if isinstance(region, HalfSpaceCut):
        return pts @ region.normal >= region.offset
    if isinstance(region, RegionUnion):
        out = np.zeros(len(pts), dtype=bool)
        for part in region.parts:
            out |= region_mask(part, body, pts)
        return out
    if isinstance(region, RegionIntersection):
        out = np.ones(len(pts), dtype=bool)
        for part in region.parts:
            out &= region_mask(part, body, pts)
        return out
    if isinstance(region, RegionComplement):
        return ~region_mask(region.part, body, pts)
    raise TypeError(f"not a region: {type(region)!r}")


def patch_mask(patch: SurfacePatch, points: np.ndarray) -> np.ndarray:
    return region_mask(patch.region, patch.body, points)


def patch_contains(patch: SurfacePatch, x) -> bool:
    """Membership of a single boundary point; rejects points off the surface."""
    x = as_vec(x, body_dim(patch.body))
    if not on_boundary(patch.body, x):
        raise ValueError(
            f"point is not on the boundary (gap {boundary_gap(patch.body, x):.3e})")
    return bool(region_mask(patch.region, patch.body, x[None, :])[0])


# ---------------------------------------------------------------------------
# exact measures
# ---------------------------------------------------------------------------

def cap_area_exact(t: float) -> float:
    """Area on the unit 2-sphere of the cap {x3 >= t}: 2*pi*(1 - t)."""
    if not -1.0 <= t <= 1.0:
        raise ValueError("cap height must lie in [-1, 1]")
    return 2.0 * math.pi * (1.0 - t)


def sphere_cap_sigma(dim: int, t: float) -> float:
    """Normalized measure of a height-t cap on S^(dim-1)."""
    if not -1.0 <= t <= 1.0:
        raise ValueError("cap height must lie in [-1, 1]")
    if dim == 3:
        return (1.0 - t) / 2.0   # hat-box: exactly linear in height
    x = max(0.0, 1.0 - t * t)
    half = 0.5 * float(special.betainc((dim - 1) / 2.0, 0.5, x))
    return half if t >= 0 else 1.0 - half


def sphere_surface_area(dim: int, radius: float = 1.0) -> float:
    """Surface area of a radius-r sphere in R^dim."""
    return float(2.0 * math.pi ** (dim / 2.0) / special.gamma(dim / 2.0) * radius ** (dim - 1))


def surface_area_exact(body: ConvexBody) -> float | None:
    """Exact boundary area where a closed form exists, else None."""
    if isinstance(body, Sphere):
        return sphere_surface_area(body.dim, body.radius)
    if isinstance(body, TriangleMesh):
        areas = body.face_areas
        degenerate = np.nonzero(areas <= 0.0)[0]
        if degenerate.size:
            raise ValueError(f"mesh has zero-area faces: {degenerate[:8].tolist()}")
        return float(areas.sum())
    if isinstance(body, TransformedBody):
        return surface_area_exact(body.base)
    return None


# --- interval algebra on cap heights (for sigma_exact) ---

_FULL = ((-1.0, 1.0),)


def _ivl_normalize(ivls):
    ivls = sorted((lo, hi) for lo, hi in ivls if hi > lo + 1e-15)
    out = []
    for lo, hi in ivls:
        if out and lo <= out[-1][1] + 1e-15:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return tuple(out)


def _ivl_complement(ivls):
    out, cursor = [], -1.0
    for lo, hi in ivls:
        if lo > cursor:
            out.append((cursor, lo))
        cursor = max(cursor, hi)
    if cursor < 1.0:
        out.append((cursor, 1.0))
    return _ivl_normalize(out)


def _ivl_intersect(a, b):
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if hi > lo:
                out.append((lo, hi))
    return _ivl_normalize(out)


def _ivl_union(a, b):
    return _ivl_normalize(list(a) + list(b))


def _ivl_flip(ivls):
    return _ivl_normalize([(-hi, -lo) for lo, hi in ivls])


def _merge_axis(ax1, ivl1, ax2, ivl2):
    """Reconcile two (axis, intervals) pairs; axis None means axis-free."""
    if ax1 is None:
        return ax2, ivl1, ivl2
    if ax2 is None:
        return ax1, ivl1, ivl2
    if np.linalg.norm(ax1 - ax2) <= 1e-12:
        return ax1, ivl1, ivl2
    if np.linalg.norm(ax1 + ax2) <= 1e-12:
        return ax1, ivl1, _ivl_flip(ivl2)
    return None, None, None


def _region_height_intervals(region: Region, body):
    """Reduce a region to height intervals along a shared cap axis.

    Returns (axis_or_None, intervals) where axis None means the region is
    axis-free (empty or whole boundary); returns None if not reducible."""
    if isinstance(region, WholeBoundary):
        return None, _FULL
    if isinstance(region, Cap):
        return region.axis, ((float(region.height), 1.0),)
    if isinstance(region, HalfSpaceCut):
        # on a sphere a half-space trace is a cap
        if not isinstance(body, Sphere):
            return "irreducible"
        wn = float(np.linalg.norm(region.normal))
        t = (region.offset - float(region.normal @ body.center)) / (wn * body.radius)
        if t > 1.0:
            return None, ()
        t = max(t, -1.0)
        return region.normal / wn, ((t, 1.0),)
    if isinstance(region, LatLonBox):
        lo, hi = region.lon
        full_lon = lo <= hi and hi - lo >= 2 * math.pi - 1e-12
        if not full_lon:
            return "irreducible"
        la, lb = region.lat
        axis = np.zeros(body_dim(body))
        axis[-1] = 1.0
        return axis, ((math.sin(la), math.sin(lb)),)
    if isinstance(region, RegionComplement):
        sub = _region_height_intervals(region.part, body)
        if sub == "irreducible":
            return "irreducible"
        ax, ivls = sub
        return ax, _ivl_complement(ivls)
    if isinstance(region, (RegionUnion, RegionIntersection)):
        op = _ivl_union if isinstance(region, RegionUnion) else _ivl_intersect
        axis, acc = None, None
        for part in region.parts:
            sub = _region_height_intervals(part, body)
            if sub == "irreducible":
                return "irreducible"
            ax2, ivl2 = sub
            if acc is None:
                axis, acc = ax2, ivl2
                continue
            axis, acc, ivl2 = _merge_axis(axis, acc, ax2, ivl2)
            if acc is None and axis is None:
                return "irreducible"
            acc = op(acc, ivl2)
        return axis, (acc if acc is not None else ())
    raise TypeError(f"not a region: {type(region)!r}")


def sigma_exact(patch: SurfacePatch) -> float | None:
    """Exact normalized surface measure on a sphere body, when the patch
    reduces to cap algebra along one axis; None otherwise."""
    body = patch.body
    if not isinstance(body, Sphere):
        raise ValueError("sigma_exact is defined for sphere bodies only")
    reduced = _region_height_intervals(patch.region, body)
    if reduced == "irreducible":
        return None
    _, intervals = reduced
    n = body.dim
    total = 0.0
    for lo, hi in intervals:
        total += sphere_cap_sigma(n, lo) - sphere_cap_sigma(n, hi)
    return total
