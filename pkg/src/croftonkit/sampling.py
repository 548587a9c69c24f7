"""Reproducible sampling: uniform points on spheres, balls, and surface
patches, plus kinematic-measure lines conditioned to hit a convex body.

The kinematic measure factors as (uniform direction on S^(n-1)) x (Lebesgue
offset in the direction's orthogonal hyperplane).  Lines hitting a body are
drawn by rejection from an enclosing ball, which is exact because the offset
measure is translation-invariant within each hyperplane.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ProposalBudgetExceeded, RejectionBudgetExceeded
from .geometry import (ConvexBody, DirectedLine, Ellipsoid, ImplicitConvex,
                       Sphere, SurfacePatch, TransformedBody, TriangleMesh,
                       as_vec, body_diameter, body_dim, boundary_gap,
                       enclosing_radius, patch_mask)
from .intersect import line_hits_batch
from .rng import RandomStream, as_generator

_MIN_PATCH_MEASURE = 1e-6


# ---------------------------------------------------------------------------
# primitive samplers
# ---------------------------------------------------------------------------

def uniform_sphere_points(dim: int, size: int, gen: np.random.Generator) -> np.ndarray:
    """Uniform points on S^(dim-1), by normalizing Gaussian draws."""
    if dim < 2:
        raise ValueError("sphere dimension must be >= 2")
    g = gen.standard_normal((size, dim))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms < 1e-12):     # essentially never; keeps the map total
        bad = norms < 1e-12
        g[bad] = gen.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def uniform_ball_points(dim: int, size: int, gen: np.random.Generator) -> np.ndarray:
    """Uniform points in the closed unit ball B^dim."""
    if dim < 1:
        raise ValueError("ball dimension must be >= 1")
    if dim == 1:
        return gen.uniform(-1.0, 1.0, size=(size, 1))
    g = uniform_sphere_points(dim, size, gen)
    r = gen.random(size) ** (1.0 / dim)
    return g * r[:, None]


def uniform_sphere_point(dim: int, rng) -> np.ndarray:
    return uniform_sphere_points(dim, 1, as_generator(rng))[0]


def uniform_ball_point(dim: int, rng) -> np.ndarray:
    return uniform_ball_points(dim, 1, as_generator(rng))[0]


def _perp_offsets(directions: np.ndarray, radius: float,
                  gen: np.random.Generator) -> np.ndarray:
    """Uniform points in the radius-r (n-1)-ball of each direction's
    orthogonal hyperplane, without building an explicit basis."""
    size, n = directions.shape
    g = gen.standard_normal((size, n))
    g -= np.sum(g * directions, axis=1)[:, None] * directions
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        fresh = gen.standard_normal((int(bad.sum()), n))
        fresh -= np.sum(fresh * directions[bad], axis=1)[:, None] * directions[bad]
        g[bad] = fresh
        norms = np.linalg.norm(g, axis=1)
    r = radius * gen.random(size) ** (1.0 / (n - 1))
    return g * (r / norms)[:, None]


# ---------------------------------------------------------------------------
# kinematic line sampler
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChordSample:
    """Ordered (entry, exit) boundary pair of a line through a convex body."""

    line: DirectedLine
    entry: np.ndarray
    exit: np.ndarray

    def __post_init__(self):
        e = as_vec(self.entry)
        x = as_vec(self.exit, e.size)
        if float((x - e) @ self.line.direction) <= 0.0:
            raise ValueError("exit must follow entry along the line direction")


class KinematicLineSampler:
    """Rejection sampler for kinematic-measure lines conditioned to hit a body.

    Proposals are lines hitting the origin-centered bounding ball; the
    acceptance ratio estimates mu(lines hitting K) / mu(lines hitting ball).
    Tangency-degenerate proposals are rejected and counted as misses.
    """

    def __init__(self, body: ConvexBody, bounding_radius: float | None = None,
                 proposal_cap: int = 1_000_000):
        self.body = body
        self.dim = body_dim(body)
        min_radius = enclosing_radius(body)
        if bounding_radius is None:
            bounding_radius = min_radius
        elif bounding_radius < min_radius * (1.0 - 1e-9):
            raise ValueError(
                f"bounding radius {bounding_radius} does not contain the body "
                f"(needs >= {min_radius})")
        if isinstance(body, TriangleMesh) and not body.is_closed:
            raise ValueError("chord sampling requires a closed mesh")
        self.bounding_radius = float(bounding_radius)
        self.proposal_cap = int(proposal_cap)
        self.proposal_count = 0
        self.acceptance_count = 0
        self.multi_hit_count = 0   # mesh lines with > 2 crossings (diagnostic)

    @property
    def acceptance_rate(self) -> float:
        return self.acceptance_count / self.proposal_count if self.proposal_count else math.nan

    def propose_batch(self, gen: np.random.Generator, size: int):
        """Kinematic lines hitting the bounding ball (no conditioning)."""
        U = uniform_sphere_points(self.dim, size, gen)
        P = _perp_offsets(U, self.bounding_radius, gen)
        return P, U

    def sample_lines_batch(self, gen: np.random.Generator, size: int):
        """Exactly `size` accepted lines, with their entry/exit parameters."""
        got_P, got_U, got_t1, got_t2 = [], [], [], []
        remaining = size
        consecutive_miss = 0
        rate_guess = 1.0
        while remaining > 0:
            batch = int(min(max(remaining / max(rate_guess, 1e-3), remaining), 2_000_000))
            P, U = self.propose_batch(gen, batch)
            hits = line_hits_batch(self.body, P, U)
            ok = hits.hit
            n_ok = int(ok.sum())
            self.proposal_count += batch
            self.acceptance_count += n_ok
            self.multi_hit_count += int(hits.multi.sum())
            if n_ok == 0:
                consecutive_miss += batch
                if consecutive_miss >= self.proposal_cap:
                    raise ProposalBudgetExceeded(
                        f"{consecutive_miss} consecutive proposals missed the body; "
                        "check the body and bounding radius")
                continue
            consecutive_miss = 0
            take = min(n_ok, remaining)
            idx = np.nonzero(ok)[0][:take]
            # counters tally whole batches (all proposals, all acceptances),
            # so the acceptance ratio stays an unbiased binomial estimate
            # even when only a prefix of accepted lines is consumed
            got_P.append(P[idx])
            got_U.append(U[idx])
            got_t1.append(hits.t_enter[idx])
            got_t2.append(hits.t_exit[idx])
            remaining -= take
            rate_guess = max(n_ok / batch, 1e-3)
        return (np.concatenate(got_P), np.concatenate(got_U),
                np.concatenate(got_t1), np.concatenate(got_t2))

    def sample_chords_batch(self, gen: np.random.Generator, size: int):
        """Entry/exit point arrays (X, Y) plus line data (P, U)."""
        P, U, t1, t2 = self.sample_lines_batch(gen, size)
        X = P + t1[:, None] * U
        Y = P + t2[:, None] * U
        return X, Y, U, P

    def sample_line(self, rng) -> DirectedLine:
        P, U, _, _ = self.sample_lines_batch(as_generator(rng), 1)
        return DirectedLine(P[0], U[0])

    def sample_chord(self, rng) -> ChordSample:
        P, U, t1, t2 = self.sample_lines_batch(as_generator(rng), 1)
        line = DirectedLine(P[0], U[0])
        return ChordSample(line, line.at(float(t1[0])), line.at(float(t2[0])))


def sample_kinematic_line(sampler: KinematicLineSampler, rng) -> DirectedLine:
    return sampler.sample_line(rng)


def sample_chord(sampler: KinematicLineSampler, rng) -> ChordSample:
    return sampler.sample_chord(rng)


# ---------------------------------------------------------------------------
# surface and patch sampling
# ---------------------------------------------------------------------------

def surface_points(body: ConvexBody, size: int, gen: np.random.Generator) -> np.ndarray:
    """Points distributed by (normalized) surface area measure on the boundary."""
    if isinstance(body, Sphere):
        return body.center + body.radius * uniform_sphere_points(body.dim, size, gen)
    if isinstance(body, TransformedBody):
        return body.to_world(surface_points(body.base, size, gen))
    if isinstance(body, Ellipsoid):
        return _ellipsoid_surface_points(body, size, gen)
    if isinstance(body, TriangleMesh):
        return _mesh_surface_points(body, size, gen)
    if isinstance(body, ImplicitConvex):
        return _implicit_surface_points(body, size, gen)
    raise TypeError(f"not a convex body: {type(body)!r}")


def _ellipsoid_surface_points(body: Ellipsoid, size: int, gen) -> np.ndarray:
    """Map sphere samples through the axis scaling and reject against the
    area Jacobian ||(prod_{j!=i} a_j) u_i||, whose supremum is attained at a
    coordinate pole."""
    a = body.semi_axes
    prod = np.prod(a)
    cof = prod / a                      # cofactor row: area scale per coordinate
    w_sup = float(cof.max())
    out = []
    need = size
    while need > 0:
        m = max(2 * need, 1024)
        u = uniform_sphere_points(body.dim, m, gen)
        w = np.sqrt(np.sum((cof * u) ** 2, axis=1))
        keep = gen.random(m) * w_sup <= w
        pts = (u * a)[keep]
        out.append(pts[:need])
        need -= len(pts[:need])
    return np.concatenate(out)


def _mesh_surface_points(mesh: TriangleMesh, size: int, gen) -> np.ndarray:
    areas = mesh.face_areas
    probs = areas / areas.sum()
    faces = gen.choice(len(probs), size=size, p=probs)
    r1 = np.sqrt(gen.random(size))
    r2 = gen.random(size)
    a = mesh.vertices[mesh.faces[faces, 0]]
    b = mesh.vertices[mesh.faces[faces, 1]]
    c = mesh.vertices[mesh.faces[faces, 2]]
    return (1 - r1)[:, None] * a + (r1 * (1 - r2))[:, None] * b + (r1 * r2)[:, None] * c


def _implicit_surface_points(body: ImplicitConvex, size: int, gen) -> np.ndarray:
    """Radial parametrization x = rho(w) w with area weight
    rho^(n-1) / <normal, w>, rejection-sampled against a pilot supremum."""
    n = body.dim
    sup = None
    out = []
    need = size
    while need > 0:
        m = max(2 * need, 1024)
        w = uniform_sphere_points(n, m, gen)
        rho = _radial_boundary(body, w)
        x = rho[:, None] * w
        grad = np.asarray(body.gradient(x), dtype=float)
        nrm = grad / np.linalg.norm(grad, axis=1)[:, None]
        cos = np.abs(np.sum(nrm * w, axis=1))
        weight = rho ** (n - 1) / np.maximum(cos, 1e-12)
        if sup is None:
            sup = 1.5 * float(weight.max())
        if float(weight.max()) > sup:   # pilot bound violated: restart larger
            sup = 1.5 * float(weight.max())
            out, need = [], size
            continue
        keep = gen.random(m) * sup <= weight
        pts = x[keep]
        out.append(pts[:need])
        need -= len(pts[:need])
    return np.concatenate(out)


def _radial_boundary(body: ImplicitConvex, w: np.ndarray, iters: int = 60) -> np.ndarray:
    """Boundary radius along each outward direction (g(0) < 0 guaranteed)."""
    lo = np.zeros(len(w))
    hi = np.full(len(w), 1.001 * body.bounding_radius)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = np.asarray(body.fn(mid[:, None] * w), dtype=float) < 0.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def uniform_patch_points(patch: SurfacePatch, size: int,
                         gen: np.random.Generator) -> np.ndarray:
    """Points by surface measure restricted to the patch (rejection)."""
    out = []
    need = size
    drawn = 0
    kept = 0
    while need > 0:
        m = max(2 * need, 4096)
        pts = surface_points(patch.body, m, gen)
        mask = patch_mask(patch, pts)
        drawn += m
        kept += int(mask.sum())
        good = pts[mask]
        out.append(good[:need])
        need -= len(good[:need])
        if drawn >= 1_000_000 and kept / drawn < _MIN_PATCH_MEASURE:
            raise RejectionBudgetExceeded(
                f"patch acceptance {kept}/{drawn} below {_MIN_PATCH_MEASURE}; "
                "the patch measure is too small for rejection sampling")
    return np.concatenate(out)


def uniform_patch_point(patch: SurfacePatch, rng) -> np.ndarray:
    return uniform_patch_points(patch, 1, as_generator(rng))[0]
