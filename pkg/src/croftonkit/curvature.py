"""Boundary differential geometry: outward normals, second fundamental
forms, principal curvatures, the chord-endpoint kernel

    F(x, y) = |<n(x), y-x>| |<n(y), x-y>| / ||x-y||^(n+1),

its short-range asymptotic, and the composite sphere certificate (kernel
constancy + umbilicity), which together single out round spheres in R^3
among smooth convex bodies."""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (ConvexBody, Ellipsoid, ImplicitConvex, Sphere,
                       SurfacePatch, TransformedBody, TriangleMesh, as_vec,
                       body_diameter, body_dim, boundary_gap, on_boundary)
from .intersect import line_hits_batch
from .rng import RandomStream, as_generator
from .sampling import surface_points

_KERNEL_GUARD_REL = 1e-6   # minimum pair separation, relative to body diameter
_FD_STEP_REL = 1e-4        # finite-difference step, relative to body scale


# ---------------------------------------------------------------------------
# normals
# ---------------------------------------------------------------------------

def normals_batch(body: ConvexBody, X: np.ndarray) -> np.ndarray:
    """Outward unit normals at boundary points (no surface check)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(body, Sphere):
        d = X - body.center
        return d / np.linalg.norm(d, axis=1)[:, None]
    if isinstance(body, Ellipsoid):
        g = X / body.semi_axes**2
        return g / np.linalg.norm(g, axis=1)[:, None]
    if isinstance(body, ImplicitConvex):
        g = np.asarray(body.gradient(X), dtype=float)
        return g / np.linalg.norm(g, axis=1)[:, None]
    if isinstance(body, TransformedBody):
        return normals_batch(body.base, body.to_local(X)) @ body.rotation.T
    if isinstance(body, TriangleMesh):
        return np.vstack([_mesh_normal(body, x) for x in X])
    raise TypeError(f"not a convex body: {type(body)!r}")


def _mesh_normal(mesh: TriangleMesh, x: np.ndarray) -> np.ndarray:
    """Normal of the face containing x (smallest face index on ties)."""
    a = mesh.vertices[mesh.faces[:, 0]]
    b = mesh.vertices[mesh.faces[:, 1]]
    c = mesh.vertices[mesh.faces[:, 2]]
    n = np.cross(b - a, c - a)
    n_len = np.linalg.norm(n, axis=1)
    plane_gap = np.abs(np.sum((x[None, :] - a) * n, axis=1)) / np.maximum(n_len, 1e-300)
    tol = 1e-9 * 2.0 * mesh.enclosing_radius
    # barycentric containment with a small slack, among near-plane faces
    ab, ac, ap = b - a, c - a, x[None, :] - a
    d00 = np.sum(ab * ab, axis=1)
    d01 = np.sum(ab * ac, axis=1)
    d11 = np.sum(ac * ac, axis=1)
    d20 = np.sum(ap * ab, axis=1)
    d21 = np.sum(ap * ac, axis=1)
    den = d00 * d11 - d01 * d01
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (d11 * d20 - d01 * d21) / den
        w = (d00 * d21 - d01 * d20) / den
    ok = (plane_gap <= tol) & (v >= -1e-9) & (w >= -1e-9) & (v + w <= 1 + 1e-9)
    idx = np.nonzero(ok)[0]
    if idx.size == 0:
        raise ValueError("point is not on the mesh surface")
    fi = int(idx.min())
    return n[fi] / n_len[fi]


def normal_at(body: ConvexBody, x) -> np.ndarray:
    """Outward unit normal at a boundary point."""
    x = as_vec(x, body_dim(body))
    if not on_boundary(body, x):
        raise ValueError(
            f"point is off the surface (gap {boundary_gap(body, x):.3e})")
    return normals_batch(body, x[None, :])[0]


def tangent_frame(normal: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the normal's orthogonal complement,
    returned as (n-1) rows (Householder reflection mapping e_n to the normal)."""
    nu = as_vec(normal)
    n = nu.size
    e = np.zeros(n)
    e[-1] = 1.0
    v = e - nu
    vn = np.linalg.norm(v)
    if vn < 1e-9:
        return np.eye(n)[:-1]
    v = v / vn
    H = np.eye(n) - 2.0 * np.outer(v, v)   # maps e_n -> nu
    return H[:, :-1].T


# ---------------------------------------------------------------------------
# second fundamental form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SecondFundamentalForm:
    """Quadratic coefficient of the boundary's graph over its tangent plane,
    height measured along the outward normal; negative semi-definite for a
    convex body (a unit sphere gives -Identity)."""

    base_point: np.ndarray
    normal: np.ndarray
    frame: np.ndarray       # (n-1, n) orthonormal tangent rows
    matrix: np.ndarray      # (n-1, n-1) symmetric

    def __post_init__(self):
        Q = np.asarray(self.matrix, dtype=float)
        if np.max(np.abs(Q - Q.T)) > 1e-9 * max(1.0, np.abs(Q).max()):
            raise ValueError("form matrix must be symmetric")


def _implicit_style_form(grad: np.ndarray, hess: np.ndarray,
                         frame: np.ndarray) -> np.ndarray:
    # graph height h(z) = -II(z, z)/2 with II = Hess g|_T / |grad g|
    return -(frame @ hess @ frame.T) / float(np.linalg.norm(grad))


def second_fundamental_form(body: ConvexBody, x, frame: np.ndarray | None = None
                            ) -> SecondFundamentalForm:
    """Analytic second fundamental form in an orthonormal tangent frame."""
    x = as_vec(x, body_dim(body))
    if isinstance(body, TriangleMesh):
        raise ValueError("meshes are not C^2; no second fundamental form")
    if not on_boundary(body, x):
        raise ValueError(
            f"point is off the surface (gap {boundary_gap(body, x):.3e})")
    if isinstance(body, TransformedBody):
        local = second_fundamental_form(body.base, body.to_local(x),
                                        None if frame is None else frame @ body.rotation)
        return SecondFundamentalForm(x, local.normal @ body.rotation.T,
                                     local.frame @ body.rotation.T, local.matrix)
    nu = normals_batch(body, x[None, :])[0]
    if frame is None:
        frame = tangent_frame(nu)
    else:
        frame = np.asarray(frame, dtype=float)
        if np.max(np.abs(frame @ frame.T - np.eye(len(frame)))) > 1e-9 \
                or np.max(np.abs(frame @ nu)) > 1e-9:
            raise ValueError("frame must be orthonormal and tangent")
    if isinstance(body, Sphere):
        Q = -np.eye(body.dim - 1) / body.radius
    elif isinstance(body, Ellipsoid):
        grad = 2.0 * x / body.semi_axes**2
        hess = 2.0 * np.diag(1.0 / body.semi_axes**2)
        Q = _implicit_style_form(grad, hess, frame)
    elif isinstance(body, ImplicitConvex):
        if body.hessian is None:
            raise ValueError("implicit body lacks a Hessian oracle")
        grad = np.asarray(body.gradient(x), dtype=float)
        hess = np.asarray(body.hessian(x), dtype=float)
        Q = _implicit_style_form(grad, hess, frame)
    else:
        raise TypeError(f"not a convex body: {type(body)!r}")
    return SecondFundamentalForm(x, nu, frame, 0.5 * (Q + Q.T))


def boundary_point_above(body: ConvexBody, x: np.ndarray, offset: np.ndarray
                         ) -> np.ndarray:
    """Boundary point over x + offset, along the normal direction at x
    (the local-graph construction)."""
    nu = normals_batch(body, np.atleast_2d(x))[0]
    base = np.asarray(x, dtype=float) + np.asarray(offset, dtype=float)
    hits = line_hits_batch(body, base[None, :], nu[None, :])
    if not bool(hits.hit[0]):
        raise ValueError("graph query line misses the body; offset too large")
    t1, t2 = float(hits.t_enter[0]), float(hits.t_exit[0])
    s = t1 if abs(t1) <= abs(t2) else t2
    return base + s * nu


def second_fundamental_form_fd(body: ConvexBody, x, step: float | None = None,
                               frame: np.ndarray | None = None
                               ) -> SecondFundamentalForm:
    """Finite-difference cross-check of the form: central second differences
    of the boundary's graph height over the tangent plane."""
    x = as_vec(x, body_dim(body))
    nu = normals_batch(body, x[None, :])[0]
    if frame is None:
        frame = tangent_frame(nu)
    h = step if step is not None else _FD_STEP_REL * 0.5 * body_diameter(body)
    m = len(frame)

    def height(z):
        p = boundary_point_above(body, x, z @ frame)
        return float((p - x) @ nu)

    Q = np.empty((m, m))
    for i in range(m):
        ei = np.zeros(m)
        ei[i] = h
        Q[i, i] = (height(ei) + height(-ei)) / h**2
        for j in range(i + 1, m):
            ej = np.zeros(m)
            ej[j] = h
            Q[i, j] = Q[j, i] = (height(ei + ej) - height(ei - ej)
                                 - height(-ei + ej) + height(-ei - ej)) / (4 * h**2)
    return SecondFundamentalForm(x, nu, frame, 0.5 * (Q + Q.T))


def principal_curvatures(form: SecondFundamentalForm) -> np.ndarray:
    """Eigenvalues of the form matrix, ascending (most negative first)."""
    return np.linalg.eigvalsh(form.matrix)


def umbilic_defect(form: SecondFundamentalForm) -> float:
    """|lambda_1 - lambda_2| / |lambda_1 + lambda_2| over the extreme pair."""
    lam = principal_curvatures(form)
    spread = float(lam[-1] - lam[0])
    total = abs(float(lam[0] + lam[-1]))
    return spread / max(total, 1e-300)


# ---------------------------------------------------------------------------
# the chord-endpoint kernel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelSample:
    x: np.ndarray
    y: np.ndarray
    F_value: float


def kernel_values_batch(body: ConvexBody, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n = body_dim(body)
    d = Y - X
    dist = np.linalg.norm(d, axis=1)
    nx = normals_batch(body, X)
    ny = normals_batch(body, Y)
    num = np.abs(np.sum(nx * d, axis=1)) * np.abs(np.sum(ny * d, axis=1))
    return num / dist ** (n + 1)


def kernel_F(body: ConvexBody, x, y) -> float:
    """The kernel at one boundary pair; rejects near-coincident points
    (that regime belongs to kernel_local_asymptotic)."""
    x = as_vec(x, body_dim(body))
    y = as_vec(y, body_dim(body))
    sep = float(np.linalg.norm(y - x))
    guard = _KERNEL_GUARD_REL * body_diameter(body)
    if sep == 0.0:
        raise ValueError("kernel is undefined for coincident points")
    if sep < guard:
        raise ValueError(
            f"pair separation {sep:.3e} below the {guard:.3e} guard; "
            "use kernel_local_asymptotic for the short-range regime")
    return float(kernel_values_batch(body, x[None, :], y[None, :])[0])


def kernel_sample(body: ConvexBody, x, y) -> KernelSample:
    return KernelSample(np.asarray(x, float), np.asarray(y, float),
                        kernel_F(body, x, y))


def kernel_local_asymptotic(body: ConvexBody, x, tangent_dir,
                            eps_grid=None) -> list:
    """Short-range kernel scan along a tangent direction.

    Rows are (eps, F(x, y_eps), predicted) with y_eps the boundary point of
    the local graph over x + eps*v and

        predicted = (1/4) <Qv, v>^2 * eps^(3-n),

    the exact local limit: in dimension 3 the kernel tends to <Qv,v>^2/4
    (lambda^2/4 along an eigendirection), and for n != 3 it blows up or
    vanishes at rate eps^(3-n), which is what pins the dimension in the
    constancy argument."""
    x = as_vec(x, body_dim(body))
    n = body_dim(body)
    nu = normals_batch(body, x[None, :])[0]
    v = as_vec(tangent_dir, n)
    v = v - float(v @ nu) * nu
    nv = float(np.linalg.norm(v))
    if nv < 1e-12:
        raise ValueError("tangent direction is parallel to the normal")
    v = v / nv
    if eps_grid is None:
        eps_grid = np.geomspace(1e-1, 1e-3, 9)
    guard = _KERNEL_GUARD_REL * body_diameter(body)
    form = second_fundamental_form(body, x)
    qvv = float(v @ (form.frame.T @ form.matrix @ form.frame) @ v)
    rows = []
    for eps in np.asarray(eps_grid, dtype=float):
        if eps < guard:
            raise ValueError(f"eps {eps:.3e} below the kernel guard {guard:.3e}")
        y = boundary_point_above(body, x, eps * v)
        F = float(kernel_values_batch(body, x[None, :], y[None, :])[0])
        rows.append((float(eps), F, 0.25 * qvv * qvv * float(eps) ** (3 - n)))
    return rows


# ---------------------------------------------------------------------------
# sphere certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereCertificate:
    """Composite numerical test: a body passes iff the kernel is constant
    (small coefficient of variation over random pairs) and every sampled
    point is umbilic (small relative eigenvalue gap)."""

    kernel_cv: float
    max_umbilic_defect: float
    verdict: str                 # "SphereLike" | "NotSphere"
    cv_threshold: float
    defect_threshold: float
    n_pairs: int
    n_points: int
    seed: int
    kernel_mean: float

    def to_dict(self) -> dict:
        return {
            "kernel_cv": self.kernel_cv,
            "max_umbilic_defect": self.max_umbilic_defect,
            "verdict": self.verdict,
            "thresholds": {"kernel_cv": self.cv_threshold,
                           "umbilic_defect": self.defect_threshold},
            "n_pairs": self.n_pairs,
            "n_points": self.n_points,
            "seed": self.seed,
            "kernel_mean": self.kernel_mean,
        }


def sphere_certificate(body: ConvexBody, n_pairs: int = 10_000,
                       n_points: int = 256, seed: int = 42,
                       cv_threshold: float = 0.01,
                       defect_threshold: float = 0.01) -> SphereCertificate:
    if body_dim(body) != 3:
        raise ValueError("the sphere certificate is defined for bodies in R^3")
    if isinstance(body, TriangleMesh):
        raise ValueError("meshes are not C^2; the certificate needs curvature")
    stream = RandomStream(seed, stream_id=7)
    gen = stream.generator()
    guard = _KERNEL_GUARD_REL * body_diameter(body)

    X = surface_points(body, n_pairs, gen)
    Y = surface_points(body, n_pairs, gen)
    sep = np.linalg.norm(Y - X, axis=1)
    while np.any(sep < guard):       # coincident pairs are measure zero
        bad = sep < guard
        Y[bad] = surface_points(body, int(bad.sum()), gen)
        sep = np.linalg.norm(Y - X, axis=1)
    F = kernel_values_batch(body, X, Y)
    mean = float(F.mean())
    cv = float(F.std(ddof=1) / mean) if mean != 0 else math.inf

    pts = surface_points(body, n_points, gen)
    defect = max(umbilic_defect(second_fundamental_form(body, p)) for p in pts)

    ok = cv < cv_threshold and defect < defect_threshold
    return SphereCertificate(
        kernel_cv=cv, max_umbilic_defect=float(defect),
        verdict="SphereLike" if ok else "NotSphere",
        cv_threshold=cv_threshold, defect_threshold=defect_threshold,
        n_pairs=n_pairs, n_points=n_points, seed=seed, kernel_mean=mean)
