"""Line-boundary intersection: closed forms, implicit root finding,
watertight mesh counting, and patch hit counts."""

import math

import numpy as np
import pytest

import croftonkit as ck
from croftonkit.cli import _IMPLICIT_REGISTRY, _register_builtin_implicits
from croftonkit.errors import NonConvexityDetected, TangentialContact
from croftonkit.intersect import line_hits_batch
from croftonkit.rng import RandomStream
from croftonkit.sampling import KinematicLineSampler

S2 = ck.Sphere(3)
_register_builtin_implicits()
BALL = _IMPLICIT_REGISTRY["unitball"]
QUARTIC = _IMPLICIT_REGISTRY["quartic"]


def _random_canonical_lines(n, seed=0, radius=1.0):
    smp = KinematicLineSampler(S2, bounding_radius=radius)
    return smp.propose_batch(RandomStream(seed, 0).generator(), n)


# --- spheres -----------------------------------------------------------------

def test_sphere_axis_chord():
    line = ck.DirectedLine.through([0, 0, 0], [0, 0, 1])
    rec = ck.intersect_sphere(line)
    assert rec.n_transversal == 2
    np.testing.assert_allclose(rec.points[0], [0, 0, -1], atol=1e-14)
    np.testing.assert_allclose(rec.points[1], [0, 0, 1], atol=1e-14)
    assert rec.params[0] < rec.params[1]


def test_sphere_miss():
    line = ck.DirectedLine.through([2.0, 0, 0], [0, 0, 1])
    rec = ck.intersect_sphere(line)
    assert rec.n_transversal == 0 and not rec.tangential


def test_sphere_chord_length_pythagoras():
    # offset 0.6 chord: 2*sqrt(1 - 0.36) = 1.6
    line = ck.DirectedLine.through([0.6, 0, 0], [0, 1, 0])
    rec = ck.intersect_sphere(line)
    assert np.linalg.norm(rec.points[1] - rec.points[0]) == pytest.approx(1.6, abs=1e-12)


def test_sphere_tangency_flagged():
    line = ck.DirectedLine.through([1.0, 0, 0], [0, 0, 1])
    rec = ck.intersect_sphere(line)
    assert rec.tangential and rec.n_transversal == 0


# --- ellipsoids ---------------------------------------------------------------

def test_ellipsoid_axis_hits():
    ax = [1.0, 1.0, 1.5]
    z_line = ck.DirectedLine.through([0, 0, 0], [0, 0, 1])
    rec = ck.intersect_ellipsoid(z_line, ax)
    np.testing.assert_allclose(rec.points[1], [0, 0, 1.5], atol=1e-14)
    x_line = ck.DirectedLine.through([0, 0, 0], [1, 0, 0])
    rec = ck.intersect_ellipsoid(x_line, ax)
    np.testing.assert_allclose(rec.points[1], [1, 0, 0], atol=1e-14)


def test_ellipsoid_hits_on_surface():
    axes = np.array([1.0, 1.0, 1.5])
    P, U = _random_canonical_lines(2000, seed=3, radius=1.5)
    hits = line_hits_batch(ck.Ellipsoid(axes), P, U)
    for t in (hits.t_enter[hits.hit], hits.t_exit[hits.hit]):
        pts = P[hits.hit] + t[:, None] * U[hits.hit]
        resid = np.abs(np.sum((pts / axes) ** 2, axis=1) - 1.0)
        assert resid.max() < 1e-9


# --- implicit bodies ----------------------------------------------------------

def test_implicit_matches_closed_form_sphere():
    P, U = _random_canonical_lines(10_000, seed=7)
    ref = line_hits_batch(S2, P, U)
    imp = line_hits_batch(BALL, P, U)
    # stay clear of the tangent band where the codes may legitimately differ
    offs = np.linalg.norm(P, axis=1)
    clear = np.abs(offs - 1.0) > 1e-6
    assert np.array_equal(ref.hit[clear], imp.hit[clear])
    both = ref.hit & imp.hit & clear
    assert np.abs(ref.t_enter[both] - imp.t_enter[both]).max() < 1e-10
    assert np.abs(ref.t_exit[both] - imp.t_exit[both]).max() < 1e-10


def test_implicit_matches_ellipsoid():
    def fn(x):
        x = np.asarray(x, dtype=float)
        return x[..., 0] ** 2 + x[..., 1] ** 2 + x[..., 2] ** 2 / 2.25 - 1.0

    def grad(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x / np.array([1.0, 1.0, 2.25])

    body = ck.ImplicitConvex(fn, grad, bounding_radius=1.5, name="ell")
    P, U = _random_canonical_lines(2000, seed=11, radius=1.5)
    ref = line_hits_batch(ck.Ellipsoid([1, 1, 1.5]), P, U)
    imp = line_hits_batch(body, P, U)
    both = ref.hit & imp.hit
    assert both.sum() > 100
    assert np.abs(ref.t_enter[both] - imp.t_enter[both]).max() < 1e-10


def test_implicit_quartic_axis_roots():
    # oracle: real roots of s^4 - 1
    roots = np.roots([1, 0, 0, 0, -1])
    expected = np.sort(roots[np.isreal(roots)].real)
    line = ck.DirectedLine.through([0, 0, 0], [1, 0, 0])
    rec = ck.intersect_implicit(line, QUARTIC)
    np.testing.assert_allclose(rec.params, expected, atol=1e-11)


def test_implicit_tangency_flagged():
    line = ck.DirectedLine.through([1.0, 0, 0], [0, 0, 1])
    rec = ck.intersect_implicit(line, BALL)
    assert rec.tangential and rec.n_transversal == 0


def test_nonconvexity_detected():
    # self-intersecting torus ("apple" with a polar dimple): horizontal lines
    # just above the dimple cross the surface four times
    def fn(x):
        x = np.asarray(x, dtype=float)
        rho = np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2)
        return (rho - 0.7) ** 2 + x[..., 2] ** 2 - 0.5625

    def grad(x):
        x = np.asarray(x, dtype=float)
        rho = max(math.hypot(x[0], x[1]), 1e-12)
        f = 2.0 * (rho - 0.7) / rho
        return np.array([f * x[0], f * x[1], 2.0 * x[2]])

    apple = ck.ImplicitConvex(fn, grad, bounding_radius=1.6, name="apple")
    line = ck.DirectedLine.through([0.0, 0.0, 0.5], [1.0, 0, 0])
    with pytest.raises(NonConvexityDetected):
        ck.intersect_implicit(line, apple)


# --- meshes --------------------------------------------------------------------

def test_cube_axis_line_dedup():
    # the x axis exits through face centers, which lie on shared diagonal
    # edges of the triangulation: ownership must count each crossing once
    cube = ck.cube_mesh(1.0)
    line = ck.DirectedLine.through([0, 0, 0], [1, 0, 0])
    rec = ck.intersect_mesh(line, cube)
    assert rec.n_transversal == 2
    np.testing.assert_allclose(sorted(p[0] for p in rec.points), [-0.5, 0.5], atol=1e-12)


def test_cube_vertex_diagonal_dedup():
    cube = ck.cube_mesh(1.0)
    line = ck.DirectedLine.through([0, 0, 0], np.array([1.0, 1, 1]) / math.sqrt(3))
    rec = ck.intersect_mesh(line, cube)
    assert rec.n_transversal == 2


def test_cube_miss():
    cube = ck.cube_mesh(1.0)
    line = ck.DirectedLine.through([2.0, 0, 0], [0, 0, 1])
    rec = ck.intersect_mesh(line, cube)
    assert rec.n_transversal == 0


# --- patch hit counting -----------------------------------------------------------

def test_count_patch_hits_examples():
    whole = ck.whole_boundary(S2)
    hemi = ck.cap_patch(S2, [0, 0, 1], 0.0)
    z_line = ck.DirectedLine.through([0, 0, 0], [0, 0, 1])
    x_line = ck.DirectedLine.through([0, 0, 0], [1, 0, 0])
    assert ck.count_patch_hits(z_line, whole) == 2
    assert ck.count_patch_hits(z_line, hemi) == 1
    # closed-cap tie-break: both (+-1, 0, 0) have height exactly 0, inside
    assert ck.count_patch_hits(x_line, hemi) == 2


def test_count_patch_hits_tangential_propagates():
    line = ck.DirectedLine.through([1.0, 0, 0], [0, 0, 1])
    with pytest.raises(TangentialContact):
        ck.count_patch_hits(line, ck.whole_boundary(S2))


def test_complement_counts_sum_to_two():
    cap = ck.cap_patch(S2, [0, 0, 1], 0.3)
    cocap = ck.patch_complement(cap)
    P, U = _random_canonical_lines(500, seed=5)
    hits = line_hits_batch(S2, P, U)
    for i in np.nonzero(hits.hit)[0][:200]:
        line = ck.DirectedLine(P[i], U[i])
        assert ck.count_patch_hits(line, cap) + ck.count_patch_hits(line, cocap) == 2


def test_patch_hit_monotonicity():
    inner = ck.cap_patch(S2, [0, 0, 1], 0.7)
    outer = ck.cap_patch(S2, [0, 0, 1], 0.3)
    P, U = _random_canonical_lines(500, seed=6)
    hits = line_hits_batch(S2, P, U)
    for i in np.nonzero(hits.hit)[0][:200]:
        line = ck.DirectedLine(P[i], U[i])
        assert ck.count_patch_hits(line, inner) <= ck.count_patch_hits(line, outer)


def test_transformed_body_intersection():
    # rotate+translate the ellipsoid; world-frame hit points must satisfy the
    # pulled-back equation
    theta = 0.7
    R = np.array([[math.cos(theta), -math.sin(theta), 0],
                  [math.sin(theta), math.cos(theta), 0],
                  [0, 0, 1.0]])
    body = ck.TransformedBody(ck.Ellipsoid([1, 1, 1.5]), R, np.array([0.2, -0.1, 0.3]))
    line = ck.DirectedLine.through([0.1, 0.2, 0.0], [0, 0, 1])
    rec = ck.intersect_line(line, body)
    assert rec.n_transversal == 2
    for p in rec.points:
        local = body.to_local(p)
        assert abs(np.sum((local / np.array([1, 1, 1.5])) ** 2) - 1) < 1e-9
    # params measured along the world line
    for t, p in zip(rec.params, rec.points):
        np.testing.assert_allclose(line.at(t), p, atol=1e-9)
