"""Samplers: uniform sphere/ball points, kinematic lines, chords, patches.

Stochastic assertions run at fixed seeds with 3-4 standard-error tolerances;
expected moments come from 1-d quadrature oracles computed in place."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

import croftonkit as ck
from conftest import assert_within
from croftonkit.errors import ProposalBudgetExceeded, RejectionBudgetExceeded
from croftonkit.estimators import build_cell_partition
from croftonkit.intersect import line_hits_batch
from croftonkit.rng import RandomStream
from croftonkit.sampling import (surface_points, uniform_ball_points,
                                 uniform_patch_points, uniform_sphere_points)

S2 = ck.Sphere(3)
N = 200_000


def gen(seed=0, stream=0):
    return RandomStream(seed, stream).generator()


# --- uniform points on spheres ------------------------------------------------

def test_sphere_points_unit_norm():
    pts = uniform_sphere_points(3, 10_000, gen())
    assert np.abs(np.linalg.norm(pts, axis=1) - 1.0).max() < 1e-12


def test_sphere_points_mean_near_zero():
    pts = uniform_sphere_points(3, N, gen(1))
    assert np.abs(pts.mean(axis=0)).max() < 4.0 / math.sqrt(N)


def test_sphere_points_height_second_moment():
    # oracle: heights are uniform on [-1,1] (hat-box), so E z^2 = int t^2/2 dt
    oracle, _ = integrate.quad(lambda t: t * t * 0.5, -1.0, 1.0)
    assert oracle == pytest.approx(1.0 / 3.0, abs=1e-12)
    z = uniform_sphere_points(3, N, gen(2))[:, 2]
    assert_within(float((z ** 2).mean()), oracle,
                  float((z ** 2).std() / math.sqrt(N)), label="E[z^2]")


def test_sphere_points_dim_validation():
    with pytest.raises(ValueError):
        uniform_sphere_points(1, 10, gen())


# --- uniform points in balls ---------------------------------------------------

def test_ball_points_radius_quantile():
    pts = uniform_ball_points(2, N, gen(3))
    r = np.linalg.norm(pts, axis=1)
    assert r.max() <= 1.0
    p = float((r <= 0.5).mean())
    assert_within(p, 0.25, math.sqrt(0.25 * 0.75 / N), label="P(|Z|<=1/2), m=2")


@pytest.mark.parametrize("m", [1, 2, 4, 9])
def test_ball_points_second_moment(m):
    # oracle: radial density m r^(m-1) gives E r^2 = m/(m+2)
    oracle, _ = integrate.quad(lambda r: r * r * m * r ** (m - 1), 0.0, 1.0)
    assert oracle == pytest.approx(m / (m + 2.0), abs=1e-12)
    pts = uniform_ball_points(m, N, gen(4 + m))
    r2 = np.sum(pts * pts, axis=1)
    assert_within(float(r2.mean()), oracle, float(r2.std() / math.sqrt(N)),
                  label=f"E|Z|^2, m={m}")


# --- kinematic line sampler -----------------------------------------------------

def test_acceptance_rate_tight_ball_is_one():
    smp = ck.KinematicLineSampler(S2, bounding_radius=1.0)
    smp.sample_lines_batch(gen(5), 50_000)
    assert smp.acceptance_rate == 1.0


def test_acceptance_rate_oversized_ball():
    smp = ck.KinematicLineSampler(S2, bounding_radius=2.0)
    smp.sample_lines_batch(gen(6), 50_000)
    p = smp.acceptance_rate
    assert_within(p, 0.25, math.sqrt(0.25 * 0.75 / smp.proposal_count),
                  label="acceptance r=2")


def test_acceptance_rate_scaling_dim4():
    r = 1.5
    smp = ck.KinematicLineSampler(ck.Sphere(4), bounding_radius=r)
    smp.sample_lines_batch(gen(7), 50_000)
    expected = (1.0 / r) ** 3
    assert_within(smp.acceptance_rate, expected,
                  math.sqrt(expected * (1 - expected) / smp.proposal_count),
                  label="acceptance (1/r)^(n-1)")


def test_accepted_lines_hit_twice():
    smp = ck.KinematicLineSampler(ck.Ellipsoid([1, 1, 1.5]))
    P, U, t1, t2 = smp.sample_lines_batch(gen(8), 5_000)
    hits = line_hits_batch(smp.body, P, U)
    assert bool(hits.hit.all())
    assert np.all(t2 > t1)


def test_bounding_radius_must_contain_body():
    with pytest.raises(ValueError):
        ck.KinematicLineSampler(ck.Ellipsoid([1, 1, 1.5]), bounding_radius=1.2)


def test_proposal_budget_error():
    smp = ck.KinematicLineSampler(S2, bounding_radius=500.0, proposal_cap=20_000)
    with pytest.raises(ProposalBudgetExceeded):
        smp.sample_lines_batch(gen(9), 10)


def test_open_mesh_rejected_for_chords():
    cube = ck.cube_mesh(1.0)
    open_mesh = ck.TriangleMesh(cube.vertices, cube.faces[:-1])
    with pytest.raises(ValueError, match="closed"):
        ck.KinematicLineSampler(open_mesh)


# --- chords ------------------------------------------------------------------------

def test_chord_midpoint_perpendicular():
    smp = ck.KinematicLineSampler(S2)
    X, Y, U, P = smp.sample_chords_batch(gen(10), 20_000)
    mid = 0.5 * (X + Y)
    assert np.abs(np.sum(mid * U, axis=1)).max() < 1e-9


def test_chord_length_cdf_value():
    smp = ck.KinematicLineSampler(S2)
    X, Y, _, _ = smp.sample_chords_batch(gen(11), N)
    p = float((np.linalg.norm(X - Y, axis=1) <= 1.0).mean())
    assert_within(p, 0.25, math.sqrt(0.25 * 0.75 / N), label="P(|X-Y|<=1)")


def _uniformity_chisq_p(points):
    part = build_cell_partition(S2, 6, 8)
    counts = np.bincount(part.classify(points), minlength=48)
    expected = len(points) / 48.0
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    return float(stats.chi2.sf(chi2, 47))


def test_entry_point_uniformity():
    smp = ck.KinematicLineSampler(S2)
    X, _, _, _ = smp.sample_chords_batch(gen(12), 100_000)
    assert _uniformity_chisq_p(X) > 0.001


def test_rotation_equivariance():
    # rotating the sampled entry points must leave the law unchanged: the
    # rotated cloud passes the same equal-cell uniformity test
    theta = 0.9
    R = np.array([[math.cos(theta), 0, math.sin(theta)],
                  [0, 1, 0],
                  [-math.sin(theta), 0, math.cos(theta)]])
    smp = ck.KinematicLineSampler(S2)
    X, _, _, _ = smp.sample_chords_batch(gen(13), 100_000)
    assert _uniformity_chisq_p(X @ R.T) > 0.001


def test_chord_sample_scalar_api():
    smp = ck.KinematicLineSampler(S2)
    chord = ck.sample_chord(smp, RandomStream(14, 0))
    assert abs(np.linalg.norm(chord.entry) - 1.0) < 1e-9
    assert abs(np.linalg.norm(chord.exit) - 1.0) < 1e-9
    assert (chord.exit - chord.entry) @ chord.line.direction > 0
    line = ck.sample_kinematic_line(smp, RandomStream(14, 1))
    assert abs(line.point @ line.direction) < 1e-12


def test_chord_sample_orientation_validated():
    line = ck.DirectedLine.through([0, 0, 0], [0, 0, 1.0])
    with pytest.raises(ValueError):
        ck.ChordSample(line, np.array([0, 0, 1.0]), np.array([0, 0, -1.0]))


def test_determinism_same_stream():
    a = ck.KinematicLineSampler(S2).sample_chords_batch(gen(15, 3), 10_000)
    b = ck.KinematicLineSampler(S2).sample_chords_batch(gen(15, 3), 10_000)
    for xa, xb in zip(a, b):
        assert np.array_equal(xa, xb)


def test_distinct_streams_differ():
    a = ck.KinematicLineSampler(S2).sample_chords_batch(gen(15, 0), 100)
    b = ck.KinematicLineSampler(S2).sample_chords_batch(gen(15, 1), 100)
    assert not np.allclose(a[0], b[0])


# --- patch sampling -----------------------------------------------------------------

def test_patch_points_cap_height_moment():
    # oracle: heights uniform on [0.5, 1] by the hat-box law -> mean 0.75
    cap = ck.cap_patch(S2, [0, 0, 1], 0.5)
    pts = uniform_patch_points(cap, N, gen(16))
    z = pts[:, 2]
    lo = 0.5
    oracle = integrate.quad(lambda t: t, lo, 1.0)[0] / (1.0 - lo)
    assert_within(float(z.mean()), oracle, float(z.std() / math.sqrt(N)),
                  label="cap E[z]")
    assert bool(np.all(z >= lo))


def test_patch_points_membership_postcondition():
    patch = ck.patch_union(ck.cap_patch(S2, [0, 0, 1], 0.8),
                           ck.cap_patch(S2, [1, 0, 0], 0.8))
    pts = uniform_patch_points(patch, 5_000, gen(17))
    from croftonkit.geometry import patch_mask
    assert bool(patch_mask(patch, pts).all())


def test_whole_boundary_matches_sphere_sampling():
    pts = uniform_patch_points(ck.whole_boundary(S2), 50_000, gen(18))
    assert np.abs(pts.mean(axis=0)).max() < 4.0 / math.sqrt(50_000) * math.sqrt(1 / 3.0) * 3


def test_tiny_patch_budget_error():
    sliver = ck.cap_patch(S2, [0, 0, 1], 1.0 - 1e-9)
    with pytest.raises(RejectionBudgetExceeded):
        uniform_patch_points(sliver, 10, gen(19))


def test_ellipsoid_patch_sampling_oracle():
    # axisymmetric area density over the sphere parameter reduces to 1-d:
    # w(s) = sqrt((a2 a3)^2 (1-s^2) + (a1 a2)^2 s^2), oracle for E[z^2 | z>0]
    a1 = a2 = 1.0
    a3 = 1.5
    ell = ck.Ellipsoid([a1, a2, a3])
    w = lambda s: math.sqrt((a2 * a3) ** 2 * (1 - s * s) + (a1 * a2) ** 2 * s * s)
    num = integrate.quad(lambda s: (a3 * s) ** 2 * w(s), 0.0, 1.0)[0]
    den = integrate.quad(w, 0.0, 1.0)[0]
    patch = ck.half_space_patch(ell, [0, 0, 1], 0.0)
    pts = uniform_patch_points(patch, 100_000, gen(20))
    z2 = pts[:, 2] ** 2
    assert_within(float(z2.mean()), num / den, float(z2.std() / math.sqrt(len(z2))),
                  label="ellipsoid patch E[z^2]")
    assert bool(np.all(pts[:, 2] >= 0))


def test_implicit_surface_sampling_matches_sphere():
    from croftonkit.cli import _IMPLICIT_REGISTRY, _register_builtin_implicits
    _register_builtin_implicits()
    pts = surface_points(_IMPLICIT_REGISTRY["unitball"], 100_000, gen(21))
    assert np.abs(np.linalg.norm(pts, axis=1) - 1.0).max() < 1e-9
    z2 = pts[:, 2] ** 2
    assert_within(float(z2.mean()), 1.0 / 3.0, float(z2.std() / math.sqrt(len(z2))),
                  label="implicit ball E[z^2]")


def test_mesh_surface_sampling_on_faces():
    cube = ck.cube_mesh(1.0)
    pts = surface_points(cube, 20_000, gen(22))
    # every sample lies on the cube surface: max-coordinate equals 0.5
    assert np.abs(np.abs(pts).max(axis=1) - 0.5).max() < 1e-12
    # face areas are equal, so each axis is extremal in ~1/3 of samples
    frac = (np.abs(np.abs(pts[:, 2]) - 0.5) < 1e-12).mean()
    assert_within(float(frac), 1.0 / 3.0, math.sqrt(1 / 3 * 2 / 3 / 20_000),
                  label="cube face balance", k=4)
