"""Exact geometry: caps, measures, patch algebra, canonical lines."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import croftonkit as ck
from croftonkit.geometry import as_vec, sphere_cap_sigma

S2 = ck.Sphere(3)


# --- cap areas -------------------------------------------------------------

def test_cap_area_values():
    assert ck.cap_area_exact(1.0) == 0.0
    assert ck.cap_area_exact(0.5) == pytest.approx(math.pi, abs=1e-15)
    assert ck.cap_area_exact(-1.0) == pytest.approx(4 * math.pi, abs=1e-15)


def test_cap_area_domain():
    with pytest.raises(ValueError):
        ck.cap_area_exact(1.5)
    with pytest.raises(ValueError):
        ck.cap_area_exact(-1.0000001)


@given(st.floats(min_value=-1.0, max_value=1.0))
@settings(max_examples=50, deadline=None)
def test_cap_area_complement(t):
    # the cap above height t and the cap below it tile the sphere
    below = ck.cap_area_exact(-t)     # {x3 <= t} is congruent to {x3 >= -t}
    assert ck.cap_area_exact(t) + below == pytest.approx(4 * math.pi, abs=1e-12)


# --- normalized cap measure ------------------------------------------------

def test_sigma_cap_s2():
    assert ck.sigma_exact(ck.cap_patch(S2, [0, 0, 1], 0.0)) == pytest.approx(0.5)
    assert ck.sigma_exact(ck.cap_patch(S2, [0, 0, 1], 0.5)) == pytest.approx(0.25)
    # agreement with the raw area law
    for t in (-0.7, -0.2, 0.3, 0.9):
        sig = ck.sigma_exact(ck.cap_patch(S2, [0, 1, 0], t))
        assert sig == pytest.approx(ck.cap_area_exact(t) / (4 * math.pi), abs=1e-14)


def test_sigma_cap_dim2_arccos():
    # circle arcs: closed form sigma = arccos(t)/pi
    for t in (-0.9, -0.3, 0.0, 0.4, 0.99):
        assert sphere_cap_sigma(2, t) == pytest.approx(math.acos(t) / math.pi, abs=1e-12)


@pytest.mark.parametrize("dim", [4, 5, 7])
@pytest.mark.parametrize("t", [-0.6, 0.0, 0.35, 0.8])
def test_sigma_cap_quadrature_oracle(dim, t):
    # independent oracle: the cap density on heights is (1-s^2)^((n-3)/2)
    dens = lambda s: (1.0 - s * s) ** ((dim - 3) / 2.0)
    num, _ = integrate.quad(dens, t, 1.0)
    den, _ = integrate.quad(dens, -1.0, 1.0)
    assert sphere_cap_sigma(dim, t) == pytest.approx(num / den, abs=1e-10)


def test_sigma_boolean_algebra_shared_axis():
    axis = [0, 0, 1]
    big = ck.cap_patch(S2, axis, 0.0)
    small = ck.cap_patch(S2, axis, 0.5)
    band = ck.patch_intersection(big, ck.patch_complement(small))
    assert ck.sigma_exact(band) == pytest.approx(0.25, abs=1e-14)
    # disjoint additivity
    union = ck.patch_union(small, band)
    assert ck.sigma_exact(union) == pytest.approx(
        ck.sigma_exact(small) + ck.sigma_exact(band), abs=1e-12)
    # antipodal caps reduce through the flipped axis
    south = ck.cap_patch(S2, [0, 0, -1], 0.5)
    both = ck.patch_union(small, south)
    assert ck.sigma_exact(both) == pytest.approx(0.5, abs=1e-14)


def test_sigma_complement():
    p = ck.cap_patch(S2, [1, 0, 0], 0.3)
    assert ck.sigma_exact(ck.patch_complement(p)) == pytest.approx(
        1.0 - ck.sigma_exact(p), abs=1e-14)


def test_sigma_whole_and_halfspace():
    assert ck.sigma_exact(ck.whole_boundary(S2)) == 1.0
    # half-space traces are caps on the sphere
    hs = ck.half_space_patch(S2, [0, 0, 2.0], 1.0)   # <w,x> >= 1, |w|=2 -> t=0.5
    assert ck.sigma_exact(hs) == pytest.approx(0.25, abs=1e-14)


def test_sigma_not_available():
    mixed = ck.patch_union(ck.cap_patch(S2, [0, 0, 1], 0.5),
                           ck.cap_patch(S2, [1, 0, 0], 0.5))
    assert ck.sigma_exact(mixed) is None
    partial_box = ck.lat_lon_patch(S2, (0.0, 0.5), (0.0, 1.0))
    assert ck.sigma_exact(partial_box) is None


def test_sigma_full_longitude_box_is_band():
    box = ck.lat_lon_patch(S2, (0.0, math.pi / 2), (-math.pi, math.pi))
    assert ck.sigma_exact(box) == pytest.approx(0.5, abs=1e-12)


def test_sigma_requires_sphere():
    with pytest.raises(ValueError):
        ck.sigma_exact(ck.whole_boundary(ck.Ellipsoid([1, 1, 1.5])))


# --- total surface areas ----------------------------------------------------

def test_surface_area_sphere():
    assert ck.surface_area_exact(S2) == pytest.approx(4 * math.pi)
    assert ck.surface_area_exact(ck.Sphere(3, radius=2)) == pytest.approx(16 * math.pi)
    assert ck.surface_area_exact(ck.Sphere(4)) == pytest.approx(2 * math.pi ** 2)


def test_surface_area_mesh_and_not_available():
    assert ck.surface_area_exact(ck.cube_mesh(1.0)) == pytest.approx(6.0)
    assert ck.surface_area_exact(ck.Ellipsoid([1, 1, 1.5])) is None


def test_surface_area_degenerate_face():
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 0, 0]], dtype=float)
    faces = np.array([[0, 1, 2], [0, 1, 3]])   # second face has zero area
    mesh = ck.TriangleMesh(verts, faces)
    with pytest.raises(ValueError, match="zero-area"):
        ck.surface_area_exact(mesh)


# --- membership ---------------------------------------------------------

def test_patch_contains_examples():
    cap = ck.cap_patch(S2, [0, 0, 1], 0.5)
    assert ck.patch_contains(cap, [0, 0, 1]) is True
    assert ck.patch_contains(cap, [1, 0, 0]) is False
    assert ck.patch_contains(ck.patch_complement(cap), [1, 0, 0]) is True


def test_patch_contains_closed_boundary():
    # heights exactly at the threshold are inside (caps are closed)
    cap = ck.cap_patch(S2, [0, 0, 1], 0.0)
    assert ck.patch_contains(cap, [1, 0, 0]) is True


def test_patch_contains_rejects_off_surface():
    cap = ck.cap_patch(S2, [0, 0, 1], 0.5)
    with pytest.raises(ValueError, match="boundary"):
        ck.patch_contains(cap, [0, 0, 1.1])


def test_latlon_membership_wraparound():
    box = ck.lat_lon_patch(S2, (-0.5, 0.5), (math.pi * 0.75, -math.pi * 0.75))
    assert ck.patch_contains(box, [-1, 0, 0]) is True   # lon = pi
    assert ck.patch_contains(box, [1, 0, 0]) is False   # lon = 0


def test_cap_on_nonsphere_rejected():
    ell = ck.Ellipsoid([1, 1, 1.5])
    patch = ck.SurfacePatch(ell, ck.Cap(np.array([0.0, 0, 1]), 0.5))
    with pytest.raises(ValueError, match="sphere"):
        ck.patch_contains(patch, [0, 0, 1.5])


# --- vectors and lines ---------------------------------------------------

def test_as_vec_validation():
    with pytest.raises(ValueError):
        as_vec([1.0])                  # too short
    with pytest.raises(ValueError):
        as_vec([1.0, math.nan, 0.0])   # non-finite
    with pytest.raises(ValueError):
        as_vec([[1.0, 2.0]])           # not 1-D


def test_directed_line_validation():
    with pytest.raises(ValueError):
        ck.DirectedLine(np.array([0.0, 0, 0]), np.array([0.0, 0, 2.0]))
    with pytest.raises(ValueError):
        ck.DirectedLine(np.array([0.0, 0, 1.0]), np.array([0.0, 0, 1.0]))


vec3 = st.lists(st.floats(-10, 10), min_size=3, max_size=3).map(np.asarray)


@given(vec3, vec3)
@settings(max_examples=100, deadline=None)
def test_canonicalization_idempotent(p, d):
    if np.linalg.norm(d) < 1e-3:
        return
    line = ck.DirectedLine.through(p, d)
    again = line.canonical()
    assert np.allclose(line.point, again.point, atol=1e-12)
    assert np.allclose(line.direction, again.direction, atol=1e-15)
    assert abs(line.point @ line.direction) <= 1e-12 * max(1, np.linalg.norm(line.point))


def test_transformed_body_validation():
    with pytest.raises(ValueError):
        ck.TransformedBody(S2, np.eye(3) * 2.0, np.zeros(3))    # not orthonormal
    flip = np.diag([-1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        ck.TransformedBody(S2, flip, np.zeros(3))               # det -1
