"""Mesh ingestion (OFF / minimal OBJ), validation, and counting properties."""

import math

import numpy as np
import pytest

import croftonkit as ck
from croftonkit.errors import MeshFormatError
from croftonkit.intersect import _mesh_hit_stats, line_hits_batch
from croftonkit.meshio import (cube_mesh, icosphere_mesh, load_mesh, save_obj,
                               save_off)
from croftonkit.rng import RandomStream
from croftonkit.sampling import KinematicLineSampler, uniform_sphere_points


def test_cube_off_round_trip(tmp_path):
    cube = cube_mesh(1.0)
    path = tmp_path / "cube.off"
    save_off(cube, path)
    loaded = load_mesh(path)
    np.testing.assert_array_equal(loaded.vertices, cube.vertices)
    np.testing.assert_array_equal(loaded.faces, cube.faces)
    assert loaded.is_closed
    assert ck.surface_area_exact(loaded) == pytest.approx(6.0)


def test_icosphere_obj_round_trip(tmp_path):
    ico = icosphere_mesh(2)
    assert len(ico.vertices) == 162 and len(ico.faces) == 320
    path = tmp_path / "icosphere.obj"
    save_obj(ico, path)
    loaded = load_mesh(path)
    assert loaded.is_closed
    np.testing.assert_allclose(loaded.vertices, ico.vertices, atol=1e-12)


def test_off_truncated_reports_line(tmp_path):
    path = tmp_path / "bad.off"
    path.write_text("OFF\n8 12 0\n0 0 0\n1 0 0\n")
    with pytest.raises(MeshFormatError, match=r"bad\.off:\d+"):
        load_mesh(path)


def test_off_non_triangle_rejected(tmp_path):
    path = tmp_path / "quad.off"
    path.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
    with pytest.raises(MeshFormatError, match="triangles"):
        load_mesh(path)


def test_obj_ignores_extras_and_slash_indices(tmp_path):
    path = tmp_path / "tri.obj"
    path.write_text(
        "# comment\no thing\nvn 0 0 1\nvt 0 0\n"
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2/2/1 3/3/1\n")
    mesh = load_mesh(path)
    assert len(mesh.vertices) == 3 and len(mesh.faces) == 1


def test_obj_bad_face_reports_line(tmp_path):
    path = tmp_path / "bad.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3 1\n")
    with pytest.raises(MeshFormatError, match=r"bad\.obj:4"):
        load_mesh(path)


def test_open_mesh_warns_and_blocks_chords(tmp_path):
    cube = cube_mesh(1.0)
    open_mesh = ck.TriangleMesh(cube.vertices, cube.faces[:-1])
    path = tmp_path / "open.off"
    save_off(open_mesh, path)
    with pytest.warns(UserWarning, match="open"):
        loaded = load_mesh(path)
    assert not loaded.is_closed
    with pytest.raises(ValueError, match="closed"):
        KinematicLineSampler(loaded)


def test_zero_area_face_warns(tmp_path):
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 0, 0]], dtype=float)
    faces = np.array([[0, 1, 2], [0, 1, 3]])
    path = tmp_path / "degen.off"
    save_off(ck.TriangleMesh(verts, faces), path)
    with pytest.warns(UserWarning, match="zero-area"):
        load_mesh(path)


def test_interior_ray_parity():
    # oracle: a full line anchored inside a closed convex surface crosses it
    # exactly twice, whatever the direction
    ico = icosphere_mesh(2)
    gen = RandomStream(31, 0).generator()
    anchors = 0.3 * uniform_sphere_points(3, 5_000, gen) * gen.random((5_000, 1))
    dirs = uniform_sphere_points(3, 5_000, gen)
    counts, _, _, _ = _mesh_hit_stats(ico, anchors, dirs)
    assert np.array_equal(counts, np.full(5_000, 2))


def test_icosphere_hit_distribution_close_to_sphere():
    # proposals hitting the unit ball: the round sphere gives p0=0, p2=1;
    # a 2562-vertex icosphere must match within 2 percent
    ico = icosphere_mesh(4)
    assert len(ico.vertices) == 2562
    smp = KinematicLineSampler(ico, bounding_radius=1.0)
    P, U = smp.propose_batch(RandomStream(32, 0).generator(), 10_000)
    counts, _, _, _ = _mesh_hit_stats(ico, P, U)
    p0 = float((counts == 0).mean())
    p2 = float((counts == 2).mean())
    assert p0 <= 0.02
    assert abs(p2 - 1.0) <= 0.02
    assert not np.any(counts > 2)


def test_nonmanifold_edge_warning(tmp_path):
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, -1, 0]],
                     dtype=float)
    faces = np.array([[0, 1, 2], [0, 1, 3], [0, 1, 4]])
    path = tmp_path / "fan.off"
    save_off(ck.TriangleMesh(verts, faces), path)
    with pytest.warns(UserWarning, match="non-manifold"):
        load_mesh(path)
