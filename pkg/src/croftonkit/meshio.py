"""Triangle-mesh ingestion (OFF and a minimal OBJ subset) plus small
procedural meshes used for testing and calibration."""

import math
import warnings
from pathlib import Path

import numpy as np

from .errors import MeshFormatError
from .geometry import TriangleMesh


def load_mesh(path) -> TriangleMesh:
    """Read an OFF or OBJ triangle mesh and validate its topology.

    Open meshes load with a warning (usable for rectifiable-mode counting,
    rejected by chord samplers); non-manifold edges are reported."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".off":
        mesh = _read_off(path)
    elif suffix == ".obj":
        mesh = _read_obj(path)
    else:
        raise MeshFormatError(f"{path}: unsupported mesh format {suffix!r}")
    if mesh.nonmanifold_edges:
        warnings.warn(
            f"{path.name}: {len(mesh.nonmanifold_edges)} non-manifold edges "
            f"(first: {mesh.nonmanifold_edges[:4]})", stacklevel=2)
    if mesh.open_edges:
        warnings.warn(
            f"{path.name}: mesh is open ({len(mesh.open_edges)} boundary edges); "
            "chord estimators will reject it", stacklevel=2)
    zero = np.nonzero(mesh.face_areas <= 0.0)[0]
    if zero.size:
        warnings.warn(f"{path.name}: {zero.size} zero-area faces", stacklevel=2)
    return mesh


def _read_off(path: Path) -> TriangleMesh:
    lines = path.read_text().splitlines()
    cursor = 0

    def next_tokens():
        nonlocal cursor
        while cursor < len(lines):
            raw = lines[cursor].split("#", 1)[0].strip()
            cursor += 1
            if raw:
                return raw.split(), cursor
        return None, cursor

    tok, ln = next_tokens()
    if tok is None:
        raise MeshFormatError(f"{path}:1: empty OFF file")
    if tok == ["OFF"]:
        tok, ln = next_tokens()
    if tok is None or len(tok) < 2:
        raise MeshFormatError(f"{path}:{ln}: expected 'nv nf ne' counts")
    try:
        nv, nf = int(tok[0]), int(tok[1])
    except ValueError:
        raise MeshFormatError(f"{path}:{ln}: bad counts line {' '.join(tok)!r}") from None
    verts = np.empty((nv, 3))
    for i in range(nv):
        tok, ln = next_tokens()
        if tok is None or len(tok) < 3:
            raise MeshFormatError(f"{path}:{ln}: truncated vertex list at vertex {i}")
        try:
            verts[i] = [float(tok[0]), float(tok[1]), float(tok[2])]
        except ValueError:
            raise MeshFormatError(f"{path}:{ln}: bad vertex {' '.join(tok)!r}") from None
    faces = np.empty((nf, 3), dtype=np.int64)
    for i in range(nf):
        tok, ln = next_tokens()
        if tok is None:
            raise MeshFormatError(f"{path}:{ln}: truncated face list at face {i}")
        try:
            k = int(tok[0])
            idx = [int(t) for t in tok[1:1 + k]]
        except ValueError:
            raise MeshFormatError(f"{path}:{ln}: bad face {' '.join(tok)!r}") from None
        if k != 3 or len(idx) != 3:
            raise MeshFormatError(f"{path}:{ln}: only triangles are supported (got {k}-gon)")
        faces[i] = idx
    return TriangleMesh(verts, faces)


def _read_obj(path: Path) -> TriangleMesh:
    verts: list = []
    faces: list = []
    for ln, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if tok[0] == "v":
            if len(tok) < 4:
                raise MeshFormatError(f"{path}:{ln}: bad vertex record {raw!r}")
            try:
                verts.append([float(tok[1]), float(tok[2]), float(tok[3])])
            except ValueError:
                raise MeshFormatError(f"{path}:{ln}: bad vertex record {raw!r}") from None
        elif tok[0] == "f":
            refs = tok[1:]
            if len(refs) != 3:
                raise MeshFormatError(
                    f"{path}:{ln}: only triangles are supported (got {len(refs)} vertices)")
            idx = []
            for r in refs:
                head = r.split("/", 1)[0]
                try:
                    k = int(head)
                except ValueError:
                    raise MeshFormatError(f"{path}:{ln}: bad face index {r!r}") from None
                if k <= 0:
                    raise MeshFormatError(f"{path}:{ln}: negative/zero indices unsupported")
                idx.append(k - 1)
            faces.append(idx)
        # all other record types (vn, vt, o, g, s, usemtl, ...) are ignored
    if not verts or not faces:
        raise MeshFormatError(f"{path}: no v/f records found")
    return TriangleMesh(np.asarray(verts), np.asarray(faces, dtype=np.int64))


def save_off(mesh: TriangleMesh, path) -> None:
    path = Path(path)
    with path.open("w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(mesh.vertices)} {len(mesh.faces)} 0\n")
        for v in mesh.vertices:
            fh.write(f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for f in mesh.faces:
            fh.write(f"3 {int(f[0])} {int(f[1])} {int(f[2])}\n")


def save_obj(mesh: TriangleMesh, path) -> None:
    path = Path(path)
    with path.open("w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for f in mesh.faces:
            fh.write(f"f {int(f[0]) + 1} {int(f[1]) + 1} {int(f[2]) + 1}\n")


def cube_mesh(edge: float = 1.0) -> TriangleMesh:
    """Axis-aligned cube surface centered at the origin, 12 triangles."""
    h = edge / 2.0
    verts = np.array([[sx, sy, sz] for sx in (-h, h) for sy in (-h, h) for sz in (-h, h)])
    # index layout: bit2 = x, bit1 = y, bit0 = z
    quads = [
        (0, 1, 3, 2),   # x = -h
        (4, 6, 7, 5),   # x = +h
        (0, 4, 5, 1),   # y = -h
        (2, 3, 7, 6),   # y = +h
        (0, 2, 6, 4),   # z = -h
        (1, 5, 7, 3),   # z = +h
    ]
    faces = []
    for a, b, c, d in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return TriangleMesh(verts, np.asarray(faces, dtype=np.int64))


def icosphere_mesh(subdivisions: int = 3, radius: float = 1.0) -> TriangleMesh:
    """Icosahedron subdivided `subdivisions` times, projected to the sphere.

    Vertex counts by level: 12, 42, 162, 642, 2562."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.asarray(v, dtype=float) for v in verts]
    verts = [v / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache: dict = {}
        new_faces = []

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    v = np.vstack(verts) * radius
    return TriangleMesh(v, np.asarray(faces, dtype=np.int64))
