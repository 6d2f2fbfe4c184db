"""Closed triangle meshes immersed in 3-space.

Meshes are validated at construction: every undirected edge must be shared
by exactly two faces, each directed edge must appear exactly once (a
consistent outward orientation), and no face may be combinatorially or
geometrically degenerate. Immersed (self-intersecting) geometry is
accepted; watertightness in the embedding is never checked.

A mesh may carry identified vertices: trailing "ghost" rows of the vertex
array that are combinatorially the same vertex as an earlier row but hold a
translated position. This realizes quotient surfaces (a generating strip
whose ends are glued after a vertical shift) with exact local geometry:
per-face quantities are computed from raw corner positions while
accumulation and adjacency use the identified indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .profile import ProfileCurve, ProfileError


class MeshError(Exception):
    pass


class MeshFormatError(MeshError):
    """Parse-level failure, carrying file and line diagnostics."""


class MeshValidationError(MeshError):
    pass


class NonManifoldEdgeError(MeshValidationError):
    pass


class OrientationError(MeshValidationError):
    pass


class DegenerateFaceError(MeshValidationError):
    pass


@dataclass(frozen=True)
class PhysicalUnits:
    """hbar and particle mass; energies are hbar^2/(2 m) times eigenvalues."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and np.isfinite(self.hbar)):
            raise ValueError("hbar must be positive and finite")
        if not (self.mass > 0 and np.isfinite(self.mass)):
            raise ValueError("mass must be positive and finite")

    @property
    def energy_factor(self) -> float:
        return self.hbar**2 / (2.0 * self.mass)


@dataclass(frozen=True)
class TopologySummary:
    euler_characteristic: int
    genus: int | None
    orientable: bool
    n_vertices: int
    n_edges: int
    n_faces: int


class TriangleMesh:
    """Validated closed oriented triangle mesh.

    Parameters
    ----------
    vertices : (Vraw, 3) float array
        Positions. When `ghost_bases` is given the last len(ghost_bases)
        rows are ghosts of earlier vertices.
    faces : (F, 3) int array
        Raw vertex indices, counterclockwise seen from outside.
    ghost_bases : (G,) int array, optional
        ghost_bases[i] is the effective vertex that raw vertex
        (Vraw - G + i) is identified with. Bases must be non-ghost indices.
    """

    def __init__(self, vertices, faces, ghost_bases=None, _validated=False):
        self.vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        self.faces_raw = np.ascontiguousarray(faces, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise MeshValidationError("vertices must be an (N, 3) array")
        if self.faces_raw.ndim != 2 or self.faces_raw.shape[1] != 3:
            raise MeshValidationError("faces must be an (F, 3) array")
        if not np.all(np.isfinite(self.vertices)):
            raise MeshValidationError("vertex coordinates must be finite")

        v_raw = self.vertices.shape[0]
        if self.faces_raw.size and (
            self.faces_raw.min() < 0 or self.faces_raw.max() >= v_raw
        ):
            raise MeshValidationError("face index out of range")
        if ghost_bases is None:
            self.ghost_bases = None
            self.n_vertices = v_raw
            self.vertex_map = None
            self.faces = self.faces_raw
        else:
            self.ghost_bases = np.ascontiguousarray(ghost_bases, dtype=np.int64)
            g = self.ghost_bases.shape[0]
            self.n_vertices = v_raw - g
            if np.any(self.ghost_bases < 0) or np.any(self.ghost_bases >= self.n_vertices):
                raise MeshValidationError("ghost bases must reference non-ghost vertices")
            vm = np.arange(v_raw, dtype=np.int64)
            vm[self.n_vertices :] = self.ghost_bases
            self.vertex_map = vm
            self.faces = vm[self.faces_raw]

        self._edges = None
        if not _validated:
            self._validate()

    # -- validation -----------------------------------------------------

    def _validate(self):
        f = self.faces
        if f.shape[0] < 4:
            raise MeshValidationError("a closed surface needs at least 4 faces")

        same = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
        if same.any():
            idx = int(np.nonzero(same)[0][0])
            raise DegenerateFaceError(
                f"face {idx} repeats a vertex: {tuple(f[idx])}"
            )

        P = self.corner_positions()
        a = P[:, 1] - P[:, 0]
        b = P[:, 2] - P[:, 0]
        twoA = np.linalg.norm(np.cross(a, b), axis=1)
        lmax2 = np.maximum(
            (a * a).sum(1), np.maximum((b * b).sum(1), ((b - a) ** 2).sum(1))
        )
        bad = twoA <= 1e-12 * lmax2
        if bad.any():
            idx = int(np.nonzero(bad)[0][0])
            raise DegenerateFaceError(
                f"face {idx} has (near) zero area: vertices {tuple(self.faces_raw[idx])}"
            )

        directed = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        und = np.sort(directed, axis=1)
        und_view = und[:, 0] * np.int64(self.n_vertices) + und[:, 1]
        uniq, counts = np.unique(und_view, return_counts=True)
        if not np.all(counts == 2):
            k = int(np.nonzero(counts != 2)[0][0])
            e = (int(uniq[k] // self.n_vertices), int(uniq[k] % self.n_vertices))
            raise NonManifoldEdgeError(
                f"edge {e} belongs to {int(counts[k])} faces, expected 2"
            )

        dir_view = directed[:, 0] * np.int64(self.n_vertices) + directed[:, 1]
        uniq_d = np.unique(dir_view)
        if uniq_d.shape[0] != dir_view.shape[0]:
            dup = np.sort(dir_view)
            pos = int(np.nonzero(np.diff(dup) == 0)[0][0])
            e = (int(dup[pos] // self.n_vertices), int(dup[pos] % self.n_vertices))
            raise OrientationError(
                f"directed edge {e} appears twice: inconsistent face orientation"
            )

        used = np.zeros(self.n_vertices, dtype=bool)
        used[f.ravel()] = True
        if not used.all():
            idx = int(np.nonzero(~used)[0][0])
            raise MeshValidationError(f"vertex {idx} is referenced by no face")

        self._edges = (uniq // self.n_vertices).astype(np.int64), (
            uniq % self.n_vertices
        ).astype(np.int64)

    # -- basic quantities ------------------------------------------------

    @property
    def n_faces(self) -> int:
        return self.faces.shape[0]

    @property
    def n_edges(self) -> int:
        if self._edges is None:
            f = self.faces
            directed = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
            und = np.sort(directed, axis=1)
            view = und[:, 0] * np.int64(self.n_vertices) + und[:, 1]
            uniq = np.unique(view)
            self._edges = (uniq // self.n_vertices).astype(np.int64), (
                uniq % self.n_vertices
            ).astype(np.int64)
        return self._edges[0].shape[0]

    def corner_positions(self) -> np.ndarray:
        """(F, 3, 3) raw positions of each face's corners."""
        return self.vertices[self.faces_raw]

    def effective_positions(self) -> np.ndarray:
        """Representative position per effective vertex."""
        return self.vertices[: self.n_vertices]

    def face_areas(self) -> np.ndarray:
        P = self.corner_positions()
        return 0.5 * np.linalg.norm(
            np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]), axis=1
        )

    def is_identified(self) -> bool:
        return self.ghost_bases is not None


def topology(mesh: TriangleMesh) -> TopologySummary:
    """Euler characteristic and genus from the identified combinatorics."""
    v, e, f = mesh.n_vertices, mesh.n_edges, mesh.n_faces
    chi = v - e + f
    genus = None
    if chi % 2 == 0:
        genus = (2 - chi) // 2
    return TopologySummary(
        euler_characteristic=chi,
        genus=genus,
        orientable=True,
        n_vertices=v,
        n_edges=e,
        n_faces=f,
    )


def total_area(mesh: TriangleMesh) -> float:
    return float(mesh.face_areas().sum())


def scale_mesh(mesh: TriangleMesh, factor: float) -> TriangleMesh:
    """Uniform rescale about the origin. Validity is scale invariant."""
    if not (factor > 0 and np.isfinite(factor)):
        raise ValueError("scale factor must be positive and finite")
    return TriangleMesh(
        mesh.vertices * factor,
        mesh.faces_raw,
        ghost_bases=mesh.ghost_bases,
        _validated=True,
    )


# -- file I/O -------------------------------------------------------------


def load_mesh(path, fmt: str | None = None) -> TriangleMesh:
    """Read a closed triangle mesh from an OBJ or OFF file.

    The format is inferred from the extension unless `fmt` is given.
    Parse and validation failures carry file/line diagnostics.
    """
    path = str(path)
    if fmt is None:
        low = path.lower()
        if low.endswith(".obj"):
            fmt = "obj"
        elif low.endswith(".off"):
            fmt = "off"
        else:
            raise MeshFormatError(f"{path}: cannot infer format from extension")
    fmt = fmt.lower()
    if fmt == "obj":
        verts, faces = _parse_obj(path)
    elif fmt == "off":
        verts, faces = _parse_off(path)
    else:
        raise MeshFormatError(f"unsupported mesh format {fmt!r}")
    return TriangleMesh(verts, faces)


def _parse_obj(path):
    verts, faces = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            key = parts[0]
            if key == "v":
                if len(parts) < 4:
                    raise MeshFormatError(f"{path}:{lineno}: vertex needs 3 coordinates")
                try:
                    verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
                except ValueError:
                    raise MeshFormatError(
                        f"{path}:{lineno}: bad vertex coordinate"
                    ) from None
            elif key == "f":
                idx = parts[1:]
                if len(idx) != 3:
                    raise MeshFormatError(
                        f"{path}:{lineno}: non-triangle face with {len(idx)} vertices"
                    )
                row = []
                for tok in idx:
                    head = tok.split("/")[0]
                    try:
                        i = int(head)
                    except ValueError:
                        raise MeshFormatError(
                            f"{path}:{lineno}: bad face index {tok!r}"
                        ) from None
                    if i < 1:
                        raise MeshFormatError(
                            f"{path}:{lineno}: face indices must be positive (1-based)"
                        )
                    row.append(i - 1)
                faces.append(row)
            # vn/vt/o/g/s/usemtl/mtllib and anything else: ignored
    if not verts:
        raise MeshFormatError(f"{path}: no vertices found")
    return np.array(verts, dtype=np.float64), np.array(faces, dtype=np.int64)


def _parse_off(path):
    with open(path) as fh:
        lines = fh.readlines()

    def content(i):
        s = lines[i].strip()
        return s if s and not s.startswith("#") else None

    pos = 0
    while pos < len(lines) and content(pos) is None:
        pos += 1
    if pos >= len(lines) or content(pos) != "OFF":
        raise MeshFormatError(f"{path}:{pos + 1}: expected OFF header")
    pos += 1
    while pos < len(lines) and content(pos) is None:
        pos += 1
    try:
        nv, nf, _ = (int(x) for x in content(pos).split())
    except Exception:
        raise MeshFormatError(
            f"{path}:{pos + 1}: expected 'nverts nfaces nedges' counts"
        ) from None
    pos += 1

    verts = []
    while len(verts) < nv and pos < len(lines):
        c = content(pos)
        pos += 1
        if c is None:
            continue
        parts = c.split()
        if len(parts) < 3:
            raise MeshFormatError(f"{path}:{pos}: vertex needs 3 coordinates")
        try:
            verts.append([float(parts[0]), float(parts[1]), float(parts[2])])
        except ValueError:
            raise MeshFormatError(f"{path}:{pos}: bad vertex coordinate") from None
    if len(verts) < nv:
        raise MeshFormatError(f"{path}: truncated vertex block")

    faces = []
    while len(faces) < nf and pos < len(lines):
        c = content(pos)
        pos += 1
        if c is None:
            continue
        parts = c.split()
        try:
            k = int(parts[0])
        except (ValueError, IndexError):
            raise MeshFormatError(f"{path}:{pos}: bad face line") from None
        if k != 3:
            raise MeshFormatError(f"{path}:{pos}: non-triangle face with {k} vertices")
        if len(parts) < 4:
            raise MeshFormatError(f"{path}:{pos}: face needs 3 indices")
        try:
            row = [int(parts[1]), int(parts[2]), int(parts[3])]
        except ValueError:
            raise MeshFormatError(f"{path}:{pos}: bad face index") from None
        if min(row) < 0 or max(row) >= nv:
            raise MeshFormatError(f"{path}:{pos}: face index out of range")
        faces.append(row)
    if len(faces) < nf:
        raise MeshFormatError(f"{path}: truncated face block")

    return np.array(verts, dtype=np.float64), np.array(faces, dtype=np.int64)


def save_mesh(mesh: TriangleMesh, path, fmt: str | None = None) -> None:
    """Write OBJ or OFF. Coordinates round-trip exactly (%.17g).

    Meshes with identified ghost vertices have no faithful flat-file form;
    export the generating strip instead (see revolve_strip_obj).
    """
    if mesh.is_identified():
        raise MeshError(
            "mesh has identified (quotient) vertices; write the generating "
            "strip with revolve_strip_obj instead"
        )
    path = str(path)
    if fmt is None:
        low = path.lower()
        if low.endswith(".obj"):
            fmt = "obj"
        elif low.endswith(".off"):
            fmt = "off"
        else:
            raise MeshFormatError(f"{path}: cannot infer format from extension")
    fmt = fmt.lower()
    if fmt == "obj":
        with open(path, "w") as fh:
            for x, y, z in mesh.vertices:
                fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
            for i, j, k in mesh.faces:
                fh.write(f"f {i + 1} {j + 1} {k + 1}\n")
    elif fmt == "off":
        with open(path, "w") as fh:
            fh.write("OFF\n")
            fh.write(f"{mesh.n_vertices} {mesh.n_faces} {mesh.n_edges}\n")
            for x, y, z in mesh.vertices:
                fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
            for i, j, k in mesh.faces:
                fh.write(f"3 {i} {j} {k}\n")
    else:
        raise MeshFormatError(f"unsupported mesh format {fmt!r}")


# -- surfaces of revolution ------------------------------------------------


def _ring_vertices(t, g, n_theta):
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    return np.column_stack(
        [t * np.cos(theta), t * np.sin(theta), np.full(n_theta, g)]
    )


def _band_faces(ring_a, ring_b, n_theta):
    """Two triangles per quad between vertex rings, outward winding."""
    j = np.arange(n_theta)
    jp = (j + 1) % n_theta
    a0 = ring_a + j
    a1 = ring_a + jp
    b0 = ring_b + j
    b1 = ring_b + jp
    t1 = np.column_stack([a0, a1, b1])
    t2 = np.column_stack([a0, b1, b0])
    return np.concatenate([t1, t2])


def revolve(profile: ProfileCurve, n_theta: int, closure: str) -> TriangleMesh:
    """Revolve a profile about the vertical axis into a closed mesh.

    closure="capped": open profile; ends touching the axis become pole
    fans, ends off the axis get flat disk caps.
    closure="periodic": one period of a periodic profile; the last ring is
    glued to the first, after the vertical period shift when it is nonzero
    (ghost-vertex identification keeps the local geometry exact). Yields
    exactly 2 * n_samples * n_theta triangles.
    """
    if n_theta < 3:
        raise ValueError("n_theta must be at least 3")
    if closure not in ("capped", "periodic"):
        raise ValueError("closure must be 'capped' or 'periodic'")
    # a self-crossing profile is allowed: it revolves to an immersed (not
    # embedded) surface, whose induced metric is all the analysis needs

    t = profile.t
    g = profile.g
    scale = max(1.0, float(t.max()))
    axis_tol = 1e-9 * scale

    if closure == "periodic":
        if not profile.is_periodic():
            raise ProfileError("periodic closure requires a profile with a period")
        if t.min() <= axis_tol:
            raise ProfileError("profile touches the axis: periodic closure impossible")
        n_s = profile.n_samples
        shift = float(profile.period)
        verts = np.concatenate(
            [_ring_vertices(t[i], g[i], n_theta) for i in range(n_s)]
        )
        faces = [
            _band_faces(i * n_theta, (i + 1) * n_theta, n_theta)
            for i in range(n_s - 1)
        ]
        if abs(shift) > 0.0:
            ghost = _ring_vertices(t[0], g[0] + shift, n_theta)
            verts = np.concatenate([verts, ghost])
            faces.append(_band_faces((n_s - 1) * n_theta, n_s * n_theta, n_theta))
            ghost_bases = np.arange(n_theta, dtype=np.int64)
            return TriangleMesh(verts, np.concatenate(faces), ghost_bases=ghost_bases)
        faces.append(_band_faces((n_s - 1) * n_theta, 0, n_theta))
        return TriangleMesh(verts, np.concatenate(faces))

    # capped
    if profile.is_periodic():
        raise ProfileError("capped closure requires an open profile")
    interior = t[1:-1]
    if interior.size and interior.min() <= axis_tol:
        raise ProfileError("profile touches the axis at an interior sample")

    ring_idx = [i for i in range(profile.n_samples) if t[i] > axis_tol]
    if len(ring_idx) < 2:
        raise ProfileError("profile needs at least 2 off-axis samples")
    verts = np.concatenate(
        [_ring_vertices(t[i], g[i], n_theta) for i in ring_idx]
    )
    faces = [
        _band_faces(k * n_theta, (k + 1) * n_theta, n_theta)
        for k in range(len(ring_idx) - 1)
    ]
    n_ring_verts = len(ring_idx) * n_theta

    # south cap: center/pole at the start height
    south = np.array([[0.0, 0.0, g[0]]])
    north = np.array([[0.0, 0.0, g[-1]]])
    verts = np.concatenate([verts, south, north])
    i_s = n_ring_verts
    i_n = n_ring_verts + 1
    j = np.arange(n_theta)
    jp = (j + 1) % n_theta
    first = 0
    last = (len(ring_idx) - 1) * n_theta
    cap_s = np.column_stack([np.full(n_theta, i_s), first + jp, first + j])
    cap_n = np.column_stack([np.full(n_theta, i_n), last + j, last + jp])
    faces.extend([cap_s, cap_n])
    return TriangleMesh(verts, np.concatenate(faces))


def revolve_strip_obj(profile: ProfileCurve, n_theta: int, path) -> None:
    """Write the open revolved strip as OBJ for visualization.

    The strip is not a closed manifold (its ends are free), so it bypasses
    TriangleMesh validation. Suited to plotting stacked periodic profiles.
    """
    if n_theta < 3:
        raise ValueError("n_theta must be at least 3")
    t = profile.t
    g = profile.g
    n_s = profile.n_samples
    verts = np.concatenate([_ring_vertices(t[i], g[i], n_theta) for i in range(n_s)])
    faces = np.concatenate(
        [_band_faces(i * n_theta, (i + 1) * n_theta, n_theta) for i in range(n_s - 1)]
    )
    with open(path, "w") as fh:
        for x, y, z in verts:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for i, j, k in faces:
            fh.write(f"f {i + 1} {j + 1} {k + 1}\n")
