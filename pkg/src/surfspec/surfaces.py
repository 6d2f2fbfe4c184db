"""Builtin test surfaces: spheres, ellipsoids, tori, and a genus-2 body."""

from __future__ import annotations

import numpy as np

from .mesh import TriangleMesh
from .profile import ProfileCurve


def icosphere(subdivisions: int = 4, radius: float = 1.0) -> TriangleMesh:
    """Subdivided icosahedron projected to the sphere.

    Vertex count is 10 * 4**subdivisions + 2.
    """
    if subdivisions < 0:
        raise ValueError("subdivisions must be nonnegative")
    if radius <= 0:
        raise ValueError("radius must be positive")
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    verts /= np.linalg.norm(verts, axis=1)[:, None]

    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}
        vlist = list(verts)

        def midpoint(i, j):
            key = (i, j) if i < j else (j, i)
            k = cache.get(key)
            if k is None:
                m = vlist[i] + vlist[j]
                m = m / np.linalg.norm(m)
                k = len(vlist)
                vlist.append(m)
                cache[key] = k
            return k

        new_faces = np.empty((faces.shape[0] * 4, 3), dtype=np.int64)
        for fi, (a, b, c) in enumerate(faces):
            ab = midpoint(a, b)
            bc = midpoint(b, c)
            ca = midpoint(c, a)
            new_faces[4 * fi + 0] = (a, ab, ca)
            new_faces[4 * fi + 1] = (b, bc, ab)
            new_faces[4 * fi + 2] = (c, ca, bc)
            new_faces[4 * fi + 3] = (ab, bc, ca)
        faces = new_faces
        verts = np.array(vlist)

    return TriangleMesh(verts * radius, faces)


def ellipsoid(
    a: float, b: float, c: float, subdivisions: int = 4
) -> TriangleMesh:
    """Axis-aligned ellipsoid with semi-axes (a, b, c), from a scaled icosphere."""
    if min(a, b, c) <= 0:
        raise ValueError("semi-axes must be positive")
    base = icosphere(subdivisions, 1.0)
    verts = base.vertices * np.array([a, b, c])
    return TriangleMesh(verts, base.faces_raw, _validated=True)


def circle_profile(big_radius: float, small_radius: float, n_s: int) -> ProfileCurve:
    """Closed circular generator of a round torus: t = R + r cos, g = r sin.

    Periodic with zero vertical shift; one turn stored without the closing
    duplicate sample.
    """
    if not (big_radius > small_radius > 0):
        raise ValueError("need big_radius > small_radius > 0")
    alpha = 2.0 * np.pi * np.arange(n_s) / n_s
    t = big_radius + small_radius * np.cos(alpha)
    g = small_radius * np.sin(alpha)
    s = small_radius * alpha
    return ProfileCurve(np.column_stack([t, g, s]), period=0.0)


def semicircle_profile(radius: float, n_s: int) -> ProfileCurve:
    """Pole-to-pole meridian of a sphere, for capped revolution."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    u = np.linspace(0.0, np.pi, n_s)
    t = radius * np.sin(u)
    g = -radius * np.cos(u)
    s = radius * u
    return ProfileCurve(np.column_stack([t, g, s]))


def torus(
    big_radius: float = 2.0,
    small_radius: float = 1.0,
    n_s: int = 96,
    n_theta: int = 192,
) -> TriangleMesh:
    """Round torus of revolution, built through the periodic revolve path."""
    from .mesh import revolve

    prof = circle_profile(big_radius, small_radius, n_s)
    return revolve(prof, n_theta, closure="periodic")


def bumpy_sphere(subdivisions: int = 3, amplitude: float = 0.1) -> TriangleMesh:
    """Deterministically perturbed sphere; a generic closed test mesh."""
    base = icosphere(subdivisions, 1.0)
    v = base.vertices
    # smooth radial bumps from a low-order polynomial on the sphere
    r = 1.0 + amplitude * (
        0.6 * v[:, 0] * v[:, 1] + 0.3 * v[:, 2] ** 2 + 0.2 * v[:, 0] * v[:, 2]
    )
    return TriangleMesh(v * r[:, None], base.faces_raw, _validated=True)


def genus2(
    big_radius: float = 2.0,
    small_radius: float = 0.7,
    n_s: int = 24,
    n_theta: int = 48,
) -> TriangleMesh:
    """Genus-2 surface: two tori bridged through a triangular tunnel.

    One triangle is removed from each torus and the two boundary loops are
    joined by a 6-triangle prism. Euler characteristic is -2 by
    construction; the geometry near the bridge is crude but non-degenerate,
    which is all the combinatorial and integral checks need.
    """
    t1 = torus(big_radius, small_radius, n_s, n_theta)
    shift = np.array([2 * (big_radius + small_radius) + 1.0, 0.0, 0.0])

    v1 = t1.vertices
    f1 = t1.faces_raw
    v2 = v1 + shift
    f2 = f1 + len(v1)

    cent = v1[f1].mean(axis=1)
    # hole of torus 1 faces +x, hole of torus 2 faces -x
    i1 = int(np.argmax(cent[:, 0]))
    i2 = int(np.argmin(cent[:, 0]))

    a, b, c = (int(x) for x in f1[i1])
    p, q, r = (int(x) for x in f2[i2])

    keep1 = np.delete(f1, i1, axis=0)
    keep2 = np.delete(f2, i2, axis=0)

    # The tube must supply the removed directed edges (a,b),(b,c),(c,a) and
    # (p,q),(q,r),(r,p) exactly once each, pairing every strut edge.
    bridge = np.array(
        [
            [a, b, r], [a, r, p],
            [b, c, q], [b, q, r],
            [c, a, p], [c, p, q],
        ],
        dtype=np.int64,
    )
    verts = np.concatenate([v1, v2])
    faces = np.concatenate([keep1, keep2, bridge])
    return TriangleMesh(verts, faces)
