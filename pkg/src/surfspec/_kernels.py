"""Per-face accumulation kernels.

Both backends compute, for every face corner, the interior angle, the
obtuse-safe mixed (Voronoi) area, the cotangent of the corner angle, and
scatter the integrated mean-curvature vector and area-weighted normals onto
vertices. Positions are gathered per corner before the call so the same
kernels serve plain meshes and meshes with identified (ghost) vertices:
geometry comes from the raw corner positions, accumulation targets the
effective vertex indices in `scatter`.

The numba path is a straight serial loop (deterministic accumulation
order); the numpy path uses np.add.at with face-major ordering.
"""

import math

import numpy as np

from ._backend import USE_NUMBA


def _vertex_geometry_loops(P, scatter, n):
    F = P.shape[0]
    angle_sum = np.zeros(n)
    mixed_area = np.zeros(n)
    mcv = np.zeros((n, 3))
    normal_sum = np.zeros((n, 3))
    cots = np.empty((F, 3))
    areas = np.empty(F)
    for f in range(F):
        p0x, p0y, p0z = P[f, 0, 0], P[f, 0, 1], P[f, 0, 2]
        p1x, p1y, p1z = P[f, 1, 0], P[f, 1, 1], P[f, 1, 2]
        p2x, p2y, p2z = P[f, 2, 0], P[f, 2, 1], P[f, 2, 2]

        ax, ay, az = p1x - p0x, p1y - p0y, p1z - p0z     # p0 -> p1
        bx, by, bz = p2x - p0x, p2y - p0y, p2z - p0z     # p0 -> p2
        cx, cy, cz = p2x - p1x, p2y - p1y, p2z - p1z     # p1 -> p2

        nx = ay * bz - az * by
        ny = az * bx - ax * bz
        nz = ax * by - ay * bx
        twoA = math.sqrt(nx * nx + ny * ny + nz * nz)
        areas[f] = 0.5 * twoA

        # corner dots: d0=(p1-p0).(p2-p0), d1=(p0-p1).(p2-p1), d2=(p0-p2).(p1-p2)
        d0 = ax * bx + ay * by + az * bz
        d1 = -(ax * cx + ay * cy + az * cz)
        d2 = bx * cx + by * cy + bz * cz

        cot0 = d0 / twoA
        cot1 = d1 / twoA
        cot2 = d2 / twoA
        cots[f, 0] = cot0
        cots[f, 1] = cot1
        cots[f, 2] = cot2

        s0 = scatter[f, 0]
        s1 = scatter[f, 1]
        s2 = scatter[f, 2]

        angle_sum[s0] += math.atan2(twoA, d0)
        angle_sum[s1] += math.atan2(twoA, d1)
        angle_sum[s2] += math.atan2(twoA, d2)

        la = ax * ax + ay * ay + az * az     # |p1-p0|^2, opposite corner 2
        lb = bx * bx + by * by + bz * bz     # |p2-p0|^2, opposite corner 1
        lc = cx * cx + cy * cy + cz * cz     # |p2-p1|^2, opposite corner 0

        if d0 >= 0.0 and d1 >= 0.0 and d2 >= 0.0:
            mixed_area[s0] += (la * cot2 + lb * cot1) * 0.125
            mixed_area[s1] += (la * cot2 + lc * cot0) * 0.125
            mixed_area[s2] += (lb * cot1 + lc * cot0) * 0.125
        else:
            area = 0.5 * twoA
            if d0 < 0.0:
                mixed_area[s0] += 0.5 * area
                mixed_area[s1] += 0.25 * area
                mixed_area[s2] += 0.25 * area
            elif d1 < 0.0:
                mixed_area[s0] += 0.25 * area
                mixed_area[s1] += 0.5 * area
                mixed_area[s2] += 0.25 * area
            else:
                mixed_area[s0] += 0.25 * area
                mixed_area[s1] += 0.25 * area
                mixed_area[s2] += 0.5 * area

        # corner c sits opposite edge (a, b): scatter 0.5*cot_c*(pa-pb) onto a
        h0 = 0.5 * cot0
        mcv[s1, 0] += h0 * (-cx); mcv[s1, 1] += h0 * (-cy); mcv[s1, 2] += h0 * (-cz)
        mcv[s2, 0] += h0 * cx;    mcv[s2, 1] += h0 * cy;    mcv[s2, 2] += h0 * cz
        h1 = 0.5 * cot1
        mcv[s0, 0] += h1 * (-bx); mcv[s0, 1] += h1 * (-by); mcv[s0, 2] += h1 * (-bz)
        mcv[s2, 0] += h1 * bx;    mcv[s2, 1] += h1 * by;    mcv[s2, 2] += h1 * bz
        h2 = 0.5 * cot2
        mcv[s0, 0] += h2 * (-ax); mcv[s0, 1] += h2 * (-ay); mcv[s0, 2] += h2 * (-az)
        mcv[s1, 0] += h2 * ax;    mcv[s1, 1] += h2 * ay;    mcv[s1, 2] += h2 * az

        normal_sum[s0, 0] += nx; normal_sum[s0, 1] += ny; normal_sum[s0, 2] += nz
        normal_sum[s1, 0] += nx; normal_sum[s1, 1] += ny; normal_sum[s1, 2] += nz
        normal_sum[s2, 0] += nx; normal_sum[s2, 1] += ny; normal_sum[s2, 2] += nz

    return angle_sum, mixed_area, mcv, normal_sum, cots, areas


def _vertex_geometry_numpy(P, scatter, n):
    a = P[:, 1] - P[:, 0]
    b = P[:, 2] - P[:, 0]
    c = P[:, 2] - P[:, 1]

    nrm = np.cross(a, b)
    twoA = np.linalg.norm(nrm, axis=1)
    areas = 0.5 * twoA

    d0 = np.einsum("ij,ij->i", a, b)
    d1 = np.einsum("ij,ij->i", -a, c)
    d2 = np.einsum("ij,ij->i", b, c)
    dots = np.stack([d0, d1, d2], axis=1)

    cots = dots / twoA[:, None]
    angles = np.arctan2(twoA[:, None], dots)

    la = np.einsum("ij,ij->i", a, a)
    lb = np.einsum("ij,ij->i", b, b)
    lc = np.einsum("ij,ij->i", c, c)

    vor = np.empty_like(dots)
    vor[:, 0] = (la * cots[:, 2] + lb * cots[:, 1]) * 0.125
    vor[:, 1] = (la * cots[:, 2] + lc * cots[:, 0]) * 0.125
    vor[:, 2] = (lb * cots[:, 1] + lc * cots[:, 0]) * 0.125

    obtuse = dots < 0.0
    any_obtuse = obtuse.any(axis=1)
    if any_obtuse.any():
        area_col = areas[:, None]
        fallback = np.where(obtuse, 0.5 * area_col, 0.25 * area_col)
        vor = np.where(any_obtuse[:, None], fallback, vor)

    angle_sum = np.zeros(n)
    mixed_area = np.zeros(n)
    np.add.at(angle_sum, scatter.ravel(), angles.ravel())
    np.add.at(mixed_area, scatter.ravel(), vor.ravel())

    mcv = np.zeros((n, 3))
    h0 = 0.5 * cots[:, 0:1]
    h1 = 0.5 * cots[:, 1:2]
    h2 = 0.5 * cots[:, 2:3]
    np.add.at(mcv, scatter[:, 1], -h0 * c)
    np.add.at(mcv, scatter[:, 2], h0 * c)
    np.add.at(mcv, scatter[:, 0], -h1 * b)
    np.add.at(mcv, scatter[:, 2], h1 * b)
    np.add.at(mcv, scatter[:, 0], -h2 * a)
    np.add.at(mcv, scatter[:, 1], h2 * a)

    normal_sum = np.zeros((n, 3))
    for k in range(3):
        np.add.at(normal_sum, scatter[:, k], nrm)

    return angle_sum, mixed_area, mcv, normal_sum, cots, areas


if USE_NUMBA:
    from numba import njit

    _vertex_geometry_numba = njit(cache=True)(_vertex_geometry_loops)

    def vertex_geometry(P, scatter, n):
        return _vertex_geometry_numba(
            np.ascontiguousarray(P),
            np.ascontiguousarray(scatter),
            n,
        )

else:
    vertex_geometry = _vertex_geometry_numpy
