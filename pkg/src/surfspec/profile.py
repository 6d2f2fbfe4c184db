"""Generating curves for surfaces of revolution.

A profile lives in the (t, g) half-plane: t is the distance from the
rotation axis, g the height along it, and s the arc length along the curve.
Samples are ordered by increasing s. For periodic profiles one period is
stored without the closing duplicate and `period` records the vertical
translation g(s + arc length) - g(s); a plain closed loop (a torus circle)
has period 0.0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class JoinInfo:
    """Tangency record where two stacked arcs meet.

    dt_ds is |dt/ds| approached at the join; a join is smooth exactly when
    the tangent is vertical there (dt_ds ~ 0), otherwise the curve folds
    back on itself with a cusp.
    """

    s: float
    t: float
    dt_ds: float
    smooth: bool


@dataclass
class ProfileCurve:
    """Sampled generating curve.

    samples: (n, 3) array of rows (t, g, s), strictly increasing in s.
    period: vertical translation after one arc-length period, or None for
        an open (cap-to-cap) curve.
    joins: tangency metadata at arc joins, when the curve was stacked.
    end_dt_ds: |dt/ds| at the two ends of the base arc (endpoint tangency).
    """

    samples: np.ndarray
    period: float | None = None
    joins: list[JoinInfo] = field(default_factory=list)
    end_dt_ds: tuple[float, float] | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[1] != 3:
            raise ProfileError("profile samples must be an (n, 3) array of (t, g, s)")
        if self.samples.shape[0] < 2:
            raise ProfileError("profile needs at least 2 samples")
        s = self.samples[:, 2]
        if not np.all(np.diff(s) > 0):
            raise ProfileError("profile arc-length column must be strictly increasing")
        if np.any(self.samples[:, 0] < -1e-12):
            raise ProfileError("profile radius t must be nonnegative")

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def g(self) -> np.ndarray:
        return self.samples[:, 1]

    @property
    def s(self) -> np.ndarray:
        return self.samples[:, 2]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def arc_length(self) -> float:
        return float(self.samples[-1, 2] - self.samples[0, 2])

    def is_periodic(self) -> bool:
        return self.period is not None

    def touches_axis(self, tol: float = 1e-9) -> bool:
        return bool(np.any(self.samples[:, 0] <= tol * max(1.0, self.t.max())))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,g,s\n")
            for t, g, s in self.samples:
                fh.write(f"{float(t)!r},{float(g)!r},{float(s)!r}\n")

    @classmethod
    def from_csv(cls, path, period: float | None = None) -> "ProfileCurve":
        rows = []
        with open(path) as fh:
            header = fh.readline().strip()
            if header.replace(" ", "") != "t,g,s":
                raise ProfileError(f"{path}:1: expected header 't,g,s', got {header!r}")
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 3:
                    raise ProfileError(f"{path}:{lineno}: expected 3 fields")
                try:
                    rows.append([float(p) for p in parts])
                except ValueError as exc:
                    raise ProfileError(f"{path}:{lineno}: {exc}") from None
        return cls(np.array(rows), period=period)


def _segments_intersect(p, q, a, b) -> bool:
    """Proper-or-improper intersection of 2D segments pq and ab."""

    def orient(o, u, v):
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])

    d1 = orient(a, b, p)
    d2 = orient(a, b, q)
    d3 = orient(p, q, a)
    d4 = orient(p, q, b)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0:
        return True

    def on_seg(o, u, v):
        return (
            min(o[0], u[0]) - 1e-14 <= v[0] <= max(o[0], u[0]) + 1e-14
            and min(o[1], u[1]) - 1e-14 <= v[1] <= max(o[1], u[1]) + 1e-14
        )

    if d1 == 0 and on_seg(a, b, p):
        return True
    if d2 == 0 and on_seg(a, b, q):
        return True
    if d3 == 0 and on_seg(p, q, a):
        return True
    if d4 == 0 and on_seg(p, q, b):
        return True
    return False


def profile_is_simple(profile: ProfileCurve) -> bool:
    """True when the polyline (closed if periodic) has no self-crossings.

    Adjacent segments share an endpoint by construction and are skipped.
    O(n^2) pair test; profiles are a few hundred samples.
    """
    pts = [(float(t), float(g)) for t, g, _ in profile.samples]
    segs = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    closed = False
    if profile.is_periodic():
        shift = profile.period or 0.0
        first_wrapped = (pts[0][0], pts[0][1] + shift)
        segs.append((pts[-1], first_wrapped))
        closed = abs(shift) < 1e-300
    n = len(segs)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1 and closed:
                continue
            if _segments_intersect(*segs[i], *segs[j]):
                return False
    return True
