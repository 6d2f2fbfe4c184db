"""The constant-skew-curvature family of revolved profiles.

A surface of revolution has constant half-difference of principal
curvatures exactly when its profile slope h(t) = g'(t) satisfies

    h(t) = sign * 2 (k - ln t) t / sqrt(D(t)),
    D(t) = 1 + (8 k - 4 ln t) t^2 ln t - 4 k^2 t^2,

with an integration constant k. Writing phi(t) = 2 t (ln t - k) gives the
equivalent stable forms

    D = 1 - phi^2,      h = -sign * phi / sqrt(D),
    h' = -sign * phi' / D^(3/2),      phi' = 2 (ln t - k + 1),

and the closed-form consequences 1 + h^2 = 1/D,
kappa_parallel = sign * 2 (k - ln t), kappa_meridian = kappa_parallel
- 2 * sign: the half-difference of principal curvatures is -sign
identically, so the well strength H^2 - K is exactly 1 on every member.

phi has a single interior minimum at t = e^(k-1), which makes the domain
structure {D > 0} elementary: one branch reaching the axis for
k < k0 = 1 - ln 2, a double root at t = 1/2 exactly at k0, and an
inner branch plus a detached outer annulus branch for k > k0. Only the
outer branch has vertical tangents at both ends and therefore stacks into
a smooth periodic profile; its quotient by one vertical period is a torus.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .curvature import analytic_sor_curvatures
from .profile import JoinInfo, ProfileCurve
from .spectral import SorOperator


class CscError(Exception):
    pass


class BranchError(CscError):
    pass


class DegenerateFamilyError(CscError):
    """Raised at (or too near) the bifurcation constant k0."""


class QuadratureError(CscError):
    def __init__(self, msg, achieved):
        super().__init__(f"{msg} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class CscParams:
    """Family member selector: integration constant and slope sign."""

    k: float
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        if not np.isfinite(self.k):
            raise ValueError("k must be finite")


@dataclass(frozen=True)
class CscBranch:
    """Maximal interval where the radicand D is positive.

    kind is 'whole' (reaches the axis, k < k0), 'inner' (reaches the axis,
    k > k0) or 'outer' (annulus bounded away from the axis). t_hi is always
    a root of D; t_lo is a root only for the outer kind, otherwise it is
    the axis t = 0 where D -> 1.
    """

    t_lo: float
    t_hi: float
    kind: str
    degenerate: bool = False


def _phi(t, k):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 2.0 * t * (np.log(t) - k)
    return np.where(t == 0.0, 0.0, out)


def _phi_prime(t, k):
    return 2.0 * (np.log(t) - k + 1.0)


def _radicand(t, k):
    """D extended continuously to the axis (D -> 1 as t -> 0+)."""
    p = _phi(t, k)
    return 1.0 - p * p


def _split(params):
    if isinstance(params, CscParams):
        return params.k, params.sign
    return float(params), 1


def csc_denominator(t, k):
    """Radicand D(t) = 1 - 4 t^2 (ln t - k)^2, positive inside a branch."""
    if np.any(np.asarray(t) <= 0.0):
        raise ValueError("csc_denominator requires t > 0")
    return _radicand(t, k)


def csc_h(t, params):
    """Profile slope g'(t); defined only where D(t) > 0."""
    k, sign = _split(params)
    d = csc_denominator(t, k)
    if np.any(np.asarray(d) <= 0.0):
        raise BranchError("t outside the branch domain: D(t) <= 0")
    return -sign * _phi(t, k) / np.sqrt(d)


def csc_h_prime(t, params):
    """t-derivative of the slope, in the cancellation-free closed form."""
    k, sign = _split(params)
    d = csc_denominator(t, k)
    if np.any(np.asarray(d) <= 0.0):
        raise BranchError("t outside the branch domain: D(t) <= 0")
    return -sign * _phi_prime(t, k) / d**1.5


def _bisect(f, lo, hi, tol=1e-13):
    """Plain bracketed bisection; f(lo) and f(hi) must differ in sign."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("bisection bracket does not straddle a root")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)):
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _phi_argmin(k: float) -> float:
    """Location of the single minimum of phi, by bisection on phi'."""
    return _bisect(lambda t: _phi_prime(t, k), math.exp(k - 2.0), math.exp(k))


def csc_bifurcation() -> tuple[float, float]:
    """(k0, t0): the constant where the branch count changes, and the
    double-root location there. Bracketed bisection only."""

    def eta(k):
        return float(_phi(_phi_argmin(k), k)) + 1.0

    k0 = _bisect(eta, 0.0, 1.0)
    t0 = _phi_argmin(k0)
    return k0, t0


def csc_intervals(k: float, degenerate_window: float = 1e-10) -> list[CscBranch]:
    """Maximal branches {D > 0} for the given constant.

    k < k0 gives a single branch reaching the axis; k > k0 an inner branch
    plus a detached outer annulus. Within `degenerate_window` of the double
    root the two touching branches are flagged degenerate.
    """
    if not np.isfinite(k):
        raise ValueError("k must be finite")
    t_star = _phi_argmin(k)
    phi_min = float(_phi(t_star, k))

    def phi_plus_1(t):
        return float(_phi(t, k)) + 1.0

    def phi_minus_1(t):
        return float(_phi(t, k)) - 1.0

    # upper root of phi = +1 always exists right of the minimum
    hi = max(2.0 * t_star, math.exp(k), 1.0)
    while phi_minus_1(hi) <= 0.0:
        hi *= 2.0
    t3 = _bisect(phi_minus_1, t_star, hi)

    if phi_min + 1.0 > degenerate_window:
        return [CscBranch(0.0, t3, "whole")]

    if abs(phi_min + 1.0) <= degenerate_window:
        return [
            CscBranch(0.0, t_star, "inner", degenerate=True),
            CscBranch(t_star, t3, "outer", degenerate=True),
        ]

    lo = t_star
    while phi_plus_1(lo) <= 0.0:
        lo *= 0.5
    t1 = _bisect(phi_plus_1, lo, t_star)
    t2 = _bisect(phi_plus_1, t_star, t3)
    return [CscBranch(0.0, t1, "inner"), CscBranch(t2, t3, "outer")]


# -- profile integration ----------------------------------------------------


def _root_series(t_root: float, phi_root: float, k: float):
    """Taylor coefficients of D about a root, D(t_root + x) = d1 x + ...

    Evaluated with the analytic root value phi = phi_root (+-1), which
    sidesteps the 1 - phi^2 cancellation that makes the direct form lose
    all relative accuracy as the root is approached.
    """
    p1 = 2.0 * (math.log(t_root) - k + 1.0)
    p2 = 2.0 / t_root
    p3 = -2.0 / t_root**2
    p4 = 4.0 / t_root**3
    d1 = -2.0 * phi_root * p1
    d2 = -2.0 * (p1 * p1 + phi_root * p2)
    d3 = -2.0 * (3.0 * p1 * p2 + phi_root * p3)
    d4 = -2.0 * (3.0 * p2 * p2 + 4.0 * p1 * p3 + phi_root * p4)
    return d1, d2, d3, d4


def _half_tables(k, sign, u_grid, t_root, x_sign, target_abs):
    """Cumulative g and s over one half of a branch, u the regularized
    parameter: t = t_root + x_sign * u^2 with the root at u = 0.

    The integrands h dt/du and sqrt(1 + h^2) |dt/du| are analytic in u
    through the root (the square-root blowup cancels against dt/du), but
    only if D is evaluated cancellation-free there; within a window of the
    root a calibrated Taylor form replaces 1 - phi^2.
    """
    phi_root = 1.0 if float(_phi(t_root, k)) > 0 else -1.0
    d1, d2, d3, d4 = _root_series(t_root, phi_root, k)
    x_sw = 1e-3 * max(1.0, abs(t_root))

    def dval(u):
        x = x_sign * u * u
        if abs(x) <= x_sw:
            return x * (d1 + x * (0.5 * d2 + x * (d3 / 6.0 + x * d4 / 24.0)))
        return _radicand(max(t_root + x, 0.0), k)

    def dg(u):
        t = max(t_root + x_sign * u * u, 0.0)
        return float(-sign * _phi(t, k) / math.sqrt(dval(u)) * 2.0 * x_sign * u)

    def ds(u):
        # 1 + h^2 = 1/D for this family
        return float(2.0 * u / math.sqrt(dval(u)))

    n = len(u_grid) - 1
    eps = target_abs / (4.0 * max(n, 1))
    g = np.zeros(n + 1)
    s = np.zeros(n + 1)
    err_total = 0.0
    # pure absolute-error criterion: near-zero subintegrals would make any
    # relative criterion unreachable in float64
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for i in range(n):
            a, b = u_grid[i], u_grid[i + 1]
            gval, gerr = quad(dg, a, b, epsabs=eps, epsrel=0.0, limit=200)
            sval, serr = quad(ds, a, b, epsabs=eps, epsrel=0.0, limit=200)
            g[i + 1] = g[i] + gval
            s[i + 1] = s[i] + abs(sval)
            err_total += gerr + serr
    if err_total > target_abs:
        raise QuadratureError("profile quadrature did not converge", err_total)
    return g, s


def csc_profile(
    params: CscParams | float,
    branch: CscBranch,
    n_samples: int = 128,
    target_abs: float = 1e-10,
) -> ProfileCurve:
    """Sample one branch of the family as an open generating arc.

    Samples are uniform in the endpoint-substituted parameter
    u = sqrt(|t - t_root|), which regularizes the inverse-square-root
    blowup of the slope at roots of D. g is normalized to 0 at the low end.
    """
    if isinstance(params, (int, float)):
        params = CscParams(float(params))
    if branch.degenerate:
        raise DegenerateFamilyError(
            "branch is degenerate (k at the bifurcation constant); "
            "no surface is generated there"
        )
    if n_samples < 16:
        raise ValueError("n_samples must be at least 16")
    k, sign = params.k, params.sign

    if branch.kind == "outer":
        mid = math.exp(k)
        if not (branch.t_lo < mid < branch.t_hi):
            mid = 0.5 * (branch.t_lo + branch.t_hi)
        n_half = max(8, n_samples // 2)
        ul = math.sqrt(mid - branch.t_lo)
        ur = math.sqrt(branch.t_hi - mid)
        grid_l = ul * np.arange(n_half + 1) / n_half
        grid_r = ur * (1.0 - np.arange(n_half + 1) / n_half)

        gl, sl = _half_tables(k, sign, grid_l, branch.t_lo, 1, target_abs / 2)
        gr, sr = _half_tables(k, sign, grid_r, branch.t_hi, -1, target_abs / 2)
        t_all = np.concatenate(
            [branch.t_lo + grid_l**2, (branch.t_hi - grid_r**2)[1:]]
        )
        g_all = np.concatenate([gl, gl[-1] + gr[1:]])
        s_all = np.concatenate([sl, sl[-1] + sr[1:]])
    elif branch.kind in ("inner", "whole"):
        v0 = math.sqrt(branch.t_hi - branch.t_lo)
        grid = v0 * (1.0 - np.arange(n_samples) / (n_samples - 1))
        g_all, s_all = _half_tables(k, sign, grid, branch.t_hi, -1, target_abs)
        t_all = np.maximum(branch.t_hi - grid**2, 0.0)
    else:
        raise ValueError(f"unknown branch kind {branch.kind!r}")

    d_lo = max(float(_radicand(t_all[0], k)), 0.0)
    d_hi = max(float(_radicand(t_all[-1], k)), 0.0)
    return ProfileCurve(
        np.column_stack([t_all, g_all, s_all]),
        period=None,
        end_dt_ds=(math.sqrt(d_lo), math.sqrt(d_hi)),
    )


SMOOTH_JOIN_TOL = 1e-5


def stack_profile(base: ProfileCurve, n_periods: int = 1) -> ProfileCurve:
    """Periodically stack an arc with its reflected companion.

    One period is the arc followed by its mirror image (slope negated),
    translated so the curve continues; the vertical period is
    2 (g_hi - g_lo) per repeat. Joins are smooth exactly where the arc
    meets its endpoint with a vertical tangent, which happens at roots of
    the radicand; an axis-side endpoint joins in a cusp and is flagged.
    """
    if base.is_periodic():
        raise ValueError("stack_profile expects an open base arc")
    if n_periods < 1:
        raise ValueError("n_periods must be at least 1")
    m = base.n_samples
    if m < 3:
        raise ValueError("base arc too short to stack")

    t = base.t
    g = base.g
    s = base.s - base.s[0]
    g = g - g[0]
    g_half = g[-1]
    s_half = s[-1]
    period_shift = 2.0 * g_half
    period_arc = 2.0 * s_half

    idx = np.arange(1, m - 1)[::-1]
    t_one = np.concatenate([t, t[idx]])
    g_one = np.concatenate([g, 2.0 * g_half - g[idx]])
    s_one = np.concatenate([s, 2.0 * s_half - s[idx]])

    ts, gs, ss = [], [], []
    for p in range(n_periods):
        ts.append(t_one)
        gs.append(g_one + p * period_shift)
        ss.append(s_one + p * period_arc)
    t_all = np.concatenate(ts)
    g_all = np.concatenate(gs)
    s_all = np.concatenate(ss)

    if base.end_dt_ds is not None:
        lo_slope, hi_slope = base.end_dt_ds
    else:
        # fall back to a finite-difference estimate of |dt/ds| at the ends
        lo_slope = abs(t[1] - t[0]) / max(s[1] - s[0], 1e-300)
        hi_slope = abs(t[-1] - t[-2]) / max(s[-1] - s[-2], 1e-300)

    joins = []
    for p in range(n_periods):
        joins.append(
            JoinInfo(
                s=p * period_arc,
                t=float(t[0]),
                dt_ds=float(lo_slope),
                smooth=bool(lo_slope < SMOOTH_JOIN_TOL),
            )
        )
        joins.append(
            JoinInfo(
                s=p * period_arc + s_half,
                t=float(t[-1]),
                dt_ds=float(hi_slope),
                smooth=bool(hi_slope < SMOOTH_JOIN_TOL),
            )
        )

    return ProfileCurve(
        np.column_stack([t_all, g_all, s_all]),
        period=n_periods * period_shift,
        joins=joins,
        end_dt_ds=base.end_dt_ds,
    )


def outer_branch(k: float) -> CscBranch:
    """The outer annulus branch, which exists only for k > k0."""
    branches = [b for b in csc_intervals(k) if b.kind == "outer"]
    if not branches:
        raise BranchError(
            f"no outer branch at k={k!r}: the family bifurcates at "
            "k0 = 1 - ln 2, a quotient torus needs k > k0"
        )
    if branches[0].degenerate:
        raise DegenerateFamilyError(
            f"k={k!r} sits at the bifurcation constant: outer branch degenerate"
        )
    return branches[0]


def quotient_profile(params: CscParams | float, n_samples: int = 129) -> ProfileCurve:
    """One full period of the stacked outer-branch profile (k > k0)."""
    if isinstance(params, (int, float)):
        params = CscParams(float(params))
    branch = outer_branch(params.k)
    base = csc_profile(params, branch, n_samples=n_samples)
    one = stack_profile(base, n_periods=1)
    if not all(j.smooth for j in one.joins):
        raise BranchError("quotient requires smooth joins (outer branch only)")
    return one


def quotient_torus(
    params: CscParams | float, n_s: int = 192, n_theta: int = 96
) -> "object":
    """Closed torus mesh of one vertical period of the outer branch.

    The period's end rings are glued after the vertical shift through
    ghost-vertex identification, so all local geometry is exact for the
    quotient surface (which is periodic along the axis and compact only
    after the quotient).
    """
    from .mesh import revolve

    one = quotient_profile(params, n_samples=max(n_s // 2 + 1, 17))
    return revolve(one, n_theta, closure="periodic")


def quotient_sor(params: CscParams | float, n_cells: int = 256) -> SorOperator:
    """Periodic radial operator of the quotient torus on a mirror-exact grid.

    The dense profile table at twice the cell resolution supplies both the
    cell interfaces (even rows) and the cell centers (odd rows), all with
    quadrature-exact arc positions; the reflected half reuses the same
    floats, so the grid's mirror symmetry is exact and parity
    classification is clean. Centers are uniform in the regularized
    parameter, which concentrates cells at the vertical-tangent joins.
    """
    if isinstance(params, (int, float)):
        params = CscParams(float(params))
    if n_cells < 16 or n_cells % 2:
        raise ValueError("n_cells must be even and at least 16")
    branch = outer_branch(params.k)
    dense = csc_profile(params, branch, n_samples=n_cells + 1)
    if dense.n_samples != n_cells + 1:
        raise CscError("internal: dense table size mismatch")

    t = dense.t
    s = dense.s
    s_half = s[-1]
    t_even, t_odd = t[0::2], t[1::2]
    s_even, s_odd = s[0::2], s[1::2]

    iface = np.concatenate([s_even, 2.0 * s_half - s_even[-2::-1]])
    cent = np.concatenate([s_odd, 2.0 * s_half - s_odd[::-1]])
    r_if = np.concatenate([t_even, t_even[-2::-1]])
    r_c = np.concatenate([t_odd, t_odd[::-1]])
    v_half = np.asarray(csc_well_strength(t_odd, params), dtype=float)
    v_c = np.concatenate([v_half, v_half[::-1]])
    n = r_c.size
    return SorOperator(
        interfaces=iface,
        centers=cent,
        r_interfaces=r_if,
        r_centers=r_c,
        v_centers=np.maximum(v_c, 0.0),
        boundary="periodic",
        reflection=np.arange(n)[::-1].copy(),
    )


def csc_well_strength(t, params):
    """H^2 - K along a branch, from the analytic slope (identically 1)."""
    h = csc_h(t, params)
    hp = csc_h_prime(t, params)
    _km, _kp, _h, _kk, s_sq = analytic_sor_curvatures(h, hp, t)
    return 0.25 * s_sq
