"""Constant-skew-curvature family: roots, profiles, identities, quotient.

Oracles:
  * printed radicand 1 + (8k - 4 ln t) t^2 ln t - 4 k^2 t^2, expanded
    independently in `printed_radicand` below;
  * the bifurcation constant 1 - ln 2 with double root 1/2, from setting
    the family slope numerator to -1 at its minimum (elementary calculus,
    frozen as literals);
  * profile tables integrated independently with scipy's adaptive ODE
    solver in t (not the substituted variable the library integrates in).
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

import surfspec as ss
from surfspec.csc import SMOOTH_JOIN_TOL

K0_LITERAL = 1.0 - math.log(2.0)        # 0.30685281944005469...
T0_LITERAL = 0.5


def printed_radicand(t, k):
    lg = np.log(t)
    return 1.0 + (8.0 * k - 4.0 * lg) * t * t * lg - 4.0 * k * k * t * t


def test_bifurcation_constant_and_double_root():
    k0, t0 = ss.csc_bifurcation()
    assert abs(k0 - K0_LITERAL) < 1e-10
    assert abs(t0 - T0_LITERAL) < 1e-10


def test_branch_counts_across_the_bifurcation():
    expected = {0.1: 1, 0.25: 1, 0.33: 2, 0.5: 2, 0.7: 2}
    for k, n in expected.items():
        branches = ss.csc_intervals(k)
        assert len(branches) == n, k
        kinds = [b.kind for b in branches]
        assert kinds == (["whole"] if n == 1 else ["inner", "outer"]), k


def test_half_k_has_root_exactly_at_one():
    # phi(1) = 2 (0 - 1/2) = -1, so the radicand vanishes exactly at t = 1
    assert ss.csc_denominator(1.0, 0.5) == 0.0
    outer = ss.outer_branch(0.5)
    assert abs(outer.t_lo - 1.0) < 1e-12


def test_radicand_identity_random_points():
    rng = np.random.default_rng(20240817)
    t = rng.uniform(1e-6, 3.0, 10_000)
    k = rng.uniform(0.02, 1.0, 10_000)
    direct = ss.csc_denominator(t, k)
    assert np.max(np.abs(direct - printed_radicand(t, k))) < 1e-12


def test_denominator_rejects_nonpositive_t():
    with pytest.raises(ValueError):
        ss.csc_denominator(0.0, 0.5)
    with pytest.raises(ValueError):
        ss.csc_denominator(-1.0, 0.5)


def test_slope_zero_at_log_apex():
    # phi(e^k) = 0 makes the profile horizontal there (up to log/exp rounding)
    for k in (0.33, 0.5, 0.7):
        assert abs(ss.csc_h(math.exp(k), ss.CscParams(k=k))) < 1e-14


def test_constant_skew_along_profiles():
    for k in (0.33, 0.5, 0.7):
        params = ss.CscParams(k=k)
        for branch in ss.csc_intervals(k):
            prof = ss.csc_profile(params, branch, n_samples=128)
            t = prof.t
            ok = (t > 1e-12) & (ss.csc_denominator(np.maximum(t, 1e-12), k) > 1e-10)
            t = t[ok]
            h = ss.csc_h(t, params)
            hp = ss.csc_h_prime(t, params)
            km, kp, H, K, s_sq = ss.analytic_sor_curvatures(h, hp, t)
            assert np.max(np.abs(H * H - K - 1.0)) < 1e-8, (k, branch.kind)
            assert np.max(np.abs(0.25 * s_sq - 1.0)) < 1e-8
            assert np.max(np.abs(ss.csc_well_strength(t, params) - 1.0)) < 1e-8


def test_curvature_difference_is_two():
    t = np.linspace(1.05, 1.6, 40)
    for sign in (1, -1):
        params = ss.CscParams(k=0.5, sign=sign)
        h = ss.csc_h(t, params)
        hp = ss.csc_h_prime(t, params)
        km, kp, *_ = ss.analytic_sor_curvatures(h, hp, t)
        assert np.allclose(km - kp, -2.0 * sign, atol=1e-10)


def _ivp_tables(k, t_span, t_eval):
    """Independent (g, s)(t) integration, graph form dg/dt = h, ds/dt = sqrt(1+h^2)."""
    params = ss.CscParams(k=k)

    def rhs(t, y):
        h = ss.csc_h(np.array([t]), params)[0]
        return [h, math.sqrt(1.0 + h * h)]

    sol = solve_ivp(
        rhs, t_span, [0.0, 0.0], t_eval=t_eval, rtol=1e-11, atol=1e-12, method="DOP853"
    )
    assert sol.success
    return sol.y[0], sol.y[1]


def test_profile_tables_match_ode_oracle():
    k = 0.5
    params = ss.CscParams(k=k)
    outer = ss.outer_branch(k)
    prof = ss.csc_profile(params, outer, n_samples=96)
    # compare on interior samples of the left half (monotone in t there)
    apex = math.exp(k)
    sel = (prof.t > outer.t_lo + 1e-3) & (prof.t < apex - 1e-3) & (prof.s < prof.s[-1] / 2)
    idx = np.where(sel)[0]
    t_pts = prof.t[idx]
    order = np.argsort(t_pts)
    t_sorted = t_pts[order]
    g_ref, s_ref = _ivp_tables(k, (t_sorted[0], t_sorted[-1]), t_sorted)
    dg = (prof.g[idx][order] - prof.g[idx][order][0]) - (g_ref - g_ref[0])
    ds = (prof.s[idx][order] - prof.s[idx][order][0]) - (s_ref - s_ref[0])
    assert np.max(np.abs(dg)) < 1e-8
    assert np.max(np.abs(ds)) < 1e-8


def test_outer_half_period_frozen_values():
    # frozen from two independent integrations (substituted quadrature and
    # adaptive ODE); the half period rises by g_half and spans arc s_half
    prof = ss.csc_profile(ss.CscParams(k=0.5), ss.outer_branch(0.5), n_samples=128)
    g_half = prof.g[-1] - prof.g[0]
    s_half = prof.s[-1] - prof.s[0]
    assert abs(2.0 * g_half - 0.7658329579280289) < 1e-9
    assert abs(s_half - 1.8228894480144573) < 1e-9


def test_profile_endpoints_have_vertical_tangent():
    prof = ss.csc_profile(ss.CscParams(k=0.33), ss.outer_branch(0.33), n_samples=64)
    lo, hi = prof.end_dt_ds
    assert lo < SMOOTH_JOIN_TOL
    assert hi < SMOOTH_JOIN_TOL


def test_stacking_periods_and_joins():
    base = ss.csc_profile(ss.CscParams(k=0.5), ss.outer_branch(0.5), n_samples=64)
    two = ss.stack_profile(base, n_periods=2)
    assert two.is_periodic()
    assert np.isclose(two.period, 2 * 2 * (base.g[-1] - base.g[0]))
    assert all(j.smooth for j in two.joins)
    assert two.n_samples == 2 * (2 * base.n_samples - 2)
    # the mirrored half retraces the same radii
    m = base.n_samples
    assert np.array_equal(two.t[:m], base.t)
    assert np.array_equal(two.t[m : 2 * m - 2], base.t[1:-1][::-1])


def test_whole_branch_stacks_with_axis_cusp():
    k = 0.25
    (branch,) = ss.csc_intervals(k)
    base = ss.csc_profile(ss.CscParams(k=k), branch, n_samples=64)
    one = ss.stack_profile(base, n_periods=1)
    smooth_flags = sorted(j.smooth for j in one.joins)
    assert smooth_flags == [False, True]  # axis cusp + vertical-tangent join


def test_outer_branch_requires_supercritical_k():
    with pytest.raises(ss.BranchError):
        ss.outer_branch(0.2)
    k0, _ = ss.csc_bifurcation()
    with pytest.raises((ss.BranchError, ss.DegenerateFamilyError)):
        ss.outer_branch(k0)


def test_degenerate_profile_refused():
    k0, _ = ss.csc_bifurcation()
    branches = ss.csc_intervals(k0)
    degenerate = [b for b in branches if b.degenerate]
    assert degenerate
    with pytest.raises(ss.DegenerateFamilyError):
        ss.csc_profile(ss.CscParams(k=k0), degenerate[0])


def test_quotient_profile_smooth_and_mesh_flat():
    one = ss.quotient_profile(0.5, n_samples=65)
    assert one.is_periodic()
    assert all(j.smooth for j in one.joins)
    mesh = ss.quotient_torus(0.5, n_s=96, n_theta=48)
    geom = ss.geometric_summary(mesh)
    assert geom.euler_characteristic == 0
    assert geom.gauss_bonnet_residual < 1e-9 * mesh.n_vertices
    assert abs(geom.willmore / geom.area - 1.0) < 5e-3


def test_quotient_sor_grid_is_mirror_exact():
    op = ss.quotient_sor(ss.CscParams(k=0.5), n_cells=64)
    assert op.boundary == "periodic"
    assert op.n_cells == 64
    # radii palindromic about the smooth join, bitwise
    assert np.array_equal(op.r_centers, op.r_centers[::-1])
    assert np.array_equal(op.r_interfaces[1:-1], op.r_interfaces[1:-1][::-1])
    p = op.reflection
    assert np.array_equal(p[p], np.arange(op.n_cells))
    assert np.max(np.abs(op.v_centers - 1.0)) < 1e-8


def test_quotient_sor_requires_even_cells():
    with pytest.raises(ValueError):
        ss.quotient_sor(ss.CscParams(k=0.5), n_cells=65)


def test_params_validation():
    with pytest.raises(ValueError):
        ss.CscParams(k=np.nan)
    with pytest.raises(ValueError):
        ss.CscParams(k=0.5, sign=2)
