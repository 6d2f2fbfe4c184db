"""Acceptance gate: one test per criterion, at the stated tolerances.

Each test prints one `[acceptance N] ... PASS/FAIL` line (visible with -s
or on failure; the pytest -v status line mirrors it). Tolerances are
written inline next to each assertion.
"""

import math
import time

import numpy as np
import pytest

import surfspec as ss
from surfspec.fleet import run_fleet


def _line(n: int, desc: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"[acceptance {n}] {desc}: {status}{suffix}")
    assert ok, f"[acceptance {n}] {desc}: FAIL{suffix}"


@pytest.fixture(scope="module")
def sphere40k():
    t0 = time.perf_counter()
    mesh = ss.icosphere(6)  # 40962 vertices
    field = ss.discrete_curvatures(mesh)
    geom = ss.geometric_summary(mesh, field)
    result = ss.solve_fem(mesh, count=6, field=field)
    elapsed = time.perf_counter() - t0
    return {"mesh": mesh, "geom": geom, "result": result, "elapsed": elapsed}


@pytest.fixture(scope="module")
def fleet_all():
    return run_fleet("all")


def test_criterion_01_sphere_fem_gap_and_generic_bound(sphere40k):
    mesh = sphere40k["mesh"]
    assert mesh.n_vertices >= 40_000
    gap = sphere40k["result"].energies[1] - sphere40k["result"].energies[0]
    rhs = ss.gap_bound_result1(sphere40k["geom"])
    ok = (
        abs(gap - 1.0) <= 0.01          # gap within 1 percent of hbar^2/(2m) * 2/R^2
        and abs(rhs - 1.0) <= 0.005     # bound value within 0.5 percent
        and sphere40k["elapsed"] < 60.0
    )
    _line(
        1,
        "unit sphere fem gap and generic gap bound",
        ok,
        f"verts={mesh.n_vertices} gap={gap:.6f} rhs={rhs:.6f} "
        f"t={sphere40k['elapsed']:.1f}s",
    )


def test_criterion_02_gauss_bonnet_on_every_closed_mesh(sphere40k):
    meshes = {
        "sphere40k": sphere40k["mesh"],
        "ellipsoid-prolate": ss.ellipsoid(1.0, 1.0, 1.5, subdivisions=4),
        "ellipsoid-triaxial": ss.ellipsoid(0.8, 1.0, 1.2, subdivisions=4),
        "torus-2-1": ss.torus(2.0, 1.0, n_s=96, n_theta=192),
        "torus-3-1": ss.torus(3.0, 1.0, n_s=96, n_theta=192),
        "bumpy": ss.bumpy_sphere(4, amplitude=0.2),
        "genus2": ss.genus2(),
        "csc-0.33": ss.quotient_torus(0.33, n_s=96, n_theta=48),
        "csc-0.50": ss.quotient_torus(0.5, n_s=96, n_theta=48),
        "csc-0.70": ss.quotient_torus(0.7, n_s=96, n_theta=48),
    }
    worst_name, worst = "", -1.0
    for name, mesh in meshes.items():
        ratio = ss.gauss_bonnet_residual(mesh) / (1e-9 * mesh.n_vertices)
        if ratio > worst:
            worst_name, worst = name, ratio
    _line(
        2,
        "total angle defect matches 2 pi chi on every closed mesh (< 1e-9 per vertex)",
        worst < 1.0,
        f"worst {worst_name}: {worst:.2e} of the allowance",
    )


def test_criterion_03_willmore_values_and_scale_invariance():
    w_sphere = ss.willmore_energy(ss.icosphere(5))
    sphere_rel = abs(w_sphere - 4.0 * math.pi) / (4.0 * math.pi)

    two_pi_sq = 2.0 * math.pi**2
    w_torus = ss.willmore_energy(ss.torus(math.sqrt(2.0), 1.0, n_s=128, n_theta=256))
    torus_rel = abs(w_torus - two_pi_sq) / two_pi_sq

    m = ss.icosphere(4)
    w0 = ss.willmore_energy(m)
    scale_rel = max(
        abs(ss.willmore_energy(ss.scale_mesh(m, f)) - w0) / w0 for f in (0.5, 1.7, 2.0)
    )
    ok = sphere_rel <= 0.005 and torus_rel <= 0.01 and scale_rel <= 1e-10
    _line(
        3,
        "bending energies: sphere 4pi (0.5%), best torus 2pi^2 (1%), scale invariant (1e-10)",
        ok,
        f"sphere={sphere_rel:.2e} torus={torus_rel:.2e} scale={scale_rel:.2e}",
    )


def test_criterion_04_family_roots_and_identities():
    k0, t0 = ss.csc_bifurcation()
    root_ok = abs(k0 - (1.0 - math.log(2.0))) <= 1e-10 and abs(t0 - 0.5) <= 1e-10

    counts_ok = all(
        len(ss.csc_intervals(k)) == n
        for k, n in [(0.1, 1), (0.25, 1), (0.33, 2), (0.5, 2), (0.7, 2)]
    )

    worst_v = 0.0
    for k in (0.33, 0.5, 0.7):
        params = ss.CscParams(k=k)
        for branch in ss.csc_intervals(k):
            prof = ss.csc_profile(params, branch, n_samples=128)
            t = prof.t
            t = t[(t > 1e-12) & (ss.csc_denominator(np.maximum(t, 1e-12), k) > 1e-10)]
            worst_v = max(worst_v, float(np.max(np.abs(ss.csc_well_strength(t, params) - 1.0))))

    rng = np.random.default_rng(20240817)
    t = rng.uniform(1e-6, 3.0, 10_000)
    k = rng.uniform(0.02, 1.0, 10_000)
    lg = np.log(t)
    printed = 1.0 + (8.0 * k - 4.0 * lg) * t * t * lg - 4.0 * k * k * t * t
    ident = float(np.max(np.abs(ss.csc_denominator(t, k) - printed)))

    ok = root_ok and counts_ok and worst_v <= 1e-8 and ident <= 1e-12
    _line(
        4,
        "family bifurcation 1-ln2 (1e-10), branch counts, unit well depth (1e-8), "
        "radicand identity on 1e4 points (1e-12)",
        ok,
        f"|k0 err|={abs(k0 - (1 - math.log(2))):.1e} worstV={worst_v:.1e} ident={ident:.1e}",
    )


def test_criterion_05_quotient_geometry_and_even_sector_gap():
    for k in (0.33, 0.5, 0.7):
        t0 = time.perf_counter()
        ratios = []
        for n_s in (128, 256):
            geom = ss.geometric_summary(ss.quotient_torus(k, n_s=n_s, n_theta=n_s // 2))
            ratios.append(geom.willmore / geom.area)
        refine_ok = abs(ratios[-1] - 1.0) <= 0.01 and abs(ratios[-1] - 1.0) <= abs(
            ratios[0] - 1.0
        )

        res = ss.solve_sor(ss.quotient_sor(ss.CscParams(k=k), n_cells=512), count=12)
        evens = [e for e, lab in zip(res.energies, res.labels) if lab["parity"] == 1]
        sigma_gap = evens[1] - evens[0]
        hbar_sq_over_m = 2.0 * res.units.energy_factor
        margin = hbar_sq_over_m - sigma_gap
        elapsed = time.perf_counter() - t0
        ok = refine_ok and margin > 0.0 and elapsed < 120.0
        _line(
            5,
            f"k={k}: bending ratio -> 1 under refinement (1%), even-sector gap "
            "under hbar^2/m with positive margin, < 120 s",
            ok,
            f"W/A={ratios[-1]:.5f} gap={sigma_gap:.5f} margin={margin:.5f} t={elapsed:.1f}s",
        )


def test_criterion_06_backends_agree_on_first_ten():
    pairs = {
        "sphere": (
            ss.solve_sor(ss.sor_sphere(1.0, n_cells=512), count=10),
            ss.solve_fem(ss.icosphere(5), count=10),
        ),
        "torus": (
            ss.solve_sor(ss.sor_round_torus(2.0, 1.0, n_cells=768), count=10),
            ss.solve_fem(ss.torus(2.0, 1.0, n_s=110, n_theta=220), count=10),
        ),
    }
    worst = 0.0
    for name, (sor, fem) in pairs.items():
        width = max(float(np.max(np.abs(sor.eigenvalues))), 1e-2)
        # zero eigenvalues are compared against 1 percent of the spectral width
        denom = np.maximum.reduce(
            [np.abs(sor.eigenvalues), np.abs(fem.eigenvalues), np.full(10, 0.01 * width)]
        )
        worst = max(worst, float(np.max(np.abs(sor.eigenvalues - fem.eigenvalues) / denom)))
    _line(
        6,
        "separable and fem backends agree on the first 10 eigenvalues (1%)",
        worst <= 0.01,
        f"worst relative difference {worst:.2e}",
    )


def test_criterion_07_ground_state_bound_fleet_wide(fleet_all):
    lows_ok = all(
        next(v for v in m.report.verdicts if v["bound"] == "lambda0_lower")["pass"]
        for m in fleet_all.members
    )
    constant = next(m for m in fleet_all.members if m.name == "csc-0.50")
    res = constant.spectrum
    lam0_ok = abs(res.eigenvalues[0] + 1.0) <= 1e-8
    v0 = res.vectors[:, 0]
    ones = np.ones_like(v0)
    cos = abs(np.sum(res.mass * v0 * ones)) / math.sqrt(
        np.sum(res.mass * v0 * v0) * np.sum(res.mass * ones * ones)
    )
    vec_ok = cos > 1.0 - 1e-8
    _line(
        7,
        "ground state above -(hbar^2/2m) max V fleet-wide; constant well: "
        "lambda0 = -V with constant ground vector (1e-8)",
        lows_ok and lam0_ok and vec_ok,
        f"lambda0+1={res.eigenvalues[0] + 1.0:.1e} cos={cos:.12f}",
    )


def test_criterion_08_scaling_covariance():
    base_spec = ss.solve_sor(ss.sor_sphere(1.0, n_cells=512), count=6)
    base_gaps = base_spec.gaps()
    base_geom = ss.geometric_summary(ss.icosphere(4))
    base_rhs = ss.gap_bound_result1(base_geom)
    worst_gap, rhs_exact = 0.0, True
    for lam in (0.5, 2.0):
        spec = ss.solve_sor(ss.sor_sphere(lam, n_cells=512), count=6)
        worst_gap = max(
            worst_gap, float(np.max(np.abs(spec.gaps() * lam**2 / base_gaps - 1.0)))
        )
        rhs = ss.gap_bound_result1(ss.geometric_summary(ss.scale_mesh(ss.icosphere(4), lam)))
        rhs_exact = rhs_exact and (rhs == base_rhs / lam**2)
    _line(
        8,
        "rescaling by 0.5 and 2: gaps scale as 1/lambda^2 (0.5%), bound value exactly",
        worst_gap <= 0.005 and rhs_exact,
        f"worst gap deviation {worst_gap:.2e}, bound exact: {rhs_exact}",
    )


def test_criterion_09_undetermined_constants_stay_report_only(fleet_all):
    no_verdicts = all(
        {v["bound"] for v in m.report.verdicts} <= {"result1", "nona", "lambda0_lower"}
        for m in fleet_all.members
    )
    geom = ss.geometric_summary(ss.quotient_torus(0.5, n_s=96, n_theta=48))
    ef = 0.5
    c = 0.7
    r = {k: ss.gap_bound_result2(geom, k, c) for k in (2, 3, 4)}
    linear = math.isclose(r[3] - r[2], r[4] - r[3], rel_tol=1e-12) and math.isclose(
        r[3] - r[2], ef / (geom.area * c), rel_tol=1e-12
    )
    spread = ef * (geom.max_V - geom.mean_V)
    halved = math.isclose(
        ss.gap_bound_result2(geom, 4, 2 * c) - spread,
        (ss.gap_bound_result2(geom, 4, c) - spread) / 2.0,
        rel_tol=1e-12,
    )
    res = ss.solve_sor(ss.sor_sphere(1.0, n_cells=512), count=36)
    weyl = ss.weyl_check(res, ss.geometric_summary(ss.icosphere(4)), c_g=1.0)
    _line(
        9,
        "k-th-gap and asymptotic checks are report-only with the stated structure",
        no_verdicts and linear and halved and weyl["report_only"] is True,
        f"linear={linear} halved={halved}",
    )
