"""Built-in verification fleet: surfaces with independently known geometry.

Each member pairs a geometric summary, taken from a mesh fine enough to
trust the bound inputs at the percent level, with a spectrum from the
cheapest reliable backend for that shape. Every member's report is then
certified, which enforces the fleet-wide gap invariant
E_1 - E_0 <= result1 * (1 + tol) plus the ground-state lower bound, and
the constant-skew gap bound wherever it applies.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .bounds import BoundReport, bound_report
from .csc import CscParams, quotient_sor, quotient_torus
from .curvature import GeometricSummary, geometric_summary
from .mesh import PhysicalUnits
from .spectral import (
    SpectralResult,
    solve_fem,
    solve_sor,
    sor_round_torus,
    sor_sphere,
)
from .surfaces import ellipsoid, icosphere, torus

Builder = Callable[[PhysicalUnits], "tuple[GeometricSummary, SpectralResult]"]


def _sphere_member(units: PhysicalUnits):
    mesh = icosphere(4)
    geom = geometric_summary(mesh)
    spec = solve_sor(sor_sphere(1.0, n_cells=512), count=12, units=units)
    return geom, spec


def _ellipsoid_member(a: float, b: float, c: float) -> Builder:
    def build(units: PhysicalUnits):
        mesh = ellipsoid(a, b, c, subdivisions=4)
        geom = geometric_summary(mesh)
        spec = solve_fem(mesh, count=12, units=units)
        return geom, spec

    return build


def _torus_member(big_radius: float, small_radius: float) -> Builder:
    def build(units: PhysicalUnits):
        mesh = torus(big_radius, small_radius, n_s=96, n_theta=192)
        geom = geometric_summary(mesh)
        op = sor_round_torus(big_radius, small_radius, n_cells=768)
        spec = solve_sor(op, count=12, units=units)
        return geom, spec

    return build


def _csc_member(k: float) -> Builder:
    def build(units: PhysicalUnits):
        params = CscParams(k=k)
        mesh = quotient_torus(params, n_s=192, n_theta=96)
        geom = geometric_summary(mesh)
        spec = solve_sor(quotient_sor(params, n_cells=512), count=12, units=units)
        return geom, spec

    return build


FLEET: dict[str, Builder] = {
    "sphere": _sphere_member,
    "ellipsoid-prolate": _ellipsoid_member(1.0, 1.0, 1.5),
    "ellipsoid-triaxial": _ellipsoid_member(0.8, 1.0, 1.2),
    "torus-2-1": _torus_member(2.0, 1.0),
    "torus-3-1": _torus_member(3.0, 1.0),
    "csc-0.33": _csc_member(0.33),
    "csc-0.50": _csc_member(0.5),
    "csc-0.70": _csc_member(0.7),
}

#: fast suite is meant to finish in well under two minutes
SUITES: dict[str, list[str]] = {
    "fast": ["sphere", "torus-2-1"],
    "all": list(FLEET),
}


@dataclass
class MemberResult:
    name: str
    geom: GeometricSummary
    spectrum: SpectralResult
    report: BoundReport
    elapsed: float

    @property
    def ok(self) -> bool:
        return all(v["pass"] for v in self.report.verdicts)

    def to_dict(self) -> dict:
        # timings stay out of the dict so identical runs serialize identically
        return {
            "name": self.name,
            "geometry": {
                "area": self.geom.area,
                "willmore": self.geom.willmore,
                "mean_V": self.geom.mean_V,
                "max_V": self.geom.max_V,
                "euler_characteristic": self.geom.euler_characteristic,
                "genus": self.geom.genus,
                "gauss_bonnet_residual": self.geom.gauss_bonnet_residual,
            },
            "spectrum": self.spectrum.to_dict(),
            "report": self.report.to_dict(),
            "ok": self.ok,
        }


@dataclass
class FleetReport:
    suite: str
    members: list[MemberResult]

    @property
    def ok(self) -> bool:
        return all(m.ok for m in self.members)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "ok": self.ok,
            "members": [m.to_dict() for m in self.members],
        }


def run_member(
    name: str,
    units: PhysicalUnits = PhysicalUnits(),
    tol: float = 0.02,
) -> MemberResult:
    if name not in FLEET:
        raise KeyError(f"unknown fleet member {name!r}; have {sorted(FLEET)}")
    t0 = time.perf_counter()
    geom, spec = FLEET[name](units)
    report = bound_report(name, geom, spec, units=units, tol=tol)
    return MemberResult(
        name=name,
        geom=geom,
        spectrum=spec,
        report=report,
        elapsed=time.perf_counter() - t0,
    )


def run_fleet(
    suite: str = "all",
    units: PhysicalUnits = PhysicalUnits(),
    tol: float = 0.02,
) -> FleetReport:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; have {sorted(SUITES)}")
    members = [run_member(name, units=units, tol=tol) for name in SUITES[suite]]
    return FleetReport(suite=suite, members=members)
