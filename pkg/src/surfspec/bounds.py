"""Spectral-gap bounds from surface geometry, and their certification.

Every bound is evaluated from a GeometricSummary (area A, Willmore energy
W, genus, potential statistics of V = H^2 - K) and converted to energy
with PhysicalUnits once. Certified bounds are compared against a computed
spectrum; quantities involving the undetermined genus constant c_g are
evaluated only with a user-supplied value and are never certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curvature import GeometricSummary
from .mesh import PhysicalUnits
from .spectral import SpectralResult


class BoundsError(Exception):
    pass


class NotConstantSkewError(BoundsError):
    """The surface does not have (numerically) constant H^2 - K."""


#: relative spread of V (against the scale W/A) below which a surface is
#: treated as constant-skew for the bounds that require it
CONSTANT_SKEW_SPREAD = 0.05


def potential_spread(geom: GeometricSummary) -> float:
    """max V - mean V, the non-umbilicity spread entering two bounds."""
    return float(geom.max_V - geom.mean_V)


def is_constant_skew(geom: GeometricSummary, spread_tol: float = CONSTANT_SKEW_SPREAD) -> bool:
    scale = max(geom.willmore / geom.area, geom.mean_V, 1e-300)
    return potential_spread(geom) <= spread_tol * scale


def gap_bound_result1(geom: GeometricSummary, units: PhysicalUnits = PhysicalUnits()) -> float:
    """(hbar^2/2m) * (2 W / A + (max V - mean V)).

    Valid on any closed surface; equality exactly on round spheres, where
    the spread term vanishes and 2W/A = 2/R^2.
    """
    rhs = 2.0 * geom.willmore / geom.area + potential_spread(geom)
    return units.energy_factor * rhs


def gap_bound_nona(
    geom: GeometricSummary,
    genus: int | None = None,
    units: PhysicalUnits = PhysicalUnits(),
    spread_tol: float = CONSTANT_SKEW_SPREAD,
) -> float:
    """(hbar^2 / (m A)) * min{4 pi (1 + genus), W}, constant-skew only.

    The improvement over the generic bound holds only for surfaces with
    constant H^2 - K; anything with a visible potential spread is refused
    rather than silently bounded.
    """
    if genus is None:
        genus = geom.genus
    if genus < 0:
        raise BoundsError("genus must be >= 0 (orientable closed surface)")
    if not is_constant_skew(geom, spread_tol):
        raise NotConstantSkewError(
            f"potential spread {potential_spread(geom):.3e} too large for a "
            "constant-skew-only bound"
        )
    val = min(4.0 * math.pi * (1 + genus), geom.willmore) / geom.area
    return 2.0 * units.energy_factor * val


def gap_bound_oka(
    geom: GeometricSummary, units: PhysicalUnits = PhysicalUnits()
) -> tuple[float, float]:
    """Both readings of the constant-skew topology bound, report-only.

    printed: (hbar^2/m) * (mean S^2 + 4 pi (1 - genus)/A), taking the
        printed constant to be the full curvature difference squared;
    reconstructed: (hbar^2/m) * W/A, the form the quantities actually
        combine to under the Gauss-Bonnet identity
        W = (A/4) mean S^2 + 2 pi chi when the spread vanishes.
    The two differ by the squared-constant convention; both are reported,
    neither certified.
    """
    printed = geom.mean_S_sq + 4.0 * math.pi * (1 - geom.genus) / geom.area
    reconstructed = geom.willmore / geom.area
    f = 2.0 * units.energy_factor  # hbar^2 / m
    return f * printed, f * reconstructed


def gap_bound_result2(
    geom: GeometricSummary,
    k: int,
    c_g: float | None,
    units: PhysicalUnits = PhysicalUnits(),
) -> float:
    """(hbar^2/2m) * (k/(A c_g) + (max V - mean V)) for the k-th gap.

    c_g is an undetermined genus-dependent constant; callers must supply
    a value, and the result is report-only (never certified).
    """
    if k < 2:
        raise BoundsError("result2 applies to gaps E_k - E_0 with k >= 2")
    if c_g is None:
        raise BoundsError("c_g is undetermined; a value must be supplied")
    if c_g <= 0:
        raise BoundsError("c_g must be positive")
    rhs = k / (geom.area * c_g) + potential_spread(geom)
    return units.energy_factor * rhs


def lambda0_lower_bound(
    geom: GeometricSummary, units: PhysicalUnits = PhysicalUnits()
) -> float:
    """Rayleigh bound E_0 >= -(hbar^2/2m) max V."""
    return -units.energy_factor * geom.max_V


def weyl_check(
    result: SpectralResult, geom: GeometricSummary, c_g: float
) -> dict:
    """Running minimum of (E_k - E_0)/k against (hbar^2/2m)/(c_g A).

    Report-only asymptotic sanity check; requires a reasonably long
    spectrum to say anything about a liminf.
    """
    if result.count < 30:
        raise BoundsError("weyl_check needs at least 30 eigenvalues")
    if c_g <= 0:
        raise BoundsError("c_g must be positive")
    e = result.energies
    k = np.arange(1, e.size)
    ratios = (e[1:] - e[0]) / k
    running_min = np.minimum.accumulate(ratios)
    reference = result.units.energy_factor / (c_g * geom.area)
    k_min = int(np.argmin(ratios)) + 1
    return {
        "ratio_min": float(ratios.min()),
        "k_at_min": k_min,
        "reference": float(reference),
        "running_min_tail": [float(x) for x in running_min[-5:]],
        "below_reference": bool(ratios.min() <= reference),
        "report_only": True,
    }


@dataclass
class BoundReport:
    """All bound values for one surface, plus certification verdicts.

    bounds values are energies; None marks a bound that was refused
    (nona on non-constant-skew surfaces) or not requested (result2
    without c_g). verdicts cover only certified bounds.
    """

    surface: str
    units: PhysicalUnits
    result1: float
    nona: float | None
    oka_printed: float
    oka_reconstructed: float
    lambda0_lower: float
    result2: float | None = None
    gaps: np.ndarray = field(default_factory=lambda: np.zeros(0))
    verdicts: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        bounds = {
            "result1": self.result1,
            "nona": self.nona,
            "oka_printed": self.oka_printed,
            "oka_reconstructed": self.oka_reconstructed,
            "lambda0_lower": self.lambda0_lower,
        }
        if self.result2 is not None:
            bounds["result2"] = self.result2
        return {
            "surface": self.surface,
            "units": {"hbar": self.units.hbar, "mass": self.units.mass},
            "bounds": bounds,
            "gaps": [float(g) for g in self.gaps],
            "verdicts": self.verdicts,
        }


def certify(
    report: BoundReport, spectrum: SpectralResult, tol: float = 0.02
) -> list[dict]:
    """Compare certified bounds against the computed spectrum.

    Gap bounds pass when E_1 - E_0 <= rhs (1 + tol); the ground-state
    bound passes when E_0 >= lower - tol * scale. Margins are relative
    for gap bounds ((rhs - gap)/rhs) and absolute for the ground bound.
    Report-only quantities (both oka readings, result2) get no verdict.
    """
    if spectrum.count < 2:
        raise BoundsError("certification needs at least 2 eigenvalues")
    gap = float(spectrum.energies[1] - spectrum.energies[0])
    e0 = float(spectrum.energies[0])
    verdicts = []

    def gap_verdict(name: str, rhs: float | None):
        if rhs is None:
            return
        ok = gap <= rhs * (1.0 + tol) + 1e-300
        margin = (rhs - gap) / rhs if rhs != 0 else -np.inf
        verdicts.append({"bound": name, "pass": bool(ok), "margin": float(margin)})

    gap_verdict("result1", report.result1)
    gap_verdict("nona", report.nona)

    scale = max(abs(report.lambda0_lower), spectrum.units.energy_factor)
    ok0 = e0 >= report.lambda0_lower - tol * scale
    verdicts.append(
        {
            "bound": "lambda0_lower",
            "pass": bool(ok0),
            "margin": float(e0 - report.lambda0_lower),
        }
    )
    report.verdicts = verdicts
    return verdicts


def bound_report(
    surface: str,
    geom: GeometricSummary,
    spectrum: SpectralResult,
    units: PhysicalUnits | None = None,
    c_g: float | None = None,
    result2_k: int = 2,
    tol: float = 0.02,
) -> BoundReport:
    """Evaluate every bound for one surface and certify the certifiable."""
    if units is None:
        units = spectrum.units
    try:
        nona = gap_bound_nona(geom, units=units)
    except NotConstantSkewError:
        nona = None
    printed, reconstructed = gap_bound_oka(geom, units)
    result2 = None
    if c_g is not None:
        result2 = gap_bound_result2(geom, result2_k, c_g, units)
    report = BoundReport(
        surface=surface,
        units=units,
        result1=gap_bound_result1(geom, units),
        nona=nona,
        oka_printed=printed,
        oka_reconstructed=reconstructed,
        lambda0_lower=lambda0_lower_bound(geom, units),
        result2=result2,
        gaps=spectrum.gaps(),
    )
    certify(report, spectrum, tol=tol)
    return report
