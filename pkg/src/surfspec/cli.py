"""Command-line front end: generate, solve, bound, verify.

All numerics live in the library; this module only parses arguments,
wires inputs to library calls, and serializes results. JSON output is
deterministic (sorted keys, repr floats), so identical runs produce
identical bytes.

Exit codes: 0 success, 1 usage error, 2 numerical failure,
3 certification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bounds import BoundsError, bound_report
from .csc import (
    BranchError,
    CscError,
    CscParams,
    DegenerateFamilyError,
    csc_bifurcation,
    csc_intervals,
    csc_profile,
    quotient_sor,
    quotient_torus,
    stack_profile,
)
from .curvature import discrete_curvatures, geometric_summary
from .fleet import SUITES, run_fleet
from .mesh import MeshError, PhysicalUnits, load_mesh, revolve_strip_obj
from .profile import ProfileCurve, ProfileError
from .spectral import (
    SpectralError,
    SpectralResult,
    solve_fem,
    solve_sor,
    sor_round_torus,
    sor_sphere,
)
from .surfaces import ellipsoid, icosphere, torus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_CERTIFICATION = 3

#: surface generation is refused this close to the branch bifurcation
DEGENERATE_K_WINDOW = 1e-3

_USAGE_ERRORS = (
    ValueError,
    KeyError,
    OSError,
    MeshError,
    ProfileError,
    BranchError,
    DegenerateFamilyError,
    BoundsError,
)


class _CliUsageError(Exception):
    pass


def _emit(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_config(path: str) -> dict[str, str]:
    """Flat `key = value` file; blank lines and # comments ignored."""
    raw: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise _CliUsageError(f"{path}:{lineno}: expected 'key = value'")
            key, val = stripped.split("=", 1)
            raw[key.strip()] = val.strip()
    return raw


def _typed_config(sub: argparse.ArgumentParser, raw: dict[str, str]) -> dict:
    actions = {a.dest: a for a in sub._actions}
    out = {}
    for key, val in raw.items():
        dest = key.replace("-", "_")
        act = actions.get(dest)
        if act is None or dest in ("help", "config"):
            raise _CliUsageError(f"unknown config key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            out[dest] = val.lower() in ("1", "true", "yes", "on")
        elif act.type is not None:
            out[dest] = act.type(val)
        else:
            out[dest] = val
        if act.choices is not None and out[dest] not in act.choices:
            raise _CliUsageError(
                f"config key {key!r}: {val!r} not one of {sorted(act.choices)}"
            )
    return out


def _units(args) -> PhysicalUnits:
    return PhysicalUnits(hbar=args.hbar, mass=args.mass)


# -- csc ------------------------------------------------------------------


def _closed_stack(base: ProfileCurve, periods: int) -> ProfileCurve:
    """Stacked profile as an open curve including the closing sample.

    stack_profile stores each tile without its closing point (periodic
    storage); plotting and strip export want the final point back.
    """
    stacked = stack_profile(base, periods)
    arc = 2.0 * periods * (base.s[-1] - base.s[0])
    closing = [stacked.t[0], stacked.g[0] + stacked.period, stacked.s[0] + arc]
    return ProfileCurve(np.vstack([stacked.samples, closing]))


def cmd_csc(args) -> int:
    params = CscParams(k=args.k)
    k0, _t0 = csc_bifurcation()
    branches = csc_intervals(args.k)
    report = {
        "k": args.k,
        "k0": k0,
        "branches": [
            {
                "t_lo": b.t_lo,
                "t_hi": b.t_hi,
                "kind": b.kind,
                "degenerate": b.degenerate,
            }
            for b in branches
        ],
    }

    wants_surface = bool(args.csv or args.obj)
    if wants_surface:
        if abs(args.k - k0) < DEGENERATE_K_WINDOW:
            raise _CliUsageError(
                f"k={args.k} is within {DEGENERATE_K_WINDOW} of the bifurcation "
                f"k0={k0:.6f}; the requested branch is degenerate there and no "
                "surface is generated (the branch report is still available "
                "without --csv/--obj)"
            )
        by_kind = {b.kind: b for b in branches}
        kind = args.branch
        if kind == "auto":
            kind = "outer" if "outer" in by_kind else "whole"
        if kind not in by_kind:
            raise _CliUsageError(
                f"k={args.k} has no {kind!r} branch; available: {sorted(by_kind)}"
            )
        base = csc_profile(params, by_kind[kind], n_samples=args.samples)
        closed = _closed_stack(base, args.periods)
        if args.csv:
            base.to_csv(args.csv + "-base.csv")
            closed.to_csv(args.csv + "-stacked.csv")
        if args.obj:
            revolve_strip_obj(closed, args.n_theta, args.obj)

    _emit(report, args.json)
    return EXIT_OK


# -- spectrum -------------------------------------------------------------

_BUILTIN_SURFACES = ("sphere", "ellipsoid", "torus", "csc-torus")


def _surface_mesh(args):
    if args.mesh:
        return load_mesh(args.mesh)
    if args.surface == "sphere":
        return icosphere(args.subdivisions, args.radius)
    if args.surface == "ellipsoid":
        return ellipsoid(args.a, args.b, args.c, subdivisions=args.subdivisions)
    if args.surface == "torus":
        return torus(args.big_radius, args.small_radius, n_s=args.n_s, n_theta=args.n_theta)
    if args.surface == "csc-torus":
        return quotient_torus(CscParams(k=args.k), n_s=args.n_s, n_theta=args.n_theta)
    raise _CliUsageError(f"unknown surface {args.surface!r}")


def _pick_method(args) -> str:
    if args.method:
        return args.method
    if args.mesh or args.surface == "ellipsoid":
        return "fem"
    return "sor"


def _solve(args, units: PhysicalUnits) -> SpectralResult:
    method = _pick_method(args)
    if method == "sor":
        if args.mesh:
            raise _CliUsageError("--method sor needs a builtin surface of revolution")
        if args.surface == "sphere":
            op = sor_sphere(args.radius, n_cells=args.n_cells)
        elif args.surface == "torus":
            op = sor_round_torus(args.big_radius, args.small_radius, n_cells=args.n_cells)
        elif args.surface == "csc-torus":
            op = quotient_sor(CscParams(k=args.k), n_cells=args.n_cells)
        else:
            raise _CliUsageError(f"no 1d radial operator for surface {args.surface!r}")
        return solve_sor(op, count=args.count, units=units)
    return solve_fem(_surface_mesh(args), count=args.count, units=units)


def cmd_spectrum(args) -> int:
    if bool(args.mesh) == bool(args.surface):
        raise _CliUsageError("exactly one of --surface or --mesh is required")
    result = _solve(args, _units(args))
    _emit(result.to_dict(), args.json)
    return EXIT_OK


# -- bounds ---------------------------------------------------------------


def _load_spectrum(path: str) -> SpectralResult:
    with open(path) as fh:
        d = json.load(fh)
    lam = np.asarray(d["lambda"], dtype=float)
    energy = np.asarray(d["energy"], dtype=float)
    if lam.size != energy.size or lam.size == 0:
        raise _CliUsageError(f"{path}: lambda/energy arrays missing or mismatched")
    units = PhysicalUnits(**d.get("units", {}))
    labels = d.get("labels") or [{} for _ in range(lam.size)]
    residuals = np.asarray(d.get("residuals", np.zeros(lam.size)), dtype=float)
    return SpectralResult(
        eigenvalues=lam,
        energies=energy,
        labels=[dict(lab) for lab in labels],
        residuals=residuals,
        mesh_size=int(d.get("mesh_size", 0)),
        units=units,
        backend=str(d.get("backend", "file")),
    )


def cmd_bounds(args) -> int:
    if bool(args.mesh) == bool(args.surface):
        raise _CliUsageError("exactly one of --surface or --mesh is required")
    units = _units(args)
    mesh = _surface_mesh(args)
    geom = geometric_summary(mesh, discrete_curvatures(mesh))
    if args.spectrum:
        spectrum = _load_spectrum(args.spectrum)
    else:
        spectrum = _solve(args, units)
    name = args.surface or args.mesh
    report = bound_report(
        name,
        geom,
        spectrum,
        units=spectrum.units,
        c_g=args.c_g,
        tol=args.tol,
    )
    _emit(report.to_dict(), args.json)
    ok = all(v["pass"] for v in report.verdicts)
    return EXIT_OK if ok else EXIT_CERTIFICATION


# -- verify ---------------------------------------------------------------


def cmd_verify(args) -> int:
    rep = run_fleet(args.suite, units=_units(args), tol=args.tol)
    width = max(len(m.name) for m in rep.members)
    print(f"{'member':<{width}}  {'gap':>10}  {'result1':>10}  {'nona':>10}  "
          f"{'E0':>10}  {'E0_lower':>10}  status")
    for m in rep.members:
        gap = m.spectrum.energies[1] - m.spectrum.energies[0]
        nona = "-" if m.report.nona is None else f"{m.report.nona:10.5f}"
        status = "pass" if m.ok else "FAIL"
        print(
            f"{m.name:<{width}}  {gap:10.5f}  {m.report.result1:10.5f}  {nona:>10}  "
            f"{m.spectrum.energies[0]:10.5f}  {m.report.lambda0_lower:10.5f}  {status}"
        )
    print(f"suite {rep.suite}: {'all bounds hold' if rep.ok else 'CERTIFICATION FAILED'}")
    if args.json:
        _emit(rep.to_dict(), args.json)
    return EXIT_OK if rep.ok else EXIT_CERTIFICATION


# -- parser ---------------------------------------------------------------


def _add_units(sub):
    sub.add_argument("--hbar", type=float, default=1.0, help="hbar (default 1)")
    sub.add_argument("--mass", type=float, default=1.0, help="particle mass (default 1)")


def _add_surface_flags(sub):
    sub.add_argument("--surface", choices=_BUILTIN_SURFACES, help="builtin surface")
    sub.add_argument("--mesh", help="OBJ/OFF mesh file instead of a builtin surface")
    sub.add_argument("--radius", type=float, default=1.0, help="sphere radius")
    sub.add_argument("--a", type=float, default=1.0, help="ellipsoid semi-axis a")
    sub.add_argument("--b", type=float, default=1.0, help="ellipsoid semi-axis b")
    sub.add_argument("--c", type=float, default=1.5, help="ellipsoid semi-axis c")
    sub.add_argument("--big-radius", type=float, default=2.0, help="torus ring radius")
    sub.add_argument("--small-radius", type=float, default=1.0, help="torus tube radius")
    sub.add_argument("--k", type=float, default=0.5, help="constant-skew family parameter")
    sub.add_argument("--subdivisions", type=int, default=4, help="icosphere refinement")
    sub.add_argument("--n-s", type=int, default=96, help="mesh samples along the profile")
    sub.add_argument("--n-theta", type=int, default=192, help="mesh samples around the axis")
    sub.add_argument("--n-cells", type=int, default=512, help="1d radial grid cells")
    sub.add_argument("--method", choices=("fem", "sor"), help="solver backend")
    sub.add_argument("--count", type=int, default=12, help="number of eigenvalues")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="surfspec",
        description="surfaces, curvature-induced potentials, spectra, and gap bounds",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    table: dict[str, argparse.ArgumentParser] = {}

    c = subs.add_parser("csc", help="constant-skew family: branches, profiles, surfaces")
    c.add_argument("--k", type=float, required=True, help="family parameter (> 0)")
    c.add_argument("--branch", choices=("auto", "inner", "outer", "whole"), default="auto")
    c.add_argument("--periods", type=int, default=1, help="stacking periods")
    c.add_argument("--samples", type=int, default=129, help="profile samples per arc")
    c.add_argument("--n-theta", type=int, default=96, help="revolution samples for --obj")
    c.add_argument("--csv", help="prefix for -base.csv and -stacked.csv profile data")
    c.add_argument("--obj", help="write the revolved stacked surface as OBJ")
    c.add_argument("--json", help="write the branch report here instead of stdout")
    c.add_argument("--config", help="flat key = value config file")
    c.set_defaults(func=cmd_csc)
    table["csc"] = c

    s = subs.add_parser("spectrum", help="lowest eigenvalues of -laplacian - (H^2 - K)")
    _add_surface_flags(s)
    _add_units(s)
    s.add_argument("--json", help="write the spectrum JSON here instead of stdout")
    s.add_argument("--config", help="flat key = value config file")
    s.set_defaults(func=cmd_spectrum)
    table["spectrum"] = s

    b = subs.add_parser("bounds", help="evaluate and certify spectral-gap bounds")
    _add_surface_flags(b)
    _add_units(b)
    b.add_argument("--spectrum", help="spectrum JSON to certify against (else solve)")
    b.add_argument("--c-g", type=float, default=None, help="genus constant for the k-th gap bound")
    b.add_argument("--tol", type=float, default=0.02, help="certification tolerance")
    b.add_argument("--json", help="write the bound report here instead of stdout")
    b.add_argument("--config", help="flat key = value config file")
    b.set_defaults(func=cmd_bounds)
    table["bounds"] = b

    v = subs.add_parser("verify", help="run the built-in verification fleet")
    v.add_argument("--suite", choices=sorted(SUITES), default="fast")
    v.add_argument("--tol", type=float, default=0.02, help="certification tolerance")
    _add_units(v)
    v.add_argument("--json", help="also write a machine-readable report here")
    v.add_argument("--config", help="flat key = value config file")
    v.set_defaults(func=cmd_verify)
    table["verify"] = v

    return parser, table


def main(argv=None) -> int:
    parser, table = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        if getattr(args, "config", None):
            typed = _typed_config(table[args.command], _read_config(args.config))
            table[args.command].set_defaults(**typed)
            args = parser.parse_args(argv)  # explicit flags still win
        return args.func(args)
    except _CliUsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SpectralError, CscError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
