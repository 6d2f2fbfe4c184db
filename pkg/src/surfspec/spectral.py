"""Eigensolvers for the surface Hamiltonian -Laplacian - (H^2 - K).

Two independent discretizations of the same operator:

* a 1D finite-volume scheme for surfaces of revolution, where separation
  of variables in the angle reduces the problem to a family of radial
  problems indexed by the Fourier mode m (azimuthal quantum number);
* a 2D finite-element scheme (cotangent stiffness, lumped mass) on
  arbitrary closed triangle meshes.

Every production number can therefore be cross-checked between backends.
All eigenvalues are dimensionless (1/length^2); energies are obtained by
the single conversion E = (hbar^2 / 2 mass) * lambda at the reporting
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .curvature import CurvatureField, _accumulate, discrete_curvatures
from .mesh import PhysicalUnits, TriangleMesh


class SpectralError(Exception):
    pass


class ConvergenceError(SpectralError):
    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


class CompletenessError(SpectralError):
    def __init__(self, msg, required_m_max):
        super().__init__(msg)
        self.required_m_max = required_m_max


class SymmetryError(SpectralError):
    pass


# -- 1D radial operator ------------------------------------------------------


@dataclass(frozen=True)
class SorOperator:
    """Radial data of a revolution surface on a cell grid in arc length.

    interfaces: (N+1,) cell boundaries s_0 < ... < s_N along the profile;
        for periodic operators s_N is the wrap image of s_0 (one period).
    centers: (N,) representative point of each cell, strictly inside it.
    r_interfaces / r_centers: distance from the axis there.
    v_centers: potential H^2 - K sampled at the centers.
    boundary: "periodic" glues cell N-1 to cell 0 (quotient tori, circles);
        "axis" is a profile running pole to pole, where the end interfaces
        sit on the axis (r = 0) and carry no flux.
    reflection: optional index involution p with cell i mirroring cell p[i]
        under the profile symmetry s -> -s; enables parity classification.
    """

    interfaces: np.ndarray
    centers: np.ndarray
    r_interfaces: np.ndarray
    r_centers: np.ndarray
    v_centers: np.ndarray
    boundary: str = "periodic"
    reflection: np.ndarray | None = None

    def __post_init__(self):
        for name in ("interfaces", "centers", "r_interfaces", "r_centers", "v_centers"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.centers.size
        if self.interfaces.size != n + 1:
            raise ValueError("need one more interface than cells")
        if not np.all(np.diff(self.interfaces) > 0):
            raise ValueError("interfaces must be strictly increasing")
        if np.any(self.centers <= self.interfaces[:-1]) or np.any(
            self.centers >= self.interfaces[1:]
        ):
            raise ValueError("each center must lie inside its cell")
        if self.r_interfaces.size != n + 1 or self.r_centers.size != n:
            raise ValueError("radius arrays must match the grid")
        if np.any(self.r_centers <= 0):
            raise ValueError("cell radii must be positive")
        if self.boundary not in ("periodic", "axis"):
            raise ValueError("boundary must be 'periodic' or 'axis'")
        if self.boundary == "periodic" and np.any(self.r_interfaces <= 0):
            raise ValueError("periodic profiles never touch the axis")
        if np.any(self.v_centers < -1e-9):
            raise ValueError("potential must be nonnegative")
        if self.reflection is not None:
            p = np.asarray(self.reflection, dtype=np.int64)
            object.__setattr__(self, "reflection", p)
            if p.size != n or np.any(np.sort(p) != np.arange(n)):
                raise ValueError("reflection must be a permutation of the cells")
            if np.any(p[p] != np.arange(n)):
                raise ValueError("reflection must be an involution")

    @property
    def n_cells(self) -> int:
        return self.centers.size

    @property
    def period(self) -> float:
        return float(self.interfaces[-1] - self.interfaces[0])

    @property
    def v_max(self) -> float:
        return float(self.v_centers.max(initial=0.0))

    @property
    def r_max(self) -> float:
        return float(max(self.r_centers.max(), self.r_interfaces.max()))


@dataclass(frozen=True)
class EigenSystem:
    """Assembled generalized problem A u = lambda B u with diagonal B."""

    a: sp.spmatrix
    mass: np.ndarray
    v_max: float
    mode: int | None = None
    multiplicity: int = 1
    reflection: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.mass.size


def assemble_sor_mode(op: SorOperator, m: int) -> EigenSystem:
    """Radial eigensystem for one Fourier mode.

    Weak form of -(1/r)(r f')' + (m^2/r^2) f - V f against the measure
    r ds: two-point fluxes r_interface * (f_j - f_i)/(s_j - s_i) plus the
    diagonal centrifugal and potential terms. The stiffness part is
    positive semidefinite by construction, which makes the Rayleigh bound
    lambda_0 >= -max V exact for the discrete system too.
    """
    if m < 0:
        raise ValueError("mode m must be >= 0")
    n = op.n_cells
    w = op.r_centers * np.diff(op.interfaces)
    diag = (m * m) / op.r_centers**2 * w - op.v_centers * w

    rows = []
    cols = []
    vals = []
    add = np.zeros(n)

    # interior interfaces j = 1..n-1 couple cells j-1 and j
    kappa = op.r_interfaces[1:-1] / (op.centers[1:] - op.centers[:-1])
    i = np.arange(n - 1)
    rows.extend([i, i + 1])
    cols.extend([i + 1, i])
    vals.extend([-kappa, -kappa])
    np.add.at(add, i, kappa)
    np.add.at(add, i + 1, kappa)

    if op.boundary == "periodic":
        dist = (op.centers[0] - op.interfaces[0]) + (op.interfaces[-1] - op.centers[-1])
        kw = op.r_interfaces[0] / dist
        rows.append([n - 1, 0])
        cols.append([0, n - 1])
        vals.append([-kw, -kw])
        add[0] += kw
        add[n - 1] += kw
    # axis boundary: end interfaces have r = 0, no flux to add

    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(add + diag)
    a = sp.csc_matrix(
        (np.concatenate([np.atleast_1d(v) for v in vals]),
         (np.concatenate([np.atleast_1d(r) for r in rows]),
          np.concatenate([np.atleast_1d(c) for c in cols]))),
        shape=(n, n),
    )
    return EigenSystem(
        a=a,
        mass=w,
        v_max=op.v_max,
        mode=m,
        multiplicity=1 if m == 0 else 2,
        reflection=op.reflection,
    )


def assemble_fem(mesh: TriangleMesh, field: CurvatureField | None = None) -> EigenSystem:
    """Cotangent-stiffness / lumped-mass system on a closed mesh.

    Row sums of the stiffness are zero (constants are exact null vectors);
    the potential enters as -V_vertex * weight_vertex on the diagonal. Per
    triangle the stiffness block is the exact Dirichlet energy of linear
    elements, hence positive semidefinite after assembly.
    """
    if field is None:
        field = discrete_curvatures(mesh)
    _angle, _area, _mcv, _nrm, cots, _areas = _accumulate(mesh)
    f = mesh.faces
    n = mesh.n_vertices

    # corner c is opposite edge (c+1, c+2); weight cot(theta_c)/2
    rows = []
    cols = []
    half = 0.5 * cots
    for c in range(3):
        a = f[:, (c + 1) % 3]
        b = f[:, (c + 2) % 3]
        rows.extend([a, b])
        cols.extend([b, a])
    vals = [-half[:, c] for c in range(3) for _ in range(2)]

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    diag = np.zeros(n)
    np.add.at(diag, rows, -vals)

    w = field.weight.copy()
    v = field.V
    a = sp.csc_matrix((vals, (rows, cols)), shape=(n, n))
    a = a + sp.diags(diag - v * w, format="csc")
    return EigenSystem(a=a, mass=w, v_max=float(v.max()), mode=None, multiplicity=1)


# -- eigen extraction ---------------------------------------------------------


@dataclass
class SpectralResult:
    """Sorted lowest eigenpairs with physical energies and metadata.

    labels carry per-pair metadata: the Fourier mode for the 1D backend
    (None for FEM) and the parity under a profile reflection when one was
    classified. residuals are ||(A - lambda B) u|| / ||u|| normalized by
    the matrix scale, so they are resolution- and unit-insensitive.
    vectors/mass are kept for downstream classification, not serialized.
    """

    eigenvalues: np.ndarray
    energies: np.ndarray
    labels: list[dict]
    residuals: np.ndarray
    mesh_size: int
    units: PhysicalUnits
    backend: str
    vectors: np.ndarray | None = None
    mass: np.ndarray | None = None

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        self.energies = np.asarray(self.energies, dtype=float)
        self.residuals = np.asarray(self.residuals, dtype=float)
        if np.any(np.diff(self.eigenvalues) < -1e-10 * self._scale()):
            raise SpectralError("eigenvalues not sorted")

    def _scale(self) -> float:
        return max(1.0, float(np.abs(self.eigenvalues).max(initial=0.0)))

    @property
    def count(self) -> int:
        return self.eigenvalues.size

    def gaps(self) -> np.ndarray:
        """E_k - E_0 for k = 1.. (physical units)."""
        return self.energies[1:] - self.energies[0]

    def to_dict(self) -> dict:
        return {
            "lambda": [float(x) for x in self.eigenvalues],
            "energy": [float(x) for x in self.energies],
            "labels": [
                {"mode": lab.get("mode"), "parity": lab.get("parity")}
                for lab in self.labels
            ],
            "residuals": [float(x) for x in self.residuals],
            "units": {"hbar": self.units.hbar, "mass": self.units.mass},
            "backend": self.backend,
            "mesh_size": self.mesh_size,
        }


def _rel_residuals(a, mass, vals, vecs) -> np.ndarray:
    scale = np.abs(a).sum(axis=1).max() + np.abs(vals).max(initial=0.0) * mass.max()
    out = np.empty(vals.size)
    for i in range(vals.size):
        u = vecs[:, i]
        r = a @ u - vals[i] * (mass * u)
        out[i] = np.linalg.norm(r) / (np.linalg.norm(u) * scale)
    return out


def lowest_eigenpairs(
    system: EigenSystem,
    count: int,
    tol: float = 1e-8,
    units: PhysicalUnits = PhysicalUnits(),
) -> SpectralResult:
    """The `count` algebraically smallest eigenpairs of A u = lambda B u.

    Shift-invert Lanczos about sigma = -(max V + 1), which sits strictly
    below the whole spectrum (the stiffness is positive semidefinite), so
    the algebraically smallest eigenvalues are the ones nearest sigma.
    Deterministic all-ones start vector. Falls back to a dense solve when
    the subspace would not fit the matrix.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    n = system.n
    a = system.a
    w = system.mass
    sigma = -(system.v_max + 1.0)

    if count >= n - 1 or n <= 64:
        if count > n:
            raise ValueError(f"requested {count} pairs from an n={n} system")
        dense = a.toarray()
        vals, vecs = scipy.linalg.eigh(dense, np.diag(w))
        vals, vecs = vals[:count], vecs[:, :count]
    else:
        try:
            vals, vecs = eigsh(
                a,
                k=count,
                M=sp.diags(w),
                sigma=sigma,
                which="LM",
                v0=np.ones(n),
                maxiter=max(1000, 40 * count),
            )
        except ArpackNoConvergence as exc:
            best = _rel_residuals(a, w, exc.eigenvalues, exc.eigenvectors) if (
                exc.eigenvalues is not None and exc.eigenvalues.size
            ) else None
            raise ConvergenceError(
                f"eigensolver did not converge ({exc})", residuals=best
            ) from exc
        order = np.argsort(vals, kind="stable")
        vals, vecs = vals[order], vecs[:, order]

    res = _rel_residuals(a, w, vals, vecs)
    if np.any(res > tol):
        raise ConvergenceError(
            f"residuals above tolerance {tol:g}: max {res.max():.3e}", residuals=res
        )
    if vals[0] < -system.v_max - 1e-7 * max(1.0, system.v_max):
        raise SpectralError(
            f"lambda_0 = {vals[0]!r} violates the Rayleigh lower bound "
            f"-max V = {-system.v_max!r}; assembly is inconsistent"
        )

    # B-normalize for stable downstream inner products
    norms = np.sqrt(np.einsum("ij,i,ij->j", vecs, w, vecs))
    vecs = vecs / norms
    labels = [{"mode": system.mode, "parity": None} for _ in range(count)]
    return SpectralResult(
        eigenvalues=vals,
        energies=units.energy_factor * vals,
        labels=labels,
        residuals=res,
        mesh_size=n,
        units=units,
        backend="sor" if system.mode is not None else "fem",
        vectors=vecs,
        mass=w,
    )


# -- parity classification ----------------------------------------------------


def _group_indices(vals: np.ndarray, rel_tol: float = 1e-6):
    """Contiguous groups of near-equal eigenvalues (degenerate clusters)."""
    groups = []
    start = 0
    scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
    for i in range(1, vals.size + 1):
        if i == vals.size or abs(vals[i] - vals[i - 1]) > rel_tol * scale:
            groups.append(list(range(start, i)))
            start = i
    return groups


def parity_classify(
    result: SpectralResult,
    reflection: np.ndarray,
    rel_tol: float = 1e-6,
    commute_tol: float = 1e-6,
    truncated_tail: bool = False,
) -> SpectralResult:
    """Rotate each eigenspace into reflection eigenstates and label them.

    For every degenerate cluster U the matrix R = U^T B P U is computed;
    if the reflection commutes with the operator it is a B-orthogonal
    involution on the cluster, so R is symmetric with eigenvalues +-1. The
    cluster is rotated into R's eigenbasis and each column labeled by the
    sign. A cluster whose R is far from an involution means the reflection
    is not a symmetry; that is an error, not a label -- except for the
    final cluster of a truncated solve, whose partner vectors may simply
    not have been computed; with truncated_tail=True it is left unlabeled.
    """
    if result.vectors is None or result.mass is None:
        raise SpectralError("result carries no eigenvectors to classify")
    p = np.asarray(reflection, dtype=np.int64)
    n = result.mass.size
    if p.size != n or np.any(p[p] != np.arange(n)):
        raise ValueError("reflection must be an involution on the grid")

    vecs = result.vectors.copy()
    labels = [dict(lab) for lab in result.labels]
    w = result.mass

    # never mix clusters across different Fourier modes
    keys = [lab.get("mode") for lab in labels]
    for mode in sorted(set(keys), key=lambda x: (x is None, x)):
        idx = np.array([i for i, m in enumerate(keys) if m == mode])
        groups = _group_indices(result.eigenvalues[idx], rel_tol)
        for gi, grp in enumerate(groups):
            cols = idx[grp]
            u = vecs[:, cols]
            r = u.T @ (w[:, None] * u[p, :])
            r = 0.5 * (r + r.T)
            mu, q = np.linalg.eigh(r)
            if np.any(np.abs(np.abs(mu) - 1.0) > commute_tol):
                if truncated_tail and gi == len(groups) - 1:
                    continue
                raise SymmetryError(
                    "reflection does not commute with the operator "
                    f"(involution eigenvalues {mu})"
                )
            rotated = u @ q
            nrm = np.sqrt(np.einsum("ij,i,ij->j", rotated, w, rotated))
            vecs[:, cols] = rotated / nrm
            for j, c in enumerate(cols):
                labels[c]["parity"] = int(np.sign(mu[j]))

    return SpectralResult(
        eigenvalues=result.eigenvalues.copy(),
        energies=result.energies.copy(),
        labels=labels,
        residuals=result.residuals.copy(),
        mesh_size=result.mesh_size,
        units=result.units,
        backend=result.backend,
        vectors=vecs,
        mass=w,
    )


# -- drivers ------------------------------------------------------------------


def solve_sor(
    op: SorOperator,
    m_max: int | None = None,
    count: int = 12,
    tol: float = 1e-8,
    units: PhysicalUnits = PhysicalUnits(),
) -> SpectralResult:
    """Merged spectrum over Fourier modes 0..m_max.

    Modes m >= 1 enter twice (the cos/sin angular degeneracy). The
    completeness guard requires the cheapest omitted mode's lower bound
    m_max'^2 / max(r)^2 - max V to clear the reported range; with
    m_max=None the mode count grows automatically until it does.
    """
    auto = m_max is None
    m_try = 8 if auto else int(m_max)
    if m_try < 0:
        raise ValueError("m_max must be >= 0")

    while True:
        entries = []
        for m in range(m_try + 1):
            system = assemble_sor_mode(op, m)
            # two extra pairs so an exactly-degenerate cos/sin pair is never
            # cut at the count boundary (1d periodic multiplicity is <= 2);
            # the overhang is dropped again right after classification
            k_m = min(count + 2, op.n_cells)
            sub = lowest_eigenpairs(system, k_m, tol=tol, units=units)
            if op.reflection is not None:
                sub = parity_classify(
                    sub, op.reflection, truncated_tail=k_m < op.n_cells
                )
            for i in range(min(count, sub.count)):
                entries.append((float(sub.eigenvalues[i]), m, 0, sub, i))
                if m >= 1:
                    entries.append((float(sub.eigenvalues[i]), m, 1, sub, i))
        entries.sort(key=lambda e: (e[0], e[1], e[2]))
        kept = entries[:count]
        top = kept[-1][0]
        omitted_floor = (m_try + 1) ** 2 / op.r_max**2 - op.v_max
        if omitted_floor > top:
            break
        required = int(np.ceil(op.r_max * np.sqrt(max(top + op.v_max, 0.0)))) + 1
        if not auto:
            raise CompletenessError(
                f"m_max={m_try} cannot certify the lowest {count} eigenvalues; "
                f"need m_max >= {required}",
                required_m_max=required,
            )
        m_try = max(required, 2 * m_try)
        if m_try > 4096:
            raise CompletenessError(
                "completeness guard runaway (m_max > 4096)", required_m_max=m_try
            )

    n = op.n_cells
    vals = np.array([e[0] for e in kept])
    vecs = np.column_stack([e[3].vectors[:, e[4]] for e in kept])
    labels = []
    res = np.empty(len(kept))
    for j, (lam, m, copy, sub, i) in enumerate(kept):
        lab = dict(sub.labels[i])
        lab["mode"] = m
        labels.append(lab)
        res[j] = sub.residuals[i]
    return SpectralResult(
        eigenvalues=vals,
        energies=units.energy_factor * vals,
        labels=labels,
        residuals=res,
        mesh_size=n,
        units=units,
        backend="sor",
        vectors=vecs,
        mass=op.r_centers * np.diff(op.interfaces),
    )


def solve_fem(
    mesh: TriangleMesh,
    count: int = 12,
    field: CurvatureField | None = None,
    tol: float = 1e-8,
    units: PhysicalUnits = PhysicalUnits(),
) -> SpectralResult:
    """FEM spectrum of the mesh with its discrete geometric potential."""
    system = assemble_fem(mesh, field)
    return lowest_eigenpairs(system, count, tol=tol, units=units)


# -- oracle-grade radial constructors ----------------------------------------


def sor_sphere(radius: float = 1.0, n_cells: int = 512) -> SorOperator:
    """Pole-to-pole radial operator of the round sphere (V = 0)."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    iface = np.linspace(0.0, np.pi * radius, n_cells + 1)
    cent = 0.5 * (iface[:-1] + iface[1:])
    r_if = radius * np.sin(iface / radius)
    r_if[0] = 0.0
    r_if[-1] = 0.0
    r_c = radius * np.sin(cent / radius)
    return SorOperator(
        interfaces=iface,
        centers=cent,
        r_interfaces=r_if,
        r_centers=r_c,
        v_centers=np.zeros(n_cells),
        boundary="axis",
        reflection=np.arange(n_cells)[::-1].copy(),
    )


def sor_round_torus(big_radius: float = 2.0, small_radius: float = 1.0,
                    n_cells: int = 512) -> SorOperator:
    """Periodic radial operator of the round torus with its potential.

    Principal curvatures: 1/r along the tube and cos(a)/(R + r cos(a))
    around the axis, a the tube angle; V is their half-difference squared.
    """
    R, r = float(big_radius), float(small_radius)
    if not (R > r > 0):
        raise ValueError("need big_radius > small_radius > 0")
    L = 2.0 * np.pi * r
    iface = L * np.arange(n_cells + 1) / n_cells
    cent = 0.5 * (iface[:-1] + iface[1:])

    def rad(s):
        return R + r * np.cos(s / r)

    km = 1.0 / r
    kp = np.cos(cent / r) / rad(cent)
    v = 0.25 * (km - kp) ** 2
    return SorOperator(
        interfaces=iface,
        centers=cent,
        r_interfaces=rad(iface),
        r_centers=rad(cent),
        v_centers=v,
        boundary="periodic",
        reflection=np.arange(n_cells)[::-1].copy(),
    )


def sor_flat_cylinder(radius: float, length: float, n_cells: int = 256) -> SorOperator:
    """Periodic flat cylinder (constant radius, V = 0): exact Fourier case."""
    if radius <= 0 or length <= 0:
        raise ValueError("radius and length must be positive")
    iface = length * np.arange(n_cells + 1) / n_cells
    cent = 0.5 * (iface[:-1] + iface[1:])
    full = np.full(n_cells + 1, float(radius))
    return SorOperator(
        interfaces=iface,
        centers=cent,
        r_interfaces=full,
        r_centers=full[:-1].copy(),
        v_centers=np.zeros(n_cells),
        boundary="periodic",
        reflection=np.arange(n_cells)[::-1].copy(),
    )
