"""Concrete geometries and transports shipped with the library.

The catalog carries, for every instance, the traits the instance is built to
have; the test suite verifies that measured verdicts agree with the declared
traits.  Two sphere instances are provided: ``sphere`` uses the classical
chart Christoffel symbols of the round metric, ``sphere-orthonormal``
expresses the same connection in the orthonormal frame
(e_1, e_2) = (d/dtheta, (1/sin theta) d/dphi), in which transport matrices
are genuine rotations and loop angles can be read off directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .bundles import BundleGeometry, FibreVector, complex_structure, grid_geometry_from_csv
from .engine import TransportMatrix
from .errors import IntervalError, SingularCoefficientError, SpecFormatError
from .paths import Path, position_at
from .transports import (
    KIND_GENERIC,
    KIND_LINEAR_CUSTOM,
    TransportAlongPaths,
    connection_transport,
)

SPHERE_POLE_MARGIN = 1e-3


@dataclass(frozen=True)
class Traits:
    """Flags a catalog instance is constructed to satisfy.

    ``factorizable``: coefficients factor through the path velocity, so the
    transport is generated by a connection.  ``parallel``: restriction and
    reparametrization invariance hold, so a parallel transport derives from it.
    """

    factorizable: bool
    linear: bool
    flat: bool
    parallel: bool


@dataclass(frozen=True)
class GeometryCatalogEntry:
    id: str
    transport: TransportAlongPaths
    traits: Traits
    geometry: Optional[BundleGeometry] = None
    chart_box: tuple[tuple[float, float], ...] = ()
    description: str = ""


def flat_bundle(base_dim: int = 2, fibre_dim: int = 2) -> GeometryCatalogEntry:
    """The zero-coefficient baseline; every transport is the identity on components."""
    n, r = int(base_dim), int(fibre_dim)
    if n < 1 or r < 1:
        raise SpecFormatError("flat bundle needs positive dimensions")

    def coeffs(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return np.zeros((r, r, n))
        return np.zeros((x.shape[0], r, r, n))

    geometry = BundleGeometry(base_dim=n, fibre_dim=r, coeffs3=coeffs, chart_domain=None, label="flat")
    return GeometryCatalogEntry(
        id="flat",
        geometry=geometry,
        transport=connection_transport(geometry, label="flat"),
        traits=Traits(factorizable=True, linear=True, flat=True, parallel=True),
        chart_box=tuple((-2.0, 2.0) for _ in range(n)),
        description=f"zero coefficients on R^{n}, fibre dim {r}",
    )


def _sphere_chart(margin: float):
    def inside(x):
        x = np.asarray(x, dtype=float)
        th = x[..., 0]
        return bool(np.all((th > margin) & (th < math.pi - margin)))

    return inside


def sphere_levi_civita() -> GeometryCatalogEntry:
    """Tangent bundle of the round 2-sphere in the (theta, phi) chart.

    Coefficients are the Christoffel symbols of the round metric:
    G^theta_{phi,phi} = -sin(theta) cos(theta),
    G^phi_{theta,phi} = G^phi_{phi,theta} = cot(theta), all others zero.
    The chart excludes a small collar around each pole.
    """

    def coeffs(x):
        x = np.asarray(x, dtype=float)
        pts = np.atleast_2d(x)
        th = pts[:, 0]
        g = np.zeros((pts.shape[0], 2, 2, 2))
        g[:, 0, 1, 1] = -np.sin(th) * np.cos(th)
        cot = np.cos(th) / np.sin(th)
        g[:, 1, 0, 1] = cot
        g[:, 1, 1, 0] = cot
        return g[0] if x.ndim == 1 else g

    geometry = BundleGeometry(
        base_dim=2,
        fibre_dim=2,
        coeffs3=coeffs,
        chart_domain=_sphere_chart(SPHERE_POLE_MARGIN),
        label="sphere",
    )
    return GeometryCatalogEntry(
        id="sphere",
        geometry=geometry,
        transport=connection_transport(geometry, label="sphere"),
        traits=Traits(factorizable=True, linear=True, flat=False, parallel=True),
        chart_box=((0.35, math.pi - 0.35), (-2.5, 2.5)),
        description="round-sphere chart Christoffel symbols (coordinate frame)",
    )


def sphere_orthonormal_frame() -> GeometryCatalogEntry:
    """Round-sphere connection in the orthonormal frame.

    With e_1 = d/dtheta, e_2 = (1/sin theta) d/dphi the coefficient matrices
    are antisymmetric, so transports and holonomies are plane rotations whose
    angles are comparable across base points.
    """

    def coeffs(x):
        x = np.asarray(x, dtype=float)
        pts = np.atleast_2d(x)
        th = pts[:, 0]
        g = np.zeros((pts.shape[0], 2, 2, 2))
        g[:, 0, 1, 1] = -np.cos(th)
        g[:, 1, 0, 1] = np.cos(th)
        return g[0] if x.ndim == 1 else g

    geometry = BundleGeometry(
        base_dim=2,
        fibre_dim=2,
        coeffs3=coeffs,
        chart_domain=_sphere_chart(SPHERE_POLE_MARGIN),
        label="sphere-orthonormal",
    )
    return GeometryCatalogEntry(
        id="sphere-orthonormal",
        geometry=geometry,
        transport=connection_transport(geometry, label="sphere-orthonormal"),
        traits=Traits(factorizable=True, linear=True, flat=False, parallel=True),
        chart_box=((0.35, math.pi - 0.35), (-2.5, 2.5)),
        description="round-sphere connection in the orthonormal frame",
    )


def evolution_transport(hamiltonian: np.ndarray | None = None, hbar: float = 1.0) -> GeometryCatalogEntry:
    """Linear transport with path-independent constant coefficients.

    ``hamiltonian`` is given in realified form (a complex r x r matrix becomes
    real 2r x 2r with i acting as the block matrix J); the coefficient matrix
    is then A = J H / hbar, the real form of H / (i hbar), and the transport
    matrix over any path is exp(-(t - s) A).  Because A does not depend on the
    path, the coefficients do not factor through the velocity, and
    reparametrizations that change parameter lengths are not respected: this
    is the stock example of a linear transport not generated by a connection.
    The base is the 1-d time axis.
    """
    h = np.eye(2) if hamiltonian is None else np.asarray(hamiltonian, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
        raise SpecFormatError("realified Hamiltonian must be square with even dimension")
    if hbar <= 0:
        raise SpecFormatError("hbar must be positive")
    r = h.shape[0]
    j = complex_structure(r // 2)
    generator = (j @ h) / float(hbar)
    flat_traits = bool(np.all(h == 0.0))

    def matrix_fn(path: Path, s: float, t: float, step_) -> TransportMatrix:
        lo, hi = path.domain
        eps = 1e-12 * max(1.0, abs(lo), abs(hi))
        if not (lo - eps <= s <= hi + eps and lo - eps <= t <= hi + eps):
            raise IntervalError(f"parameters ({s}, {t}) outside path domain {path.domain}")
        return TransportMatrix(expm(-(t - s) * generator), path_id=path.label, s=s, t=t, step=0.0)

    transport = TransportAlongPaths(
        kind=KIND_LINEAR_CUSTOM,
        base_dim=1,
        fibre_dim=r,
        matrix_fn=matrix_fn,
        label="evolution",
    )
    return GeometryCatalogEntry(
        id="evolution",
        geometry=None,
        transport=transport,
        traits=Traits(factorizable=flat_traits, linear=True, flat=flat_traits, parallel=flat_traits),
        chart_box=((-2.0, 2.0),),
        description="constant-generator evolution transport (realified complex fibre)",
    )


def nonlinear_fixture(base_dim: int = 2, fibre_dim: int = 2, alpha: float = 0.1) -> GeometryCatalogEntry:
    """Generic (nonlinear) transport used as the negative control for linearity.

    The fibre flows along du/dw = alpha * u * u (componentwise) where the
    flow weight is a fixed linear functional of the chart displacement,
    w = c . (x(t) - x(s)).  The flow has the closed form
    u -> u / (1 - alpha w u); weights add along compositions and depend only
    on endpoint positions, so all groupoid and parametrization laws hold
    exactly while the map is plainly nonlinear in u.
    """
    n, r = int(base_dim), int(fibre_dim)
    c = 1.0 / np.arange(1.0, n + 1.0)
    a = float(alpha)

    def apply_fn(path: Path, s: float, t: float, u: FibreVector) -> FibreVector:
        w = float(c @ (position_at(path, t) - position_at(path, s)))
        denom = 1.0 - a * w * np.asarray(u.components)
        if np.any(denom <= 0.05):
            raise SingularCoefficientError("nonlinear flow diverges for this weight/vector combination")
        return FibreVector(position_at(path, t), np.asarray(u.components) / denom)

    transport = TransportAlongPaths(
        kind=KIND_GENERIC,
        base_dim=n,
        fibre_dim=r,
        apply_fn=apply_fn,
        label="nonlinear",
    )
    return GeometryCatalogEntry(
        id="nonlinear",
        geometry=None,
        transport=transport,
        traits=Traits(factorizable=False, linear=False, flat=False, parallel=True),
        chart_box=tuple((-2.0, 2.0) for _ in range(n)),
        description=f"componentwise quadratic flow, alpha={a:g}",
    )


def standard_catalog() -> dict[str, GeometryCatalogEntry]:
    entries = [
        flat_bundle(),
        sphere_levi_civita(),
        sphere_orthonormal_frame(),
        evolution_transport(),
        nonlinear_fixture(),
    ]
    return {e.id: e for e in entries}


def get_entry(entry_id: str) -> GeometryCatalogEntry:
    cat = standard_catalog()
    if entry_id not in cat:
        raise SpecFormatError(f"unknown geometry id {entry_id!r}; known: {', '.join(cat)}")
    return cat[entry_id]


def entry_from_geometry(
    geometry: BundleGeometry, *, entry_id: str = "", flat: bool | None = None
) -> GeometryCatalogEntry:
    """Wrap a coefficient-field geometry as a connection-backed catalog entry."""
    if geometry.chart_box is not None:
        # Shrink towards the box center so probes and stencils stay inside.
        box = tuple(
            (a + 0.05 * (b - a), b - 0.05 * (b - a)) for a, b in geometry.chart_box
        )
    else:
        box = tuple((-1.0, 1.0) for _ in range(geometry.base_dim))
    if flat is None:
        center = np.array([0.5 * (a + b) for a, b in box])
        flat = bool(np.all(np.abs(geometry.coeffs3(center)) == 0.0)) if geometry.contains(center) else False
    return GeometryCatalogEntry(
        id=entry_id or geometry.label or "custom",
        geometry=geometry,
        transport=connection_transport(geometry, label=entry_id or geometry.label),
        traits=Traits(factorizable=True, linear=True, flat=bool(flat), parallel=True),
        chart_box=box,
        description=f"user geometry {geometry.label}",
    )


def load_geometry_spec(text: str, *, entry_id: str = "") -> GeometryCatalogEntry:
    """Resolve a key-value geometry spec to a catalog entry.

    Keys: label, base_dim, fibre_dim, kind (builtin|grid), builtin_id,
    grid_file.  Builtin specs resolve into the standard catalog; grid specs
    load a multilinearly interpolated coefficient field from CSV.
    """
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecFormatError(f"geometry spec line {raw!r} is not key = value")
        key, _, val = line.partition("=")
        fields[key.strip().lower()] = val.strip()
    kind = fields.get("kind", "builtin")
    if kind == "builtin":
        if "builtin_id" not in fields:
            raise SpecFormatError("builtin geometry spec needs builtin_id")
        return get_entry(fields["builtin_id"])
    if kind == "grid":
        for need in ("base_dim", "fibre_dim", "grid_file"):
            if need not in fields:
                raise SpecFormatError(f"grid geometry spec needs {need}")
        geometry = grid_geometry_from_csv(
            fields["grid_file"],
            base_dim=int(fields["base_dim"]),
            fibre_dim=int(fields["fibre_dim"]),
            label=fields.get("label", ""),
        )
        return entry_from_geometry(geometry, entry_id=entry_id or fields.get("label", "grid"))
    raise SpecFormatError(f"unknown geometry kind {kind!r}")


def sample_paths(entry: GeometryCatalogEntry, rng: np.random.Generator, count: int, *, domain=(0.0, 1.0)):
    """Random chart paths suitable for law checks against this entry."""
    from .laws import random_paths

    return random_paths(rng, count, dim=entry.transport.base_dim, box=entry.chart_box, domain=domain)
