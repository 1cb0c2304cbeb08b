"""Vector-bundle geometry described by a frame-level coefficient field.

A geometry is a base dimension n, a fibre dimension r and an evaluator
returning the 3-index connection coefficients ``G[a, b, mu]`` at a chart
point, together with a chart-domain predicate.  Everything is immutable and
the evaluators are pure.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ChartDomainError, SpecFormatError


@dataclass(frozen=True)
class BundleGeometry:
    """Bundle dimensions plus the 3-index coefficient field.

    ``coeffs3`` maps a chart point of shape (n,) to an array (r, r, n); it
    should also accept a batch (m, n) and return (m, r, r, n).  The first
    index is the fibre row, the second the fibre column, the third the base
    direction.
    """

    base_dim: int
    fibre_dim: int
    coeffs3: Callable
    chart_domain: Optional[Callable] = None
    label: str = ""
    #: Optional axis-aligned box known to lie inside the chart (plumbing for
    #: fixture sampling; not a substitute for chart_domain).
    chart_box: Optional[tuple[tuple[float, float], ...]] = None

    def contains(self, x) -> bool:
        if self.chart_domain is None:
            return True
        return bool(self.chart_domain(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class FibreVector:
    """Frame components of a fibre element attached to a chart point."""

    base_point: np.ndarray
    components: np.ndarray

    def __post_init__(self):
        bp = np.array(self.base_point, dtype=float)
        comps = np.array(self.components, dtype=float)
        bp.setflags(write=False)
        comps.setflags(write=False)
        object.__setattr__(self, "base_point", bp)
        object.__setattr__(self, "components", comps)


def require_in_chart(geometry: BundleGeometry, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (geometry.base_dim,):
        raise ChartDomainError(
            f"point of shape {x.shape} does not match base dimension {geometry.base_dim}"
        )
    if not geometry.contains(x):
        raise ChartDomainError(f"point {x.tolist()} lies outside the chart of {geometry.label or 'geometry'}")
    return x


def coeffs3_at(geometry: BundleGeometry, x) -> np.ndarray:
    """3-index coefficients at one chart point, shape (r, r, n)."""
    x = require_in_chart(geometry, x)
    out = np.asarray(geometry.coeffs3(x), dtype=float)
    r, n = geometry.fibre_dim, geometry.base_dim
    if out.shape != (r, r, n):
        raise ChartDomainError(f"coefficient field returned shape {out.shape}, expected {(r, r, n)}")
    return out


def coeffs3_batch(geometry: BundleGeometry, xs: np.ndarray) -> np.ndarray:
    """Batched coefficients: (m, n) points to an (m, r, r, n) array."""
    xs = np.asarray(xs, dtype=float)
    m = xs.shape[0]
    r, n = geometry.fibre_dim, geometry.base_dim
    try:
        out = np.asarray(geometry.coeffs3(xs), dtype=float)
    except (TypeError, ValueError, IndexError):
        out = None
    if out is None or out.shape != (m, r, r, n):
        out = np.stack([np.asarray(geometry.coeffs3(x), dtype=float) for x in xs])
    return out


def two_index_at(geometry: BundleGeometry, p: FibreVector) -> np.ndarray:
    """2-index coefficients at a fibre element: the contraction
    ``-G[a, b, mu] * u^b`` over b, returned with shape (r, n)."""
    g3 = coeffs3_at(geometry, p.base_point)
    u = np.asarray(p.components, dtype=float)
    if u.shape != (geometry.fibre_dim,):
        raise ChartDomainError(
            f"components of shape {u.shape} do not match fibre dimension {geometry.fibre_dim}"
        )
    return -np.einsum("abm,b->am", g3, u)


def connection_matrices_at(geometry: BundleGeometry, x) -> list[np.ndarray]:
    """The n fibre matrices ``G[:, :, mu]`` at a chart point."""
    g3 = coeffs3_at(geometry, x)
    return [np.array(g3[:, :, mu]) for mu in range(geometry.base_dim)]


def box_chart(bounds: Sequence[tuple[float, float]]) -> Callable:
    """Chart predicate for an axis-aligned box."""
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)

    def inside(x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= lo) and np.all(x <= hi))

    return inside


# ---------------------------------------------------------------------------
# Complex fibres via realification

def complex_structure(complex_dim: int) -> np.ndarray:
    """Real matrix representing multiplication by i on stacked (Re, Im) parts."""
    r = complex_dim
    j = np.zeros((2 * r, 2 * r))
    j[:r, r:] = -np.eye(r)
    j[r:, :r] = np.eye(r)
    return j


def realify_matrix(m: np.ndarray) -> np.ndarray:
    """Realify a complex r x r matrix to 2r x 2r acting on stacked parts."""
    m = np.asarray(m, dtype=complex)
    x, y = m.real, m.imag
    return np.block([[x, -y], [y, x]])


def realify_vector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.concatenate([v.real, v.imag])


# ---------------------------------------------------------------------------
# Grid-backed coefficient fields

def geometry_from_grid(
    axes: Sequence[np.ndarray],
    values: np.ndarray,
    *,
    fibre_dim: int,
    label: str = "grid",
) -> BundleGeometry:
    """Geometry whose coefficients are multilinearly interpolated on a grid.

    ``axes`` are the strictly increasing grid coordinates per base dimension;
    ``values`` has shape (*grid_shape, r, r, n).  The chart is the grid's
    bounding box.
    """
    from scipy.interpolate import RegularGridInterpolator

    n = len(axes)
    r = fibre_dim
    values = np.asarray(values, dtype=float)
    if values.shape != tuple(len(a) for a in axes) + (r, r, n):
        raise SpecFormatError(
            f"grid values of shape {values.shape} do not match axes/fibre dimensions"
        )
    interp = RegularGridInterpolator(tuple(axes), values, method="linear", bounds_error=True)
    lo = np.array([a[0] for a in axes])
    hi = np.array([a[-1] for a in axes])

    def coeffs(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return interp(x[None, :])[0]
        return interp(x)

    def inside(x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= lo) and np.all(x <= hi))

    return BundleGeometry(
        base_dim=n,
        fibre_dim=r,
        coeffs3=coeffs,
        chart_domain=inside,
        label=label,
        chart_box=tuple((float(a), float(b)) for a, b in zip(lo, hi)),
    )


def grid_geometry_from_csv(filename: str, *, base_dim: int, fibre_dim: int, label: str = "") -> BundleGeometry:
    """Load a grid coefficient field from CSV rows (x1..xn, a, b, mu, value).

    The fibre/base indices a, b, mu are 0-based.  Every grid-point/index
    combination must be present exactly once.
    """
    n, r = base_dim, fibre_dim
    rows = []
    with open(filename, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            if len(rec) != n + 4:
                raise SpecFormatError(f"grid row {rec!r} should have {n + 4} columns")
            rows.append([float(v) for v in rec])
    if not rows:
        raise SpecFormatError(f"no grid rows found in {filename}")
    data = np.asarray(rows, dtype=float)
    points = data[:, :n]
    abm = data[:, n : n + 3].astype(int)
    vals = data[:, n + 3]
    if np.any(abm < 0) or np.any(abm[:, 0] >= r) or np.any(abm[:, 1] >= r) or np.any(abm[:, 2] >= n):
        raise SpecFormatError("grid indices out of range (a, b are 0..r-1; mu is 0..n-1)")
    axes = [np.unique(points[:, k]) for k in range(n)]
    shape = tuple(len(a) for a in axes)
    expected = math.prod(shape) * r * r * n
    if len(rows) != expected:
        raise SpecFormatError(
            f"grid file has {len(rows)} rows but a full {shape} grid needs {expected}"
        )
    values = np.full(shape + (r, r, n), np.nan)
    idx = tuple(
        np.searchsorted(axes[k], points[:, k]) for k in range(n)
    ) + (abm[:, 0], abm[:, 1], abm[:, 2])
    values[idx] = vals
    if np.any(np.isnan(values)):
        raise SpecFormatError("grid file does not cover every grid point / index combination")
    return geometry_from_grid(axes, values, fibre_dim=r, label=label or f"grid:{filename}")
