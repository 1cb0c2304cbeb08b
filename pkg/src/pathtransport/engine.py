"""Numerical core for linear transports along paths.

The propagator integrates the matrix lift equation

    dL(t, s)/dt = -G(t) L(t, s),       L(s, s) = Id,

with classical fixed-step RK4, where G(t) is the fibre coefficient matrix
along the path (the contraction of the 3-index field with the path velocity).
Backward transports (t < s) integrate backward rather than inverting the
forward matrix.  Piecewise-C1 paths are split at their breakpoints so a
velocity jump never falls inside an integration step; coefficient samples at
a breakpoint are nudged into the smooth side.

Matrix orientation: ``L(t, s)`` maps the fibre at parameter s to the fibre at
parameter t.  The coefficient matrix recovered from a transport is the
t-derivative of the *inverse-oriented* matrix at coincidence,
``G(s) = d/dt [L(t, s)^(-1)]|_(t=s)``, which reproduces the field that the
propagator consumed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bundles import BundleGeometry, FibreVector, coeffs3_batch, coeffs3_at
from .errors import (
    ChartDomainError,
    DegenerateProbeError,
    IntervalError,
    NonInvertibleError,
    NotApplicableError,
    NotFactorizableError,
    SingularCoefficientError,
)
from .paths import Path, constant_path, line_through, position_at, velocity_at

#: Default number of RK4 steps when no absolute step size is given.
DEFAULT_STEP_COUNT = 1000

#: Relative inward nudge for coefficient samples at breakpoints.
_BREAK_NUDGE = 1e-9


@dataclass(frozen=True)
class TransportMatrix:
    """The matrix L(t, s) of a linear transport along a fixed path."""

    value: np.ndarray
    path_id: str = ""
    s: float = 0.0
    t: float = 0.0
    step: float = 0.0  # integration step used; 0 marks a closed form

    def __post_init__(self):
        v = np.array(self.value, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "value", v)
        det = float(np.linalg.det(v))
        if abs(det) < 1e-12:
            warnings.warn(
                f"transport matrix over {self.path_id or 'path'} is numerically singular (det={det:.3e})",
                RuntimeWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class TransportCoefficients:
    """The fibre coefficient matrix G(s) of a linear transport along a path."""

    value: np.ndarray
    path_id: str = ""
    s: float = 0.0

    def __post_init__(self):
        v = np.array(self.value, dtype=float)
        if not np.all(np.isfinite(v)):
            raise SingularCoefficientError(f"non-finite transport coefficients at s={self.s}")
        v.setflags(write=False)
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class FactorizationVerdict:
    """Outcome of testing whether coefficients factor through the velocity."""

    point: np.ndarray
    candidate3: np.ndarray
    residual: float
    threshold: float
    factorizable: bool

    def __post_init__(self):
        object.__setattr__(self, "point", np.array(self.point, dtype=float))
        object.__setattr__(self, "candidate3", np.array(self.candidate3, dtype=float))
        object.__setattr__(self, "factorizable", bool(self.residual <= self.threshold))


@dataclass(frozen=True)
class LiftedPath:
    """A sampled horizontal lift: parameters, base points, fibre components."""

    ts: np.ndarray
    base: np.ndarray
    components: np.ndarray


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """Product mats[K-1] @ ... @ mats[0] by pairwise batched reduction."""
    while mats.shape[0] > 1:
        k = mats.shape[0]
        even = k - (k % 2)
        paired = np.matmul(mats[1:even:2], mats[0:even:2])
        if k % 2:
            mats = np.concatenate([paired, mats[-1:]], axis=0)
        else:
            mats = paired
    return mats[0]


def _rk4_transitions(field: Callable, a: float, b: float, n_steps: int, *, nudge=(False, False)) -> np.ndarray:
    """Per-step RK4 transition matrices for dL/dt = -G(t) L on [a, b]."""
    h = (b - a) / n_steps
    pts = a + 0.5 * h * np.arange(2 * n_steps + 1)
    pts[-1] = b
    delta = _BREAK_NUDGE * abs(b - a)
    if nudge[0]:
        pts[0] = a + math.copysign(delta, h)
    if nudge[1]:
        pts[-1] = b - math.copysign(delta, h)
    g = np.asarray(field(pts), dtype=float)
    if not np.all(np.isfinite(g)):
        raise SingularCoefficientError("non-finite coefficients encountered during integration")
    r = g.shape[-1]
    eye = np.eye(r)
    a1 = -g[0:-1:2]
    a2 = -g[1::2]
    a3 = -g[2::2]
    b1 = a1
    b2 = np.matmul(a2, eye + (h / 2) * b1)
    b3 = np.matmul(a2, eye + (h / 2) * b2)
    b4 = np.matmul(a3, eye + h * b3)
    return eye + (h / 6) * (b1 + 2 * b2 + 2 * b3 + b4)


def _as_batch_field(coeff_field: Callable) -> Callable:
    """Adapt a coefficient field to batched evaluation (m,) -> (m, r, r)."""

    def unwrap(v):
        return v.value if isinstance(v, TransportCoefficients) else np.asarray(v, dtype=float)

    def field(ts):
        ts = np.asarray(ts, dtype=float)
        try:
            out = np.asarray(coeff_field(ts), dtype=float)
            if out.ndim == 3 and out.shape[0] == ts.size:
                return out
        except (TypeError, ValueError, AttributeError):
            pass
        return np.stack([unwrap(coeff_field(float(t))) for t in ts])

    return field


def integrate_transport_matrix(coeff_field: Callable, s: float, t: float, step: float | None = None) -> TransportMatrix:
    """RK4 solution L(t, s) of the matrix lift equation for a coefficient field.

    ``coeff_field`` maps a parameter (or parameter array) to the coefficient
    matrix (or stack of matrices);  TransportCoefficients values are accepted
    too.  ``step=None`` uses |t - s| / 1000; an explicit ``step`` is an
    absolute bound on the step size.  For t < s the integration runs backward.
    """
    s, t = float(s), float(t)
    field = _as_batch_field(coeff_field)
    if s == t:
        probe = field(np.array([s]))
        r = probe.shape[-1]
        return TransportMatrix(np.eye(r), s=s, t=t, step=0.0)
    span = abs(t - s)
    if step is None:
        n_steps = DEFAULT_STEP_COUNT
        used = span / n_steps
    else:
        if step <= 0:
            raise IntervalError("integration step must be positive")
        n_steps = max(1, math.ceil(span / step))
        used = span / n_steps
    trans = _rk4_transitions(field, s, t, n_steps)
    return TransportMatrix(_ordered_product(trans), s=s, t=t, step=used)


def path_coefficient_field(geometry: BundleGeometry, path: Path, *, piece: tuple[float, float] | None = None) -> Callable:
    """Batched coefficient field G(s) = coeffs3(path(s)) . velocity(s) along a path."""

    def field(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        xs = position_at(path, ts)
        if geometry.chart_domain is not None:
            try:
                ok = bool(geometry.chart_domain(xs))
            except (TypeError, ValueError):
                ok = all(geometry.contains(x) for x in xs)
            if not ok:
                raise ChartDomainError(
                    f"path {path.label or ''} leaves the chart of {geometry.label or 'geometry'}"
                )
        vs = velocity_at(path, ts, piece=piece)
        g3 = coeffs3_batch(geometry, xs)
        # Contract over the base index by hand; n is small and einsum's
        # dispatch overhead dominates on long grids.
        out = g3[:, :, :, 0] * vs[:, 0, None, None]
        for mu in range(1, geometry.base_dim):
            out += g3[:, :, :, mu] * vs[:, mu, None, None]
        return out

    return field


def _segment_nodes(path: Path, s: float, t: float) -> list[float]:
    """Integration nodes from s to t, splitting at path breakpoints."""
    if t >= s:
        inner = [b for b in path.breakpoints if s < b < t]
    else:
        inner = [b for b in path.breakpoints if t < b < s]
        inner = sorted(inner, reverse=True)
    return [s] + list(inner) + [t]


def transport_matrix_over_path(
    geometry: BundleGeometry, path: Path, s: float, t: float, *, step: float | None = None
) -> TransportMatrix:
    """Transport matrix L(t, s) along a path for a connection geometry."""
    s, t = float(s), float(t)
    lo, hi = path.domain
    eps = 1e-12 * max(1.0, abs(lo), abs(hi))
    if not (lo - eps <= s <= hi + eps and lo - eps <= t <= hi + eps):
        raise IntervalError(f"parameters ({s}, {t}) outside path domain {path.domain}")
    r = geometry.fibre_dim
    if s == t:
        return TransportMatrix(np.eye(r), path_id=path.label, s=s, t=t, step=0.0)
    nodes = _segment_nodes(path, s, t)
    span = abs(t - s)
    if step is None:
        step_abs = span / DEFAULT_STEP_COUNT
    else:
        if step <= 0:
            raise IntervalError("integration step must be positive")
        step_abs = float(step)
    total = np.eye(r)
    bps = set(path.breakpoints)
    used = 0.0
    for a, b in zip(nodes[:-1], nodes[1:]):
        piece = (min(a, b), max(a, b))
        field = path_coefficient_field(geometry, path, piece=piece)
        n_steps = max(1, math.ceil(abs(b - a) / step_abs))
        used = max(used, abs(b - a) / n_steps)
        trans = _rk4_transitions(field, a, b, n_steps, nudge=(a in bps, b in bps))
        total = _ordered_product(trans) @ total
    return TransportMatrix(total, path_id=path.label, s=s, t=t, step=used)


def coefficients_along_path(geometry: BundleGeometry, path: Path, s: float) -> TransportCoefficients:
    """Coefficient matrix G(s) = coeffs3(path(s)) contracted with the velocity."""
    s = float(s)
    lo, hi = path.domain
    if not (lo <= s <= hi):
        raise IntervalError(f"parameter {s} outside path domain {path.domain}")
    x = position_at(path, s)
    g3 = coeffs3_at(geometry, x)
    v = velocity_at(path, s)
    return TransportCoefficients(np.einsum("abm,m->ab", g3, v), path_id=path.label, s=s)


def horizontal_lift(
    geometry: BundleGeometry,
    path: Path,
    s0: float,
    u: FibreVector,
    grid: Sequence[float],
    *,
    step: float | None = None,
    tol: float = 1e-9,
) -> LiftedPath:
    """Sampled horizontal lift of the path through a starting fibre vector.

    Returns parameters (sorted), base points and transported components
    ``L(t, s0) u`` over the grid.
    """
    s0 = float(s0)
    x0 = position_at(path, s0)
    if float(np.max(np.abs(np.asarray(u.base_point) - x0))) > tol:
        raise ChartDomainError("starting fibre vector is not attached to path(s0)")
    ts = np.sort(np.asarray(grid, dtype=float))
    lo, hi = path.domain
    if ts.size and (ts[0] < lo - 1e-12 or ts[-1] > hi + 1e-12):
        raise IntervalError("lift grid leaves the path domain")
    comps = np.empty((ts.size, geometry.fibre_dim))
    # March outward from s0 in both directions, reusing partial products.
    order = np.argsort(np.abs(ts - s0), kind="stable")
    right_mat = np.eye(geometry.fibre_dim)
    right_at = s0
    left_mat = np.eye(geometry.fibre_dim)
    left_at = s0
    for i in np.sort(order[ts[order] >= s0]):
        m = transport_matrix_over_path(geometry, path, right_at, float(ts[i]), step=step)
        right_mat = m.value @ right_mat
        right_at = float(ts[i])
        comps[i] = right_mat @ u.components
    for i in np.sort(order[ts[order] < s0])[::-1]:
        m = transport_matrix_over_path(geometry, path, left_at, float(ts[i]), step=step)
        left_mat = m.value @ left_mat
        left_at = float(ts[i])
        comps[i] = left_mat @ u.components
    return LiftedPath(ts=ts, base=position_at(path, ts), components=comps)


def coefficients_from_transport(
    transport_matrix_fn: Callable, s: float, *, h: float = 1e-4, path_id: str = ""
) -> TransportCoefficients:
    """Recover the coefficient matrix from a transport-matrix evaluator.

    ``transport_matrix_fn(a, b)`` must return the matrix (or TransportMatrix)
    carrying the fibre at a to the fibre at b.  The coefficients are the
    central difference of the inverse-oriented matrices,
    ``G(s) = [L(s+h, s)^(-1) - L(s-h, s)^(-1)] / (2h)``, accurate to O(h^2).
    """

    def value(a, b):
        out = transport_matrix_fn(a, b)
        return out.value if isinstance(out, TransportMatrix) else np.asarray(out, dtype=float)

    try:
        plus = np.linalg.inv(value(s, s + h))
        minus = np.linalg.inv(value(s, s - h))
    except np.linalg.LinAlgError as exc:
        raise NonInvertibleError(f"transport matrix near s={s} is not invertible") from exc
    return TransportCoefficients((plus - minus) / (2 * h), path_id=path_id, s=float(s))


def _coefficients_at_velocity(transport, x: np.ndarray, v: np.ndarray, *, half_width: float, fd_step: float, step: float | None) -> np.ndarray:
    """Coefficient matrix of a transport at x along the straight probe with velocity v."""
    if np.allclose(v, 0.0):
        probe = constant_path(x, domain=(-half_width, half_width))
    else:
        probe = line_through(x, v, half_width)
    coeff = coefficients_from_transport(
        lambda a, b: transport.matrix(probe, a, b, step=step), 0.0, h=fd_step, path_id=probe.label
    )
    return coeff.value


def factorization_test(
    transport,
    x,
    probe_velocities=None,
    random_velocities=None,
    *,
    threshold: float = 1e-4,
    half_width: float = 0.1,
    fd_step: float = 1e-4,
    step: float | None = None,
    seed: int = 0,
    n_random: int = 8,
) -> FactorizationVerdict:
    """Decide whether a linear transport's coefficients factor through velocity.

    A candidate 3-index field at x is extracted from straight probes along the
    ``probe_velocities`` (default: coordinate unit vectors, which must span the
    base).  The residual is the worst mismatch between the directly measured
    coefficient matrix and the candidate contraction over ``random_velocities``
    plus the zero velocity; the zero-velocity probe alone already exposes
    transports with path-independent coefficients.
    """
    if not getattr(transport, "is_linear", False):
        raise NotApplicableError("factorization test needs a linear transport with a matrix realization")
    x = np.asarray(x, dtype=float)
    n = transport.base_dim
    r = transport.fibre_dim
    if transport.geometry is not None and not transport.geometry.contains(x):
        raise ChartDomainError(f"probe point {x.tolist()} lies outside the chart")
    probes = np.eye(n) if probe_velocities is None else np.asarray(probe_velocities, dtype=float)
    if probes.ndim != 2 or probes.shape[1] != n or np.linalg.matrix_rank(probes) < n:
        raise DegenerateProbeError("probe velocities must span the base tangent space")
    measured = np.stack(
        [_coefficients_at_velocity(transport, x, v, half_width=half_width, fd_step=fd_step, step=step) for v in probes]
    )
    # Solve measured[j] = sum_mu candidate[.., mu] probes[j, mu] for the candidate.
    flat, *_ = np.linalg.lstsq(probes, measured.reshape(probes.shape[0], r * r), rcond=None)
    candidate = np.moveaxis(flat.reshape(n, r, r), 0, -1)
    if random_velocities is None:
        rng = np.random.default_rng(seed)
        random_velocities = rng.standard_normal((n_random, n))
    checks = list(np.asarray(random_velocities, dtype=float)) + [np.zeros(n)]
    residual = 0.0
    for v in checks:
        direct = _coefficients_at_velocity(transport, x, v, half_width=half_width, fd_step=fd_step, step=step)
        predicted = np.einsum("abm,m->ab", candidate, v)
        residual = max(residual, float(np.max(np.abs(direct - predicted))))
    return FactorizationVerdict(point=x, candidate3=candidate, residual=residual, threshold=threshold, factorizable=residual <= threshold)


def connection_from_transport(
    transport,
    sample_points,
    *,
    threshold: float = 1e-4,
    half_width: float = 0.1,
    fd_step: float = 1e-4,
    step: float | None = None,
    seed: int = 0,
) -> BundleGeometry:
    """Extract the generating connection of a factorizable linear transport.

    Every sample point must pass the factorization test at ``threshold``;
    otherwise NotFactorizableError carries the failing verdicts.  The returned
    geometry evaluates coefficients by running the probe extraction at the
    queried point, so it is exact wherever the transport factorizes (no
    interpolation error at or between the sample points).
    """
    pts = [np.asarray(p, dtype=float) for p in sample_points]
    verdicts = [
        factorization_test(
            transport, p, threshold=threshold, half_width=half_width, fd_step=fd_step, step=step, seed=seed
        )
        for p in pts
    ]
    failed = [v for v in verdicts if not v.factorizable]
    if failed:
        worst = max(v.residual for v in failed)
        raise NotFactorizableError(
            f"transport is not factorizable at {len(failed)} of {len(pts)} sample points (worst residual {worst:.3e})",
            verdicts=failed,
        )
    n, r = transport.base_dim, transport.fibre_dim
    probes = np.eye(n)

    def extract(x):
        measured = np.stack(
            [_coefficients_at_velocity(transport, x, v, half_width=half_width, fd_step=fd_step, step=step) for v in probes]
        )
        return np.moveaxis(measured.reshape(n, r, r), 0, -1)

    def coeffs(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return extract(x)
        return np.stack([extract(row) for row in x])

    chart = transport.geometry.chart_domain if transport.geometry is not None else None
    label = f"recovered:{getattr(transport, 'label', '') or 'transport'}"
    return BundleGeometry(base_dim=n, fibre_dim=r, coeffs3=coeffs, chart_domain=chart, label=label)
