"""Paths in a single base-space coordinate chart and their calculus.

A path is a parametrized curve ``s -> x(s)`` on a closed interval together
with an optional analytic velocity evaluator.  Evaluators accept a scalar
parameter or a 1-d array of parameters and are pure; all objects here are
immutable after construction and safe to share between threads.

Canonical inverses and products are defined only for paths on [0, 1]; all
other parameter conventions are reached through reparametrization.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ChartDomainError, EndpointMismatchError, IntervalError, SpecFormatError

# Smoothness tags, ordered from strongest to weakest.
C1 = "C1"
PIECEWISE_C1 = "piecewise-C1"
C0 = "C0"
_SMOOTHNESS_ORDER = {C1: 2, PIECEWISE_C1: 1, C0: 0}

#: Finite-difference step as a fraction of the parameter range.
DEFAULT_FD_FRACTION = 1e-5

#: Junction tolerance for canonical products, in chart coordinates.
JUNCTION_TOL = 1e-9

_POLE_MARGIN = 1e-3


@dataclass(frozen=True)
class Path:
    """A parametrized curve in an n-dimensional coordinate chart.

    ``position`` maps a parameter (scalar or 1-d array) to chart coordinates
    (shape ``(dim,)`` or ``(m, dim)``).  ``velocity`` is optional; when absent,
    tangents fall back to finite differences and the smoothness tag is at most
    piecewise-C1.  ``breakpoints`` lists interior parameters where the velocity
    may jump; integrators split there and never evaluate a one-sided quantity
    from the wrong side.
    """

    dim: int
    domain: tuple[float, float]
    position: Callable
    velocity: Optional[Callable] = None
    smoothness: str = C1
    breakpoints: tuple[float, ...] = ()
    label: str = ""

    def __post_init__(self):
        sigma, tau = self.domain
        if not (math.isfinite(sigma) and math.isfinite(tau)) or tau < sigma:
            raise IntervalError(f"bad path domain {self.domain!r}")
        if self.smoothness not in _SMOOTHNESS_ORDER:
            raise IntervalError(f"unknown smoothness tag {self.smoothness!r}")
        if self.velocity is None and self.smoothness == C1:
            object.__setattr__(self, "smoothness", PIECEWISE_C1)
        bps = tuple(sorted(b for b in self.breakpoints if sigma < b < tau))
        object.__setattr__(self, "breakpoints", bps)

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    @property
    def is_point(self) -> bool:
        return self.domain[1] == self.domain[0]

    def at(self, s):
        return position_at(self, s)


@dataclass(frozen=True)
class Reparametrization:
    """A C1 parameter change chi: source -> target with known derivative."""

    source: tuple[float, float]
    target: tuple[float, float]
    map: Callable
    derivative: Callable
    orientation: str = "preserving"  # or "reversing"

    def __post_init__(self):
        if self.orientation not in ("preserving", "reversing"):
            raise IntervalError(f"bad orientation {self.orientation!r}")

    def __call__(self, s):
        return self.map(s)


def _as_param_array(s):
    arr = np.asarray(s, dtype=float)
    if arr.ndim > 1:
        raise ValueError("parameter arrays must be at most 1-d")
    return arr


def position_at(path: Path, s):
    """Evaluate ``path.position``, tolerating scalar-only evaluators."""
    arr = _as_param_array(s)
    scalar = arr.ndim == 0
    try:
        out = np.asarray(path.position(arr if not scalar else float(arr)), dtype=float)
    except (TypeError, ValueError):
        out = None
    expected = (path.dim,) if scalar else (arr.size, path.dim)
    if out is None or out.shape != expected:
        if scalar:
            out = np.asarray(path.position(float(arr)), dtype=float).reshape(path.dim)
        else:
            out = np.stack([np.asarray(path.position(float(t)), dtype=float).reshape(path.dim) for t in arr])
    return out


def _piece_bounds(path: Path, s: float) -> tuple[float, float]:
    # Smooth piece containing s; a breakpoint itself belongs to the left piece.
    sigma, tau = path.domain
    lo, hi = sigma, tau
    for b in path.breakpoints:
        if b < s:
            lo = b
        elif b >= s:
            hi = b
            break
    if s in path.breakpoints:
        hi = s
    return lo, hi


def _fd_velocity(path: Path, ts: np.ndarray, h: float, piece: tuple[float, float]) -> np.ndarray:
    """Second-order finite-difference velocities, one-sided near piece ends."""
    lo, hi = piece
    ts = np.atleast_1d(ts)
    out = np.empty((ts.size, path.dim))
    can_center = (ts - h >= lo) & (ts + h <= hi)
    can_fwd = ~can_center & (ts + 2 * h <= hi)
    can_bwd = ~can_center & ~can_fwd & (ts - 2 * h >= lo)
    rest = ~(can_center | can_fwd | can_bwd)
    if np.any(can_center):
        t = ts[can_center]
        out[can_center] = (position_at(path, t + h) - position_at(path, t - h)) / (2 * h)
    if np.any(can_fwd):
        t = ts[can_fwd]
        out[can_fwd] = (
            -3 * position_at(path, t) + 4 * position_at(path, t + h) - position_at(path, t + 2 * h)
        ) / (2 * h)
    if np.any(can_bwd):
        t = ts[can_bwd]
        out[can_bwd] = (
            3 * position_at(path, t) - 4 * position_at(path, t - h) + position_at(path, t - 2 * h)
        ) / (2 * h)
    if np.any(rest):
        # Piece too short for a second-order stencil; first order or zero.
        t = ts[rest]
        width = hi - lo
        if width <= 0:
            out[rest] = 0.0
        else:
            a = np.clip(t - width / 2, lo, hi)
            b = np.clip(t + width / 2, lo, hi)
            out[rest] = (position_at(path, b) - position_at(path, a)) / (b - a)[:, None]
    return out


def velocity_at(path: Path, s, *, h: float | None = None, piece: tuple[float, float] | None = None):
    """Velocity of ``path`` at parameter(s) ``s``.

    Uses the analytic evaluator when present, otherwise central finite
    differences (one-sided within ``h`` of a piece boundary).  ``piece``
    restricts the stencil to one smooth piece; by default it is derived from
    the path's breakpoints point by point.
    """
    arr = _as_param_array(s)
    scalar = arr.ndim == 0
    if path.velocity is not None:
        try:
            out = np.asarray(path.velocity(arr if not scalar else float(arr)), dtype=float)
        except (TypeError, ValueError):
            out = None
        expected = (path.dim,) if scalar else (arr.size, path.dim)
        if out is None or out.shape != expected:
            if scalar:
                out = np.asarray(path.velocity(float(arr)), dtype=float).reshape(path.dim)
            else:
                out = np.stack([np.asarray(path.velocity(float(t)), dtype=float).reshape(path.dim) for t in arr])
        return out
    if path.is_point:
        return np.zeros(path.dim) if scalar else np.zeros((arr.size, path.dim))
    if h is None:
        h = DEFAULT_FD_FRACTION * path.length
    ts = np.atleast_1d(arr)
    if piece is not None:
        out = _fd_velocity(path, ts, h, piece)
    elif not path.breakpoints:
        out = _fd_velocity(path, ts, h, path.domain)
    else:
        out = np.empty((ts.size, path.dim))
        for i, t in enumerate(ts):
            out[i] = _fd_velocity(path, np.array([t]), h, _piece_bounds(path, float(t)))[0]
    return out[0] if scalar else out


def tangent(path: Path, s: float, *, h: float | None = None) -> np.ndarray:
    """Tangent vector of the path at s (zero for point paths)."""
    sigma, tau = path.domain
    if not (sigma <= s <= tau):
        raise IntervalError(f"parameter {s} outside domain {path.domain}")
    return velocity_at(path, float(s), h=h)


def restrict(path: Path, sub: tuple[float, float]) -> Path:
    """Restriction of the path to a closed subinterval of its domain."""
    a, b = float(sub[0]), float(sub[1])
    sigma, tau = path.domain
    eps = 1e-12 * max(1.0, abs(sigma), abs(tau))
    if a > b or a < sigma - eps or b > tau + eps:
        raise IntervalError(f"subinterval {sub!r} not contained in {path.domain}")
    a, b = max(a, sigma), min(b, tau)
    return replace(
        path,
        domain=(a, b),
        breakpoints=tuple(bp for bp in path.breakpoints if a < bp < b),
        label=f"{path.label}|[{a:g},{b:g}]" if path.label else "",
    )


def _monotone_preimage(chi: Reparametrization, value: float) -> float:
    lo, hi = chi.source
    increasing = chi.orientation == "preserving"
    f = chi.map
    a, b = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = float(f(mid))
        if (fm < value) == increasing:
            a = mid
        else:
            b = mid
        if b - a < 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (a + b)


def reparametrize(path: Path, chi: Reparametrization) -> Path:
    """The composed path ``path o chi`` with the chain-rule velocity."""
    if not np.allclose(chi.target, path.domain, rtol=0, atol=1e-9):
        raise IntervalError(f"reparametrization target {chi.target} is not the path domain {path.domain}")

    def pos(s):
        return position_at(path, chi.map(s))

    vel = None
    if path.velocity is not None:

        def vel(s):  # noqa: F811 - deliberate conditional definition
            arr = _as_param_array(s)
            d = np.asarray(chi.derivative(arr), dtype=float)
            v = velocity_at(path, chi.map(arr))
            if arr.ndim == 0:
                return float(d) * v
            return np.asarray(d).reshape(-1, 1) * v

    bps = tuple(sorted(_monotone_preimage(chi, b) for b in path.breakpoints))
    return Path(
        dim=path.dim,
        domain=(float(chi.source[0]), float(chi.source[1])),
        position=pos,
        velocity=vel,
        smoothness=path.smoothness,
        breakpoints=bps,
        label=f"{path.label}o{chi.orientation[:3]}" if path.label else "",
    )


def _require_canonical(path: Path, what: str):
    if abs(path.domain[0]) > 1e-12 or abs(path.domain[1] - 1.0) > 1e-12:
        raise IntervalError(f"{what} requires a canonical domain [0,1], got {path.domain}")


def invert_canonical(path: Path) -> Path:
    """The canonical inverse path t -> path(1 - t) on [0, 1]."""
    _require_canonical(path, "invert_canonical")

    def pos(s):
        return position_at(path, 1.0 - np.asarray(s, dtype=float))

    vel = None
    if path.velocity is not None:

        def vel(s):  # noqa: F811
            return -velocity_at(path, 1.0 - np.asarray(s, dtype=float))

    return Path(
        dim=path.dim,
        domain=(0.0, 1.0),
        position=pos,
        velocity=vel,
        smoothness=path.smoothness,
        breakpoints=tuple(sorted(1.0 - b for b in path.breakpoints)),
        label=f"{path.label}~" if path.label else "",
    )


def product_canonical(p1: Path, p2: Path, *, tol: float = JUNCTION_TOL) -> Path:
    """Canonical product: p1 traversed on [0, 1/2], then p2 on [1/2, 1].

    Requires both factors canonical and p1(1) = p2(0) within ``tol``.  The
    junction becomes a breakpoint; the velocity evaluator uses the left branch
    at exactly t = 1/2.
    """
    _require_canonical(p1, "product_canonical")
    _require_canonical(p2, "product_canonical")
    if p1.dim != p2.dim:
        raise EndpointMismatchError("factor paths live in different chart dimensions")
    end1 = position_at(p1, 1.0)
    start2 = position_at(p2, 0.0)
    gap = float(np.max(np.abs(end1 - start2)))
    if gap > tol:
        raise EndpointMismatchError(f"junction mismatch {gap:.3e} exceeds tolerance {tol:.3e}")

    def pos(s):
        arr = _as_param_array(s)
        if arr.ndim == 0:
            t = float(arr)
            return position_at(p1, 2 * t) if t <= 0.5 else position_at(p2, 2 * t - 1)
        out = np.empty((arr.size, p1.dim))
        left = arr <= 0.5
        if np.any(left):
            out[left] = position_at(p1, 2 * arr[left])
        if np.any(~left):
            out[~left] = position_at(p2, 2 * arr[~left] - 1)
        return out

    def vel(s):
        arr = _as_param_array(s)
        if arr.ndim == 0:
            t = float(arr)
            return 2 * velocity_at(p1, 2 * t) if t <= 0.5 else 2 * velocity_at(p2, 2 * t - 1)
        out = np.empty((arr.size, p1.dim))
        left = arr <= 0.5
        if np.any(left):
            out[left] = 2 * velocity_at(p1, 2 * arr[left])
        if np.any(~left):
            out[~left] = 2 * velocity_at(p2, 2 * arr[~left] - 1)
        return out

    v_left = 2 * velocity_at(p1, 1.0)
    v_right = 2 * velocity_at(p2, 0.0)
    joins_c1 = (
        p1.smoothness == C1
        and p2.smoothness == C1
        and float(np.max(np.abs(v_left - v_right))) <= tol
    )
    if p1.smoothness == C0 or p2.smoothness == C0:
        tag = C0
    else:
        tag = C1 if joins_c1 else PIECEWISE_C1
    bps = tuple(0.5 * b for b in p1.breakpoints) + (0.5,) + tuple(0.5 + 0.5 * b for b in p2.breakpoints)
    return Path(
        dim=p1.dim,
        domain=(0.0, 1.0),
        position=pos,
        velocity=vel,
        smoothness=tag,
        breakpoints=bps,
        label=f"({p1.label})*({p2.label})" if (p1.label or p2.label) else "",
    )


# ---------------------------------------------------------------------------
# Reparametrization factories


def identity_reparametrization(domain: tuple[float, float]) -> Reparametrization:
    d = (float(domain[0]), float(domain[1]))
    return Reparametrization(d, d, lambda s: np.asarray(s, dtype=float), lambda s: np.ones_like(np.asarray(s, dtype=float)))


def affine_reparametrization(
    source: tuple[float, float], target: tuple[float, float], *, reversing: bool = False
) -> Reparametrization:
    (a, b), (c, d) = source, target
    if b <= a:
        raise IntervalError("source interval is degenerate")
    slope = (c - d) / (b - a) if reversing else (d - c) / (b - a)
    off = d - slope * a if reversing else c - slope * a

    return Reparametrization(
        (float(a), float(b)),
        (float(c), float(d)),
        lambda s: off + slope * np.asarray(s, dtype=float),
        lambda s: np.full_like(np.asarray(s, dtype=float), slope),
        orientation="reversing" if reversing else "preserving",
    )


def bulge_reparametrization(
    source: tuple[float, float], target: tuple[float, float], amount: float = 0.5
) -> Reparametrization:
    """Orientation-preserving diffeomorphism with non-constant derivative.

    chi'(x) = 1 + amount*(1 - 2x) in normalized coordinates; |amount| < 1
    keeps it strictly positive.
    """
    if not -1 < amount < 1:
        raise IntervalError("bulge amount must be in (-1, 1)")
    (a, b), (c, d) = source, target

    def norm(s):
        return (np.asarray(s, dtype=float) - a) / (b - a)

    def chi(s):
        x = norm(s)
        return c + (d - c) * (x + amount * x * (1 - x))

    def dchi(s):
        x = norm(s)
        return (d - c) * (1 + amount * (1 - 2 * x)) / (b - a)

    return Reparametrization((float(a), float(b)), (float(c), float(d)), chi, dchi)


def validate_reparametrization(chi: Reparametrization, *, samples: int = 33, tol: float = 1e-9):
    """Check endpoint mapping and derivative sign on an interior sample grid."""
    a, b = chi.source
    c, d = chi.target
    fa, fb = float(chi.map(a)), float(chi.map(b))
    if chi.orientation == "preserving":
        ok = abs(fa - c) <= tol and abs(fb - d) <= tol
    else:
        ok = abs(fa - d) <= tol and abs(fb - c) <= tol
    if not ok:
        raise IntervalError("reparametrization endpoints do not map onto the target interval")
    ss = np.linspace(a, b, samples)[1:-1]
    der = np.asarray(chi.derivative(ss), dtype=float)
    if chi.orientation == "preserving" and np.any(der <= 0):
        raise IntervalError("derivative must stay positive for an orientation-preserving change")
    if chi.orientation == "reversing" and np.any(der >= 0):
        raise IntervalError("derivative must stay negative for an orientation-reversing change")


# ---------------------------------------------------------------------------
# Builtin path families


def point_path(r: float, point: Sequence[float]) -> Path:
    """The degenerate path with domain {r} sitting at a single chart point."""
    x = np.asarray(point, dtype=float)

    def pos(s):
        arr = _as_param_array(s)
        if arr.ndim == 0:
            return x.copy()
        return np.tile(x, (arr.size, 1))

    def vel(s):
        arr = _as_param_array(s)
        if arr.ndim == 0:
            return np.zeros(x.size)
        return np.zeros((arr.size, x.size))

    return Path(dim=x.size, domain=(float(r), float(r)), position=pos, velocity=vel, label="point")


def constant_path(point: Sequence[float], domain: tuple[float, float] = (0.0, 1.0)) -> Path:
    x = np.asarray(point, dtype=float)

    def pos(s):
        arr = _as_param_array(s)
        if arr.ndim == 0:
            return x.copy()
        return np.tile(x, (arr.size, 1))

    def vel(s):
        arr = _as_param_array(s)
        if arr.ndim == 0:
            return np.zeros(x.size)
        return np.zeros((arr.size, x.size))

    return Path(dim=x.size, domain=(float(domain[0]), float(domain[1])), position=pos, velocity=vel, label="constant")


def segment(start: Sequence[float], end: Sequence[float], domain: tuple[float, float] = (0.0, 1.0)) -> Path:
    """Straight chart segment traversed affinely over the domain."""
    a = np.asarray(start, dtype=float)
    b = np.asarray(end, dtype=float)
    if a.shape != b.shape:
        raise SpecFormatError("segment endpoints have different dimensions")
    sigma, tau = float(domain[0]), float(domain[1])
    if tau <= sigma:
        raise IntervalError("segment domain must be non-degenerate")
    rate = (b - a) / (tau - sigma)

    def pos(s):
        arr = _as_param_array(s)
        if arr.ndim == 0:
            return a + (float(arr) - sigma) * rate
        return a[None, :] + (arr - sigma)[:, None] * rate[None, :]

    def vel(s):
        arr = _as_param_array(s)
        if arr.ndim == 0:
            return rate.copy()
        return np.tile(rate, (arr.size, 1))

    return Path(dim=a.size, domain=(sigma, tau), position=pos, velocity=vel, label="segment")


def line_through(point: Sequence[float], direction: Sequence[float], half_width: float = 0.1) -> Path:
    """Straight probe through ``point`` with velocity ``direction`` on [-w, w]."""
    x0 = np.asarray(point, dtype=float)
    v = np.asarray(direction, dtype=float)
    w = float(half_width)
    if np.allclose(v, 0):
        return point_path(0.0, x0)
    return segment(x0 - w * v, x0 + w * v, domain=(-w, w))


def latitude(colatitude: float, turns: float = 1.0, phi0: float = 0.0, *, pole_margin: float = _POLE_MARGIN) -> Path:
    """Latitude circle on the sphere chart (theta, phi), unit angular speed.

    Runs phi from phi0 over ``turns`` full revolutions, domain [0, 2*pi*turns].
    The azimuth is reduced mod 2*pi so whole turns close up exactly in chart
    coordinates (the chart-level image jumps where the azimuth wraps; the
    velocity evaluator is analytic and unaffected).  Colatitudes within
    ``pole_margin`` of a pole are rejected.
    """
    th = float(colatitude)
    if not (pole_margin < th < math.pi - pole_margin):
        raise ChartDomainError(f"latitude colatitude {th:g} is too close to a coordinate pole")
    span = 2 * math.pi * float(turns)
    if span <= 0:
        raise IntervalError("turns must be positive")

    def pos(s):
        arr = _as_param_array(s)
        phi = np.mod(phi0 + arr, 2 * math.pi)
        if arr.ndim == 0:
            return np.array([th, float(phi)])
        return np.stack([np.full(arr.size, th), phi], axis=1)

    def vel(s):
        arr = _as_param_array(s)
        if arr.ndim == 0:
            return np.array([0.0, 1.0])
        return np.tile(np.array([0.0, 1.0]), (arr.size, 1))

    return Path(dim=2, domain=(0.0, span), position=pos, velocity=vel, label=f"latitude({th:g})")


def _sphere_embed(theta, phi):
    st, ct = np.sin(theta), np.cos(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), ct], axis=-1)


def great_circle(
    point: Sequence[float],
    direction: Sequence[float],
    length: float = math.pi,
    *,
    domain: tuple[float, float] | None = None,
    anchor: float | None = None,
    pole_margin: float = _POLE_MARGIN,
) -> Path:
    """Great-circle arc on the sphere chart with prescribed chart velocity.

    ``point`` = (theta0, phi0); ``direction`` = chart velocity (dtheta, dphi)
    at the ``anchor`` parameter (default: the domain start).  The arc is
    computed in the ambient embedding and pulled back to the chart, so the
    chart velocity at the anchor is exactly ``direction``.  Arcs that approach
    a pole are rejected.
    """
    th0, ph0 = float(point[0]), float(point[1])
    a, b = (0.0, float(length)) if domain is None else (float(domain[0]), float(domain[1]))
    if b <= a:
        raise IntervalError("great_circle domain must be non-degenerate")
    s_anchor = a if anchor is None else float(anchor)
    if not (a <= s_anchor <= b):
        raise IntervalError("great_circle anchor must lie in the domain")
    p3 = _sphere_embed(th0, ph0)
    # Pushforward of the chart velocity: d/dtheta, d/dphi of the embedding.
    st, ct = math.sin(th0), math.cos(th0)
    sp, cp = math.sin(ph0), math.cos(ph0)
    e_th = np.array([ct * cp, ct * sp, -st])
    e_ph = np.array([-st * sp, st * cp, 0.0])
    v3 = float(direction[0]) * e_th + float(direction[1]) * e_ph
    speed = float(np.linalg.norm(v3))
    if speed == 0.0:
        raise SpecFormatError("great_circle direction must be nonzero")
    q3 = v3 / speed

    def embed(s):
        arr = _as_param_array(s)
        ang = speed * (np.atleast_1d(arr) - s_anchor)
        pts = np.cos(ang)[:, None] * p3[None, :] + np.sin(ang)[:, None] * q3[None, :]
        return arr, pts

    # Unwrapped azimuth reference, so phi stays continuous across +-pi.
    ref_s = np.linspace(a, b, 4097)
    _, ref_pts = embed(ref_s)
    ref_phi = np.unwrap(np.arctan2(ref_pts[:, 1], ref_pts[:, 0]))
    ref_phi += ph0 - float(np.interp(s_anchor, ref_s, ref_phi))
    ref_theta = np.arccos(np.clip(ref_pts[:, 2], -1.0, 1.0))
    if np.any(ref_theta < pole_margin) or np.any(ref_theta > math.pi - pole_margin):
        raise ChartDomainError("great-circle arc passes too close to a coordinate pole")

    def pos(s):
        arr, pts = embed(s)
        theta = np.arccos(np.clip(pts[:, 2], -1.0, 1.0))
        raw = np.arctan2(pts[:, 1], pts[:, 0])
        guess = np.interp(np.atleast_1d(arr), ref_s, ref_phi)
        phi = raw + 2 * math.pi * np.round((guess - raw) / (2 * math.pi))
        out = np.stack([theta, phi], axis=1)
        return out[0] if arr.ndim == 0 else out

    def vel(s):
        arr, pts = embed(s)
        ang = speed * (np.atleast_1d(arr) - s_anchor)
        dpts = speed * (-np.sin(ang)[:, None] * p3[None, :] + np.cos(ang)[:, None] * q3[None, :])
        x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
        dx, dy, dz = dpts[:, 0], dpts[:, 1], dpts[:, 2]
        sin_theta = np.sqrt(np.maximum(x * x + y * y, 1e-300))
        dtheta = -dz / sin_theta
        dphi = (x * dy - y * dx) / (x * x + y * y)
        out = np.stack([dtheta, dphi], axis=1)
        return out[0] if arr.ndim == 0 else out

    return Path(dim=2, domain=(a, b), position=pos, velocity=vel, label="great_circle")


def spline_path(samples_s: Sequence[float], samples_x, *, label: str = "samples") -> Path:
    """Cubic-spline interpolant through sampled chart points."""
    from scipy.interpolate import CubicSpline

    ss = np.asarray(samples_s, dtype=float)
    xs = np.asarray(samples_x, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    if ss.ndim != 1 or ss.size < 2 or np.any(np.diff(ss) <= 0):
        raise SpecFormatError("sample parameters must be strictly increasing with at least two rows")
    if xs.shape[0] != ss.size:
        raise SpecFormatError("sample rows do not match the parameter column")
    spline = CubicSpline(ss, xs, axis=0)
    dspline = spline.derivative()
    dim = xs.shape[1]

    def pos(s):
        arr = _as_param_array(s)
        out = np.asarray(spline(arr), dtype=float)
        return out.reshape(dim) if arr.ndim == 0 else out.reshape(arr.size, dim)

    def vel(s):
        arr = _as_param_array(s)
        out = np.asarray(dspline(arr), dtype=float)
        return out.reshape(dim) if arr.ndim == 0 else out.reshape(arr.size, dim)

    return Path(dim=dim, domain=(float(ss[0]), float(ss[-1])), position=pos, velocity=vel, label=label)


def spline_path_from_csv(filename: str) -> Path:
    """Load a `samples` path from CSV rows (s, x1, ..., xn)."""
    rows = []
    with open(filename, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in rec])
            except ValueError as exc:
                raise SpecFormatError(f"bad sample row {rec!r} in {filename}") from exc
    if not rows:
        raise SpecFormatError(f"no sample rows found in {filename}")
    data = np.asarray(rows, dtype=float)
    return spline_path(data[:, 0], data[:, 1:], label=f"samples:{filename}")


# ---------------------------------------------------------------------------
# Textual path specifications

_NUMBER_RE = re.compile(r"^\s*([+-]?)\s*(\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?|\.\d+))?\s*$")


def parse_scalar(text: str) -> float:
    """Parse a number, allowing 'pi' forms like pi, -pi/2, 2pi, 0.5*pi/3."""
    m = _NUMBER_RE.match(text)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        num = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        return sign * num * math.pi / den
    try:
        return float(text)
    except ValueError as exc:
        raise SpecFormatError(f"cannot parse number {text!r}") from exc


def parse_vector(text: str) -> np.ndarray:
    return np.array([parse_scalar(part) for part in text.split(",")])


def parse_path_spec(spec: str) -> Path:
    """Build a builtin path from a spec string.

    Format: ``family`` or ``family:field=value;field=value`` where vector
    values are comma separated.  Families: segment {from,to}, latitude
    {colatitude,turns,phi0}, great_circle {point,direction,length}, constant
    {point}, samples {file}.  ``latitude:pi/3`` abbreviates the colatitude.
    """
    head, _, rest = spec.partition(":")
    family = head.strip().lower()
    fields: dict[str, str] = {}
    positional: list[str] = []
    if rest:
        for item in rest.split(";"):
            item = item.strip()
            if not item:
                continue
            if "=" in item:
                key, _, val = item.partition("=")
                fields[key.strip().lower()] = val.strip()
            else:
                positional.append(item)
    try:
        if family == "segment":
            return segment(parse_vector(fields["from"]), parse_vector(fields["to"]))
        if family == "constant":
            return constant_path(parse_vector(fields["point"]))
        if family == "latitude":
            colat = parse_scalar(fields.get("colatitude", positional[0] if positional else ""))
            return latitude(
                colat,
                turns=parse_scalar(fields["turns"]) if "turns" in fields else 1.0,
                phi0=parse_scalar(fields["phi0"]) if "phi0" in fields else 0.0,
            )
        if family == "great_circle":
            return great_circle(
                parse_vector(fields["point"]),
                parse_vector(fields["direction"]),
                length=parse_scalar(fields["length"]) if "length" in fields else math.pi,
            )
        if family == "samples":
            return spline_path_from_csv(fields["file"])
    except KeyError as exc:
        raise SpecFormatError(f"path spec {spec!r} is missing field {exc}") from exc
    except IndexError as exc:
        raise SpecFormatError(f"path spec {spec!r} is missing its positional value") from exc
    raise SpecFormatError(f"unknown path family {family!r}")
