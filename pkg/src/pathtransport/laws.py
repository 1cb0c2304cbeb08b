"""Law suites for transports along paths and parallel transports.

Each check samples a law's residual over seeded random fixtures and returns a
LawReport; ``passed`` always means ``max_residual <= tolerance``.  Checks over
independent samples are pure and may run concurrently, reducing by max.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .bundles import FibreVector
from .errors import IntervalError, NotApplicableError
from .paths import (
    Path,
    Reparametrization,
    affine_reparametrization,
    bulge_reparametrization,
    constant_path,
    identity_reparametrization,
    invert_canonical,
    line_through,
    point_path,
    position_at,
    product_canonical,
    reparametrize,
    restrict,
    velocity_at,
)
from .transports import KIND_GENERIC, ParallelTransport, TransportAlongPaths

DEFAULT_TOLERANCE = 1e-6
SMOOTHNESS_TOLERANCE = 1e-5


@dataclass(frozen=True)
class LawReport:
    """Result of checking one law over a sample set."""

    law_id: str
    samples: int
    max_residual: float
    tolerance: float
    seed: Optional[int] = None
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.max_residual <= self.tolerance))


def merge_reports(law_id: str, reports: Sequence[LawReport]) -> LawReport:
    """Combine per-fixture reports for the same law into one by max residual."""
    if not reports:
        raise ValueError("cannot merge an empty report list")
    return LawReport(
        law_id=law_id,
        samples=sum(r.samples for r in reports),
        max_residual=max(r.max_residual for r in reports),
        tolerance=min(r.tolerance for r in reports),
        seed=reports[0].seed,
    )


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def law_reports_csv(reports: Iterable[LawReport]) -> str:
    lines = ["law_id,samples,max_residual,tolerance,passed,seed"]
    for r in reports:
        seed = "" if r.seed is None else str(r.seed)
        lines.append(
            f"{r.law_id},{r.samples},{_fmt(r.max_residual)},{_fmt(r.tolerance)},{str(r.passed).lower()},{seed}"
        )
    return "\n".join(lines) + "\n"


def law_reports_table(reports: Iterable[LawReport]) -> str:
    rows = [("law", "samples", "max residual", "tolerance", "passed", "seed")]
    for r in reports:
        rows.append(
            (
                r.law_id,
                str(r.samples),
                _fmt(r.max_residual),
                _fmt(r.tolerance),
                "yes" if r.passed else "NO",
                "" if r.seed is None else str(r.seed),
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out = []
    for k, row in enumerate(rows):
        out.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def _maxdiff(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# ---------------------------------------------------------------------------
# Random fixtures


def random_paths(
    rng: np.random.Generator,
    count: int,
    *,
    dim: int,
    box: Sequence[tuple[float, float]],
    domain: tuple[float, float] = (0.0, 1.0),
) -> list[Path]:
    """Random C1 paths inside a chart box.

    Cubic Bezier curves through random control points drawn from the inner 80%
    of the box; the convex-hull property keeps the whole curve inside.
    """
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    pad = 0.1 * (hi - lo)
    a, b = float(domain[0]), float(domain[1])
    paths = []
    for k in range(count):
        ctrl = rng.uniform(lo + pad, hi - pad, size=(4, dim))
        paths.append(_bezier_path(ctrl, (a, b), label=f"bezier{k}"))
    return paths


def _bezier_path(ctrl: np.ndarray, domain: tuple[float, float], *, label: str = "bezier") -> Path:
    p0, p1, p2, p3 = (np.asarray(c, dtype=float) for c in ctrl)
    a, b = domain
    span = b - a

    def pos(s):
        s = np.asarray(s, dtype=float)
        x = (s - a) / span
        w = x[..., None]
        omw = 1.0 - w
        return omw**3 * p0 + 3 * w * omw**2 * p1 + 3 * w**2 * omw * p2 + w**3 * p3

    def vel(s):
        s = np.asarray(s, dtype=float)
        x = (s - a) / span
        w = x[..., None]
        omw = 1.0 - w
        return (3 * (omw**2 * (p1 - p0) + 2 * w * omw * (p2 - p1) + w**2 * (p3 - p2))) / span

    return Path(dim=p0.size, domain=(a, b), position=pos, velocity=vel, label=label)


def random_components(rng: np.random.Generator, count: int, fibre_dim: int) -> np.ndarray:
    return rng.standard_normal((count, fibre_dim))


# ---------------------------------------------------------------------------
# Transport-along-paths laws


def check_groupoid_laws(
    transport: TransportAlongPaths,
    path: Path,
    triples=None,
    u_samples=None,
    *,
    samples: int = 20,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    step: float | None = None,
) -> LawReport:
    """Composition, identity and two-sided inverse laws along one path."""
    rng = np.random.default_rng(seed)
    lo, hi = path.domain
    if triples is None:
        triples = rng.uniform(lo, hi, size=(samples, 3))
    triples = np.asarray(triples, dtype=float)
    if u_samples is None:
        u_samples = random_components(rng, len(triples), transport.fibre_dim)
    residual = 0.0
    for (r_, s_, t_), comps in zip(triples, np.asarray(u_samples, dtype=float)):
        u = FibreVector(position_at(path, r_), comps)
        v = transport.apply(path, r_, s_, u, step=step)
        w = transport.apply(path, s_, t_, v, step=step)
        direct = transport.apply(path, r_, t_, u, step=step)
        residual = max(residual, _maxdiff(w.components, direct.components))
        stay = transport.apply(path, s_, s_, v, step=step)
        residual = max(residual, _maxdiff(stay.components, v.components))
        back = transport.apply(path, t_, s_, w, step=step)
        residual = max(residual, _maxdiff(back.components, v.components))
    return LawReport("groupoid", len(triples), residual, tolerance, seed=seed)


def default_reparams(domain: tuple[float, float], *, include_reversing: bool = True) -> list[Reparametrization]:
    reps = [
        identity_reparametrization(domain),
        affine_reparametrization((0.0, 1.0), domain),
        bulge_reparametrization((-1.0, 2.0), domain, 0.4),
    ]
    if include_reversing:
        reps.append(affine_reparametrization((0.0, 1.0), domain, reversing=True))
    return reps


def check_parametrization_laws(
    transport: TransportAlongPaths,
    path: Path,
    subintervals=None,
    reparams=None,
    *,
    pairs_per_fixture: int = 2,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    step: float | None = None,
    include_reversing: bool = True,
) -> LawReport:
    """Restriction and reparametrization invariance along one path.

    The default reparametrizations include an orientation-reversing one, which
    is what the inverse-path axiom of the derived parallel transport rests on.
    """
    rng = np.random.default_rng(seed)
    lo, hi = path.domain
    if subintervals is None:
        width = hi - lo
        starts = rng.uniform(lo, lo + 0.5 * width, size=3)
        ends = rng.uniform(starts + 0.3 * width, np.minimum(starts + 0.8 * width, hi))
        subintervals = list(zip(starts, ends))
    if reparams is None:
        reparams = default_reparams(path.domain, include_reversing=include_reversing)
    residual = 0.0
    count = 0
    for sub in subintervals:
        piece = restrict(path, (float(sub[0]), float(sub[1])))
        for _ in range(pairs_per_fixture):
            s_, t_ = rng.uniform(piece.domain[0], piece.domain[1], size=2)
            u = FibreVector(position_at(path, s_), rng.standard_normal(transport.fibre_dim))
            via_piece = transport.apply(piece, s_, t_, u, step=step)
            via_whole = transport.apply(path, s_, t_, u, step=step)
            residual = max(residual, _maxdiff(via_piece.components, via_whole.components))
            count += 1
    for chi in reparams:
        composed = reparametrize(path, chi)
        for _ in range(pairs_per_fixture):
            s_, t_ = rng.uniform(chi.source[0], chi.source[1], size=2)
            u = FibreVector(position_at(composed, s_), rng.standard_normal(transport.fibre_dim))
            via_composed = transport.apply(composed, s_, t_, u, step=step)
            via_original = transport.apply(path, float(chi.map(s_)), float(chi.map(t_)), u, step=step)
            residual = max(residual, _maxdiff(via_composed.components, via_original.components))
            count += 1
    return LawReport("parametrization", count, residual, tolerance, seed=seed)


# ---------------------------------------------------------------------------
# Parallel-transport axioms


@dataclass(frozen=True)
class ParallelAxiomFixtures:
    """Canonical-path fixtures feeding the four parallel-transport axioms."""

    canonical_paths: tuple[Path, ...]
    composable_pairs: tuple[tuple[Path, Path], ...]
    reparams: tuple[Reparametrization, ...]
    point_paths: tuple[Path, ...]


def split_canonical(path: Path) -> tuple[Path, Path]:
    """Both halves of a canonical path, each reparametrized back onto [0, 1]."""
    if path.domain != (0.0, 1.0):
        raise IntervalError("split_canonical needs a canonical path")
    left = reparametrize(restrict(path, (0.0, 0.5)), affine_reparametrization((0.0, 1.0), (0.0, 0.5)))
    right = reparametrize(restrict(path, (0.5, 1.0)), affine_reparametrization((0.0, 1.0), (0.5, 1.0)))
    return left, right


def make_parallel_fixtures(paths: Sequence[Path]) -> ParallelAxiomFixtures:
    """Standard fixture set from canonical paths.

    Composable pairs are the two halves of each path (a smooth junction) plus
    each first half against its own inverse (a maximally kinked junction).
    """
    paths = tuple(paths)
    pairs = []
    points = []
    for p in paths:
        left, right = split_canonical(p)
        pairs.append((left, right))
        pairs.append((left, invert_canonical(left)))
        points.append(point_path(0.25, position_at(p, 0.0)))
    reparams = (
        identity_reparametrization((0.0, 1.0)),
        affine_reparametrization((-2.0, 3.0), (0.0, 1.0)),
        bulge_reparametrization((0.0, 1.0), (0.0, 1.0), 0.35),
    )
    return ParallelAxiomFixtures(
        canonical_paths=paths,
        composable_pairs=tuple(pairs),
        reparams=reparams,
        point_paths=tuple(points),
    )


def check_parallel_axioms(
    psi: ParallelTransport,
    fixtures: ParallelAxiomFixtures,
    *,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[LawReport]:
    """The four axioms: reparametrization invariance, inverse path, product
    path, and point-path identity.  Respects only orientation-preserving
    reparametrizations, per the invariance axiom."""
    rng = np.random.default_rng(seed)
    r = psi.fibre_dim

    def u_at(path: Path) -> FibreVector:
        return FibreVector(position_at(path, path.domain[0]), rng.standard_normal(r))

    rep_res, rep_n = 0.0, 0
    for path in fixtures.canonical_paths:
        for chi in fixtures.reparams:
            if chi.orientation != "preserving":
                continue
            u = u_at(path)
            composed = reparametrize(path, chi)
            rep_res = max(
                rep_res, _maxdiff(psi.apply(composed, u).components, psi.apply(path, u).components)
            )
            rep_n += 1

    inv_res, inv_n = 0.0, 0
    for path in fixtures.canonical_paths:
        u = u_at(path)
        out = psi.apply(path, u)
        back = psi.apply(invert_canonical(path), out)
        inv_res = max(inv_res, _maxdiff(back.components, u.components))
        inv_n += 1

    prod_res, prod_n = 0.0, 0
    for p1, p2 in fixtures.composable_pairs:
        u = u_at(p1)
        whole = psi.apply(product_canonical(p1, p2), u)
        stepwise = psi.apply(p2, psi.apply(p1, u))
        prod_res = max(prod_res, _maxdiff(whole.components, stepwise.components))
        prod_n += 1

    pt_res, pt_n = 0.0, 0
    for pp in fixtures.point_paths:
        u = u_at(pp)
        pt_res = max(pt_res, _maxdiff(psi.apply(pp, u).components, u.components))
        pt_n += 1

    return [
        LawReport("reparametrization-invariance", rep_n, rep_res, tolerance, seed=seed),
        LawReport("inverse-path", inv_n, inv_res, tolerance, seed=seed),
        LawReport("product-path", prod_n, prod_res, tolerance, seed=seed),
        LawReport("point-identity", pt_n, pt_res, tolerance, seed=seed),
    ]


# ---------------------------------------------------------------------------
# Smoothness conditions on lifted paths


def lift_tangent(
    transport: TransportAlongPaths, path: Path, s0: float, u: FibreVector, h: float
) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference tangent of the lifted path t -> transport(s0 -> t)(u).

    Returns (base_tangent, fibre_tangent); s0 must sit at least h inside the
    path domain.
    """
    lo, hi = path.domain
    if s0 - h < lo - 1e-15 or s0 + h > hi + 1e-15:
        raise IntervalError(f"cannot center a difference of width {h} at {s0} in {path.domain}")
    plus = transport.apply(path, s0, s0 + h, u)
    minus = transport.apply(path, s0, s0 - h, u)
    base_tan = (np.asarray(plus.base_point) - np.asarray(minus.base_point)) / (2 * h)
    fibre_tan = (np.asarray(plus.components) - np.asarray(minus.components)) / (2 * h)
    return base_tan, fibre_tan


def _probe_path(x0: np.ndarray, v: np.ndarray, half_width: float) -> Path:
    if float(np.max(np.abs(v))) < 1e-14:
        return constant_path(x0, domain=(-half_width, half_width))
    return line_through(x0, v, half_width)


def check_smoothness_conditions(
    transport: TransportAlongPaths,
    path: Path,
    s0: float,
    u: FibreVector | None = None,
    *,
    h: float = 1e-3,
    half_width: float = 0.1,
    tolerance: float = SMOOTHNESS_TOLERANCE,
    seed: int = 0,
) -> LawReport:
    """Differentiability conditions on lifted paths through one fibre vector.

    (a) the finite-difference lift tangent is converging (halving the step
    moves it by no more than the tolerance); (b) a second path with the same
    position and velocity at s0 (the straight probe) yields the same lift
    tangent; (c) lift tangents combine linearly over straight probes whose
    velocities are linear combinations, including the degenerate combination
    with zero total velocity (a point probe, whose lift tangent must vanish).
    These are sampled certificates at s0, not global statements.
    """
    if transport.kind == KIND_GENERIC:
        raise NotApplicableError("smoothness conditions need a differentiable (linear) realization")
    rng = np.random.default_rng(seed)
    if u is None:
        u = FibreVector(position_at(path, s0), rng.standard_normal(transport.fibre_dim))
    x0 = np.asarray(position_at(path, s0))

    _, d_h = lift_tangent(transport, path, s0, u, h)
    _, d_h2 = lift_tangent(transport, path, s0, u, h / 2)
    res_a = _maxdiff(d_h, d_h2)

    # The probe shares the path's position and velocity at s0 by construction,
    # so the base parts of the lift tangents agree up to differencing noise on
    # the path itself; the discriminating comparison is the fibre part.
    v1 = np.asarray(velocity_at(path, s0))
    probe1 = _probe_path(x0, v1, half_width)
    u0 = FibreVector(x0, u.components)
    _, fib_p = lift_tangent(transport, path, s0, u, h)
    _, fib_1 = lift_tangent(transport, probe1, 0.0, u0, h)
    res_b = _maxdiff(fib_p, fib_1)

    # Complementary direction for the linear-combination probes.
    v2 = np.zeros_like(v1)
    v2[int(np.argmin(np.abs(v1)))] = 1.0
    _, fib_2 = lift_tangent(transport, _probe_path(x0, v2, half_width), 0.0, u0, h)
    combos = [(1.0, 0.0), (0.0, 1.0), (0.7, 0.4), (1.0, 1.0), (2.0, -0.5)]
    res_c = 0.0
    for a1, a2 in combos:
        probe = _probe_path(x0, a1 * v1 + a2 * v2, half_width)
        _, fib_c = lift_tangent(transport, probe, 0.0, u0, h)
        res_c = max(res_c, _maxdiff(fib_c, a1 * fib_1 + a2 * fib_2))
    # Degenerate combination: equal and opposite velocities give a point probe,
    # whose lift tangent must vanish outright.
    _, fib_zero = lift_tangent(transport, _probe_path(x0, 0.0 * v1, half_width), 0.0, u0, h)
    res_c = max(res_c, float(np.max(np.abs(fib_zero))))

    residual = max(res_a, res_b, res_c)
    return LawReport("smoothness", len(combos) + 3, residual, tolerance, seed=seed)


# ---------------------------------------------------------------------------
# Linearity


def check_linearity(
    transport: TransportAlongPaths,
    path: Path,
    s: float,
    t: float,
    sample_pairs=None,
    *,
    samples: int = 10,
    seed: int = 0,
    tolerance: float = 1e-12,
    step: float | None = None,
) -> LawReport:
    """Additivity and homogeneity of the fibre map from s to t along a path."""
    rng = np.random.default_rng(seed)
    r = transport.fibre_dim
    x_s = position_at(path, s)
    if sample_pairs is None:
        sample_pairs = [
            (float(lam), float(mu), cu, cv)
            for (lam, mu), cu, cv in zip(
                rng.uniform(-2, 2, size=(samples, 2)),
                rng.standard_normal((samples, r)),
                rng.standard_normal((samples, r)),
            )
        ]
    residual = 0.0
    for lam, mu, cu, cv in sample_pairs:
        combined = transport.apply(path, s, t, FibreVector(x_s, lam * cu + mu * cv), step=step)
        tu = transport.apply(path, s, t, FibreVector(x_s, cu), step=step)
        tv = transport.apply(path, s, t, FibreVector(x_s, cv), step=step)
        residual = max(
            residual,
            _maxdiff(combined.components, lam * np.asarray(tu.components) + mu * np.asarray(tv.components)),
        )
    return LawReport("linearity", len(sample_pairs), residual, tolerance, seed=seed)
