"""Piecewise causal curves: representation, validation, lengths, builders.

Every nontrivial causal segment of a product model projects monotonically
to the time coordinate, so segments are stored as time graphs t -> (t,
sigma(t)).  A segment carries either an analytic fiber path (with exact
velocity, used by the null builders) or a sampled polyline (validation
inputs, JSON round trips).

The null length of a piecewise causal curve sums |tau| increments over its
break points only, so it is independent of the interior parameterization.
"""

import enum
import math

import numpy as np

from .errors import ConnectivityError, CurveError, DomainError
from .fibers import SphereFiber
from .models import CausalRelation, SpacetimePoint, TangentVector, core_product

# causality slack per knot: g(w, w) <= CAUSAL_TOL_FACTOR * |w|_H^2, where H
# is the Riemannian product metric dt^2 + f^2 h.  Numerically built null
# segments sit exactly on the cone and need this room.
CAUSAL_TOL_FACTOR = 1e-9

CHAIN_TOL = 1e-9
DEFAULT_KNOTS = 65


class Direction(enum.Enum):
    FUTURE = "future"
    PAST = "past"

    @property
    def flipped(self):
        return Direction.PAST if self is Direction.FUTURE else Direction.FUTURE


class MetricKind(enum.Enum):
    LORENTZ_G = "lorentz_g"
    RIEMANN_H = "riemann_h"
    RIEMANN_GBAR = "riemann_gbar"


class CausalSegment:
    """One smooth causal piece, stored as a graph over the time coordinate.

    ``t_lo <= t_hi`` always; the curve traverses from t_lo to t_hi when the
    direction is FUTURE and from t_hi down to t_lo when PAST.
    """

    def __init__(self, direction, t_lo, t_hi, path=None, velocity=None,
                 n_knots=DEFAULT_KNOTS, knots=None):
        if t_hi < t_lo:
            raise CurveError("segment needs t_lo <= t_hi")
        self.direction = direction
        self.t_lo = float(t_lo)
        self.t_hi = float(t_hi)
        self._path = path
        self._velocity = velocity
        self._n_knots = max(2, int(n_knots))
        self._knots = tuple(knots) if knots is not None else None
        if path is None and knots is None:
            raise CurveError("segment needs a path callable or explicit knots")

    @classmethod
    def from_knots(cls, direction, knots):
        """Polyline segment from ordered sample points (curve order)."""
        knots = tuple(knots)
        if len(knots) < 2:
            raise CurveError("polyline segment needs at least two knots")
        ts = [k.t for k in knots]
        inc = all(b > a for a, b in zip(ts, ts[1:]))
        dec = all(b < a for a, b in zip(ts, ts[1:]))
        if direction is Direction.FUTURE and not inc:
            raise CurveError("future segment requires strictly increasing time at knots")
        if direction is Direction.PAST and not dec:
            raise CurveError("past segment requires strictly decreasing time at knots")
        t_lo, t_hi = (ts[0], ts[-1]) if inc else (ts[-1], ts[0])
        return cls(direction, t_lo, t_hi, knots=knots)

    @property
    def trivial(self):
        return self.t_hi == self.t_lo

    @property
    def span(self):
        return self.t_hi - self.t_lo

    def path(self, t):
        """Fiber position at coordinate time t."""
        if self._path is not None:
            return self._path(t)
        ordered = self._knots if self.direction is Direction.FUTURE else self._knots[::-1]
        ts = np.array([k.t for k in ordered])
        xs = np.array([k.x for k in ordered])
        out = np.array([np.interp(t, ts, xs[:, i]) for i in range(xs.shape[1])])
        return out

    def velocity(self, t):
        """d sigma / dt at time t, or None when only knots are known."""
        if self._velocity is not None:
            return self._velocity(t)
        return None

    @property
    def knots(self):
        if self._knots is None:
            if self.trivial:
                pt = SpacetimePoint(self.t_lo, self._path(self.t_lo))
                self._knots = (pt, pt)
            else:
                ts = np.linspace(self.t_lo, self.t_hi, self._n_knots)
                if self.direction is Direction.PAST:
                    ts = ts[::-1]
                self._knots = tuple(SpacetimePoint(t, self._path(t)) for t in ts)
        return self._knots

    @property
    def start(self):
        return self.knots[0]

    @property
    def end(self):
        return self.knots[-1]

    def reversed(self):
        return CausalSegment(
            self.direction.flipped, self.t_lo, self.t_hi,
            path=self._path, velocity=self._velocity, n_knots=self._n_knots,
            knots=None if self._knots is None else self._knots[::-1],
        )

    def to_json(self):
        return {
            "dir": self.direction.value,
            "knots": [k.to_json() for k in self.knots],
        }


class PiecewiseCausalCurve:
    """Concatenation of future/past causal segments."""

    def __init__(self, model, segments, anchor=None):
        self.model = model
        self.segments = tuple(segments)
        if not self.segments and anchor is None:
            raise CurveError("a trivial curve needs an anchor point")
        self._anchor = anchor
        self._report = None
        scale = 1.0 + max((abs(s.t_hi) + abs(s.t_lo) for s in self.segments), default=0.0)
        for a, b in zip(self.segments, self.segments[1:]):
            gap = np.linalg.norm(a.end.coords - b.start.coords)
            if gap > CHAIN_TOL * scale:
                raise CurveError(f"segments do not chain: gap {gap}")

    @classmethod
    def trivial(cls, model, p):
        return cls(model, (), anchor=p)

    @property
    def is_trivial(self):
        return not self.segments

    @property
    def start(self):
        return self._anchor if self.is_trivial else self.segments[0].start

    @property
    def end(self):
        return self._anchor if self.is_trivial else self.segments[-1].end

    @property
    def breaks(self):
        if self.is_trivial:
            return (self._anchor,)
        pts = [self.segments[0].start]
        pts.extend(seg.end for seg in self.segments)
        return tuple(pts)

    def report(self):
        if self._report is None:
            self._report = validate(self.model, self)
        return self._report

    def to_json(self):
        return {
            "breaks": [b.to_json() for b in self.breaks],
            "segments": [s.to_json() for s in self.segments],
        }


class CurveReport:
    """Outcome of a causality validation pass."""

    def __init__(self):
        self.worst_ratio = -math.inf
        self.issues = []

    @property
    def valid(self):
        return not self.issues

    def flag(self, kind, segment_index, detail):
        self.issues.append({"kind": kind, "segment": segment_index, "detail": detail})

    def to_json(self):
        return {"valid": self.valid, "worst_ratio": self.worst_ratio, "issues": self.issues}


def _aux_norm2(model, base, dt, dx):
    """|w|^2 in the Riemannian product metric H = dt^2 + f^2 h."""
    core = core_product(model)
    f = core.warp.value(base.t)
    return dt * dt + (f * f) * core.fiber.inner(base.x, dx, dx)


def _future_tangent_samples(model, seg):
    """(base, dx) pairs of the future-directed tangent (dt normalized to 1)."""
    core = core_product(model)
    samples = []
    if seg._velocity is not None or seg._path is not None:
        knots = seg.knots
        for k in knots:
            v = seg.velocity(k.t)
            if v is None:
                break
            samples.append((k, np.asarray(v, float)))
        else:
            return samples
    # secant fallback on knots, metric evaluated at the midpoint; the slope
    # dx/dt is direction-independent, so (1, dx/dt) is the future tangent
    knots = seg.knots
    samples = []
    for a, b in zip(knots, knots[1:]):
        dt = b.t - a.t
        if dt == 0.0:
            continue
        mid_x = 0.5 * (a.x + b.x)
        if isinstance(core.fiber, SphereFiber):
            mid_x = core.fiber.project(mid_x)
        mid = SpacetimePoint(0.5 * (a.t + b.t), mid_x)
        samples.append((mid, (b.x - a.x) / dt))
    return samples


def validate(model, curve):
    """Per-knot causality check; records the worst g(w,w) / |w|_H^2 ratio."""
    report = CurveReport()
    if curve.is_trivial:
        report.worst_ratio = 0.0
        if not model.contains(curve.start):
            report.flag("domain", -1, "trivial anchor outside the model domain")
        return report
    for i, seg in enumerate(curve.segments):
        if seg.trivial:
            continue
        for k in seg.knots:
            if not model.contains(k):
                report.flag("domain", i, f"knot at t={k.t} outside the model domain")
                break
        for base, dx in _future_tangent_samples(model, seg):
            try:
                w = TangentVector(base, 1.0, dx)
                g = model.metric(w, w)
            except DomainError as exc:
                report.flag("domain", i, str(exc))
                break
            h2 = _aux_norm2(model, base, 1.0, dx)
            ratio = g / h2 if h2 > 0 else 0.0
            report.worst_ratio = max(report.worst_ratio, ratio)
            if g > CAUSAL_TOL_FACTOR * h2:
                report.flag(
                    "spacelike", i,
                    f"tangent at t={base.t} has g(w,w)={g} > tol*|w|_H^2={CAUSAL_TOL_FACTOR * h2}",
                )
                break
    return report


def null_length(curve, tf):
    """Sum of |tau| increments over the break points of a valid curve."""
    rep = curve.report()
    if not rep.valid:
        raise CurveError(f"curve failed validation: {rep.issues[:3]}")
    breaks = curve.breaks
    vals = [tf.value(b) for b in breaks]
    return float(sum(abs(b - a) for a, b in zip(vals, vals[1:])))


def _segment_length(model, seg, integrand, n0=65, tol=1e-9, max_doubling=8):
    if seg.trivial:
        return 0.0
    a, b = seg.t_lo, seg.t_hi

    def composite(n):
        ts = np.linspace(a, b, n)
        vals = np.array([integrand(t) for t in ts])
        return float(np.trapezoid(vals, ts))

    n = n0
    prev = composite(n)
    for _ in range(max_doubling):
        n = 2 * n - 1
        cur = composite(n)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-12):
            return cur
        prev = cur
    return prev


def curve_length(curve, metric_kind, tf=None):
    """Arc length of the curve in the requested metric.

    LORENTZ_G integrates sqrt(|g(w, w)|) (zero on null segments); RIEMANN_H
    uses the Riemannian product dt^2 + f^2 h; RIEMANN_GBAR uses
    g + 2 g(., grad tau)^2, which requires a unit timelike gradient.
    """
    model = curve.model
    rep = curve.report()
    if not rep.valid:
        raise CurveError(f"curve failed validation: {rep.issues[:3]}")
    core = core_product(model)

    total = 0.0
    for seg in curve.segments:
        if seg.trivial:
            continue

        def tangent_at(t, seg=seg):
            v = seg.velocity(t)
            if v is None:
                # secant slope between bracketing knots
                knots = seg.knots if seg.direction is Direction.FUTURE else seg.knots[::-1]
                ts = np.array([k.t for k in knots])
                j = min(max(int(np.searchsorted(ts, t) - 1), 0), len(knots) - 2)
                dt = knots[j + 1].t - knots[j].t
                v = (knots[j + 1].x - knots[j].x) / dt
            x = seg.path(t)
            if isinstance(core.fiber, SphereFiber):
                x = core.fiber.project(x)
            return SpacetimePoint(t, x), np.asarray(v, float)

        if metric_kind is MetricKind.LORENTZ_G:
            def integrand(t):
                base, v = tangent_at(t)
                w = TangentVector(base, 1.0, v)
                return math.sqrt(abs(model.metric(w, w)))
        elif metric_kind is MetricKind.RIEMANN_H:
            def integrand(t):
                base, v = tangent_at(t)
                return math.sqrt(_aux_norm2(model, base, 1.0, v))
        elif metric_kind is MetricKind.RIEMANN_GBAR:
            if tf is None:
                raise ValueError("RIEMANN_GBAR needs the time function")

            def integrand(t):
                base, v = tangent_at(t)
                grad = tf.analytic_gradient(model, base)
                gg = model.metric(grad, grad)
                if abs(gg + 1.0) > 1e-6:
                    raise DomainError(f"grad tau not unit timelike: g(grad,grad)={gg}")
                w = TangentVector(base, 1.0, v)
                val = model.metric(w, w) + 2.0 * model.metric(w, grad) ** 2
                return math.sqrt(max(0.0, val))
        else:
            raise ValueError(f"unknown metric kind {metric_kind!r}")

        total += _segment_length(model, seg, integrand)
    return total


# ---------------------------------------------------------------------------
# builders


def _arc_table(core, t_lo, t_hi, nodes=513):
    """Cumulative ∫ dt/f on a dense grid (fast, display-grade)."""
    ts = np.linspace(t_lo, t_hi, nodes)
    if t_hi == t_lo:
        return ts, np.zeros_like(ts)
    inv = np.array([1.0 / core.warp.value(t) for t in ts])
    cum = np.concatenate(([0.0], np.cumsum((inv[1:] + inv[:-1]) * 0.5 * np.diff(ts))))
    return ts, cum


def _connector_segment(model, a, b, n_knots=DEFAULT_KNOTS):
    """Future causal segment from a to b (a <= b required).

    Runs along the minimal fiber geodesic at the null rate until the fiber
    arc d_h(a_S, b_S) is exhausted, then vertically up to b.  The segment is
    exactly null in its first phase and timelike in the second.
    """
    core = core_product(model)
    arc = core.fiber.distance(a.x, b.x)
    if b.t - a.t < 0:
        raise ConnectivityError("connector requires t_a <= t_b")
    geo = core.fiber.geodesic(a.x, b.x)

    if arc == 0.0:
        t_d = a.t

        def s_of(t):
            return 0.0
    else:
        avail = core.warp.integral_inv(a.t, b.t)
        if arc > avail + max(1e-9, 1e-9 * arc):
            raise ConnectivityError(
                f"fiber separation {arc} exceeds the causal reach {avail}"
            )
        try:
            t_d = core.warp.time_from_arc(a.t, arc, core.interval.as_tuple())
        except ConnectivityError:
            t_d = b.t
        # root residue may land a hair above t_b; absorb it in the clamp
        t_d = min(t_d, b.t)
        ts_grid, arc_grid = _arc_table(core, a.t, t_d)

        def s_of(t):
            if t >= t_d:
                return arc
            return float(np.interp(t, ts_grid, arc_grid))

    def path(t):
        return geo.point(min(arc, s_of(t)))

    def velocity(t):
        if t >= t_d or arc == 0.0:
            return np.zeros_like(a.x)
        return geo.direction(s_of(t)) / core.warp.value(t)

    seg = CausalSegment(Direction.FUTURE, a.t, b.t, path=path, velocity=velocity,
                        n_knots=n_knots)
    # pin the endpoints exactly
    knots = list(seg.knots)
    knots[0] = a
    knots[-1] = b
    seg._knots = tuple(knots)
    return seg


def warped_causal_connector(model, p, q):
    """The explicit two-phase causal curve joining a causal pair.

    For p <= q the fiber geodesic is traversed at the null rate 1/f until
    its arc is exhausted, then the curve rises vertically to q; returned as
    a single future segment.  A purely null connector (no vertical phase)
    appears exactly when the pair sits on the cone boundary.
    """
    rel = model.relation(p, q)
    if rel in (CausalRelation.CHRONOLOGICAL_FUTURE, CausalRelation.CAUSAL_FUTURE_ONLY):
        return PiecewiseCausalCurve(model, [_connector_segment(model, p, q)])
    if rel in (CausalRelation.CHRONOLOGICAL_PAST, CausalRelation.CAUSAL_PAST_ONLY):
        seg = _connector_segment(model, q, p)
        return PiecewiseCausalCurve(model, [seg.reversed()])
    raise ConnectivityError(f"points are not causally related (relation {rel.value})")


def _solve_apex(model, p, q, upward):
    """Slice t_a with ∫_{t_p}^{t_a} + ∫_{t_q}^{t_a} dt/f = d_h (signed)."""
    core = core_product(model)
    sep = core.fiber.distance(p.x, q.x)
    lo, hi = core.interval.as_tuple()
    sign = 1.0 if upward else -1.0
    t_start = max(p.t, q.t) if upward else min(p.t, q.t)

    def gap(t):
        return (core.warp.integral_inv(p.t, t) + core.warp.integral_inv(q.t, t)) - sign * sep

    from scipy import optimize as _opt

    step = max(0.5 * sep * core.warp.value(t_start), 1e-6)
    t_prev = t_start
    for _ in range(200):
        cand = t_prev + sign * step
        bound = hi if upward else lo
        if math.isfinite(bound):
            margin = (bound - t_prev) if upward else (t_prev - bound)
            if margin <= 1e-15:
                break
            cand = t_prev + sign * min(step, 0.5 * margin)
        if sign * gap(cand) >= 0.0:
            root = _opt.brentq(gap, min(t_prev, cand), max(t_prev, cand),
                               xtol=1e-14, rtol=8.9e-16)
            return float(root)
        t_prev = cand
        step *= 2.0
    raise ConnectivityError("no apex slice inside the time interval")


def connect_piecewise_causal(model, p, q):
    """Some valid piecewise causal curve from p to q.

    Causal pairs get the one-segment connector.  Otherwise a two-segment
    curve through a common-future apex (or a common-past vee when the
    interval caps the future) is built; the apex slice is nudged up so both
    legs are strictly causal.
    """
    model.require(p)
    model.require(q)
    if p == q:
        return PiecewiseCausalCurve.trivial(model, p)
    rel = model.relation(p, q)
    if rel.is_causal:
        return warped_causal_connector(model, p, q)

    core = core_product(model)
    geo = core.fiber.geodesic(p.x, q.x)
    scale = 1.0 + abs(p.t) + abs(q.t)
    for upward in (True, False):
        try:
            t_a = _solve_apex(model, p, q, upward)
        except ConnectivityError:
            continue
        t_a = t_a + (1e-12 * scale if upward else -1e-12 * scale)
        if not core.interval.contains(t_a):
            continue
        arc_p = abs(core.warp.integral_inv(p.t, t_a))
        apex = SpacetimePoint(t_a, geo.point(min(arc_p, geo.length)))
        try:
            if upward:
                seg1 = _connector_segment(model, p, apex)
                seg2 = _connector_segment(model, q, apex).reversed()
            else:
                seg1 = _connector_segment(model, apex, p).reversed()
                seg2 = _connector_segment(model, apex, q)
            return PiecewiseCausalCurve(model, [seg1, seg2])
        except ConnectivityError:
            continue
    raise ConnectivityError("could not build a two-segment connector; interval too cramped")


def zigzag_family(model, p, q, k, rise=None, n_knots=DEFAULT_KNOTS):
    """Piecewise null bounce curve between same-slice points.

    2k alternating future/past segments follow the fiber geodesic from p to
    q, each covering fiber arc l/(2k); the null condition fixes the default
    rise (for a unit warp it is l/(2k)).  A smaller rise cannot keep the
    segments causal and is rejected; a larger one yields two-phase causal
    bounces.
    """
    model.require(p)
    model.require(q)
    core = core_product(model)
    if abs(p.t - q.t) > 1e-12 * (1.0 + abs(p.t)):
        raise CurveError("zigzag family requires same-slice endpoints")
    k = int(k)
    if k < 1:
        raise ValueError("bounce count k must be >= 1")
    ell = core.fiber.distance(p.x, q.x)
    if ell == 0.0:
        return PiecewiseCausalCurve.trivial(model, p)
    t0 = p.t
    geo = core.fiber.geodesic(p.x, q.x)
    darc = ell / (2.0 * k)
    if rise is None:
        top = core.warp.time_from_arc(t0, darc, core.interval.as_tuple())
    else:
        top = t0 + float(rise)
        if not core.interval.contains(top):
            raise DomainError("rise leaves the model's time interval")
        avail = core.warp.integral_inv(t0, top)
        if avail < darc - max(1e-12, 1e-12 * darc):
            raise CurveError(
                f"rise {rise} too small: null bounces need arc {darc} but reach only {avail}"
            )

    segments = []
    for j in range(2 * k):
        s_a = j * darc
        s_b = (j + 1) * darc
        if j % 2 == 0:
            a = SpacetimePoint(t0, geo.point(s_a))
            b = SpacetimePoint(top, geo.point(s_b))
            segments.append(_connector_segment(model, a, b, n_knots=n_knots))
        else:
            a = SpacetimePoint(t0, geo.point(s_b))
            b = SpacetimePoint(top, geo.point(s_a))
            segments.append(_connector_segment(model, a, b, n_knots=n_knots).reversed())
    return PiecewiseCausalCurve(model, segments)


def curve_from_json(model, data):
    segs = [
        CausalSegment.from_knots(Direction(s["dir"]), [
            SpacetimePoint(row[0], row[1:]) for row in s["knots"]
        ])
        for s in data["segments"]
    ]
    if not segs:
        brk = data.get("breaks") or []
        if not brk:
            raise CurveError("trivial curve JSON needs a break point")
        return PiecewiseCausalCurve.trivial(model, SpacetimePoint(brk[0][0], brk[0][1:]))
    return PiecewiseCausalCurve(model, segs)
