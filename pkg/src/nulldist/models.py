"""Model spacetimes: metric, causal classification, causal relation.

Supported kinds:

* ``MinkowskiModel(n)`` — R x R^n with metric -dt^2 + |dx|^2 (own closed-form
  code path; must agree with the generic warped product at f = 1).
* ``GRWModel(I, f, fiber)`` — warped product I x_f S with -dt^2 + f(t)^2 h.
* ``ConformalModel(base, omega)`` — metric omega^2 g_base; same causal
  structure as the base.
* ``ConeModel(base, vertices)`` — the open region ⋃_i I^+(v_i) of a
  Minkowski base.  Chronological futures are future-closed and convex, so
  causal relations restrict from the base unchanged.

Causal relation on a product model is decided by comparing the fiber
distance d_h(p_S, q_S) against the cone integral ∫ dt/f between the time
slices: strictly smaller means chronologically related, equal (within
tolerance) sits on the cone boundary, larger means unrelated.
"""

import enum
import json
import math

import numpy as np

from .errors import DomainError, ModelKindError
from .fibers import EuclideanFiber, SphereFiber, fiber_from_json
from .warps import ConstantWarp, check_positive_on, warp_from_json

# absolute tolerance on (d_h - ∫ dt/f) used to resolve the cone-boundary case
RELATION_EQ_TOL = 1e-9


class SpacetimePoint:
    """Event (t, x): time coordinate plus fiber chart coordinates."""

    __slots__ = ("t", "x")

    def __init__(self, t, x=()):
        self.t = float(t)
        arr = np.atleast_1d(np.asarray(x, dtype=float)).copy()
        arr.flags.writeable = False
        self.x = arr

    @property
    def coords(self):
        return np.concatenate(([self.t], self.x))

    def __eq__(self, other):
        if not isinstance(other, SpacetimePoint):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.x, other.x)

    __hash__ = None

    def __repr__(self):
        return f"SpacetimePoint(t={self.t}, x={self.x.tolist()})"

    def to_json(self):
        return [self.t] + self.x.tolist()


def point(t, *x):
    """Convenience constructor: point(t, x1, x2, ...)."""
    return SpacetimePoint(t, x)


def point_from_json(data):
    data = list(data)
    return SpacetimePoint(data[0], data[1:])


class TangentVector:
    """Tangent vector (dt, dx) attached to a base point."""

    __slots__ = ("base", "dt", "dx")

    def __init__(self, base, dt, dx=()):
        self.base = base
        self.dt = float(dt)
        arr = np.atleast_1d(np.asarray(dx, dtype=float)).copy()
        if arr.shape != base.x.shape:
            raise DomainError(
                f"fiber components {arr.shape} do not match base point {base.x.shape}"
            )
        arr.flags.writeable = False
        self.dx = arr

    def scaled(self, s):
        return TangentVector(self.base, s * self.dt, s * self.dx)

    def __repr__(self):
        return f"TangentVector(base={self.base!r}, dt={self.dt}, dx={self.dx.tolist()})"


class CausalClass(enum.Enum):
    FUTURE_TIMELIKE = "future_timelike"
    PAST_TIMELIKE = "past_timelike"
    FUTURE_NULL = "future_null"
    PAST_NULL = "past_null"
    SPACELIKE = "spacelike"
    ZERO = "zero"

    @property
    def is_causal(self):
        return self in (
            CausalClass.FUTURE_TIMELIKE,
            CausalClass.PAST_TIMELIKE,
            CausalClass.FUTURE_NULL,
            CausalClass.PAST_NULL,
        )

    @property
    def is_future(self):
        return self in (CausalClass.FUTURE_TIMELIKE, CausalClass.FUTURE_NULL)

    @property
    def is_past(self):
        return self in (CausalClass.PAST_TIMELIKE, CausalClass.PAST_NULL)


class CausalRelation(enum.Enum):
    CHRONOLOGICAL_FUTURE = "chronological_future"   # p << q
    CAUSAL_FUTURE_ONLY = "causal_future_only"       # p <= q, not <<
    CLOSURE_FUTURE_ONLY = "closure_future_only"     # q in cl I+(p), not <=
    CHRONOLOGICAL_PAST = "chronological_past"
    CAUSAL_PAST_ONLY = "causal_past_only"
    CLOSURE_PAST_ONLY = "closure_past_only"
    UNRELATED = "unrelated"

    @property
    def is_causal(self):
        """p <= q or q <= p."""
        return self in (
            CausalRelation.CHRONOLOGICAL_FUTURE,
            CausalRelation.CAUSAL_FUTURE_ONLY,
            CausalRelation.CHRONOLOGICAL_PAST,
            CausalRelation.CAUSAL_PAST_ONLY,
        )

    @property
    def is_future(self):
        return self in (
            CausalRelation.CHRONOLOGICAL_FUTURE,
            CausalRelation.CAUSAL_FUTURE_ONLY,
            CausalRelation.CLOSURE_FUTURE_ONLY,
        )

    @property
    def in_closure(self):
        """q in the closure of I+(p), or the past analogue."""
        return self is not CausalRelation.UNRELATED

    @property
    def reversed(self):
        table = {
            CausalRelation.CHRONOLOGICAL_FUTURE: CausalRelation.CHRONOLOGICAL_PAST,
            CausalRelation.CAUSAL_FUTURE_ONLY: CausalRelation.CAUSAL_PAST_ONLY,
            CausalRelation.CLOSURE_FUTURE_ONLY: CausalRelation.CLOSURE_PAST_ONLY,
            CausalRelation.CHRONOLOGICAL_PAST: CausalRelation.CHRONOLOGICAL_FUTURE,
            CausalRelation.CAUSAL_PAST_ONLY: CausalRelation.CAUSAL_FUTURE_ONLY,
            CausalRelation.CLOSURE_PAST_ONLY: CausalRelation.CLOSURE_FUTURE_ONLY,
            CausalRelation.UNRELATED: CausalRelation.UNRELATED,
        }
        return table[self]


class TimeInterval:
    """Open interval of time coordinates; endpoints may be infinite."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo=-math.inf, hi=math.inf):
        lo = -math.inf if lo is None else float(lo)
        hi = math.inf if hi is None else float(hi)
        if not lo < hi:
            raise ValueError(f"empty time interval ({lo}, {hi})")
        self.lo = lo
        self.hi = hi

    def contains(self, t):
        return self.lo < t < self.hi

    def boundary_distance(self, t):
        return min(t - self.lo, self.hi - t)

    def as_tuple(self):
        return (self.lo, self.hi)

    def to_json(self):
        return [
            None if math.isinf(self.lo) else self.lo,
            None if math.isinf(self.hi) else self.hi,
        ]

    def __repr__(self):
        return f"TimeInterval({self.lo}, {self.hi})"


class Spacetime:
    """Common interface of all model spacetimes."""

    kind = "abstract"
    fiber = None
    interval = None

    def contains(self, p):
        raise NotImplementedError

    def require(self, p):
        if not self.contains(p):
            raise DomainError(f"point {p!r} outside the model domain")

    def metric(self, v, w):
        raise NotImplementedError

    def classify(self, v):
        """Causal class by the sign of g(v, v); future cone is dt > 0."""
        self.require(v.base)
        g = self.metric(v, v)
        if g < 0.0:
            return CausalClass.FUTURE_TIMELIKE if v.dt > 0 else CausalClass.PAST_TIMELIKE
        if g > 0.0:
            return CausalClass.SPACELIKE
        if v.dt == 0.0:
            return CausalClass.ZERO
        return CausalClass.FUTURE_NULL if v.dt > 0 else CausalClass.PAST_NULL

    def relation(self, p, q):
        raise NotImplementedError

    def lorentz_distance(self, p, q):
        raise ModelKindError(f"no closed-form Lorentzian distance for kind {self.kind!r}")

    def _check_pair(self, v, w):
        if v.base is not w.base and not (
            v.base.t == w.base.t and np.array_equal(v.base.x, w.base.x)
        ):
            raise DomainError("tangent vectors must share a base point")
        self.require(v.base)

    def to_json(self):
        raise NotImplementedError

    # products expose their warp; wrappers override
    @property
    def is_product(self):
        return False


class MinkowskiModel(Spacetime):
    """Flat spacetime R x R^n, metric -dt^2 + |dx|^2 (closed-form paths)."""

    kind = "minkowski"

    def __init__(self, dim):
        self.fiber = EuclideanFiber(dim)
        self.interval = TimeInterval()
        self.warp = ConstantWarp(1.0)

    @property
    def dim(self):
        return self.fiber.dim

    @property
    def is_product(self):
        return True

    def contains(self, p):
        try:
            self.fiber.validate_point(p.x)
        except DomainError:
            return False
        return math.isfinite(p.t)

    def metric(self, v, w):
        self._check_pair(v, w)
        return -v.dt * w.dt + float(np.dot(v.dx, w.dx))

    def relation(self, p, q):
        self.require(p)
        self.require(q)
        dt = q.t - p.t
        if dt < 0.0:
            return self.relation(q, p).reversed
        sep = self.fiber.distance(p.x, q.x)
        diff = sep - dt
        if abs(diff) <= RELATION_EQ_TOL:
            return CausalRelation.CAUSAL_FUTURE_ONLY
        if diff < 0.0:
            return CausalRelation.CHRONOLOGICAL_FUTURE
        return CausalRelation.UNRELATED

    def lorentz_distance(self, p, q):
        """sup of Lorentzian length over future causal curves p -> q.

        Equals sqrt(dt^2 - |dx|^2) when p <= q (the straight geodesic
        maximizes), and 0 when there is no future causal curve.
        """
        self.require(p)
        self.require(q)
        dt = q.t - p.t
        if dt < 0.0:
            return 0.0
        rel = self.relation(p, q)
        if rel not in (CausalRelation.CHRONOLOGICAL_FUTURE, CausalRelation.CAUSAL_FUTURE_ONLY):
            return 0.0
        sep2 = float(np.dot(q.x - p.x, q.x - p.x))
        return math.sqrt(max(0.0, dt * dt - sep2))

    def to_json(self):
        return {"kind": "minkowski", "dim": self.dim}


class GRWModel(Spacetime):
    """Warped product I x_f S with metric -dt^2 + f(t)^2 h."""

    kind = "grw"

    def __init__(self, interval, warp, fiber):
        self.interval = interval if isinstance(interval, TimeInterval) else TimeInterval(*interval)
        self.warp = warp
        self.fiber = fiber
        check_positive_on(warp, self.interval.as_tuple())

    @property
    def dim(self):
        return self.fiber.dim

    @property
    def is_product(self):
        return True

    def contains(self, p):
        try:
            self.fiber.validate_point(p.x)
        except DomainError:
            return False
        return self.interval.contains(p.t)

    def metric(self, v, w):
        self._check_pair(v, w)
        f = self.warp.value(v.base.t)
        return -v.dt * w.dt + (f * f) * self.fiber.inner(v.base.x, v.dx, w.dx)

    def relation(self, p, q):
        self.require(p)
        self.require(q)
        dt = q.t - p.t
        if dt < 0.0:
            return self.relation(q, p).reversed
        sep = self.fiber.distance(p.x, q.x)
        reach = self.warp.integral_inv(p.t, q.t)
        diff = sep - reach
        if abs(diff) <= RELATION_EQ_TOL:
            if self.fiber.complete:
                return CausalRelation.CAUSAL_FUTURE_ONLY
            return CausalRelation.CLOSURE_FUTURE_ONLY
        if diff < 0.0:
            return CausalRelation.CHRONOLOGICAL_FUTURE
        return CausalRelation.UNRELATED

    def to_json(self):
        return {
            "kind": "grw",
            "interval": self.interval.to_json(),
            "warp": self.warp.to_json(),
            "fiber": self.fiber.to_json(),
        }


class OmegaField:
    """Positive conformal factor omega(t, x)."""

    def __init__(self, func, spec=None):
        self._func = func
        self._spec = spec or {"family": "callable"}

    def value(self, p):
        v = float(self._func(p))
        if v <= 0:
            raise ValueError(f"conformal factor must be positive, got {v} at {p!r}")
        return v

    def to_json(self):
        return dict(self._spec)

    @staticmethod
    def constant(c):
        if c <= 0:
            raise ValueError("conformal factor must be positive")
        return OmegaField(lambda p: c, {"family": "constant", "value": float(c)})

    @staticmethod
    def exp_t(rate):
        return OmegaField(
            lambda p: math.exp(rate * p.t), {"family": "exp_t", "rate": float(rate)}
        )

    @staticmethod
    def from_json(data):
        family = data.get("family")
        if family == "constant":
            return OmegaField.constant(data["value"])
        if family == "exp_t":
            return OmegaField.exp_t(data["rate"])
        raise ValueError(f"unknown conformal factor family: {family!r}")


class ConformalModel(Spacetime):
    """Metric omega^2 g_base: same causal structure as the base model."""

    kind = "conformal"

    def __init__(self, base, omega):
        self.base = base
        self.omega = omega
        self.fiber = base.fiber
        self.interval = base.interval

    @property
    def dim(self):
        return self.base.dim

    def contains(self, p):
        return self.base.contains(p)

    def metric(self, v, w):
        om = self.omega.value(v.base)
        return om * om * self.base.metric(v, w)

    def relation(self, p, q):
        return self.base.relation(p, q)

    def to_json(self):
        return {"kind": "conformal", "base": self.base.to_json(), "omega": self.omega.to_json()}


class ConeModel(Spacetime):
    """Union of open chronological futures ⋃ I^+(v_i) in a Minkowski base.

    I^+(v) is convex and future-closed in Minkowski space, so any future
    causal curve starting inside stays inside; causal relations between
    member points therefore coincide with the base relations.
    """

    kind = "cone"

    def __init__(self, base, vertices):
        if not isinstance(base, MinkowskiModel):
            raise ModelKindError("cone restriction requires a Minkowski base")
        if not vertices:
            raise ValueError("cone restriction needs at least one vertex")
        self.base = base
        self.vertices = tuple(vertices)
        for v in self.vertices:
            base.require(v)
        self.fiber = base.fiber
        self.interval = base.interval

    @property
    def dim(self):
        return self.base.dim

    @property
    def is_product(self):
        return True

    @property
    def warp(self):
        return self.base.warp

    def cone_slack(self, p, vertex):
        """(t - t_v) - |x - x_v|: positive inside I^+(vertex)."""
        return (p.t - vertex.t) - float(np.linalg.norm(p.x - vertex.x))

    def contains(self, p):
        if not self.base.contains(p):
            return False
        return any(self.cone_slack(p, v) > 0.0 for v in self.vertices)

    def metric(self, v, w):
        self.require(v.base)
        return self.base.metric(v, w)

    def relation(self, p, q):
        self.require(p)
        self.require(q)
        return self.base.relation(p, q)

    def lorentz_distance(self, p, q):
        # the maximizing geodesic for p <= q lies in I^+(v) whenever p does,
        # so the restricted supremum equals the base value
        self.require(p)
        self.require(q)
        return self.base.lorentz_distance(p, q)

    def to_json(self):
        return {
            "kind": "cone",
            "base": self.base.to_json(),
            "vertices": [v.to_json() for v in self.vertices],
        }


# ---------------------------------------------------------------------------
# operations mirroring the module interface


def metric_eval(model, v, w):
    """g(v, w) for tangent vectors at a common base point."""
    return model.metric(v, w)


def classify_vector(model, v):
    return model.classify(v)


def causal_relation(model, p, q):
    return model.relation(p, q)


def lorentz_distance(model, p, q):
    return model.lorentz_distance(p, q)


def fiber_distance(fiber, x, y):
    return fiber.distance(np.asarray(x, float), np.asarray(y, float))


def core_product(model):
    """Strip conformal wrappers; returns the underlying product/cone model."""
    while isinstance(model, ConformalModel):
        model = model.base
    return model


def model_from_json(data):
    kind = data.get("kind")
    if kind == "minkowski":
        return MinkowskiModel(data["dim"])
    if kind == "grw":
        interval = data.get("interval", [None, None])
        warp = warp_from_json(data["warp"])
        fiber = fiber_from_json(data["fiber"])
        return GRWModel(TimeInterval(interval[0], interval[1]), warp, fiber)
    if kind == "conformal":
        return ConformalModel(model_from_json(data["base"]), OmegaField.from_json(data["omega"]))
    if kind == "cone":
        base = model_from_json(data["base"])
        vertices = [point_from_json(v) for v in data["vertices"]]
        return ConeModel(base, vertices)
    raise ValueError(f"unknown model kind: {kind!r}")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
