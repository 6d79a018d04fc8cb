"""Generalized time functions with metric gradients.

A generalized time function increases strictly along future causal curves.
The families here are slice functions tau = u(t) (coordinate time, monotone
reparameterizations phi(t), the cubic t^3 whose derivative vanishes on one
slice, affine rescalings) plus the cosmological time of cone models, which
genuinely depends on the fiber coordinates.

Gradients follow the metric convention g(grad tau, X) = X(tau).  On a
product model -dt^2 + f^2 h this makes grad(u(t)) = -u'(t) d/dt: the
gradient of a time function points to the past.
"""

import math

import numpy as np

from .errors import DomainError, ModelKindError
from .models import (
    CausalClass,
    ConeModel,
    ConformalModel,
    SpacetimePoint,
    TangentVector,
    core_product,
)

FD_DEFAULT_STEP = 1e-5


# ---------------------------------------------------------------------------
# monotone reparameterizations phi(t)


class PhiMap:
    """Smooth strictly increasing scalar map with derivative and inverse."""

    def value(self, t):
        raise NotImplementedError

    def rate(self, t):
        raise NotImplementedError

    def inverse(self, y):
        raise NotImplementedError

    def rate_min(self, a, b):
        raise NotImplementedError

    def check_increasing_on(self, interval, samples=64):
        lo, hi = interval
        a = lo if math.isfinite(lo) else -1e3
        b = hi if math.isfinite(hi) else 1e3
        span = b - a
        for t in np.linspace(a + 1e-9 * span, b - 1e-9 * span, samples):
            if self.rate(t) <= 0:
                raise ValueError(f"phi'({t}) = {self.rate(t)} is not positive")

    def to_json(self):
        raise NotImplementedError


class IdentityPhi(PhiMap):
    def value(self, t):
        return float(t)

    def rate(self, t):
        return 1.0

    def inverse(self, y):
        return float(y)

    def rate_min(self, a, b):
        return 1.0

    def to_json(self):
        return {"family": "identity"}


class AffinePhi(PhiMap):
    def __init__(self, scale, offset=0.0):
        if scale <= 0:
            raise ValueError(f"affine map must have positive slope, got {scale}")
        self.scale = float(scale)
        self.offset = float(offset)

    def value(self, t):
        return self.scale * t + self.offset

    def rate(self, t):
        return self.scale

    def inverse(self, y):
        return (y - self.offset) / self.scale

    def rate_min(self, a, b):
        return self.scale

    def to_json(self):
        return {"family": "affine", "scale": self.scale, "offset": self.offset}


class PowerPhi(PhiMap):
    """phi(t) = t^a on (0, infinity), a > 0."""

    def __init__(self, exponent):
        if exponent <= 0:
            raise ValueError("power map exponent must be positive")
        self.a = float(exponent)

    def value(self, t):
        if t <= 0:
            raise DomainError(f"t^{self.a} requires t > 0, got t={t}")
        return t ** self.a

    def rate(self, t):
        if t <= 0:
            raise DomainError(f"t^{self.a} requires t > 0, got t={t}")
        return self.a * t ** (self.a - 1.0)

    def inverse(self, y):
        if y <= 0:
            raise DomainError("power map inverse requires a positive value")
        return y ** (1.0 / self.a)

    def rate_min(self, a, b):
        # monotone in t on (0, inf): increasing for exponent > 1, else decreasing
        return self.rate(a) if self.a >= 1.0 else self.rate(b)

    def to_json(self):
        return {"family": "power", "exponent": self.a}


class ExpPhi(PhiMap):
    def __init__(self, rate):
        if rate <= 0:
            raise ValueError("exponential map rate must be positive")
        self._rate = float(rate)

    def value(self, t):
        return math.exp(self._rate * t)

    def rate(self, t):
        return self._rate * math.exp(self._rate * t)

    def inverse(self, y):
        if y <= 0:
            raise DomainError("exp map inverse requires a positive value")
        return math.log(y) / self._rate

    def rate_min(self, a, b):
        return self.rate(a)

    def to_json(self):
        return {"family": "exp", "rate": self._rate}


class LogPhi(PhiMap):
    """phi(t) = log t on (0, infinity)."""

    def value(self, t):
        if t <= 0:
            raise DomainError(f"log t requires t > 0, got t={t}")
        return math.log(t)

    def rate(self, t):
        if t <= 0:
            raise DomainError(f"log t requires t > 0, got t={t}")
        return 1.0 / t

    def inverse(self, y):
        return math.exp(y)

    def rate_min(self, a, b):
        return 1.0 / b

    def to_json(self):
        return {"family": "log"}


def phi_from_json(data):
    family = data.get("family")
    if family == "identity":
        return IdentityPhi()
    if family == "affine":
        return AffinePhi(data["scale"], data.get("offset", 0.0))
    if family == "power":
        return PowerPhi(data["exponent"])
    if family == "exp":
        return ExpPhi(data["rate"])
    if family == "log":
        return LogPhi()
    raise ValueError(f"unknown phi family: {family!r}")


# ---------------------------------------------------------------------------
# time functions


class TimeFunction:
    """Evaluable generalized time function."""

    kind = "abstract"
    #: True when tau depends on the time coordinate only
    t_only = True
    gradient_mode = "analytic"
    fd_step = FD_DEFAULT_STEP

    def value(self, p):
        raise NotImplementedError

    def __call__(self, p):
        return self.value(p)

    # --- slice interface (t_only functions) ---

    def slice_value(self, t):
        raise NotImplementedError

    def slice_rate(self, t):
        raise NotImplementedError

    def slice_rate_min(self, a, b):
        raise NotImplementedError

    def slice_affine(self):
        """(lam, C) when tau = lam * t + C, else None."""
        return None

    def degenerate_times(self):
        """Times where the slice derivative vanishes (diagnostic probes)."""
        return ()

    # --- gradients ---

    def gradient(self, model, p):
        if self.gradient_mode == "analytic":
            return self.analytic_gradient(model, p)
        return finite_difference_gradient(self, model, p, step=self.fd_step)

    def analytic_gradient(self, model, p):
        """Metric gradient; on products grad(u(t)) = -u'(t) d/dt."""
        if not self.t_only:
            raise NotImplementedError
        model.require(p)
        rate = self.slice_rate(p.t)
        dt = -rate
        dx = np.zeros_like(p.x)
        om2 = _conformal_square(model, p)
        return TangentVector(p, dt / om2, dx)

    def to_json(self):
        raise NotImplementedError


def _conformal_square(model, p):
    om2 = 1.0
    m = model
    while isinstance(m, ConformalModel):
        om = m.omega.value(p)
        om2 *= om * om
        m = m.base
    return om2


class CoordinateTime(TimeFunction):
    """tau(t, x) = t."""

    kind = "coordinate"

    def value(self, p):
        return p.t

    def slice_value(self, t):
        return float(t)

    def slice_rate(self, t):
        return 1.0

    def slice_rate_min(self, a, b):
        return 1.0

    def slice_affine(self):
        return (1.0, 0.0)

    def to_json(self):
        return {"kind": "coordinate"}


class ComposedTime(TimeFunction):
    """tau(t, x) = phi(t) with phi' > 0 (checked on the given interval)."""

    kind = "composed"

    def __init__(self, phi, interval=None):
        self.phi = phi
        if interval is not None:
            phi.check_increasing_on(interval)

    def value(self, p):
        return self.phi.value(p.t)

    def slice_value(self, t):
        return self.phi.value(t)

    def slice_rate(self, t):
        return self.phi.rate(t)

    def slice_rate_min(self, a, b):
        return self.phi.rate_min(a, b)

    def slice_affine(self):
        if isinstance(self.phi, IdentityPhi):
            return (1.0, 0.0)
        if isinstance(self.phi, AffinePhi):
            return (self.phi.scale, self.phi.offset)
        return None

    def to_json(self):
        return {"kind": "composed", "phi": self.phi.to_json()}


class CubicTime(TimeFunction):
    """tau(t, x) = t^3: a time function whose gradient vanishes at t = 0.

    The zero-derivative slice makes the induced null distance collapse
    there, so the degenerate time is exposed for diagnostics rather than
    treated as an error.
    """

    kind = "tcubed"

    def value(self, p):
        return p.t ** 3

    def slice_value(self, t):
        return float(t) ** 3

    def slice_rate(self, t):
        return 3.0 * t * t

    def slice_rate_min(self, a, b):
        if a <= 0.0 <= b:
            return 0.0
        m = min(abs(a), abs(b))
        return 3.0 * m * m

    def degenerate_times(self):
        return (0.0,)

    def to_json(self):
        return {"kind": "tcubed"}


class AffineTime(TimeFunction):
    """tau = scale * base + offset with scale > 0."""

    kind = "affine"

    def __init__(self, base, scale, offset=0.0):
        if scale <= 0:
            raise ValueError("affine rescaling requires scale > 0")
        self.base = base
        self.scale = float(scale)
        self.offset = float(offset)

    @property
    def t_only(self):
        return self.base.t_only

    def value(self, p):
        return self.scale * self.base.value(p) + self.offset

    def slice_value(self, t):
        return self.scale * self.base.slice_value(t) + self.offset

    def slice_rate(self, t):
        return self.scale * self.base.slice_rate(t)

    def slice_rate_min(self, a, b):
        return self.scale * self.base.slice_rate_min(a, b)

    def slice_affine(self):
        inner = self.base.slice_affine()
        if inner is None:
            return None
        lam, c = inner
        return (self.scale * lam, self.scale * c + self.offset)

    def degenerate_times(self):
        return self.base.degenerate_times()

    def analytic_gradient(self, model, p):
        g = self.base.analytic_gradient(model, p)
        if g is None:
            return None
        return g.scaled(self.scale)

    def gradient(self, model, p):
        if self.gradient_mode == "analytic":
            return self.analytic_gradient(model, p)
        return finite_difference_gradient(self, model, p, step=self.fd_step)

    def to_json(self):
        return {
            "kind": "affine",
            "base": self.base.to_json(),
            "scale": self.scale,
            "offset": self.offset,
        }


class CosmologicalTime(TimeFunction):
    """Cosmological time of a cone model (largest Lorentzian distance from
    the causal past); fiber-dependent, so the slice interface is disabled."""

    kind = "cosmological"
    t_only = False

    def __init__(self, model):
        if not isinstance(model, ConeModel):
            raise ModelKindError("cosmological time requires a cone-restriction model")
        self.model = model

    def value(self, p):
        from .cosmo import cosmological_time

        return cosmological_time(self.model, p)

    def analytic_gradient(self, model, p):
        from .cosmo import cosmological_gradient

        return cosmological_gradient(self.model, p)

    def gradient(self, model, p):
        if self.gradient_mode == "analytic":
            return self.analytic_gradient(model, p)
        return finite_difference_gradient(self, model, p, step=self.fd_step)

    def steepness_lower(self, region_points):
        from .cosmo import steepness_lower_bound

        return steepness_lower_bound(self.model, region_points)

    def to_json(self):
        return {"kind": "cosmological"}


# ---------------------------------------------------------------------------
# operations


def tau_eval(tf, p):
    return tf.value(p)


def tau_gradient(tf, model, p):
    """Metric gradient of tau at p, or None where it is undefined."""
    return tf.gradient(model, p)


def finite_difference_gradient(tf, model, p, step=FD_DEFAULT_STEP, richardson=True):
    """Central-difference differential of tau, index raised by the metric.

    Richardson refinement combines steps h and h/2 to cancel the leading
    O(h^2) truncation term.
    """
    core = core_product(model)
    interval = core.interval

    def diff_quot(h):
        comps = np.empty(1 + p.x.size)
        tp = SpacetimePoint(p.t + h, p.x)
        tm = SpacetimePoint(p.t - h, p.x)
        comps[0] = (tf.value(tp) - tf.value(tm)) / (2.0 * h)
        for i in range(p.x.size):
            dx = np.zeros_like(p.x)
            dx[i] = h
            xp = SpacetimePoint(p.t, p.x + dx)
            xm = SpacetimePoint(p.t, p.x - dx)
            comps[1:][i] = (tf.value(xp) - tf.value(xm)) / (2.0 * h)
        return comps

    h = step
    margin = interval.boundary_distance(p.t)
    if math.isfinite(margin):
        h = min(h, 0.4 * margin)
    if richardson:
        d = (4.0 * diff_quot(h / 2.0) - diff_quot(h)) / 3.0
    else:
        d = diff_quot(h)

    # raise the index: g^{tt} = -1, fiber part scaled by 1/f^2
    f = core.warp.value(p.t)
    dx_vec = core.fiber.raise_index(p.x, d[1:]) / (f * f)
    om2 = _conformal_square(model, p)
    return TangentVector(p, -d[0] / om2, dx_vec / om2)


class MonotonicityReport:
    """Result of sampling tau along random future causal curves."""

    def __init__(self, trials):
        self.trials = trials
        self.violations = []

    @property
    def passed(self):
        return not self.violations

    def record(self, curve_knots, index, tau_before, tau_after):
        self.violations.append(
            {
                "knot_index": index,
                "tau_before": tau_before,
                "tau_after": tau_after,
                "witness": [k.to_json() for k in curve_knots],
            }
        )

    def to_json(self):
        return {"trials": self.trials, "passed": self.passed, "violations": self.violations}


def validate_time_function(tf, model, trials=1000, seed=0):
    """Check strict increase of tau along sampled future causal curves."""
    from .sampling import default_region, sample_future_causal_knots

    rng = np.random.default_rng(seed)
    region = default_region(model)
    report = MonotonicityReport(trials)
    for _ in range(trials):
        knots = sample_future_causal_knots(rng, model, region)
        values = [tf.value(k) for k in knots]
        for i in range(1, len(values)):
            if not values[i] > values[i - 1]:
                report.record(knots, i, values[i - 1], values[i])
                break
    return report


def timefunc_from_json(data, model=None):
    kind = data.get("kind")
    if kind == "coordinate":
        return CoordinateTime()
    if kind == "composed":
        interval = model.interval.as_tuple() if model is not None else None
        return ComposedTime(phi_from_json(data["phi"]), interval)
    if kind == "tcubed":
        return CubicTime()
    if kind == "affine":
        base = timefunc_from_json(data["base"], model)
        return AffineTime(base, data["scale"], data.get("offset", 0.0))
    if kind == "cosmological":
        if model is None:
            raise ValueError("cosmological time function needs its model")
        return CosmologicalTime(model)
    raise ValueError(f"unknown time function kind: {kind!r}")


def load_timefunc(path, model=None):
    import json

    with open(path, "r", encoding="utf-8") as fh:
        return timefunc_from_json(json.load(fh), model)


def is_unit_gradient(tf, model):
    """True when grad tau is known to be unit timelike (tau = t + c on an
    unwarped product, or cosmological time on a cone)."""
    core = core_product(model)
    if isinstance(tf, CosmologicalTime):
        return isinstance(core, ConeModel)
    aff = tf.slice_affine() if tf.t_only else None
    return aff is not None and aff[0] == 1.0 and core.is_product
