"""Warp factor families and the cone integral ∫ dt/f.

The causal structure of a warped product -dt^2 + f(t)^2 h is governed by the
integral of 1/f between time slices: the fiber arc reachable by a null curve
from slice a to slice b is exactly ∫_a^b dt/f.  All families expose that
integral through adaptive quadrature with relative tolerance 1e-10, plus the
inverse problem (how far in time a given arc takes, solved by bracketing and
Brent refinement) and an exact-where-possible minimum over a slab.
"""

import math

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .errors import ConnectivityError, QuadratureError, RootFindError

QUAD_RTOL = 1e-10


def _quad(func, a, b):
    if a == b:
        return 0.0
    val, err, info, *rest = integrate.quad(
        func, a, b, epsrel=QUAD_RTOL, epsabs=1e-14, limit=200, full_output=1
    )
    if rest:
        raise QuadratureError(f"quadrature failed on [{a}, {b}]: {rest[0]}")
    if err > max(QUAD_RTOL * abs(val), 1e-10):
        raise QuadratureError(f"quadrature error {err} too large on [{a}, {b}]")
    return float(val)


class Warp:
    """Base class: positive scale factor f(t) on an open time interval."""

    def value(self, t):
        raise NotImplementedError

    def __call__(self, t):
        return self.value(t)

    def integral_inv(self, a, b):
        """∫_a^b dt / f(t), signed in the orientation of (a, b)."""
        return _quad(lambda t: 1.0 / self.value(t), a, b)

    def min_on(self, a, b):
        """min of f over [a, b]; exact for monotone families."""
        raise NotImplementedError

    def time_from_arc(self, t0, arc, interval):
        """Solve ∫_{t0}^{t} ds/f(s) = arc for t inside ``interval``.

        ``arc`` may be negative (solution below t0).  Raises
        ConnectivityError when the requested arc is not reachable within the
        interval (the cone integral saturates first).
        """
        if arc == 0.0:
            return t0
        lo, hi = interval
        sign = 1.0 if arc > 0 else -1.0

        def resid(t):
            return self.integral_inv(t0, t) - arc

        # expand a bracket geometrically toward the relevant interval end
        step = max(abs(arc) * self.value(t0), 1e-12)
        t_in, t_out = t0, t0
        for _ in range(200):
            cand = t_out + sign * step
            bound = hi if sign > 0 else lo
            if math.isfinite(bound):
                cand = min(cand, bound - 1e-300) if sign > 0 else max(cand, bound + 1e-300)
                # never step onto/past the open boundary
                cand = bound - (bound - t_out) * 1e-12 if cand == bound else cand
                margin = (bound - t_out) if sign > 0 else (t_out - bound)
                if margin <= 0:
                    break
                cand = t_out + sign * min(step, 0.5 * margin)
            r = resid(cand)
            if sign * r >= 0.0:
                t_in, t_out = t_out, cand
                try:
                    root = optimize.brentq(resid, min(t_in, t_out), max(t_in, t_out),
                                           xtol=1e-14, rtol=8.9e-16, maxiter=200)
                except ValueError as exc:  # pragma: no cover - bracket guaranteed
                    raise RootFindError(str(exc)) from exc
                return float(root)
            t_out = cand
            step *= 2.0
        raise ConnectivityError(
            f"arc {arc} not reachable from t0={t0} within interval {interval}"
        )

    def to_json(self):
        raise NotImplementedError


class ConstantWarp(Warp):
    family = "constant"

    def __init__(self, value=1.0):
        if value <= 0:
            raise ValueError("warp factor must be positive")
        self.c = float(value)

    def value(self, t):
        return self.c

    def min_on(self, a, b):
        return self.c

    def time_from_arc(self, t0, arc, interval):
        t = t0 + arc * self.c
        lo, hi = interval
        if not (lo < t < hi):
            raise ConnectivityError(f"arc {arc} leaves the interval from t0={t0}")
        return t

    def to_json(self):
        return {"family": "constant", "value": self.c}


class PowerWarp(Warp):
    """f(t) = t^a on an interval contained in (0, ∞)."""

    family = "power"

    def __init__(self, exponent):
        self.a = float(exponent)

    def value(self, t):
        if t <= 0 and self.a != 0:
            raise ValueError(f"power warp t^{self.a} evaluated at t={t} <= 0")
        return float(t) ** self.a

    def min_on(self, a, b):
        # monotone: increasing for a > 0, decreasing for a < 0
        if self.a >= 0:
            return self.value(a)
        return self.value(b)

    def to_json(self):
        return {"family": "power", "exponent": self.a}


class ExpWarp(Warp):
    """f(t) = exp(rate * t)."""

    family = "exp"

    def __init__(self, rate):
        self.rate = float(rate)

    def value(self, t):
        return math.exp(self.rate * t)

    def min_on(self, a, b):
        if self.rate >= 0:
            return self.value(a)
        return self.value(b)

    def to_json(self):
        return {"family": "exp", "rate": self.rate}


class TabulatedWarp(Warp):
    """Sampled warp factor, monotone-cubic (PCHIP) interpolated."""

    family = "tabulated"

    def __init__(self, t, f):
        t = np.asarray(t, float)
        f = np.asarray(f, float)
        if t.ndim != 1 or t.shape != f.shape or t.size < 2:
            raise ValueError("tabulated warp needs matching 1-D arrays of length >= 2")
        if np.any(np.diff(t) <= 0):
            raise ValueError("tabulated warp times must be strictly increasing")
        if np.any(f <= 0):
            raise ValueError("warp factor samples must be positive")
        self.t = t
        self.f = f
        self._interp = PchipInterpolator(t, f)

    def value(self, t):
        if t < self.t[0] or t > self.t[-1]:
            raise ValueError(f"t={t} outside tabulated range [{self.t[0]}, {self.t[-1]}]")
        return float(self._interp(t))

    def min_on(self, a, b):
        grid = np.linspace(a, b, 513)
        vals = self._interp(grid)
        i = int(np.argmin(vals))
        lo = grid[max(0, i - 1)]
        hi = grid[min(len(grid) - 1, i + 1)]
        res = optimize.minimize_scalar(self._interp, bounds=(lo, hi), method="bounded")
        return float(min(vals[i], res.fun))

    def to_json(self):
        return {"family": "tabulated", "t": self.t.tolist(), "f": self.f.tolist()}


class CallableWarp(Warp):
    """Warp given by an arbitrary positive callable (not serializable)."""

    family = "callable"

    def __init__(self, func, label="callable"):
        self._func = func
        self.label = label

    def value(self, t):
        v = float(self._func(t))
        if v <= 0:
            raise ValueError(f"warp factor must stay positive, got f({t}) = {v}")
        return v

    def min_on(self, a, b):
        grid = np.linspace(a, b, 513)
        vals = np.array([self.value(t) for t in grid])
        i = int(np.argmin(vals))
        lo = grid[max(0, i - 1)]
        hi = grid[min(len(grid) - 1, i + 1)]
        res = optimize.minimize_scalar(
            lambda t: self.value(t), bounds=(lo, hi), method="bounded"
        )
        return float(min(vals[i], res.fun))

    def to_json(self):
        return {"family": "callable", "label": self.label}


def warp_from_json(data):
    family = data.get("family")
    if family == "constant":
        return ConstantWarp(data.get("value", 1.0))
    if family == "power":
        return PowerWarp(data["exponent"])
    if family == "exp":
        return ExpWarp(data["rate"])
    if family == "tabulated":
        return TabulatedWarp(data["t"], data["f"])
    raise ValueError(f"unknown warp family: {family!r}")


def check_positive_on(warp, interval, samples=64):
    """Sampled positivity check of f over the (clipped) interval."""
    lo, hi = interval
    a = lo if math.isfinite(lo) else -1e6
    b = hi if math.isfinite(hi) else 1e6
    a, b = a + 1e-9 * (b - a), b - 1e-9 * (b - a)
    for t in np.linspace(a, b, samples):
        if warp.value(t) <= 0:
            raise ValueError(f"warp factor not positive at t={t}")
