"""Seeded samplers for points, causal pairs, and causal curve knots.

Causal pairs are produced by rejection: draw the first point uniformly in a
coordinate box, then the second uniformly in its forward cone truncated to
the box.  Uniform independent draws almost never land causally related once
the dimension grows, so the cone-shaped proposal is essential.
"""

import math

import numpy as np

from .errors import DomainError
from .fibers import EuclideanFiber
from .models import ConeModel, SpacetimePoint, core_product


class Region:
    """Closed coordinate box [t0, t1] x prod_i [a_i, b_i]."""

    def __init__(self, bounds):
        bounds = np.asarray(bounds, dtype=float)
        if bounds.ndim != 2 or bounds.shape[1] != 2:
            raise ValueError("region bounds must be an (d+1, 2) array")
        if np.any(bounds[:, 0] > bounds[:, 1]):
            raise ValueError("region bounds must satisfy lo <= hi")
        self.bounds = bounds

    @classmethod
    def from_flat(cls, values):
        values = list(values)
        if len(values) % 2 != 0:
            raise ValueError("flat region spec needs an even number of values")
        return cls(np.asarray(values, dtype=float).reshape(-1, 2))

    @property
    def t_bounds(self):
        return self.bounds[0]

    @property
    def x_bounds(self):
        return self.bounds[1:]

    @property
    def fiber_dim(self):
        return self.bounds.shape[0] - 1

    def contains(self, p):
        c = p.coords
        if c.size != self.bounds.shape[0]:
            return False
        return bool(np.all(c >= self.bounds[:, 0]) and np.all(c <= self.bounds[:, 1]))

    def sample(self, rng):
        lo = self.bounds[:, 0]
        hi = self.bounds[:, 1]
        c = lo + (hi - lo) * rng.random(self.bounds.shape[0])
        return SpacetimePoint(c[0], c[1:])

    def span(self):
        return float(np.max(self.bounds[:, 1] - self.bounds[:, 0]))

    def to_json(self):
        return self.bounds.tolist()


def default_region(model, half_width=2.0):
    """A coordinate box comfortably inside the model's domain."""
    core = core_product(model)
    lo, hi = core.interval.lo, core.interval.hi
    a = lo if math.isfinite(lo) else -half_width
    b = hi if math.isfinite(hi) else half_width
    w = b - a
    a, b = a + 0.1 * w, b - 0.1 * w
    if isinstance(core, ConeModel):
        ts = [v.t for v in core.vertices]
        a = max(a, max(ts) + 0.25 * half_width)
        b = max(b, a + half_width)
        centers = np.mean([v.x for v in core.vertices], axis=0)
        xb = np.stack([centers - half_width, centers + half_width], axis=1)
        return Region(np.vstack([[a, b], xb]))
    if not isinstance(core.fiber, EuclideanFiber):
        raise DomainError("coordinate regions require a Euclidean fiber")
    n = core.fiber.dim
    xb = np.tile([-half_width, half_width], (n, 1))
    return Region(np.vstack([[a, b], xb]))


def sample_point(rng, model, region, max_tries=1000):
    for _ in range(max_tries):
        p = region.sample(rng)
        if model.contains(p):
            return p
    raise DomainError("could not sample a point of the model inside the region")


def _forward_fiber_point(rng, model, x, arc):
    core = core_product(model)
    if arc == 0.0:
        return np.array(x, copy=True)
    direction = core.fiber.random_direction(rng, x)
    geo_point = x + arc * direction
    if not isinstance(core.fiber, EuclideanFiber):
        # move along the great circle instead
        geo = core.fiber.geodesic(x, core.fiber.project(x + 1e-3 * direction))
        geo_point = geo.point(min(arc, math.pi * core.fiber.radius))
    return geo_point


def sample_causal_pair(rng, model, region, max_tries=2000, strict_margin=0.0):
    """Draw (x, y) with x <= y, both inside region and model domain.

    The second point sits a uniform time step up and a uniform fraction of
    the reachable fiber arc away; ``strict_margin`` shrinks the arc to stay
    clear of the cone boundary.
    """
    core = core_product(model)
    t_lo, t_hi = region.t_bounds
    for _ in range(max_tries):
        x = sample_point(rng, model, region)
        room = t_hi - x.t
        if room <= 0:
            continue
        dt = room * rng.random()
        if dt <= 0:
            continue
        t_y = x.t + dt
        arc_max = core.warp.integral_inv(x.t, t_y)
        frac = rng.random() ** (1.0 / max(1, core.fiber.dim))
        arc = frac * arc_max * (1.0 - strict_margin)
        y_x = _forward_fiber_point(rng, model, x.x, arc)
        y = SpacetimePoint(t_y, y_x)
        if region.contains(y) and model.contains(y):
            return x, y
    raise DomainError("could not sample a causal pair in the region (too small or degenerate)")


def sample_future_causal_knots(rng, model, region, steps=6, max_tries=200):
    """Knot chain of a future causal polygonal curve inside the region."""
    core = core_product(model)
    for _ in range(max_tries):
        start = sample_point(rng, model, region)
        knots = [start]
        t_hi = region.t_bounds[1]
        ok = True
        for _ in range(steps):
            cur = knots[-1]
            room = t_hi - cur.t
            if room <= 1e-12:
                ok = len(knots) >= 2
                break
            dt = room * rng.random() / steps * 2.0
            if dt <= 0:
                continue
            t_next = cur.t + dt
            arc_max = core.warp.integral_inv(cur.t, t_next)
            arc = rng.random() * arc_max
            nxt = SpacetimePoint(t_next, _forward_fiber_point(rng, model, cur.x, arc))
            if not (region.contains(nxt) and model.contains(nxt)):
                ok = len(knots) >= 2
                break
            knots.append(nxt)
        if ok and len(knots) >= 2:
            return knots
    raise DomainError("could not sample a future causal knot chain in the region")
