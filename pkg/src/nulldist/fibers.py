"""Riemannian fiber geometries for product spacetimes.

A fiber is the spatial factor (S, h) of a warped product.  Two families are
supported: flat Euclidean space R^n and the round sphere S^n of radius R.
Sphere points are kept in unit-embedding coordinates (vectors of length one
in R^(n+1)); the radius enters only through the metric.  Both fibers are
complete, so any two points are joined by a minimal geodesic.
"""

import numpy as np

from .errors import DomainError

SPHERE_CHART_TOL = 1e-9


class FiberGeodesic:
    """Unit-speed minimal geodesic between two fiber points.

    ``point(s)`` returns chart coordinates at arc length s in [0, length];
    ``direction(s)`` is the chart velocity, h-normalized to 1.
    """

    def __init__(self, length, point, direction):
        self.length = float(length)
        self.point = point
        self.direction = direction


class EuclideanFiber:
    """Flat R^n with the standard metric."""

    kind = "euclidean"
    complete = True

    def __init__(self, dim):
        if dim < 1:
            raise ValueError("fiber dimension must be >= 1")
        self.dim = int(dim)

    def validate_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"expected {self.dim} fiber coordinates, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("fiber coordinates must be finite")
        return x

    def distance(self, x, y):
        return float(np.linalg.norm(np.asarray(y, float) - np.asarray(x, float)))

    def inner(self, x, u, v):
        """h(u, v) at base point x."""
        return float(np.dot(u, v))

    def norm(self, x, u):
        return float(np.linalg.norm(u))

    def raise_index(self, x, covec):
        """Convert a fiber one-form (chart components) to a vector."""
        return np.asarray(covec, dtype=float)

    def geodesic(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        delta = y - x
        length = float(np.linalg.norm(delta))
        if length == 0.0:
            zero = np.zeros(self.dim)
            return FiberGeodesic(0.0, lambda s: x.copy(), lambda s: zero.copy())
        direction = delta / length
        return FiberGeodesic(length, lambda s: x + s * direction, lambda s: direction.copy())

    def random_direction(self, rng, x):
        v = rng.normal(size=self.dim)
        n = np.linalg.norm(v)
        while n < 1e-12:
            v = rng.normal(size=self.dim)
            n = np.linalg.norm(v)
        return v / n

    def to_json(self):
        return {"kind": "euclidean", "dim": self.dim}

    def __eq__(self, other):
        return isinstance(other, EuclideanFiber) and other.dim == self.dim


class SphereFiber:
    """Round sphere S^n of radius R in unit-embedding coordinates.

    Chart points are unit vectors in R^(n+1); h is R^2 times the induced
    unit-sphere metric, so tangent vectors must be orthogonal to the base
    point.  Distance is R times the central angle.
    """

    kind = "sphere"
    complete = True

    def __init__(self, dim, radius=1.0):
        if dim < 1:
            raise ValueError("sphere dimension must be >= 1")
        if radius <= 0:
            raise ValueError("sphere radius must be positive")
        self.dim = int(dim)
        self.radius = float(radius)

    @property
    def ambient_dim(self):
        return self.dim + 1

    def validate_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ambient_dim,):
            raise DomainError(
                f"expected {self.ambient_dim} embedding coordinates, got shape {x.shape}"
            )
        n = np.linalg.norm(x)
        if abs(n - 1.0) > SPHERE_CHART_TOL:
            raise DomainError(f"sphere chart point must be unit length, |x| = {n}")
        return x / n

    def project(self, x):
        """Normalize an embedding vector onto the chart."""
        x = np.asarray(x, dtype=float)
        n = np.linalg.norm(x)
        if n < 1e-12:
            raise DomainError("cannot project the zero vector onto the sphere")
        return x / n

    def distance(self, x, y):
        c = float(np.clip(np.dot(x, y), -1.0, 1.0))
        return self.radius * float(np.arccos(c))

    def _check_tangent(self, x, u):
        nu = np.linalg.norm(u)
        if nu > 0 and abs(np.dot(u, x)) > 1e-8 * (1.0 + nu):
            raise DomainError("sphere tangent vector must be orthogonal to the base point")

    def inner(self, x, u, v):
        self._check_tangent(x, u)
        self._check_tangent(x, v)
        return float(self.radius * self.radius * np.dot(u, v))

    def norm(self, x, u):
        self._check_tangent(x, u)
        return float(self.radius * np.linalg.norm(u))

    def raise_index(self, x, covec):
        covec = np.asarray(covec, dtype=float)
        tang = covec - np.dot(covec, x) * x
        return tang / (self.radius * self.radius)

    def _orthonormal_to(self, x):
        # deterministic unit vector orthogonal to x (used for antipodal pairs)
        k = int(np.argmin(np.abs(x)))
        e = np.zeros(self.ambient_dim)
        e[k] = 1.0
        w = e - np.dot(e, x) * x
        return w / np.linalg.norm(w)

    def geodesic(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        R = self.radius
        c = float(np.clip(np.dot(x, y), -1.0, 1.0))
        theta = float(np.arccos(c))
        length = R * theta
        if theta < 1e-14:
            zero = np.zeros(self.ambient_dim)
            return FiberGeodesic(0.0, lambda s: x.copy(), lambda s: zero.copy())
        w = y - c * x
        nw = np.linalg.norm(w)
        if nw < 1e-12:
            w = self._orthonormal_to(x)  # antipodal: any great circle is minimal
        else:
            w = w / nw

        def point(s):
            a = s / R
            return np.cos(a) * x + np.sin(a) * w

        def direction(s):
            a = s / R
            return (-np.sin(a) * x + np.cos(a) * w) / R

        return FiberGeodesic(length, point, direction)

    def random_direction(self, rng, x):
        v = rng.normal(size=self.ambient_dim)
        v = v - np.dot(v, x) * x
        n = np.linalg.norm(v)
        while n < 1e-12:
            v = rng.normal(size=self.ambient_dim)
            v = v - np.dot(v, x) * x
            n = np.linalg.norm(v)
        return v / n

    def to_json(self):
        return {"kind": "sphere", "dim": self.dim, "radius": self.radius}

    def __eq__(self, other):
        return (
            isinstance(other, SphereFiber)
            and other.dim == self.dim
            and other.radius == self.radius
        )


def fiber_from_json(data):
    kind = data.get("kind")
    if kind == "euclidean":
        return EuclideanFiber(data["dim"])
    if kind == "sphere":
        return SphereFiber(data["dim"], data.get("radius", 1.0))
    raise ValueError(f"unknown fiber kind: {kind!r}")
