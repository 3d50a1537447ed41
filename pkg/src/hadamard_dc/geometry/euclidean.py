"""Flat Euclidean geometry on R^n."""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from .base import BusemannRay, Manifold


class Euclidean(Manifold):
    """R^n with the standard inner product.

    The Busemann function of a ray (q, v) is the affine map
    -<v/|v|, p - q>; for v = 0 it is the distance to q.
    """

    def __init__(self, n):
        super().__init__()
        if n < 1:
            raise ValidationError("euclidean: dimension must be >= 1")
        self.n = int(n)
        self.dim = self.n
        self.name = f"euclidean({n})"

    def check_point(self, p):
        if self._seen_point(p):
            return p
        p = self._as_array(p, "point")
        if p.shape != (self.n,):
            raise ValidationError(
                f"{self.name}: point has shape {p.shape}, expected ({self.n},)")
        return self._remember_point(p)

    def check_tangent(self, p, v):
        v = self._as_array(v, "tangent")
        if v.shape != (self.n,):
            raise ValidationError(
                f"{self.name}: tangent has shape {v.shape}, expected ({self.n},)")
        return v

    def inner(self, p, u, v):
        self.check_point(p)
        u = self.check_tangent(p, u)
        v = self.check_tangent(p, v)
        return float(u @ v)

    def exp(self, p, v):
        p = self.check_point(p)
        v = self.check_tangent(p, v)
        return p + v

    def log(self, p, q):
        p = self.check_point(p)
        q = self.check_point(q)
        return q - p

    def dist(self, p, q):
        p = self.check_point(p)
        q = self.check_point(q)
        return float(np.linalg.norm(q - p))

    def project(self, p, x):
        return np.asarray(x, dtype=float)

    def busemann(self, ray: BusemannRay, p):
        q = self.check_point(ray.base)
        v = self.check_tangent(q, ray.direction)
        p = self.check_point(p)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return self.dist(q, p)
        return float(-(v / nv) @ (p - q))

    def busemann_grad(self, ray: BusemannRay, p):
        q = self.check_point(ray.base)
        v = self.check_tangent(q, ray.direction)
        p = self.check_point(p)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return self._distance_gradient(q, p)
        return -v / nv

    def egrad_to_rgrad(self, p, egrad):
        self.check_point(p)
        return np.asarray(egrad, dtype=float)

    def linear_model_grad(self, q, s, p):
        self.check_point(q)
        s = self.check_tangent(q, s)
        self.check_point(p)
        return s.copy()

    def random_point(self, rng):
        return rng.standard_normal(self.n)

    def random_tangent(self, p, rng):
        self.check_point(p)
        return rng.standard_normal(self.n)

    def coordinate_directions(self):
        return iter(np.eye(self.n))
