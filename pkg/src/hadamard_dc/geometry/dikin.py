"""Positive orthant with the Dikin metric, a flat Hadamard geometry.

The metric at q is G(q) = diag(q_i^-2).  Exponential, logarithm and
distance are coordinatewise:

    exp_q(v)_i = q_i * e^{v_i/q_i}
    log_q(p)_i = q_i * ln(p_i/q_i)
    d(p, q)    = sqrt(sum_i ln^2(p_i/q_i))

The curvature is identically zero, so the Busemann function of a ray
(q, v) equals -<v, log_q p> / |v|_q exactly.
"""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from .base import BusemannRay, Manifold

_EXPONENT_GUARD = 690.0     # e^690 is near the double-precision ceiling


class DikinOrthant(Manifold):

    def __init__(self, n):
        super().__init__()
        if n < 1:
            raise ValidationError("dikin: dimension must be >= 1")
        self.n = int(n)
        self.dim = self.n
        self.name = f"dikin({n})"

    def check_point(self, p):
        if self._seen_point(p):
            return p
        p = self._as_array(p, "point")
        if p.shape != (self.n,):
            raise ValidationError(
                f"{self.name}: point has shape {p.shape}, expected ({self.n},)")
        if np.any(p <= 0.0):
            raise ValidationError(
                f"{self.name}: point must have strictly positive coordinates")
        return self._remember_point(p)

    def check_tangent(self, p, v):
        v = self._as_array(v, "tangent")
        if v.shape != (self.n,):
            raise ValidationError(
                f"{self.name}: tangent has shape {v.shape}, expected ({self.n},)")
        return v

    def inner(self, p, u, v):
        p = self.check_point(p)
        u = self.check_tangent(p, u)
        v = self.check_tangent(p, v)
        return float(np.sum(u * v / p**2))

    def exp(self, p, v):
        p = self.check_point(p)
        v = self.check_tangent(p, v)
        expo = v / p
        if np.max(np.abs(expo)) > _EXPONENT_GUARD:
            raise OverflowError(
                f"{self.name}: exponential map overflows, max |v_i/q_i| = "
                f"{np.max(np.abs(expo)):.3g}")
        return p * np.exp(expo)

    def log(self, p, q):
        p = self.check_point(p)
        q = self.check_point(q)
        return p * np.log(q / p)

    def dist(self, p, q):
        p = self.check_point(p)
        q = self.check_point(q)
        return float(np.linalg.norm(np.log(q / p)))

    def project(self, p, x):
        return np.asarray(x, dtype=float)

    def busemann(self, ray: BusemannRay, p):
        q = self.check_point(ray.base)
        v = self.check_tangent(q, ray.direction)
        p = self.check_point(p)
        nv = self.norm(q, v)
        if nv == 0.0:
            return self.dist(q, p)
        return float(-np.sum((v / q) * np.log(p / q)) / nv)

    def busemann_grad(self, ray: BusemannRay, p):
        q = self.check_point(ray.base)
        v = self.check_tangent(q, ray.direction)
        p = self.check_point(p)
        nv = self.norm(q, v)
        if nv == 0.0:
            return self._distance_gradient(q, p)
        # Euclidean derivative -(v_i/q_i)/p_i pushed through G(p)^{-1}
        return -(v / q) * p / nv

    def egrad_to_rgrad(self, p, egrad):
        p = self.check_point(p)
        return np.asarray(egrad, dtype=float) * p**2

    def linear_model_grad(self, q, s, p):
        q = self.check_point(q)
        s = self.check_tangent(q, s)
        p = self.check_point(p)
        return (s / q) * p

    def random_point(self, rng):
        return np.exp(rng.standard_normal(self.n))

    def random_tangent(self, p, rng):
        p = self.check_point(p)
        return p * rng.standard_normal(self.n)

    def coordinate_directions(self):
        return iter(np.eye(self.n))

    def oracle_t_guard(self, q, unit_dir):
        q = self.check_point(q)
        rate = np.max(np.abs(unit_dir / q))
        if rate == 0.0:
            return 1e12
        return _EXPONENT_GUARD / rate
