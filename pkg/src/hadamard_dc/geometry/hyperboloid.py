"""Hyperboloid model of the curvature -kappa hyperbolic space.

Points live on the upper sheet { p in R^{n+1} : <p,p> = -1/kappa,
p_{n+1} > 0 } of the Lorentzian quadric, where <x,y> = x^T J y with
J = diag(1, ..., 1, -1).  Tangent vectors at p are Lorentz-orthogonal
to p; the Lorentzian form restricted to a tangent space is positive
definite, which makes all the usual metric machinery available.

Closed forms used here:

    d(p, q)      = arcosh(-kappa <p,q>) / sqrt(kappa)
    exp_q(v)     = cosh(sqrt(kappa)|v|) q + sinh(sqrt(kappa)|v|) v/(sqrt(kappa)|v|)
    log_q(p)     = d(q,p) * P / |P|,  P = p + kappa <q,p> q
    grad f(p)    = Proj_p(J f'(p)),   Proj_p x = x + kappa <p,x> p

and for a ray (q, v) with v != 0, writing w = kappa q + sqrt(kappa) v/|v|:

    B_{q,v}(p)       = ln(-<p, w>) / sqrt(kappa)
    grad B_{q,v}(p)  = Proj_p(w) / (sqrt(kappa) <p, w>)

The Busemann gradient has unit norm everywhere and equals -v/|v| at the
base point.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..errors import (NumericalDomainError, UndefinedGradientError,
                      ValidationError)
from .base import BusemannRay, Manifold

_EXP_ARG_GUARD = 350.0      # cosh overflows doubles near 710; stay well below
_LARGE_ARCOSH = 1e8
_TINY = float(np.finfo(float).tiny)


def arcosh(x):
    """arcosh via the logarithm, accurate near 1 and safe for huge x."""
    if x <= 1.0:
        return 0.0
    if x > _LARGE_ARCOSH:
        return math.log(2.0 * x)
    xm1 = x - 1.0
    return math.log1p(xm1 + math.sqrt(xm1 * (x + 1.0)))


def _ucoef(beta):
    """arcosh(beta)/sqrt(beta^2 - 1), the distance-over-chord coefficient.

    Smooth on [1, inf) with value 1 at beta = 1; the series branch avoids
    the 0/0 cancellation near coincident points.
    """
    x = beta - 1.0
    if x < 1e-7:
        return 1.0 - x / 3.0
    return arcosh(beta) / math.sqrt(beta * beta - 1.0)


def _ucoef_deriv(beta):
    """Derivative of _ucoef with respect to beta."""
    x = beta - 1.0
    if x < 1e-7:
        return -1.0 / 3.0
    return (1.0 - beta * _ucoef(beta)) / (beta * beta - 1.0)


class Hyperboloid(Manifold):
    """n-dimensional hyperbolic space of constant curvature -kappa."""

    oracle_mode_default = "difference"

    def __init__(self, n, curvature=1.0):
        super().__init__()
        if n < 1:
            raise ValidationError("hyperboloid: dimension must be >= 1")
        if curvature <= 0.0:
            raise ValidationError("hyperboloid: curvature parameter must be > 0")
        self.n = int(n)
        self.dim = self.n
        self.kappa = float(curvature)
        self.name = f"hyperbolic({n},{self.kappa:g})"

    # ------------------------------------------------------------------
    # Lorentzian algebra
    # ------------------------------------------------------------------

    def lorentz(self, x, y):
        """Lorentzian inner product x^T J y."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.n + 1,) or y.shape != (self.n + 1,):
            raise ValidationError(
                f"{self.name}: vectors must have length {self.n + 1}")
        return float(x @ y) - 2.0 * float(x[-1]) * float(y[-1])

    def project(self, p, x):
        """Lorentzian projection x + kappa <p,x> p onto the tangent space."""
        x = np.asarray(x, dtype=float)
        return x + self.kappa * self.lorentz(p, x) * p

    def apex(self):
        p = np.zeros(self.n + 1)
        p[-1] = 1.0 / math.sqrt(self.kappa)
        return p

    # ------------------------------------------------------------------
    # validation
    # ------------------------------------------------------------------

    def check_point(self, p):
        if self._seen_point(p):
            return p
        p = np.asarray(p, dtype=float)
        if p.shape != (self.n + 1,):
            raise ValidationError(
                f"{self.name}: point has shape {p.shape}, "
                f"expected ({self.n + 1},)")
        # check the quadric constraint on rescaled coordinates so that far
        # points (huge cosh factors) do not overflow the residual; the
        # negated comparisons also reject NaN coordinates
        s = max(1.0, float(np.max(np.abs(p))))
        ph = p / s
        residual = self.lorentz(ph, ph) + 1.0 / (self.kappa * s * s)
        if not (abs(residual) <= 1e-8 * (1.0 + float(ph @ ph))):
            raise ValidationError(
                f"{self.name}: point violates <p,p> = -1/kappa "
                f"(scaled residual {residual:.3g})")
        if not (p[-1] > 0.0):
            raise ValidationError(
                f"{self.name}: point must lie on the upper sheet "
                "(last coordinate > 0)")
        return self._remember_point(p)

    def check_tangent(self, p, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n + 1,):
            raise ValidationError(
                f"{self.name}: tangent has shape {v.shape}, "
                f"expected ({self.n + 1},)")
        pairing = self.lorentz(p, v)
        scale = 1.0 + math.sqrt(max(float(p @ p) * float(v @ v), 0.0))
        if not (abs(pairing) <= 1e-8 * scale):
            raise ValidationError(
                f"{self.name}: tangent violates <p,v> = 0 "
                f"(residual {pairing:.3g})")
        return v

    def _renormalize(self, p):
        # pull a drifted point back to <p,p> = -1/kappa; the quadratic form
        # carries cancellation noise of order eps * |p|^2, so renormalizing
        # is only a cleanup (not a distortion) near unit coordinate scale,
        # while the cosh/sinh combination is already relatively accurate
        if float(np.max(np.abs(p))) > 1e2:
            return p
        quad = self.lorentz(p, p)
        return p / math.sqrt(max(-self.kappa * quad, _TINY))

    # ------------------------------------------------------------------
    # metric, exponential, logarithm
    # ------------------------------------------------------------------

    def inner(self, p, u, v):
        p = self.check_point(p)
        u = self.check_tangent(p, u)
        v = self.check_tangent(p, v)
        return self.lorentz(u, v)

    def exp(self, p, v):
        p = self.check_point(p)
        v = self.check_tangent(p, v)
        nv = self.norm(p, v)
        arg = math.sqrt(self.kappa) * nv
        if arg > _EXP_ARG_GUARD:
            raise OverflowError(
                f"{self.name}: exponential map argument {arg:.3g} exceeds "
                f"the overflow guard {_EXP_ARG_GUARD:g}")
        if nv == 0.0:
            return p.copy()
        out = math.cosh(arg) * p + (math.sinh(arg) / arg) * v
        return self._renormalize(out)

    def log(self, q, p):
        q = self.check_point(q)
        p = self.check_point(p)
        # log_q p = d * P/|P| with P the projection of p; the ratio d/|P|
        # equals _ucoef(-kappa<q,p>), which stays finite as p -> q
        beta = max(-self.kappa * self.lorentz(q, p), 1.0)
        v = _ucoef(beta) * self.project(q, p)
        # clean rounding drift in the tangency constraint
        return self.project(q, v)

    def dist(self, p, q):
        p = self.check_point(p)
        q = self.check_point(q)
        arg = -self.kappa * self.lorentz(p, q)
        if arg < 1.0 + 1e-4:
            # near-coincident points: the pairing cancels catastrophically,
            # but <p-q, p-q> = 2(arg-1)/kappa is exact in the difference
            diff = p - q
            x = max(0.5 * self.kappa * self.lorentz(diff, diff), 0.0)
            return math.log1p(x + math.sqrt(x * (2.0 + x))) \
                / math.sqrt(self.kappa)
        if arg <= _LARGE_ARCOSH:
            return arcosh(arg) / math.sqrt(self.kappa)
        if math.isfinite(arg):
            return math.log(2.0 * arg) / math.sqrt(self.kappa)
        # far points overflow the raw pairing: rescale coordinates and
        # recover the arcosh in the log domain
        sp = max(1.0, float(np.max(np.abs(p))))
        sq = max(1.0, float(np.max(np.abs(q))))
        scaled = -self.kappa * self.lorentz(p / sp, q / sq)
        return (math.log(2.0 * scaled) + math.log(sp) + math.log(sq)) \
            / math.sqrt(self.kappa)

    # ------------------------------------------------------------------
    # gradients
    # ------------------------------------------------------------------

    def egrad_to_rgrad(self, p, egrad):
        """Riemannian gradient Proj_p(J g) from the Euclidean derivative g."""
        p = self.check_point(p)
        g = self._as_array(egrad, "euclidean gradient")
        if g.shape != (self.n + 1,):
            raise ValidationError(
                f"{self.name}: gradient has shape {g.shape}, "
                f"expected ({self.n + 1},)")
        jg = g.copy()
        jg[-1] = -jg[-1]
        return self.project(p, jg)

    def squared_dist_grad(self, p, z):
        """Gradient at p of d^2(p, z), equal to -2 log_p(z)."""
        return -2.0 * self.log(p, z)

    def dist_grad(self, p, z):
        """Gradient at p of d(p, z), for p != z."""
        d = self.dist(p, z)
        if d == 0.0:
            raise UndefinedGradientError(
                f"{self.name}: distance gradient undefined at its center")
        return self.squared_dist_grad(p, z) / (2.0 * d)

    def linear_model_grad(self, q, s, p):
        q = self.check_point(q)
        s = self.check_tangent(q, s)
        p = self.check_point(p)
        beta = max(-self.kappa * self.lorentz(q, p), 1.0)
        c = _ucoef(beta)
        dc = _ucoef_deriv(beta)
        w = self.lorentz(s, p)
        ambient = -self.kappa * dc * w * q + c * s
        return self.project(p, ambient)

    # ------------------------------------------------------------------
    # Busemann function
    # ------------------------------------------------------------------

    def _horo_center(self, q, v, nv):
        return self.kappa * q + (math.sqrt(self.kappa) / nv) * v

    def busemann(self, ray: BusemannRay, p):
        q = self.check_point(ray.base)
        v = self.check_tangent(q, ray.direction)
        p = self.check_point(p)
        nv = self.norm(q, v)
        if nv == 0.0:
            return self.dist(q, p)
        w = self._horo_center(q, v, nv)
        arg = -self.lorentz(p, w)
        if arg <= 0.0:
            slack = 1e-12 * (1.0 + float(np.linalg.norm(p)) *
                             float(np.linalg.norm(w)))
            if arg < -slack:
                raise NumericalDomainError(
                    f"{self.name}: Busemann log argument {arg:.3g} is "
                    "negative beyond rounding slack")
            warnings.warn(
                f"{self.name}: Busemann log argument {arg:.3g} clamped to "
                "the machine floor", RuntimeWarning)
            arg = _TINY
        return math.log(arg) / math.sqrt(self.kappa)

    def busemann_grad(self, ray: BusemannRay, p):
        q = self.check_point(ray.base)
        v = self.check_tangent(q, ray.direction)
        p = self.check_point(p)
        nv = self.norm(q, v)
        if nv == 0.0:
            return self._distance_gradient(q, p)
        w = self._horo_center(q, v, nv)
        denom = self.lorentz(p, w)
        grad = self.project(p, w) / (math.sqrt(self.kappa) * denom)
        return self.project(p, grad)

    # ------------------------------------------------------------------
    # sampling
    # ------------------------------------------------------------------

    def random_point(self, rng):
        """Exponential of a tangent at the apex with norm uniform in [0, 3]."""
        apex = self.apex()
        g = rng.standard_normal(self.n + 1)
        g[-1] = 0.0                     # tangent space at the apex
        ng = np.linalg.norm(g)
        if ng == 0.0:
            return apex
        radius = rng.uniform(0.0, 3.0)
        return self.exp(apex, (radius / ng) * g)

    def random_tangent(self, p, rng):
        p = self.check_point(p)
        v = self.project(p, rng.standard_normal(self.n + 1))
        return self.project(p, v)

    def coordinate_directions(self):
        return iter(np.eye(self.n + 1))

    def oracle_t_guard(self, q, unit_dir):
        return _EXP_ARG_GUARD / math.sqrt(self.kappa)
