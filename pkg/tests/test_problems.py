"""Benchmark problem families: construction, gradients, optima metadata."""

import math

import numpy as np
import pytest

from hadamard_dc import (AcademicParams, ContrastiveParams, RosenbrockParams,
                         SolverConfig, ValidationError, academic_problem,
                         contrastive_problem, fd_riemannian_grad, make_rng,
                         make_b_subproblem, make_cr_subproblem,
                         random_start, rosenbrock_problem, run_dca)
from hadamard_dc.geometry import logdet, sym
from helpers import rel_err


# ----------------------------------------------------------------------
# hyperbolic Rosenbrock
# ----------------------------------------------------------------------

def test_rosenbrock_reference_points():
    prob = rosenbrock_problem(RosenbrockParams(tangency="internal", a=1.0,
                                               theta=1.0))
    s1 = math.sinh(1.0)
    c1 = math.cosh(1.0)
    np.testing.assert_allclose(prob.metadata["pbar"], [s1, 0.0, c1])
    # a = 1 makes the two internal reference points coincide
    np.testing.assert_allclose(prob.metadata["qbar"], [s1, 0.0, c1])
    assert prob.metadata["degenerate"]
    assert "sphere" in prob.metadata["minimizer_set"]

    ext = rosenbrock_problem(RosenbrockParams(tangency="external", a=1.0,
                                              b=2.0))
    np.testing.assert_allclose(ext.metadata["qbar"], [-s1, 0.0, c1])
    pstar = ext.metadata["minimizer"]
    np.testing.assert_allclose(pstar, [0.0, 0.0, 1.0], atol=1e-12)
    m = ext.manifold
    assert m.dist(pstar, ext.metadata["pbar"]) == pytest.approx(1.0)
    assert m.dist(pstar, ext.metadata["qbar"]) == pytest.approx(1.0)
    assert ext.metadata["f"](pstar) == pytest.approx(0.0, abs=1e-12)


def test_rosenbrock_radii_condition_error():
    m_probe = rosenbrock_problem(RosenbrockParams(tangency="external"))
    far = m_probe.manifold.exp(m_probe.metadata["pbar"],
                               4.0 * m_probe.manifold.log(
                                   m_probe.metadata["pbar"],
                                   m_probe.metadata["qbar"]))
    with pytest.raises(ValidationError):
        rosenbrock_problem(RosenbrockParams(tangency="external", qbar=far))


def test_rosenbrock_param_validation():
    with pytest.raises(ValidationError):
        RosenbrockParams(a=-1.0)
    with pytest.raises(ValidationError):
        RosenbrockParams(theta=0.5)
    with pytest.raises(ValidationError):
        RosenbrockParams(tangency="osculating")


def test_rosenbrock_f_nonnegative_and_consistent():
    prob = rosenbrock_problem(RosenbrockParams(tangency="internal"))
    f = prob.metadata["f"]
    rng = make_rng(0)
    for _ in range(50):
        p = prob.manifold.random_point(rng)
        assert f(p) >= 0.0
        assert f(p) == pytest.approx(prob.g(p) - prob.h(p),
                                     rel=1e-10, abs=1e-9)


@pytest.mark.parametrize("tangency,b", [("internal", 100.0),
                                        ("external", 2.0)])
def test_rosenbrock_gradients_match_fd(tangency, b):
    prob = rosenbrock_problem(RosenbrockParams(tangency=tangency, b=b))
    m = prob.manifold
    rng = make_rng(1)
    for _ in range(5):
        p = m.random_point(rng)
        for fn, grad in ((prob.g, prob.g_rgrad), (prob.h, prob.h_subgrad)):
            want = fd_riemannian_grad(m, fn, p)
            assert rel_err(grad(p), want) < 1e-5


def test_rosenbrock_theta_two_gradients():
    prob = rosenbrock_problem(RosenbrockParams(tangency="external", b=2.0,
                                               theta=2.0))
    m = prob.manifold
    rng = make_rng(2)
    p = m.random_point(rng)
    for fn, grad in ((prob.g, prob.g_rgrad), (prob.h, prob.h_subgrad)):
        assert rel_err(grad(p), fd_riemannian_grad(m, fn, p)) < 1e-5


def test_rosenbrock_minimizer_certificate():
    prob = rosenbrock_problem(RosenbrockParams(tangency="internal", b=100.0))
    m = prob.manifold
    f = prob.metadata["f"]
    tr = run_dca(prob, random_start(prob, make_rng(3)),
                 SolverConfig(algorithm="b_dca"))
    p = tr.final.point
    assert f(p) <= 1e-6
    assert abs(m.dist(p, prob.metadata["pbar"]) - 1.0) <= 1e-3
    assert abs(m.dist(p, prob.metadata["qbar"]) - 1.0) <= 1e-3


# ----------------------------------------------------------------------
# SPD academic
# ----------------------------------------------------------------------

def test_academic_fixed_start_and_values():
    prob = academic_problem(AcademicParams(n=4))
    x0 = prob.metadata["fixed_start"]
    want = math.log(4.0) * np.eye(4)
    want[0, -1] += 1.0
    want[-1, 0] += 1.0
    np.testing.assert_array_equal(x0, want)
    rng = make_rng(4)
    np.testing.assert_array_equal(random_start(prob, rng), x0)

    n = 4
    xstar = math.exp(1.0 / (math.sqrt(2.0) * n)) * np.eye(n)
    assert prob.phi(xstar) == pytest.approx(-0.25, abs=1e-12)
    assert prob.phi(np.eye(n)) == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(prob.h_subgrad(np.eye(n)), np.zeros((n, n)),
                               atol=1e-12)


def test_academic_gradients_and_invariance():
    prob = academic_problem(AcademicParams(n=4))
    m = prob.manifold
    x0 = prob.metadata["fixed_start"]
    assert rel_err(prob.h_subgrad(x0),
                   fd_riemannian_grad(m, prob.h, x0)) < 1e-5
    assert rel_err(prob.g_rgrad(x0),
                   fd_riemannian_grad(m, prob.g, x0)) < 1e-5
    rng = make_rng(5)
    for _ in range(10):
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        x = m.random_point(rng)
        assert prob.phi(sym(q @ x @ q.T)) == pytest.approx(
            prob.phi(x), rel=1e-10, abs=1e-10)
    with pytest.raises(ValidationError):
        AcademicParams(n=1)


def test_academic_cr_subproblem_closed_form():
    prob = academic_problem(AcademicParams(n=4))
    m = prob.manifold
    rng = make_rng(6)
    x_k = m.random_point(rng)
    s_k = prob.h_subgrad(x_k)
    obj = make_cr_subproblem(prob, x_k, s_k)
    ld_k = logdet(x_k)
    for _ in range(5):
        x = m.random_point(rng)
        want_val = logdet(x) ** 4 - 2.0 * ld_k * (logdet(x) - ld_k)
        assert obj.value(x) == pytest.approx(want_val, rel=1e-10)
        want_grad = (4.0 * logdet(x) ** 3 - 2.0 * ld_k) * x
        assert rel_err(obj.grad(x), want_grad) < 1e-12
        assert rel_err(obj.grad(x),
                       fd_riemannian_grad(m, obj.value, x)) < 1e-5


# ----------------------------------------------------------------------
# SPD contrastive
# ----------------------------------------------------------------------

def test_contrastive_validation():
    with pytest.raises(ValidationError):
        ContrastiveParams(m=0)
    with pytest.raises(ValidationError):
        ContrastiveParams(r=-1)
    with pytest.raises(ValidationError):
        contrastive_problem(ContrastiveParams(n=3, m=2, r=0,
                                              pos_weights=(1.0, -1.0)),
                            make_rng(0))


def test_contrastive_single_positive_minimizer():
    rng = make_rng(7)
    prob = contrastive_problem(ContrastiveParams(n=3, m=1, r=0), rng)
    xbar = prob.metadata["positives"][0]
    np.testing.assert_array_equal(prob.metadata["minimizer"], xbar)
    assert prob.phi(xbar) == pytest.approx(0.0, abs=1e-12)
    assert prob.manifold.norm(xbar, prob.g_rgrad(xbar)) <= 1e-9
    tr = run_dca(prob, random_start(prob, rng),
                 SolverConfig(algorithm="b_dca"))
    assert prob.manifold.dist(tr.final.point, xbar) <= 1e-3


def test_contrastive_commuting_midpoint():
    m_dim = 3
    rng = make_rng(8)
    a = np.exp(rng.uniform(-1.0, 1.0, m_dim))
    b = np.exp(rng.uniform(-1.0, 1.0, m_dim))
    prob = contrastive_problem(
        ContrastiveParams(n=m_dim, m=2, r=0), rng,
        positives=[np.diag(a), np.diag(b)], negatives=[])
    xstar = np.diag(np.sqrt(a * b))
    assert prob.manifold.norm(xstar, prob.g_rgrad(xstar)) <= 1e-10
    tr = run_dca(prob, random_start(prob, rng),
                 SolverConfig(algorithm="cr_dca"))
    assert prob.manifold.dist(tr.final.point, xstar) <= 1e-3


def test_contrastive_gradients_match_fd():
    rng = make_rng(9)
    prob = contrastive_problem(ContrastiveParams(n=3, m=2, r=2), rng)
    m = prob.manifold
    for _ in range(5):
        x = m.random_point(rng)
        assert rel_err(prob.g_rgrad(x),
                       fd_riemannian_grad(m, prob.g, x)) < 1e-5
        assert rel_err(prob.h_subgrad(x),
                       fd_riemannian_grad(m, prob.h, x)) < 1e-5


def test_contrastive_convexity_of_components():
    rng = make_rng(10)
    prob = contrastive_problem(ContrastiveParams(n=3, m=3, r=2), rng)
    m = prob.manifold
    for fn in (prob.g, prob.h):
        for _ in range(20):
            p1 = m.random_point(rng)
            p2 = m.random_point(rng)
            mid = m.geodesic(p1, p2, 0.5)
            assert fn(mid) <= 0.5 * fn(p1) + 0.5 * fn(p2) + 1e-10


def test_contrastive_determinism_and_validity():
    p1 = contrastive_problem(ContrastiveParams(n=4, m=3, r=2), make_rng(11))
    p2 = contrastive_problem(ContrastiveParams(n=4, m=3, r=2), make_rng(11))
    for a, b in zip(p1.metadata["positives"], p2.metadata["positives"]):
        np.testing.assert_array_equal(a, b)
    m = p1.manifold
    rng = make_rng(12)
    for _ in range(1000):
        m.check_point(random_start(p1, rng))


def test_hyperbolic_random_start_determinism():
    prob = rosenbrock_problem(RosenbrockParams())
    a = random_start(prob, make_rng(7))
    b = random_start(prob, make_rng(7))
    np.testing.assert_array_equal(a, b)


# ----------------------------------------------------------------------
# subproblem gradient sweep over all families
# ----------------------------------------------------------------------

@pytest.mark.parametrize("factory", [
    lambda rng: rosenbrock_problem(RosenbrockParams(tangency="external",
                                                    b=2.0)),
    lambda rng: academic_problem(AcademicParams(n=3)),
    lambda rng: contrastive_problem(ContrastiveParams(n=3, m=2, r=1), rng),
])
def test_subproblem_gradients_match_fd(factory):
    rng = make_rng(13)
    prob = factory(rng)
    m = prob.manifold
    for _ in range(5):
        p_k = m.random_point(rng)
        s_k = prob.h_subgrad(p_k)
        p = m.random_point(rng)
        for make in (make_cr_subproblem, make_b_subproblem):
            obj = make(prob, p_k, s_k)
            assert obj.analytic
            assert rel_err(obj.grad(p),
                           fd_riemannian_grad(m, obj.value, p)) < 1e-5


def test_rosenbrock_subgradient_selection_at_reference(caplog):
    import logging
    prob = rosenbrock_problem(RosenbrockParams(tangency="external", b=2.0))
    pbar = prob.metadata["pbar"]
    with caplog.at_level(logging.WARNING, logger="hadamard_dc.problems"):
        s = prob.h_subgrad(pbar)
    assert np.all(np.isfinite(s))
    assert any("zero subgradient" in r.message for r in caplog.records)
