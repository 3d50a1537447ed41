"""DC problem abstraction, subproblems, inner solver, and the outer loops."""

import numpy as np
import pytest

from hadamard_dc import (DCProblem, Euclidean, Hyperboloid, InnerConfig,
                         SolverConfig, StalledInnerSolveError,
                         complexity_bound_check, inner_solve,
                         make_b_subproblem, make_cr_subproblem, make_rng,
                         run_dca, scale_factor)
from hadamard_dc.problems import AcademicParams, academic_problem


def euclid_quadratic(n, c):
    """g = |p|^2, h = <c, p>; the classic one-step instance."""
    m = Euclidean(n)
    return DCProblem(
        manifold=m,
        g=lambda p: float(p @ p),
        h=lambda p: float(c @ p),
        h_subgrad=lambda p: c.copy(),
        g_rgrad=lambda p: 2.0 * p,
        sigma=0.0, phi_inf=None, name="euclid-quadratic")


def euclid_strongly_convex(z1, z2):
    """g = d^2(., z1), h = d^2(., z2)/2 with analytic infimum."""
    m = Euclidean(z1.size)
    pstar = 2 * z1 - z2
    phi_inf = (float((pstar - z1) @ (pstar - z1))
               - 0.5 * float((pstar - z2) @ (pstar - z2)))
    return DCProblem(
        manifold=m,
        g=lambda p: float((p - z1) @ (p - z1)),
        h=lambda p: 0.5 * float((p - z2) @ (p - z2)),
        h_subgrad=lambda p: p - z2,
        g_rgrad=lambda p: 2.0 * (p - z1),
        sigma=2.0, phi_inf=phi_inf, name="euclid-sc")


def test_scale_factor_values():
    m = Euclidean(2)
    # |grad phi(p0)| = 0 at the stationary point of phi
    prob = euclid_quadratic(2, np.array([2.0, 0.0]))
    assert scale_factor(prob, np.array([1.0, 0.0])) == pytest.approx(1.0)
    # |grad phi| = |2 p0 - c| = 3
    assert scale_factor(prob, np.array([2.5, 0.0])) == pytest.approx(0.25)


def test_cr_subproblem_euclidean():
    c = np.array([1.0, -2.0])
    prob = euclid_quadratic(2, c)
    rng = make_rng(0)
    p_k = rng.standard_normal(2)
    s_k = c
    obj = make_cr_subproblem(prob, p_k, s_k)
    p = rng.standard_normal(2)
    assert obj.value(p) == pytest.approx(float(p @ p) - float(s_k @ (p - p_k)),
                                         rel=1e-12)
    np.testing.assert_allclose(obj.grad(p), 2 * p - s_k, rtol=1e-12)
    assert obj.value(p_k) == pytest.approx(prob.g(p_k), rel=1e-12)


def test_b_subproblem_matches_cr_on_flat():
    c = np.array([0.5, 2.0, -1.0])
    prob = euclid_quadratic(3, c)
    rng = make_rng(1)
    p_k = rng.standard_normal(3)
    cr = make_cr_subproblem(prob, p_k, c)
    bd = make_b_subproblem(prob, p_k, c)
    for _ in range(10):
        p = rng.standard_normal(3)
        assert abs(cr.value(p) - bd.value(p)) <= 1e-12 * (1 + abs(cr.value(p)))
        assert np.linalg.norm(cr.grad(p) - bd.grad(p)) <= 1e-12


def test_b_subproblem_zero_subgradient_reduces_to_g():
    c = np.zeros(2)
    prob = euclid_quadratic(2, c)
    p_k = np.array([1.0, 1.0])
    obj = make_b_subproblem(prob, p_k, np.zeros(2))
    p = np.array([0.3, -0.7])
    assert obj.value(p) == prob.g(p)
    np.testing.assert_allclose(obj.grad(p), 2 * p)


def test_b_subproblem_value_at_base_and_convexity():
    m = Hyperboloid(2)
    rng = make_rng(2)
    z = m.random_point(rng)
    prob = DCProblem(
        manifold=m,
        g=lambda p: m.dist(p, z) ** 2,
        h=lambda p: 0.0,
        h_subgrad=lambda p: m.random_tangent(p, make_rng(99)),
        g_rgrad=lambda p: -2.0 * m.log(p, z),
        name="hyp-quadratic")
    p_k = m.random_point(rng)
    s_k = m.random_tangent(p_k, rng)
    obj = make_b_subproblem(prob, p_k, s_k)
    assert obj.value(p_k) == pytest.approx(prob.g(p_k), rel=1e-12)
    for _ in range(20):
        p1 = m.random_point(rng)
        p2 = m.random_point(rng)
        for t in (0.25, 0.5, 0.75):
            vt = obj.value(m.geodesic(p1, p2, t))
            assert vt <= (1 - t) * obj.value(p1) + t * obj.value(p2) + 1e-10


def test_inner_solve_quadratic():
    c = np.array([1.0, -3.0])
    prob = euclid_quadratic(2, c)
    p0 = np.array([5.0, 5.0])
    obj = make_cr_subproblem(prob, p0, c)
    cfg = InnerConfig()
    p, iters = inner_solve(obj, p0, cfg, 1e-8, prob.manifold)
    np.testing.assert_allclose(p, c / 2, atol=1e-7)
    assert iters > 0
    assert obj.value(p) <= obj.value(p0) + 1e-12
    # starting at the minimizer costs zero iterations
    p2, iters2 = inner_solve(obj, c / 2, cfg, 1e-8, prob.manifold)
    assert iters2 == 0
    np.testing.assert_array_equal(p2, c / 2)


def test_inner_solve_monotone_on_spd_subproblem():
    prob = academic_problem(AcademicParams(n=4))
    x0 = prob.metadata["fixed_start"]
    s = prob.h_subgrad(x0)
    obj = make_b_subproblem(prob, x0, s)
    p, iters = inner_solve(obj, x0, InnerConfig(), 1e-6, prob.manifold)
    assert obj.value(p) <= obj.value(x0) + 1e-12
    assert iters > 0


def test_inner_solve_stalls_on_ascent_gradient():
    m = Euclidean(2)
    # a deliberately wrong provider: the "gradient" points away from any
    # descent direction, so no step can satisfy the Armijo test
    from hadamard_dc.dc import SubproblemObjective
    bad = SubproblemObjective(value=lambda p: float(p @ p),
                              grad=lambda p: np.array([-10.0, 0.0]))
    with pytest.raises(StalledInnerSolveError) as err:
        inner_solve(bad, np.array([1.0, 0.0]), InnerConfig(), 1e-10, m)
    assert err.value.best_point is not None


def test_run_dca_one_step_fixed_point():
    c = np.array([2.0, -1.0, 0.5])
    prob = euclid_quadratic(3, c)
    rng = make_rng(3)
    for alg in ("cr_dca", "b_dca"):
        p0 = 5.0 * rng.standard_normal(3)
        trace = run_dca(prob, p0, SolverConfig(algorithm=alg))
        assert trace.k == 1
        np.testing.assert_allclose(trace.final.point, c / 2, atol=1e-6)
        assert trace.exit_reason == "grad"


def test_run_dca_critical_start():
    c = np.array([2.0, 0.0])
    prob = euclid_quadratic(2, c)
    trace = run_dca(prob, c / 2, SolverConfig(algorithm="b_dca"))
    assert trace.k == 0
    assert trace.exit_reason == "grad"
    assert len(trace.records) == 1


def test_flat_equivalence_of_algorithms():
    rng = make_rng(4)
    z1 = rng.standard_normal(3)
    z2 = rng.standard_normal(3)
    prob = euclid_strongly_convex(z1, z2)
    p0 = rng.standard_normal(3)
    tr_cr = run_dca(prob, p0, SolverConfig(algorithm="cr_dca"))
    tr_b = run_dca(prob, p0, SolverConfig(algorithm="b_dca"))
    assert tr_cr.k == tr_b.k
    for rc, rb in zip(tr_cr.records, tr_b.records):
        assert np.linalg.norm(np.asarray(rc.point) - np.asarray(rb.point)) \
            <= 1e-10


def test_descent_and_fval_monotone():
    rng = make_rng(5)
    z1 = rng.standard_normal(4)
    z2 = rng.standard_normal(4)
    prob = euclid_strongly_convex(z1, z2)
    trace = run_dca(prob, rng.standard_normal(4),
                    SolverConfig(algorithm="b_dca"))
    fvals = trace.fvals()
    sigma = prob.sigma
    steps = trace.step_dists()
    for i, d in enumerate(steps):
        assert fvals[i + 1] <= fvals[i] - 0.5 * sigma * d * d + 1e-9
    assert trace.exit_reason in ("grad", "step")
    assert trace.grad_norm <= trace.eps


def test_complexity_bound_check():
    rng = make_rng(6)
    z1 = rng.standard_normal(3)
    z2 = rng.standard_normal(3)
    prob = euclid_strongly_convex(z1, z2)
    trace = run_dca(prob, 4.0 * rng.standard_normal(3),
                    SolverConfig(algorithm="b_dca"))
    ok, witness = complexity_bound_check(trace, 2.0, prob.phi_inf)
    assert ok and witness is None
    # corrupting the first step distance produces a witness
    trace.records[0].step_dist = 1e6
    ok2, witness2 = complexity_bound_check(trace, 2.0, prob.phi_inf)
    assert not ok2
    assert witness2 == 0
    with pytest.raises(ValueError):
        complexity_bound_check(trace, 0.0, prob.phi_inf)
    with pytest.raises(ValueError):
        complexity_bound_check(trace, 2.0, None)


def test_stationarity_surrogate_at_step_exit():
    # when the run leaves via grad or confirmed step, the gradient surrogate
    # |grad g(p_k) - s_k| is within a small multiple of the tolerance
    prob = academic_problem(AcademicParams(n=4))
    x0 = prob.metadata["fixed_start"]
    for alg in ("cr_dca", "b_dca"):
        tr = run_dca(prob, x0, SolverConfig(algorithm=alg))
        assert tr.exit_reason in ("grad", "step")
        m = prob.manifold
        p = tr.final.point
        resid = m.norm(p, prob.g_rgrad(p) - prob.h_subgrad(p)) * tr.gamma
        assert resid <= 10.0 * tr.eps


def test_config_validation():
    with pytest.raises(ValueError):
        InnerConfig(armijo_c1=1.5)
    with pytest.raises(ValueError):
        InnerConfig(backtrack=0.0)
    with pytest.raises(ValueError):
        InnerConfig(initial_step="newton")
    with pytest.raises(ValueError):
        SolverConfig(eps_base=0.0)
    with pytest.raises(ValueError):
        SolverConfig(algorithm="gd")
    with pytest.raises(ValueError):
        inner_solve(None, None, InnerConfig(), 0.0, None)


def test_fixed_initial_step_rule():
    c = np.array([1.0, 1.0])
    prob = euclid_quadratic(2, c)
    cfg = SolverConfig(algorithm="cr_dca",
                       inner=InnerConfig(initial_step="fixed"))
    trace = run_dca(prob, np.array([3.0, 3.0]), cfg)
    np.testing.assert_allclose(trace.final.point, c / 2, atol=1e-6)


def test_phi_grad_requires_provider():
    prob = DCProblem(manifold=Euclidean(2), g=lambda p: 0.0,
                     h=lambda p: 0.0, h_subgrad=lambda p: np.zeros(2))
    with pytest.raises(ValueError):
        prob.phi_grad(np.zeros(2))


def test_fd_fallback_and_gradient_free_outer_loop(caplog):
    import logging
    c = np.array([1.0, -2.0])
    m = Euclidean(2)
    prob = DCProblem(
        manifold=m,
        g=lambda p: float(p @ p),
        h=lambda p: float(c @ p),
        h_subgrad=lambda p: c.copy(),
        name="gradient-free")
    with caplog.at_level(logging.WARNING, logger="hadamard_dc.dc"):
        obj = make_cr_subproblem(prob, np.zeros(2), c)
    assert not obj.analytic
    assert any("finite differences" in r.message for r in caplog.records)
    p = np.array([0.7, -0.4])
    np.testing.assert_allclose(obj.grad(p), 2 * p - c, atol=1e-5)
    # the outer loop runs without a gradient provider: gamma = 1 and the
    # step criterion alone stops the run
    trace = run_dca(prob, np.array([4.0, 4.0]),
                    SolverConfig(algorithm="b_dca"))
    assert trace.gamma == 1.0
    assert trace.exit_reason in ("step", "fixed_point")
    np.testing.assert_allclose(trace.final.point, c / 2, atol=1e-3)
