import math

import numpy as np
import pytest

from gsco import (
    ConfigError,
    ConstraintModel,
    InstanceSpec,
    LeastSquaresObjective,
    SolverConfig,
    backtracking_eta,
    compute_z,
    demyanov_rubinov_eta,
    generate_instance,
    lipschitz_constant,
    small_world_graph,
    solve,
    step,
)


class _ScalarObjective:
    """1-d duck-typed objective for line-search unit tests."""

    def __init__(self, fn):
        self.fn = fn

    def evaluate(self, x):
        return float(self.fn(float(x[0])))


class TestComputeZ:
    def test_fw_negates_gradient(self):
        np.testing.assert_array_equal(
            compute_z("fw", np.zeros(2), np.array([1.0, -2.0])), [-1.0, 2.0]
        )

    def test_accfw_substitution(self):
        z = compute_z("accfw", np.zeros(2), np.array([1.0, -2.0]), lipschitz=1.0, eta=1.0)
        np.testing.assert_array_equal(z, [1.0, -2.0])

    def test_accfw_zero_gradient_pulls_to_origin(self):
        x = np.array([3.0, -1.0])
        z = compute_z("accfw", x, np.zeros(2), lipschitz=2.0, eta=0.5)
        np.testing.assert_array_equal(z, -x)

    def test_accfw_requires_positive_eta(self):
        with pytest.raises(ConfigError):
            compute_z("accfw", np.zeros(2), np.zeros(2), lipschitz=1.0, eta=0.0)


class TestStep:
    def test_full_step_reaches_target(self):
        x, v = np.array([1.0, 2.0]), np.array([-3.0, 4.0])
        np.testing.assert_array_equal(step(x, v, 1.0, "I"), v)

    def test_zero_step_is_noop(self):
        x, v = np.array([1.0, 2.0]), np.array([-3.0, 4.0])
        np.testing.assert_array_equal(step(x, v, 0.0, "I"), x)

    def test_option_two_with_unit_delta_matches_option_one(self, rng):
        for _ in range(10):
            x = rng.normal(size=5)
            v = rng.normal(size=5)
            eta = float(rng.uniform(0, 1))
            np.testing.assert_array_equal(
                step(x, v, eta, "I"), step(x, v, eta, "II", delta=1.0)
            )

    def test_option_two_inflates_direction(self):
        x = np.zeros(2)
        v = np.array([1.0, 0.0])
        np.testing.assert_allclose(step(x, v, 1.0, "II", delta=0.5), [2.0, 0.0])


class TestBacktracking:
    def test_zero_direction_accepts_immediately(self):
        obj = _ScalarObjective(lambda u: 0.5 * u * u)
        x = np.array([1.0])
        eta, shrinks, floored = backtracking_eta(obj, x, x.copy(), 1.0, 0.5)
        assert (eta, shrinks, floored) == (1.0, 0, False)

    def test_quadratic_boundary_case_accepts_full_step(self):
        # f(u) = u^2/2, x=1, v=0: lhs f(0)=0, rhs f(1)-0.5*1*1=0, 0 > 0 false
        obj = _ScalarObjective(lambda u: 0.5 * u * u)
        eta, shrinks, _ = backtracking_eta(obj, np.array([1.0]), np.array([0.0]), 1.0, 0.5)
        assert eta == 1.0
        assert shrinks == 0

    def test_crafted_quartic_needs_two_shrinks(self):
        # f(u) = 4u^4 - 3.25u^2 + 1.25, x=1, v=-1 (probe 1-2*eta, ||x-v||^2=4):
        #   eta=1:    f(-1)=2      > f(1) - 2   = 0    -> shrink
        #   eta=0.5:  f(0)=1.25    > f(1) - 1   = 1    -> shrink
        #   eta=0.25: f(0.5)=0.6875 <= f(1) - 0.5 = 1.5 -> accept
        obj = _ScalarObjective(lambda u: 4.0 * u ** 4 - 3.25 * u ** 2 + 1.25)
        eta, shrinks, floored = backtracking_eta(
            obj, np.array([1.0]), np.array([-1.0]), 1.0, 0.5
        )
        assert eta == 0.25
        assert shrinks == 2
        assert not floored

    def test_floor_flagged_when_never_satisfied(self):
        # increasing along the step direction for every eta > 0
        obj = _ScalarObjective(lambda u: -u)
        eta, shrinks, floored = backtracking_eta(
            obj, np.array([1.0]), np.array([0.0]), 1.0, 0.5
        )
        assert floored
        assert eta == 1e-12
        assert shrinks > 30


class TestDemyanovRubinov:
    def test_zero_displacement(self):
        x = np.array([1.0, 2.0])
        assert demyanov_rubinov_eta(np.array([1.0, 1.0]), x, x.copy(), 1.0) == 0.0

    def test_clamp_boundary(self):
        # <-grad, v - x> = L ||v - x||^2 exactly
        grad = np.array([-2.0])
        x = np.array([0.0])
        v = np.array([2.0])
        assert demyanov_rubinov_eta(grad, v, x, 1.0) == 1.0

    def test_hand_quadratic(self):
        # f(u)=u^2/2 at x=1 (grad 1), v=-1, L=1: min{2/4, 1} = 0.5
        assert demyanov_rubinov_eta(np.array([1.0]), np.array([-1.0]), np.array([1.0]), 1.0) == 0.5

    def test_negative_clamped_to_zero(self):
        assert demyanov_rubinov_eta(np.array([1.0]), np.array([2.0]), np.array([0.0]), 1.0) == 0.0


def _fixture(seed=0, d=16, n=8, s=5, g=2, sigma=0.01):
    graph = small_world_graph(d, int(1.5 * d), seed=seed)
    model = ConstraintModel.g_subgraph(graph, s=s, g=g, radius=1.0)
    spec = InstanceSpec(dim=d, n_obs=n, sigma=sigma, model=model, seed=seed)
    obj, x_star = generate_instance(spec)
    return obj, model, x_star


def _cardinality_fixture(seed=0, d=12, n=8, s=3, sigma=0.01):
    model = ConstraintModel.cardinality(dim=d, s=s, radius=1.0)
    spec = InstanceSpec(dim=d, n_obs=n, sigma=sigma, model=model, seed=seed)
    obj, x_star = generate_instance(spec)
    return obj, model, x_star


def _plain_top_s_fw_reference(obj, s, radius, iters):
    """Independently coded standard conditional gradient with a top-s oracle.

    Used as the bitwise trajectory oracle for the exact oracle at delta=1.
    """
    d = obj.dim
    x = np.zeros(d)
    states = [x.copy()]
    for t in range(iters):
        grad = obj.gradient(x)
        order = np.lexsort((np.arange(d), -np.abs(grad)))
        sup = sorted(int(i) for i in order[:s] if grad[i] != 0.0)
        v = np.zeros(d)
        nrm = np.linalg.norm(grad[sup])
        v[sup] = -radius * grad[sup] / nrm
        eta = 2.0 / (t + 2.0)
        x = x + eta * (v - x)
        states.append(x.copy())
    return states


class TestSolve:
    def test_best_objective_is_min_over_trace(self):
        obj, model, _ = _fixture()
        cfg = SolverConfig(dmo="topg", max_iters=60, rel_tol=0.0)
        _, f_best, trace = solve(cfg, obj, model)
        assert f_best == min(r.objective for r in trace.records)
        assert f_best <= trace.records[0].objective

    def test_best_so_far_nonincreasing(self):
        obj, model, _ = _fixture()
        cfg = SolverConfig(dmo="topg", max_iters=60, rel_tol=0.0)
        _, _, trace = solve(cfg, obj, model)
        running = np.minimum.accumulate([r.objective for r in trace.records])
        assert all(b <= a + 1e-18 for a, b in zip(running, running[1:]))

    def test_open_loop_schedule(self):
        obj, model, _ = _fixture()
        cfg = SolverConfig(dmo="topg", max_iters=40, rel_tol=0.0)
        _, _, trace = solve(cfg, obj, model)
        steps = trace.records[:-1]
        assert steps[0].eta == 1.0
        for r in steps:
            assert r.eta == 2.0 / (r.t + 2.0)
        etas = [r.eta for r in steps]
        assert all(b < a for a, b in zip(etas, etas[1:]))

    def test_converged_termination(self):
        obj, model, _ = _fixture(n=16)
        cfg = SolverConfig(dmo="topg", max_iters=5000, rel_tol=1e-6)
        _, _, trace = solve(cfg, obj, model)
        assert trace.termination == "converged"
        steps = trace.records
        f_prev, f_last = steps[-2].objective, steps[-1].objective
        assert abs(f_last - f_prev) / abs(f_prev) <= 1e-6

    def test_deterministic_runs(self):
        obj, model, _ = _fixture()
        cfg = SolverConfig(dmo="topg_optimal", theta=4, dmo_seed=9, max_iters=50, rel_tol=0.0)
        xa, fa, ta = solve(cfg, obj, model)
        xb, fb, tb = solve(cfg, obj, model)
        np.testing.assert_array_equal(xa, xb)
        assert fa == fb
        for ra, rb in zip(ta.records, tb.records):
            assert (ra.t, ra.eta, ra.objective, ra.captured_norm, ra.support_size, ra.shrinks) == (
                rb.t, rb.eta, rb.objective, rb.captured_norm, rb.support_size, rb.shrinks
            )

    def test_matches_plain_fw_reference_bitwise(self):
        obj, model, _ = _cardinality_fixture()
        seen = []
        cfg = SolverConfig(dmo="exact", delta=1.0, max_iters=100, rel_tol=0.0)
        solve(cfg, obj, model, callback=lambda info: seen.append(info["x_next"].copy()))
        ref = _plain_top_s_fw_reference(obj, model.s, model.radius, 100)
        assert len(seen) == 100
        for ours, theirs in zip(seen, ref[1:]):
            np.testing.assert_array_equal(ours, theirs)

    def test_option_one_stays_in_ball(self):
        obj, model, _ = _fixture()
        norms = []
        cfg = SolverConfig(dmo="topg", max_iters=80, rel_tol=0.0)
        solve(cfg, obj, model, callback=lambda info: norms.append(np.linalg.norm(info["x_next"])))
        assert all(nrm <= model.radius + 1e-9 for nrm in norms)

    def test_directions_are_feasible(self):
        obj, model, _ = _fixture()
        supports = []
        cfg = SolverConfig(dmo="topg", max_iters=40, rel_tol=0.0)
        solve(cfg, obj, model, callback=lambda info: supports.append(info["support"]))
        for sup in supports:
            assert model.is_member(sup)

    def test_stationary_at_exact_fit(self):
        # y = 0 and x0 = 0 give a zero gradient and nothing to capture
        obj = LeastSquaresObjective(np.eye(3), np.zeros(3))
        model = ConstraintModel.cardinality(dim=3, s=2, radius=1.0)
        cfg = SolverConfig(dmo="exact", max_iters=10)
        _, f_best, trace = solve(cfg, obj, model)
        assert trace.termination == "converged"  # f(x0) = 0 stops immediately
        assert f_best == 0.0

    def test_stationary_reason_for_zero_dual_vector(self):
        # nonzero objective but zero gradient: A has a zero column reached
        a = np.array([[1.0, 0.0], [0.0, 0.0]])
        obj = LeastSquaresObjective(a, np.array([0.0, 1.0]))
        model = ConstraintModel.cardinality(dim=2, s=1, radius=1.0)
        cfg = SolverConfig(dmo="exact", max_iters=10)
        x0 = np.array([0.0, 0.0])
        _, _, trace = solve(cfg, obj, model, x0=x0)
        assert trace.termination == "stationary"

    def test_accfw_runs_and_returns_finite(self):
        obj, model, _ = _fixture()
        lam = lipschitz_constant(obj, tol=1e-9)
        cfg = SolverConfig(variant="accfw", lipschitz=lam, dmo="topg", max_iters=60, rel_tol=0.0)
        _, f_best, trace = solve(cfg, obj, model)
        assert math.isfinite(f_best)
        assert f_best <= trace.records[0].objective

    def test_accfw_rejects_adaptive_step_rules(self):
        obj, model, _ = _fixture()
        for rule in ("backtracking", "demyanov_rubinov"):
            cfg = SolverConfig(variant="accfw", lipschitz=1.0, step_rule=rule, dmo="topg")
            with pytest.raises(ConfigError):
                solve(cfg, obj, model)

    def test_topg_requires_graph_model(self):
        obj, model, _ = _cardinality_fixture()
        with pytest.raises(ConfigError):
            solve(SolverConfig(dmo="topg"), obj, model)

    def test_backtracking_steps_satisfy_inequality(self):
        obj, model, _ = _fixture()
        audit = []
        cfg = SolverConfig(dmo="topg", step_rule="backtracking", max_iters=60, rel_tol=0.0)
        solve(
            cfg,
            obj,
            model,
            callback=lambda info: audit.append(
                (info["x"].copy(), info["v"].copy(), info["eta"], info["floored"])
            ),
        )
        for x, v, eta, floored in audit:
            if floored:
                continue
            d = x - v
            lhs = obj.evaluate(x - eta * d)
            rhs = obj.evaluate(x) - 0.5 * eta * float(d @ d)
            assert lhs <= rhs

    def test_backtracking_etas_nonincreasing(self):
        obj, model, _ = _fixture()
        cfg = SolverConfig(dmo="topg", step_rule="backtracking", max_iters=60, rel_tol=0.0)
        _, _, trace = solve(cfg, obj, model)
        etas = [r.eta for r in trace.records[:-1]]
        assert all(b <= a for a, b in zip(etas, etas[1:]))

    def test_demyanov_rubinov_runs(self):
        obj, model, _ = _fixture()
        lam = lipschitz_constant(obj, tol=1e-9)
        cfg = SolverConfig(
            dmo="topg", step_rule="demyanov_rubinov", lipschitz=lam, max_iters=80, rel_tol=0.0
        )
        _, f_best, trace = solve(cfg, obj, model)
        assert f_best <= trace.records[0].objective
        for r in trace.records[:-1]:
            assert 0.0 <= r.eta <= 1.0

    def test_exact_line_search_oracle_dominates_step_rules(self):
        # closed-form least-squares line search along v - x upper-bounds
        # what any step rule can achieve in a single iteration
        obj, model, _ = _fixture()
        lam = lipschitz_constant(obj, tol=1e-9)
        for rule, kwargs in (
            ("open_loop", {}),
            ("backtracking", {}),
            ("demyanov_rubinov", {"lipschitz": lam}),
        ):
            audit = []
            cfg = SolverConfig(dmo="topg", step_rule=rule, max_iters=25, rel_tol=0.0, **kwargs)
            solve(
                cfg,
                obj,
                model,
                callback=lambda info: audit.append(
                    (info["x"].copy(), info["v"].copy(), info["eta"])
                ),
            )
            for x, v, eta in audit:
                d_vec = v - x
                denom = float(np.linalg.norm(obj.a_mat @ d_vec) ** 2)
                if denom == 0.0:
                    continue
                eta_star = min(max(float(-obj.gradient(x) @ d_vec) / denom, 0.0), 1.0)
                f_star = obj.evaluate(x + eta_star * d_vec)
                f_rule = obj.evaluate(x + eta * d_vec)
                assert f_star <= f_rule + 1e-12

    def test_option_two_records_norms_beyond_ball(self):
        obj, model, _ = _fixture()
        cfg = SolverConfig(dmo="topg", option="II", max_iters=40, rel_tol=0.0)
        _, _, trace = solve(cfg, obj, model)
        # delta < 1 for this oracle, so iterates may exceed the radius;
        # the trace records their norms rather than projecting them back
        assert max(r.x_norm for r in trace.records) > 0.0

    def test_trace_csv_round_trip(self, tmp_path):
        obj, model, _ = _fixture()
        cfg = SolverConfig(dmo="topg", max_iters=20, rel_tol=0.0)
        _, _, trace = solve(cfg, obj, model)
        path = tmp_path / "trace.csv"
        trace.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,eta,objective,captured_norm,support_size,shrinks,wall_ns"
        assert len(lines) == len(trace.records) + 1
        summary = trace.summary_dict({"method": "dmo_fw"})
        assert set(summary) == {"best_t", "best_objective", "termination", "config"}
