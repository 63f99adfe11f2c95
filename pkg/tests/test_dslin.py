import math

import numpy as np
import pytest

from densebandits.graph import Graph
from densebandits.dslin import (
    ArmFamily,
    DsLinParams,
    check_stop,
    confidence_radius,
    default_weight_norm_bound,
    estimate,
    generate_arm_family,
    init_state,
    make_arm_family,
    qp_upper_bound,
    run_dslin,
    select_arm,
    update,
)
from densebandits.oracle import make_oracle


def scalar_state(lam=1.0, R=1.0, L=1.0, delta=0.1):
    """m=1 design on a single-edge graph; the family bypasses validation
    (a legitimate family needs arms of at least 3 vertices)."""
    G = Graph.from_edges([(0, 1)], 2)
    family = ArmFamily(arms=((0, 1),), edge_sets=((0,),), p=np.array([1.0]), k=3)
    params = DsLinParams(epsilon=0.1, delta=delta, lam=lam, R=R, L=L)
    return G, family, init_state(G, family, params)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            DsLinParams(epsilon=0.0)
        with pytest.raises(ValueError):
            DsLinParams(delta=0.0)
        with pytest.raises(ValueError):
            DsLinParams(delta=1.5)
        with pytest.raises(ValueError):
            DsLinParams(lam=0.0)
        with pytest.raises(ValueError):
            DsLinParams(R=-1.0)
        with pytest.raises(ValueError):
            DsLinParams(L=-1.0)
        assert DsLinParams(R=0.0).R == 0.0  # noiseless runs are legitimate

    def test_default_weight_norm_bound(self, karate):
        assert default_weight_norm_bound(karate) == pytest.approx(math.sqrt(78) * 100.0)


class TestArmFamily:
    def test_requires_k_above_two(self, lollipop):
        with pytest.raises(ValueError):
            make_arm_family(lollipop, [(0, 1, 2)], k=2)

    def test_small_arm_rejected(self, lollipop):
        with pytest.raises(ValueError, match="smaller than k"):
            make_arm_family(lollipop, [(0, 1)], k=3)

    def test_edgeless_arm_rejected(self, star4):
        with pytest.raises(ValueError, match="induces no edges"):
            make_arm_family(star4, [(1, 2, 3)], k=3)

    def test_bad_allocation_rejected(self, lollipop):
        arms = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (0, 1, 2, 3)]
        with pytest.raises(ValueError, match="probability vector"):
            make_arm_family(lollipop, arms, p=[0.5, 0.5], k=3)
        with pytest.raises(ValueError, match="probability vector"):
            make_arm_family(lollipop, arms, p=[0.7, 0.2, 0.2, -0.1], k=3)

    def test_span_deficit_rejected(self, lollipop):
        with pytest.raises(ValueError, match="span"):
            make_arm_family(lollipop, [(0, 1, 2), (0, 1, 2, 3)], k=3)

    def test_spanning_family_accepted(self, lollipop):
        # indicators: {0,1},{0,1,2},{1,3},{2,3} edge index sets have rank 4
        arms = [(0, 1, 2), (0, 1, 2, 3), (0, 1, 3), (0, 2, 3)]
        fam = make_arm_family(lollipop, arms, k=3)
        assert fam.arms == ((0, 1, 2), (0, 1, 2, 3), (0, 1, 3), (0, 2, 3))
        assert fam.edge_sets[1] == (0, 1, 2, 3)
        assert np.allclose(fam.p, 0.25)

    def test_generation_spans_and_replays(self, lollipop):
        fam1 = generate_arm_family(lollipop, k=3, seed=12)
        fam2 = generate_arm_family(lollipop, k=3, seed=12)
        assert fam1.arms == fam2.arms
        assert len(fam1.arms) == lollipop.m
        mat = np.zeros((len(fam1.arms), lollipop.m))
        for i, es in enumerate(fam1.edge_sets):
            mat[i, list(es)] = 1.0
        assert np.linalg.matrix_rank(mat) == lollipop.m

    def test_generation_failure_when_span_impossible(self, k4):
        # size >= 3 subsets of the 4-clique span only 4 of the 6 edge axes
        with pytest.raises(ValueError, match="span"):
            generate_arm_family(k4, k=3, seed=0, max_attempts=2000)


class TestDesignUpdates:
    def test_scalar_ridge_estimate(self):
        G, family, state = scalar_state()
        update(state, 0, 3.0)
        assert state.A[0, 0] == pytest.approx(2.0)
        assert state.A_inv[0, 0] == pytest.approx(0.5)
        assert state.logdetA == pytest.approx(math.log(2.0))
        assert estimate(state)[0] == pytest.approx(1.5)
        assert state.t == 1
        assert state.counts[0] == 1

    def test_estimate_clips_negatives(self):
        G, family, state = scalar_state()
        update(state, 0, -4.0)
        assert estimate(state)[0] == 0.0

    def test_nonfinite_reward_rejected(self):
        G, family, state = scalar_state()
        with pytest.raises(ValueError):
            update(state, 0, math.nan)

    def test_incremental_matches_dense_through_refresh(self, lollipop):
        fam = generate_arm_family(lollipop, k=3, seed=1)
        params = DsLinParams(lam=0.5)
        state = init_state(lollipop, fam, params)
        rng = np.random.default_rng(0)
        for t in range(300):  # crosses the periodic dense-refresh boundary
            update(state, int(rng.integers(len(fam.arms))), float(rng.normal()))
        dense = params.lam * np.eye(4) + sum(
            c * np.outer(state.chi[i], state.chi[i]) for i, c in enumerate(state.counts)
        )
        assert np.allclose(state.A, dense, atol=1e-9)
        assert np.allclose(state.A_inv, np.linalg.inv(dense), atol=1e-8)
        sign, logdet = np.linalg.slogdet(dense)
        assert sign > 0
        assert state.logdetA == pytest.approx(logdet, abs=1e-6)

    def test_confidence_radius_fresh_state(self):
        # logdet A = m log lambda at t=0, so only the -2 log delta term remains
        G, family, state = scalar_state(lam=1.0, R=1.0, L=1.0, delta=0.1)
        assert confidence_radius(state) == pytest.approx(
            math.sqrt(2.0 * math.log(10.0)) + 1.0, abs=1e-12
        )
        assert confidence_radius(state) == pytest.approx(3.1459660262893476, abs=1e-12)

    def test_confidence_radius_scales_with_degree(self, lollipop):
        fam = generate_arm_family(lollipop, k=3, seed=1)
        state = init_state(lollipop, fam, DsLinParams(lam=1.0, R=2.0, L=0.0, delta=0.1))
        # max degree 3, so the leading factor is sqrt(3) * 2
        assert state.Rprime == pytest.approx(math.sqrt(3.0) * 2.0)
        assert confidence_radius(state) == pytest.approx(
            math.sqrt(3.0) * 2.0 * math.sqrt(2.0 * math.log(10.0)), abs=1e-12
        )


class TestSelectArm:
    def test_fresh_state_picks_first(self, lollipop):
        fam = generate_arm_family(lollipop, k=3, seed=1)
        state = init_state(lollipop, fam, DsLinParams())
        assert select_arm(state, fam) == 0

    def test_count_over_allocation_ratio(self, lollipop):
        arms = [(0, 1, 2), (0, 1, 2, 3), (0, 1, 3), (0, 2, 3)]
        fam = make_arm_family(lollipop, arms, p=[0.5, 0.25, 0.125, 0.125], k=3)
        state = init_state(lollipop, fam, DsLinParams())
        state.counts[:] = [1, 0, 2, 1]
        # ratios: 2, 0, 16, 8
        assert select_arm(state, fam) == 1

    def test_zero_allocation_excluded(self, lollipop):
        arms = [(0, 1, 2), (0, 1, 2, 3), (0, 1, 3), (0, 2, 3)]
        fam = make_arm_family(lollipop, arms, p=[0.5, 0.5, 0.0, 0.0], k=3)
        state = init_state(lollipop, fam, DsLinParams())
        state.counts[:] = [9, 9, 0, 0]
        assert select_arm(state, fam) == 0  # ties inside the support go low


class TestQpBound:
    def test_identity(self):
        val, mode = qp_upper_bound(np.eye(2))
        assert mode == "exact"
        assert val == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_correlated(self):
        Q = np.array([[1.0, 0.5], [0.5, 1.0]])
        val, _ = qp_upper_bound(Q)
        assert val == pytest.approx(math.sqrt(3.0), abs=1e-12)

    def test_relaxed_dominates_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            m = int(rng.integers(1, 9))
            B = rng.normal(size=(m, m))
            Q = B @ B.T + 1e-9 * np.eye(m)
            exact, mode_e = qp_upper_bound(Q, exact_limit=12)
            relaxed, mode_r = qp_upper_bound(Q, exact_limit=0)
            assert mode_e == "exact" and mode_r == "relaxed"
            assert relaxed >= exact - 1e-12

    def test_rejects_bad_matrices(self):
        with pytest.raises(ValueError):
            qp_upper_bound(np.ones((2, 3)))
        with pytest.raises(ValueError):
            qp_upper_bound(np.array([[1.0, 0.2], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            qp_upper_bound(np.array([[1.0, 2.0], [2.0, 1.0]]))  # eigenvalue -1


class TestStopRule:
    def test_conservative_rule_frozen_case(self):
        G, family, state = scalar_state(lam=1.0, R=1.0, L=1.0, delta=0.1)
        update(state, 0, 3.0)
        # what=1.5, fhat over {0,1} = 0.75, C = sqrt(ln 2 + 2 ln 10) + 1,
        # width = U = sqrt(1/2): lhs ~ -0.42 < rhs ~ 1.82 at epsilon 0.1
        width = math.sqrt(0.5)
        U = math.sqrt(0.5)
        C = math.sqrt(math.log(2.0) + 2.0 * math.log(10.0)) + 1.0
        lhs = 0.75 - C * width / 2.0
        rhs = 0.75 + C * U / 2.0 - 0.1
        assert lhs < rhs
        assert not check_stop(state, family, (0, 1), width, U)

    def test_stop_fires_with_generous_epsilon(self):
        G, family, state = scalar_state()
        state.params = DsLinParams(epsilon=5.0, delta=0.1, lam=1.0, R=1.0, L=1.0)
        update(state, 0, 3.0)
        assert check_stop(state, family, (0, 1), math.sqrt(0.5), math.sqrt(0.5))

    def test_explicit_rival_shifts_threshold(self):
        G, family, state = scalar_state()
        state.params = DsLinParams(epsilon=5.0, delta=0.1, lam=1.0, R=1.0, L=1.0)
        update(state, 0, 3.0)
        assert not check_stop(state, family, (0, 1), math.sqrt(0.5), math.sqrt(0.5), secondBest=6.0)


class TestRunDsLin:
    def test_cap_below_init_rejected(self, lollipop):
        fam = generate_arm_family(lollipop, k=3, seed=1)
        oracle = make_oracle(lollipop, np.ones(4), seed=0)
        with pytest.raises(ValueError):
            run_dslin(lollipop, fam, oracle, DsLinParams(), max_iters=3)

    def test_cap_at_initialization(self, lollipop):
        fam = generate_arm_family(lollipop, k=3, seed=1)
        oracle = make_oracle(lollipop, np.ones(4), seed=0)
        subset, diag = run_dslin(lollipop, fam, oracle, DsLinParams(), max_iters=4)
        assert diag.capped and not diag.stopped
        assert diag.iterations == 4
        assert len(diag.ct_trace) == 1
        assert oracle.total_queries == 4
        assert diag.arm_counts.sum() == 4

    def test_noiseless_run_stops_immediately(self, lollipop):
        w = np.array([5.0, 5.0, 5.0, 1.0])
        fam = generate_arm_family(lollipop, k=3, seed=1)
        oracle = make_oracle(lollipop, w, noise="none", seed=0)
        params = DsLinParams(epsilon=0.5, delta=0.1, lam=1e-12, R=0.0, L=float(np.linalg.norm(w)))
        subset, diag = run_dslin(lollipop, fam, oracle, params, max_iters=500)
        assert diag.stopped and not diag.capped
        assert diag.iterations == 4  # stop test fires on the first pass
        assert subset == (0, 1, 2)

    def test_estimate_error_trace_present_only_with_truth(self, lollipop):
        fam = generate_arm_family(lollipop, k=3, seed=1)
        w = np.ones(4)
        oracle = make_oracle(lollipop, w, seed=0)
        _, diag = run_dslin(lollipop, fam, oracle, DsLinParams(), max_iters=10)
        assert diag.est_err_trace is None
        oracle = make_oracle(lollipop, w, seed=0)
        _, diag = run_dslin(lollipop, fam, oracle, DsLinParams(), max_iters=10, w_true=w)
        assert len(diag.est_err_trace) == len(diag.ct_trace)

    def test_exact_second_best_mode_runs(self, lollipop):
        fam = generate_arm_family(lollipop, k=3, seed=1)
        w = np.array([5.0, 5.0, 5.0, 1.0])
        oracle = make_oracle(lollipop, w, noise="none", seed=0)
        params = DsLinParams(epsilon=3.0, delta=0.1, lam=1e-12, R=0.0, L=float(np.linalg.norm(w)))
        subset, diag = run_dslin(
            lollipop, fam, oracle, params, max_iters=500, stop_mode="exact-second-best"
        )
        assert subset == (0, 1, 2)
        assert diag.stopped

    def test_unknown_stop_mode(self, lollipop):
        fam = generate_arm_family(lollipop, k=3, seed=1)
        oracle = make_oracle(lollipop, np.ones(4), seed=0)
        with pytest.raises(ValueError):
            run_dslin(lollipop, fam, oracle, DsLinParams(), max_iters=10, stop_mode="bogus")
