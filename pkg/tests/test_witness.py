import json

import numpy as np
import pytest

from dimwitness import (
    DomainError,
    EpsNet,
    SphereSampler,
    WitnessConfig,
    analytic_d,
    bell_value_finite,
    bell_value_infinite,
    build_eps_net,
    eps_threshold,
    kg_lower_bound,
    project_embed,
    region_moments,
    run_witness,
)
from dimwitness.sphere import RegionMoments
from dimwitness.witness import (
    VERDICT_CERTIFIED,
    VERDICT_CONSISTENT,
    VERDICT_VIOLATION,
)


def dot_correlation(a, b):
    return np.einsum("ij,ij->i", a, b)


class TestBellValueInfinite:
    def test_zero_correlation(self):
        val, se = bell_value_infinite(
            3, lambda a, b: np.zeros(a.shape[0]), 5000, SphereSampler(3, 60)
        )
        assert val == 0.0
        assert se == 0.0

    def test_dot_correlation_scores_one_over_n(self):
        for n, seed in ((3, 61), (5, 62)):
            val, se = bell_value_infinite(
                n, dot_correlation, 200_000, SphereSampler(n, seed)
            )
            assert abs(val - 1.0 / n) <= 3 * se

    def test_projection_correlation_capped(self):
        n, m = 3, 2

        def projected(a, b):
            pa = np.stack([project_embed(x, m) for x in a])
            pb = np.stack([project_embed(x, m) for x in b])
            return np.einsum("ij,ij->i", pa, pb)

        val, se = bell_value_infinite(n, projected, 200_000, SphereSampler(n, 63))
        k = kg_lower_bound(n, m).bound
        assert val <= (1.0 / k) * (1.0 / n) + 3 * se
        # the optimal-embedding value is attained by the projection itself
        assert abs(val - analytic_d(n, m)) <= 4 * se

    def test_out_of_range_correlation_rejected(self):
        with pytest.raises(DomainError):
            bell_value_infinite(
                3, lambda a, b: 2.0 * np.ones(a.shape[0]), 5000, SphereSampler(3, 64)
            )


class TestBellValueFinite:
    @staticmethod
    def exact_dim1():
        net = EpsNet(dim=1, eps=0.5, points=np.array([[1.0], [-1.0]]), seed=0)
        mom = RegionMoments(
            net=net,
            weights=np.array([0.5, 0.5]),
            moment_vectors=np.array([[0.5], [-0.5]]),
            samples_used=0,
            standard_errors=np.zeros(2),
            empty_regions=np.array([], dtype=np.int64),
        )
        return net, mom

    def test_zero_correlations(self):
        net, mom = self.exact_dim1()
        assert bell_value_finite(net, mom, np.zeros((2, 2))) == 0.0

    def test_dim1_hand_evaluation(self):
        # w = (+1/2, -1/2), E[uv] = u v: sum_uv w_u w_v u v = (sum_u w_u u)^2 = 1
        net, mom = self.exact_dim1()
        corr = net.points @ net.points.T
        assert bell_value_finite(net, mom, corr) == pytest.approx(1.0, abs=1e-15)

    def test_factored_matches_dense(self):
        net = build_eps_net(3, 0.3, seed=7)
        mom = region_moments(net, 100 * net.size, SphereSampler(3, 65))
        u = net.points
        dense = bell_value_finite(net, mom, u @ u.T)
        factored = bell_value_finite(net, mom, (u, u))
        assert factored == pytest.approx(dense, abs=1e-12)

    def test_dot_correlations_near_one_over_n(self):
        net = build_eps_net(3, 0.3, seed=7)
        mom = region_moments(net, 200 * net.size, SphereSampler(3, 66))
        val = bell_value_finite(net, mom, (net.points, net.points))
        n, eps = 3, 0.3
        stat = 5 * float(np.sum(mom.standard_errors))
        assert 1.0 / n - 2 * eps - stat <= val <= 1.0 / n + stat

    def test_consistency_with_kernel_path(self):
        from dimwitness.embedding_opt import SeparableKernel, VectorAssignment, kernel_value

        net = build_eps_net(3, 0.3, seed=7)
        mom = region_moments(net, 100 * net.size, SphereSampler(3, 67))
        w = mom.moment_vectors
        via_bell = bell_value_finite(net, mom, (net.points, net.points))
        via_kernel = kernel_value(
            SeparableKernel(left_vectors=w, right_vectors=w),
            VectorAssignment(m=3, row_vectors=net.points, col_vectors=net.points),
        )
        assert via_bell == pytest.approx(via_kernel, abs=1e-9)

    def test_shape_validation(self):
        net, mom = self.exact_dim1()
        with pytest.raises(DomainError):
            bell_value_finite(net, mom, np.zeros((3, 3)))
        with pytest.raises(DomainError):
            bell_value_finite(net, mom, 1.5 * np.ones((2, 2)))


class TestEpsThreshold:
    def test_three_one(self):
        k = kg_lower_bound(3, 2).bound
        expected = (k - 1) / (6 * (k + 1))
        assert eps_threshold(3, 1) == pytest.approx(expected, rel=1e-15)
        assert eps_threshold(3, 1) == pytest.approx(6.4687e-3, rel=1e-3)

    def test_nine_two(self):
        k = kg_lower_bound(9, 8).bound
        assert eps_threshold(9, 2) == pytest.approx((k - 1) / (18 * (k + 1)), rel=1e-15)

    def test_algebraic_identity(self):
        for n, d in ((3, 1), (9, 2), (20, 3), (51, 5)):
            k = kg_lower_bound(n, 2 * d * d).bound
            thr = eps_threshold(n, d)
            assert thr * 2 * n * (k + 1) / (k - 1) == pytest.approx(1.0, rel=1e-12)

    def test_threshold_vanishes_at_large_n(self):
        # non-monotone at small n (the ratio bound still grows there), but
        # the 1/(2n) factor wins from a dozen dimensions on
        vals = [eps_threshold(n, 1) for n in (12, 24, 100, 1000, 10_000)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-5

    def test_domain(self):
        with pytest.raises(DomainError):
            eps_threshold(2, 1)


class TestWitnessConfig:
    def test_m_is_twice_d_squared(self):
        cfg = WitnessConfig(n=9, d=2, eps=0.1)
        assert cfg.m == 8

    def test_small_n_rejected(self):
        with pytest.raises(DomainError):
            WitnessConfig(n=2, d=1, eps=0.1)

    def test_small_n_override(self):
        cfg = WitnessConfig(n=2, d=1, eps=0.1, allow_small_n=True)
        assert cfg.m == 2

    def test_eps_domain(self):
        with pytest.raises(DomainError):
            WitnessConfig(n=3, d=1, eps=0.0)


class TestRunWitness:
    def test_baseline_run(self):
        report = run_witness(WitnessConfig(n=3, d=1, eps=0.1, seed=0))
        assert report.verdict in (VERDICT_CERTIFIED, VERDICT_CONSISTENT)
        assert report.verdict == VERDICT_CONSISTENT  # eps >> eps*
        assert all(c.holds for c in report.chain_checks)
        assert report.k_lower == pytest.approx(kg_lower_bound(3, 2).bound)
        assert report.b_infinite_quantum == pytest.approx(1 / 3)
        assert report.tsirelson_validation_dev is not None
        assert report.tsirelson_validation_dev <= 1e-10
        assert report.eps_threshold == pytest.approx(eps_threshold(3, 1))

    def test_chain_checks_across_seeds(self):
        for seed in (1, 2, 3):
            report = run_witness(WitnessConfig(n=3, d=1, eps=0.2, seed=seed))
            assert report.verdict != VERDICT_VIOLATION
            assert all(c.holds for c in report.chain_checks)
            assert report.b_finite_seesaw_d <= report.b_finite_quantum

    def test_quantum_value_grows_as_eps_shrinks(self):
        values = []
        for eps in (0.3, 0.2, 0.1):
            report = run_witness(WitnessConfig(n=3, d=1, eps=eps, seed=0))
            values.append(report.b_finite_quantum)
        assert values[0] < values[1] < values[2] <= 1 / 3 + 0.01

    def test_small_n_override_never_certifies(self):
        report = run_witness(
            WitnessConfig(n=2, d=1, eps=0.2, seed=0, allow_small_n=True)
        )
        assert report.k_lower == 1.0
        assert report.eps_threshold == 0.0
        assert report.verdict == VERDICT_CONSISTENT
        # c4 only applies when m < n
        assert [c.name for c in report.chain_checks] == [
            "c1_finite_quantum_floor",
            "c2_seesaw_embedding_cap",
            "c3_seesaw_chain_cap",
        ]

    def test_report_roundtrip(self):
        report = run_witness(WitnessConfig(n=3, d=1, eps=0.3, seed=5))
        doc = json.loads(report.to_json())
        assert doc["schema"] == 1
        assert doc["kind"] == "witness_report"
        assert doc["config"]["m"] == 2
        assert doc["verdict"] == report.verdict
        assert len(doc["chain_checks"]) == 4

    def test_determinism(self):
        a = run_witness(WitnessConfig(n=3, d=1, eps=0.3, seed=9))
        b = run_witness(WitnessConfig(n=3, d=1, eps=0.3, seed=9))
        assert a.to_dict() == b.to_dict()
