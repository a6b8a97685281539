"""Fantope projection, ADMM relaxation, and the truncated power pipeline."""

import math

import numpy as np
import pytest

from bitspectral import (
    ConfigError,
    Dataset,
    GroundTruth,
    NumericalError,
    OneBitCS,
    SparseConfig,
    expected_moment,
    fantope_admm,
    fantope_project,
    generate_dataset,
    power_method,
    sample_beta_sparse,
    second_moment,
    soft_threshold,
    sparse_recover,
    truncate,
    truncated_power_method,
)

from _oracles import exact_fantope_projection, random_fantope_point


def sym(a):
    return 0.5 * (a + a.T)


def base_cfg(**kw):
    defaults = dict(rho=0.1, s_hat=2, t_max=500)
    defaults.update(kw)
    return SparseConfig(**defaults)


class TestSoftThreshold:
    def test_scalar_values(self):
        assert soft_threshold(3.0, 1.0) == 2.0
        assert soft_threshold(-0.5, 1.0) == 0.0

    def test_zero_threshold_is_identity(self):
        a = np.array([[1.5, -2.0], [0.25, 0.0]])
        np.testing.assert_array_equal(soft_threshold(a, 0.0), a)

    def test_matrix_elementwise(self):
        a = np.array([[2.0, -3.0], [0.5, -0.25]])
        np.testing.assert_allclose(
            soft_threshold(a, 0.5), [[1.5, -2.5], [0.0, 0.0]], atol=1e-15
        )

    def test_rejects_negative_threshold(self):
        with pytest.raises(ConfigError):
            soft_threshold(np.eye(2), -0.1)


class TestFantopeProject:
    def test_waterfill_by_hand(self):
        np.testing.assert_allclose(
            fantope_project(np.diag([5.0, 1.0, 0.0])), np.diag([1.0, 0.0, 0.0]),
            atol=1e-11,
        )

    def test_feasible_fixed_point(self):
        a = np.eye(4) / 4.0
        np.testing.assert_allclose(fantope_project(a), a, atol=1e-12)

    def test_split_mass(self):
        np.testing.assert_allclose(
            fantope_project(np.diag([0.6, 0.6, 0.0])), np.diag([0.5, 0.5, 0.0]),
            atol=1e-11,
        )

    def test_rejects_asymmetric(self):
        with pytest.raises(ConfigError):
            fantope_project(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_matches_exact_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            a = sym(rng.standard_normal((8, 8)) * rng.uniform(0.2, 5.0))
            np.testing.assert_allclose(
                fantope_project(a), exact_fantope_projection(a), atol=1e-8
            )

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            p1 = fantope_project(sym(rng.standard_normal((6, 6))))
            np.testing.assert_allclose(fantope_project(p1), p1, atol=1e-10)

    def test_feasibility_of_output(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            out = fantope_project(sym(rng.standard_normal((7, 7)) * 3.0))
            vals = np.linalg.eigvalsh(out)
            assert np.trace(out) == pytest.approx(1.0, abs=1e-6)
            assert vals.min() >= -1e-6 and vals.max() <= 1.0 + 1e-6

    def test_kkt_variational_inequality(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = sym(rng.standard_normal((6, 6)) * 2.0)
            proj = fantope_project(a)
            for _ in range(200):
                other = random_fantope_point(6, rng)
                assert float(np.sum((a - proj) * (other - proj))) <= 1e-8

    def test_commutes_with_spectrum(self):
        rng = np.random.default_rng(4)
        q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        lam = np.array([-1.0, 0.2, 0.5, 0.9, 1.4, 3.0])  # distinct
        a = (q * lam) @ q.T
        proj = fantope_project(a)
        off = q.T @ proj @ q
        np.testing.assert_allclose(off - np.diag(np.diag(off)), 0.0, atol=1e-8)


class TestFantopeAdmm:
    def test_unpenalized_top_eigenprojector(self):
        m = np.diag([3.0, 1.0])
        sol = fantope_admm(m, base_cfg(rho=0.0))
        assert sol.converged
        np.testing.assert_allclose(sol.Pi, np.diag([1.0, 0.0]), atol=1e-5)
        assert -float(np.sum(m * sol.Pi)) == pytest.approx(-3.0, abs=1e-4)

    def test_heavy_penalty_collapses_to_largest_diagonal(self):
        rng = np.random.default_rng(5)
        m = sym(rng.standard_normal((3, 3)))
        m[1, 1] += 3.0  # make the second diagonal entry the largest
        rho = float(np.max(np.abs(m))) * 9.0
        sol = fantope_admm(m, base_cfg(rho=rho, admm_max_iter=5000))
        off_mass = np.sum(np.abs(sol.Pi - np.diag(np.diag(sol.Pi))))
        assert off_mass < 1e-4
        assert sol.Pi[1, 1] == pytest.approx(1.0, abs=1e-3)
        # brute-force oracle over diagonal feasible points
        brute = min(
            -m[k, k] + rho for k in range(3)
        )
        obj = -float(np.sum(m * sol.Pi)) + rho * float(np.sum(np.abs(sol.Pi)))
        assert obj == pytest.approx(brute, abs=1e-3)

    def test_small_instance_recovery(self):
        rng = np.random.default_rng(6)
        e1 = np.array([1.0, 0.0, 0.0])
        truth = GroundTruth(beta_star=e1, support=np.array([0]))
        m = expected_moment(OneBitCS(0.0), truth).entries + 0.05 * sym(rng.standard_normal((3, 3)))
        sol = fantope_admm(m, base_cfg(rho=0.1))
        vals, vecs = np.linalg.eigh(sol.Pi)
        v1 = vecs[:, -1]
        assert min(np.linalg.norm(v1 - e1), np.linalg.norm(v1 + e1)) < 0.05

    def test_objective_matches_fine_benchmark(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            m = sym(rng.standard_normal((5, 5)) * 2.0)
            rho = 0.2
            fast = fantope_admm(m, base_cfg(rho=rho))
            fine = fantope_admm(m, base_cfg(rho=rho, admm_tol=1e-10, admm_max_iter=200_000))

            def objective(pi):
                return -float(np.sum(m * pi)) + rho * float(np.sum(np.abs(pi)))

            assert objective(fast.Pi) == pytest.approx(objective(fine.Pi), abs=1e-4)

    def test_nonconvergence_reports_false_and_returns_iterate(self):
        rng = np.random.default_rng(8)
        m = sym(rng.standard_normal((6, 6)))
        sol = fantope_admm(m, base_cfg(rho=0.3, admm_max_iter=3))
        assert not sol.converged and sol.iterations == 3
        assert np.trace(sol.Pi) == pytest.approx(1.0, abs=1e-6)

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            SparseConfig(rho=-0.1, s_hat=2)
        with pytest.raises(ConfigError):
            SparseConfig(rho=0.1, s_hat=0)
        with pytest.raises(ConfigError):
            SparseConfig(rho=0.1, s_hat=2, admm_penalty=0.0)
        with pytest.raises(ConfigError):
            SparseConfig(rho=0.1, s_hat=2, admm_tol=0.0)


class TestTruncate:
    def test_keeps_top_two(self):
        np.testing.assert_allclose(
            truncate(np.array([0.6, -0.8, 0.1]), 2), [0.6, -0.8, 0.0], atol=1e-15
        )

    def test_full_width_is_normalization(self):
        v = np.array([3.0, 4.0, 0.0])
        np.testing.assert_allclose(truncate(v, 3), v / 5.0, atol=1e-15)

    def test_tie_breaks_to_lower_index(self):
        np.testing.assert_allclose(truncate(np.array([1.0, 1.0, 0.0]), 1), [1.0, 0.0, 0.0])
        np.testing.assert_allclose(truncate(np.array([-1.0, 1.0]), 1), [-1.0, 0.0])

    def test_rejects_annihilation(self):
        with pytest.raises(NumericalError, match="annihilated"):
            truncate(np.array([0.0, 0.0, 1.0e-300 * 0.0]), 2)

    def test_rejects_bad_width(self):
        with pytest.raises(ConfigError):
            truncate(np.array([1.0, 0.0]), 0)
        with pytest.raises(ConfigError):
            truncate(np.array([1.0, 0.0]), 3)


class TestTruncatedPower:
    def test_locked_support_fixed_point(self):
        m = np.diag([4.0, 2.0, 1.0])
        report = truncated_power_method(m, np.array([0.0, 1.0, 0.0]), base_cfg(s_hat=1))
        assert report.converged and report.iterations == 1
        np.testing.assert_allclose(report.beta_hat, [0.0, 1.0, 0.0], atol=1e-15)

    def test_dense_start_converges_to_top(self):
        m = np.diag([4.0, 2.0, 1.0])
        b0 = np.full(3, 1.0 / math.sqrt(3.0))
        report = truncated_power_method(m, b0, base_cfg(s_hat=2))
        np.testing.assert_allclose(report.beta_hat, [1.0, 0.0, 0.0], atol=1e-9)

    def test_full_width_matches_power_method_bitwise(self):
        rng = np.random.default_rng(9)
        a = rng.standard_normal((8, 8))
        m = a @ a.T
        b0 = rng.standard_normal(8)
        b0 /= np.linalg.norm(b0)
        dense = power_method(m, b0, t_max=60, tol=1e-10)
        sparse = truncated_power_method(m, b0, base_cfg(s_hat=8, t_max=60), tol=1e-10)
        np.testing.assert_array_equal(dense.beta_hat, sparse.beta_hat)
        np.testing.assert_array_equal(dense.rayleigh_trace, sparse.rayleigh_trace)
        assert dense.iterations == sparse.iterations

    def test_output_always_sparse_unit(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            a = rng.standard_normal((10, 10))
            m = a @ a.T
            b0 = rng.standard_normal(10)
            b0 /= np.linalg.norm(b0)
            s_hat = int(rng.integers(1, 10))
            report = truncated_power_method(m, b0, base_cfg(s_hat=s_hat, t_max=50))
            assert np.count_nonzero(report.beta_hat) <= s_hat
            assert np.linalg.norm(report.beta_hat) == pytest.approx(1.0, abs=1e-12)


class TestSparseRecover:
    def _cs_dataset(self, s, p, n, seed):
        rng = np.random.default_rng(seed)
        truth = sample_beta_sparse(p, s, rng)
        data = generate_dataset(OneBitCS(0.0), truth, n, rng)
        return truth, data

    def test_recovers_planted_direction(self):
        errs = []
        for t in range(20):
            truth, data = self._cs_dataset(5, 100, 2000, [40, t])
            cfg = SparseConfig(rho=math.sqrt(math.log(100) / 2000), s_hat=10,
                               admm_max_iter=100)
            report = sparse_recover(data, cfg)
            errs.append(min(np.linalg.norm(report.beta_hat - truth.beta_star),
                            np.linalg.norm(report.beta_hat + truth.beta_star)))
        assert np.median(errs) < 0.6
        assert np.count_nonzero(report.beta_hat) <= 10

    def test_stage_diagnostics_present(self):
        truth, data = self._cs_dataset(3, 30, 400, 41)
        cfg = SparseConfig(rho=0.05, s_hat=6, admm_max_iter=50)
        report = sparse_recover(data, cfg)
        stages = report.stages
        assert set(stages) == {"admm_iterations", "admm_primal_residual",
                               "admm_dual_residual", "admm_converged", "init_eigengap"}
        assert stages["init_eigengap"] >= -1e-9

    def test_degenerate_width_matches_dense_path(self):
        truth, data = self._cs_dataset(20, 20, 2000, 42)
        cfg = SparseConfig(rho=0.0, s_hat=20, admm_max_iter=200)
        report = sparse_recover(data, cfg)
        rng = np.random.default_rng(43)
        b0 = rng.standard_normal(20)
        b0 /= np.linalg.norm(b0)
        dense = power_method(second_moment(data), b0)
        assert np.linalg.norm(report.beta_hat - dense.beta_hat) <= 1e-6

    def test_identical_labels_surface_power_stage_error(self):
        rng = np.random.default_rng(44)
        data = Dataset(labels=np.ones(40, dtype=np.int64),
                       covariates=rng.standard_normal((40, 6)))
        cfg = SparseConfig(rho=0.01, s_hat=3, admm_max_iter=50)
        with pytest.raises(NumericalError, match="zero"):
            sparse_recover(data, cfg)

    def test_rejects_oversized_width(self):
        truth, data = self._cs_dataset(3, 10, 200, 45)
        with pytest.raises(ConfigError):
            sparse_recover(data, SparseConfig(rho=0.1, s_hat=11))

    def test_sum_kind_accepted(self):
        truth, data = self._cs_dataset(3, 12, 400, 46)
        cfg = SparseConfig(rho=0.05, s_hat=6, admm_max_iter=50)
        report = sparse_recover(data, cfg, kind="sum")
        assert np.linalg.norm(report.beta_hat) == pytest.approx(1.0, abs=1e-12)
        with pytest.raises(ConfigError):
            sparse_recover(data, cfg, kind="best")
