import numpy as np
import pytest

from lassodantzig.core import DesignMatrix, InvalidInputError, RegressionInstance
from lassodantzig.lasso import (LassoConfig, fit_lasso, lasso_kkt_check, lasso_objective,
                                soft_threshold)

from conftest import instance_from_correlations, lasso_bruteforce, orthonormal_design


def test_duplicate_columns_share_the_shrunken_value():
    inst = RegressionInstance(DesignMatrix(np.array([[1.0, 0.0], [0.0, 1.0]])[:1, :1].repeat(2, 1)),
                              [2.0])
    # two identical columns: the weighted objective is minimized by any split of 1.5
    res = fit_lasso(inst, LassoConfig(0.5))
    assert np.abs(res.beta_hat.beta).sum() == pytest.approx(1.5, abs=1e-10)


def test_one_column_example():
    # n=1, X=[1] is padded by a zero-correlation column to satisfy M >= 2
    X = np.array([[1.0, 0.0], [0.0, 1.0]]) * np.sqrt(2)
    inst = RegressionInstance(DesignMatrix(X), [2.0 * np.sqrt(2), 0.0])
    res = fit_lasso(inst, LassoConfig(0.5))
    assert res.beta_hat.beta == pytest.approx([1.5, 0.0], abs=1e-12)


def test_orthonormal_soft_threshold(rng):
    d = orthonormal_design(3, rng)
    inst = instance_from_correlations(d, [3, 0.2, -1])
    res = fit_lasso(inst, LassoConfig(0.5))
    assert res.converged
    assert res.beta_hat.beta == pytest.approx([2.5, 0, -0.5], abs=1e-10)
    assert res.beta_hat.beta[1] == 0.0  # exact zero
    kkt = lasso_kkt_check(inst, res.beta_hat, 0.5)
    assert kkt.passes and kkt.dantzig_sup == pytest.approx(0.5, abs=1e-10)


def test_full_shrinkage(rng):
    d = orthonormal_design(4, rng)
    inst = instance_from_correlations(d, [0.3, -0.7, 0.1, 0.0])
    res = fit_lasso(inst, LassoConfig(0.75))
    assert np.all(res.beta_hat.beta == 0)
    assert lasso_kkt_check(inst, np.zeros(4), 0.75).passes


def test_kkt_detects_perturbation(rng):
    d = orthonormal_design(3, rng)
    inst = instance_from_correlations(d, [3, 0.2, -1])
    tol = 1e-8
    beta = np.array([2.5, 0.0, -0.5])
    assert lasso_kkt_check(inst, beta, 0.5, tol=tol).passes
    beta[0] += 10 * tol
    rep = lasso_kkt_check(inst, beta, 0.5, tol=tol)
    assert not rep.passes and rep.max_violation == pytest.approx(10 * tol, rel=1e-3)


@pytest.mark.parametrize("seed", range(8))
def test_matches_bruteforce_oracle(seed):
    rng = np.random.default_rng(seed)
    n, M = 6, 4
    X = rng.standard_normal((n, M)) * rng.uniform(0.5, 2.0, M)
    d = DesignMatrix(X)
    inst = RegressionInstance(d, X @ [1.5, 0, -1, 0] + 0.3 * rng.standard_normal(n))
    r = 0.2
    b_oracle, obj_oracle = lasso_bruteforce(inst, r)
    res = fit_lasso(inst, LassoConfig(r), monitor=True)
    assert res.converged
    assert res.objective == pytest.approx(obj_oracle, abs=1e-10)
    assert res.beta_hat.beta == pytest.approx(b_oracle, abs=1e-7)
    assert lasso_kkt_check(inst, res.beta_hat, r).passes


def test_objective_monotone_high_dimensional(rng):
    n, M = 10, 25
    X = rng.standard_normal((n, M))
    inst = RegressionInstance(DesignMatrix(X), rng.standard_normal(n))
    res = fit_lasso(inst, LassoConfig(0.1), monitor=True)
    assert res.converged
    kkt = lasso_kkt_check(inst, res.beta_hat, 0.1)
    assert kkt.passes and kkt.dantzig_sup <= 0.1 + 1e-8
    assert res.beta_hat.sparsity() <= n


def test_warm_start_and_nonconvergence(rng):
    X = rng.standard_normal((8, 5))
    inst = RegressionInstance(DesignMatrix(X), rng.standard_normal(8))
    cold = fit_lasso(inst, LassoConfig(0.05))
    warm = fit_lasso(inst, LassoConfig(0.05), beta0=cold.beta_hat)
    assert warm.sweeps_used <= 2
    assert warm.objective == pytest.approx(cold.objective, abs=1e-12)
    capped = fit_lasso(inst, LassoConfig(0.0, tol=1e-15, max_sweeps=1))
    assert not capped.converged and capped.penalty_free
    with pytest.raises(InvalidInputError):
        fit_lasso(inst, LassoConfig(0.1), beta0=np.zeros(3))


def test_config_validation():
    with pytest.raises(InvalidInputError):
        LassoConfig(-1)
    with pytest.raises(InvalidInputError):
        LassoConfig(1, tol=0)
    with pytest.raises(InvalidInputError):
        LassoConfig(1, max_sweeps=0)


def test_soft_threshold_and_objective(rng):
    assert np.array_equal(soft_threshold([3, 0.2, -1], 0.5), [2.5, 0, -0.5])
    d = orthonormal_design(2, rng)
    inst = instance_from_correlations(d, [1.0, 0.0])
    # at beta=0: |y|^2/n = z^T z for orthonormal designs
    assert lasso_objective(inst, [0, 0], 0.3) == pytest.approx(1.0)
