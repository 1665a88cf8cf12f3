import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lassodantzig.bounds import holder_interpolation
from lassodantzig.core import (CoefficientVector, DesignMatrix, InvalidInputError,
                               RegressionInstance, cone_membership, cone_slack,
                               empirical_norm, event_probability, gram, linear_instance,
                               losses, normal_upper_tail, penalty_level, select_j01,
                               sparsity_and_support)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_empirical_norm_examples():
    assert empirical_norm([0, 0, 0]) == 0
    assert empirical_norm([-2.5] * 7) == pytest.approx(2.5, rel=1e-15)
    assert empirical_norm([3, 4]) == pytest.approx(3.5355339, abs=1e-7)
    with pytest.raises(InvalidInputError):
        empirical_norm([])


def test_design_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        DesignMatrix(np.ones((3, 1)))
    with pytest.raises(InvalidInputError):
        DesignMatrix(np.array([[1.0, 0.0], [2.0, 0.0]]))
    with pytest.raises(InvalidInputError):
        DesignMatrix(np.array([[1.0, np.nan], [2.0, 1.0]]))


def test_design_norms_and_hash():
    X = np.array([[1.0, 2.0], [3.0, -2.0]])
    d = DesignMatrix(X)
    assert np.allclose(d.column_norms, [math.sqrt(5), 2.0])
    assert d.f_max == pytest.approx(math.sqrt(5)) and d.f_min == pytest.approx(2.0)
    assert np.allclose(d.D, np.diag([5.0, 4.0]))
    assert d.content_hash() == DesignMatrix(X.copy()).content_hash()
    assert d.content_hash() != DesignMatrix(X * 2).content_hash()
    with pytest.raises(ValueError):
        d.entries[0, 0] = 5.0


def test_gram_examples():
    assert np.allclose(gram(DesignMatrix(math.sqrt(2) * np.eye(2))).psi, np.eye(2))
    rho = 0.3
    # two unit-norm columns with sample correlation rho
    a = np.array([1.0, 1.0])
    b = np.array([rho + math.sqrt(1 - rho**2), rho - math.sqrt(1 - rho**2)])
    G = gram(DesignMatrix(np.column_stack([a, b])))
    assert np.allclose(G.psi, [[1, rho], [rho, 1]], atol=1e-15)
    assert G.has_unit_diagonal()


@settings(max_examples=40, deadline=None)
@given(arrays(float, (5, 4), elements=st.floats(-3, 3, allow_nan=False)))
def test_gram_invariants(X):
    X = X + np.eye(5, 4)  # avoid zero columns
    d = DesignMatrix(X)
    P = gram(d).psi
    assert np.abs(P - P.T).max() <= 1e-12
    assert np.allclose(np.diag(P), d.column_norms**2, rtol=0, atol=0)
    assert np.linalg.eigvalsh(P)[0] >= -1e-10 * max(1.0, np.abs(P).max())


def test_sparsity_and_support_examples():
    assert sparsity_and_support([0, 1.5, 0, -2]) == (2, (1, 3))
    assert sparsity_and_support(np.zeros(4)) == (0, ())
    assert sparsity_and_support([1e-12, 1], zero_tol=1e-9) == (1, (1,))
    with pytest.raises(InvalidInputError):
        sparsity_and_support([1.0], zero_tol=-1)


def test_coefficient_vector():
    b = CoefficientVector([0, 3, -4])
    assert b.sparsity() == 2 and b.support() == (1, 2)
    assert b.norm(1) == 7 and b.norm(2) == 5 and b.norm(math.inf) == 4
    assert np.array_equal(b.restrict([2]), [0, 0, -4])
    assert b.to_json() == [0.0, 3.0, -4.0]


def test_cone_membership_examples():
    d = np.ones(4)
    assert cone_membership(d, [0], 3.0)
    assert not cone_membership(d, [0], 1.0)
    for c0 in (0.5, 1.0, 100.0):
        assert not cone_membership([0, 1, 0, 0], [0], c0)
    assert cone_membership(np.zeros(4), [0], 1.0)
    assert cone_slack(d, [0], 3.0) == 0.0
    with pytest.raises(InvalidInputError):
        cone_membership(d, [7], 1.0)


def test_select_j01_examples():
    assert select_j01([5, -1, 4, -3, 2], [0], 2) == ((2, 3), (0, 2, 3))
    assert select_j01([0, 2, -2, 1], [3], 1) == ((1,), (1, 3))
    assert select_j01([3, 0, 0, 0], [0], 1) == ((1,), (0, 1))
    with pytest.raises(InvalidInputError):
        select_j01([1, 2, 3], [0], 3)


@settings(max_examples=60, deadline=None)
@given(arrays(float, 8, elements=finite), st.integers(0, 7), st.integers(1, 4))
def test_j01_norm_sandwich(delta, j, m):
    J0 = [j]
    _, J01 = select_j01(delta, J0, m)
    full = np.linalg.norm(delta)
    on01 = np.linalg.norm(delta[list(J01)])
    on0 = np.linalg.norm(delta[J0])
    assert on01 <= full + 1e-12
    assert on01 >= on0 - 1e-12


@settings(max_examples=60, deadline=None)
@given(arrays(float, 9, elements=finite), st.sets(st.integers(0, 8), max_size=3))
def test_kth_largest_outside_bounded_by_mean(delta, J0):
    out = np.delete(np.abs(delta), sorted(J0))
    srt = np.sort(out)[::-1]
    total = out.sum()
    for k in range(1, srt.size + 1):
        assert srt[k - 1] <= total / k + 1e-12


def test_losses_examples():
    d = DesignMatrix(math.sqrt(3) * np.eye(3))
    assert losses([1, 0, 0], [0, 1, 0], d, p=1)[0] == 2
    assert losses([1, 2, 3], [1, 2, 3], d, p=1.5) == (0.0, 0.0, 0.0)
    lp, pn, pu = losses([1, -1, 0], [0, 0, 0], d, p=2)
    assert pn == pytest.approx(2.0) and pu == pytest.approx(6.0) and lp == 2.0
    with pytest.raises(InvalidInputError):
        losses([1, 0, 0], [0, 0, 0], d, p=2.5)


def test_penalty_level_examples():
    assert penalty_level(4, 0, 10, 10).r == 0
    # 4 * sqrt(ln(100)/100) evaluated independently
    assert penalty_level(4, 1, 100, 100).r == pytest.approx(0.8583864, abs=1e-7)
    assert penalty_level(2 * math.sqrt(2) + 1e-9, 1, 5, 5).lasso_admissible
    assert not penalty_level(2 * math.sqrt(2), 1, 5, 5).lasso_admissible
    assert penalty_level(1.5, 1, 5, 5).dantzig_admissible
    assert not penalty_level(math.sqrt(2), 1, 5, 5).dantzig_admissible
    with pytest.raises(InvalidInputError):
        penalty_level(1, 1, 5, 1)


def test_event_probability_examples():
    assert event_probability(4, 100, "A", "crude") == pytest.approx(0.99, abs=1e-15)
    assert event_probability(2, 10, "B", "crude") == pytest.approx(0.9, abs=1e-15)
    for M in (2, 10, 1000):
        assert event_probability(math.sqrt(8), M, "A", "crude") == pytest.approx(0.0, abs=1e-12)
    assert event_probability(1, 100, "A", "crude") < 0  # vacuous values are not clamped
    t = 2 * math.sqrt(math.log(50))
    assert event_probability(2, 50, "B", "refined") == pytest.approx(1 - 100 * normal_upper_tail(t))
    with pytest.raises(InvalidInputError):
        event_probability(2, 50, "C")


@pytest.mark.parametrize("A", [1.5, 2, 3, 4])
@pytest.mark.parametrize("M", [2, 10, 100])
@pytest.mark.parametrize("event", ["A", "B"])
def test_refined_probability_dominates_crude(A, M, event):
    assert event_probability(A, M, event, "refined") >= event_probability(A, M, event, "crude")


def test_normal_upper_tail():
    assert normal_upper_tail(0) == 0.5
    assert normal_upper_tail(1.959963984540054) == pytest.approx(0.025, rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(arrays(float, 6, elements=st.floats(0, 5, allow_nan=False)), st.floats(1.01, 2.0))
def test_holder_interpolation(a, p):
    b1, b2 = a.sum(), (a * a).sum()
    assert (a ** p).sum() <= holder_interpolation(b1, b2, p) * (1 + 1e-12) + 1e-12


def test_linear_instance():
    d = DesignMatrix(np.array([[1.0, 2.0], [0.0, 1.0], [1.0, 0.0]]))
    w = np.array([0.1, -0.2, 0.3])
    inst = linear_instance(d, [1.0, -1.0], noise=w, sigma=0.2)
    assert np.allclose(inst.y, d.entries @ [1, -1] + w, atol=1e-12)
    assert inst.is_linear
    plain = RegressionInstance(d, [1, 2, 3])
    assert not plain.is_linear
    with pytest.raises(InvalidInputError):
        RegressionInstance(d, [1, 2])
    with pytest.raises(InvalidInputError):
        RegressionInstance(d, [1, 2, 3], sigma=-1)
