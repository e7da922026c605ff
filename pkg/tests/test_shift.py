from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bigconj.shift import MAX_N, build, exact_quadratic_form


def test_build_n2():
    ts = build(2)
    assert np.array_equal(ts.T, [[0.5, 0.0], [1.0, 0.5]])
    assert np.array_equal(ts.S, [[0.5, 1.0], [0.0, 0.5]])


def test_build_n3_hand_value():
    ts = build(3)
    x = np.array([1.0, -2.0, 1.0])
    assert np.array_equal(ts.apply_T(x), [0.5, 0.0, -0.5])
    assert ts.apply_T(x) @ x == 0.0


@pytest.mark.parametrize("n", [2, 5, 64])
def test_S_e1(n):
    e1 = np.eye(n)[0]
    expected = np.zeros(n)
    expected[0] = 0.5
    assert np.array_equal(build(n).apply_S(e1), expected)


def test_build_limits():
    with pytest.raises(ValueError):
        build(1)
    with pytest.raises(ValueError):
        build(MAX_N + 1)


def test_matrices_read_only():
    with pytest.raises(ValueError):
        build(3).T[0, 0] = 2.0


@pytest.mark.parametrize("n", [2, 7, 33])
def test_patterns_and_rank_one_sum(n):
    ts = build(n)
    assert np.array_equal(ts.T + ts.S, np.ones((n, n)))
    x = np.random.default_rng(n).normal(size=n)
    Tx = [sum(x[:k]) + 0.5 * x[k] for k in range(n)]
    Sx = [0.5 * x[k] + sum(x[k + 1:]) for k in range(n)]
    assert np.allclose(ts.apply_T(x), Tx, atol=1e-13)
    assert np.allclose(ts.apply_S(x), Sx, atol=1e-13)


def test_pairing_identity_examples():
    assert build(6).pairing_identity(np.eye(6)[0]) == (0.5, 0.5)
    assert build(4).pairing_identity(np.ones(4)) == (8.0, 8.0)
    assert build(3).pairing_identity([1.0, -2.0, 1.0]) == (0.0, 0.0)


def _exact_form(M, x):
    xs = [Fraction(v) for v in x]
    return sum(Fraction(M[i, j]) * xs[i] * xs[j] for i in range(len(xs)) for j in range(len(xs)))


@settings(max_examples=80, deadline=None)
@given(arrays(float, st.integers(2, 12), elements=st.floats(-1e3, 1e3)))
def test_exact_quadratic_form_is_correctly_rounded(x):
    M = build(len(x)).S
    assert exact_quadratic_form(M, x) == float(_exact_form(M, x))


# squares of subnormal inputs underflow, so relative accuracy is only defined above ~1e-150
representable = st.floats(-1e3, 1e3).filter(lambda v: v == 0 or abs(v) > 1e-150)


@settings(max_examples=200, deadline=None)
@given(arrays(float, st.integers(2, 40), elements=representable))
def test_accurate_identity_relative_error(x):
    lhs, rhs = build(len(x)).pairing_identity(x, accurate=True)
    exact = Fraction(sum(Fraction(v) for v in x)) ** 2 / 2
    if exact == 0:
        assert lhs == 0.0 and rhs == 0.0
    else:
        assert abs(Fraction(lhs) - exact) <= Fraction(1, 10 ** 12) * exact
        assert abs(Fraction(rhs) - exact) <= Fraction(1, 10 ** 12) * exact


@settings(max_examples=50, deadline=None)
@given(arrays(float, st.integers(2, 30), elements=st.floats(-10, 10)))
def test_S_strictly_positive_off_hyperplane(x):
    s = sum(Fraction(v) for v in x)
    if s != 0:
        assert _exact_form(build(len(x)).S, x) > 0


@pytest.mark.parametrize("n", [2, 4])
def test_adjoint_agreement(n):
    rep = build(n).adjoint_agreement()
    assert rep["graph_dim"] == n + 1
    assert rep["subspace_distance"] <= 1e-10
    assert rep["selection_member"]


@pytest.mark.parametrize("n", [2, 8, 32])
def test_selection_is_maximal_monotone(n):
    rep = build(n).adjoint_selection().classify()
    assert rep.monotone and rep.maximal and not rep.skew
