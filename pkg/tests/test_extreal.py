import math

import pytest
from hypothesis import given, strategies as st

from bigconj.errors import IndeterminateSum
from bigconj.extreal import INF, NEG_INF, ExtReal, add, from_json, inf_over, mul, sup_over, to_json

finite = st.floats(allow_nan=False, allow_infinity=False)
ext = st.floats(allow_nan=False)


def test_add_examples():
    assert add(INF, 3) == INF
    assert add(2, 3) == 5
    with pytest.raises(IndeterminateSum):
        add(INF, NEG_INF)
    with pytest.raises(IndeterminateSum):
        ExtReal("-inf") + math.inf


def test_operators_route_through_checked_arithmetic():
    assert isinstance(ExtReal(1) + 2, ExtReal)
    assert ExtReal(5) - 7 == -2
    assert 7 - ExtReal(5) == 2
    with pytest.raises(IndeterminateSum):
        INF - INF
    with pytest.raises(IndeterminateSum):
        0 * INF
    assert mul(2.5, NEG_INF) == NEG_INF
    assert -INF == NEG_INF


def test_total_order():
    assert NEG_INF < ExtReal(-1e308) < ExtReal(1e308) < INF


def test_sup_examples():
    assert sup_over([1, INF, 0]) == INF
    assert sup_over([-1, -2]) == -1
    assert sup_over([]) == NEG_INF
    assert inf_over([]) == INF


def test_nan_rejected():
    with pytest.raises(ValueError):
        ExtReal(float("nan"))
    with pytest.raises(ValueError):
        sup_over([1.0, float("nan")])


def test_json_strings():
    assert to_json(INF) == "inf"
    assert to_json(NEG_INF) == "-inf"
    assert to_json(0.1) == "0.1"
    assert str(ExtReal("inf")) == "inf"


@given(finite, finite)
def test_finite_add_is_exact(a, b):
    assert add(a, b) == a + b


@given(st.lists(ext, max_size=20), st.randoms(use_true_random=False))
def test_sup_permutation_invariant(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert sup_over(xs) == sup_over(ys)


@given(ext)
def test_json_round_trip(v):
    assert from_json(to_json(v)) == v


@given(ext, st.floats(min_value=1e-300, max_value=1e300))
def test_positive_scaling_keeps_infinities(v, lam):
    r = mul(lam, v)
    assert r == (v if math.isinf(v) else lam * v)
