import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bigconj.errors import AllInfinite, DimensionMismatch, NoClosedForm
from bigconj.functions import (GridFunction, Indicator, Linear, Norm, Quadratic, SeparableSum,
                               Shifted, Sum, Support, biconjugate_check, conjugate_grid,
                               conjugate_pointwise, legendre_1d, legendre_1d_brute)
from bigconj.grids import GridSpec
from bigconj.sets import Ball, Box, Segment, Singleton

B2 = Ball.unit(2)
I11 = Box([-1.0], [1.0])


def test_eval_examples():
    assert Indicator(B2).eval([0.3, 0.4]) == 0
    assert Indicator(B2).eval([2.0, 0.0]) == np.inf
    assert Support(B2).eval([3.0, 4.0]) == 5
    with pytest.raises(DimensionMismatch):
        Norm(2).eval([1.0, 2.0, 3.0])


def test_closed_form_rules():
    f = Indicator(B2).conjugate()
    assert isinstance(f, Support) and f.C is B2
    g = Linear([1.0, 2.0]).conjugate()
    assert isinstance(g, Indicator) and isinstance(g.C, Singleton)
    assert g.eval([1.0, 2.0]) == 0 and g.eval([1.0, 2.1]) == np.inf
    assert isinstance(Norm(2, 3.0).conjugate(), Indicator)
    with pytest.raises(NoClosedForm):
        Quadratic(np.diag([1.0, 0.0])).conjugate()
    with pytest.raises(NoClosedForm):
        Sum(Norm(1), Quadratic(np.eye(1))).conjugate()


def test_quadratic_conjugate_closed_form():
    Q = np.array([[2.0, 0.5], [0.5, 1.0]])
    a = np.array([1.0, -1.0])
    f = Quadratic(Q, a, 0.3)
    fc = f.conjugate()
    rng = np.random.default_rng(0)
    Y = rng.normal(size=(20, 2))
    # oracle: maximizer x = Q^{-1}(y - a)
    X = np.linalg.solve(Q, (Y - a).T).T
    expect = np.einsum("ij,ij->i", X, Y) - f.values(X)
    assert np.allclose(fc.values(Y), expect, atol=1e-12)


def test_shifted_and_tilted_conjugates():
    f = Shifted(Norm(1), [0.5])
    fc = f.conjugate()
    ys = np.linspace(-1, 1, 11)[:, None]
    assert np.allclose(fc.values(ys), 0.5 * ys[:, 0])
    g = Sum(Indicator(I11), Linear([2.0], 1.0)).conjugate()
    # sup_{|x|<=1} x(y - 2) - 1 = |y - 2| - 1
    assert np.allclose(g.values(ys), np.abs(ys[:, 0] - 2) - 1)


def test_separable_sum_conjugate_matches_grid():
    f = SeparableSum(Indicator(I11), Support(I11))
    fc = f.conjugate()
    assert isinstance(fc.f, Support) and isinstance(fc.g, Indicator)
    g = conjugate_grid(f, 2.0, 65)
    Y = g.nodes()
    exact = fc.values(Y)
    inner = np.isfinite(exact) & (np.abs(Y[:, 1]) < 1 - 1e-9)
    err = np.max(np.abs(g.table.ravel()[inner] - exact[inner]))
    assert err <= 2 * g.h
    # off the finite region the grid value grows like R (|y*| - 1)
    outside = np.abs(Y[:, 1]) > 1.5
    assert np.all(g.table.ravel()[outside] >= 2.0 * (np.abs(Y[outside, 1]) - 1) - 1e-12)


def test_conjugate_grid_examples():
    g = conjugate_grid(Quadratic(np.eye(1)), 4.0, 257)
    ys = g.nodes()
    mid = np.abs(ys[:, 0]) <= 2
    assert np.max(np.abs(g.table[mid] - 0.5 * ys[mid, 0] ** 2)) <= g.h ** 2
    g = conjugate_grid(Indicator(I11), 4.0, 257)
    mid = np.abs(ys[:, 0]) <= 2
    assert np.max(np.abs(g.table[mid] - np.abs(ys[mid, 0]))) <= g.h
    with pytest.raises(AllInfinite):
        conjugate_grid(Indicator(Box([10.0], [11.0])), 4.0, 257)


def test_conjugate_grid_2d_fast_equals_brute():
    f = Sum(Norm(2), Indicator(Box([-1.0, -0.5], [1.5, 2.0])))
    a = conjugate_grid(f, 2.0, 17, method="fast")
    b = conjugate_grid(f, 2.0, 17, method="brute")
    assert np.allclose(a.table, b.table, atol=1e-12)


def test_biconjugate_fixtures():
    for f in (Norm(1), Quadratic(np.eye(1)), Indicator(Box([0.0], [1.0])), Norm(2)):
        r = biconjugate_check(f, 2.0, 65 if f.dim == 2 else 257)
        assert r.gap <= 2 * r.h


@st.composite
def convex_tables(draw, n=65):
    slopes = sorted(draw(st.lists(st.floats(-20, 20), min_size=n - 1, max_size=n - 1)))
    x = np.linspace(-2.0, 2.0, n)
    f = np.concatenate([[0.0], np.cumsum(np.array(slopes) * np.diff(x))])
    lo = draw(st.integers(0, n // 3))
    hi = draw(st.integers(0, n // 3))
    f[:lo] = np.inf
    f[n - hi:] = np.inf
    return x, f


@settings(max_examples=60, deadline=None)
@given(convex_tables(), st.floats(0.5, 30))
def test_fast_transform_bit_equal_to_brute(data, span):
    x, f = data
    y = np.linspace(-span, span, 97)
    assert np.array_equal(legendre_1d(x, f, y), legendre_1d_brute(x, f, y))


@settings(max_examples=40, deadline=None)
@given(convex_tables())
def test_fenchel_young_grid_backend(data):
    x, f = data
    g = GridFunction(f, 2.0)
    c = conjugate_grid(g, 2.0, len(x))
    fin = np.isfinite(f)
    lhs = f[fin][:, None] + c.table[None, :]
    assert np.all(lhs >= np.outer(x[fin], x) - 1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 3))
def test_fenchel_young_closed_backend(x, y, r):
    for f in (Norm(1, r), Quadratic(np.array([[r]])), Indicator(Box([-r], [r])), Support(Box([-r], [r]))):
        fx, fy = f.eval([x]), f.conjugate().eval([y])
        if np.isfinite(fx) and np.isfinite(fy):
            assert fx + fy >= x * y - 1e-9


@settings(max_examples=30, deadline=None)
@given(convex_tables(), st.floats(0, 5))
def test_conjugation_order_reversing(data, bump):
    x, f = data
    g = np.where(np.isfinite(f), f + bump * (x ** 2), np.inf)
    cf = legendre_1d(x, f, x)
    cg = legendre_1d(x, g, x)
    assert np.all(cf >= cg)


def test_grid_interpolation_and_poisoning():
    g = GridFunction(np.array([np.inf, 1.0, 3.0]), 1.0)
    assert g.eval([0.5]) == 2.0
    assert g.eval([-0.5]) == np.inf
    assert g.eval([0.0]) == 1.0
    assert g.eval([1.5]) == np.inf
    with pytest.raises(AllInfinite):
        GridFunction(np.full(5, np.inf), 1.0)


def test_grid_csv_round_trip(tmp_path):
    V = np.arange(9.0).reshape(3, 3)
    V[0, 0] = np.inf
    g = GridFunction(V, 1.5)
    g.to_csv(tmp_path / "g.csv")
    text = (tmp_path / "g.csv").read_text().splitlines()
    assert text[0] == "dim,R,N" and text[3] == "0,inf"
    h = GridFunction.from_csv(tmp_path / "g.csv")
    assert h.radius == 1.5 and h.dim == 2 and np.array_equal(h.table, V)


def test_conjugate_pointwise_matches_closed_form():
    P = GridSpec(2.0, 41).nodes(2)
    Y = np.random.default_rng(3).uniform(-1, 1, size=(50, 2))
    v = conjugate_pointwise(Indicator(Segment([0.0, 0.0], [1.0, 1.0])), Y, P)
    assert np.allclose(v, np.maximum(0.0, Y.sum(axis=1)))
