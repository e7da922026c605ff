import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bigconj.errors import DimensionMismatch, NoSolution, RankDeficientBasis
from bigconj.relations import (LinearRelation, monotonically_related, resolvent_residual,
                               resolvent_solve)
from bigconj.sets import Ball, Polytope, Segment, Subspace
from bigconj.shift import build

R90 = np.array([[0.0, -1.0], [1.0, 0.0]])


def test_from_matrix_examples():
    A = LinearRelation.from_matrix(R90)
    assert A.dim == 2 and A.G1.shape == (2, 2)
    Z = LinearRelation.from_matrix(np.zeros((3, 3)))
    assert Z.contains([1.0, 2.0, 3.0], np.zeros(3)) and not Z.contains(np.zeros(3), [1.0, 0, 0])
    ts = build(8)
    assert ts.relation().dim == 7


def test_orthonormal_graph_basis():
    A = LinearRelation.from_matrix(np.random.default_rng(0).normal(size=(4, 4)))
    G = np.vstack([A.G1, A.G2])
    assert np.allclose(G.T @ G, np.eye(A.dim), atol=1e-12)


def test_adjoint_examples():
    A = LinearRelation.from_matrix(R90)
    assert A.adjoint().subspace_distance(LinearRelation.from_matrix(R90.T)) <= 1e-12
    assert A.adjoint().subspace_distance(A.negated()) <= 1e-12
    Q = np.array([[2.0, 1.0], [1.0, 3.0]])
    AQ = LinearRelation.from_matrix(Q)
    assert AQ.adjoint().subspace_distance(AQ) <= 1e-12
    for n in (2, 4, 8):
        ts = build(n)
        Astar = ts.relation().adjoint()
        # oracle: (y, y*) is in gra A* iff <y*, x> = <y, T x> for x in a basis of {sum x = 0}
        D = np.linalg.svd(np.ones((1, n)))[2][1:].T
        rng = np.random.default_rng(n)
        for _ in range(5):
            y = rng.normal(size=n)
            alpha = rng.normal()
            ys = ts.T.T @ y + alpha * np.ones(n)
            assert np.allclose(ys @ D, y @ ts.T @ D, atol=1e-12)
            assert Astar.contains(y, ys)


def test_classify_examples():
    r = LinearRelation.from_matrix(R90).classify()
    assert r.monotone and r.skew and r.maximal and not r.symmetric
    rT = build(8).relation().classify()
    assert rT.monotone and rT.skew and not rT.maximal and rT.graph_dim == 7
    rS = build(8).adjoint_selection().classify()
    assert rS.monotone and not rS.skew and rS.maximal
    # the full finite-section adjoint carries the direction (0, 1) and is not monotone
    full = build(8).relation().adjoint().classify()
    assert not full.monotone and full.graph_dim == 9


def test_classify_witness_certifies_violation():
    rep = LinearRelation.from_matrix(-np.eye(2)).classify()
    assert not rep.monotone
    (x, xs), (y, ys) = rep.witness
    assert np.dot(np.subtract(x, y), np.subtract(xs, ys)) < 0


def test_apply_examples():
    A = LinearRelation.from_matrix(R90)
    f = A.apply([1.0, 0.0])
    assert f.single_valued and np.allclose(f.point, [0.0, 1.0])
    ts = build(5)
    assert ts.relation().apply(np.eye(5)[0]).empty
    fib = ts.relation().adjoint().apply(np.eye(5)[0])
    assert not fib.single_valued
    expected = np.zeros(5)
    expected[0] = 0.5
    assert np.allclose(fib.nearest(expected), expected)
    assert fib.contains(expected + 3.0 * np.ones(5))
    with pytest.raises(DimensionMismatch):
        A.apply([1.0, 0.0, 0.0])


def test_monotonically_related_examples():
    y = np.linspace(-2, 2, 401)[:, None]
    # zero map restricted to dom = {0}: (0, 1) is related but off the graph
    assert monotonically_related(([0.0], [1.0]), (np.zeros((5, 1)), np.zeros((5, 1))))
    assert not monotonically_related(([0.0], [1.0]), (y, 0 * y))
    assert not monotonically_related(([0.0], [1.0]), (y, y))
    assert monotonically_related(([0.5], [0.5]), (y, y))


def test_rank_deficient_domain():
    with pytest.raises(RankDeficientBasis):
        LinearRelation.from_matrix(np.eye(2), domain=Subspace(np.array([[1.0, 2.0], [1.0, 2.0]])))


def test_resolvent_examples():
    ts = build(8)
    e1 = np.eye(8)[0]
    C = Segment(np.zeros(8), e1)
    S = ts.adjoint_selection()
    assert abs(resolvent_solve(S, C, e1)[0] - 2 / 3) <= 1e-12
    # brute-force scan of the scalar inclusion t + t/2 + N_[0,1](t) ∋ 1
    t = np.linspace(0, 1, 30001)
    assert abs(t[np.argmin(np.abs(1.5 * t - 1))] - 2 / 3) <= 1e-4
    assert np.all(resolvent_solve(S, C, -e1) == 0)
    assert np.all(resolvent_solve(S, C, np.zeros(8)) == 0)


def test_resolvent_ball_and_polytope():
    rng = np.random.default_rng(5)
    M = np.array([[1.0, -2.0], [2.0, 0.5]])
    for C in (Ball.unit(2), Polytope([[0, 0], [1, 0], [0, 1]])):
        for z in rng.normal(scale=4, size=(20, 2)):
            x = resolvent_solve(M, C, z)
            assert resolvent_residual(M, C, z, x) <= 1e-8


def test_resolvent_rejects_non_monotone_on_segment():
    with pytest.raises(NoSolution):
        resolvent_solve(-3 * np.eye(2), Segment([0.0, 0.0], [1.0, 0.0]), [1.0, 0.0])


def _relations():
    n = st.integers(1, 4)

    @st.composite
    def build_rel(draw):
        k = draw(n)
        M = draw(arrays(float, (k, k), elements=st.floats(-3, 3)))
        r = draw(st.integers(1, k))
        D = draw(arrays(float, (k, r), elements=st.floats(-3, 3)))
        if np.linalg.matrix_rank(D, tol=1e-6) < r or np.linalg.svd(D, compute_uv=False)[-1] < 1e-3:
            D = np.eye(k)[:, :r]
        return LinearRelation.from_matrix(M, domain=Subspace(D))
    return build_rel()


@settings(max_examples=60, deadline=None)
@given(_relations())
def test_adjoint_involution_and_dimension(A):
    As = A.adjoint()
    assert A.dim + As.dim == 2 * A.n
    assert As.adjoint().subspace_distance(A) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(arrays(float, (3, 3), elements=st.floats(-3, 3)), st.integers(1, 3))
def test_skew_forms_are_monotone(K, r):
    M = K - K.T
    A = LinearRelation.from_matrix(M, domain=Subspace(np.eye(3)[:, :r]))
    rep = A.classify()
    assert rep.monotone and rep.skew


@settings(max_examples=60, deadline=None)
@given(_relations())
def test_report_consistency(A):
    rep = A.classify()
    if rep.skew:
        assert rep.monotone
    if not rep.monotone:
        (x, xs), (y, ys) = rep.witness
        assert np.dot(np.subtract(x, y), np.subtract(xs, ys)) < 0
    assert rep.maximal == (rep.monotone and rep.graph_dim == A.n)
