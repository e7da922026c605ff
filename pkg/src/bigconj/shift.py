"""Leading n x n sections of the skew operator on l^2 and of its adjoint.

``T`` acts by ``(T x)_k = sum_{i<k} x_i + x_k / 2`` on the hyperplane
``sum_i x_i = 0``; ``S = T^T`` acts by ``(S x)_k = x_k / 2 + sum_{i>k} x_i``
on all of R^n. Their sum is the all-ones matrix, so ``<S x, x> = <T x, x> =
(sum_i x_i)^2 / 2``; in particular ``T`` is skew on its domain and ``S`` is
monotone but not skew.

The l^2 tail conditions that describe the infinite-dimensional domains have
no content at finite n and are not modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .relations import LinearRelation
from .sets import Subspace, _vec

__all__ = ["TruncatedShift", "build", "MAX_N", "exact_quadratic_form"]

MAX_N = 4096
_SPLIT = 134217729.0  # 2**27 + 1


def _two_product(a, b):
    """Dekker: ``a * b == p + e`` exactly (barring over/underflow)."""
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def exact_quadratic_form(M, x) -> float:
    """Correctly rounded ``x^T M x`` for a matrix whose entries are exact
    dyadic numbers (such as 0, 1/2, 1).

    Each product ``x_i x_j`` is split into two floats with an exact sum,
    scaled by ``M_ij`` (exact for powers of two and small integers), and all
    terms are summed with ``math.fsum``.
    """
    x = np.asarray(x, dtype=float)
    M = np.asarray(M, dtype=float)
    p, e = _two_product(x[:, None], x[None, :])
    mask = M != 0
    terms = np.concatenate([(M * p)[mask], (M * e)[mask]])
    return math.fsum(terms.tolist())


@dataclass(frozen=True)
class TruncatedShift:
    n: int
    T: np.ndarray
    S: np.ndarray

    @property
    def ones(self) -> np.ndarray:
        return np.ones(self.n)

    def domain(self) -> Subspace:
        """The hyperplane ``{x : sum_i x_i = 0}``."""
        return Subspace.from_constraints(self.ones[None, :], self.n)

    def relation(self) -> LinearRelation:
        """``gra A = {(x, T x) : sum_i x_i = 0}``."""
        return LinearRelation.from_matrix(self.T, domain=self.domain())

    def adjoint_selection(self) -> LinearRelation:
        """``gra S`` on all of R^n (the selection with no ``1`` component)."""
        return LinearRelation.from_matrix(self.S)

    def expected_adjoint(self) -> LinearRelation:
        """``{(y, S y + alpha 1) : y in R^n, alpha in R}``."""
        G = np.vstack([np.eye(self.n), self.S])
        extra = np.concatenate([np.zeros(self.n), self.ones])[:, None]
        return LinearRelation(self.n, np.hstack([G, extra]))

    def apply_T(self, x):
        return self.T @ _vec(x, self.n)

    def apply_S(self, x):
        return self.S @ _vec(x, self.n)

    def pairing_identity(self, x, accurate=False):
        """``(<S x, x>, (sum_i x_i)^2 / 2)``; equal in exact arithmetic.

        Both sides lose relative accuracy to cancellation when ``sum_i x_i``
        is small compared with ``|x|``. With ``accurate=True`` the left side
        is the correctly rounded quadratic form and the sum uses ``fsum``.
        """
        x = _vec(x, self.n)
        if accurate:
            s = math.fsum(x.tolist())
            return exact_quadratic_form(self.S, x), 0.5 * s * s
        s = float(np.sum(x))
        return float((self.S @ x) @ x), 0.5 * s * s

    def adjoint_agreement(self) -> dict:
        """Compare the numerically computed adjoint of ``relation()`` with the
        closed form ``{(y, S y + alpha 1)}``."""
        A = self.relation()
        Astar = A.adjoint()
        expected = self.expected_adjoint()
        e1 = np.zeros(self.n)
        e1[0] = 1.0
        return {
            "n": self.n,
            "graph_dim": Astar.dim,
            "expected_graph_dim": self.n + 1,
            "subspace_distance": Astar.subspace_distance(expected),
            "selection_member": Astar.contains(e1, self.S @ e1),
            "S_e1": (self.S @ e1).tolist(),
        }


def build(n: int) -> TruncatedShift:
    """Construct ``T`` and ``S`` for the leading n x n section (``2 <= n <= MAX_N``)."""
    n = int(n)
    if n < 2:
        raise ValueError("truncation needs n >= 2")
    if n > MAX_N:
        raise ValueError(f"truncation size capped at {MAX_N}")
    T = np.tril(np.ones((n, n)), -1) + 0.5 * np.eye(n)
    T.setflags(write=False)
    S = np.ascontiguousarray(T.T)
    S.setflags(write=False)
    return TruncatedShift(n, T, S)
