"""Linear relations ``A: R^n => R^n`` stored by their graphs.

A relation is a linear subspace of R^n x R^n, kept as an orthonormal basis
``G = [G1; G2]`` (``G1`` the x-block, ``G2`` the x*-block). Partial and
multivalued relations are therefore first-class. The adjoint is

    gra A* = {(x, x*) : (x*, -x) in (gra A)^perp},

computed from an orthogonal complement in R^{2n} followed by a block swap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import DimensionMismatch, NoSolution, RankDeficientBasis
from .sets import ConvexSet, Segment, Singleton, Subspace, _vec

__all__ = [
    "LinearRelation", "MonotonicityReport", "Fiber", "monotonically_related",
    "resolvent_solve", "resolvent_residual",
]

_RANK_TOL = 1e-10


def _orth(B):
    if B.shape[1] == 0:
        return B
    return linalg.orth(B, rcond=_RANK_TOL)


@dataclass
class MonotonicityReport:
    monotone: bool
    skew: bool
    symmetric: bool
    maximal: bool
    graph_dim: int
    n: int
    min_eigenvalue: float
    witness: Optional[tuple] = None
    sampled_pairs: int = 0
    sampled_violations: int = 0

    def to_dict(self):
        w = None
        if self.witness is not None:
            w = [[np.asarray(v).tolist() for v in pt] for pt in self.witness]
        return {
            "monotone": self.monotone, "skew": self.skew,
            "symmetric": self.symmetric, "maximal": self.maximal,
            "graph_dim": self.graph_dim, "n": self.n,
            "min_eigenvalue": self.min_eigenvalue, "witness": w,
            "sampled_pairs": self.sampled_pairs,
            "sampled_violations": self.sampled_violations,
        }


@dataclass
class Fiber:
    """``A x`` as ``point + span(lineality)``, or empty."""

    n: int
    empty: bool
    point: Optional[np.ndarray] = None
    lineality: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.lineality is None:
            self.lineality = np.zeros((self.n, 0))

    @property
    def single_valued(self) -> bool:
        return not self.empty and self.lineality.shape[1] == 0

    def nearest(self, target) -> np.ndarray:
        """The element of the fiber closest to ``target``."""
        if self.empty:
            raise ValueError("empty fiber")
        t = _vec(target, self.n)
        L = self.lineality
        if L.shape[1] == 0:
            return self.point.copy()
        return self.point + L @ (L.T @ (t - self.point))

    def contains(self, v, tol=1e-9) -> bool:
        if self.empty:
            return False
        v = _vec(v, self.n)
        return bool(np.linalg.norm(self.nearest(v) - v) <= tol * max(1.0, np.linalg.norm(v)))


class LinearRelation:
    """A linear subspace of R^n x R^n viewed as a set-valued map."""

    def __init__(self, n, graph_basis):
        self.n = int(n)
        G = np.asarray(graph_basis, dtype=float)
        if G.ndim != 2 or G.shape[0] != 2 * self.n:
            raise DimensionMismatch(f"graph basis must have {2 * self.n} rows")
        self.graph_basis = _orth(G)
        self._dom = None
        self._ran = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_matrix(cls, M, domain=None) -> "LinearRelation":
        """``{(x, M x) : x in domain}``; ``domain`` is a Subspace, a basis, or None (R^n)."""
        M = np.atleast_2d(np.asarray(M, dtype=float))
        n = M.shape[0]
        if M.shape != (n, n):
            raise DimensionMismatch("M must be square")
        if domain is None:
            D = np.eye(n)
        elif isinstance(domain, Subspace):
            if domain.dim != n:
                raise DimensionMismatch("domain dimension differs from M")
            D = domain.basis
        else:
            D = np.asarray(domain, dtype=float)
            if D.ndim == 1:
                D = D[:, None]
            if D.shape[0] != n:
                raise DimensionMismatch("domain basis has wrong row count")
            if D.shape[1] and np.linalg.matrix_rank(D, tol=_RANK_TOL) < D.shape[1]:
                raise RankDeficientBasis("domain basis is degenerate")
        return cls(n, np.vstack([D, M @ D]))

    @classmethod
    def from_pairs(cls, X, Xs) -> "LinearRelation":
        """Span of the given graph points ``(X[i], Xs[i])``."""
        X = np.atleast_2d(X)
        Xs = np.atleast_2d(Xs)
        return cls(X.shape[1], np.hstack([X, Xs]).T)

    # -- basic structure --------------------------------------------------
    @property
    def dim(self) -> int:
        return self.graph_basis.shape[1]

    @property
    def G1(self):
        return self.graph_basis[: self.n]

    @property
    def G2(self):
        return self.graph_basis[self.n:]

    @property
    def dom_basis(self) -> np.ndarray:
        if self._dom is None:
            self._dom = _orth(self.G1)
        return self._dom

    @property
    def ran_basis(self) -> np.ndarray:
        if self._ran is None:
            self._ran = _orth(self.G2)
        return self._ran

    @property
    def multivalued_part(self) -> np.ndarray:
        """Orthonormal basis of ``A 0 = {x* : (0, x*) in gra A}``."""
        Z = linalg.null_space(self.G1, rcond=_RANK_TOL)
        return _orth(self.G2 @ Z) if Z.shape[1] else np.zeros((self.n, 0))

    def projector(self) -> np.ndarray:
        return self.graph_basis @ self.graph_basis.T

    def contains(self, x, xstar, tol=1e-9) -> bool:
        v = np.concatenate([_vec(x, self.n), _vec(xstar, self.n)])
        r = v - self.graph_basis @ (self.graph_basis.T @ v)
        return bool(np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(v)))

    def contains_many(self, X, Xs, tol=1e-9) -> np.ndarray:
        V = np.hstack([np.atleast_2d(X), np.atleast_2d(Xs)])
        R = V - (V @ self.graph_basis) @ self.graph_basis.T
        scale = np.maximum(1.0, np.linalg.norm(V, axis=1))
        return np.linalg.norm(R, axis=1) <= tol * scale

    def subspace_distance(self, other: "LinearRelation") -> float:
        """Spectral norm of the difference of orthogonal projectors."""
        if other.n != self.n:
            raise DimensionMismatch("relations live in different spaces")
        return float(np.linalg.norm(self.projector() - other.projector(), 2))

    def sample(self, rng, m, scale=1.0):
        """``m`` random graph points ``(X, Xs)``."""
        Z = rng.normal(0.0, scale, size=(m, self.dim))
        V = Z @ self.graph_basis.T
        return V[:, : self.n], V[:, self.n:]

    # -- calculus ---------------------------------------------------------
    def adjoint(self) -> "LinearRelation":
        perp = linalg.null_space(self.graph_basis.T, rcond=_RANK_TOL)
        if perp.shape[1] == 0:
            return LinearRelation(self.n, np.zeros((2 * self.n, 0)))
        p, q = perp[: self.n], perp[self.n:]
        return LinearRelation(self.n, np.vstack([-q, p]))

    def negated(self) -> "LinearRelation":
        return LinearRelation(self.n, np.vstack([self.G1, -self.G2]))

    def pairing_form(self) -> np.ndarray:
        """Symmetric matrix of ``z -> <G1 z, G2 z>`` on graph coordinates."""
        P = self.G1.T @ self.G2
        return 0.5 * (P + P.T)

    def classify(self, samples=0, rng=None, tol=1e-10) -> MonotonicityReport:
        """Monotone / skew / symmetric / maximal, decided by eigen-analysis.

        Monotone iff the pairing form is PSD on the graph; skew iff it
        vanishes; symmetric iff ``<x, y*> = <y, x*>`` on the graph; maximal
        iff monotone with graph dimension ``n``. ``samples`` random pairs are
        additionally checked as a consistency probe.
        """
        H = self.pairing_form()
        if self.dim:
            w, V = np.linalg.eigh(H)
            lam = float(w[0])
        else:
            w, V, lam = np.zeros(0), np.zeros((0, 0)), 0.0
        monotone = lam >= -tol
        skew = bool(self.dim == 0 or np.max(np.abs(w)) <= tol)
        P = self.G1.T @ self.G2
        symmetric = bool(np.max(np.abs(P - P.T), initial=0.0) <= tol)
        witness = None
        if not monotone:
            z = V[:, 0]
            witness = ((self.G1 @ z, self.G2 @ z), (np.zeros(self.n), np.zeros(self.n)))
        n_bad = 0
        if samples:
            rng = np.random.default_rng(0) if rng is None else rng
            X, Xs = self.sample(rng, samples)
            Y, Ys = self.sample(rng, samples)
            vals = np.einsum("ij,ij->i", X - Y, Xs - Ys)
            n_bad = int(np.sum(vals < -tol * np.maximum(1.0, np.abs(vals).max())))
        return MonotonicityReport(
            monotone=bool(monotone), skew=skew, symmetric=symmetric,
            maximal=bool(monotone and self.dim == self.n), graph_dim=self.dim,
            n=self.n, min_eigenvalue=lam, witness=witness,
            sampled_pairs=int(samples), sampled_violations=n_bad)

    def apply(self, x, tol=1e-9) -> Fiber:
        """The fiber ``A x = {x* : (x, x*) in gra A}``."""
        x = _vec(x, self.n)
        if self.dim == 0:
            return Fiber(self.n, empty=bool(np.any(x)), point=None if np.any(x) else np.zeros(self.n))
        z, *_ = np.linalg.lstsq(self.G1, x, rcond=None)
        if np.linalg.norm(self.G1 @ z - x) > tol * max(1.0, np.linalg.norm(x)):
            return Fiber(self.n, empty=True)
        p = self.G2 @ z
        L = self.multivalued_part
        if L.shape[1]:
            p = p - L @ (L.T @ p)
        return Fiber(self.n, empty=False, point=p, lineality=L)

    def selection_matrix(self) -> np.ndarray:
        """Linear single-valued selection ``x -> G2 G1^+ x`` on ``dom A``."""
        return self.G2 @ np.linalg.pinv(self.G1, rcond=_RANK_TOL)

    def __repr__(self):
        return f"LinearRelation(n={self.n}, graph_dim={self.dim})"


def monotonically_related(point, graph_sample, tol=0.0) -> bool:
    """True iff ``<x - y, x* - y*> >= -tol`` for every sampled ``(y, y*)``."""
    x, xs = (np.asarray(v, dtype=float) for v in point)
    Y, Ys = graph_sample
    Y = np.atleast_2d(Y)
    Ys = np.atleast_2d(Ys)
    if len(Y) == 0:
        raise ValueError("graph sample is empty")
    vals = np.einsum("ij,ij->i", x - Y, xs - Ys)
    return bool(np.all(vals >= -tol))


def _as_selection(A, C: ConvexSet, selection):
    if selection is not None:
        M = np.atleast_2d(np.asarray(selection, dtype=float))
    elif isinstance(A, LinearRelation):
        M = A.selection_matrix()
    else:
        M = np.atleast_2d(np.asarray(A, dtype=float))
    if M.shape != (C.dim, C.dim):
        raise DimensionMismatch(f"operator is {M.shape}, set lives in R^{C.dim}")
    return M


def resolvent_residual(M, C: ConvexSet, z, x, tol=1e-9) -> float:
    """Distance from ``z - x - M x`` to ``N_C(x)`` (``inf`` if ``x`` not in C)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    x = _vec(x, C.dim)
    r = _vec(z, C.dim) - x - M @ x
    return C.normal_cone(x, tol).distance(r)


def resolvent_solve(A, C: ConvexSet, z, selection=None, tol=1e-8, max_iter=100_000) -> np.ndarray:
    """Solve ``z in x + A_sel(x) + N_C(x)`` for ``x in C``.

    ``A`` is a matrix or a :class:`LinearRelation` (then its linear selection,
    or ``selection`` if given, is used). ``A_sel`` must be monotone so that
    ``Id + A_sel`` is strongly monotone and the solution is unique.

    For a segment the problem is one-dimensional and solved exactly; for a
    singleton it is trivial. Other bounded sets use the projected iteration
    ``x <- P_C(x - g (x + A_sel x - z))`` with ``g = 1 / (1 + ||A_sel||)^2``,
    a contraction with factor ``sqrt(1 - g)``.
    """
    M = _as_selection(A, C, selection)
    z = _vec(z, C.dim)
    n = C.dim
    K = np.eye(n) + M
    if isinstance(C, Singleton):
        return C.point.copy()
    if isinstance(C, Segment):
        if C._dd == 0.0:
            return C.a.copy()
        d = C._d
        slope = float(d @ K @ d)
        if slope <= 0:
            raise NoSolution("Id + A is not strongly monotone along the segment")
        t = -float((K @ C.a - z) @ d) / slope
        return C.point(min(1.0, max(0.0, t)))
    if not C.is_bounded:
        raise NoSolution("resolvent iteration needs a bounded set")
    gamma = 1.0 / (1.0 + np.linalg.norm(M, 2)) ** 2
    x = C.project(np.zeros(n))
    for _ in range(max_iter):
        x_new = C.project(x - gamma * (K @ x - z))
        step = np.linalg.norm(x_new - x)
        x = x_new
        if step <= 1e-3 * tol * gamma and resolvent_residual(M, C, z, x) <= tol:
            return x
    if resolvent_residual(M, C, z, x) <= tol:
        return x
    raise NoSolution(f"no convergence in {max_iter} iterations")
