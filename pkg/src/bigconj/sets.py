"""Closed convex sets in R^n: membership, support function, normal cone.

Every set is nonempty, closed and convex by construction. The queries are the
ones needed for indicator functions (``contains``), support functions
(``support``) and normal-cone operators (``normal_cone``). Normal cones come
back as generator/lineality descriptions so callers can enumerate graph
points of ``N_C``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize
from scipy.spatial import ConvexHull

from .errors import DimensionMismatch, RankDeficientBasis
from .extreal import INF, ExtReal

__all__ = [
    "ConvexSet", "Ball", "Segment", "Box", "Subspace", "Singleton",
    "Polytope", "NormalConeResult", "minkowski_span_closed_subspace",
    "set_from_dict",
]

_RANK_TOL = 1e-10


def _vec(x, dim=None):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {x.shape[0]}")
    return x


def _complement(basis, dim):
    """Orthonormal basis (columns) of the orthogonal complement of span(basis)."""
    if basis is None or basis.size == 0:
        return np.eye(dim)
    return linalg.null_space(basis.T, rcond=_RANK_TOL)


def _empty_basis(dim):
    return np.zeros((dim, 0))


@dataclass(frozen=True)
class NormalConeResult:
    """Normal cone ``N_C(x)`` as ``cone(generators) + span(lineality)``.

    ``generators`` has shape ``(k, n)`` (one generator per row) and
    ``lineality`` shape ``(n, m)`` with orthonormal columns. ``empty`` is set
    exactly when the query point is outside ``C``.
    """

    dim: int
    empty: bool = False
    generators: np.ndarray = field(default=None)
    lineality: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.generators is None:
            object.__setattr__(self, "generators", np.zeros((0, self.dim)))
        if self.lineality is None:
            object.__setattr__(self, "lineality", _empty_basis(self.dim))

    @classmethod
    def empty_cone(cls, dim):
        return cls(dim, empty=True)

    @property
    def is_zero(self) -> bool:
        """True when the cone is ``{0}`` (interior point)."""
        return (not self.empty and self.lineality.shape[1] == 0
                and not np.any(self.generators))

    def distance(self, g) -> float:
        """Euclidean distance from ``g`` to the cone (``inf`` if empty)."""
        g = _vec(g, self.dim)
        if self.empty:
            return float("inf")
        L = self.lineality
        r = g - L @ (L.T @ g) if L.shape[1] else g
        G = self.generators
        if G.shape[0] == 0:
            return float(np.linalg.norm(r))
        G = G - (G @ L) @ L.T if L.shape[1] else G
        _, res = optimize.nnls(G.T, r)
        return float(res)

    def contains(self, g, tol=1e-9) -> bool:
        return self.distance(g) <= tol

    def sample(self, rng, m, scale=1.0) -> np.ndarray:
        """Random elements: nonnegative combinations plus lineality parts."""
        if self.empty:
            return np.zeros((0, self.dim))
        out = np.zeros((m, self.dim))
        if self.generators.shape[0]:
            w = rng.exponential(scale, size=(m, self.generators.shape[0]))
            out += w @ self.generators
        if self.lineality.shape[1]:
            out += rng.normal(0.0, scale, size=(m, self.lineality.shape[1])) @ self.lineality.T
        return out


class ConvexSet:
    """Base class; subclasses implement the closed-form queries."""

    dim: int
    is_bounded: bool = True

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x) -> float:
        x = _vec(x, self.dim)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol=0.0) -> bool:
        """True iff ``dist(x, C) <= tol``."""
        return self.distance(x) <= tol

    def contains_many(self, X, tol=0.0) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {X.shape[1]}")
        return np.array([self.distance(x) <= tol for x in X], dtype=bool)

    def support(self, xstar) -> ExtReal:
        """``sigma_C(x*) = sup_{c in C} <c, x*>``."""
        y = _vec(xstar, self.dim)
        return ExtReal(self.support_many(y[None, :])[0])

    def support_many(self, Y) -> np.ndarray:
        raise NotImplementedError

    def indicator(self, x, tol=0.0) -> ExtReal:
        return ExtReal(0.0) if self.contains(x, tol) else INF

    def normal_cone(self, x, tol=1e-9) -> NormalConeResult:
        raise NotImplementedError

    def affine_hull(self):
        """Return ``(point, basis)`` with ``aff C = point + span(basis)``."""
        raise NotImplementedError

    def sample(self, rng, m) -> np.ndarray:
        """Random points of C (bounded sets only)."""
        raise NotImplementedError(f"{type(self).__name__} cannot be sampled")

    def sample_extreme(self, rng, m) -> np.ndarray:
        """Random points concentrated on extreme points, for support brute force."""
        return self.sample(rng, m)

    def _cvx_constraints(self, v):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _check(self, x):
        return _vec(x, self.dim)


class Ball(ConvexSet):
    """Closed Euclidean ball ``B(center, radius)``."""

    def __init__(self, center, radius=1.0):
        self.center = _vec(center)
        self.radius = float(radius)
        if not self.radius > 0:
            raise ValueError("Ball radius must be positive")
        self.dim = self.center.shape[0]

    @classmethod
    def unit(cls, dim):
        return cls(np.zeros(dim), 1.0)

    def project(self, x):
        x = self._check(x)
        d = x - self.center
        nd = np.linalg.norm(d)
        if nd <= self.radius:
            return x.copy()
        return self.center + d * (self.radius / nd)

    def contains_many(self, X, tol=0.0):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {X.shape[1]}")
        return np.linalg.norm(X - self.center, axis=1) <= self.radius + tol

    def support_many(self, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return Y @ self.center + self.radius * np.linalg.norm(Y, axis=1)

    def normal_cone(self, x, tol=1e-9):
        x = self._check(x)
        d = x - self.center
        nd = np.linalg.norm(d)
        if nd > self.radius + tol:
            return NormalConeResult.empty_cone(self.dim)
        if nd < self.radius - tol:
            return NormalConeResult(self.dim)
        return NormalConeResult(self.dim, generators=(d / nd)[None, :])

    def affine_hull(self):
        return self.center.copy(), np.eye(self.dim)

    def sample(self, rng, m):
        u = rng.normal(size=(m, self.dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        r = self.radius * rng.random(m) ** (1.0 / self.dim)
        return self.center + u * r[:, None]

    def sample_extreme(self, rng, m):
        u = rng.normal(size=(m, self.dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        return self.center + self.radius * u

    def _cvx_constraints(self, v):
        import cvxpy as cp
        return [cp.norm(v - self.center, 2) <= self.radius]

    def to_dict(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


class Segment(ConvexSet):
    """Line segment ``[a, b] = {a + t(b - a) : 0 <= t <= 1}``."""

    def __init__(self, a, b):
        self.a = _vec(a)
        self.b = _vec(b, self.a.shape[0])
        self.dim = self.a.shape[0]
        self._d = self.b - self.a
        self._dd = float(self._d @ self._d)

    def param(self, x) -> float:
        """Clamped parameter ``t`` of the projection of ``x``."""
        if self._dd == 0.0:
            return 0.0
        t = float((self._check(x) - self.a) @ self._d) / self._dd
        return min(1.0, max(0.0, t))

    def point(self, t):
        return self.a + t * self._d

    def project(self, x):
        return self.point(self.param(x))

    def contains_many(self, X, tol=0.0):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {X.shape[1]}")
        if self._dd == 0.0:
            t = np.zeros(len(X))
        else:
            t = np.clip((X - self.a) @ self._d / self._dd, 0.0, 1.0)
        P = self.a + t[:, None] * self._d
        return np.linalg.norm(X - P, axis=1) <= tol

    def support_many(self, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return np.maximum(Y @ self.a, Y @ self.b)

    def normal_cone(self, x, tol=1e-9):
        x = self._check(x)
        if self.distance(x) > tol:
            return NormalConeResult.empty_cone(self.dim)
        if self._dd == 0.0:
            return NormalConeResult(self.dim, lineality=np.eye(self.dim))
        u = self._d / np.sqrt(self._dd)
        perp = _complement(u[:, None], self.dim)
        if np.linalg.norm(x - self.a) <= tol:
            return NormalConeResult(self.dim, generators=-u[None, :], lineality=perp)
        if np.linalg.norm(x - self.b) <= tol:
            return NormalConeResult(self.dim, generators=u[None, :], lineality=perp)
        return NormalConeResult(self.dim, lineality=perp)

    def affine_hull(self):
        if self._dd == 0.0:
            return self.a.copy(), _empty_basis(self.dim)
        return self.a.copy(), (self._d / np.sqrt(self._dd))[:, None]

    def sample(self, rng, m):
        t = rng.random(m)
        return self.a + t[:, None] * self._d

    def sample_extreme(self, rng, m):
        t = rng.integers(0, 2, size=m).astype(float)
        return self.a + t[:, None] * self._d

    def _cvx_constraints(self, v):
        import cvxpy as cp
        t = cp.Variable()
        return [v == self.a + t * self._d, t >= 0, t <= 1]

    def to_dict(self):
        return {"type": "segment", "a": self.a.tolist(), "b": self.b.tolist()}

    def __repr__(self):
        return f"Segment({self.a.tolist()}, {self.b.tolist()})"


class Box(ConvexSet):
    """Axis-aligned box ``{lower <= x <= upper}``; bounds may be infinite."""

    def __init__(self, lower, upper):
        self.lower = _vec(lower)
        self.upper = _vec(upper, self.lower.shape[0])
        if np.any(self.lower > self.upper):
            raise ValueError("Box requires lower <= upper componentwise")
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise ValueError("Box would be empty")
        self.dim = self.lower.shape[0]
        self.is_bounded = bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    @classmethod
    def whole_space(cls, dim):
        return cls(np.full(dim, -np.inf), np.full(dim, np.inf))

    def project(self, x):
        return np.clip(self._check(x), self.lower, self.upper)

    def contains_many(self, X, tol=0.0):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {X.shape[1]}")
        P = np.clip(X, self.lower, self.upper)
        return np.linalg.norm(X - P, axis=1) <= tol

    def support_many(self, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        # 0 * inf counts as 0: a zero coordinate ignores an infinite bound
        with np.errstate(invalid="ignore"):
            hi = np.where(Y > 0, Y * self.upper, 0.0)
            lo = np.where(Y < 0, Y * self.lower, 0.0)
        return np.sum(hi + lo, axis=1)

    def normal_cone(self, x, tol=1e-9):
        x = self._check(x)
        if self.distance(x) > tol:
            return NormalConeResult.empty_cone(self.dim)
        gens, lin = [], []
        for i in range(self.dim):
            at_lo = abs(x[i] - self.lower[i]) <= tol
            at_hi = abs(x[i] - self.upper[i]) <= tol
            e = np.zeros(self.dim)
            e[i] = 1.0
            if at_lo and at_hi:
                lin.append(e)
            elif at_lo:
                gens.append(-e)
            elif at_hi:
                gens.append(e)
        G = np.array(gens) if gens else None
        L = np.array(lin).T if lin else None
        return NormalConeResult(self.dim, generators=G, lineality=L)

    def affine_hull(self):
        p = np.clip(np.zeros(self.dim), self.lower, self.upper)
        free = np.flatnonzero(self.lower < self.upper)
        return p, np.eye(self.dim)[:, free]

    def sample(self, rng, m):
        if not self.is_bounded:
            raise NotImplementedError("unbounded Box cannot be sampled")
        return self.lower + rng.random((m, self.dim)) * (self.upper - self.lower)

    def sample_extreme(self, rng, m):
        if not self.is_bounded:
            raise NotImplementedError("unbounded Box cannot be sampled")
        bits = rng.integers(0, 2, size=(m, self.dim)).astype(bool)
        return np.where(bits, self.upper, self.lower)

    def _cvx_constraints(self, v):
        cons = []
        for i in range(self.dim):
            if np.isfinite(self.lower[i]):
                cons.append(v[i] >= self.lower[i])
            if np.isfinite(self.upper[i]):
                cons.append(v[i] <= self.upper[i])
        return cons

    def to_dict(self):
        from .extreal import to_json
        return {"type": "box", "lower": [to_json(v) if not np.isfinite(v) else v for v in self.lower.tolist()],
                "upper": [to_json(v) if not np.isfinite(v) else v for v in self.upper.tolist()]}

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"


class Subspace(ConvexSet):
    """Linear subspace ``span(basis)``; the basis is orthonormalized."""

    is_bounded = False

    def __init__(self, basis):
        B = np.asarray(basis, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        self.dim = B.shape[0]
        if B.shape[1] == 0:
            self.basis = _empty_basis(self.dim)
        else:
            s = np.linalg.svd(B, compute_uv=False)
            if s[-1] <= _RANK_TOL * max(1.0, s[0]):
                raise RankDeficientBasis("Subspace basis must have full column rank")
            self.basis = linalg.orth(B)
        self.is_bounded = self.basis.shape[1] == 0

    @classmethod
    def from_constraints(cls, rows, dim):
        """The subspace ``{x : rows @ x = 0}``."""
        R = np.atleast_2d(np.asarray(rows, dtype=float))
        if R.shape[1] != dim:
            raise DimensionMismatch(f"constraint rows must have {dim} columns")
        return cls(linalg.null_space(R, rcond=_RANK_TOL))

    def project(self, x):
        x = self._check(x)
        return self.basis @ (self.basis.T @ x)

    def contains_many(self, X, tol=0.0):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        R = X - (X @ self.basis) @ self.basis.T
        return np.linalg.norm(R, axis=1) <= tol

    def support_many(self, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        # finite only on the orthogonal complement
        R = Y @ self.basis
        scale = np.maximum(1.0, np.linalg.norm(Y, axis=1))
        return np.where(np.linalg.norm(R, axis=1) <= 1e-12 * scale, 0.0, np.inf)

    def normal_cone(self, x, tol=1e-9):
        x = self._check(x)
        if self.distance(x) > tol:
            return NormalConeResult.empty_cone(self.dim)
        return NormalConeResult(self.dim, lineality=_complement(self.basis, self.dim))

    def affine_hull(self):
        return np.zeros(self.dim), self.basis.copy()

    def _cvx_constraints(self, v):
        comp = _complement(self.basis, self.dim)
        if comp.shape[1] == 0:
            return []
        return [comp.T @ v == 0]

    def to_dict(self):
        return {"type": "subspace", "basis": self.basis.T.tolist()}

    def __repr__(self):
        return f"Subspace(dim={self.dim}, rank={self.basis.shape[1]})"


class Singleton(ConvexSet):
    """The one-point set ``{point}``."""

    def __init__(self, point):
        self.point = _vec(point)
        self.dim = self.point.shape[0]

    def project(self, x):
        self._check(x)
        return self.point.copy()

    def support_many(self, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return Y @ self.point

    def normal_cone(self, x, tol=1e-9):
        if self.distance(x) > tol:
            return NormalConeResult.empty_cone(self.dim)
        return NormalConeResult(self.dim, lineality=np.eye(self.dim))

    def affine_hull(self):
        return self.point.copy(), _empty_basis(self.dim)

    def sample(self, rng, m):
        return np.tile(self.point, (m, 1))

    def _cvx_constraints(self, v):
        return [v == self.point]

    def to_dict(self):
        return {"type": "singleton", "point": self.point.tolist()}

    def __repr__(self):
        return f"Singleton({self.point.tolist()})"


def _min_norm_point(P, max_iter=1000, eps=1e-12):
    """Wolfe's algorithm: minimum-norm point of conv(rows of P).

    Returns the barycentric weights over the rows of ``P``.
    """
    m = P.shape[0]
    j = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    S = [j]
    w = np.array([1.0])
    scale = max(1.0, float(np.max(np.abs(P))))
    for _ in range(max_iter):
        x = w @ P[S]
        vals = P @ x
        j = int(np.argmin(vals))
        if x @ x - vals[j] <= eps * scale * scale or j in S:
            break
        S.append(j)
        w = np.append(w, 0.0)
        while True:
            Q = P[S]
            k = len(S)
            # affine minimizer over aff(Q): solve [QQ^T 1; 1^T 0]
            K = np.zeros((k + 1, k + 1))
            K[:k, :k] = Q @ Q.T
            K[:k, k] = 1.0
            K[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            v = np.linalg.lstsq(K, rhs, rcond=None)[0][:k]
            if np.all(v > eps):
                w = v
                break
            mask = v <= eps
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(mask, w / (w - v), np.inf)
            theta = min(1.0, float(np.min(ratios)))
            w = w + theta * (v - w)
            keep = w > eps
            S = [s for s, kp in zip(S, keep) if kp]
            w = w[keep]
            w = w / w.sum()
    full = np.zeros(m)
    full[S] = w
    return full


class Polytope(ConvexSet):
    """Convex hull of finitely many vertices (rows of ``vertices``)."""

    def __init__(self, vertices):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        if V.shape[0] < 1:
            raise ValueError("Polytope needs at least one vertex")
        self.vertices = V
        self.dim = V.shape[1]
        self._p0 = V[0].copy()
        D = V - self._p0
        if np.any(D):
            U, s, _ = np.linalg.svd(D.T, full_matrices=False)
            r = int(np.sum(s > _RANK_TOL * max(1.0, s[0])))
            self._aff = U[:, :r]
        else:
            self._aff = _empty_basis(self.dim)
        self._hull = None

    def project(self, x):
        x = self._check(x)
        w = _min_norm_point(self.vertices - x)
        return w @ self.vertices

    def support_many(self, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return np.max(Y @ self.vertices.T, axis=1)

    def contains_many(self, X, tol=0.0):
        """Vectorized membership by facet inequalities in the affine hull.

        For ``tol > 0`` a point passes when it is within ``tol`` of the affine
        hull and violates no facet by more than ``tol``; this can accept points
        slightly farther than ``tol`` near lower-dimensional faces.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {X.shape[1]}")
        D = X - self._p0
        k = self._aff.shape[1]
        Y = D @ self._aff
        off = np.linalg.norm(D - Y @ self._aff.T, axis=1) if k else np.linalg.norm(D, axis=1)
        ok = off <= tol
        if k == 0:
            return ok
        if k == 1:
            t = (self.vertices - self._p0) @ self._aff[:, 0]
            return ok & (Y[:, 0] >= t.min() - tol) & (Y[:, 0] <= t.max() + tol)
        eq = self._facets()
        return ok & np.all(Y @ eq[:, :-1].T + eq[:, -1] <= tol, axis=1)

    def _facets(self):
        if self._hull is None:
            coords = (self.vertices - self._p0) @ self._aff
            self._hull = ConvexHull(coords)
        return self._hull.equations

    def normal_cone(self, x, tol=1e-9):
        x = self._check(x)
        if self.distance(x) > tol:
            return NormalConeResult.empty_cone(self.dim)
        k = self._aff.shape[1]
        lin = _complement(self._aff, self.dim)
        if k == 0:
            return NormalConeResult(self.dim, lineality=np.eye(self.dim))
        y = (x - self._p0) @ self._aff
        if k == 1:
            t = (self.vertices - self._p0) @ self._aff[:, 0]
            gens = []
            if abs(y[0] - t.min()) <= tol:
                gens.append(-self._aff[:, 0])
            if abs(y[0] - t.max()) <= tol:
                gens.append(self._aff[:, 0])
            return NormalConeResult(self.dim, generators=np.array(gens) if gens else None,
                                    lineality=lin)
        eq = self._facets()
        active = np.abs(eq[:, :-1] @ y + eq[:, -1]) <= tol
        normals = eq[active, :-1] @ self._aff.T
        if normals.shape[0]:
            normals = np.unique(np.round(normals, 12), axis=0)
        return NormalConeResult(self.dim, generators=normals if normals.shape[0] else None,
                                lineality=lin)

    def affine_hull(self):
        return self._p0.copy(), self._aff.copy()

    def sample(self, rng, m):
        w = rng.dirichlet(np.ones(self.vertices.shape[0]), size=m)
        return w @ self.vertices

    def sample_extreme(self, rng, m):
        return self.vertices[rng.integers(0, self.vertices.shape[0], size=m)]

    def _cvx_constraints(self, v):
        import cvxpy as cp
        lam = cp.Variable(self.vertices.shape[0], nonneg=True)
        return [v == self.vertices.T @ lam, cp.sum(lam) == 1]

    def to_dict(self):
        return {"type": "polytope", "vertices": self.vertices.tolist()}

    def __repr__(self):
        return f"Polytope({self.vertices.shape[0]} vertices in R^{self.dim})"


def _is_whole_space(D) -> bool:
    if isinstance(D, Subspace):
        return D.basis.shape[1] == D.dim
    if isinstance(D, Box):
        return bool(np.all(np.isinf(D.lower)) and np.all(np.isinf(D.upper)))
    return False


def _max_step(D1, D2, u):
    """Largest ``eps in [0, 1]`` with ``eps * u in D1 - D2``, or -1 if infeasible."""
    import cvxpy as cp
    d1 = cp.Variable(D1.dim)
    d2 = cp.Variable(D2.dim)
    eps = cp.Variable()
    cons = D1._cvx_constraints(d1) + D2._cvx_constraints(d2)
    cons += [d1 - d2 == eps * u, eps <= 1, eps >= 0]
    prob = cp.Problem(cp.Maximize(eps), cons)
    prob.solve()
    if prob.status not in ("optimal", "optimal_inaccurate"):
        return -1.0
    return float(eps.value)


def minkowski_span_closed_subspace(D1: ConvexSet, D2: ConvexSet, tol=1e-7) -> bool:
    """Decide whether ``U_{lambda>0} lambda (D1 - D2)`` is a linear subspace.

    With ``S = D1 - D2`` the cone generated by ``S`` is a subspace exactly
    when ``0`` lies in the relative interior of ``S``. That holds iff ``0``
    is in ``aff S`` and, for an orthonormal basis ``u_i`` of the direction
    space of ``aff S``, both ``+eps u_i`` and ``-eps u_i`` belong to ``S``
    for some ``eps > 0`` (their convex hull is then a neighbourhood of 0 in
    ``aff S``). In finite dimensions every subspace is closed.
    """
    if D1.dim != D2.dim:
        raise DimensionMismatch(f"sets live in R^{D1.dim} and R^{D2.dim}")
    if _is_whole_space(D1) or _is_whole_space(D2):
        return True
    p1, B1 = D1.affine_hull()
    p2, B2 = D2.affine_hull()
    B = np.hstack([B1, B2])
    U = linalg.orth(B, rcond=_RANK_TOL) if B.shape[1] else _empty_basis(D1.dim)
    off = p1 - p2
    resid = off - U @ (U.T @ off) if U.shape[1] else off
    if np.linalg.norm(resid) > tol * max(1.0, np.linalg.norm(off)):
        return False
    if U.shape[1] == 0:
        return True
    for i in range(U.shape[1]):
        for sign in (1.0, -1.0):
            if _max_step(D1, D2, sign * U[:, i]) <= tol:
                return False
    return True


def set_from_dict(decl: dict, dim=None) -> ConvexSet:
    """Build a set from a scenario declaration such as ``{"type": "ball", ...}``."""
    from .extreal import from_json

    kind = str(decl.get("type", "")).lower()
    if kind == "ball":
        center = decl.get("center")
        if center is None:
            if dim is None:
                raise ValueError("ball needs a center or a dimension")
            center = np.zeros(dim)
        out = Ball(center, decl.get("radius", 1.0))
    elif kind == "segment":
        out = Segment(decl["a"], decl["b"])
    elif kind == "box":
        out = Box([from_json(v) for v in decl["lower"]], [from_json(v) for v in decl["upper"]])
    elif kind == "subspace":
        if "basis" in decl:
            out = Subspace(np.asarray(decl["basis"], dtype=float).T)
        else:
            out = Subspace.from_constraints(decl["constraints"], dim)
    elif kind == "singleton":
        out = Singleton(decl["point"])
    elif kind == "polytope":
        out = Polytope(decl["vertices"])
    else:
        raise ValueError(f"unknown set type {decl.get('type')!r}")
    if dim is not None and out.dim != dim:
        raise DimensionMismatch(f"set has dimension {out.dim}, expected {dim}")
    return out
