"""Proper convex functions on R^d and their Fenchel conjugates.

Two conjugation backends are provided and meant to be cross-checked:

* :meth:`ConvexFunction.conjugate` applies exact rules (indicator/support
  duality, linear, quadratic, norm, separable sums, shifts) and raises
  :class:`~bigconj.errors.NoClosedForm` otherwise;
* :func:`conjugate_grid` computes ``max_x <x, y> - f(x)`` over a uniform
  grid, either by brute force or (d = 1) by a linear-time Legendre transform
  over the lower convex hull. For d = 2 the transform is factored into
  nested one-dimensional transforms.

Vectorized evaluation (``values``) works on float arrays with ``np.inf``;
scalar evaluation (``eval``) returns :class:`~bigconj.extreal.ExtReal`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import AllInfinite, DimensionMismatch, NoClosedForm
from .extreal import ExtReal, from_json, to_json
from .grids import DEFAULT_N_1D, DEFAULT_N_2D, DEFAULT_R, GridSpec
from .sets import Ball, ConvexSet, Singleton, _vec

__all__ = [
    "ConvexFunction", "Indicator", "Support", "Linear", "Quadratic", "Norm",
    "Sum", "SeparableSum", "Shifted", "GridFunction", "conjugate_grid",
    "conjugate_pointwise", "legendre_1d", "legendre_1d_brute",
    "biconjugate_check", "BiconjugateReport",
]

_MEMBER_TOL = 1e-12


class ConvexFunction:
    """Base class. Subclasses implement ``values`` and, if known, ``conjugate``."""

    dim: int

    def values(self, X) -> np.ndarray:
        raise NotImplementedError

    def eval(self, x) -> ExtReal:
        x = _vec(x, self.dim)
        return ExtReal(self.values(x[None, :])[0])

    __call__ = eval

    def conjugate(self) -> "ConvexFunction":
        raise NoClosedForm(f"no conjugation rule for {type(self).__name__}")

    def _rows(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {X.shape[1]}")
        return X


class Indicator(ConvexFunction):
    """``iota_C``: 0 on C, ``+inf`` elsewhere."""

    def __init__(self, C: ConvexSet, tol=_MEMBER_TOL):
        self.C = C
        self.dim = C.dim
        self.tol = tol

    def values(self, X):
        X = self._rows(X)
        return np.where(self.C.contains_many(X, self.tol), 0.0, np.inf)

    def conjugate(self):
        return Support(self.C)

    def __repr__(self):
        return f"Indicator({self.C!r})"


class Support(ConvexFunction):
    """``sigma_C(x*) = sup_{c in C} <c, x*>``."""

    def __init__(self, C: ConvexSet):
        self.C = C
        self.dim = C.dim

    def values(self, X):
        return self.C.support_many(self._rows(X))

    def conjugate(self):
        return Indicator(self.C)

    def __repr__(self):
        return f"Support({self.C!r})"


class Linear(ConvexFunction):
    """Affine function ``<a, x> + b``; ``a = 0`` gives a constant."""

    def __init__(self, a, b=0.0):
        self.a = _vec(a)
        self.b = float(b)
        self.dim = self.a.shape[0]

    def values(self, X):
        return self._rows(X) @ self.a + self.b

    def conjugate(self):
        ind = Indicator(Singleton(self.a))
        if self.b == 0.0:
            return ind
        return Sum(ind, Linear(np.zeros(self.dim), -self.b))

    def __repr__(self):
        return f"Linear({self.a.tolist()}, {self.b})"


class Quadratic(ConvexFunction):
    """``0.5 x^T Q x + <a, x> + b`` with Q symmetric positive semidefinite."""

    def __init__(self, Q, a=None, b=0.0):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.shape[0] != Q.shape[1]:
            raise DimensionMismatch("Q must be square")
        self.Q = 0.5 * (Q + Q.T)
        self.dim = Q.shape[0]
        self.a = np.zeros(self.dim) if a is None else _vec(a, self.dim)
        self.b = float(b)
        if np.linalg.eigvalsh(self.Q)[0] < -1e-12 * max(1.0, np.abs(self.Q).max()):
            raise ValueError("Q must be positive semidefinite")

    def values(self, X):
        X = self._rows(X)
        return 0.5 * np.einsum("ij,jk,ik->i", X, self.Q, X) + X @ self.a + self.b

    def conjugate(self):
        w = np.linalg.eigvalsh(self.Q)
        if w[0] <= 1e-12 * max(1.0, w[-1]):
            raise NoClosedForm("Quadratic conjugate needs Q positive definite")
        Qi = np.linalg.inv(self.Q)
        Qi = 0.5 * (Qi + Qi.T)
        return Quadratic(Qi, -Qi @ self.a, 0.5 * self.a @ Qi @ self.a - self.b)

    def __repr__(self):
        return f"Quadratic(dim={self.dim})"


class Norm(ConvexFunction):
    """``scale * ||x||_2``."""

    def __init__(self, dim, scale=1.0):
        self.dim = int(dim)
        self.scale = float(scale)
        if not self.scale > 0:
            raise ValueError("Norm scale must be positive")

    def values(self, X):
        return self.scale * np.linalg.norm(self._rows(X), axis=1)

    def conjugate(self):
        return Indicator(Ball(np.zeros(self.dim), self.scale))

    def __repr__(self):
        return f"Norm(dim={self.dim}, scale={self.scale})"


class Sum(ConvexFunction):
    """Pointwise sum ``f + g`` on the same space."""

    def __init__(self, f: ConvexFunction, g: ConvexFunction):
        if f.dim != g.dim:
            raise DimensionMismatch(f"Sum of R^{f.dim} and R^{g.dim} functions")
        self.f, self.g = f, g
        self.dim = f.dim

    def values(self, X):
        X = self._rows(X)
        return self.f.values(X) + self.g.values(X)

    def conjugate(self):
        # only tilting by an affine term has a closed form here
        for f, g in ((self.f, self.g), (self.g, self.f)):
            if isinstance(g, Linear):
                fc = f.conjugate()
                shifted = Shifted(fc, g.a) if np.any(g.a) else fc
                if g.b == 0.0:
                    return shifted
                return Sum(shifted, Linear(np.zeros(self.dim), -g.b))
        raise NoClosedForm("conjugate of a general sum is an infimal convolution")

    def __repr__(self):
        return f"Sum({self.f!r}, {self.g!r})"


class SeparableSum(ConvexFunction):
    """``(f (+) g)(x, y) = f(x) + g(y)`` on R^{d1} x R^{d2}."""

    def __init__(self, f: ConvexFunction, g: ConvexFunction):
        self.f, self.g = f, g
        self.dim = f.dim + g.dim

    def values(self, X):
        X = self._rows(X)
        d1 = self.f.dim
        return self.f.values(X[:, :d1]) + self.g.values(X[:, d1:])

    def conjugate(self):
        return SeparableSum(self.f.conjugate(), self.g.conjugate())

    def swapped(self) -> "SeparableSum":
        return SeparableSum(self.g, self.f)

    def __repr__(self):
        return f"SeparableSum({self.f!r}, {self.g!r})"


class Shifted(ConvexFunction):
    """``x -> f(x - shift)``."""

    def __init__(self, f: ConvexFunction, shift):
        self.f = f
        self.shift = _vec(shift, f.dim)
        self.dim = f.dim

    def values(self, X):
        return self.f.values(self._rows(X) - self.shift)

    def conjugate(self):
        return Sum(self.f.conjugate(), Linear(self.shift, 0.0))

    def __repr__(self):
        return f"Shifted({self.f!r}, {self.shift.tolist()})"


class GridFunction(ConvexFunction):
    """Values on the uniform grid ``[-R, R]^d`` (d in {1, 2}).

    Off-grid evaluation uses multilinear interpolation over the nodes with
    positive weight; if any of them is ``+inf`` the result is ``+inf``.
    Outside the box the value is ``+inf``.
    """

    def __init__(self, values, radius, dim=None):
        V = np.asarray(values, dtype=float)
        if dim is None:
            dim = V.ndim
        if dim not in (1, 2) or V.ndim != dim or len(set(V.shape)) != 1:
            raise ValueError("GridFunction needs a 1-d or square 2-d value array")
        if np.any(np.isnan(V)) or np.any(V == -np.inf):
            raise ValueError("grid values must be finite or +inf")
        if not np.any(np.isfinite(V)):
            raise AllInfinite("grid function is +inf everywhere")
        self.grid = GridSpec(float(radius), V.shape[0])
        self.dim = dim
        self.table = V

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def radius(self) -> float:
        return self.grid.radius

    @property
    def points(self) -> int:
        return self.grid.points

    def nodes(self) -> np.ndarray:
        return self.grid.nodes(self.dim)

    def values(self, X):
        X = self._rows(X)
        R, N, h = self.radius, self.points, self.h
        out = np.full(len(X), np.inf)
        inside = np.all(np.abs(X) <= R * (1 + 1e-14), axis=1)
        if not np.any(inside):
            return out
        U = (np.clip(X[inside], -R, R) + R) / h
        idx = np.clip(np.floor(U).astype(int), 0, N - 2)
        frac = np.clip(U - idx, 0.0, 1.0)
        acc = np.zeros(len(U))
        poisoned = np.zeros(len(U), dtype=bool)
        for corner in np.ndindex(*([2] * self.dim)):
            w = np.ones(len(U))
            node = []
            for k, c in enumerate(corner):
                w = w * (frac[:, k] if c else 1.0 - frac[:, k])
                node.append(idx[:, k] + c)
            v = self.table[tuple(node)]
            active = w > 0
            poisoned |= active & np.isinf(v)
            acc += np.where(active & np.isfinite(v), w * np.where(np.isfinite(v), v, 0.0), 0.0)
        out[inside] = np.where(poisoned, np.inf, acc)
        return out

    def conjugate(self):
        raise NoClosedForm("grid functions are conjugated with conjugate_grid")

    def to_csv(self, path):
        """Write ``dim,R,N`` header then ``index,value`` rows (flat C-order index)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["dim", "R", "N"])
            w.writerow([self.dim, repr(self.radius), self.points])
            w.writerow(["index", "value"])
            for i, v in enumerate(self.table.ravel()):
                w.writerow([i, to_json(v)])

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if rows[0] != ["dim", "R", "N"] or rows[2] != ["index", "value"]:
            raise ValueError(f"{path}: not a grid-function CSV")
        dim, R, N = int(rows[1][0]), float(rows[1][1]), int(rows[1][2])
        flat = np.full(N ** dim, np.nan)
        for idx, val in rows[3:]:
            flat[int(idx)] = from_json(val)
        if np.any(np.isnan(flat)):
            raise ValueError(f"{path}: missing grid values")
        return cls(flat.reshape((N,) * dim), R, dim)

    def __repr__(self):
        return f"GridFunction(dim={self.dim}, R={self.radius}, N={self.points})"


# ---------------------------------------------------------------------------
# Grid conjugation
# ---------------------------------------------------------------------------

def legendre_1d_brute(x, fx, y) -> np.ndarray:
    """``g(y_j) = max_i x_i y_j - f_i`` by full O(N M) enumeration."""
    x = np.asarray(x, dtype=float)
    fx = np.asarray(fx, dtype=float)
    if not np.any(np.isfinite(fx)):
        raise AllInfinite("function is +inf on the whole grid")
    y = np.asarray(y, dtype=float)
    out = np.empty(len(y))
    step = max(1, 4_000_000 // max(1, len(x)))
    for s in range(0, len(y), step):
        out[s:s + step] = np.max(x[None, :] * y[s:s + step, None] - fx[None, :], axis=1)
    return out


def _lower_hull(xs, fs):
    """Indices of the lower convex hull of sorted points, collinear points kept."""
    hull = []
    for i in range(len(xs)):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (xs[a] - xs[o]) * (fs[i] - fs[o]) - (fs[a] - fs[o]) * (xs[i] - xs[o])
            if cross < 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def legendre_1d(x, fx, y) -> np.ndarray:
    """Linear-time discrete Legendre transform.

    ``x`` must be increasing. The maximizer of ``x_i y - f_i`` lies on the
    lower convex hull of ``(x_i, f_i)`` and moves right as ``y`` grows, so
    one pass over sorted ``y`` with a monotone pointer on the hull suffices.
    Values are computed with the same expression as
    :func:`legendre_1d_brute`, which makes the two agree bit for bit.
    """
    x = np.asarray(x, dtype=float)
    fx = np.asarray(fx, dtype=float)
    y = np.asarray(y, dtype=float)
    fin = np.isfinite(fx)
    if not np.any(fin):
        raise AllInfinite("function is +inf on the whole grid")
    xs, fs = x[fin], fx[fin]
    hull = _lower_hull(xs.tolist(), fs.tolist())
    hx, hf = xs[hull], fs[hull]
    order = np.argsort(y, kind="stable")
    out = np.empty(len(y))
    k, last = 0, len(hull) - 1
    for j in order:
        yj = y[j]
        cur = hx[k] * yj - hf[k]
        while k < last:
            nxt = hx[k + 1] * yj - hf[k + 1]
            if nxt >= cur:
                k += 1
                cur = nxt
            else:
                break
        out[j] = cur
    return out


def _conj2d(xaxis, F, yaxis, fast=True):
    """2-d transform via nested 1-d transforms over rows then columns."""
    t1 = legendre_1d if fast else legendre_1d_brute
    N = len(xaxis)
    H = np.full((N, len(yaxis)), -np.inf)
    for i in range(N):
        if np.any(np.isfinite(F[i])):
            H[i] = t1(xaxis, F[i], yaxis)
    G = np.empty((len(yaxis), len(yaxis)))
    negH = -H
    for k in range(len(yaxis)):
        G[:, k] = t1(xaxis, negH[:, k], yaxis)
    return G


def conjugate_grid(f: ConvexFunction, box_radius=DEFAULT_R, N=None, method="fast") -> GridFunction:
    """Discrete conjugate of ``f`` sampled on ``[-R, R]^d``, returned on the same box.

    ``method`` is ``"fast"`` (hull-based Legendre transform, nested for
    d = 2) or ``"brute"`` (full enumeration, O(N^{2d})).
    """
    d = f.dim
    if d not in (1, 2):
        raise ValueError("grid conjugation supports d in {1, 2}; use conjugate_pointwise")
    if N is None:
        N = DEFAULT_N_1D if d == 1 else DEFAULT_N_2D
    gs = GridSpec(float(box_radius), int(N))
    ax = gs.axis()
    if isinstance(f, GridFunction) and f.points == N and f.radius == gs.radius:
        F = f.table
    else:
        F = f.values(gs.nodes(d)).reshape((N,) * d)
    if not np.any(np.isfinite(F)):
        raise AllInfinite("function is +inf on the whole box")
    if d == 1:
        g = legendre_1d(ax, F, ax) if method == "fast" else legendre_1d_brute(ax, F, ax)
    elif method == "fast":
        g = _conj2d(ax, F, ax)
    else:
        P = gs.nodes(2)
        g = legendre_1d_brute_nd(P, F.ravel(), P).reshape(N, N)
    return GridFunction(g, gs.radius, d)


def legendre_1d_brute_nd(P, fP, Y) -> np.ndarray:
    """``max_i <p_i, y_j> - f_i`` for point clouds of any dimension."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    fP = np.asarray(fP, dtype=float)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    keep = np.isfinite(fP)
    if not np.any(keep):
        raise AllInfinite("function is +inf on every sample point")
    P, fP = P[keep], fP[keep]
    out = np.empty(len(Y))
    step = max(1, 4_000_000 // len(P))
    for s in range(0, len(Y), step):
        out[s:s + step] = np.max(Y[s:s + step] @ P.T - fP[None, :], axis=1)
    return out


def conjugate_pointwise(f: ConvexFunction, Y, primal_points) -> np.ndarray:
    """``f*(y)`` at query rows ``Y`` as a sup over the given primal sample."""
    P = np.atleast_2d(np.asarray(primal_points, dtype=float))
    return legendre_1d_brute_nd(P, f.values(P), Y)


@dataclass
class BiconjugateReport:
    gap: float
    h: float
    n_points: int

    @property
    def constant(self) -> float:
        """Measured ``gap / h``."""
        return self.gap / self.h


def biconjugate_check(f: ConvexFunction, box_radius=DEFAULT_R, N=None, margin=2) -> BiconjugateReport:
    """Measure ``sup |f** - f|`` over the interior finite region of the grid.

    The region is the set of nodes where ``f`` is finite, which lie in
    ``[-R/2, R/2]^d`` and are at least ``margin`` nodes away from any node
    where ``f = +inf``.
    """
    g = conjugate_grid(f, box_radius, N)
    gg = conjugate_grid(g, box_radius, g.points)
    d, Np = f.dim, g.points
    F = f.values(g.nodes()).reshape((Np,) * d)
    bad = ~np.isfinite(F)
    if margin > 0 and np.any(bad):
        from scipy.ndimage import binary_dilation
        bad = binary_dilation(bad, iterations=margin)
    nodes = g.nodes()
    central = np.all(np.abs(nodes) <= box_radius / 2 + 1e-12, axis=1).reshape((Np,) * d)
    region = central & ~bad
    if not np.any(region):
        raise AllInfinite("no interior finite region on this grid")
    gap = float(np.max(np.abs(gg.table[region] - F[region])))
    return BiconjugateReport(gap=gap, h=g.h, n_points=int(region.sum()))
