"""Bivariate functions ``F(x, x*)`` on R^n x R^n.

Covers Fitzpatrick functions (from a sampled graph, of a normal cone, of a
monotone linear relation), the graph-indicator-plus-pairing function,
partial infimal convolution in the second variable, conjugation with the
transposed argument order ``F*(x*, x)``, ``pos F`` extraction and BC checks.

Argument order is fixed: ``F`` is evaluated at ``(x, x*)`` and its
conjugate is always queried as ``flipped_conjugate(F, xstar, x)``, i.e.

    F*(x*, x) = sup_{(y, y*)} <y, x*> + <y*, x> - F(y, y*).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import linalg, optimize

from .errors import AllInfinite, DimensionMismatch, HypothesisFailed, NoClosedForm
from .extreal import ExtReal
from .functions import Indicator, SeparableSum, Support
from .grids import GridSpec, pair_grid
from .relations import LinearRelation
from .sets import Box, ConvexSet, Subspace, _vec, minkowski_span_closed_subspace

__all__ = [
    "BivariateFunction", "FitzFromSample", "FitzNormalCone", "FitzLinearClosed",
    "GraphIndicatorPlusPairing", "PartialInfConv", "Explicit", "PosSet",
    "JFunction", "InfConvResult", "BCReport", "flipped_conjugate",
    "flipped_conjugate_many", "partial_inf_conv", "bc_check", "pos_extract",
    "simons_zalinescu_crosscheck", "fact34_M_set", "sample_normal_cone_graph_1d",
]

GRAPH_TOL = 1e-9
_EIG_TOL = 1e-10


def _rows(X, n):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != n:
        raise DimensionMismatch(f"expected dimension {n}, got {X.shape[1]}")
    return X


def _pairing(X, Xs):
    return np.einsum("ij,ij->i", X, Xs)


class BivariateFunction:
    """Base class. ``values`` is vectorized over rows of ``X`` and ``Xs``."""

    n: int

    def values(self, X, Xs) -> np.ndarray:
        raise NotImplementedError

    def eval(self, x, xstar) -> ExtReal:
        x = _vec(x, self.n)
        xs = _vec(xstar, self.n)
        return ExtReal(self.values(x[None, :], xs[None, :])[0])

    __call__ = eval

    def conj_closed(self, XS, X) -> np.ndarray:
        """Closed-form ``F*(x*, x)`` at rows of ``(XS, X)``."""
        raise NoClosedForm(f"no closed-form conjugate for {type(self).__name__}")

    def x_domain(self) -> ConvexSet:
        """A convex set equal to the projection ``P_X dom F``."""
        return Box.whole_space(self.n)

    def primal_points(self, grid: GridSpec):
        """Sample of ``dom F`` used by grid conjugation; default: product grid."""
        return pair_grid(grid, grid, self.n)

    def graph_form(self) -> Optional[LinearRelation]:
        """Relation ``A`` when ``F = iota_{gra A} + <., .>`` exactly, else None."""
        return None


class FitzFromSample(BivariateFunction):
    """``F(x, x*) = max_i <x, a_i*> + <a_i, x*> - <a_i, a_i*>`` over sampled graph points."""

    def __init__(self, A_points, Astar_points):
        self.A = np.atleast_2d(np.asarray(A_points, dtype=float))
        self.As = np.atleast_2d(np.asarray(Astar_points, dtype=float))
        if self.A.shape != self.As.shape:
            raise DimensionMismatch("graph sample blocks differ in shape")
        self.n = self.A.shape[1]
        self._c = _pairing(self.A, self.As)

    def values(self, X, Xs):
        X, Xs = _rows(X, self.n), _rows(Xs, self.n)
        out = np.empty(len(X))
        step = max(1, 2_000_000 // len(self.A))
        for s in range(0, len(X), step):
            V = X[s:s + step] @ self.As.T + Xs[s:s + step] @ self.A.T - self._c
            out[s:s + step] = V.max(axis=1)
        return out

    def conj_closed(self, XS, X):
        """Conjugate of a max of affine functions, one LP per query:

        ``F*(x*, x) = min sum l_i <a_i, a_i*>`` subject to ``sum l_i a_i* = x*``,
        ``sum l_i a_i = x``, ``l`` in the simplex (``+inf`` when infeasible).
        """
        XS, X = _rows(XS, self.n), _rows(X, self.n)
        m = len(self.A)
        A_eq = np.vstack([self.As.T, self.A.T, np.ones((1, m))])
        out = np.empty(len(X))
        for k in range(len(X)):
            b_eq = np.concatenate([XS[k], X[k], [1.0]])
            res = optimize.linprog(self._c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None),
                                   method="highs")
            out[k] = res.fun if res.status == 0 else np.inf
        return out


class FitzNormalCone(BivariateFunction):
    """``F_{N_C}(x, x*) = iota_C(x) + sigma_C(x*)``."""

    def __init__(self, C: ConvexSet, tol=1e-12):
        self.C = C
        self.n = C.dim
        self.tol = tol

    def values(self, X, Xs):
        X, Xs = _rows(X, self.n), _rows(Xs, self.n)
        ind = np.where(self.C.contains_many(X, self.tol), 0.0, np.inf)
        return ind + self.C.support_many(Xs)

    def as_separable(self) -> SeparableSum:
        return SeparableSum(Indicator(self.C, self.tol), Support(self.C))

    def conj_closed(self, XS, X):
        # (iota_C (+) sigma_C)* = sigma_C (+) iota_C, evaluated at (x*, x)
        XS, X = _rows(XS, self.n), _rows(X, self.n)
        return self.as_separable().conjugate().values(np.hstack([XS, X]))

    def x_domain(self):
        return self.C


class _LinearFitzBase(BivariateFunction):
    def __init__(self, A: LinearRelation):
        self.A = A
        self.n = A.n
        H = A.pairing_form()
        if H.size:
            w, V = np.linalg.eigh(H)
        else:
            w, V = np.zeros(0), np.zeros((0, 0))
        scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
        self._psd = bool(w.size == 0 or w[0] >= -_EIG_TOL * scale)
        pos = w > _EIG_TOL * scale
        self._Vr, self._wr = V[:, pos], w[pos]
        self._Vk = V[:, ~pos]

    def _fitz_values(self, X, Xs):
        """``F_A = sup_z c^T z - z^T H z`` with ``c = G2^T x + G1^T x*``."""
        if not self._psd:
            return np.full(len(X), np.inf)
        A = self.A
        if A.dim == 0:
            return np.zeros(len(X))
        Cm = X @ A.G2 + Xs @ A.G1
        scale = np.maximum(1.0, np.linalg.norm(np.hstack([X, Xs]), axis=1))
        finite = np.ones(len(X), dtype=bool)
        if self._Vk.shape[1]:
            finite = np.linalg.norm(Cm @ self._Vk, axis=1) <= GRAPH_TOL * scale
        proj = Cm @ self._Vr
        val = 0.25 * np.sum(proj * proj / self._wr, axis=1) if self._wr.size else np.zeros(len(X))
        return np.where(finite, val, np.inf)

    def _graph_values(self, X, Xs):
        inside = self.A.contains_many(X, Xs, GRAPH_TOL)
        return np.where(inside, _pairing(X, Xs), np.inf)

    def domain_subspace(self) -> np.ndarray:
        """Orthonormal basis (2n x k) of the subspace ``dom F``."""
        raise NotImplementedError

    def primal_points(self, grid: GridSpec):
        W = self.domain_subspace()
        if W.shape[1] == 0:
            return np.zeros((1, self.n)), np.zeros((1, self.n))
        P = grid.nodes(W.shape[1]) @ W.T
        return P[:, : self.n], P[:, self.n:]

    def _fitz_domain_subspace(self):
        A = self.A
        if not self._psd:
            return np.zeros((2 * self.n, 0))
        if self._Vk.shape[1] == 0:
            return np.eye(2 * self.n)
        Q = self._Vk.T
        cons = np.hstack([Q @ A.G2.T, Q @ A.G1.T])
        return linalg.null_space(cons, rcond=_EIG_TOL)


class FitzLinearClosed(_LinearFitzBase):
    """Fitzpatrick function ``F_A`` of a closed monotone linear relation, in closed form.

    On graph coordinates ``(a, a*) = (G1 z, G2 z)`` the defining supremum is
    ``sup_z c^T z - z^T H z`` with ``H`` the (PSD) pairing form, giving
    ``c^T H^+ c / 4`` when ``c`` is in the range of ``H`` and ``+inf``
    otherwise.
    """

    def __init__(self, A: LinearRelation, check=True):
        super().__init__(A)
        if check and not self._psd:
            raise HypothesisFailed("monotone", "FitzLinearClosed needs a monotone relation")

    def values(self, X, Xs):
        X, Xs = _rows(X, self.n), _rows(Xs, self.n)
        return self._fitz_values(X, Xs)

    def conj_closed(self, XS, X):
        # F_A*(x*, x) = iota_{gra A}(x, x*) + <x, x*>
        XS, X = _rows(XS, self.n), _rows(X, self.n)
        return self._graph_values(X, XS)

    def domain_subspace(self):
        return self._fitz_domain_subspace()

    def x_domain(self):
        W = self.domain_subspace()
        return Subspace(linalg.orth(W[: self.n], rcond=_EIG_TOL) if W.shape[1] else np.zeros((self.n, 0)))

    def graph_form(self):
        rep = self.A.classify()
        return self.A if (rep.skew and rep.maximal) else None


class GraphIndicatorPlusPairing(_LinearFitzBase):
    """``(x, x*) -> iota_{gra A}(x, x*) + <x, x*>``; its flipped conjugate is ``F_A``."""

    def values(self, X, Xs):
        X, Xs = _rows(X, self.n), _rows(Xs, self.n)
        return self._graph_values(X, Xs)

    def conj_closed(self, XS, X):
        XS, X = _rows(XS, self.n), _rows(X, self.n)
        return self._fitz_values(X, XS)

    def domain_subspace(self):
        return self.A.graph_basis

    def x_domain(self):
        return Subspace(self.A.dom_basis)

    def graph_form(self):
        return self.A


@dataclass
class InfConvResult:
    value: ExtReal
    argmin: Optional[np.ndarray]
    backend: str
    refinement_change: Optional[float] = None


class PartialInfConv(BivariateFunction):
    """``(F1 []_2 F2)(x, x*) = inf_v F1(x, x* - v) + F2(x, v)``.

    When ``F1 = iota_{gra A} + <., .>`` with ``A`` single-valued on its domain
    the infimum is attained at ``v = x* - A x`` and the value is
    ``<x, A x> + F2(x, x* - A x)`` for ``x in dom A`` (``+inf`` otherwise).
    Otherwise ``v`` ranges over ``inner_grid``.
    """

    def __init__(self, F1: BivariateFunction, F2: BivariateFunction, inner_grid: Optional[GridSpec] = None):
        if F1.n != F2.n:
            raise DimensionMismatch("partial inf-convolution of functions on different spaces")
        self.F1, self.F2 = F1, F2
        self.n = F1.n
        self.inner_grid = inner_grid
        A = F1.graph_form()
        self._A = A if (A is not None and A.multivalued_part.shape[1] == 0) else None
        if self._A is not None:
            self._M = self._A.selection_matrix()
            self._dom = self._A.dom_basis

    @property
    def exact(self) -> bool:
        return self._A is not None

    def _exact(self, X, Xs):
        D = self._dom
        resid = X - (X @ D) @ D.T
        scale = np.maximum(1.0, np.linalg.norm(X, axis=1))
        in_dom = np.linalg.norm(resid, axis=1) <= GRAPH_TOL * scale
        AX = X @ self._M.T
        V = Xs - AX
        val = _pairing(X, AX) + self.F2.values(X, V)
        return np.where(in_dom, val, np.inf), V

    def _grid(self, X, Xs, grid):
        Vn = grid.nodes(self.n)
        reach = float(np.max(np.abs(Xs), initial=0.0))
        if reach > grid.radius:
            # keep the inner search as wide as the queried x*
            Vn = np.vstack([Vn, GridSpec(reach, grid.points).nodes(self.n)])
        nv = len(Vn)
        vals = np.empty(len(X))
        arg = np.empty((len(X), self.n))
        step = max(1, 1_000_000 // nv)
        for s in range(0, len(X), step):
            c = len(X[s:s + step])
            Xk = np.repeat(X[s:s + step], nv, axis=0)
            Vk = np.tile(Vn, (c, 1))
            tot = (self.F1.values(Xk, np.repeat(Xs[s:s + step], nv, axis=0) - Vk)
                   + self.F2.values(Xk, Vk)).reshape(c, nv)
            j = np.argmin(tot, axis=1)
            vals[s:s + c] = tot[np.arange(c), j]
            arg[s:s + c] = Vn[j]
        return vals, arg

    def evaluate(self, X, Xs, grid=None):
        X, Xs = _rows(X, self.n), _rows(Xs, self.n)
        if self.exact:
            return self._exact(X, Xs)
        grid = grid or self.inner_grid
        if grid is None:
            raise NoClosedForm("partial inf-convolution needs an inner grid")
        return self._grid(X, Xs, grid)

    def values(self, X, Xs):
        return self.evaluate(X, Xs)[0]

    def x_domain(self):
        return _intersect_domains(self.F1.x_domain(), self.F2.x_domain())


def _intersect_domains(D1, D2):
    for a, b in ((D1, D2), (D2, D1)):
        if isinstance(a, Box) and np.all(np.isinf(a.lower)) and np.all(np.isinf(a.upper)):
            return b
    raise NoClosedForm("intersection of two proper domains is not modelled")


class Explicit(BivariateFunction):
    """User-supplied vectorized evaluator; ``support`` is the finite-support grid sample."""

    def __init__(self, n, evaluator: Callable, support=None):
        self.n = int(n)
        self._f = evaluator
        self._support = support

    def values(self, X, Xs):
        X, Xs = _rows(X, self.n), _rows(Xs, self.n)
        return np.asarray(self._f(X, Xs), dtype=float)

    def primal_points(self, grid):
        if self._support is not None:
            return self._support
        return super().primal_points(grid)


# ---------------------------------------------------------------------------
# Conjugation
# ---------------------------------------------------------------------------

def _grid_sup(F, XS, X, points):
    Y, Ys = points
    fv = F.values(Y, Ys)
    keep = np.isfinite(fv)
    if not np.any(keep):
        raise AllInfinite("F is +inf on every primal sample point")
    Y, Ys, fv = Y[keep], Ys[keep], fv[keep]
    out = np.empty(len(X))
    step = max(1, 4_000_000 // len(Y))
    for s in range(0, len(X), step):
        V = XS[s:s + step] @ Y.T + X[s:s + step] @ Ys.T - fv
        out[s:s + step] = V.max(axis=1)
    return out


def flipped_conjugate_many(F: BivariateFunction, XS, X, primal_grid=None, backend="auto",
                           escalate=False, growth_rtol=0.2) -> np.ndarray:
    """``F*(x*, x)`` at rows of ``(XS, X)``.

    ``backend`` is ``"closed"``, ``"grid"`` or ``"auto"`` (closed form when the
    variant has one). ``primal_grid`` is a :class:`GridSpec` (sampled through
    ``F.primal_points``) or an explicit ``(Y, Ys)`` pair of arrays.

    With ``escalate=True`` (GridSpec only) the sup is also taken over boxes
    of radius 10R and 100R, cumulatively; values that grow linearly in the
    radius are reported as ``+inf``.
    """
    XS, X = _rows(XS, F.n), _rows(X, F.n)
    if backend in ("auto", "closed"):
        try:
            return F.conj_closed(XS, X)
        except NoClosedForm:
            if backend == "closed":
                raise
    if primal_grid is None:
        raise ValueError("grid conjugation needs a primal grid")
    if not isinstance(primal_grid, GridSpec):
        return _grid_sup(F, XS, X, primal_grid)
    if not escalate:
        return _grid_sup(F, XS, X, F.primal_points(primal_grid))
    # cumulative sups over nested boxes keep the fine resolution near the origin
    v = [_grid_sup(F, XS, X, F.primal_points(primal_grid))]
    for f in (10.0, 100.0):
        v.append(np.maximum(v[-1], _grid_sup(F, XS, X, F.primal_points(primal_grid.scaled(f)))))
    d1, d2 = v[1] - v[0], v[2] - v[1]
    R0 = primal_grid.radius
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = d2 / d1
    linear = (d1 > 1e-6 * R0 * 10) & (np.abs(ratio - 10.0) <= 10.0 * growth_rtol)
    return np.where(linear, np.inf, v[2])


def flipped_conjugate(F: BivariateFunction, xstar, x, primal_grid=None, backend="auto",
                      escalate=False) -> ExtReal:
    xs = _vec(xstar, F.n)
    x = _vec(x, F.n)
    return ExtReal(flipped_conjugate_many(F, xs[None, :], x[None, :], primal_grid,
                                          backend, escalate)[0])


def partial_inf_conv(F1, F2, x, xstar, inner_grid: Optional[GridSpec] = None, refine=False) -> InfConvResult:
    """Evaluate ``(F1 []_2 F2)(x, x*)`` and record the minimizing ``v``.

    With ``refine=True`` on the grid path the value is recomputed with half
    the spacing and the change is reported.
    """
    P = PartialInfConv(F1, F2, inner_grid)
    x = _vec(x, P.n)[None, :]
    xs = _vec(xstar, P.n)[None, :]
    val, arg = P.evaluate(x, xs)
    if P.exact:
        return InfConvResult(ExtReal(val[0]), arg[0], "exact")
    change = None
    if refine:
        val2, arg2 = P.evaluate(x, xs, inner_grid.refined())
        change = float(abs(val2[0] - val[0])) if np.isfinite(val2[0]) and np.isfinite(val[0]) else (
            0.0 if val2[0] == val[0] else np.inf)
        val, arg = val2, arg2
    return InfConvResult(ExtReal(val[0]), arg[0], "grid", change)


# ---------------------------------------------------------------------------
# BC verification and sum cross-checks
# ---------------------------------------------------------------------------

@dataclass
class BCReport:
    passed: bool
    n_points: int
    worst_conjugate_margin: float
    worst_pairing_margin: float
    violator: Optional[tuple] = None
    backend: str = "auto"
    worst_convexity_margin: float = np.inf
    convexity_violator: Optional[tuple] = None

    def to_dict(self):
        v = None if self.violator is None else [np.asarray(p).tolist() for p in self.violator]
        cv = (None if self.convexity_violator is None
              else [np.asarray(p).tolist() for p in self.convexity_violator])
        return {"passed": self.passed, "n_points": self.n_points,
                "worst_conjugate_margin": _num(self.worst_conjugate_margin),
                "worst_pairing_margin": _num(self.worst_pairing_margin),
                "worst_convexity_margin": _num(self.worst_convexity_margin),
                "violator": v, "convexity_violator": cv, "backend": self.backend}


def _num(v):
    from .extreal import to_json
    v = float(v)
    return v if np.isfinite(v) else to_json(v)


def _margin(a, b):
    """``a - b`` with ``inf - inf = 0``."""
    both = np.isinf(a) & np.isinf(b) & (np.sign(a) == np.sign(b))
    with np.errstate(invalid="ignore"):
        d = a - b
    return np.where(both, 0.0, d)


def _midpoint_convexity(F, X, Xs, fv):
    """Worst ``(F(p) + F(q)) / 2 - F((p + q) / 2)`` over paired sample points.

    Points are paired with their successor and with the point half the
    sample away; pairs with an infinite endpoint are skipped.
    Returns ``(margins, (p, q))`` where ``(p, q)`` is the worst pair.
    """
    m = len(X)
    if m < 2:
        return np.array([np.inf]), None
    idx = np.arange(m)
    J = np.concatenate([np.roll(idx, -1), np.roll(idx, -(m // 2))])
    I = np.concatenate([idx, idx])
    ok = np.isfinite(fv[I]) & np.isfinite(fv[J]) & (I != J)
    if not np.any(ok):
        return np.array([np.inf]), None
    I, J = I[ok], J[ok]
    mid = F.values(0.5 * (X[I] + X[J]), 0.5 * (Xs[I] + Xs[J]))
    avg = 0.5 * (fv[I] + fv[J])
    scale = np.maximum(1.0, np.maximum(np.abs(fv[I]), np.abs(fv[J])))
    margins = _margin(avg, mid) / scale
    k = int(np.argmin(margins))
    return margins, ((X[I[k]], Xs[I[k]]), (X[J[k]], Xs[J[k]]))


def bc_check(F: BivariateFunction, sample, primal_grid=None, tol=1e-9, backend="auto") -> BCReport:
    """Check ``F*(x*, x) >= F(x, x*) >= <x, x*>`` at the sample points ``(X, Xs)``.

    Convexity of ``F``, part of the BC definition, is probed by the
    midpoint inequality on pairs of sample points (relative to the values).
    """
    X, Xs = sample
    X, Xs = _rows(X, F.n), _rows(Xs, F.n)
    if len(X) == 0:
        raise ValueError("empty sample")
    fv = F.values(X, Xs)
    conj = flipped_conjugate_many(F, Xs, X, primal_grid, backend)
    m1 = _margin(conj, fv)
    m2 = _margin(fv, _pairing(X, Xs))
    m3, pair = _midpoint_convexity(F, X, Xs, fv)
    convex_ok = float(np.min(m3)) >= -tol
    bad = (m1 < -tol) | (m2 < -tol)
    violator = None
    if np.any(bad):
        k = int(np.argmax(bad))
        violator = (X[k], Xs[k])
    elif not convex_ok:
        violator = pair[0]
    used = backend
    if backend == "auto":
        try:
            F.conj_closed(Xs[:1], X[:1])
            used = "closed"
        except NoClosedForm:
            used = "grid"
    return BCReport(passed=not bool(np.any(bad)) and convex_ok, n_points=len(X),
                    worst_conjugate_margin=float(np.min(m1)),
                    worst_pairing_margin=float(np.min(m2)),
                    violator=violator, backend=used,
                    worst_convexity_margin=float(np.min(m3)),
                    convexity_violator=None if convex_ok else pair)


@dataclass
class PosSet:
    X: np.ndarray
    Xs: np.ndarray
    tol: float

    def __len__(self):
        return len(self.X)


def _grid_pairs(F, grid):
    if isinstance(grid, GridSpec):
        return pair_grid(grid, grid, F.n)
    X, Xs = grid
    return _rows(X, F.n), _rows(Xs, F.n)


def pos_extract(F: BivariateFunction, grid, tol=1e-9) -> PosSet:
    """All grid pairs with ``|F(x, x*) - <x, x*>| <= tol``."""
    X, Xs = _grid_pairs(F, grid)
    fv = F.values(X, Xs)
    keep = np.isfinite(fv) & (np.abs(fv - _pairing(X, Xs)) <= tol)
    return PosSet(X[keep], Xs[keep], tol)


def simons_zalinescu_crosscheck(F1, F2, query, outer_grid: GridSpec, dual_grid: Optional[GridSpec] = None,
                                inner_grid: Optional[GridSpec] = None, domain_sample=None) -> dict:
    """Compare both sides of the conjugate formula for a partial inf-convolution.

    LHS: ``(F1 []_2 F2)*(x*, x)`` by brute-force grid conjugation over
    ``outer_grid``. RHS: ``min_u* F1*(x* - u*, x) + F2*(u*, x)`` with the
    factor conjugates in closed form where available, minimized over
    ``dual_grid`` plus the critical points contributed by graph-type factors.
    Raises :class:`HypothesisFailed` when the domain qualification fails.
    """
    xstar, x = (np.asarray(v, dtype=float) for v in query)
    n = F1.n
    if not minkowski_span_closed_subspace(F1.x_domain(), F2.x_domain()):
        raise HypothesisFailed("transversality",
                               "cone generated by P_X dom F1 - P_X dom F2 is not a subspace")
    P = PartialInfConv(F1, F2, inner_grid)
    if domain_sample is None:
        rng = np.random.default_rng(0)
        domain_sample = (rng.uniform(-1, 1, (64, n)), rng.uniform(-1, 1, (64, n)))
    if np.any(P.values(*domain_sample) == -np.inf):
        raise HypothesisFailed("properness", "partial inf-convolution takes the value -inf")
    lhs = float(flipped_conjugate_many(P, xstar[None, :], x[None, :], outer_grid, backend="grid")[0])
    cands = [] if dual_grid is None else [dual_grid.nodes(n)]
    A = F1.A if isinstance(F1, FitzLinearClosed) else None
    if A is not None:
        fib = A.apply(x)
        if not fib.empty:
            cands.append((xstar - fib.point)[None, :])
    if not cands:
        raise ValueError("no candidate u* points: give a dual grid")
    U = np.vstack(cands)
    Xq = np.broadcast_to(x, U.shape)
    tot = (flipped_conjugate_many(F1, xstar - U, Xq, outer_grid)
           + flipped_conjugate_many(F2, U, Xq, outer_grid))
    j = int(np.argmin(tot))
    rhs = float(tot[j])
    if np.isinf(lhs) and np.isinf(rhs):
        gap = 0.0
    else:
        gap = abs(lhs - rhs)
    return {"xstar": xstar.tolist(), "x": x.tolist(), "lhs": lhs, "rhs": rhs, "gap": gap,
            "argmin_ustar": U[j].tolist(), "h": outer_grid.h, "partial_backend": "exact" if P.exact else "grid"}


@dataclass
class MSetReport:
    X: np.ndarray
    W: np.ndarray
    monotone: bool
    worst_pairing: float
    related_outside: int
    examples_outside: list = field(default_factory=list)
    note: str = "finite grids can refute maximality but never certify it"


def fact34_M_set(F1, F2, grid, tol=1e-9, bc_tol=1e-9, primal_grid=None) -> MSetReport:
    """Form ``M = {(x, x* + y*) : (x, x*) in pos F1, (x, y*) in pos F2}`` on a grid.

    Both functions must pass :func:`bc_check` on the grid points, otherwise
    :class:`HypothesisFailed` is raised. Monotonicity of ``M`` is checked
    pairwise; grid pairs outside ``M`` that are monotonically related to all
    of ``M`` are counted (report only).
    """
    X, Xs = _grid_pairs(F1, grid)
    for name, F in (("F1", F1), ("F2", F2)):
        rep = bc_check(F, (X, Xs), primal_grid, bc_tol)
        if not rep.passed:
            raise HypothesisFailed(f"{name} is BC on the grid", f"violator {rep.violator}")
    P1 = pos_extract(F1, (X, Xs), tol)
    P2 = pos_extract(F2, (X, Xs), tol)
    by_x = {}
    for x, ys in zip(P2.X, P2.Xs):
        by_x.setdefault(tuple(np.round(x, 12)), []).append(ys)
    MX, MW = [], []
    for x, xs in zip(P1.X, P1.Xs):
        for ys in by_x.get(tuple(np.round(x, 12)), ()):
            MX.append(x)
            MW.append(xs + ys)
    if not MX:
        return MSetReport(np.zeros((0, F1.n)), np.zeros((0, F1.n)), True, np.inf, 0)
    MX, MW = np.array(MX), np.array(MW)
    keys = np.unique(np.round(np.hstack([MX, MW]), 12), axis=0)
    MX, MW = keys[:, : F1.n], keys[:, F1.n:]
    d = _pairing(MX, MW)
    G = d[:, None] + d[None, :] - MX @ MW.T - (MX @ MW.T).T
    worst = float(np.min(G))
    monotone = worst >= -tol
    member = {tuple(r) for r in keys}
    cand = np.round(np.hstack([X, Xs]), 12)
    outside = np.array([tuple(r) not in member for r in cand])
    related = 0
    examples = []
    if np.any(outside):
        CX, CW = X[outside], Xs[outside]
        step = max(1, 2_000_000 // len(MX))
        for s in range(0, len(CX), step):
            cx, cw = CX[s:s + step], CW[s:s + step]
            V = (_pairing(cx, cw)[:, None] + d[None, :] - cx @ MW.T - (MX @ cw.T).T)
            ok = np.all(V >= -tol, axis=1)
            related += int(ok.sum())
            for k in np.flatnonzero(ok)[: max(0, 5 - len(examples))]:
                examples.append((cx[k].tolist(), cw[k].tolist()))
    return MSetReport(MX, MW, bool(monotone), worst, related, examples)


# ---------------------------------------------------------------------------
# Growth functions and graph samplers
# ---------------------------------------------------------------------------

@dataclass
class JFunction:
    """Increasing ``j: [0, inf) -> [0, inf)`` with the guarantee ``j(g) >= lower_slope * g``."""

    lower_slope: float = 1.0
    evaluator: Optional[Callable] = None

    def __call__(self, g):
        g = np.asarray(g, dtype=float)
        if self.evaluator is None:
            return self.lower_slope * g
        return np.asarray(self.evaluator(g), dtype=float)

    def check(self, samples=None) -> bool:
        """Monotone and above the declared slope on sampled arguments."""
        g = np.linspace(0.0, 100.0, 1001) if samples is None else np.sort(np.asarray(samples, dtype=float))
        v = self(g)
        return bool(np.all(np.diff(v) >= 0) and np.all(v >= self.lower_slope * g - 1e-12)
                    and np.all(v >= 0))


def sample_normal_cone_graph_1d(lo, hi, m, ray_length):
    """Midpoint-rule sample of ``gra N_[lo, hi]`` truncated to ``|x*| <= ray_length``.

    The graph is the polyline ``(lo, -K) -> (lo, 0) -> (hi, 0) -> (hi, K)``;
    ``m`` points sit at the midpoints of ``m`` equal arclength cells.
    Returns ``(X, Xs)`` of shape ``(m, 1)``.
    """
    K = float(ray_length)
    width = float(hi - lo)
    L = 2 * K + width
    s = (np.arange(m) + 0.5) * (L / m)
    X = np.where(s < K, lo, np.where(s < K + width, lo + (s - K), hi))
    Xs = np.where(s < K, -(K - s), np.where(s < K + width, 0.0, s - K - width))
    return X[:, None], Xs[:, None]
