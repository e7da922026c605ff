"""Extended real numbers ``[-inf, +inf]`` with checked arithmetic.

:class:`ExtReal` subclasses :class:`float`, so values flow through numpy
and ordinary comparisons unchanged (``-inf < x < +inf`` is the float order).
What changes is arithmetic: the indeterminate forms ``(+inf) + (-inf)`` and
``0 * (+-inf)`` raise :class:`~bigconj.errors.IndeterminateSum` instead of
silently producing NaN. NaN itself is never a valid value.
"""

from __future__ import annotations

import math
from typing import Iterable

from .errors import IndeterminateSum

__all__ = ["ExtReal", "INF", "NEG_INF", "add", "mul", "sup_over", "inf_over",
           "to_json", "from_json"]


class ExtReal(float):
    """A real number, ``+inf`` or ``-inf``.

    Examples
    --------
    >>> ExtReal("inf") + 3
    ExtReal(inf)
    >>> ExtReal(2) + 3
    ExtReal(5.0)
    """

    __slots__ = ()

    def __new__(cls, value=0.0):
        if isinstance(value, str):
            value = from_json(value)
        v = float.__new__(cls, value)
        if math.isnan(v):
            raise ValueError("NaN is not an extended real")
        return v

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self)

    @property
    def is_pos_inf(self) -> bool:
        return float(self) == math.inf

    @property
    def is_neg_inf(self) -> bool:
        return float(self) == -math.inf

    def __repr__(self):
        return f"ExtReal({float.__repr__(self)})"

    def __str__(self):
        return to_json(self)

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, -float(other))

    def __rsub__(self, other):
        return add(other, -float(self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return ExtReal(-float(self))


INF = ExtReal(math.inf)
NEG_INF = ExtReal(-math.inf)


def add(a, b) -> ExtReal:
    """Extended-real sum; ``(+inf) + (-inf)`` raises ``IndeterminateSum``."""
    fa, fb = float(a), float(b)
    if math.isinf(fa) and math.isinf(fb) and fa != fb:
        raise IndeterminateSum(f"{to_json(fa)} + {to_json(fb)}")
    return ExtReal(fa + fb)


def mul(a, b) -> ExtReal:
    """Extended-real product; ``0 * (+-inf)`` raises ``IndeterminateSum``."""
    fa, fb = float(a), float(b)
    if (math.isinf(fa) and fb == 0.0) or (math.isinf(fb) and fa == 0.0):
        raise IndeterminateSum(f"{to_json(fa)} * {to_json(fb)}")
    return ExtReal(fa * fb)


def sup_over(values: Iterable) -> ExtReal:
    """Maximum under the total order; the supremum of nothing is ``-inf``."""
    best = -math.inf
    for v in values:
        fv = float(v)
        if math.isnan(fv):
            raise ValueError("NaN is not an extended real")
        if fv > best:
            best = fv
    return ExtReal(best)


def inf_over(values: Iterable) -> ExtReal:
    """Minimum under the total order; the infimum of nothing is ``+inf``."""
    return -sup_over(-float(v) for v in values)


def to_json(value) -> str:
    """Serialize as ``"inf"``, ``"-inf"`` or a round-tripping decimal literal."""
    v = float(value)
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return repr(v)


def from_json(text) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    t = str(text).strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    v = float(t)
    if math.isnan(v):
        raise ValueError("NaN is not an extended real")
    return v
