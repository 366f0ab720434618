"""
Truncated Taylor series about the origin with complex coefficients.

A :class:`TruncatedSeries` of order ``N`` stores ``c_0, ..., c_N`` and stands
for ``c_0 + c_1 z + ... + c_N z^N + O(z^{N+1})``.  Coefficients beyond the
order are unknown, not zero, so every binary operation truncates to the
smaller operand order.  Multiplying by ``z`` raises the order by one and
differentiating lowers it by one; these shifts are tracked explicitly.

The elementary functions (exp, log, sqrt) are built from the first-order
differential equations they satisfy, which gives O(N^2) recurrences that
accept any admissible constant term::

    >>> s = TruncatedSeries([1, 1], order=1)
    >>> series_exp(series_log(s)).coeffs
    array([1.+0.j, 1.+0.j])

Evaluation is restricted to ``|z| <= R_MAX`` so that truncation error stays
controlled for functions whose singularities sit on the unit circle.
"""

from __future__ import annotations

import cmath
import os
from typing import Iterable, Union

import numpy as np

from .errors import (
    BranchPointError,
    CompositionDomainError,
    DivisionByZeroError,
    EvaluationRadiusError,
    LogSingularityError,
    PoleAtOriginError,
)

__all__ = [
    "TruncatedSeries",
    "R_MAX",
    "ZERO_THRESHOLD",
    "default_order",
    "series_mul",
    "series_div",
    "series_compose",
    "series_derivative",
    "series_antiderivative",
    "series_exp",
    "series_log",
    "series_sqrt",
    "series_eval",
    "eval_circle",
    "eval_grid",
]

R_MAX = 0.98
ZERO_THRESHOLD = 1e-14
ORDER_ENV_VAR = "SUBORD_LAB_ORDER"
_BUILTIN_ORDER = 64

Number = Union[int, float, complex]


def default_order() -> int:
    """Truncation order used when none is given (env override: SUBORD_LAB_ORDER)."""
    raw = os.environ.get(ORDER_ENV_VAR)
    if raw is None or raw.strip() == "":
        return _BUILTIN_ORDER
    order = int(raw)
    if order < 0:
        raise ValueError(f"{ORDER_ENV_VAR} must be a non-negative integer, got {raw!r}")
    return order


class TruncatedSeries:
    """Immutable truncated power series ``sum c_k z^k + O(z^{order+1})``."""

    __slots__ = ("_coeffs",)
    __array_ufunc__ = None  # numpy scalars defer to our reflected operators

    def __init__(self, coeffs: Iterable[Number], order: int | None = None):
        arr = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                       dtype=complex).ravel()
        if order is None:
            order = len(arr) - 1
        if order < 0:
            raise ValueError("a series needs at least one coefficient")
        if len(arr) > order + 1:
            arr = arr[: order + 1].copy()
        elif len(arr) < order + 1:
            arr = np.concatenate([arr, np.zeros(order + 1 - len(arr), dtype=complex)])
        else:
            arr = arr.copy()
        arr.setflags(write=False)
        self._coeffs = arr

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: Number, order: int | None = None) -> TruncatedSeries:
        order = default_order() if order is None else order
        return cls([value], order)

    @classmethod
    def identity(cls, order: int | None = None) -> TruncatedSeries:
        """The series ``z``."""
        order = default_order() if order is None else order
        return cls([0, 1], order) if order >= 1 else cls([0], order)

    @classmethod
    def geometric(cls, ratio: Number = 1.0, order: int | None = None) -> TruncatedSeries:
        """Coefficients of ``1/(1 - ratio*z)``."""
        order = default_order() if order is None else order
        return cls(complex(ratio) ** np.arange(order + 1), order)

    # -- basic accessors ---------------------------------------------------

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    def __len__(self) -> int:
        return len(self._coeffs)

    def __getitem__(self, k):
        return self._coeffs[k]

    def __repr__(self) -> str:
        shown = ", ".join(f"{c:.6g}" for c in self._coeffs[:6])
        more = ", ..." if self.order >= 6 else ""
        return f"TruncatedSeries([{shown}{more}], order={self.order})"

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise ValueError(f"cannot raise order {self.order} to {order} by truncation")
        return TruncatedSeries(self._coeffs[: order + 1], order)

    def valuation(self, threshold: float = ZERO_THRESHOLD) -> int:
        """Index of the first coefficient above ``threshold``; order+1 if none."""
        nz = np.flatnonzero(np.abs(self._coeffs) > threshold)
        return int(nz[0]) if len(nz) else self.order + 1

    def shift_up(self, k: int = 1) -> TruncatedSeries:
        """Multiply by ``z**k``; the order grows by ``k``."""
        return TruncatedSeries(np.concatenate([np.zeros(k, dtype=complex), self._coeffs]),
                               self.order + k)

    def shift_down(self, k: int = 1) -> TruncatedSeries:
        """Divide by ``z**k``; the first ``k`` coefficients must vanish."""
        if k == 0:
            return self
        if k > self.order:
            raise PoleAtOriginError(f"cannot divide an order-{self.order} series by z^{k}")
        if np.any(np.abs(self._coeffs[:k]) > ZERO_THRESHOLD):
            raise PoleAtOriginError(f"series does not vanish to order {k} at the origin")
        return TruncatedSeries(self._coeffs[k:], self.order - k)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> TruncatedSeries | None:
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return TruncatedSeries([other], self.order)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        return TruncatedSeries(self._coeffs[: n + 1] + other._coeffs[: n + 1], n)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self._coeffs, self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return TruncatedSeries(self._coeffs * other, self.order)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_div(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return TruncatedSeries(self._coeffs / other, self.order)
        return NotImplemented

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return series_div(other, self)

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            return NotImplemented
        result = TruncatedSeries.constant(1.0, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def allclose(self, other: TruncatedSeries, rtol: float = 1e-12, atol: float = 0.0) -> bool:
        n = min(self.order, other.order)
        a, b = self._coeffs[: n + 1], other._coeffs[: n + 1]
        scale = max(1.0, float(np.max(np.abs(b))))
        return bool(np.max(np.abs(a - b)) <= rtol * scale + atol)

    # -- calculus / functions ---------------------------------------------

    def deriv(self) -> TruncatedSeries:
        return series_derivative(self)

    def integ(self) -> TruncatedSeries:
        return series_antiderivative(self)

    def exp(self) -> TruncatedSeries:
        return series_exp(self)

    def log(self) -> TruncatedSeries:
        return series_log(self)

    def sqrt(self) -> TruncatedSeries:
        return series_sqrt(self)

    def __call__(self, z, r_max: float = R_MAX):
        if np.ndim(z) == 0:
            return series_eval(self, z, r_max=r_max)
        return _horner(self._coeffs, _checked_points(z, r_max))


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at ``min(a.order, b.order)``."""
    n = min(a.order, b.order)
    return TruncatedSeries(np.convolve(a.coeffs[: n + 1], b.coeffs[: n + 1])[: n + 1], n)


def _divide_unit(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    n = len(num) - 1
    out = np.zeros(n + 1, dtype=complex)
    d0 = den[0]
    for k in range(n + 1):
        acc = num[k]
        if k:
            acc -= np.dot(den[1 : k + 1], out[k - 1 :: -1])
        out[k] = acc / d0
    return out


def series_div(num: TruncatedSeries, den: TruncatedSeries) -> TruncatedSeries:
    """
    Quotient ``num/den``, cancelling a common factor ``z**k`` first.

    ``k`` is the number of leading coefficients of ``den`` below
    ``ZERO_THRESHOLD``.  The numerator must vanish to at least that order.
    Cancelling lowers the order of the result by ``k``.
    """
    k = den.valuation()
    if k > den.order:
        raise DivisionByZeroError("denominator vanishes to working order")
    if k:
        if num.valuation() < k:
            raise PoleAtOriginError(
                f"numerator vanishes to lower order than the denominator (order {k} zero)")
        num, den = num.shift_down(k), den.shift_down(k)
    n = min(num.order, den.order)
    return TruncatedSeries(_divide_unit(num.coeffs[: n + 1], den.coeffs[: n + 1]), n)


def series_compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """Coefficients of ``outer(inner(z))`` by Horner accumulation; ``inner(0)`` must be 0."""
    if abs(inner[0]) > ZERO_THRESHOLD:
        raise CompositionDomainError("inner series must have zero constant term")
    n = min(outer.order, inner.order)
    inner = inner.truncate(n)
    c = outer.coeffs
    acc = TruncatedSeries([c[n]], n)
    for k in range(n - 1, -1, -1):
        acc = series_mul(acc, inner) + c[k]
    return acc


def series_derivative(a: TruncatedSeries) -> TruncatedSeries:
    if a.order == 0:
        return TruncatedSeries([0.0], 0)
    k = np.arange(1, a.order + 1)
    return TruncatedSeries(a.coeffs[1:] * k, a.order - 1)


def series_antiderivative(a: TruncatedSeries) -> TruncatedSeries:
    """Antiderivative with zero constant term."""
    k = np.arange(1, a.order + 2)
    return TruncatedSeries(np.concatenate([[0.0], a.coeffs / k]), a.order + 1)


def series_exp(a: TruncatedSeries) -> TruncatedSeries:
    # E' = a' E  =>  k e_k = sum_{j=1..k} j a_j e_{k-j}
    n = a.order
    ja = np.arange(n + 1) * a.coeffs
    e = np.zeros(n + 1, dtype=complex)
    e[0] = cmath.exp(a[0])
    for k in range(1, n + 1):
        e[k] = np.dot(ja[1 : k + 1], e[k - 1 :: -1]) / k
    return TruncatedSeries(e, n)


def series_log(a: TruncatedSeries) -> TruncatedSeries:
    """Principal logarithm, from ``a * L' = a'``."""
    c0 = a[0]
    if abs(c0) <= ZERO_THRESHOLD:
        raise LogSingularityError("logarithm of a series with zero constant term")
    n = a.order
    c = a.coeffs
    out = np.zeros(n + 1, dtype=complex)
    out[0] = cmath.log(c0)
    jl = np.zeros(n + 1, dtype=complex)  # j * L_j
    for k in range(1, n + 1):
        acc = k * c[k]
        if k > 1:
            acc -= np.dot(jl[1:k], c[k - 1 : 0 : -1])
        jl[k] = acc / c0
        out[k] = jl[k] / k
    return TruncatedSeries(out, n)


def series_sqrt(a: TruncatedSeries) -> TruncatedSeries:
    """
    Square root with the principal value at the origin.

    Uses ``2 a s' = a' s``, which gives
    ``s_k = sum_{j<k} (k - 3j) a_{k-j} s_j / (2 k a_0)``.
    """
    c0 = a[0]
    if abs(c0) <= ZERO_THRESHOLD:
        raise BranchPointError("square root of a series with zero constant term")
    n = a.order
    c = a.coeffs
    s = np.zeros(n + 1, dtype=complex)
    s[0] = cmath.sqrt(c0)
    for k in range(1, n + 1):
        j = np.arange(k)
        s[k] = np.dot((k - 3 * j) * c[k:0:-1], s[:k]) / (2 * k * c0)
    return TruncatedSeries(s, n)


def _horner(coeffs: np.ndarray, z):
    acc = np.zeros_like(z, dtype=complex) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


def _checked_points(z, r_max: float) -> np.ndarray:
    pts = np.asarray(z, dtype=complex)
    if pts.size and np.max(np.abs(pts)) > r_max * (1 + 1e-12):
        raise EvaluationRadiusError(
            f"evaluation point with |z| = {np.max(np.abs(pts)):.6g} exceeds r_max = {r_max}")
    return pts


def series_eval(a: TruncatedSeries, z: complex, r_max: float = R_MAX) -> complex:
    if abs(z) > r_max:
        raise EvaluationRadiusError(f"|z| = {abs(z):.6g} exceeds r_max = {r_max}")
    acc = 0j
    for c in a.coeffs[::-1]:
        acc = acc * z + c
    return complex(acc)


def eval_circle(a: TruncatedSeries, r: float, count: int, r_max: float = R_MAX) -> np.ndarray:
    """Values at ``r * exp(2 pi i k / count)`` for ``k = 0..count-1``."""
    if count < 8:
        raise ValueError("count must be at least 8")
    if not 0 < r <= r_max:
        raise EvaluationRadiusError(f"radius {r} outside (0, {r_max}]")
    z = r * np.exp(2j * np.pi * np.arange(count) / count)
    return _horner(a.coeffs, z)


def circle_points(radii, angles: int) -> np.ndarray:
    """Polar grid ``z[i, k] = radii[i] * exp(2 pi i k / angles)``."""
    radii = np.asarray(radii, dtype=float)
    return radii[:, None] * np.exp(2j * np.pi * np.arange(angles) / angles)[None, :]


def eval_grid(a: TruncatedSeries, radii, angles: int, r_max: float = R_MAX) -> np.ndarray:
    """Evaluate on the polar grid of :func:`circle_points`; shape ``(len(radii), angles)``."""
    z = _checked_points(circle_points(radii, angles), r_max)
    return _horner(a.coeffs, z)
