"""
Differential operators on normalized functions ``f(z) = z + b z^{n+1} + ...``
and the auxiliary functions ``p`` through which each implication is reduced
to a statement about ``Re p > 0`` or ``p`` subordinate to a disk map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import TheoremId, TheoremSpec, alpha_convex_cubic, get_theorem
from .errors import InputShapeError, NormalizationError
from .reports import MarginReport
from .series import (
    R_MAX,
    TruncatedSeries,
    circle_points,
    eval_grid,
    series_antiderivative,
    series_derivative,
    series_div,
    series_exp,
    series_sqrt,
)

__all__ = [
    "FixedCoeffFunction",
    "PFunction",
    "starlike_ratio",
    "pre_schwarzian",
    "ratio_to_z",
    "sqrt_derivative",
    "OPERATORS",
    "p_transform",
    "build_from_p",
    "local_univalence_check",
]

COEFF_TOL = 1e-12


@dataclass(frozen=True)
class FixedCoeffFunction:
    """
    ``f(z) = z + b z^{n+1} + a_{n+2} z^{n+2} + ...``.

    If ``b`` is omitted it is read from the series; if given it must match
    the coefficient of ``z^{n+1}``.
    """

    series: TruncatedSeries
    n: int = 1
    b: complex | None = None

    def __post_init__(self):
        c = self.series.coeffs
        if self.n < 1:
            raise InputShapeError(f"gap index n must be >= 1, got {self.n}")
        if self.series.order < self.n + 1:
            raise InputShapeError(
                f"series of order {self.series.order} cannot carry z^{self.n + 1}")
        if abs(c[0]) > COEFF_TOL or abs(c[1] - 1) > COEFF_TOL:
            raise NormalizationError("f must satisfy f(0) = 0 and f'(0) = 1")
        if self.n > 1 and np.max(np.abs(c[2 : self.n + 1])) > COEFF_TOL:
            raise NormalizationError(f"coefficients of z^2..z^{self.n} must vanish")
        realized = complex(c[self.n + 1])
        if self.b is None:
            object.__setattr__(self, "b", realized)
        elif abs(complex(self.b) - realized) > COEFF_TOL:
            raise NormalizationError(
                f"declared b = {self.b} but coefficient of z^{self.n + 1} is {realized}")
        else:
            object.__setattr__(self, "b", complex(self.b))

    @classmethod
    def from_coeffs(cls, coeffs, n: int = 1, order: int | None = None) -> FixedCoeffFunction:
        return cls(TruncatedSeries(coeffs, order), n)

    @property
    def abs_b(self) -> float:
        return abs(self.b)

    @property
    def order(self) -> int:
        return self.series.order

    def derivative(self) -> TruncatedSeries:
        return series_derivative(self.series)


@dataclass(frozen=True)
class PFunction:
    """``p(z) = a + c_n z^n + ...`` with ``|c_n| = beta``."""

    series: TruncatedSeries
    a: complex
    n: int
    beta: float

    def __post_init__(self):
        c = self.series.coeffs
        if abs(c[0] - self.a) > COEFF_TOL:
            raise NormalizationError(f"p(0) = {c[0]} differs from a = {self.a}")
        if self.n > 1 and np.max(np.abs(c[1 : self.n])) > COEFF_TOL:
            raise NormalizationError(f"coefficients of z..z^{self.n - 1} must vanish")
        if abs(abs(c[self.n]) - self.beta) > COEFF_TOL:
            raise NormalizationError(
                f"|coefficient of z^{self.n}| = {abs(c[self.n])} differs from beta = {self.beta}")


def _series_of(f) -> TruncatedSeries:
    return f.series if isinstance(f, FixedCoeffFunction) else f


def starlike_ratio(f) -> TruncatedSeries:
    """``z f'(z) / f(z)``."""
    s = _series_of(f)
    return series_div(series_derivative(s).shift_up(1), s)


def pre_schwarzian(f) -> TruncatedSeries:
    """``1 + z f''(z) / f'(z)``."""
    d1 = series_derivative(_series_of(f))
    return 1 + series_div(series_derivative(d1).shift_up(1), d1)


def ratio_to_z(f) -> TruncatedSeries:
    """``f(z) / z``."""
    return _series_of(f).shift_down(1)


def sqrt_derivative(f) -> TruncatedSeries:
    """``sqrt(f'(z))`` on the branch with value 1 at the origin."""
    return series_sqrt(series_derivative(_series_of(f)))


OPERATORS = {
    "starlike_ratio": starlike_ratio,
    "pre_schwarzian": pre_schwarzian,
    "ratio_to_z": ratio_to_z,
    "sqrt_derivative": sqrt_derivative,
}


def p_transform(theorem, f: FixedCoeffFunction) -> PFunction:
    """
    The auxiliary function ``p`` that reduces ``theorem`` to a statement about ``p``.

    ====================  ======================  =========  ===  ========
    theorem               p                       a          n    beta
    ====================  ======================  =========  ===  ========
    marx2_2               2 zf'/f - 1             1          1    2|b|
    sqrt2_5               2 sqrt(f') - 1          1          1    2|b|
    ratio2_7, parabola2_9 2 f/z - 1               1          1    2|b|
    nunokawa3_1           zf'/f                   1          1    |b|
    convex3_3             zf'/f - alpha           1 - alpha  2    2|b|
    ====================  ======================  =========  ===  ========
    """
    spec: TheoremSpec = get_theorem(theorem)
    if f.n != spec.n:
        raise InputShapeError(f"{spec.id.value} needs n = {spec.n}, got f with n = {f.n}")
    abs_b = spec.check_b(f.abs_b)
    beta = spec.p_beta_scale * abs_b
    tid = spec.id
    if tid is TheoremId.MARX_STROHHACKER_2_2:
        return PFunction(2 * starlike_ratio(f) - 1, 1.0, 1, beta)
    if tid is TheoremId.SQRT_DERIV_2_5:
        return PFunction(2 * sqrt_derivative(f) - 1, 1.0, 1, beta)
    if tid in (TheoremId.RATIO_2_7, TheoremId.PARABOLA_2_9):
        return PFunction(2 * ratio_to_z(f) - 1, 1.0, 1, beta)
    if tid is TheoremId.NUNOKAWA_3_1:
        return PFunction(starlike_ratio(f), 1.0, 1, beta)
    alpha = alpha_convex_cubic(abs_b)
    return PFunction(starlike_ratio(f) - alpha, 1.0 - alpha, 2, beta)


def build_from_p(p, n: int | None = None) -> FixedCoeffFunction:
    """
    Normalized ``f`` with ``z f'/f = p``, namely
    ``f(z) = z exp( integral_0^z (p(t) - 1)/t dt )``.

    The gap index is taken from ``p`` when it is a :class:`PFunction`,
    otherwise from the first nonvanishing coefficient of ``p - 1``.
    """
    if isinstance(p, PFunction):
        n = p.n if n is None else n
        p = p.series
    if abs(p[0] - 1) > COEFF_TOL:
        raise NormalizationError(f"build_from_p needs p(0) = 1, got {p[0]}")
    excess = (p - 1).shift_down(1)
    f = series_exp(series_antiderivative(excess)).shift_up(1)
    if n is None:
        v = (p - 1).valuation(COEFF_TOL)
        n = v if v <= p.order else 1
    return FixedCoeffFunction(f, n)


def local_univalence_check(f, radii, angles: int, r_max: float = R_MAX) -> MarginReport:
    """Minimum of ``|f'|`` over a polar grid; thresholds are the caller's business."""
    radii = np.asarray(radii, dtype=float)
    values = np.abs(eval_grid(series_derivative(_series_of(f)), radii, angles, r_max))
    i, k = np.unravel_index(int(np.argmin(values)), values.shape)
    z = complex(circle_points(radii[i : i + 1], angles)[0, k])
    return MarginReport(
        worst_margin=float(values[i, k]),
        argmin={"r": float(radii[i]), "theta": float(2 * np.pi * k / angles), "z": z},
        samples=int(values.size),
    )
