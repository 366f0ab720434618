"""
Closed-form constants attached to the six implications, together with the
quantities that enter the admissibility conditions.

Every ``alpha_*`` function takes the modulus of the fixed second coefficient
and refuses values outside the range its theorem covers; nothing is clamped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, NoBracketError

__all__ = [
    "TheoremId",
    "TargetRegion",
    "TheoremSpec",
    "THEOREMS",
    "get_theorem",
    "alpha_marx_strohhacker",
    "alpha_sqrt_derivative",
    "alpha_ratio",
    "alpha_parabola",
    "alpha_nunokawa",
    "nunokawa_residual",
    "convex_cubic",
    "alpha_convex_cubic",
    "convex_beta_slack",
    "sigma_bound",
    "min_m",
    "nunokawa_q_prime_0",
]

_EDGE = 1e-12  # absorbs rounding in coefficients read off a series
_ROUNDING = 1e-14  # |g| below this at a bracket end counts as a root there


def _check_abs_b(abs_b: float, upper: float, name: str) -> float:
    abs_b = float(abs_b)
    if not (math.isfinite(abs_b) and -_EDGE <= abs_b <= upper + _EDGE):
        raise DomainError(f"{name}: |b| = {abs_b!r} outside [0, {upper}]")
    return min(max(abs_b, 0.0), upper)


def alpha_marx_strohhacker(abs_b: float) -> float:
    abs_b = _check_abs_b(abs_b, 1.0, "alpha_marx_strohhacker")
    return (abs_b - 1.0) / (2.0 * (abs_b + 1.0))


def alpha_sqrt_derivative(abs_b: float) -> float:
    abs_b = _check_abs_b(abs_b, 1.0, "alpha_sqrt_derivative")
    return (abs_b - 1.0) / (abs_b + 1.0)


def alpha_ratio(abs_b: float) -> float:
    abs_b = _check_abs_b(abs_b, 1.0, "alpha_ratio")
    return abs_b / (abs_b + 1.0)


def alpha_parabola(abs_b: float) -> float:
    abs_b = _check_abs_b(abs_b, 1.0, "alpha_parabola")
    return math.sqrt((1.0 + abs_b) / 8.0)


def alpha_nunokawa(abs_b: float) -> float:
    """Larger root of ``4(|b|+4)a^2 - 3(|b|+6)a + 5 = 0``, in closed form."""
    abs_b = _check_abs_b(abs_b, 0.5, "alpha_nunokawa")
    disc = 9.0 * abs_b**2 + 28.0 * abs_b + 4.0
    return (3.0 * (abs_b + 6.0) + math.sqrt(disc)) / (8.0 * (abs_b + 4.0))


def nunokawa_residual(abs_b: float, alpha: float) -> float:
    return 4.0 * (abs_b + 4.0) * alpha**2 - 3.0 * (abs_b + 6.0) * alpha + 5.0


def nunokawa_q_prime_0(alpha: float) -> float:
    """``q'(0)`` for the disk map ``q(z) = alpha(1-z)/((alpha-1)z + alpha)``."""
    return (1.0 - 2.0 * alpha) / alpha


def convex_cubic(abs_b: float, alpha: float) -> float:
    return (2.0 * alpha**3 + 2.0 * (1.0 - abs_b) * alpha**2
            - (2.0 * abs_b + 7.0) * alpha + 3.0 + abs_b)


def _bisect(g: Callable[[float], float], lo: float, hi: float, tol: float, max_iter: int) -> float:
    glo = g(lo)
    if glo == 0.0:
        return lo
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0.0) == (glo > 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def alpha_convex_cubic(abs_b: float, tol: float = 1e-12, max_iter: int = 200,
                       scan: int = 64) -> float:
    """
    Smallest root of the convexity cubic in ``[1/2, 2/3]``.

    The bracket is split into ``scan`` equal pieces and the first piece with a
    sign change (or an exact zero at its left end) is bisected to ``tol``.
    """
    abs_b = _check_abs_b(abs_b, 0.5, "alpha_convex_cubic")
    if tol <= 0:
        raise DomainError("tol must be positive")
    lo, hi = 0.5, 2.0 / 3.0
    g = lambda a: convex_cubic(abs_b, a)  # noqa: E731
    if abs(g(lo)) <= _ROUNDING:
        return lo
    if g(lo) * g(hi) > 0:
        raise NoBracketError(f"cubic has no sign change on [1/2, 2/3] for |b| = {abs_b}")
    edges = [lo + (hi - lo) * i / scan for i in range(scan)] + [hi]
    for left, right in zip(edges[:-1], edges[1:]):
        gl, gr = g(left), g(right)
        if gl == 0.0:
            return left
        if gl * gr <= 0.0:
            return _bisect(g, left, right, tol, max_iter)
    raise NoBracketError(f"no sign change located for |b| = {abs_b}")  # pragma: no cover


def convex_beta_slack(abs_b: float) -> float:
    """``(1 - alpha) - |b|``; nonnegative exactly when ``2|b| <= 2 Re p(0)``."""
    return (1.0 - alpha_convex_cubic(abs_b)) - float(abs_b)


def sigma_bound(rho: float, a: complex = 1.0, beta: float = 0.0, n: int = 1) -> float:
    """
    Largest ``sigma`` for which the half-plane admissibility condition must hold.

    ``beta = 0`` is accepted and reduces to the classical bound with
    ``n + 1`` (a vanishing n-th coefficient).
    """
    a = complex(a)
    re_a = a.real
    if re_a <= 0:
        raise DomainError(f"Re a must be positive, got {a}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if beta < 0 or beta > 2.0 * re_a * (1 + 1e-12):
        raise DomainError(f"beta = {beta} outside [0, 2 Re a] = [0, {2 * re_a}]")
    factor = n + (2.0 * re_a - beta) / (2.0 * re_a + beta)
    return -0.5 * factor * abs(a - 1j * rho) ** 2 / re_a


def min_m(n: int, q_prime_0_abs: float, beta: float) -> float:
    if q_prime_0_abs <= 0:
        raise DomainError("|q'(0)| must be positive")
    if beta < 0 or beta > q_prime_0_abs * (1 + 1e-12):
        raise DomainError(f"beta = {beta} outside [0, |q'(0)|] = [0, {q_prime_0_abs}]")
    return n + (q_prime_0_abs - beta) / (q_prime_0_abs + beta)


@dataclass(frozen=True)
class TargetRegion:
    """
    A region of the w-plane.

    ``half_plane`` is ``Re w > alpha`` (``side='>'``) or ``Re w < alpha``
    (``side='<'``); ``disk`` is ``|w - alpha| < alpha``; ``strip`` is
    ``0 < Re w < 2 alpha``.  ``excluded`` lists the boundary points of the
    carrier map where it blows up.
    """

    kind: str
    alpha: float
    side: str = ">"
    excluded: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("half_plane", "disk", "strip"):
            raise DomainError(f"unknown region kind {self.kind!r}")
        if self.kind == "half_plane" and self.side not in (">", "<"):
            raise DomainError(f"half-plane side must be '>' or '<', got {self.side!r}")
        if self.kind in ("disk", "strip") and not self.alpha > 0:
            raise DomainError(f"{self.kind} region needs alpha > 0")

    @classmethod
    def half_plane(cls, alpha: float, side: str = ">") -> TargetRegion:
        return cls("half_plane", float(alpha), side, (1 + 0j,))

    @classmethod
    def disk(cls, alpha: float) -> TargetRegion:
        return cls("disk", float(alpha))

    @classmethod
    def strip(cls, alpha: float) -> TargetRegion:
        return cls("strip", float(alpha))

    def slack(self, w):
        """Signed containment slack; positive inside the region."""
        w = np.asarray(w, dtype=complex)
        if self.kind == "half_plane":
            return w.real - self.alpha if self.side == ">" else self.alpha - w.real
        if self.kind == "disk":
            return self.alpha - np.abs(w - self.alpha)
        return np.minimum(w.real, 2.0 * self.alpha - w.real)

    def describe(self) -> str:
        if self.kind == "half_plane":
            return f"Re w {self.side} {self.alpha:.12g}"
        if self.kind == "disk":
            return f"|w - {self.alpha:.12g}| < {self.alpha:.12g}"
        return f"0 < Re w < {2 * self.alpha:.12g}"


class TheoremId(str, enum.Enum):
    MARX_STROHHACKER_2_2 = "marx2_2"
    SQRT_DERIV_2_5 = "sqrt2_5"
    RATIO_2_7 = "ratio2_7"
    PARABOLA_2_9 = "parabola2_9"
    NUNOKAWA_3_1 = "nunokawa3_1"
    CONVEX_3_3 = "convex3_3"


@dataclass(frozen=True)
class TheoremSpec:
    """
    Everything needed to test one implication.

    ``alpha_rule`` maps ``|b|`` to the theorem's constant.  The operator
    fields name entries of :data:`subord_lab.operators.OPERATORS`.
    ``p_beta_scale`` is the ratio ``beta/|b|`` for the auxiliary function
    built by :func:`subord_lab.operators.p_transform`.
    """

    id: TheoremId
    n: int
    b_max: float
    alpha_rule: Callable[[float], float]
    hypothesis_op: str
    conclusion_op: str
    hypothesis_region: Callable[[float], TargetRegion]
    conclusion_region: Callable[[float], TargetRegion]
    p_beta_scale: float
    interval: tuple[float, float]
    description: str = ""

    @property
    def b_range(self) -> tuple[float, float]:
        return (0.0, self.b_max)

    def check_b(self, abs_b: float) -> float:
        return _check_abs_b(abs_b, self.b_max, self.id.value)

    def alpha(self, abs_b: float) -> float:
        return self.alpha_rule(self.check_b(abs_b))


def _half(alpha_rule, side=">"):
    return lambda abs_b: TargetRegion.half_plane(alpha_rule(abs_b), side)


def _fixed_half(value, side=">"):
    return lambda abs_b: TargetRegion.half_plane(value, side)


THEOREMS: dict[TheoremId, TheoremSpec] = {
    TheoremId.MARX_STROHHACKER_2_2: TheoremSpec(
        TheoremId.MARX_STROHHACKER_2_2, 1, 1.0, alpha_marx_strohhacker,
        "pre_schwarzian", "starlike_ratio",
        _half(alpha_marx_strohhacker), _fixed_half(0.5),
        p_beta_scale=2.0, interval=(-0.5, 0.0),
        description="Re(1+zf''/f') > (|b|-1)/(2(|b|+1))  =>  Re zf'/f > 1/2"),
    TheoremId.SQRT_DERIV_2_5: TheoremSpec(
        TheoremId.SQRT_DERIV_2_5, 1, 1.0, alpha_sqrt_derivative,
        "pre_schwarzian", "sqrt_derivative",
        _half(alpha_sqrt_derivative), _fixed_half(0.5),
        p_beta_scale=2.0, interval=(-1.0, 0.0),
        description="Re(1+zf''/f') > (|b|-1)/(|b|+1)  =>  Re sqrt(f') > 1/2"),
    TheoremId.RATIO_2_7: TheoremSpec(
        TheoremId.RATIO_2_7, 1, 1.0, alpha_ratio,
        "starlike_ratio", "ratio_to_z",
        _half(alpha_ratio), _fixed_half(0.5),
        p_beta_scale=2.0, interval=(0.0, 0.5),
        description="Re zf'/f > |b|/(|b|+1)  =>  Re f/z > 1/2"),
    TheoremId.PARABOLA_2_9: TheoremSpec(
        TheoremId.PARABOLA_2_9, 1, 1.0, alpha_parabola,
        "sqrt_derivative", "ratio_to_z",
        _half(alpha_parabola), _fixed_half(0.5),
        p_beta_scale=2.0, interval=(1.0 / (2.0 * math.sqrt(2.0)), 0.5),
        description="Re sqrt(f') > sqrt((1+|b|)/8)  =>  Re f/z > 1/2"),
    TheoremId.NUNOKAWA_3_1: TheoremSpec(
        TheoremId.NUNOKAWA_3_1, 1, 0.5, alpha_nunokawa,
        "pre_schwarzian", "starlike_ratio",
        _fixed_half(1.5, "<"), lambda abs_b: TargetRegion.disk(alpha_nunokawa(abs_b)),
        p_beta_scale=1.0, interval=(5.0 / 8.0, 2.0 / 3.0),
        description="Re(1+zf''/f') < 3/2  =>  |zf'/f - alpha| < alpha"),
    TheoremId.CONVEX_3_3: TheoremSpec(
        TheoremId.CONVEX_3_3, 2, 0.5, alpha_convex_cubic,
        "pre_schwarzian", "starlike_ratio",
        _fixed_half(-0.5), _half(alpha_convex_cubic),
        p_beta_scale=2.0, interval=(0.5, 2.0 / 3.0),
        description="Re(1+zf''/f') > -1/2 on A_{2,b}  =>  Re zf'/f > alpha"),
}


def get_theorem(key) -> TheoremSpec:
    """Look up a theorem by :class:`TheoremId` or its string value (``'marx2_2'``...)."""
    if isinstance(key, TheoremSpec):
        return key
    try:
        return THEOREMS[TheoremId(key)]
    except ValueError:
        names = ", ".join(t.value for t in TheoremId)
        raise DomainError(f"unknown theorem {key!r}; expected one of {names}") from None
