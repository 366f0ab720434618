"""
Grid certification of the admissibility conditions behind each implication.

Half-plane problems sample the critical data ``(i rho, sigma)`` with
``sigma <= sigma_bound(rho)`` and measure how far ``psi(i rho, sigma)`` gets
into ``Omega``; the condition holds when that never happens, i.e. the worst
margin is ``<= 0``.  The disk-target problem samples ``(q(zeta), m zeta q'(zeta))``
on the unit circle and must stay in ``Re w >= 3/2``.

All sweeps are plain numpy reductions.  Ties are broken by the first sample
index, so reports are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bounds import (
    TargetRegion,
    TheoremId,
    alpha_nunokawa,
    alpha_parabola,
    get_theorem,
    min_m,
    nunokawa_q_prime_0,
    sigma_bound,
)
from .errors import DomainError, SingularSampleError
from .reports import MarginReport

__all__ = [
    "GridSpec",
    "AdmissibilityProblem",
    "MARGIN_TOL",
    "psi_catalog",
    "admissibility_problem",
    "check_halfplane_admissibility",
    "check_disk_target_admissibility",
    "check_parabola_admissibility",
    "verify_geometric_mean_step",
    "certify",
]

MARGIN_TOL = 1e-8
_TREND_DECADE_SAMPLES = 16


@dataclass(frozen=True)
class GridSpec:
    rho_max: float = 20.0
    rho_count: int = 401
    sigma_depth_factor: float = 10.0
    sigma_count: int = 101
    theta_exclusion: float = 1e-3
    m_count: int = 33
    theta_count: int = 721

    def __post_init__(self):
        for name in ("rho_count", "sigma_count", "m_count", "theta_count"):
            if getattr(self, name) < 8:
                raise DomainError(f"GridSpec.{name} must be >= 8")
        if self.sigma_depth_factor < 1:
            raise DomainError("sigma_depth_factor must be >= 1")
        if not 0 < self.theta_exclusion < math.pi:
            raise DomainError("theta_exclusion must lie in (0, pi)")
        if self.rho_max <= 0:
            raise DomainError("rho_max must be positive")


@dataclass(frozen=True)
class AdmissibilityProblem:
    """``psi`` (with its constant baked in) must avoid ``omega`` on the critical data."""

    psi: Callable
    omega: TargetRegion
    a: complex
    beta: float
    n: int
    grid: GridSpec = GridSpec()
    theorem: str | None = None
    b: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if complex(self.a).real <= 0:
            raise DomainError("half-plane problems need Re a > 0")
        if not 0 <= self.beta <= 2 * complex(self.a).real * (1 + 1e-12):
            raise DomainError(f"beta = {self.beta} outside [0, 2 Re a]")


def psi_catalog(theorem, abs_b: float):
    """``(psi, alpha)`` for the theorem at ``|b|``."""
    spec = get_theorem(theorem)
    alpha = spec.alpha(abs_b)
    tid = spec.id
    if tid is TheoremId.MARX_STROHHACKER_2_2:
        psi = lambda r, s: (r + 1) / 2 + s / (r + 1) - alpha  # noqa: E731
    elif tid is TheoremId.SQRT_DERIV_2_5:
        psi = lambda r, s: 1 + 2 * s / (r + 1) - alpha  # noqa: E731
    elif tid is TheoremId.RATIO_2_7:
        psi = lambda r, s: 1 + s / (r + 1) - alpha  # noqa: E731
    elif tid is TheoremId.PARABOLA_2_9:
        psi = lambda r, s: np.sqrt((r + s + 1) / 2 + 0j) - alpha  # noqa: E731
    elif tid is TheoremId.NUNOKAWA_3_1:
        psi = lambda r, s: r + s / r  # noqa: E731
    else:
        psi = lambda r, s: r + alpha + s / (r + alpha)  # noqa: E731
    return psi, alpha


def admissibility_problem(theorem, abs_b: float, grid: GridSpec = GridSpec()) -> AdmissibilityProblem:
    """Half-plane problem for every theorem except ``nunokawa3_1`` (a disk target)."""
    spec = get_theorem(theorem)
    if spec.id is TheoremId.NUNOKAWA_3_1:
        raise DomainError("nunokawa3_1 has a disk target; use check_disk_target_admissibility")
    abs_b = spec.check_b(abs_b)
    psi, alpha = psi_catalog(spec, abs_b)
    beta = 2.0 * abs_b
    if spec.id is TheoremId.CONVEX_3_3:
        return AdmissibilityProblem(psi, TargetRegion.half_plane(-0.5), 1.0 - alpha, beta, 2,
                                    grid, spec.id.value, abs_b, alpha)
    return AdmissibilityProblem(psi, TargetRegion.half_plane(0.0), 1.0, beta, 1,
                                grid, spec.id.value, abs_b, alpha)


def _critical_samples(a: complex, beta: float, n: int, grid: GridSpec):
    rho = np.linspace(-grid.rho_max, grid.rho_max, grid.rho_count)
    top = np.array([sigma_bound(r, a, beta, n) for r in rho])
    t = np.linspace(0.0, 1.0, grid.sigma_count)
    # row i runs from depth_factor * sigma_bound up to sigma_bound itself
    sigma = top[:, None] * (grid.sigma_depth_factor - (grid.sigma_depth_factor - 1.0) * t[None, :])
    return rho, sigma


def _reduce_max(margin: np.ndarray, label: str) -> tuple[int, int, int]:
    finite = np.isfinite(margin)
    skipped = int(margin.size - finite.sum())
    if not finite.any():
        raise SingularSampleError(f"{label}: every sample was singular")
    masked = np.where(finite, margin, -np.inf)
    i, j = np.unravel_index(int(np.argmax(masked)), margin.shape)
    return int(i), int(j), skipped


def check_halfplane_admissibility(problem: AdmissibilityProblem, tol: float = MARGIN_TOL) -> MarginReport:
    """
    Largest value of ``slack_Omega(psi(i rho, sigma))`` over the critical samples.

    Passing means ``worst_margin <= tol`` and ``psi(a, 0)`` lies in ``Omega``.
    ``details`` records the margins along the critical curve
    ``sigma = sigma_bound(rho)``, where the margin is largest for the sharp constants.
    """
    grid = problem.grid
    rho, sigma = _critical_samples(problem.a, problem.beta, problem.n, grid)
    r = 1j * rho[:, None] + np.zeros_like(sigma)
    with np.errstate(all="ignore"):
        margin = np.asarray(problem.omega.slack(problem.psi(r, sigma + 0j)), dtype=float)
        base = float(problem.omega.slack(problem.psi(complex(problem.a), 0j)))
    i, j, skipped = _reduce_max(margin, problem.theorem or "half-plane check")
    worst = float(margin[i, j])
    curve = margin[:, -1]
    curve = curve[np.isfinite(curve)]
    k = int(np.argmax(np.where(np.isfinite(margin[:, -1]), margin[:, -1], -np.inf)))
    details = {
        "omega": problem.omega.describe(),
        "a": complex(problem.a),
        "beta": problem.beta,
        "n": problem.n,
        "base_point_slack": base,
        "critical_max": float(curve.max()),
        "critical_min": float(curve.min()),
        "critical_spread": float(curve.max() - curve.min()),
        "critical_argmax_rho": float(rho[k]),
    }
    return MarginReport(
        worst_margin=worst,
        argmin={"rho": float(rho[i]), "sigma": float(sigma[i, j])},
        samples=int(margin.size),
        skipped=skipped,
        passed=bool(worst <= tol and base > 0),
        theorem=problem.theorem,
        b=problem.b,
        alpha=problem.alpha,
        details=details,
    )


def _theta_grid(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    ex = grid.theta_exclusion
    uniform = np.linspace(ex, 2 * math.pi - ex, grid.theta_count)
    decade = np.geomspace(min(10 * ex, math.pi), ex, _TREND_DECADE_SAMPLES)
    theta = np.unique(np.concatenate([uniform, decade, 2 * math.pi - decade]))
    return theta, decade


def check_disk_target_admissibility(abs_b: float, grid: GridSpec = GridSpec(),
                                    tol: float = MARGIN_TOL) -> MarginReport:
    """
    Minimum of ``Re psi(q(zeta), m zeta q'(zeta)) - 3/2`` for ``psi(r, s) = r + s/r``
    and ``q(z) = alpha(1 - z)/((alpha - 1) z + alpha)``.

    ``zeta = e^{i theta}`` avoids a ``theta_exclusion`` neighbourhood of 1 and
    ``m`` runs over ``[m_min, m_min + 3]``.  Besides the minimum, the report
    checks that the margin does not fall as ``theta -> 0+`` over the last
    decade of samples, and that it is nondecreasing in ``m``.
    """
    spec = get_theorem(TheoremId.NUNOKAWA_3_1)
    abs_b = spec.check_b(abs_b)
    alpha = alpha_nunokawa(abs_b)
    psi, _ = psi_catalog(spec, abs_b)
    q0 = abs(nunokawa_q_prime_0(alpha))
    m_lo = min_m(1, q0, abs_b)
    m = np.linspace(m_lo, m_lo + 3.0, grid.m_count)
    theta, decade = _theta_grid(grid)
    zeta = np.exp(1j * theta)
    den = (alpha - 1) * zeta + alpha
    q = alpha * (1 - zeta) / den
    dq = alpha * (1 - 2 * alpha) / den**2
    with np.errstate(all="ignore"):
        values = psi(q[None, :], m[:, None] * (zeta * dq)[None, :])
        margin = np.asarray(values.real - 1.5, dtype=float)
    i, j, skipped = _reduce_max(-margin, "nunokawa3_1")
    worst = float(margin[i, j])

    near = np.searchsorted(theta, decade)  # decade is decreasing in theta
    trend = np.diff(margin[:, near], axis=1)
    trend_ok = bool(np.all(trend[np.isfinite(trend)] >= -tol))
    m_steps = np.diff(margin, axis=0)
    monotone_m = bool(np.all(m_steps[np.isfinite(m_steps)] >= -tol))
    base = 1.5 - float(np.real(psi(1.0 + 0j, 0j)))
    details = {
        "omega": TargetRegion.half_plane(1.5, "<").describe(),
        "q_prime_0": nunokawa_q_prime_0(alpha),
        "m_min": m_lo,
        "base_point_slack": base,
        "boundary_trend_ok": trend_ok,
        "monotone_in_m": monotone_m,
    }
    return MarginReport(
        worst_margin=worst,
        argmin={"theta": float(theta[j]), "m": float(m[i])},
        samples=int(margin.size),
        skipped=skipped,
        passed=bool(worst >= -tol and base > 0 and trend_ok),
        theorem=spec.id.value,
        b=abs_b,
        alpha=alpha,
        details=details,
    )


def check_parabola_admissibility(abs_b: float, grid: GridSpec = GridSpec(),
                                 tol: float = MARGIN_TOL) -> MarginReport:
    """
    Largest ``Re sqrt(zeta) - sqrt((1+|b|)/8)`` with ``zeta = (1 + sigma + i rho)/2``
    over the critical samples for ``a = 1``, ``beta = 2|b|``, ``n = 1``.
    """
    spec = get_theorem(TheoremId.PARABOLA_2_9)
    abs_b = spec.check_b(abs_b)
    alpha = alpha_parabola(abs_b)
    rho, sigma = _critical_samples(1.0, 2.0 * abs_b, 1, grid)
    zeta = (1 + sigma + 1j * rho[:, None]) / 2
    margin = np.sqrt(zeta).real - alpha
    i, j, skipped = _reduce_max(margin, "parabola2_9")
    worst = float(margin[i, j])
    # containment: xi <= (|b| - 4 eta^2) / (2 (1 + |b|)) for every sample
    inside = (zeta.real - (abs_b - 4 * zeta.imag**2) / (2 * (1 + abs_b))).max()
    details = {
        "parabola_vertex": abs_b / (2 * (1 + abs_b)),
        "max_parabola_excess": float(inside),
        "base_point_slack": 1.0 - alpha,
    }
    return MarginReport(
        worst_margin=worst,
        argmin={"rho": float(rho[i]), "sigma": float(sigma[i, j])},
        samples=int(margin.size),
        skipped=skipped,
        passed=bool(worst <= tol and inside <= tol),
        theorem=spec.id.value,
        b=abs_b,
        alpha=alpha,
        details=details,
    )


def verify_geometric_mean_step(abs_b: float, eta_max: float = 10.0, count: int = 10_000,
                               tol: float = MARGIN_TOL) -> MarginReport:
    """``sqrt((1+4 eta^2)(|b|^2+4 eta^2)) - (1 + 8 eta^2 + |b|^2)/2`` maximized over ``[0, eta_max]``."""
    if count < 8:
        raise DomainError("count must be >= 8")
    eta = np.linspace(0.0, eta_max, count)
    e2 = 4 * eta**2
    margin = np.sqrt((1 + e2) * (abs_b**2 + e2)) - (1 + 2 * e2 + abs_b**2) / 2
    k = int(np.argmax(margin))
    worst = float(margin[k])
    return MarginReport(
        worst_margin=worst,
        argmin={"eta": float(eta[k])},
        samples=count,
        passed=bool(worst <= tol),
        b=float(abs_b),
    )


def certify(theorem, abs_b: float, grid: GridSpec = GridSpec(), tol: float = MARGIN_TOL) -> MarginReport:
    """Run the checker that belongs to ``theorem``."""
    spec = get_theorem(theorem)
    if spec.id is TheoremId.NUNOKAWA_3_1:
        return check_disk_target_admissibility(abs_b, grid, tol)
    if spec.id is TheoremId.PARABOLA_2_9:
        return check_parabola_admissibility(abs_b, grid, tol)
    return check_halfplane_admissibility(admissibility_problem(spec, abs_b, grid), tol)
