"""
End-to-end checks of the implications on concrete test functions.

A test function is built so that its hypothesis operator takes values in the
hypothesis region (``moebius_p``), or is taken as given and checked after the
fact (``polynomial_perturbation``, ``catalog``).  :func:`verify_implication`
then samples the hypothesis and conclusion operators on a polar grid and
compares the margins.

``moebius_p`` composes the half-plane map ``q_c(w) = 1 + 2(1-c) w/(1-w)``
(image ``Re w > c`` for ``c < 1``, ``Re w < c`` for ``c > 1``) with the Schwarz
function ``omega(z) = z^n (gamma + u z^{nk}) / (1 + conj(gamma) u z^{nk})``.
With ``u = 1, k = 1, n = 1`` this is ``z (gamma + z)/(1 + conj(gamma) z)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .bounds import TheoremSpec, _bisect, get_theorem
from .errors import (
    DomainError,
    EvaluationRadiusError,
    InputShapeError,
    NormalizationError,
    RejectedSampleError,
    SingularSampleError,
)
from .operators import OPERATORS, FixedCoeffFunction, build_from_p, local_univalence_check
from .reports import SCHEMA_VERSION, _jsonable
from .series import (
    R_MAX,
    TruncatedSeries,
    circle_points,
    default_order,
    eval_grid,
    series_antiderivative,
    series_div,
    series_exp,
)

__all__ = [
    "VerificationConfig",
    "TestFamily",
    "ImplicationReport",
    "CATALOG",
    "generate_test_function",
    "sample_family",
    "verify_implication",
    "subordination_margin",
    "sweep_theorem",
    "summarize",
    "write_jsonl",
    "write_csv",
]

FAMILY_KINDS = ("moebius_p", "polynomial_perturbation", "catalog")
CSV_COLUMNS = ("theorem", "b", "hypothesis_margin", "conclusion_margin", "verdict")


@dataclass(frozen=True)
class VerificationConfig:
    tol: float = 1e-8
    radii: tuple = (0.5, 0.7, 0.9, 0.95)
    angles: int = 256
    # extremal families have poles on the unit circle; 64 terms leave a
    # truncation error of ~2e-2 at r = 0.95, 512 terms ~1e-10
    order: int = 512
    univalence_threshold: float = 1e-6
    singular_threshold: float = 1e-10


@dataclass(frozen=True)
class TestFamily:
    __test__ = False  # not a pytest class

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise DomainError(f"unknown family kind {self.kind!r}; expected one of {FAMILY_KINDS}")


@dataclass
class ImplicationReport:
    """
    Outcome of one implication check.

    ``verdict`` is ``violation`` only when the hypothesis margin exceeds
    ``tol`` while the conclusion margin is below ``-tol``.  ``skipped``
    entries carry the reason in ``note``.
    """

    theorem: str
    b: complex | None
    hypothesis_margin: float | None
    conclusion_margin: float | None
    verdict: str
    radii: tuple = ()
    angles: int = 0
    hypothesis_alpha: float | None = None
    conclusion_alpha: float | None = None
    strip_margin: float | None = None
    min_abs_f_over_z: float | None = None
    min_abs_fprime: float | None = None
    truncation_estimate: float | None = None
    order: int | None = None
    family: dict | None = None
    note: str = ""

    @property
    def abs_b(self) -> float | None:
        return None if self.b is None else abs(self.b)

    def to_dict(self) -> dict[str, Any]:
        d = {"schema": SCHEMA_VERSION}
        d.update(asdict(self))
        d["abs_b"] = self.abs_b
        return _jsonable(d)

    def csv_row(self) -> dict[str, Any]:
        return {
            "theorem": self.theorem,
            "b": "" if self.b is None else repr(abs(self.b)),
            "hypothesis_margin": "" if self.hypothesis_margin is None else repr(self.hypothesis_margin),
            "conclusion_margin": "" if self.conclusion_margin is None else repr(self.conclusion_margin),
            "verdict": self.verdict,
        }


# -- test-function construction ------------------------------------------------

def _coefficient_gain(op: str, n: int) -> float:
    """``|b| = gain * |1 - c| * |gamma|`` for the moebius_p construction."""
    if op == "pre_schwarzian":
        return 2.0 / (n * (n + 1))
    if op == "starlike_ratio":
        return 2.0 / n
    if op == "sqrt_derivative":
        return 4.0 / (n + 1)
    raise DomainError(f"no moebius_p construction for hypothesis operator {op!r}")


def _schwarz(gamma: complex, u: complex, k: int, n: int, order: int) -> TruncatedSeries:
    z_nk = TruncatedSeries([0] * (n * k) + [u], order)
    num = gamma + z_nk
    den = 1 + np.conj(gamma) * z_nk
    return series_div(num, den).shift_up(n).truncate(order)


def _halfplane_map(omega: TruncatedSeries, level: float) -> TruncatedSeries:
    return 1 + 2.0 * (1.0 - level) * series_div(omega, 1 - omega)


def _self_consistent_level(spec: TheoremSpec, gamma_abs: float) -> float:
    """Hypothesis constant ``c`` that matches the |b| produced by ``|gamma|`` at level ``c``."""
    region = spec.hypothesis_region(0.0)
    if spec.hypothesis_region(spec.b_max) == region:
        return region.alpha
    gain = _coefficient_gain(spec.hypothesis_op, spec.n)
    g = lambda t: t - gain * abs(1.0 - spec.hypothesis_region(t).alpha) * gamma_abs  # noqa: E731
    t = _bisect(g, 0.0, spec.b_max, 1e-15, 200)
    return spec.hypothesis_region(t).alpha


def _build_moebius(spec: TheoremSpec, params: dict, order: int) -> FixedCoeffFunction:
    gamma = complex(params.get("gamma", 0.0))
    u = complex(params.get("u", 1.0))
    k = int(params.get("k", 1))
    if abs(gamma) > 1 + 1e-12 or abs(u) > 1 + 1e-12 or k < 1:
        raise RejectedSampleError(f"moebius_p needs |gamma| <= 1, |u| <= 1, k >= 1; got {params}")
    level = params.get("level")
    level = _self_consistent_level(spec, abs(gamma)) if level is None else float(level)
    n = spec.n
    h = _halfplane_map(_schwarz(gamma, u, k, n, order), level)
    op = spec.hypothesis_op
    if op == "starlike_ratio":
        return build_from_p(h, n)
    if op == "pre_schwarzian":
        dlog = series_antiderivative((h - 1).shift_down(1))
        fprime = series_exp(dlog)
    elif op == "sqrt_derivative":
        fprime = h * h
    else:  # pragma: no cover
        raise DomainError(op)
    return FixedCoeffFunction(series_antiderivative(fprime), n)


def _rotate(coeffs: np.ndarray, rotation: complex) -> np.ndarray:
    # conj(l) f(l z) for |l| = 1 keeps the normalization and rotates b
    k = np.arange(len(coeffs))
    return coeffs * rotation ** (k - 1)


def _catalog_coeffs(name: str, order: int) -> np.ndarray:
    k = np.arange(order + 1, dtype=float)
    if name == "identity":
        c = np.zeros(order + 1)
        c[1] = 1.0
    elif name == "koebe":
        c = k.copy()
    elif name == "convex_mobius":
        c = (k >= 1).astype(float)
    elif name == "neg_log":
        c = np.where(k >= 1, 1.0 / np.maximum(k, 1), 0.0)
    elif name == "odd_convex":
        c = np.where(k % 2 == 1, 1.0 / np.maximum(k, 1), 0.0)
    elif name == "odd_koebe":
        c = (k % 2 == 1).astype(float)
    else:
        raise DomainError(f"unknown catalog function {name!r}; expected one of {sorted(CATALOG)}")
    return c.astype(complex)


CATALOG = {
    "identity": "z",
    "koebe": "z/(1-z)^2",
    "convex_mobius": "z/(1-z)",
    "neg_log": "-log(1-z)",
    "odd_convex": "artanh(z)",
    "odd_koebe": "z/(1-z^2)",
}


def generate_test_function(theorem, family: TestFamily, order: int | None = None) -> FixedCoeffFunction:
    """
    Build a normalized test function for ``theorem``.

    The realized ``b`` is whatever the construction produces; a function
    outside the theorem's class raises :class:`RejectedSampleError`.
    """
    spec = get_theorem(theorem)
    order = default_order() if order is None else order
    p = family.params
    try:
        if family.kind == "moebius_p":
            f = _build_moebius(spec, p, order)
        elif family.kind == "polynomial_perturbation":
            n = spec.n
            coeffs = [0, 1] + [0] * (n - 1) + [complex(p.get("b", 0.0)), complex(p.get("eps", 0.0))]
            f = FixedCoeffFunction(TruncatedSeries(coeffs, order), n)
        else:
            c = _rotate(_catalog_coeffs(p.get("name", "identity"), order), complex(p.get("rotation", 1.0)))
            f = FixedCoeffFunction(TruncatedSeries(c, order), spec.n)
    except (NormalizationError, InputShapeError) as exc:
        raise RejectedSampleError(f"{family.kind}: {exc}") from exc
    if f.abs_b > spec.b_max + 1e-12:
        raise RejectedSampleError(
            f"{family.kind}: realized |b| = {f.abs_b:.6g} outside {spec.id.value} range [0, {spec.b_max}]")
    return f


def sample_family(kind: str, theorem, abs_b: float, rng: np.random.Generator,
                  first: bool = False) -> TestFamily:
    """
    Draw family parameters aimed at ``|b| = abs_b``.

    ``first`` pins the most extremal member (level on the hypothesis boundary,
    ``u = 1``, ``k = 1``) so every batch contains the sharp case.
    """
    spec = get_theorem(theorem)
    t = spec.check_b(abs_b)
    phase = float(rng.uniform(0.0, 2 * math.pi))
    if kind == "moebius_p":
        region = spec.hypothesis_region(t)
        gain = _coefficient_gain(spec.hypothesis_op, spec.n)
        need = t / gain  # minimal |1 - c|
        w = 0.0 if first else float(rng.uniform()) ** 2
        if region.side == ">":
            lo, hi = region.alpha, 1.0 - max(need, 0.05 if t == 0 else need)
        else:
            lo, hi = region.alpha, 1.0 + max(need, 0.05 if t == 0 else need)
        if (region.side == ">" and hi < lo - 1e-12) or (region.side == "<" and hi > lo + 1e-12):
            raise RejectedSampleError(f"no construction level reaches |b| = {t} for {spec.id.value}")
        level = lo + w * (hi - lo)
        gamma_abs = 0.0 if t == 0 else min(1.0, t / (gain * abs(1.0 - level)))
        u = 1.0 + 0j if first else complex(rng.uniform() * np.exp(1j * rng.uniform(0, 2 * math.pi)))
        k = 1 if first else int(rng.integers(1, 4))
        return TestFamily("moebius_p", {"gamma": gamma_abs * np.exp(1j * phase), "u": u, "k": k,
                                        "level": level})
    if kind == "polynomial_perturbation":
        eps = float(rng.uniform(0.0, 0.25)) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        return TestFamily(kind, {"b": t * np.exp(1j * phase), "eps": complex(eps)})
    if kind == "catalog":
        name = sorted(CATALOG)[int(rng.integers(len(CATALOG)))]
        return TestFamily(kind, {"name": name, "rotation": complex(np.exp(1j * phase))})
    raise DomainError(f"unknown family kind {kind!r}")


# -- verification ------------------------------------------------------------

def _tail_estimate(s: TruncatedSeries, r: float) -> float:
    c = np.abs(s.coeffs)
    k = np.arange(len(c))
    tail = c[-8:] * r ** k[-8:]
    return float(tail.max() / (1.0 - r))


def subordination_margin(p: TruncatedSeries, target, radii: Sequence[float], angles: int) -> float:
    """Minimum containment slack of ``p`` in ``target`` over the polar grid."""
    values = eval_grid(p, radii, angles)
    return float(np.min(target.slack(values)))


def _grid_min(values: np.ndarray, slack: np.ndarray, radii, angles, label: str) -> float:
    if not np.all(np.isfinite(values)):
        i, k = np.argwhere(~np.isfinite(values))[0]
        z = complex(circle_points(np.asarray(radii)[i : i + 1], angles)[0, k])
        raise SingularSampleError(f"{label} is not finite at z = {z}", point=z)
    return float(np.min(slack))


def verify_implication(theorem, f: FixedCoeffFunction, radii: Sequence[float] | None = None,
                       angles: int | None = None,
                       config: VerificationConfig = VerificationConfig(),
                       family: TestFamily | None = None) -> ImplicationReport:
    spec = get_theorem(theorem)
    radii = tuple(float(r) for r in (config.radii if radii is None else radii))
    angles = config.angles if angles is None else angles
    if f.n != spec.n:
        raise InputShapeError(f"{spec.id.value} needs n = {spec.n}, got n = {f.n}")
    abs_b = spec.check_b(f.abs_b)
    if max(radii) > R_MAX:
        raise EvaluationRadiusError(f"radii must not exceed {R_MAX}")

    f_over_z = eval_grid(f.series.shift_down(1), radii, angles)
    min_fz = float(np.min(np.abs(f_over_z)))
    if min_fz < config.singular_threshold:
        i, k = np.unravel_index(int(np.argmin(np.abs(f_over_z))), f_over_z.shape)
        z = complex(circle_points(np.asarray(radii)[i : i + 1], angles)[0, k])
        raise SingularSampleError(f"f vanishes (|f/z| = {min_fz:.3g}) at z = {z}", point=z)
    univ = local_univalence_check(f, radii, angles)

    hyp_region = spec.hypothesis_region(abs_b)
    hyp_series = OPERATORS[spec.hypothesis_op](f)
    hyp_values = eval_grid(hyp_series, radii, angles)
    hyp_margin = _grid_min(hyp_values, hyp_region.slack(hyp_values), radii, angles, spec.hypothesis_op)
    r_top = max(radii)
    trunc = _tail_estimate(hyp_series, r_top)

    report = ImplicationReport(
        theorem=spec.id.value, b=complex(f.b), hypothesis_margin=hyp_margin,
        conclusion_margin=None, verdict="hypothesis_not_met", radii=radii, angles=angles,
        hypothesis_alpha=hyp_region.alpha, min_abs_f_over_z=min_fz,
        min_abs_fprime=univ.worst_margin, order=f.order,
        family=None if family is None else {"kind": family.kind, "params": family.params},
    )
    gate_ok = True
    if spec.hypothesis_op == "sqrt_derivative":
        # local univalence is part of the hypothesis when sqrt(f') is the operator
        gate_ok = univ.worst_margin >= config.univalence_threshold
        if not gate_ok:
            report.note = f"local univalence gate failed: min |f'| = {univ.worst_margin:.3g}"
    if hyp_margin <= config.tol or not gate_ok:
        report.truncation_estimate = trunc
        return report

    con_region = spec.conclusion_region(abs_b)
    con_series = OPERATORS[spec.conclusion_op](f)
    con_values = eval_grid(con_series, radii, angles)
    con_margin = _grid_min(con_values, con_region.slack(con_values), radii, angles, spec.conclusion_op)
    report.conclusion_alpha = con_region.alpha
    report.conclusion_margin = con_margin
    report.truncation_estimate = max(trunc, _tail_estimate(con_series, r_top))
    if con_region.kind == "disk":
        strip = con_region.__class__.strip(con_region.alpha)
        report.strip_margin = float(np.min(strip.slack(con_values)))
    report.verdict = "violation" if con_margin < -config.tol else "verified"
    return report


def _skipped(spec: TheoremSpec, family: TestFamily, reason: str, config: VerificationConfig) -> ImplicationReport:
    return ImplicationReport(
        theorem=spec.id.value, b=None, hypothesis_margin=None, conclusion_margin=None,
        verdict="skipped", radii=tuple(config.radii), angles=config.angles, order=config.order,
        family={"kind": family.kind, "params": family.params} if family else None, note=reason,
    )


def sweep_theorem(theorem, b_grid: Iterable[float], families: Sequence[str] = ("moebius_p",),
                  samples: int = 20, seed: int = 0,
                  config: VerificationConfig = VerificationConfig()) -> list[ImplicationReport]:
    """
    Seeded batch of :func:`verify_implication` runs.

    Each ``(b, family, sample)`` triple gets its own generator seeded from
    ``(seed, b index, family index, sample index)``, so results do not depend
    on evaluation order.  Reports come back in input order.
    """
    spec = get_theorem(theorem)
    b_grid = [float(b) for b in b_grid]
    for b in b_grid:
        spec.check_b(b)
    for kind in families:
        if kind not in FAMILY_KINDS:
            raise DomainError(f"unknown family kind {kind!r}")
    reports = []
    for ib, b in enumerate(b_grid):
        for jf, kind in enumerate(families):
            for s in range(samples):
                rng = np.random.default_rng([seed, ib, jf, s])
                family = None
                try:
                    family = sample_family(kind, spec, b, rng, first=(s == 0))
                    f = generate_test_function(spec, family, config.order)
                    reports.append(verify_implication(spec, f, config=config, family=family))
                except (RejectedSampleError, SingularSampleError) as exc:
                    reports.append(_skipped(spec, family, str(exc), config))
    return reports


def summarize(reports: Iterable[ImplicationReport]) -> dict[str, int]:
    counts = {"verified": 0, "hypothesis_not_met": 0, "violation": 0, "skipped": 0}
    for r in reports:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    counts["total"] = sum(v for k, v in counts.items())
    return counts


def write_jsonl(reports: Iterable[ImplicationReport], stream) -> None:
    for r in reports:
        stream.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def write_csv(reports: Iterable[ImplicationReport], stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())


def reports_to_csv(reports: Iterable[ImplicationReport]) -> str:
    buf = io.StringIO()
    write_csv(reports, buf)
    return buf.getvalue()
