import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rel_err
from subord_lab.bounds import THEOREMS, TheoremId
from subord_lab.errors import InputShapeError, NormalizationError
from subord_lab.operators import (
    FixedCoeffFunction,
    PFunction,
    build_from_p,
    local_univalence_check,
    p_transform,
    pre_schwarzian,
    ratio_to_z,
    sqrt_derivative,
    starlike_ratio,
)
from subord_lab.series import (
    TruncatedSeries,
    series_derivative,
    series_div,
    series_log,
    series_mul,
)

ORDER = 24
Z = TruncatedSeries.identity(ORDER)


def fn(series, n=1):
    return FixedCoeffFunction(series, n)


IDENT = fn(Z)
KOEBE = fn(series_div(Z, (1 - Z) ** 2))
MOBIUS = fn(series_div(Z, 1 - Z))
B = 0.3 - 0.2j
QUAD = fn(Z + B * Z * Z)


def random_f(rng, n=1, order=40, decay=0.6):
    c = np.zeros(order + 1, complex)
    c[1] = 1
    k = np.arange(n + 1, order + 1)
    c[n + 1 :] = (rng.uniform(-1, 1, k.size) + 1j * rng.uniform(-1, 1, k.size)) * decay ** (k - n)
    c[n + 1] *= 0.5 / max(1e-3, abs(c[n + 1]))  # |b| = 0.5 keeps both theorem ranges open
    return FixedCoeffFunction(TruncatedSeries(c, order), n)


def locally_univalent_f(rng, order=40):
    """Random f with sum k|a_k| <= 0.9 over k >= 2, so |f'| >= 0.1 on the closed disk."""
    c = np.zeros(order + 1, complex)
    c[1] = 1
    c[2:] = rng.uniform(-1, 1, order - 1) + 1j * rng.uniform(-1, 1, order - 1)
    k = np.arange(order + 1)
    c[2:] *= 0.9 / np.sum(k[2:] * np.abs(c[2:]))
    return FixedCoeffFunction(TruncatedSeries(c, order), 1)


class TestFixedCoeffFunction:
    def test_reads_b(self):
        assert QUAD.b == B
        assert QUAD.abs_b == pytest.approx(abs(B))

    def test_declared_b_must_match(self):
        with pytest.raises(NormalizationError):
            FixedCoeffFunction(QUAD.series, 1, b=0.1)

    def test_normalization(self):
        with pytest.raises(NormalizationError):
            fn(1 + Z)
        with pytest.raises(NormalizationError):
            fn(2 * Z)

    def test_gap_coefficients(self):
        with pytest.raises(NormalizationError):
            fn(Z + Z * Z, n=2)
        f = fn(Z + 0.25 * Z**3, n=2)
        assert f.b == 0.25

    def test_shape(self):
        with pytest.raises(InputShapeError):
            fn(TruncatedSeries([0, 1], 1))
        with pytest.raises(InputShapeError):
            fn(Z, n=0)


class TestOperatorExamples:
    @pytest.mark.parametrize("op", [starlike_ratio, pre_schwarzian, ratio_to_z, sqrt_derivative])
    def test_identity_maps_to_one(self, op):
        out = op(IDENT)
        assert out[0] == 1
        assert np.max(np.abs(out.coeffs[1:])) == 0

    def test_koebe_starlike_ratio(self):
        oracle = series_div(1 + Z, 1 - Z)
        out = starlike_ratio(KOEBE)
        assert np.allclose(out.coeffs, oracle.coeffs[: out.order + 1])
        assert np.allclose(out.coeffs[:4], [1, 2, 2, 2])

    def test_quadratic_linear_coefficients(self):
        assert starlike_ratio(QUAD)[1] == pytest.approx(B, abs=1e-15)
        assert pre_schwarzian(QUAD)[1] == pytest.approx(2 * B, abs=1e-15)
        assert np.allclose(ratio_to_z(QUAD).coeffs[:3], [1, B, 0])

    def test_mobius(self):
        out = pre_schwarzian(MOBIUS)
        assert np.allclose(out.coeffs, series_div(1 + Z, 1 - Z).coeffs[: out.order + 1])
        assert np.allclose(ratio_to_z(MOBIUS).coeffs, 1)

    def test_sqrt_binomial(self):
        s = sqrt_derivative(QUAD)
        assert np.allclose(s.coeffs[:3], [1, B, -B * B / 2])

    def test_sqrt_squared_is_derivative(self):
        s = sqrt_derivative(KOEBE)
        assert rel_err(series_mul(s, s), series_derivative(KOEBE.series)) < 1e-12

    def test_zero_function(self):
        with pytest.raises(ArithmeticError):
            starlike_ratio(TruncatedSeries([0], ORDER))


class TestPTransform:
    def test_marx_identity(self):
        p = p_transform(TheoremId.MARX_STROHHACKER_2_2, IDENT)
        assert p.beta == 0
        assert p.series[0] == 1 and np.all(p.series.coeffs[1:] == 0)

    def test_marx_first_coefficient(self):
        p = p_transform("marx2_2", QUAD)
        assert p.series[1] == pytest.approx(2 * B)
        assert p.beta == pytest.approx(2 * abs(B))

    def test_convex_alpha_half(self):
        f = fn(Z + 0.5 * Z**3, n=2)
        p = p_transform("convex3_3", f)
        assert p.a == pytest.approx(0.5)
        assert p.series[0] == pytest.approx(0.5)
        assert p.series[1] == 0
        assert p.series[2] == pytest.approx(1.0)

    def test_wrong_n(self):
        with pytest.raises(InputShapeError):
            p_transform("convex3_3", QUAD)

    def test_range(self):
        with pytest.raises(ValueError):
            p_transform("nunokawa3_1", fn(Z + 0.8 * Z * Z))

    @pytest.mark.parametrize("tid", list(TheoremId))
    def test_bookkeeping_random(self, tid, rng):
        spec = THEOREMS[tid]
        for _ in range(10):
            f = random_f(rng, n=spec.n)
            p = p_transform(tid, f)
            c = p.series.coeffs
            assert abs(c[0] - p.a) <= 1e-12
            assert np.all(np.abs(c[1 : p.n]) <= 1e-12)
            assert abs(abs(c[p.n]) - p.beta) <= 1e-12
            assert p.beta == pytest.approx(spec.p_beta_scale * f.abs_b)


class TestBuildFromP:
    def test_constant(self):
        f = build_from_p(TruncatedSeries.constant(1.0, ORDER))
        assert rel_err(f.series, Z) < 1e-15

    def test_koebe(self):
        f = build_from_p(series_div(1 + Z, 1 - Z))
        assert rel_err(f.series, KOEBE.series) < 1e-13

    def test_linear(self):
        b = 0.2 + 0.1j
        f = build_from_p(1 + 2 * b * Z)
        assert np.allclose(f.series.coeffs[:4], [0, 1, 2 * b, 2 * b * b])

    def test_normalization(self):
        with pytest.raises(NormalizationError):
            build_from_p(2 + Z)

    def test_gap_index_from_pfunction(self):
        p = PFunction(1 + 0.4 * Z * Z, 1.0, 2, 0.4)
        assert build_from_p(p).n == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_build_round_trip(order, seed):
    rng = np.random.default_rng(seed)
    c = (rng.uniform(-1, 1, order + 1) + 1j * rng.uniform(-1, 1, order + 1))
    c[0] = 1
    p = TruncatedSeries(c, order)
    out = starlike_ratio(build_from_p(p))
    assert rel_err(out, p) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pre_schwarzian_is_log_derivative(seed):
    f = locally_univalent_f(np.random.default_rng(seed))
    d1 = series_derivative(f.series)
    alt = 1 + series_derivative(series_log(d1)).shift_up(1)
    assert rel_err(pre_schwarzian(f), alt) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sqrt_derivative_squares(seed):
    f = locally_univalent_f(np.random.default_rng(seed))
    s = sqrt_derivative(f)
    assert rel_err(series_mul(s, s), series_derivative(f.series)) < 1e-12


class TestLocalUnivalence:
    RADII = np.linspace(0.1, 0.98, 45)

    def test_identity(self):
        rep = local_univalence_check(IDENT, self.RADII, 64)
        assert rep.worst_margin == pytest.approx(1.0)
        assert rep.samples == 45 * 64

    def test_half_quadratic(self):
        rep = local_univalence_check(fn(Z + Z * Z / 2), self.RADII, 64)
        assert rep.worst_margin == pytest.approx(0.02, abs=1e-12)
        assert rep.argmin["z"] == pytest.approx(-0.98)

    def test_full_quadratic_hits_critical_point(self):
        # f' = 1 + 2z vanishes at -1/2, which lies on the r = 0.5 circle
        rep = local_univalence_check(fn(Z + Z * Z), [0.5, 0.98], 64)
        assert rep.worst_margin == pytest.approx(0.0, abs=1e-12)
        assert rep.argmin["z"] == pytest.approx(-0.5)

    def test_full_quadratic_outer_circle(self):
        rep = local_univalence_check(fn(Z + Z * Z), [0.98], 64)
        assert rep.worst_margin == pytest.approx(0.96, abs=1e-12)
