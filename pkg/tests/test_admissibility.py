import math

import numpy as np
import pytest

from subord_lab.admissibility import (
    AdmissibilityProblem,
    GridSpec,
    admissibility_problem,
    certify,
    check_disk_target_admissibility,
    check_halfplane_admissibility,
    check_parabola_admissibility,
    psi_catalog,
    verify_geometric_mean_step,
)
from subord_lab.bounds import TargetRegion, TheoremId, alpha_nunokawa, sigma_bound
from subord_lab.errors import DomainError, SingularSampleError

HALF_PLANE = ["marx2_2", "sqrt2_5", "ratio2_7"]
B_GRID_1 = [round(0.1 * k, 10) for k in range(11)]
B_GRID_HALF = [round(0.1 * k, 10) for k in range(6)]


class TestGridSpec:
    def test_defaults(self):
        g = GridSpec()
        assert (g.rho_max, g.rho_count, g.sigma_depth_factor, g.sigma_count) == (20.0, 401, 10.0, 101)
        assert (g.theta_exclusion, g.m_count) == (1e-3, 33)

    @pytest.mark.parametrize("kw", [
        {"rho_count": 7}, {"sigma_count": 4}, {"m_count": 2}, {"sigma_depth_factor": 0.5},
        {"theta_exclusion": 0}, {"rho_max": -1},
    ])
    def test_validation(self, kw):
        with pytest.raises(DomainError):
            GridSpec(**kw)


class TestHalfPlane:
    @pytest.mark.parametrize("tid", HALF_PLANE)
    @pytest.mark.parametrize("b", B_GRID_1)
    def test_exact_equality_chain(self, tid, b):
        rep = check_halfplane_admissibility(admissibility_problem(tid, b))
        assert rep.passed
        assert abs(rep.worst_margin) <= 1e-10
        assert rep.details["critical_spread"] <= 1e-10
        assert abs(rep.details["critical_max"]) <= 1e-10

    def test_marx_critical_value_by_hand(self):
        # at rho = 0, sigma = sigma_bound(0): psi = 1/2 + sigma - alpha
        b = 0.3
        psi, alpha = psi_catalog("marx2_2", b)
        s = sigma_bound(0.0, 1.0, 2 * b, 1)
        assert psi(0j, s) == pytest.approx(0.0, abs=1e-15)
        assert s == pytest.approx(-(1 + (2 - 0.6) / 2.6) / 2)

    @pytest.mark.parametrize("b", B_GRID_HALF[:-1])
    def test_convex_maximum_at_origin(self, b):
        rep = certify("convex3_3", b)
        assert rep.passed
        assert rep.worst_margin <= 1e-10
        assert rep.details["critical_argmax_rho"] == 0.0
        assert rep.argmin["rho"] == 0.0

    def test_convex_flat_at_endpoint(self):
        # alpha = 1/2 kills the rho-dependence of the critical margin
        rep = certify("convex3_3", 0.5)
        assert rep.passed
        assert rep.details["critical_spread"] <= 1e-10

    def test_samples_count(self):
        g = GridSpec(rho_count=11, sigma_count=9)
        rep = check_halfplane_admissibility(admissibility_problem("ratio2_7", 0.5, g))
        assert rep.samples == 99

    def test_refinement_stable(self):
        coarse = certify("sqrt2_5", 0.4, GridSpec(rho_count=101, sigma_count=26))
        fine = certify("sqrt2_5", 0.4, GridSpec(rho_count=201, sigma_count=51))
        assert coarse.passed and fine.passed
        assert fine.worst_margin <= coarse.worst_margin + 1e-8

    def test_detects_a_wrong_constant(self):
        # alpha pushed above the proved bound must fail
        psi, alpha = psi_catalog("ratio2_7", 0.5)
        prob = AdmissibilityProblem(lambda r, s: psi(r, s) - 0.05, TargetRegion.half_plane(0.0),
                                    1.0, 1.0, 1)
        assert check_halfplane_admissibility(prob).passed
        prob = AdmissibilityProblem(lambda r, s: psi(r, s) + 0.05, TargetRegion.half_plane(0.0),
                                    1.0, 1.0, 1)
        assert not check_halfplane_admissibility(prob).passed

    def test_all_singular(self):
        prob = AdmissibilityProblem(lambda r, s: np.full(np.shape(s), np.nan), TargetRegion.half_plane(0.0),
                                    1.0, 1.0, 1)
        with pytest.raises(SingularSampleError):
            check_halfplane_admissibility(prob)

    def test_problem_validation(self):
        with pytest.raises(DomainError):
            AdmissibilityProblem(lambda r, s: r, TargetRegion.half_plane(0), -1.0, 0.5, 1)
        with pytest.raises(DomainError):
            AdmissibilityProblem(lambda r, s: r, TargetRegion.half_plane(0), 1.0, 3.0, 1)
        with pytest.raises(DomainError):
            admissibility_problem("nunokawa3_1", 0.2)


class TestDiskTarget:
    @pytest.mark.parametrize("b", B_GRID_HALF)
    def test_passes(self, b):
        rep = check_disk_target_admissibility(b)
        assert rep.passed
        assert rep.worst_margin >= -1e-8
        assert rep.details["boundary_trend_ok"]
        assert rep.details["monotone_in_m"]

    def test_margin_by_hand(self):
        # at zeta = -1, m = m_min: Re(q + m zeta q'/q) - 3/2 from the closed forms
        b = 0.5
        a = alpha_nunokawa(b)
        q = a * 2 / (a - (a - 1))
        dq = a * (1 - 2 * a) / (a - (a - 1)) ** 2
        m = 1 + (abs(1 - 2 * a) / a - b) / (abs(1 - 2 * a) / a + b)
        val = (q + m * (-1) * dq / q).real - 1.5
        rep = check_disk_target_admissibility(b, GridSpec(theta_count=721))
        assert rep.worst_margin <= val + 1e-12
        assert val >= -1e-12

    def test_grows_with_m(self):
        g = GridSpec(m_count=9)
        rep = check_disk_target_admissibility(0.25, g)
        assert rep.argmin["m"] == pytest.approx(rep.details["m_min"])

    def test_samples(self):
        g = GridSpec(m_count=9, theta_count=64)
        rep = check_disk_target_admissibility(0.1, g)
        assert rep.samples % 9 == 0 and rep.samples >= 9 * 64

    def test_range(self):
        with pytest.raises(DomainError):
            check_disk_target_admissibility(0.6)


class TestParabola:
    @pytest.mark.parametrize("b", [0.0, 0.5, 1.0])
    def test_passes(self, b):
        rep = check_parabola_admissibility(b)
        assert rep.passed and rep.worst_margin <= 1e-8
        assert rep.details["max_parabola_excess"] <= 1e-8

    def test_vertex_sample(self):
        # sqrt(xi) < sqrt((1+b)/8) reduces to (1 - b)^2 > 0: strict below b = 1, equal at 1
        for b in (0.0, 0.3, 0.9, 1.0):
            s = sigma_bound(0.0, 1.0, 2 * b, 1)
            xi = (1 + s) / 2
            assert xi <= b / (2 * (1 + b)) + 1e-15
            gap = math.sqrt(max(xi, 0)) - math.sqrt((1 + b) / 8)
            if b < 1:
                assert gap < 0
            else:
                assert gap == pytest.approx(0.0, abs=1e-15)


class TestGeometricMean:
    def test_equality_case(self):
        rep = verify_geometric_mean_step(1.0, count=8)
        assert rep.worst_margin == pytest.approx(0.0, abs=1e-15)
        assert rep.argmin["eta"] == 0.0

    def test_hand_value(self):
        # b = 0: the margin rises towards 0 with eta, so eta = 1 is the worst sample on [0, 1]
        rep = verify_geometric_mean_step(0.0, eta_max=1.0, count=8)
        assert rep.worst_margin == pytest.approx(math.sqrt(20) - 4.5, abs=1e-14)
        assert rep.argmin["eta"] == 1.0

    @pytest.mark.parametrize("b", [0.0, 0.5, 1.0])
    def test_never_positive(self, b):
        rep = verify_geometric_mean_step(b, 10.0, 10_000)
        assert rep.passed and rep.worst_margin <= 1e-12
        assert rep.samples == 10_000

    def test_count(self):
        with pytest.raises(DomainError):
            verify_geometric_mean_step(0.5, count=4)


@pytest.mark.parametrize("tid", list(TheoremId))
def test_certify_dispatch(tid):
    rep = certify(tid, 0.2)
    assert rep.passed
    d = rep.to_dict()
    assert d["schema"] == "1" and d["theorem"] == tid.value
    assert {"worst_margin", "argmin", "samples", "passed", "b", "alpha"} <= d.keys()
