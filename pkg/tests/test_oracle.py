import math

import numpy as np
import pytest

from spincorr.closed_form import CorrelationModel, f_polarized
from spincorr.kinematics import Speed
from spincorr.oracle import (
    ConsistencyReport,
    amplitude_polarized,
    consistency_report,
    cross_check_unpolarized,
    fit_polarized,
    fit_sample_angles,
    fit_unpolarized,
    quad_unpolarized,
    quad_unpolarized_complex,
    spin_average_oracle,
    validation_grid,
)

FIT_BETAS = (0.2, 0.5, 0.8)


def _random_inputs(n, seed, beta_max=0.95):
    rng = np.random.default_rng(seed)
    return zip(
        rng.uniform(0.0, beta_max, size=n),
        rng.uniform(0.0, 2.0 * math.pi, size=n),
        rng.uniform(0.0, 2.0 * math.pi, size=n),
    )


class TestPolarizedAmplitude:
    def test_four_pi_shift_leaves_amplitude_unchanged(self):
        speed = Speed(0.7)
        for b, chi1, chi2 in _random_inputs(20, seed=3):
            base = amplitude_polarized(speed, chi1, chi2)
            shifted = amplitude_polarized(speed, chi1 + 4.0 * math.pi, chi2)
            assert shifted == pytest.approx(base, rel=1e-12, abs=1e-12)

    def test_two_pi_shift_preserves_squared_magnitude(self):
        for b, chi1, chi2 in _random_inputs(20, seed=5):
            speed = Speed(b)
            base = abs(amplitude_polarized(speed, chi1, chi2)) ** 2
            shifted = abs(amplitude_polarized(speed, chi1 + 2.0 * math.pi, chi2)) ** 2
            assert shifted == pytest.approx(base, rel=1e-12, abs=1e-12)

    def test_rest_frame_magnitude_is_angle_independent(self):
        speed = Speed(0.0)
        grid = np.linspace(0.0, 2.0 * math.pi, 13)
        values = [
            abs(amplitude_polarized(speed, a, c)) ** 2 for a in grid for c in grid
        ]
        assert max(values) - min(values) < 1e-12 * max(values)

    def test_rejects_near_lightlike(self):
        with pytest.raises(ValueError, match="Lorentz factor"):
            amplitude_polarized(Speed(1.0 - 1e-9), 0.0, 0.0)

    def test_four_pair_shift_sum_is_angle_independent(self):
        speed = Speed(0.6)
        shifts = ((0, 0), (math.pi, 0), (0, math.pi), (math.pi, math.pi))
        totals = []
        for chi1, chi2 in ((0.3, 1.1), (2.2, 4.9), (5.1, 0.4)):
            totals.append(
                sum(
                    abs(amplitude_polarized(speed, chi1 + d1, chi2 + d2)) ** 2
                    for d1, d2 in shifts
                )
            )
        assert max(totals) - min(totals) < 1e-10 * max(totals)


class TestPolarizedFit:
    def test_rest_frame_degenerates_cleanly(self):
        fit = fit_polarized(Speed(0.0))
        a, b, c, d = fit.coefficients
        assert abs(b) < 1e-10 and abs(d) < 1e-10
        assert a == pytest.approx(c, rel=1e-12)
        assert fit.rel_residual < 1e-9

    @pytest.mark.parametrize("beta", FIT_BETAS)
    def test_template_shape_holds(self, beta):
        fit = fit_polarized(Speed(beta))
        assert fit.rel_residual < 1e-9
        assert fit.scale > 0.0
        assert fit.coefficients[0] >= 0.0

    def test_fit_reproduces_oracle_on_validation_grid(self):
        speed = Speed(0.5)
        fit = fit_polarized(speed)
        grid1, grid2 = validation_grid(8)
        for chi1, chi2 in zip(grid1.ravel(), grid2.ravel()):
            oracle_value = abs(amplitude_polarized(speed, chi1, chi2)) ** 2
            assert fit.evaluate(chi1, chi2) == pytest.approx(oracle_value, rel=1e-10)

    def test_deterministic(self):
        first = fit_polarized(Speed(0.8))
        second = fit_polarized(Speed(0.8))
        assert first == second

    def test_fit_points_are_disjoint_from_validation_grid(self):
        pts = fit_sample_angles()
        grid1, grid2 = validation_grid()
        grid_pairs = set(zip(grid1.ravel().round(12), grid2.ravel().round(12)))
        for chi1, chi2 in pts:
            assert (round(chi1, 12), round(chi2, 12)) not in grid_pairs


class TestConsistencyReports:
    def test_rest_frame_agrees_with_closed_form(self):
        report = consistency_report(CorrelationModel.POLARIZED, Speed(0.0))
        assert report.verdict
        assert report.printed == (1.0, 0.0, 1.0, 0.0)

    def test_report_schema(self):
        report = consistency_report(CorrelationModel.POLARIZED, Speed(0.9))
        payload = report.to_dict()
        assert set(payload) == {
            "beta",
            "model",
            "fitted",
            "printed",
            "relative_deviation",
            "residual",
            "scale",
            "verdict",
        }
        assert payload["model"] == "polarized"
        assert len(payload["fitted"]) == len(payload["printed"]) == 4
        assert all(d >= 0.0 for d in payload["relative_deviation"])
        assert isinstance(report, ConsistencyReport)

    def test_ratio_to_closed_form_is_tabulated_not_asserted(self):
        # The diagnostic captures whether |M|^2 / f_polarized is constant in
        # angle; at beta = 0.9 the fitted and closed-form weights are wildly
        # different, which shows up as order-one deviations in the table.
        speed = Speed(0.9)
        ratios = [
            abs(amplitude_polarized(speed, a, c)) ** 2 / f_polarized(speed, a, c)
            for a, c in fit_sample_angles(12)
        ]
        spread = (max(ratios) - min(ratios)) / max(ratios)
        report = consistency_report(CorrelationModel.POLARIZED, speed)
        if spread > 1e-9:
            assert max(report.relative_deviation) > report.residual
        else:
            assert report.verdict

    def test_unpolarized_report_schema(self):
        report = consistency_report(CorrelationModel.UNPOLARIZED, Speed(0.5))
        assert len(report.fitted) == len(report.printed) == 3
        assert report.residual < 1e-9


class TestUnpolarizedOracles:
    def test_quad_output_is_real(self):
        for b, chi1, chi2 in _random_inputs(50, seed=17):
            value = quad_unpolarized_complex(Speed(b), chi1, chi2)
            scale = max(1.0, abs(value.real))
            assert abs(value.imag) < 1e-10 * scale

    def test_quad_two_pi_invariance(self):
        speed = Speed(0.5)
        for _, chi1, chi2 in _random_inputs(10, seed=19):
            base = quad_unpolarized(speed, chi1, chi2)
            shifted = quad_unpolarized(speed, chi1 + 2.0 * math.pi, chi2)
            assert shifted == pytest.approx(base, rel=1e-12)

    def test_quad_four_pair_shift_sum_is_angle_independent(self):
        speed = Speed(0.5)
        shifts = ((0, 0), (math.pi, 0), (0, math.pi), (math.pi, math.pi))
        totals = []
        for chi1, chi2 in ((0.2, 1.7), (3.3, 5.2), (4.4, 0.9)):
            totals.append(
                sum(quad_unpolarized(speed, chi1 + d1, chi2 + d2) for d1, d2 in shifts)
            )
        assert max(totals) - min(totals) < 1e-10 * max(abs(t) for t in totals)

    def test_spin_average_positive(self):
        for b, chi1, chi2 in _random_inputs(30, seed=23):
            assert spin_average_oracle(Speed(b), chi1, chi2) >= 0.0

    def test_spin_average_four_pair_shift_sum_is_angle_independent(self):
        speed = Speed(0.7)
        shifts = ((0, 0), (math.pi, 0), (0, math.pi), (math.pi, math.pi))
        totals = []
        for chi1, chi2 in ((0.2, 1.7), (3.3, 5.2), (4.4, 0.9)):
            totals.append(
                sum(spin_average_oracle(speed, chi1 + d1, chi2 + d2) for d1, d2 in shifts)
            )
        assert max(totals) - min(totals) < 1e-10 * max(totals)


class TestUnpolarizedFit:
    @pytest.mark.parametrize("beta", (0.0,) + FIT_BETAS)
    def test_template_shape_holds(self, beta):
        fit = fit_unpolarized(Speed(beta))
        assert fit.rel_residual < 1e-9

    def test_scale_positive_at_moderate_speeds(self):
        assert fit_unpolarized(Speed(0.3)).scale > 0.0

    def test_deterministic(self):
        assert fit_unpolarized(Speed(0.5)) == fit_unpolarized(Speed(0.5))

    def test_rest_frame_coefficients_tabulated(self):
        # Informational: the table is produced; whatever the weights are,
        # the fitted template must reproduce the oracle.
        fit = fit_unpolarized(Speed(0.0))
        speed = Speed(0.0)
        for chi1, chi2 in fit_sample_angles(8):
            assert fit.evaluate(chi1, chi2) == pytest.approx(
                spin_average_oracle(speed, chi1, chi2), rel=1e-10
            )


class TestCrossOracle:
    def test_report_fields_and_determinism(self):
        first = cross_check_unpolarized(Speed(0.5))
        second = cross_check_unpolarized(Speed(0.5))
        assert first == second
        assert first.grid_n == 12
        assert first.max_rel_deviation >= 0.0
        assert first.max_imag < 1e-10
        payload = first.to_dict()
        assert set(payload) == {
            "beta",
            "grid_n",
            "scale",
            "max_rel_deviation",
            "max_imag",
            "agree",
        }

    def test_agreement_flag_matches_deviation(self):
        report = cross_check_unpolarized(Speed(0.5))
        assert report.agree == (report.max_rel_deviation < 1e-9)
