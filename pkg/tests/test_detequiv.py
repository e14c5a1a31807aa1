import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ridgerisk.detequiv import (
    TauRangeWarning,
    approx_risk,
    dn_condition_thresholds,
    fixed_point_residual,
    kappa,
    optimal_order_prediction,
    order_in,
    order_out,
    order_table,
    solve_alpha,
)
from ridgerisk.spectrum import (
    Regime,
    SpectrumSpec,
    make_three_level_spectrum,
    make_two_level_spectrum,
)

from _naive import golden_ratio


class TestSolveAlpha:
    def test_golden_ratio_case(self):
        # flat two-eigenvalue case reduces to alpha^2 = alpha + 1
        alpha = solve_alpha(np.array([1.0, 1.0]), n=2, tau=1.0)
        assert alpha == pytest.approx(golden_ratio(), abs=1e-10)

    def test_huge_tau_pins_alpha_at_one(self):
        lam = np.array([3.0, 1.0, 0.5])
        alpha = solve_alpha(lam, n=3, tau=1e9 * lam[0])
        assert abs(alpha - 1.0) <= 1e-6

    def test_residual_definition_check(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            lam = rng.uniform(0.05, 5.0, size=rng.integers(2, 30))
            n = int(rng.integers(2, 50))
            tau = float(rng.uniform(0.01, 10.0))
            alpha = solve_alpha(lam, n, tau)
            assert alpha > 1.0
            assert abs(fixed_point_residual(alpha, lam, n, tau)) <= 1e-12

    def test_monotone_in_tau(self):
        lam = np.geomspace(2.0, 0.01, 40)
        alphas = [solve_alpha(lam, 20, tau) for tau in np.geomspace(0.01, 10, 25)]
        assert all(a >= b - 1e-12 for a, b in zip(alphas, alphas[1:]))

    def test_nonpositive_tau_rejected(self):
        with pytest.raises(ValueError, match="positive tau"):
            solve_alpha(np.ones(3), 3, 0.0)
        with pytest.raises(ValueError, match="positive tau"):
            solve_alpha(np.ones(3), 3, -1.0)


class TestApproxRisk:
    def test_zero_signal_zero_bias(self):
        spec = make_two_level_spectrum(2, 10, 0.5)
        report = approx_risk(spec, np.zeros(10), 8, 1.0, 0.3)
        assert report.b_out_hat == 0.0
        assert report.b_in_hat == 0.0

    def test_zero_noise_zero_variance(self):
        spec = make_two_level_spectrum(2, 10, 0.5)
        theta = np.ones(10)
        report = approx_risk(spec, theta, 8, 0.0, 0.3)
        assert report.v_out_hat == 0.0
        assert report.v_in_hat == 0.0
        assert report.v_in_hat_alt == 0.0

    def test_bias_ratio_identity(self):
        spec = make_two_level_spectrum(3, 25, 0.4)
        theta = np.random.default_rng(5).standard_normal(25)
        report = approx_risk(spec, theta, 20, 1.0, 0.7)
        assert report.b_in_hat == report.b_out_hat / report.alpha**2

    def test_degenerate_denominator_rejected(self):
        spec = SpectrumSpec(eigenvalues=np.ones(4), spike_dim=1)
        with pytest.raises(ValueError, match="deterministic equivalent degenerate"):
            approx_risk(spec, np.ones(4), 4, 1.0, 1e-20)

    def test_variance_order_window_two_level(self):
        # flat-tail spectrum at square aspect: the variance approximation
        # stays within a fixed window of its order skeleton across the
        # mid-range of ridge levels
        for rho in (0.1, 0.0033392637):
            spec = make_two_level_spectrum(5, 1500, rho)
            theta = np.zeros(1500)
            r2 = 1495.0
            for tau in np.geomspace(spec.lambda_d1, spec.lambda_d, 7):
                report = approx_risk(spec, theta, 1500, 1.0, float(tau))
                skeleton = 5 / 1500 + (rho**2 / tau**2) * r2 / 1500
                assert skeleton / 8 <= report.v_out_hat <= 8 * skeleton


@st.composite
def approx_inputs(draw):
    p = draw(st.integers(min_value=3, max_value=40))
    d = draw(st.integers(min_value=1, max_value=p - 1))
    lam = draw(
        st.lists(
            st.floats(min_value=0.05, max_value=5.0, allow_nan=False),
            min_size=p,
            max_size=p,
        )
    )
    theta = draw(
        st.lists(
            st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
            min_size=p,
            max_size=p,
        )
    )
    n = draw(st.integers(min_value=2, max_value=60))
    tau = draw(st.floats(min_value=0.05, max_value=5.0))
    noise = draw(st.floats(min_value=0.0, max_value=3.0))
    return SpectrumSpec(np.array(lam), d), np.array(theta), n, noise, tau


class TestApproxProperties:
    @given(approx_inputs())
    @settings(max_examples=150, deadline=None)
    def test_alternate_in_sample_variance_form(self, inputs):
        spec, theta, n, noise, tau = inputs
        report = approx_risk(spec, theta, n, noise, tau)
        denom = max(abs(report.v_in_hat), abs(report.v_in_hat_alt))
        if denom > 0.0:
            assert abs(report.v_in_hat - report.v_in_hat_alt) / denom <= 1e-8

    @given(approx_inputs())
    @settings(max_examples=150, deadline=None)
    def test_fixed_point_residual_small(self, inputs):
        spec, theta, n, noise, tau = inputs
        report = approx_risk(spec, theta, n, noise, tau)
        assert report.alpha > 1.0
        assert abs(fixed_point_residual(report.alpha, spec, n, tau)) <= 1e-10


class TestOrderSkeletons:
    def setup_method(self):
        self.spec = make_two_level_spectrum(5, 1500, 0.1)
        self.theta = np.zeros(1500)
        self.theta[:5] = 1.0 / np.sqrt(5)

    def test_small_regime_boundary_variance(self):
        tau = self.spec.lambda_d1
        _, var = order_out(self.spec, self.theta, 1500, 1.0, tau, Regime.SMALL_MODERATE)
        assert var == pytest.approx((5 + 1495) / 1500, rel=1e-12)

    def test_large_regime_min_norm_bias(self):
        spec = make_two_level_spectrum(5, 1500, 0.1)
        n = 100
        bias, _ = order_out(spec, self.theta, n, 1.0, 0.0, Regime.LARGE)
        shift = spec.lambda_d1 * 1495 / n
        assert bias == pytest.approx(shift**2, rel=1e-12)

    def test_zero_noise_zero_variance_order(self):
        _, var = order_out(self.spec, self.theta, 1500, 0.0, 0.2, Regime.SMALL_MODERATE)
        assert var == 0.0
        _, var_u, var_l = order_in(self.spec, self.theta, 1500, 0.0, 0.2, Regime.SMALL_MODERATE)
        assert var_u == 0.0 and var_l == 0.0

    def test_in_sample_skeletons_coincide_at_matched_rank(self):
        # tail rank equals n exactly: r/n and (r/n)^2 agree
        spec = make_two_level_spectrum(5, 1500, 0.1)
        n = 1495
        _, var_u, var_l = order_in(spec, self.theta, n, 1.0, 0.05, Regime.SMALL_MODERATE)
        assert var_u == pytest.approx(var_l, rel=1e-12)

    @pytest.mark.filterwarnings("ignore::ridgerisk.detequiv.TauRangeWarning")
    def test_large_tau_dominated_by_spike_count(self):
        spec = make_two_level_spectrum(5, 1500, 0.001)
        n = 100
        shift = spec.lambda_d1 * 1495 / n
        tau = 1000 * shift
        _, var_u, var_l = order_in(spec, self.theta, n, 1.0, tau, Regime.LARGE)
        assert var_u == pytest.approx(5 / n, rel=1e-4)
        assert var_u == var_l

    def test_skeletons_near_optimum_match_gap_scale(self):
        # at the geometric-mean ridge level both skeleton components sit
        # within a factor 2 of max(gap ratio, d/n)
        for rho in (0.1, 0.0033392637):
            spec = make_two_level_spectrum(5, 1500, rho)
            theta = np.zeros(1500)
            theta[:5] = 1.0 / np.sqrt(5)
            tau = np.sqrt(spec.lambda_d * spec.lambda_d1)
            bias, var_u, _ = order_in(spec, theta, 1500, 1.0, tau, Regime.SMALL_MODERATE)
            target = max(rho, 5 / 1500)
            assert target / 2 <= bias <= 2 * target
            assert target / 2 <= var_u <= 2 * target

    def test_out_of_range_warns(self):
        with pytest.warns(TauRangeWarning):
            order_out(self.spec, self.theta, 1500, 1.0, 5.0, Regime.SMALL_MODERATE)
        with pytest.warns(TauRangeWarning):
            order_in(self.spec, self.theta, 100, 1.0, 5.0, Regime.LARGE)

    def test_order_table_shapes(self):
        taus = np.geomspace(0.01, 1.0, 9)
        table = order_table(self.spec, self.theta, 1500, 1.0, taus, Regime.SMALL_MODERATE)
        for arr in (table.bias_out, table.var_out, table.bias_in_upper,
                    table.var_in_upper, table.var_in_lower):
            assert arr.shape == (9,)
            assert np.all(arr >= 0.0)


class TestThresholds:
    def test_flat_spectrum_in_large(self):
        spec = SpectrumSpec(np.full(30, 2.0), spike_dim=1)
        th = dn_condition_thresholds(spec, 10)
        assert th.in_large == pytest.approx(1.0 / 29.0, rel=1e-12)

    def test_cor3_settings_discriminant_branches(self):
        # exact evaluations; frozen from independent recomputation of
        # n*sqrt(r2)/(sqrt(d)*r1) with r1 = r2 = p - d = 1495
        spec = make_two_level_spectrum(5, 1500, 0.01)
        first = dn_condition_thresholds(spec, 50)
        second = dn_condition_thresholds(spec, 150)
        assert first.cor3_discriminant == pytest.approx(50 / np.sqrt(5 * 1495), rel=1e-12)
        assert first.cor3_discriminant <= 1.0
        assert second.cor3_discriminant == pytest.approx(150 / np.sqrt(5 * 1495), rel=1e-12)
        assert second.cor3_discriminant > 1.0

    def test_gap_study_setting_ii_constants(self):
        spec = make_two_level_spectrum(2, 15000, 0.5)
        th = dn_condition_thresholds(spec, 150)
        rho = (2 / np.sqrt(150 * 14998)) * min(1.0, th.cor3_discriminant)
        assert rho == pytest.approx(0.0011549, abs=5e-8)

    def test_windows_ordered_when_nonempty(self):
        spec = make_two_level_spectrum(5, 1500, 0.002)
        th = dn_condition_thresholds(spec, 1500)
        for window in (th.window_out_small, th.window_in_small,
                       th.window_out_large, th.window_in_large):
            assert window[0] >= 0.0


class TestOptimalOrderPrediction:
    def test_setting_i_ratio(self):
        from ridgerisk.spectrum import ter_metrics

        shape = make_three_level_spectrum(2, 15000, 0.5, mid_multiplier=10, tail_factor=0.02)
        r2 = ter_metrics(shape, 300).r_d_sigma_sq
        rho = (2 / 300) * np.sqrt(300 / r2)
        spec = make_three_level_spectrum(2, 15000, rho, mid_multiplier=10, tail_factor=0.02)
        pred = optimal_order_prediction(spec, None, 300, 1.0, Regime.SMALL_MODERATE)
        assert pred.ratio_in_over_out == pytest.approx(np.sqrt(11.54), abs=5e-3)

    def test_setting_iii_ratio(self):
        spec = make_two_level_spectrum(2, 15000, 0.00094287)
        pred = optimal_order_prediction(spec, None, 300, 1.0, Regime.LARGE)
        assert pred.ratio_in_over_out == pytest.approx(np.sqrt(50.0), abs=5e-3)

    def test_tiny_gap_collapses_to_spike_count_rate(self):
        spec = make_two_level_spectrum(5, 1500, 1e-8)
        pred = optimal_order_prediction(spec, None, 1500, 1.0, Regime.SMALL_MODERATE)
        assert pred.mse_out_order == pytest.approx(5 / 1500)
        assert pred.mse_in_order == pytest.approx(5 / 1500)


class TestKappa:
    def setup_method(self):
        self.spec = make_two_level_spectrum(2, 20, 0.5)

    def test_plug_in_arithmetic(self):
        # lambda_{d+1}/tau = 0.1 with unit constants and delta1 = 0
        tau = self.spec.lambda_d1 / 0.1
        value = kappa(tau, self.spec, 10, c0_sigma_x_sq=1.0, c1=1.0, delta1=0.0)
        assert value == pytest.approx(0.4, rel=1e-12)

    def test_clamped_at_zero(self):
        value = kappa(1e-6, self.spec, 10, c0_sigma_x_sq=1.0, c1=1.0, delta1=0.0)
        assert value == 0.0

    def test_limit_one_for_huge_tau(self):
        value = kappa(1e12, self.spec, 10, c0_sigma_x_sq=1.0, c1=1.0, delta1=0.0)
        assert value == pytest.approx(1.0, abs=1e-10)

    def test_large_regime_form(self):
        shift = self.spec.lambda_d1 * 18 / 10
        value = kappa(15 * shift, self.spec, 10, delta2=0.0)
        assert value == pytest.approx(1.0 - 16.0 / 16.0, abs=1e-12) or value >= 0.0
        exact = max(1.0 - 16.0 * (shift / (16 * shift)), 0.0)
        assert kappa(15 * shift, self.spec, 10, delta2=0.0) == pytest.approx(exact)

    def test_missing_constants_rejected(self):
        with pytest.raises(ValueError, match="explicit constants"):
            kappa(1.0, self.spec, 10)
        with pytest.raises(ValueError, match="explicit constants"):
            kappa(1.0, self.spec, 10, c0_sigma_x_sq=1.0)
