import numpy as np
import pytest

from ridgerisk.scenario import (
    Dataset,
    Scenario,
    generate_dataset,
    generate_theta,
    make_scenario,
    replicate_rng,
    sample_sphere,
    theta_rng,
)
from ridgerisk.spectrum import make_two_level_spectrum, sparsity_ratio, spiked_inv_norm_sq


class TestSampleSphere:
    def test_p_one_is_sign(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            value = sample_sphere(1, rng)
            assert abs(value[0]) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("p", [2, 7, 100])
    def test_norm_is_sqrt_p(self, p):
        rng = np.random.default_rng(1)
        v = sample_sphere(p, rng)
        assert float(v @ v) == pytest.approx(p, rel=1e-12)

    def test_first_coordinate_symmetric(self):
        # symmetry oracle: the first coordinate has mean zero, variance 1
        rng = np.random.default_rng(2)
        draws = np.array([sample_sphere(8, rng)[0] for _ in range(100_000)])
        se = draws.std(ddof=1) / np.sqrt(draws.size)
        assert abs(draws.mean()) < 5 * se


class TestGenerateTheta:
    def test_spiked_entries(self):
        spec = make_two_level_spectrum(4, 20, 0.5)
        theta = generate_theta(spec, 10, np.random.default_rng(3))
        assert np.allclose(theta[:4], 0.5)

    def test_small_regime_sparsity_ratio(self):
        rho = 0.37
        spec = make_two_level_spectrum(5, 1500, rho)
        theta = generate_theta(spec, 1500, np.random.default_rng(4))
        assert sparsity_ratio(spec, theta) == pytest.approx(0.01 * rho**2, rel=1e-10)

    def test_large_regime_sparsity_ratio(self):
        spec = make_two_level_spectrum(5, 1500, 0.37)  # tail rank 1495 >= 10n for n=100
        n = 100
        theta = generate_theta(spec, n, np.random.default_rng(5))
        expected = 0.01 * (1.0 / spec.lambda_d + n / spec.tail_sum()) ** (-2)
        assert sparsity_ratio(spec, theta) == pytest.approx(expected, rel=1e-10)

    def test_unit_spiked_energy_with_unit_spikes(self):
        spec = make_two_level_spectrum(3, 30, 0.2)
        theta = generate_theta(spec, 10, np.random.default_rng(6))
        assert spiked_inv_norm_sq(spec, theta) * spec.lambda_d**2 == pytest.approx(1.0)


class TestDatasets:
    def test_noiseless_response(self):
        spec = make_two_level_spectrum(2, 10, 0.5)
        scenario = make_scenario(spec, 12, 0.0, 7)
        data = generate_dataset(scenario, 0)
        assert np.allclose(data.Y, data.X @ scenario.theta_star)
        assert np.all(data.eps == 0.0)

    def test_response_identity(self):
        spec = make_two_level_spectrum(2, 10, 0.5)
        scenario = make_scenario(spec, 12, 1.5, 8)
        data = generate_dataset(scenario, 3)
        assert np.allclose(data.Y, data.X @ scenario.theta_star + data.eps)

    def test_determinism_bit_identical(self):
        spec = make_two_level_spectrum(2, 40, 0.3)
        scenario = make_scenario(spec, 15, 1.0, 99)
        a = generate_dataset(scenario, 4)
        # interleave other replicates to show call order does not matter
        generate_dataset(scenario, 0)
        generate_dataset(scenario, 7)
        b = generate_dataset(scenario, 4)
        assert np.array_equal(a.X, b.X)
        assert np.array_equal(a.Y, b.Y)
        assert np.array_equal(a.eps, b.eps)

    def test_replicates_differ(self):
        spec = make_two_level_spectrum(2, 40, 0.3)
        scenario = make_scenario(spec, 15, 1.0, 99)
        a, b = generate_dataset(scenario, 0), generate_dataset(scenario, 1)
        assert not np.array_equal(a.X, b.X)

    def test_svd_reconstruction(self):
        spec = make_two_level_spectrum(3, 25, 0.4)
        scenario = make_scenario(spec, 18, 1.0, 21)
        data = generate_dataset(scenario, 0)
        recon = (data.u * data.s) @ data.vt
        assert np.linalg.norm(data.X - recon) <= 1e-8 * np.linalg.norm(data.X)

    def test_covariate_isotropy(self):
        # Monte-Carlo oracle: unit-vector projections of the whitened rows
        # have variance 1 (checked on the first coordinate over 1e5 draws)
        spec = make_two_level_spectrum(1, 6, 0.25)
        scenario = make_scenario(spec, 1, 1.0, 5)
        rng = replicate_rng(scenario.master_seed, 0)
        from ridgerisk.scenario import sample_covariates

        rows = sample_covariates(spec, 100_000, rng)
        z0 = rows[:, 0] / np.sqrt(spec.eigenvalues[0])
        sq = z0**2
        se = sq.std(ddof=1) / np.sqrt(sq.size)
        assert abs(sq.mean() - 1.0) < 5 * se

    def test_negative_replicate_rejected(self):
        with pytest.raises(ValueError):
            replicate_rng(0, -1)

    def test_scenario_validates_theta_length(self):
        spec = make_two_level_spectrum(2, 10, 0.5)
        with pytest.raises(ValueError):
            Scenario(spectrum=spec, theta_star=np.ones(9), n=5, noise_var=1.0, master_seed=0)

    def test_streams_are_separate(self):
        t = theta_rng(123).standard_normal(4)
        r = replicate_rng(123, 0).standard_normal(4)
        assert not np.allclose(t, r)
