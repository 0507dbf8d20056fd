import numpy as np
import pytest

from oamtomo import (
    CountRecord,
    SourceConfig,
    anticorrelation_alpha,
    cross_correlation_g2,
    exact_counts,
    simulate_counts,
    subtract_background,
)

# p[j][i] = |<psi_i|psi_j>|^2 for the canonical states (identity channel)
IDENTITY_TABLE = np.array(
    [
        [1, 0, 0, 0.5, 0, 0.5, 0, 0.5, 0.5],
        [0, 1, 0, 0.5, 0.5, 0.5, 0.5, 0, 0],
        [0, 0, 1, 0, 0.5, 0, 0.5, 0.5, 0.5],
        [0.5, 0.5, 0, 1, 0.25, 0.5, 0.25, 0.25, 0.25],
        [0, 0.5, 0.5, 0.25, 1, 0.25, 0.5, 0.25, 0.25],
        [0.5, 0.5, 0, 0.5, 0.25, 1, 0.25, 0.25, 0.25],
        [0, 0.5, 0.5, 0.25, 0.5, 0.25, 1, 0.25, 0.25],
        [0.5, 0, 0.5, 0.25, 0.25, 0.25, 0.25, 1, 0.5],
        [0.5, 0, 0.5, 0.25, 0.25, 0.25, 0.25, 0.5, 1],
    ]
)


class TestSourceConfig:
    def test_defaults(self):
        cfg = SourceConfig(counts_per_setting=1000)
        assert cfg.window == pytest.approx(50e-9)
        assert cfg.efficiency == 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(counts_per_setting=0),
            dict(counts_per_setting=100, background=-1),
            dict(counts_per_setting=100, efficiency=1.5),
            dict(counts_per_setting=100, window=0.0),
            dict(counts_per_setting=100, seed=-1),
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SourceConfig(**kwargs)


class TestSimulateCounts:
    def test_zero_probability_zero_background(self):
        cfg = SourceConfig(counts_per_setting=1000, background=0.0, seed=1)
        records = simulate_counts(np.zeros((9, 9)), cfg)
        assert len(records) == 81
        assert all(r.raw_counts == 0 and r.background_counts == 0 for r in records)

    def test_reproducible(self):
        cfg = SourceConfig(counts_per_setting=500, background=20, seed=99)
        a = simulate_counts(IDENTITY_TABLE, cfg)
        b = simulate_counts(IDENTITY_TABLE, cfg)
        assert a == b

    def test_seed_changes_output(self):
        cfg1 = SourceConfig(counts_per_setting=500, background=20, seed=1)
        cfg2 = SourceConfig(counts_per_setting=500, background=20, seed=2)
        assert simulate_counts(IDENTITY_TABLE, cfg1) != simulate_counts(IDENTITY_TABLE, cfg2)

    def test_large_n_rates_close(self):
        # law of large numbers at N = 1e6, fixed seed
        cfg = SourceConfig(counts_per_setting=1e6, background=0.0, seed=7)
        records = simulate_counts(IDENTITY_TABLE, cfg)
        for r in records:
            expected = IDENTITY_TABLE[r.input_index - 1, r.meas_index - 1]
            assert abs(r.raw_counts / 1e6 - expected) < 0.005

    def test_nonnegative_integers(self):
        cfg = SourceConfig(counts_per_setting=50, background=5, seed=3)
        for r in simulate_counts(IDENTITY_TABLE, cfg):
            assert isinstance(r.raw_counts, int) and r.raw_counts >= 0
            assert isinstance(r.background_counts, int) and r.background_counts >= 0

    def test_expectation_matches_model(self):
        # per-setting sample mean over seeded draws within 3 standard errors
        n, b, eta = 200.0, 10.0, 0.8
        draws = 2000
        table = IDENTITY_TABLE[:3]
        means = np.zeros((3, 9))
        for seed in range(draws):
            cfg = SourceConfig(counts_per_setting=n, background=b, efficiency=eta, seed=seed)
            for r in simulate_counts(table, cfg):
                means[r.input_index - 1, r.meas_index - 1] += r.raw_counts
        means /= draws
        expected = eta * n * table + b
        stderr = np.sqrt(expected / draws)
        assert np.all(np.abs(means - expected) <= 3 * stderr)

    def test_single_row_table(self):
        cfg = SourceConfig(counts_per_setting=100, seed=5)
        records = simulate_counts(IDENTITY_TABLE[:1], cfg)
        assert len(records) == 9
        assert all(r.input_index == 1 for r in records)

    def test_rejects_bad_table(self):
        cfg = SourceConfig(counts_per_setting=100)
        with pytest.raises(ValueError):
            simulate_counts(np.full((9, 9), 1.5), cfg)


class TestExactCounts:
    def test_rounded_expectations(self):
        cfg = SourceConfig(counts_per_setting=1000, background=7, efficiency=0.5, seed=0)
        records = exact_counts(IDENTITY_TABLE, cfg)
        for r in records:
            p = IDENTITY_TABLE[r.input_index - 1, r.meas_index - 1]
            assert r.raw_counts == int(round(0.5 * 1000 * p + 7))
            assert r.background_counts == 7


class TestSubtractBackground:
    def test_plain_subtraction(self):
        out = subtract_background([CountRecord(1, 1, 120, 20)])
        assert out[0] == 100.0

    def test_clamps_negative(self):
        out = subtract_background([CountRecord(1, 1, 5, 9)])
        assert out[0] == 0.0

    def test_unbiased_before_clamping(self):
        # ensemble mean of corrected counts tracks eta*N*p when clamping is inactive
        n, b, p = 1e4, 100.0, 0.5
        total = 0.0
        draws = 500
        table = np.full((1, 9), p)
        for seed in range(draws):
            cfg = SourceConfig(counts_per_setting=n, background=b, seed=seed)
            total += subtract_background(simulate_counts(table, cfg)).mean()
        mean = total / draws
        stderr = np.sqrt(2 * (n * p + b) / (draws * 9))
        assert abs(mean - n * p) <= 4 * stderr


class TestAnticorrelation:
    def test_zero_triples(self):
        assert anticorrelation_alpha(10**6, 10**4, 10**4, 0) == 0.0

    def test_arithmetic(self):
        assert anticorrelation_alpha(10**6, 10**4, 10**4, 1) == pytest.approx(0.01)

    def test_poissonian_source_is_one(self):
        # independent-splitting oracle: thinned Poisson clicks are independent
        rng = np.random.default_rng(314)
        windows = 200_000
        photons = rng.poisson(0.2, size=windows)
        at_d1 = rng.binomial(photons, 0.5)
        at_d2 = photons - at_d1
        n1 = int((at_d1 > 0).sum())
        n2 = int((at_d2 > 0).sum())
        n12 = int(((at_d1 > 0) & (at_d2 > 0)).sum())
        alpha = anticorrelation_alpha(windows, n1, n2, n12)
        assert abs(alpha - 1.0) < 0.05

    def test_zero_denominator(self):
        with pytest.raises(ValueError):
            anticorrelation_alpha(100, 0, 10, 1)

    def test_rescaling_invariance(self):
        base = (1_000_000, 10_000, 12_000, 37)
        scaled = tuple(3 * v for v in base)
        assert anticorrelation_alpha(*base) == anticorrelation_alpha(*scaled)


class TestCrossCorrelation:
    def test_independent_streams_give_one(self):
        rng = np.random.default_rng(271)
        rate_s, rate_t, duration, window = 2e5, 1e5, 10.0, 50e-9
        n_t = int(rng.poisson(rate_t * duration))
        n_s = int(rng.poisson(rate_s * duration))
        p_hit = 1.0 - np.exp(-rate_s * window)
        n_c = int(rng.binomial(n_t, p_hit))
        g2 = cross_correlation_g2(n_c, n_s, n_t, window, duration)
        assert abs(g2 - 1.0) < 0.05

    def test_zero_coincidences(self):
        assert cross_correlation_g2(0, 1000, 1000, 50e-9, 1.0) == 0.0

    def test_window_doubling_halves(self):
        g1 = cross_correlation_g2(64, 4096, 2048, 50e-9, 1.0)
        g2 = cross_correlation_g2(64, 4096, 2048, 100e-9, 1.0)
        assert g2 == g1 / 2

    def test_rescaling_invariance(self):
        g1 = cross_correlation_g2(40, 2000, 1000, 1e-6, 2.0)
        g2 = cross_correlation_g2(80, 4000, 2000, 1e-6, 4.0)
        assert g1 == g2

    def test_zero_denominator(self):
        with pytest.raises(ValueError):
            cross_correlation_g2(10, 0, 1000, 50e-9, 1.0)


class TestCountRecord:
    def test_rejects_negative_counts(self):
        with pytest.raises(ValueError):
            CountRecord(1, 1, -1, 0)

    def test_rejects_zero_index(self):
        with pytest.raises(ValueError):
            CountRecord(0, 1, 10, 0)
