import math

import numpy as np
import pytest

from casualstab.catalog import get_case
from casualstab.montecarlo import (NoSampler, compound_sum, empirical_pgf_check, ks_critical,
                                   ks_two_sample, make_rng, pgf_sampler, pmf_table,
                                   sample_distribution, sample_normalized, simulate_and_test)
from casualstab.normalize import normalize_pgf
from casualstab.series import TruncatedSeries
from casualstab.transforms import Kind, Transform, make_distribution, make_transform

N = 100_000


def mean_within(x, mu, k=4.0):
    return abs(x.mean() - mu) < k * x.std(ddof=1) / math.sqrt(x.size)


def test_streams_are_reproducible_and_independent():
    a = make_rng(3, 1).random(5)
    assert np.array_equal(a, make_rng(3, 1).random(5))
    assert not np.array_equal(a, make_rng(3, 2).random(5))
    assert not np.array_equal(a, make_rng(4, 1).random(5))


def test_sampling_rejects_negative_size_and_unsampled_laws():
    with pytest.raises(ValueError):
        sample_distribution(make_distribution("geometric", p=0.5), -1)
    with pytest.raises(NoSampler):
        sample_distribution(make_distribution("double_pareto_printed", a=2.0), 10)


@pytest.mark.parametrize("family,params,mean", [
    ("geometric", {"p": 0.5}, 1.0),
    ("weibull", {"alpha": 1.0, "beta": 1.0}, 1.0),
    ("gamma", {"b": 2.0, "gamma": 1.5}, 3.0),
    ("lognormal", {"b": 0.5}, math.exp(0.125)),
    ("gompertz", {"xi": 1.0, "lam": 1.0}, math.e * 0.21938393439552),  # e E1(1)
])
def test_sample_means(family, params, mean):
    x = sample_distribution(make_distribution(family, params), N, seed=1)
    assert mean_within(x, mean)


@pytest.mark.parametrize("family,params,s", [
    ("positive_stable", {"alpha": 0.5}, 1.0),
    ("tempered_stable", {"alpha": 0.5, "lam": 1.0, "h": 1.0}, 1.0),
    ("gamma", {"b": 1.0, "gamma": 2.0}, 0.7),
])
def test_laplace_transform_of_samples(family, params, s):
    d = make_distribution(family, params)
    x = sample_distribution(d, N, seed=2)
    assert mean_within(np.exp(-s * x), float(np.real(d.transform(Kind.LAPLACE)(s))))


@pytest.mark.parametrize("family,params", [
    ("sibuya", {"gamma": 0.5}),
    ("sibuya", {"gamma": 0.3}),
    ("tilted_discrete_stable", {"lam": 1.0, "a": 0.75, "gamma": 0.5}),
    ("first_passage", {"M": 2}),
    ("geometric", {"p": 0.3}),
])
def test_pgf_of_integer_samples(family, params):
    d = make_distribution(family, params)
    x = sample_distribution(d, N, seed=3)
    P = d.transform(Kind.PGF)
    assert np.all(empirical_pgf_check(x, lambda z: P(z)) < 4)


def test_sibuya_pgf_at_half():
    x = sample_distribution(make_distribution("sibuya", gamma=0.5), N, seed=4)
    assert mean_within(0.5**x, 1 - math.sqrt(0.5))


def test_mellin_moments():
    x = sample_distribution(make_distribution("log_levy"), N, seed=5)
    assert mean_within(1 / x, math.exp(-math.sqrt(2)))
    x = sample_distribution(make_distribution("double_pareto", a=4.0), N, seed=5)
    assert mean_within(x, 16 / 15)


def test_compound_sum_pgf():
    rng = make_rng(6)
    P = make_transform("geometric_pgf", p=0.5)
    Q = make_transform("geometric_normalizer", p=0.5, n=2)
    counts = sample_distribution(make_distribution("geometric", p=0.5), N, rng=rng)
    s = compound_sum(counts, pgf_sampler(Q), rng)
    assert np.all(empirical_pgf_check(s, normalize_pgf(P, Q)) < 4)


def test_compound_sum_edge_cases():
    rng = make_rng(0)
    out = compound_sum(np.array([0, 0, 3]), lambda r, k: np.ones(k), rng)
    assert out.tolist() == [0.0, 0.0, 3.0]
    with pytest.raises(ValueError):
        compound_sum(np.array([0.5]), lambda r, k: np.ones(k), rng)


def test_pmf_table_from_series():
    Q = make_transform("tilted_stable_normalizer", a=0.75, gamma=0.5, n=2)
    p = pmf_table(Q)
    np.testing.assert_allclose(p[:3], [7 / 12, 3 / 8, 3 / 128], atol=1e-15)
    assert abs(p.sum() - 1) < 1e-12


def test_pmf_table_rejects_negative_coefficients():
    bad = Transform(kind=Kind.PGF, family="bad", params={}, fn=lambda z: z, domain=None,
                    series=lambda K: TruncatedSeries([0.5, -0.1, 0.6] + [0.0] * (K - 2)))
    with pytest.raises(NoSampler, match="negative"):
        pmf_table(bad)


def test_min_quantile_map_squares_pareto():
    # Gbar(x) = exp(-sqrt x) sends X to X^2, so P(X~ > 4) = P(X > 2) = 1/2
    d = make_distribution("pareto", alpha=1.0)
    G = make_transform("pareto_min_normalizer", n=2)
    x = sample_normalized(d, G, "MIN", N, seed=7)
    p = (x > 4).mean()
    assert abs(p - 0.5) < 4 * math.sqrt(0.25 / N)


def test_power_map_on_lognormal():
    d = make_distribution("lognormal", b=1.0)
    x = sample_normalized(d, make_transform("power_normalizer_mellin", c=2 ** -0.5), "PRODUCT", N, seed=8)
    assert mean_within(x, math.exp(0.25))


def test_no_sampler_for_printed_product_normalizer():
    with pytest.raises(NoSampler, match="no probabilistic representation"):
        sample_normalized(make_distribution("pareto", alpha=1.0),
                          make_transform("pareto_pursuit_normalizer", alpha=1.0, n=2), "PRODUCT", 10)


def test_ks_statistic():
    x = np.arange(10.0)
    assert ks_two_sample(x, x) == (0.0, 0.0, 0.0)
    D, dp, dm = ks_two_sample(x, x + 100)
    assert D == 1.0 and dp == 1.0 and dm == 0.0
    D, dp, dm = ks_two_sample(x + 100, x)
    assert dm == 1.0 and dp == 0.0
    assert ks_critical(200_000) == pytest.approx(1.628 * math.sqrt(2 / 200_000))


def test_ks_matches_scipy():
    from scipy.stats import ks_2samp

    rng = make_rng(9)
    x, y = rng.normal(size=3000), rng.normal(0.05, size=2000)
    assert ks_two_sample(x, y)[0] == pytest.approx(ks_2samp(x, y).statistic, abs=1e-15)


def test_simulation_trivial_index_and_determinism(tmp_path):
    claim = get_case("EX12").claim()
    a = simulate_and_test(claim, N=20_000, seed=1, n=2, keep_samples=True)
    b = simulate_and_test(claim, N=20_000, seed=1, n=2)
    assert a.ks == b.ks and a.passed
    path = tmp_path / "s.csv"
    a.runs[1].to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# seed=1") and len(lines) == 20_001
    assert set(a.to_dict()) >= {"ks", "critical", "passed", "empirical_transform"}


def test_simulation_detects_wrong_normalizer():
    claim = get_case("EX12").claim({"alpha": 1.0})
    claim.distribution = make_distribution("weibull", alpha=2.0, beta=1.0)
    rep = simulate_and_test(claim, N=50_000, seed=0, n=4)
    assert not rep.passed


def test_simulation_index_must_be_positive_integer():
    with pytest.raises(NoSampler):
        simulate_and_test(get_case("EX12").claim(), N=1000, n=1.5)


@pytest.mark.slow
@pytest.mark.parametrize("cid,n", [("EX04G", 2), ("EX12", 4), ("EX14", 2), ("EX08", 2),
                                   ("EX13", 2), ("EX15", 2), ("EX01", 2), ("EX05", 2)])
def test_full_size_simulation(cid, n):
    rep = simulate_and_test(get_case(cid).claim(), N=200_000, seed=0, n=n)
    assert rep.passed, (rep.ks, rep.critical)


def test_empirical_error_shrinks_like_root_n():
    from casualstab.transforms import empirical_transform

    d = make_distribution("geometric", p=0.5)
    small = empirical_transform(Kind.PGF, sample_distribution(d, 10_000, seed=11), [0.5])
    large = empirical_transform(Kind.PGF, sample_distribution(d, 40_000, seed=11), [0.5])
    assert large.stderr[0] / small.stderr[0] == pytest.approx(0.5, rel=0.05)
