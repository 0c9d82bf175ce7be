import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import ks_2samp, kstest

from wmcs import (
    Gamma,
    Laplace,
    Lognormal,
    Normal,
    NotAvailableError,
    ParameterDomainError,
    Region,
    Weibull,
    WeightedFamily,
    identity,
    indicator,
    length_biased,
    weighted_family_from_spec,
)
from wmcs.weights import weight_from_spec


def test_region_membership():
    region = Region(-np.inf, 0.0)
    assert region.contains(0.0)
    assert region.contains(-5.0)
    assert not region.contains(0.5)
    with pytest.raises(ValueError):
        Region(1.0, 1.0)


def test_length_biased_normalizers():
    # closed forms: exp(mu + sigma2/2), shape*scale, scale*Gamma(1 + 1/shape)
    assert WeightedFamily(Lognormal(2.0, 0.5), length_biased()).norm_constant() == \
        pytest.approx(np.exp(2.25), rel=1e-12)
    assert WeightedFamily(Gamma(2.0, 3.0), length_biased()).norm_constant() == \
        pytest.approx(6.0, rel=1e-12)
    from scipy.special import gamma as gamma_fn
    assert WeightedFamily(Weibull(1.7, 2.2), length_biased()).norm_constant() == \
        pytest.approx(2.2 * gamma_fn(1.0 + 1.0 / 1.7), rel=1e-12)


def test_length_biased_lognormal_is_shifted_lognormal():
    wf = WeightedFamily(Lognormal(2.0, 0.5), length_biased())
    shifted = Lognormal(2.5, 0.5)
    x = np.linspace(0.5, 60.0, 200)
    np.testing.assert_allclose(wf.log_pdf(x), shifted.log_pdf(x), rtol=1e-10)


def test_indicator_log_pdf():
    wf = WeightedFamily(Normal(0.0, 1.0), indicator(-np.inf, 0.0))
    assert wf.log_pdf(1.0, region_mass=0.5) == -np.inf
    inside = wf.log_pdf(-1.0, region_mass=0.5)
    assert inside == pytest.approx(Normal(0.0, 1.0).log_pdf(-1.0) - np.log(0.5))
    with pytest.raises(ValueError):
        wf.log_pdf(-1.0)  # mass required
    with pytest.raises(ValueError):
        wf.log_pdf(-1.0, region_mass=0.0)


@pytest.mark.parametrize(
    "base",
    [Lognormal(2.0, 0.5), Lognormal(0.0, 1.0), Gamma(2.0, 3.0), Gamma(0.8, 1.5),
     Weibull(1.7, 2.2), Weibull(0.9, 1.0)],
    ids=str,
)
def test_length_biased_pdf_integrates_to_one(base):
    wf = WeightedFamily(base, length_biased())
    total = quad(lambda t: float(wf.pdf(np.asarray(t))), 0.0, np.inf, limit=400)[0]
    assert total == pytest.approx(1.0, abs=1e-6)


def test_length_biased_requires_positive_support():
    with pytest.raises(ParameterDomainError):
        WeightedFamily(Normal(0.0, 1.0), length_biased())
    with pytest.raises(ParameterDomainError):
        WeightedFamily(Laplace(0.0, 1.0), length_biased())


def test_length_biased_lognormal_sampler_mean(rng):
    # length-biased LN(2, 0.5) is LN(2.5, 0.5), whose mean is exp(2.75)
    wf = WeightedFamily(Lognormal(2.0, 0.5), length_biased())
    n = 100_000
    draws = wf.sample(n, rng)
    mean = np.exp(2.75)
    sd = np.sqrt((np.exp(0.5) - 1.0) * np.exp(5.5))
    assert draws.mean() == pytest.approx(mean, abs=3.0 * sd / np.sqrt(n))


def test_length_biased_gamma_sampler_matches_shifted_shape(rng):
    wf = WeightedFamily(Gamma(2.0, 3.0), length_biased())
    draws = wf.sample(20_000, rng)
    stat = kstest(draws, Gamma(3.0, 3.0).cdf)
    assert stat.pvalue > 1e-4


def test_length_biased_weibull_sampler_vs_rejection_oracle(rng):
    # oracle: thinning of base draws with acceptance probability x / M,
    # M a high quantile of the base law (truncation error ~1e-12 mass)
    base = Weibull(1.7, 2.2)
    wf = WeightedFamily(base, length_biased())
    m = float(base.ppf(1.0 - 1e-12))
    accepted = []
    while len(accepted) < 20_000:
        x = base.sample(50_000, rng)
        keep = rng.random(x.size) < x / m
        accepted.extend(x[keep].tolist())
    oracle = np.asarray(accepted[:20_000])
    draws = wf.sample(20_000, rng)
    stat = ks_2samp(draws, oracle)
    assert stat.pvalue > 1e-4


def test_sampler_not_available_for_indicator():
    wf = WeightedFamily(Normal(0.0, 1.0), indicator(0.0, np.inf))
    with pytest.raises(NotAvailableError):
        wf.sample(10, np.random.default_rng(0))


def test_identity_sampler_passthrough():
    wf = WeightedFamily(Gamma(2.0, 3.0), identity())
    a = wf.sample(5, np.random.default_rng(3))
    b = Gamma(2.0, 3.0).sample(5, np.random.default_rng(3))
    np.testing.assert_array_equal(a, b)


def test_weight_spec_validation():
    with pytest.raises(ValueError):
        weight_from_spec({"kind": "indicator"})
    with pytest.raises(ValueError):
        weight_from_spec({"kind": "banana"})
    assert weight_from_spec(None).kind == "identity"
    spec = weight_from_spec({"kind": "indicator", "region": [0, 1]})
    assert spec.region == Region(0.0, 1.0)
    assert spec.normalizer_rule == "empirical_under_h"
    assert weight_from_spec({"kind": "length_biased"}).normalizer_rule == "analytic_under_f"


def test_weighted_family_from_spec():
    wf = weighted_family_from_spec(
        {"family": "lognormal", "params": {"mu": 2, "sigma2": 0.5},
         "weight": {"kind": "length_biased"}}
    )
    assert wf.name == "length_biased_lognormal"
    assert wf.norm_constant() == pytest.approx(np.exp(2.25))
