import math

import pytest

import fpp


def test_closed_forms():
    r = fpp.ml_one_param(0.5, -1.0)
    assert r["value"] == pytest.approx(math.e * math.erfc(1.0), abs=1e-12)
    assert fpp.ml_two_param(1.0, -3.0)["value"] == pytest.approx(math.exp(-3.0), rel=1e-14)


def test_poisson_reduction():
    p = fpp.counting_pmf(1.0, 1.0, 10)
    for n, v in enumerate(p["probabilities"]):
        assert v == pytest.approx(math.exp(-1.0) / math.factorial(n), abs=1e-14)


def test_bad_beta_is_value_error():
    with pytest.raises(ValueError, match="beta"):
        fpp.ml_one_param(1.5, -1.0)


def test_memoryless_kernel():
    k = fpp.residual_lifetime_pdf(1.0, 1.0, 3)
    assert k.pdf(0.7) == pytest.approx(math.exp(-0.7), rel=1e-10)
    assert k.normalization_defect < 1e-8


def test_joint_matches_oracle():
    rec, _ = fpp.joint_pmf(0.5, [1.0, 2.0], [0, 1])
    ora, _ = fpp.joint_pmf_oracle(0.5, [1.0, 2.0], [0, 1])
    assert abs(rec - ora) < 1e-4


def test_sampler_ks_and_determinism():
    x = fpp.sample_interarrival(0.75, 20000, seed=3)
    assert x == fpp.sample_interarrival(0.75, 20000, seed=3)
    d = fpp.ks_distance(x, lambda t: fpp.interarrival_cdf(0.75, t))
    assert d < fpp.ks_critical_value(len(x))


def test_empty_sample_rejected():
    with pytest.raises(ValueError):
        fpp.ks_distance([], lambda t: 0.0)
