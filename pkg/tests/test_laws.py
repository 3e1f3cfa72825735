import json
import math

import numpy as np
import pytest

from rwre_slowdown.errors import DomainError
from rwre_slowdown.laws import TailLaw, make_mean_one

ALL_LAWS = [
    make_mean_one("pareto", alpha=2.0),
    make_mean_one("log_pow", beta=2.0),
    make_mean_one("log_log"),
    make_mean_one("weibull", alpha=1.0),
    make_mean_one("weibull", alpha=0.5),
]


def test_g_eval_pareto_served():
    # alpha=2 served tail is (2r)^-2 above r0=1/2, so g(e/2) = 2 ln e = 2
    law = make_mean_one("pareto", alpha=2.0)
    assert law.scale_m == 1.0
    assert law.pareto_threshold == 0.5
    assert abs(law.g_eval(math.e / 2.0) - 2.0) < 1e-12
    assert law.g_eval(0.25) == 0.0  # below threshold the tail is 1


def test_g_eval_weibull_exponential():
    law = make_mean_one("weibull", alpha=1.0)
    assert law.scale_m == 1.0
    assert abs(law.g_eval(3.0) - 3.0) < 1e-12


def test_g_eval_log_pow_raw():
    law = TailLaw(variant="log_pow", beta=2.0)
    assert abs(law.g_eval(math.e**2) - 4.0) < 1e-12


def test_g_eval_rejects_bad_r():
    law = make_mean_one("weibull", alpha=1.0)
    for r in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(DomainError):
            law.g_eval(r)


def test_g_inv_examples():
    raw_w2 = TailLaw(variant="weibull", alpha=2.0)
    assert abs(raw_w2.g_inv(9.0) - 3.0) < 1e-12
    pareto = make_mean_one("pareto", alpha=2.0)
    assert abs(pareto.g_inv(2.0) - math.e / 2.0) < 1e-12
    w1 = make_mean_one("weibull", alpha=1.0)
    r = 1.7
    assert abs(w1.g_inv(w1.g_eval(r)) - r) < 1e-12
    assert w1.g_inv(0.0) == 0.0


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: f"{l.variant}-{l.alpha or l.beta}")
def test_g_inv_monotone_and_pseudo_inverse(law):
    ys = np.linspace(0.0, 25.0, 200)
    rs = law.g_inv(ys)
    assert np.all(np.diff(rs) >= -1e-12)
    # g(g_inv(y)) >= y wherever g_inv lands in the positive domain
    pos = rs > 0
    back = law.g_eval(rs[pos])
    assert np.all(back >= ys[pos] - 1e-9)


def test_make_mean_one_scales():
    w2 = make_mean_one("weibull", alpha=2.0)
    assert abs(w2.scale_m - math.gamma(1.5)) < 1e-12  # 0.886227
    w1 = make_mean_one("weibull", alpha=1.0)
    assert w1.scale_m == 1.0
    p2 = make_mean_one("pareto", alpha=2.0)
    assert p2.pareto_threshold == 0.5 and p2.scale_m == 1.0


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: f"{l.variant}-{l.alpha or l.beta}")
def test_served_mean_one_mc(law):
    rng = np.random.default_rng(20260823)
    x = law.sample(rng, 10**6)
    se = x.std(ddof=1) / math.sqrt(x.size)
    assert abs(x.mean() - 1.0) < 4.0 * se


@pytest.mark.parametrize("law", ALL_LAWS[:4], ids=lambda l: f"{l.variant}-{l.alpha or l.beta}")
def test_empirical_tail_matches_g(law):
    rng = np.random.default_rng(7)
    n = 10**6
    x = law.sample(rng, n)
    for y in np.linspace(0.1, 20.0, 8):
        r = float(law.g_inv(y))
        if r <= 0:
            continue
        p = math.exp(-law.g_eval(r))
        phat = float((x > r).mean())
        band = 2.576 * math.sqrt(max(p * (1 - p), 1e-12) / n) + 3.0 / n
        assert abs(phat - p) < band, (y, r, p, phat)


def test_sample_is_ginv_of_exponential():
    law = make_mean_one("weibull", alpha=1.0)

    class FixedRng:
        def standard_exponential(self, size=None):
            return 0.693147

    assert abs(law.sample(FixedRng()) - 0.693147) < 1e-12


def test_stability_index_table():
    assert make_mean_one("weibull", alpha=0.5).stability_index == 1.0
    assert make_mean_one("log_pow", beta=2.0).stability_index == 1.0
    assert make_mean_one("log_log").stability_index == math.e
    assert make_mean_one("pareto", alpha=3.0).stability_index is None


def test_cramer_table():
    assert make_mean_one("weibull", alpha=1.0).cramer_holds
    assert make_mean_one("weibull", alpha=2.0).cramer_holds
    assert not make_mean_one("weibull", alpha=0.5).cramer_holds
    assert not make_mean_one("pareto", alpha=2.0).cramer_holds
    assert not make_mean_one("log_pow", beta=2.0).cramer_holds


def test_parameter_validation():
    with pytest.raises(DomainError):
        TailLaw(variant="pareto", alpha=1.0)
    with pytest.raises(DomainError):
        TailLaw(variant="weibull", alpha=0.0)
    with pytest.raises(DomainError):
        TailLaw(variant="log_pow", beta=1.0)
    with pytest.raises(DomainError):
        TailLaw(variant="cauchy")


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: f"{l.variant}-{l.alpha or l.beta}")
def test_json_roundtrip(law):
    blob = json.dumps(law.to_json())
    back = TailLaw.from_json(json.loads(blob))
    assert back == law
