import math

import numpy as np
import pytest

from rwre_slowdown.asym import (
    _phi,
    check_h_slack,
    m_quenched,
    predicted_exponents,
    rate_eval,
    running_max_check,
    solve_h,
    u_rho,
    v_c,
)
from rwre_slowdown.errors import DomainError
from rwre_slowdown.laws import make_mean_one

W1 = make_mean_one("weibull", alpha=1.0)
P2 = make_mean_one("pareto", alpha=2.0)
LP2 = make_mean_one("log_pow", beta=2.0)
LL = make_mean_one("log_log")

GRID_LAWS = [W1, P2, LP2, LL, make_mean_one("weibull", alpha=0.5)]


def _closed_form_h_w1(t):
    # for g(h) = h the root of t/h = h - log t is quadratic in h
    lt = math.log(t)
    return 0.5 * (lt + math.sqrt(lt * lt + 4.0 * t))


def test_solve_h_weibull_closed_form():
    t = 1e4
    h = solve_h(W1, t)
    assert abs(h - _closed_form_h_w1(t)) / h < 1e-6
    assert abs(h - 104.71115192679662) / h < 1e-6
    # at the root, t/h equals g(h) - log t
    assert abs(t / h - (W1.g_eval(h) - math.log(t))) < 1e-3
    assert abs(t / h - 95.50081167086178) < 1e-3


@pytest.mark.parametrize("law", GRID_LAWS, ids=lambda l: f"{l.variant}-{l.alpha or l.beta}")
def test_solve_h_maximality_on_grid(law):
    for t in np.geomspace(1e3, 1e12, 30):
        h = solve_h(law, float(t))
        assert math.log(t) <= h <= t
        assert _phi(law, float(t), h) >= -1e-9 * (t / h)
        assert _phi(law, float(t), h * (1.0 + 1e-6)) < 0.0


@pytest.mark.parametrize("law", GRID_LAWS, ids=lambda l: f"{l.variant}-{l.alpha or l.beta}")
def test_h_slack_on_grid(law):
    # near-equality at the root: t/h <= 2 (g(h) - log t) for all grid t
    for t in np.geomspace(1e3, 1e12, 30):
        assert check_h_slack(law, float(t))


def test_solve_h_domain_errors():
    # mean-one served laws admit a root for every t > 1, so only the
    # t <= 1 guard is reachable here
    with pytest.raises(DomainError):
        solve_h(W1, 1.0)
    with pytest.raises(DomainError):
        solve_h(W1, 0.5)


def test_remark_trend_pareto():
    ratios = []
    for t in np.geomspace(1e6, 1e12, 13):
        h = solve_h(P2, float(t))
        ratios.append(h * (2.0 - 1.0) * math.log(t) / t)
    assert all(0.5 <= r <= 2.0 for r in ratios)
    assert all(b < a for a, b in zip(ratios, ratios[1:]))  # decreasing toward 1
    assert ratios[-1] > 1.0


def test_remark_trend_weibull():
    ratios = []
    for t in np.geomspace(1e6, 1e12, 13):
        ratios.append(solve_h(W1, float(t)) / math.sqrt(t))
    assert all(1.0 <= r <= 1.3 for r in ratios)
    assert all(b <= a for a, b in zip(ratios, ratios[1:]))


def test_remark_trend_log_pow():
    for t in (1e8, 1e10, 1e12):
        h = solve_h(LP2, float(t))
        assert 0.5 <= h * math.log(t) ** 2 / t <= 2.0


def test_m_quenched_examples():
    t = 1e6
    assert abs(m_quenched(W1, t, "g_inv") - math.log(t)) < 1e-9
    # at t = e^(e^e) the triple log is 1, so u_rho loses its rho dependence
    t3 = math.exp(math.exp(math.e))
    for rho in (0.05, 0.3):
        expect = (t3 * math.exp(math.e) * math.e) ** 0.5
        assert abs(u_rho(P2, t3, rho) - expect) / expect < 1e-12
    # at t = e^e the double log is 1
    te = math.exp(math.e)
    assert abs(v_c(P2, te, 0.5) - 0.5 * math.exp(math.e / 2.0)) < 1e-12


def test_m_quenched_guards():
    with pytest.raises(DomainError):
        m_quenched(P2, 2.0, "u_rho")  # needs t > e^e
    with pytest.raises(DomainError):
        m_quenched(P2, 2.5, "v_c")  # needs t > e
    with pytest.raises(DomainError):
        m_quenched(P2, 1e6, "g_inv")  # no stability index for pareto
    with pytest.raises(DomainError):
        u_rho(W1, 1e6, 0.1)
    with pytest.raises(DomainError):
        m_quenched(W1, 1e6, "nope")


@pytest.mark.parametrize("law", [W1, P2, LP2], ids=lambda l: l.variant)
def test_m_modes_nondecreasing(law):
    ts = np.geomspace(100.0, 1e10, 25)
    for mode in ("g_inv_minus", "g_inv_plus", "u_rho", "v_c"):
        vals = []
        for t in ts:
            try:
                vals.append(m_quenched(law, float(t), mode))
            except DomainError:
                vals.append(None)
        seq = [v for v in vals if v is not None]
        assert all(b >= a - 1e-12 for a, b in zip(seq, seq[1:]))


def test_predicted_exponents():
    t = 1e6
    up, lo, ann = predicted_exponents(W1, t, v=0.1, eps=0.0)
    assert abs(up - t / math.log(t)) < 1e-6
    assert abs(up - 72382.41365054198) < 1e-3
    assert lo == up
    t4 = 1e4
    _, _, ann4 = predicted_exponents(W1, t4, v=0.1, eps=0.1)
    assert abs(ann4 - 95.50081167086178) < 1e-3
    # exponents increase along the sweep
    anns = [predicted_exponents(W1, float(t), 0.1, 0.1)[2] for t in (1e4, 1e6, 1e8)]
    assert anns[0] < anns[1] < anns[2]


def test_rate_eval_marks_inapplicable_modes():
    ev = rate_eval(W1, 1e6)
    assert ev.m_values["u_rho"] is None and ev.m_values["v_c"] is None
    assert ev.m_values["g_inv"] is not None
    evp = rate_eval(P2, 1e6)
    assert evp.m_values["g_inv"] is None
    assert evp.m_values["u_rho"] is not None


def test_running_max_check_smoke():
    rep = running_max_check(W1, 10**4, 40, 777)
    assert rep.frac_in_eps_band >= 0.9
    assert rep.frac_in_pareto_band is None
    with pytest.raises(DomainError):
        running_max_check(W1, 100, 10, 1)
