import math

import numpy as np
import pytest

from rwre_slowdown.environment import Environment, OmegaLaw, rho_mean, solomon_speed
from rwre_slowdown.errors import DomainError
from rwre_slowdown.laws import make_mean_one

UNIF = OmegaLaw(variant="uniform", a=0.6, b=0.8)
W1 = make_mean_one("weibull", alpha=1.0)


def test_deterministic_site():
    env = Environment(OmegaLaw(variant="deterministic", p=0.75), W1, 11)
    omega, mu = env.site(5)
    assert omega == 0.75 and mu > 0.0


def test_order_independent_regeneration():
    env_a = Environment(UNIF, W1, 42)
    pair_early = env_a.site(3)
    env_b = Environment(UNIF, W1, 42)
    env_b.site(10**6)  # realize a huge window first
    assert env_b.site(3) == pair_early
    # identical seeds and laws give identical windows
    assert np.array_equal(env_a.omega(-20, 20), Environment(UNIF, W1, 42).omega(-20, 20))


def test_window_extension_preserves_values():
    env = Environment(UNIF, W1, 9)
    before = env.omega(-5, 5).copy(), env.mu(-5, 5).copy()
    env.ensure_window(-500, 500)
    assert np.array_equal(env.omega(-5, 5), before[0])
    assert np.array_equal(env.mu(-5, 5), before[1])


def test_omega_independent_of_tail_law():
    # omega and mu use disjoint sub-streams of the site hash
    env_w = Environment(UNIF, W1, 77)
    env_p = Environment(UNIF, make_mean_one("pareto", alpha=2.0), 77)
    assert np.array_equal(env_w.omega(-50, 50), env_p.omega(-50, 50))
    assert not np.array_equal(env_w.mu(-50, 50), env_p.mu(-50, 50))


def test_support_and_positivity():
    env = Environment(UNIF, W1, 123)
    omega = env.omega(-200, 200)
    mu = env.mu(-200, 200)
    assert np.all((omega >= 0.6) & (omega <= 0.8))
    assert np.all(mu > 0.0)


def test_rho_mean_values():
    assert abs(rho_mean(OmegaLaw(variant="deterministic", p=0.75)) - 1.0 / 3.0) < 1e-15
    # Uniform[0.6, 0.8]: 5 ln(4/3) - 1, frozen from the analytic integral
    assert abs(rho_mean(UNIF) - 0.4384103622589046) < 1e-12
    tp = OmegaLaw(variant="two_point", p1=0.6, p2=0.9, q=0.5)
    assert abs(rho_mean(tp) - 7.0 / 18.0) < 1e-15


def test_rho_mean_mc_cross_check():
    rng = np.random.default_rng(3)
    u = rng.uniform(0.6, 0.8, 10**6)
    mc = ((1.0 - u) / u).mean()
    assert abs(mc - rho_mean(UNIF)) < 4e-4


def test_solomon_speed_values():
    assert abs(solomon_speed(OmegaLaw(variant="deterministic", p=0.75)) - 0.5) < 1e-15
    assert abs(solomon_speed(UNIF) - 0.3904237987128828) < 1e-12
    near_one = solomon_speed(OmegaLaw(variant="deterministic", p=0.9999))
    assert near_one > 0.999


def test_omega_law_validation():
    with pytest.raises(DomainError):
        OmegaLaw(variant="deterministic", p=0.5)
    with pytest.raises(DomainError):
        OmegaLaw(variant="uniform", a=0.4, b=0.8)
    with pytest.raises(DomainError):
        OmegaLaw(variant="two_point", p1=0.6, p2=0.9, q=1.5)


def test_mu_override_planting():
    env = Environment(UNIF, W1, 5)
    planted = env.with_mu_override({3: 42.0})
    assert planted.site(3)[1] == 42.0
    assert planted.site(3)[0] == env.site(3)[0]
    assert planted.site(4) == env.site(4)
    with pytest.raises(DomainError):
        env.with_mu_override({0: -1.0})


def test_window_csv_export(tmp_path):
    env = Environment(UNIF, W1, 5)
    path = tmp_path / "win.csv"
    env.write_window_csv(path, -3, 3)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# environment window:")
    assert lines[1] == "x,omega,mu"
    assert len(lines) == 2 + 7
    x, omega, mu = lines[2].split(",")
    assert int(x) == -3
    assert float(omega) == env.site(-3)[0] and float(mu) == env.site(-3)[1]


def test_json_roundtrip():
    law = OmegaLaw(variant="two_point", p1=0.6, p2=0.9, q=0.25)
    assert OmegaLaw.from_json(law.to_json()) == law
    env = Environment(UNIF, W1, 99)
    hdr = env.header_json()
    assert hdr["master_seed"] == 99
    assert OmegaLaw.from_json(hdr["omega_law"]) == UNIF
