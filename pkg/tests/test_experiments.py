import json
import math

import numpy as np
import pytest

from rwre_slowdown.environment import OmegaLaw
from rwre_slowdown.errors import ConfigError, DomainError
from rwre_slowdown.experiments import (
    ANNEALED_COLUMNS,
    QUENCHED_COLUMNS,
    TAIL_COLUMNS,
    ExperimentConfig,
    TailExperimentConfig,
    config_hash,
    fit_tail_records,
    planted_annealed_estimate,
    run_annealed_experiment,
    run_quenched_experiment,
    run_tail_lemma_experiment,
    write_csv,
    write_jsonl,
)
from rwre_slowdown.laws import make_mean_one

UNIF = OmegaLaw(variant="uniform", a=0.6, b=0.8)
W1 = make_mean_one("weibull", alpha=1.0)
P2 = make_mean_one("pareto", alpha=2.0)


def small_config(**over):
    base = dict(
        omega_law=UNIF, tail_law=W1, v_frac=0.5, t_grid=(10.0, 20.0),
        master_seed=1337, n_envs=2, mc_replicas=300,
    )
    base.update(over)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ConfigError):
        small_config(v_frac=1.5)
    with pytest.raises(ConfigError):
        small_config(t_grid=(20.0, 10.0))
    with pytest.raises(ConfigError):
        small_config(mc_replicas=0)


def test_config_hash_stability():
    cfg = small_config()
    assert config_hash(cfg.to_json()) == config_hash(small_config().to_json())
    assert config_hash(cfg.to_json()) != config_hash(small_config(master_seed=1).to_json())


def test_quenched_records_shape_and_sandwich():
    cfg = small_config()
    recs = run_quenched_experiment(cfg)
    assert len(recs) == cfg.n_envs * len(cfg.t_grid)
    for r in recs:
        assert set(QUENCHED_COLUMNS) <= set(r)
        assert r["lower"] <= r["upper"]
        if r["oracle"] is not None:
            assert r["lower"] <= r["oracle"] + 1e-8 <= r["upper"] + 2e-8


def test_quenched_empty_grids():
    assert run_quenched_experiment(small_config(t_grid=())) == []
    assert run_quenched_experiment(small_config(n_envs=0)) == []


def test_quenched_reproducible_and_job_invariant():
    cfg = small_config()
    a = run_quenched_experiment(cfg)
    b = run_quenched_experiment(cfg)
    for ra, rb in zip(a, b):
        ra.pop("wall_seconds")
        rb.pop("wall_seconds")
    assert a == b
    c = run_quenched_experiment(cfg, jobs=3)
    for rc in c:
        rc.pop("wall_seconds")
    assert a == c


def test_annealed_records():
    cfg = small_config(mc_replicas=400)
    recs = run_annealed_experiment(cfg)
    assert len(recs) == len(cfg.t_grid)
    for r in recs:
        assert set(ANNEALED_COLUMNS) <= set(r)
        assert 0.0 <= r["planted_estimate"] <= 2.0
        # naive cross-check within joint 3 sigma at these small t
        se_n = (r["naive_ci_hi"] - r["naive_ci_lo"]) / (2 * 1.96)
        joint = math.hypot(se_n, r["planted_std_error"])
        assert abs(r["planted_estimate"] - r["naive_estimate"]) < 3.0 * joint
        assert r["lb_exponent"] <= 2.0 * r["exp_annealed"] + 1e-9


def test_planted_estimate_stable_under_doubling():
    a = planted_annealed_estimate(UNIF, W1, 20.0, 0.19, 400, 2024)
    b = planted_annealed_estimate(UNIF, W1, 20.0, 0.19, 800, 2024)
    joint = math.hypot(a.std_error, b.std_error)
    assert abs(a.estimate - b.estimate) < 3.0 * joint
    assert a.term_no_exceedance >= 0.0 and a.term_planted >= 0.0


def test_tail_lemma_guards_and_zero_weight():
    with pytest.raises(DomainError):
        run_tail_lemma_experiment(TailExperimentConfig(), W1)  # cramer law rejected
    cfg = TailExperimentConfig(weight=0.0, kappa=1.0, n_grid=(25, 50), replicas=2000)
    recs = run_tail_lemma_experiment(cfg, P2)
    assert all(r["hits"] == 0 and r["censored"] for r in recs)
    assert all(r["ci_hi"] > 0.0 for r in recs)  # censored cells carry an upper CI


def test_tail_lemma_pareto_fit():
    cfg = TailExperimentConfig(n_grid=(25, 50, 100), replicas=30000, master_seed=606)
    recs = run_tail_lemma_experiment(cfg, P2)
    fit = fit_tail_records(recs, P2)
    assert fit["n_usable"] == 3
    c = fit["envelope_c"]
    for r in recs:
        assert r["p_hat"] <= c * r["n"] ** (1.0 - 2.0) * (1.0 + 1e-12)
    assert -1.6 < fit["log_slope"] < -0.4


def test_writers_roundtrip(tmp_path):
    cfg = small_config(t_grid=(10.0,), n_envs=1, with_oracle=False, mc_replicas=50)
    recs = run_quenched_experiment(cfg)
    jpath = tmp_path / "r.jsonl"
    cpath = tmp_path / "r.csv"
    write_jsonl(recs, jpath)
    write_csv(recs, cpath, QUENCHED_COLUMNS)
    back = [json.loads(line) for line in jpath.read_text().splitlines()]
    assert back == recs
    lines = cpath.read_text().splitlines()
    assert lines[0].startswith("# schema v1 columns:")
    assert lines[1].split(",") == list(QUENCHED_COLUMNS)
    assert len(lines) == 2 + len(recs)
    # None becomes the empty CSV field
    oracle_idx = list(QUENCHED_COLUMNS).index("oracle")
    assert lines[2].split(",")[oracle_idx] == ""
