"""End-to-end studies: quenched/annealed slowdown brackets and tail checks.

Every record is reproducible bit-exactly from (config hash, master seed);
outputs are flat dicts ready for the JSONL/CSV writers in this module.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._bits import derive_key
from .asym import solve_h
from .environment import Environment, OmegaLaw, solomon_speed
from .errors import ConfigError, DomainError, NumericError, WindowTooSmallError
from .exact import (
    make_query,
    slowdown_lower_bound,
    slowdown_upper_bound,
    uniformization_slowdown,
)
from .laws import TailLaw
from .sim import estimate_slowdown, simulate_x, wilson_interval

SCHEMA_VERSION = 1
TOOLKIT_VERSION = "0.1.0"


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared configuration for the quenched/annealed slowdown studies."""

    omega_law: OmegaLaw
    tail_law: TailLaw
    v_frac: float                 # v as a fraction of the Solomon speed
    t_grid: tuple
    master_seed: int
    n_envs: int = 5
    mc_replicas: int = 2000
    with_mc: bool = True
    with_oracle: bool = True
    oracle_tol: float = 1e-8
    oracle_t_max: float = 40.0
    mc_t_max: float = 200.0
    exponent_eps: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.v_frac < 1.0):
            raise ConfigError("v_frac must lie in (0, 1)")
        if list(self.t_grid) != sorted(self.t_grid) or any(t <= 0 for t in self.t_grid):
            raise ConfigError("t_grid must be increasing and positive")
        if self.n_envs < 0 or self.mc_replicas < 1:
            raise ConfigError("n_envs must be >= 0 and mc_replicas >= 1")

    def to_json(self) -> dict:
        return {
            "omega_law": self.omega_law.to_json(),
            "tail_law": self.tail_law.to_json(),
            "v_frac": self.v_frac,
            "t_grid": list(self.t_grid),
            "master_seed": self.master_seed,
            "n_envs": self.n_envs,
            "mc_replicas": self.mc_replicas,
            "with_mc": self.with_mc,
            "with_oracle": self.with_oracle,
            "oracle_tol": self.oracle_tol,
            "oracle_t_max": self.oracle_t_max,
            "mc_t_max": self.mc_t_max,
            "exponent_eps": self.exponent_eps,
        }


def config_hash(cfg_json: dict) -> str:
    blob = json.dumps(cfg_json, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def oracle_window(t: float) -> tuple[int, int]:
    """Truncation window generous enough for desk-scale oracle runs."""
    return (-int(math.ceil(0.3 * t)) - 40, int(math.ceil(1.3 * t)) + 40)


QUENCHED_COLUMNS = (
    "schema_version", "config_hash", "env_seed", "t", "v",
    "lower", "upper", "oracle", "mc_estimate", "mc_ci_lo", "mc_ci_hi",
    "exp_quenched_upper_scale", "exp_quenched_lower_scale", "exp_annealed",
    "ratio_upper_to_m_plus", "ratio_lower_to_m_minus", "wall_seconds", "skipped_oracle_reason",
)


def run_quenched_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    """Per (environment seed, t): bound bracket, MC, oracle, and rate ratios.

    With jobs > 1 environments are processed by a bounded thread pool; the
    record order is by (environment index, t) regardless of scheduling.
    """
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_env = list(pool.map(lambda i: _quenched_env_records(cfg, i), range(cfg.n_envs)))
    else:
        per_env = [_quenched_env_records(cfg, i) for i in range(cfg.n_envs)]
    return [rec for recs in per_env for rec in recs]


def _quenched_env_records(cfg: ExperimentConfig, i: int) -> list[dict]:
    chash = config_hash(cfg.to_json())
    v_p = solomon_speed(cfg.omega_law)
    v = cfg.v_frac * v_p
    records = []
    env_seed = int(derive_key(cfg.master_seed, i))
    env = Environment(cfg.omega_law, cfg.tail_law, env_seed)
    for t in cfg.t_grid:
        t0 = time.perf_counter()
        sq = make_query(cfg.omega_law, float(t), v)
        lower = slowdown_lower_bound(env, float(t), v)
        upper = slowdown_upper_bound(env, sq)
        oracle = None
        skipped = None
        if cfg.with_oracle and t <= cfg.oracle_t_max:
            try:
                oracle = uniformization_slowdown(
                    env, float(t), int(math.ceil(v * t)), oracle_window(t), cfg.oracle_tol
                )
            except (WindowTooSmallError, NumericError) as exc:
                skipped = str(exc)
        mc = mc_lo = mc_hi = None
        if cfg.with_mc and t <= cfg.mc_t_max:
            est = estimate_slowdown(env, float(t), v, cfg.mc_replicas, int(derive_key(cfg.master_seed, 10_000 + i)))
            mc, mc_lo, mc_hi = est.estimate, est.ci_lo, est.ci_hi
        log_t = math.log(float(t))
        m_plus = cfg.tail_law.g_inv((1.0 + cfg.exponent_eps) * log_t)
        m_minus = cfg.tail_law.g_inv((1.0 - cfg.exponent_eps) * log_t)
        h = solve_h(cfg.tail_law, float(t))
        records.append({
            "schema_version": SCHEMA_VERSION,
            "config_hash": chash,
            "env_seed": env_seed,
            "t": float(t),
            "v": v,
            "lower": lower,
            "upper": upper,
            "oracle": oracle,
            "mc_estimate": mc,
            "mc_ci_lo": mc_lo,
            "mc_ci_hi": mc_hi,
            "exp_quenched_upper_scale": t / m_plus,
            "exp_quenched_lower_scale": t / m_minus,
            "exp_annealed": t / h,
            "ratio_upper_to_m_plus": -math.log(max(upper, 1e-300)) / (t / m_plus),
            "ratio_lower_to_m_minus": -math.log(max(lower, 1e-300)) / (t / m_minus),
            "wall_seconds": round(time.perf_counter() - t0, 6),
            "skipped_oracle_reason": skipped,
        })
    return records


# ---------------------------------------------------------------------------
# annealed study with the planted importance-sampling estimator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlantedEstimate:
    """Unbiased annealed slowdown estimate split over two replica streams.

    term0 covers environments without any exceedance of the planting level in
    [0, ceil(vt) - 1]; term1 is the importance-sampled exceedance part with
    analytic likelihood weights n_sites * exp(-g(h)) / #exceedances.
    """

    estimate: float
    log_estimate: float
    std_error: float
    term_no_exceedance: float
    term_planted: float
    replicas: int
    h_level: float

    @property
    def ci(self) -> tuple[float, float]:
        return (max(0.0, self.estimate - 3.0 * self.std_error),
                self.estimate + 3.0 * self.std_error)


def planted_annealed_estimate(
    omega_law: OmegaLaw,
    tail_law: TailLaw,
    t: float,
    v: float,
    replicas: int,
    master_seed: int,
    h_level: float | None = None,
) -> PlantedEstimate:
    """Annealed P(X_t < vt) by planting one conditional heavy site."""
    if replicas < 2:
        raise DomainError("need replicas >= 2")
    n_sites = int(math.ceil(v * t))
    if n_sites < 1:
        raise DomainError("need vt >= 1")
    h = solve_h(tail_law, t) if h_level is None else float(h_level)
    g_h = tail_law.g_eval(h)
    log_tail = -g_h
    threshold = v * t

    contrib = np.zeros(replicas)
    log_terms = []
    term0_sum = 0.0
    term1_sum = 0.0
    for r in range(replicas):
        # stream 0: naive environment, kept only when no site exceeds h
        env = Environment(omega_law, tail_law, int(derive_key(master_seed, 4 * r)))
        mu_win = env.mu(0, n_sites - 1)
        if not np.any(mu_win > h):
            out = simulate_x(env, t, derive_key(master_seed, 4 * r + 1))
            if out.position < threshold:
                term0_sum += 1.0
                contrib[r] += 1.0

        # stream 1: planted environment with the analytic likelihood weight
        env_p = Environment(omega_law, tail_law, int(derive_key(master_seed, 4 * r + 2)))
        aux = np.random.default_rng(int(derive_key(master_seed, 4 * r + 3)))
        x_star = int(aux.integers(0, n_sites))
        mu_star = float(tail_law.g_inv(g_h + aux.standard_exponential()))
        env_p = env_p.with_mu_override({x_star: mu_star})
        mu_win = env_p.mu(0, n_sites - 1)
        k = int(np.count_nonzero(mu_win > h))
        log_w = math.log(n_sites) + log_tail - math.log(k)
        out = simulate_x(env_p, t, derive_key(master_seed, 4 * r + 1))
        if out.position < threshold:
            term1_sum += math.exp(log_w)
            contrib[r] += math.exp(log_w)
            log_terms.append(log_w)

    estimate = float(contrib.mean())
    std_error = float(contrib.std(ddof=1)) / math.sqrt(replicas)
    if term0_sum > 0.0:
        log_terms.append(math.log(term0_sum))
    log_estimate = (
        float(logsumexp(np.array(log_terms)) - math.log(replicas))
        if log_terms
        else -math.inf
    )
    return PlantedEstimate(
        estimate=estimate,
        log_estimate=log_estimate,
        std_error=std_error,
        term_no_exceedance=term0_sum / replicas,
        term_planted=term1_sum / replicas,
        replicas=replicas,
        h_level=h,
    )


ANNEALED_COLUMNS = (
    "schema_version", "config_hash", "t", "v", "h", "planted_estimate",
    "planted_log_estimate", "planted_std_error", "naive_estimate",
    "naive_ci_lo", "naive_ci_hi", "exp_annealed", "lb_exponent",
    "ratio_planted_to_annealed", "wall_seconds",
)


def run_annealed_experiment(cfg: ExperimentConfig) -> list[dict]:
    """Planted-estimator sweep with a naive cross-check at small t."""
    chash = config_hash(cfg.to_json())
    v_p = solomon_speed(cfg.omega_law)
    v = cfg.v_frac * v_p
    records = []
    for t in cfg.t_grid:
        t0 = time.perf_counter()
        t = float(t)
        planted = planted_annealed_estimate(
            cfg.omega_law, cfg.tail_law, t, v, cfg.mc_replicas, cfg.master_seed
        )
        naive = naive_lo = naive_hi = None
        if cfg.with_mc and t <= cfg.mc_t_max:
            hits = 0
            for r in range(cfg.mc_replicas):
                env = Environment(
                    cfg.omega_law, cfg.tail_law, int(derive_key(cfg.master_seed, 50_000 + r))
                )
                out = simulate_x(env, t, derive_key(cfg.master_seed, 90_000 + r))
                if out.position < v * t:
                    hits += 1
            naive = hits / cfg.mc_replicas
            naive_lo, naive_hi = wilson_interval(hits, cfg.mc_replicas)
        h = planted.h_level
        exp_annealed = t / h
        # lower-bound exponent t/h + g(h) - log t; at the root this is <= 2t/h
        lb_exponent = exp_annealed + cfg.tail_law.g_eval(h) - math.log(t)
        records.append({
            "schema_version": SCHEMA_VERSION,
            "config_hash": chash,
            "t": t,
            "v": v,
            "h": h,
            "planted_estimate": planted.estimate,
            "planted_log_estimate": planted.log_estimate,
            "planted_std_error": planted.std_error,
            "naive_estimate": naive,
            "naive_ci_lo": naive_lo,
            "naive_ci_hi": naive_hi,
            "exp_annealed": exp_annealed,
            "lb_exponent": lb_exponent,
            "ratio_planted_to_annealed": (
                -planted.log_estimate / exp_annealed
                if math.isfinite(planted.log_estimate)
                else None
            ),
            "wall_seconds": round(time.perf_counter() - t0, 6),
        })
    return records


# ---------------------------------------------------------------------------
# tail-sum lemma study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailExperimentConfig:
    """Setup for the weighted heavy-tail sum exceedance study."""

    weight: float = 1.0       # constant weight w_k, must lie in [0, kappa]
    kappa: float = 1.0
    delta: float = 0.5
    n_grid: tuple = (25, 50, 100, 200)
    replicas: int = 200_000
    master_seed: int = 0
    chunk: int = 100_000

    def __post_init__(self):
        if not (0.0 <= self.weight <= self.kappa):
            raise ConfigError("need 0 <= weight <= kappa")
        if not (0.0 < self.delta < 1.0):
            raise ConfigError("delta must lie in (0, 1)")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "kappa": self.kappa,
            "delta": self.delta,
            "n_grid": list(self.n_grid),
            "replicas": self.replicas,
            "master_seed": self.master_seed,
        }


TAIL_COLUMNS = (
    "schema_version", "config_hash", "n", "hits", "replicas", "p_hat",
    "ci_lo", "ci_hi", "censored", "g_delta_n", "neg_log_ratio",
)


def _tail_lemma_applies(law: TailLaw) -> bool:
    if law.variant in ("pareto", "log_pow", "log_log"):
        return True
    return law.variant == "weibull" and law.alpha < 1.0


def run_tail_lemma_experiment(cfg: TailExperimentConfig, law: TailLaw) -> list[dict]:
    """MC exceedance probabilities P(sum w (mu - 1) > delta n) over the n grid."""
    if not _tail_lemma_applies(law):
        raise DomainError("law must be pareto, intermediate, or weibull with alpha < 1")
    chash = config_hash({"cfg": cfg.to_json(), "law": law.to_json()})
    records = []
    for n in cfg.n_grid:
        hits = 0
        done = 0
        chunk_idx = 0
        while done < cfg.replicas:
            take = min(cfg.chunk, cfg.replicas - done)
            rng = np.random.default_rng(int(derive_key(cfg.master_seed, n * 1_000_003 + chunk_idx)))
            if cfg.weight > 0.0:
                mu = law.sample(rng, (take, n))
                s = cfg.weight * (mu.sum(axis=1) - n)
                hits += int(np.count_nonzero(s > cfg.delta * n))
            done += take
            chunk_idx += 1
        p_hat = hits / cfg.replicas
        censored = hits == 0
        if censored:
            # one-sided 95% Clopper-Pearson upper bound at zero successes
            ci = (0.0, 1.0 - 0.05 ** (1.0 / cfg.replicas))
        else:
            ci = wilson_interval(hits, cfg.replicas)
        g_dn = float(law.g_eval(cfg.delta * n))
        records.append({
            "schema_version": SCHEMA_VERSION,
            "config_hash": chash,
            "n": int(n),
            "hits": hits,
            "replicas": cfg.replicas,
            "p_hat": p_hat,
            "ci_lo": ci[0],
            "ci_hi": ci[1],
            "censored": censored,
            "g_delta_n": g_dn,
            "neg_log_ratio": (-math.log(p_hat) / g_dn) if hits > 0 and g_dn > 0 else None,
        })
    return records


def fit_tail_records(records: list[dict], law: TailLaw) -> dict:
    """Envelope/band summary of a tail-lemma record set."""
    usable = [r for r in records if not r["censored"]]
    out = {"law": law.to_json(), "n_usable": len(usable)}
    if law.variant == "pareto" and usable:
        ns = np.array([r["n"] for r in usable], dtype=float)
        ps = np.array([r["p_hat"] for r in usable])
        out["envelope_c"] = float(np.max(ps * ns ** (law.alpha - 1.0)))
        if len(usable) >= 2:
            slope = np.polyfit(np.log(ns), np.log(ps), 1)[0]
            out["log_slope"] = float(slope)
    ratios = [r["neg_log_ratio"] for r in usable if r["neg_log_ratio"] is not None]
    if ratios:
        out["ratio_min"] = min(ratios)
        out["ratio_max"] = max(ratios)
    return out


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def write_jsonl(records: list[dict], path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def write_csv(records: list[dict], path, columns) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("# schema v%d columns: %s\n" % (SCHEMA_VERSION, ",".join(columns)))
        writer = csv.writer(fh)
        writer.writerow(columns)
        for rec in records:
            writer.writerow(["" if rec.get(c) is None else rec.get(c) for c in columns])
