"""Event-driven Monte Carlo for the holding-time walk and its time change.

Each replica owns an independent counter-based stream derived from
(master seed, replica index); merging partial results is a pure sum of
counts, so results are invariant under any parallel schedule.  The inner
event loops live in ``_kernels`` (numba with numpy fallback).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._bits import derive_key
from .environment import Environment
from .errors import DomainError, NumericError

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class SimOutcome:
    """Result of one simulated path."""

    position: int
    jumps: int
    elapsed: float          # physical time consumed (t for time-capped runs)
    a_value: float | None = None   # accumulated additive functional, if tracked
    sites: np.ndarray | None = None    # optional per-event record
    holds: np.ndarray | None = None


@dataclass(frozen=True)
class EstimateCI:
    """Point estimate with a 95% interval, reproducible from its seed."""

    estimate: float
    ci_lo: float
    ci_hi: float
    replicas: int
    master_seed: int

    def csv_row(self) -> list:
        return [self.estimate, self.ci_lo, self.ci_hi, self.replicas, self.master_seed]


def wilson_interval(successes: int, n: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise DomainError("need n >= 1")
    if successes == 0 or successes == n:
        # closed-form edge cases avoid float dust at the clamped end
        z2 = _Z95 * _Z95
        edge = z2 / (n + z2)
        return (0.0, edge) if successes == 0 else (1.0 - edge, 1.0)
    z2 = _Z95 * _Z95
    phat = successes / n
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denom
    half = _Z95 * math.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _initial_window(t: float) -> tuple[int, int]:
    lo = -int(0.2 * t) - 64
    hi = int(1.3 * t) + 64
    return lo, hi


def simulate_x(env: Environment, t: float, key) -> SimOutcome:
    """Exact continuous-time path of the holding-time walk up to time t."""
    if t < 0.0:
        raise DomainError("t must be >= 0")
    lo, hi = _initial_window(t)
    env.ensure_window(lo, hi)
    pos, time_left, jumps, state = 0, float(t), 0, np.uint64(key)
    with np.errstate(over="ignore"):
        while True:
            omega = env.omega(lo, hi)
            mu = env.mu(lo, hi)
            idx, time_left, j, state, status = _kernels.walk_x_segment(
                omega, mu, pos - lo, time_left, state
            )
            state = np.uint64(state)  # numba boxes the state as a python int
            jumps += j
            pos = idx + lo
            if status == _kernels.DONE:
                return SimOutcome(position=pos, jumps=jumps, elapsed=t)
            if status == _kernels.HIT_LEFT:
                lo -= max(64, (hi - lo) // 4)
            else:
                hi += max(64, (hi - lo) // 2)
            env.ensure_window(lo, hi)


def simulate_timechange(env: Environment, t: float, key) -> SimOutcome:
    """Rate-1 walk stopped when A = integral of mu along the path reaches t."""
    if t < 0.0:
        raise DomainError("t must be >= 0")
    lo, hi = _initial_window(t)
    env.ensure_window(lo, hi)
    pos, a_left, elapsed, jumps, state = 0, float(t), 0.0, 0, np.uint64(key)
    with np.errstate(over="ignore"):
        while True:
            omega = env.omega(lo, hi)
            mu = env.mu(lo, hi)
            idx, a_left, s_el, j, state, status = _kernels.walk_timechange_segment(
                omega, mu, pos - lo, a_left, state
            )
            state = np.uint64(state)
            jumps += j
            elapsed += s_el
            pos = idx + lo
            if status == _kernels.DONE:
                return SimOutcome(position=pos, jumps=jumps, elapsed=float(elapsed), a_value=t)
            if status == _kernels.HIT_LEFT:
                lo -= max(64, (hi - lo) // 4)
            else:
                hi += max(64, (hi - lo) // 2)
            env.ensure_window(lo, hi)


def simulate_x_recorded(env: Environment, t: float, key, max_events: int = 1 << 16) -> SimOutcome:
    """Debug variant of simulate_x keeping per-event (site, holding) records."""
    lo, hi = _initial_window(t)
    env.ensure_window(lo, hi)
    sites = np.empty(max_events, dtype=np.int64)
    holds = np.empty(max_events)
    pos, time_left, total, state = 0, float(t), 0, np.uint64(key)
    with np.errstate(over="ignore"):
        while True:
            omega = env.omega(lo, hi)
            mu = env.mu(lo, hi)
            idx, time_left, j, state, status = _kernels.walk_record_segment(
                omega, mu, pos - lo, time_left, state,
                sites[total:], holds[total:],
            )
            state = np.uint64(state)
            sites[total : total + j] += lo
            total += j
            pos = idx + lo
            if status == _kernels.DONE:
                if time_left > 0.0 and total >= max_events:
                    raise NumericError("event record buffer exhausted")
                return SimOutcome(
                    position=pos, jumps=total, elapsed=t,
                    sites=sites[:total].copy(), holds=holds[:total].copy(),
                )
            if status == _kernels.HIT_LEFT:
                lo -= max(64, (hi - lo) // 4)
            else:
                hi += max(64, (hi - lo) // 2)
            env.ensure_window(lo, hi)


def hitting_sample(env: Environment, start: int, left: int, right: int, key) -> tuple[int, float, float, int]:
    """One rate-1 walk run from start until hitting `left` or `right`.

    Returns (side, elapsed, a_value, jumps) with side -1 for the left target
    and +1 for the right target.
    """
    if not (left < start < right):
        raise DomainError("need left < start < right")
    env.ensure_window(left, right)
    with np.errstate(over="ignore"):
        omega = env.omega(left, right)
        mu = env.mu(left, right)
        _, elapsed, a_total, jumps, _, status = _kernels.walk_hit_segment(
            omega, mu, start - left, np.uint64(key)
        )
    side = -1 if status == _kernels.HIT_LEFT else 1
    return side, float(elapsed), float(a_total), int(jumps)


def hitting_time_right(env: Environment, start: int, target: int, key) -> float:
    """Rate-1 walk time H(target) from start, target > start."""
    if target <= start:
        raise DomainError("target must exceed start")
    # far-left sentinel; widened automatically if ever reached
    left = start - max(64, 4 * (target - start))
    side, elapsed, _, _ = hitting_sample(env, start, left, target, key)
    while side < 0:
        left -= max(256, 4 * (target - start))
        side, elapsed, _, _ = hitting_sample(env, start, left, target, key)
    return elapsed


def estimate_slowdown(env: Environment, t: float, v: float, replicas: int, master_seed: int) -> EstimateCI:
    """Wilson-interval estimate of P(X_t < vt) over independent replicas."""
    if replicas < 1:
        raise DomainError("need replicas >= 1")
    threshold = v * t
    hits = 0
    for r in range(replicas):
        out = simulate_x(env, t, derive_key(master_seed, r))
        if out.position < threshold:
            hits += 1
    lo, hi = wilson_interval(hits, replicas)
    return EstimateCI(hits / replicas, lo, hi, replicas, master_seed)


def estimate_speed(
    env_or_laws,
    t: float,
    replicas: int,
    master_seed: int,
    annealed: bool = False,
) -> EstimateCI:
    """Mean of X_t / t with a normal 95% CI.

    Pass an Environment for the quenched mode; in annealed mode pass a pair
    (omega_law, tail_law) and a fresh environment is drawn per replica.
    """
    if t < 100.0:
        raise DomainError("speed estimation needs t >= 100")
    if replicas < 2:
        raise DomainError("need replicas >= 2")
    vals = np.empty(replicas)
    for r in range(replicas):
        key = derive_key(master_seed, r)
        if annealed:
            omega_law, tail_law = env_or_laws
            env = Environment(omega_law, tail_law, int(derive_key(master_seed, 1_000_000 + r)))
        else:
            env = env_or_laws
        vals[r] = simulate_x(env, t, key).position / t
    mean = float(vals.mean())
    half = _Z95 * float(vals.std(ddof=1)) / math.sqrt(replicas)
    return EstimateCI(mean, mean - half, mean + half, replicas, master_seed)
