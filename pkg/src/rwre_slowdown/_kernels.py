"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

Set ``RWRE_SLOWDOWN_NO_NUMBA=1`` before import to force the fallback path.
Both backends consume identical counter-based random streams, so results are
bitwise reproducible across them; ``benchmarks/bench_kernels.py`` compares
their throughput.
"""

import os

import numpy as np

_FLAG = os.environ.get("RWRE_SLOWDOWN_NO_NUMBA", "0").lower()
USE_NUMBA = _FLAG not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False
if not USE_NUMBA:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap

BACKEND = "numba" if USE_NUMBA else "numpy"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_U1 = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0

# Walk segment statuses.
DONE = 0
HIT_LEFT = 1
HIT_RIGHT = 2


@njit(cache=True)
def _next_u(state):
    """Advance the sequential stream; uniform in (0, 1]."""
    state = state + _GOLDEN
    z = state + _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    z = z ^ (z >> _S31)
    return state, float((z >> _S11) + _U1) * _INV53


@njit(cache=True)
def walk_x_segment(omega, mu, idx, time_left, state):
    """Holding-time walk until the clock runs out or the window edge is hit.

    Holding at site i is mu[i] * Exp(1); the jump goes right with
    probability omega[i].  Returns (idx, time_left, jumps, state, status).
    """
    n = omega.shape[0]
    jumps = 0
    while True:
        state, u = _next_u(state)
        hold = mu[idx] * (-np.log(u))
        if hold >= time_left:
            return idx, 0.0, jumps, state, DONE
        time_left -= hold
        state, u = _next_u(state)
        if u <= omega[idx]:
            idx += 1
        else:
            idx -= 1
        jumps += 1
        if idx <= 0:
            return idx, time_left, jumps, state, HIT_LEFT
        if idx >= n - 1:
            return idx, time_left, jumps, state, HIT_RIGHT


@njit(cache=True)
def walk_timechange_segment(omega, mu, idx, a_left, state):
    """Rate-1 walk run until the additive functional A exhausts its budget.

    A accrues mu[i] per unit of rate-1 time.  Returns
    (idx, a_left, s_elapsed, jumps, state, status); s_elapsed is the rate-1
    time consumed in this segment, including the partial final holding.
    """
    n = omega.shape[0]
    jumps = 0
    s_elapsed = 0.0
    while True:
        state, u = _next_u(state)
        e = -np.log(u)
        da = mu[idx] * e
        if da >= a_left:
            s_elapsed += a_left / mu[idx]
            return idx, 0.0, s_elapsed, jumps, state, DONE
        a_left -= da
        s_elapsed += e
        state, u = _next_u(state)
        if u <= omega[idx]:
            idx += 1
        else:
            idx -= 1
        jumps += 1
        if idx <= 0:
            return idx, a_left, s_elapsed, jumps, state, HIT_LEFT
        if idx >= n - 1:
            return idx, a_left, s_elapsed, jumps, state, HIT_RIGHT


@njit(cache=True)
def walk_hit_segment(omega, mu, idx, state):
    """Rate-1 walk until it reaches index 0 or n-1.

    Returns (idx, elapsed, a_total, jumps, state, status) with the rate-1
    elapsed time and the accumulated functional A = sum mu * holding.
    """
    n = omega.shape[0]
    jumps = 0
    elapsed = 0.0
    a_total = 0.0
    while True:
        state, u = _next_u(state)
        e = -np.log(u)
        elapsed += e
        a_total += mu[idx] * e
        state, u = _next_u(state)
        if u <= omega[idx]:
            idx += 1
        else:
            idx -= 1
        jumps += 1
        if idx <= 0:
            return idx, elapsed, a_total, jumps, state, HIT_LEFT
        if idx >= n - 1:
            return idx, elapsed, a_total, jumps, state, HIT_RIGHT


@njit(cache=True)
def walk_record_segment(omega, mu, idx, time_left, state, sites, holds):
    """Holding-time walk recording (site, holding) per event into ring buffers.

    Returns (idx, time_left, jumps, state, status); status DONE also covers
    buffer exhaustion (caller compares jumps with buffer capacity).
    """
    n = omega.shape[0]
    cap = sites.shape[0]
    jumps = 0
    while jumps < cap:
        state, u = _next_u(state)
        hold = mu[idx] * (-np.log(u))
        if hold >= time_left:
            return idx, 0.0, jumps, state, DONE
        sites[jumps] = idx
        holds[jumps] = hold
        time_left -= hold
        state, u = _next_u(state)
        if u <= omega[idx]:
            idx += 1
        else:
            idx -= 1
        jumps += 1
        if idx <= 0:
            return idx, time_left, jumps, state, HIT_LEFT
        if idx >= n - 1:
            return idx, time_left, jumps, state, HIT_RIGHT
    return idx, time_left, jumps, state, DONE


@njit(cache=True)
def _uniformization_jit(up, down, stay, v0, weights):
    n = v0.shape[0]
    nterms = weights.shape[0]
    v = v0.copy()
    new = np.empty(n)
    acc = weights[0] * v
    for k in range(1, nterms):
        for j in range(n):
            new[j] = v[j] * stay[j]
        for j in range(1, n):
            new[j] += v[j - 1] * up[j - 1]
        for j in range(n - 1):
            new[j] += v[j + 1] * down[j + 1]
        for j in range(n):
            v[j] = new[j]
        w = weights[k]
        for j in range(n):
            acc[j] += w * v[j]
    return acc


def _uniformization_np(up, down, stay, v0, weights):
    v = v0.copy()
    acc = weights[0] * v
    for k in range(1, weights.shape[0]):
        new = v * stay
        new[1:] += v[:-1] * up[:-1]
        new[:-1] += v[1:] * down[1:]
        v = new
        acc += weights[k] * v
    return acc


def uniformization_accumulate(up, down, stay, v0, weights):
    """Poisson-weighted accumulation of powers of the uniformized kernel.

    up/down/stay are per-state one-step probabilities (rows sum to one);
    returns sum_k weights[k] * (v0 P^k).
    """
    if USE_NUMBA:
        return _uniformization_jit(up, down, stay, v0, weights)
    return _uniformization_np(up, down, stay, v0, weights)
