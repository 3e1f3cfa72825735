"""Counter-based pseudo-random primitives.

All randomness in the toolkit is derived from a splitmix64-style finalizer
applied to (seed, counter) pairs, so any value can be regenerated from its
coordinates alone, in any order.  The vectorized helpers here serve the
environment realization and the pure-numpy code paths; the simulation kernels
inline the same finalizer so that both backends produce identical streams.
"""

import numpy as np

MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

# Distinct salts keep the per-site sub-streams for omega and mu disjoint.
SLOT_OMEGA = np.uint64(0x2545F4914F6CDD1D)
SLOT_MU = np.uint64(0x9E6C63D0876A90BD)
_SLOTS = (SLOT_OMEGA, SLOT_MU)


def mix64(z):
    """splitmix64 finalizer; accepts np.uint64 scalars or arrays."""
    z = (z + GOLDEN) & MASK64
    z = ((z ^ (z >> _S30)) * _M1) & MASK64
    z = ((z ^ (z >> _S27)) * _M2) & MASK64
    return z ^ (z >> _S31)


def site_uniform(seed, xs, slot):
    """Uniform(0, 1] draws keyed by (seed, site index, slot).

    ``xs`` may be an int or an integer array; negative site indices wrap
    through two's complement, which is fine for keying purposes.
    """
    with np.errstate(over="ignore"):
        z = np.asarray(xs).astype(np.int64).view(np.uint64)
        z = mix64(z * _M2 + np.uint64(seed) + _SLOTS[slot])
        z = mix64(z)
    return ((z >> _S11) + _ONE) * _INV53


def derive_key(master_seed, index):
    """Key for an independent sub-stream (replica, worker, ...)."""
    with np.errstate(over="ignore"):
        a = mix64(np.uint64(master_seed))
        b = mix64(np.uint64(np.int64(index)).astype(np.uint64) * _M1 + a)
    return np.uint64(b)


def stream_next(state):
    """Advance a sequential stream; returns (new_state, uniform in (0, 1])."""
    with np.errstate(over="ignore"):
        state = (state + GOLDEN) & MASK64
        z = mix64(state)
    return state, float((z >> _S11) + _ONE) * _INV53
