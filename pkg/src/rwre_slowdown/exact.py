"""Deterministic quenched computations on a fixed environment.

Everything here is exact (up to certified truncation/series tolerances) for
the realized window of one environment: backtracking probabilities, expected
hitting times, Green functions of the killed rate-1 walk, the exponential
functional solved by monotone fixed-point iteration, the slowdown bound
bracket, and a uniformization oracle for the transient distribution.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.stats import poisson

from ._kernels import uniformization_accumulate
from .environment import Environment, OmegaLaw, solomon_speed
from .errors import DomainError, NumericError, WindowTooSmallError

FK_DIVERGENCE_CAP = 1e12
FK_REL_TOL = 1e-12
FK_MAX_SWEEPS = 200_000


@dataclass(frozen=True)
class SlowdownQuery:
    """Parameters (t, v, u, eps, delta) of one slowdown evaluation."""

    t: float
    v: float
    u: float
    eps: float
    delta: float
    v_p: float

    def __post_init__(self):
        if not (self.t > 0.0):
            raise DomainError("t must be positive")
        if not (0.0 < self.v < self.u < self.v_p):
            raise DomainError("need 0 < v < u < v_P")
        if not (0.0 < self.eps < self.v_p - self.u):
            raise DomainError("need 0 < eps < v_P - u")
        if not (0.0 < self.delta < 1.0):
            raise DomainError("delta must lie in (0, 1)")


def make_query(omega_law: OmegaLaw, t: float, v: float, u=None, eps=None, delta=None) -> SlowdownQuery:
    """Fill in the default (u, eps, delta) choices for a slowdown query."""
    v_p = solomon_speed(omega_law)
    if not (0.0 < v < v_p):
        raise DomainError(f"v must lie in (0, v_P) = (0, {v_p})")
    if u is None:
        u = 0.5 * (v + v_p)
    if eps is None:
        eps = 0.25 * (v_p - u)
    if delta is None:
        delta = 1.0 - (u + eps) / v_p - 0.05
        delta = min(max(delta, 1e-3), 0.999)
    return SlowdownQuery(t=t, v=v, u=u, eps=eps, delta=delta, v_p=v_p)


@dataclass(frozen=True)
class DecayConstants:
    """Geometric decay data determined by the essential infimum of omega."""

    c1: float
    c2: float
    p_floor: float

    def eta(self, eps: float) -> float:
        """Excess of the homogeneous crossing-time MGF at the floor bias."""
        return homogeneous_mgf(self.p_floor, eps) - 1.0


@dataclass(frozen=True)
class BoundBracket:
    """Lower/upper slowdown bounds plus optional oracle and MC values."""

    lower: float
    upper: float
    oracle: float | None = None
    mc_estimate: float | None = None
    mc_ci: tuple[float, float] | None = None

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "oracle": self.oracle,
            "mc_estimate": self.mc_estimate,
            "mc_ci_lo": None if self.mc_ci is None else self.mc_ci[0],
            "mc_ci_hi": None if self.mc_ci is None else self.mc_ci[1],
        }

    CSV_COLUMNS = ("lower", "upper", "oracle", "mc_estimate", "mc_ci_lo", "mc_ci_hi")

    def csv_row(self) -> list:
        d = self.to_json()
        return [d[c] for c in self.CSV_COLUMNS]


# ---------------------------------------------------------------------------
# hitting quantities
# ---------------------------------------------------------------------------

def _backtrack_probs(env: Environment, z_lo: int, z_hi: int, depth: int) -> np.ndarray:
    """q_z = P_z(hit z-1) for z in [z_lo, z_hi], truncated at z_hi + depth."""
    p_floor = env.omega_law.essinf
    omega = env.omega(z_lo, z_hi + depth)
    q = (1.0 - p_floor) / p_floor  # homogeneous floor value seeds the recursion
    out = np.empty(z_hi - z_lo + 1)
    for i in range(omega.shape[0] - 1, -1, -1):
        q = (1.0 - omega[i]) / (1.0 - omega[i] * q)
        if i <= z_hi - z_lo:
            out[i] = q
    return out


def hitting_prob_left(env: Environment, x: int, y: int) -> float:
    """P_x(hit y at some time) for y <= x, from per-site backtrack products."""
    if y > x:
        raise DomainError("hitting_prob_left needs y <= x")
    if y == x:
        return 1.0
    depth = 64
    prev = None
    while True:
        q = _backtrack_probs(env, y + 1, x, depth)
        val = float(np.exp(np.sum(np.log(q))))
        if prev is not None and abs(val - prev) <= 1e-13 * max(val, 1e-300):
            return val
        prev = val
        depth *= 2
        if depth > 1 << 20:
            raise NumericError("backtrack truncation failed to stabilize")


def expected_hitting_time_right(env: Environment, x: int, y: int) -> float:
    """E_x[H(y)] for the embedded rate-1 walk, y > x, certified truncation."""
    if y <= x:
        raise DomainError("expected_hitting_time_right needs y > x")
    p_floor = env.omega_law.essinf
    depth = 64
    prev = None
    while True:
        omega = env.omega(x - depth, y - 1)
        t_cross = 1.0 / (2.0 * p_floor - 1.0)
        total = 0.0
        for i in range(omega.shape[0]):
            t_cross = (1.0 + (1.0 - omega[i]) * t_cross) / omega[i]
            if i >= depth:
                total += t_cross
        if prev is not None and abs(total - prev) <= 1e-10 * max(total, 1.0):
            return total
        prev = total
        depth *= 2
        if depth > 1 << 20:
            raise NumericError("hitting-time truncation failed to stabilize")


# ---------------------------------------------------------------------------
# Green functions on an interval
# ---------------------------------------------------------------------------

def _banded_system(env: Environment, a: int, b: int):
    """(I - P) for the interior of (a, b) in solve_banded layout."""
    n = b - a - 1
    if n < 1:
        raise DomainError("interval (a, b) has empty interior")
    omega = env.omega(a + 1, b - 1)
    ab = np.zeros((3, n))
    ab[0, 1:] = -omega[:-1]            # super: z -> z+1 moves with prob omega(z)
    ab[1, :] = 1.0
    ab[2, :-1] = -(1.0 - omega[1:])    # sub: z -> z-1
    return ab, n


def green_column(env: Environment, a: int, b: int, y: int) -> np.ndarray:
    """G_{(a,b)}(. , y) over interior sites a+1..b-1."""
    ab, n = _banded_system(env, a, b)
    if not (a < y < b):
        raise DomainError("y must be interior to (a, b)")
    e = np.zeros(n)
    e[y - a - 1] = 1.0
    return solve_banded((1, 1), ab, e)


def green_row(env: Environment, a: int, b: int, x: int) -> np.ndarray:
    """G_{(a,b)}(x, .) over interior sites a+1..b-1 (one adjoint solve)."""
    ab, n = _banded_system(env, a, b)
    if not (a < x < b):
        raise DomainError("x must be interior to (a, b)")
    # transpose swaps the off-diagonals
    abt = np.zeros((3, n))
    abt[1, :] = 1.0
    abt[0, 1:] = ab[2, :-1]
    abt[2, :-1] = ab[0, 1:]
    e = np.zeros(n)
    e[x - a - 1] = 1.0
    return solve_banded((1, 1), abt, e)


def green_interval(env: Environment, a: int, b: int, x: int, y: int) -> float:
    """Expected time at y before exiting (a, b), starting from x (rate-1)."""
    col = green_column(env, a, b, y)
    if not (a < x < b):
        raise DomainError("x must be interior to (a, b)")
    val = float(col[x - a - 1])
    if not math.isfinite(val):
        raise NumericError("green solve produced a non-finite value")
    return val


def exit_time(env: Environment, a: int, b: int, x: int) -> float:
    """E_x[H(a) wedge H(b)] for the rate-1 walk."""
    ab, n = _banded_system(env, a, b)
    if not (a < x < b):
        raise DomainError("x must be interior to (a, b)")
    s = solve_banded((1, 1), ab, np.ones(n))
    return float(s[x - a - 1])


def weights_c(env: Environment, a: int, right: int) -> np.ndarray:
    """c(y) = sum over x in (y, right] of G_{(a,x)}(x-1, y), y in (a, right)."""
    if right <= a + 1:
        raise DomainError("need right > a + 1")
    c = np.zeros(right - a - 1)
    for x in range(a + 2, right + 1):
        row = green_row(env, a, x, x - 1)  # y = a+1..x-1
        c[: x - a - 1] += row
    return c


# ---------------------------------------------------------------------------
# exponential functional (Feynman-Kac fixed point)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FKQuery:
    """Potential multiplier and interval for the exponential functional."""

    lam: float
    a: int
    y: int

    def __post_init__(self):
        if self.lam < 0.0 or not math.isfinite(self.lam):
            raise DomainError("lam must be finite and >= 0")
        if self.y <= self.a + 1:
            raise DomainError("interval (a, y) must have interior sites")


def fk_functional(env: Environment, q: FKQuery, x: int) -> float:
    """E_x[exp(lam * A(H(y) wedge H(a)))] or inf when the moment diverges.

    Computed as the minimal fixed point of the monotone sweep started from
    the constant 1; divergence (any entry above the cap, or failure to
    contract within the sweep budget) is reported as math.inf.
    """
    a, y, lam = q.a, q.y, q.lam
    if not (a <= x <= y):
        raise DomainError("x must lie in [a, y]")
    if x == a or x == y:
        return 1.0
    if lam == 0.0:
        return 1.0
    omega = env.omega(a + 1, y - 1)
    mu = env.mu(a + 1, y - 1)
    denom = 1.0 - lam * mu
    if np.any(denom <= 0.0):
        return math.inf
    u = np.ones(omega.shape[0])
    right = np.empty_like(u)
    left = np.empty_like(u)
    for _ in range(FK_MAX_SWEEPS):
        right[:-1] = u[1:]
        right[-1] = 1.0
        left[1:] = u[:-1]
        left[0] = 1.0
        new = (omega * right + (1.0 - omega) * left) / denom
        if np.max(new) > FK_DIVERGENCE_CAP:
            return math.inf
        if np.max((new - u) / u) < FK_REL_TOL:
            return float(new[x - a - 1])
        u = new
    return math.inf


# ---------------------------------------------------------------------------
# slowdown bounds
# ---------------------------------------------------------------------------

def chebyshev_ub(env: Environment, sq: SlowdownQuery) -> float:
    """min over lam of exp(-lam t) E_0[exp(lam A(H(ut) wedge H(-eps t)))]."""
    a = -int(math.ceil(sq.eps * sq.t))
    yt = int(math.ceil(sq.u * sq.t))
    if yt <= 1 or a >= -1:
        return 1.0
    mu_max = float(np.max(env.mu(a + 1, yt - 1)))

    def value(lam: float) -> float:
        f = fk_functional(env, FKQuery(lam=lam, a=a, y=yt), 0)
        if not math.isfinite(f):
            return math.inf
        return math.exp(-lam * sq.t) * f

    grid = np.geomspace(1e-6 / mu_max, 0.999 / mu_max, 32)
    vals = np.array([value(l) for l in grid])
    if not np.any(np.isfinite(vals)):
        return 1.0
    i = int(np.nanargmin(np.where(np.isfinite(vals), vals, np.nan)))
    lo = grid[i - 1] if i > 0 else grid[i] * 0.5
    hi = grid[i + 1] if i < len(grid) - 1 else grid[i]
    # golden-section refinement on [lo, hi]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = value(x1), value(x2)
    while (hi - lo) > 1e-6 * hi:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = value(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = value(x2)
    best = min(float(np.min(vals[np.isfinite(vals)])), f1, f2)
    return min(best, 1.0)


def slowdown_upper_bound(env: Environment, sq: SlowdownQuery) -> float:
    """Three-term decomposition bound on P(X_t < vt), capped at one."""
    ut = int(math.ceil(sq.u * sq.t))
    vt = int(math.ceil(sq.v * sq.t))
    et = int(math.ceil(sq.eps * sq.t))
    backtrack = hitting_prob_left(env, ut, vt) if ut > vt else 1.0
    left_escape = hitting_prob_left(env, 0, -et) if et > 0 else 1.0
    return min(1.0, backtrack + chebyshev_ub(env, sq) + left_escape)


def slowdown_lower_bound(env: Environment, t: float, v: float) -> float:
    """P(first holding at the max-mu site in [0, ceil(vt)-1] exceeds t)."""
    if v * t < 1.0:
        raise DomainError("need vt >= 1")
    hi = int(math.ceil(v * t)) - 1
    mu_max = float(np.max(env.mu(0, hi)))
    return math.exp(-t / mu_max)


# ---------------------------------------------------------------------------
# uniformization oracle
# ---------------------------------------------------------------------------

def uniformization_distribution(env: Environment, t: float, window: tuple[int, int], tol: float = 1e-8):
    """Transient distribution of X_t on a truncated window, started at 0.

    The window edges absorb; their terminal mass is the certified truncation
    leak.  Returns (states, probabilities, leak).
    """
    lo, hi = int(window[0]), int(window[1])
    if not (lo < 0 < hi):
        raise DomainError("window must contain the origin strictly inside")
    if t < 0.0:
        raise DomainError("t must be >= 0")
    states = np.arange(lo, hi + 1)
    n = states.shape[0]
    v0 = np.zeros(n)
    v0[-lo] = 1.0
    if t == 0.0:
        return states, v0, 0.0
    omega = env.omega(lo, hi)
    mu = env.mu(lo, hi)
    rate = 1.0 / mu
    rate[0] = 0.0
    rate[-1] = 0.0
    lam = float(np.max(rate))
    if lam * t > 5e7:
        raise NumericError("uniformization rate bound too large for this window")
    up = omega * rate / lam
    down = (1.0 - omega) * rate / lam
    stay = 1.0 - up - down
    nterms = int(poisson.isf(tol / 4.0, lam * t)) + 2
    weights = poisson.pmf(np.arange(nterms), lam * t)
    dist = uniformization_accumulate(up, down, stay, v0, weights)
    dist = np.maximum(dist, 0.0)
    leak = float(dist[0] + dist[-1]) + float(max(0.0, 1.0 - weights.sum()))
    return states, dist, leak


def uniformization_slowdown(env: Environment, t: float, threshold: int, window: tuple[int, int], tol: float = 1e-8) -> float:
    """Exact P(X_t < threshold) within +- tol on a certified window."""
    lo, hi = int(window[0]), int(window[1])
    if not (lo < threshold <= hi):
        raise DomainError("threshold must lie inside the window")
    states, dist, leak = uniformization_distribution(env, t, (lo, hi), tol)
    if leak > tol:
        raise WindowTooSmallError(
            f"window {window} leaks {leak:.3e} > tol {tol:.3e} by time {t}"
        )
    return float(dist[states < threshold].sum())


# ---------------------------------------------------------------------------
# homogeneous closed forms
# ---------------------------------------------------------------------------

def homogeneous_mgf(p: float, theta: float) -> float:
    """E[exp(theta H(+1))] for the homogeneous rate-1 walk with bias p."""
    if not (0.5 < p < 1.0):
        raise DomainError("p must lie in (1/2, 1)")
    cap = 1.0 - 2.0 * math.sqrt(p * (1.0 - p))
    if theta >= cap:
        raise DomainError(f"theta must be below {cap} for a finite moment")
    disc = (1.0 - theta) ** 2 - 4.0 * p * (1.0 - p)
    return ((1.0 - theta) - math.sqrt(disc)) / (2.0 * (1.0 - p))


def decay_constants(law: OmegaLaw) -> DecayConstants:
    """Geometric bound constants at the essential infimum of omega."""
    p = law.essinf
    return DecayConstants(
        c1=1.0 / (2.0 * p - 1.0),
        c2=math.log(p / (1.0 - p)),
        p_floor=p,
    )


def bracket_json_str(bracket: BoundBracket) -> str:
    return json.dumps(bracket.to_json(), sort_keys=True)
