"""Deterministic rate machinery: h(t), the M(t) menu, and extreme-value bands.

h(t) is the largest h > 0 with t/h >= g(h) - log t; t/h(t) is the annealed
decay exponent, while the quenched exponents use inverse-g scales near log t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._bits import derive_key
from .errors import DomainError
from .laws import TailLaw

_E = math.e
_EE = math.exp(_E)

M_MODES = ("g_inv_minus", "g_inv_plus", "g_inv", "u_rho", "v_c")


@dataclass(frozen=True)
class RateEval:
    """Rate-scale evaluations at one time t."""

    t: float
    h: float
    m_values: dict
    exponent_quenched_upper_scale: float   # t / g_inv((1+eps) log t)
    exponent_quenched_lower_scale: float   # t / g_inv((1-eps) log t)
    exponent_annealed: float               # t / h(t)
    eps: float


def _phi(law: TailLaw, t: float, h) -> np.ndarray:
    return t / np.asarray(h, dtype=float) - law.g_eval(h) + math.log(t)


def solve_h(law: TailLaw, t: float) -> float:
    """Largest h > 0 with t/h >= g(h) - log t, by scan plus bisection."""
    if not (t > 1.0):
        raise DomainError("t must exceed 1")
    log_t = math.log(t)
    if _phi(law, t, log_t) < 0.0:
        raise DomainError(f"t = {t} too small: no admissible h at h = log t")
    if _phi(law, t, t) >= 0.0:
        # inequality still holds at h = t; treat as out of asymptotic regime
        raise DomainError(f"t = {t} too small: inequality holds up to h = t")
    # scan downward from t for the highest sign change
    grid = np.geomspace(t, log_t, 512)
    vals = _phi(law, t, grid)
    pos = np.nonzero(vals >= 0.0)[0]
    hi = grid[pos[0] - 1]   # phi < 0 here
    lo = grid[pos[0]]       # phi >= 0 here
    while (hi - lo) > 1e-9 * hi:
        mid = 0.5 * (lo + hi)
        if _phi(law, t, mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return float(lo)


def check_h_slack(law: TailLaw, t: float) -> bool:
    """Whether t/h(t) <= 2 (g(h(t)) - log t), i.e. near-equality at the root."""
    h = solve_h(law, t)
    return t / h <= 2.0 * (law.g_eval(h) - math.log(t))


def u_rho(law: TailLaw, t: float, rho: float) -> float:
    """Upper extreme-value band (t log t loglog t)^(1/a) (logloglog t)^(1/a+rho)."""
    if law.variant != "pareto":
        raise DomainError("u_rho is defined for pareto laws")
    if t <= _EE:
        raise DomainError("u_rho needs t > e^e")
    alpha = law.alpha
    lll = math.log(math.log(math.log(t)))
    return (t * math.log(t) * math.log(math.log(t))) ** (1.0 / alpha) * lll ** (
        1.0 / alpha + rho
    )


def v_c(law: TailLaw, t: float, c: float) -> float:
    """Lower extreme-value band c (t / loglog t)^(1/a)."""
    if law.variant != "pareto":
        raise DomainError("v_c is defined for pareto laws")
    if t <= _E:
        raise DomainError("v_c needs t > e")
    return c * (t / math.log(math.log(t))) ** (1.0 / law.alpha)


def m_quenched(law: TailLaw, t: float, mode: str, eps: float = 0.1, rho: float = 0.1, c: float = 0.5) -> float:
    """One entry of the M(t) menu of quenched decay scales."""
    if mode not in M_MODES:
        raise DomainError(f"unknown M(t) mode {mode!r}")
    if t <= 1.0:
        raise DomainError("t must exceed 1")
    if mode == "g_inv_minus":
        return law.g_inv((1.0 - eps) * math.log(t))
    if mode == "g_inv_plus":
        return law.g_inv((1.0 + eps) * math.log(t))
    if mode == "g_inv":
        if law.stability_index is None:
            raise DomainError("g_inv(log t) mode needs a stable law")
        return law.g_inv(math.log(t))
    if mode == "u_rho":
        if t <= _EE:
            raise DomainError("u_rho needs t > e^e")
        return u_rho(law, t, rho)
    if t <= _E:
        raise DomainError("v_c needs t > e")
    return v_c(law, t, c)


def predicted_exponents(law: TailLaw, t: float, v: float, eps: float) -> tuple[float, float, float]:
    """(t/g_inv((1+eps)log t), t/g_inv((1-eps)log t), t/h(t)).

    The first two bracket the quenched -log probability; the last is the
    annealed scale.  v is accepted for interface symmetry; the scales do not
    depend on it.
    """
    if not (0.0 <= eps < 1.0):
        raise DomainError("eps must lie in [0, 1)")
    log_t = math.log(t)
    upper_scale = t / law.g_inv((1.0 + eps) * log_t)
    lower_scale = t / law.g_inv((1.0 - eps) * log_t)
    return upper_scale, lower_scale, t / solve_h(law, t)


def rate_eval(law: TailLaw, t: float, eps: float = 0.1, rho: float = 0.1, c: float = 0.5) -> RateEval:
    """All rate scales at time t (CSV-friendly)."""
    m_values = {}
    for mode in M_MODES:
        try:
            m_values[mode] = m_quenched(law, t, mode, eps=eps, rho=rho, c=c)
        except DomainError:
            m_values[mode] = None
    upper, lower, annealed = predicted_exponents(law, t, v=0.0, eps=eps)
    return RateEval(
        t=t,
        h=solve_h(law, t),
        m_values=m_values,
        exponent_quenched_upper_scale=upper,
        exponent_quenched_lower_scale=lower,
        exponent_annealed=annealed,
        eps=eps,
    )


@dataclass(frozen=True)
class RunningMaxReport:
    """Pass fractions for the running-maximum acceptance bands."""

    n: int
    trials: int
    frac_in_eps_band: float
    frac_in_stable_band: float | None
    frac_in_pareto_band: float | None
    eps: float
    slack: float

    def passed(self, eps_threshold: float = 0.95, pareto_threshold: float = 0.9) -> bool:
        ok = self.frac_in_eps_band >= eps_threshold
        if self.frac_in_pareto_band is not None:
            ok = ok and self.frac_in_pareto_band >= pareto_threshold
        return ok


def running_max_check(
    law: TailLaw,
    n: int,
    trials: int,
    master_seed: int,
    eps: float = 0.3,
    slack: float = 0.25,
    rho: float = 0.1,
    c: float = 0.5,
) -> RunningMaxReport:
    """Monte Carlo check of the extreme-value bands for max of n draws.

    The eventual-a.s. band statements are recast as finite-n pass fractions.
    For pareto laws the u_rho/v_c band applies to the maximum expressed in
    units of the served tail threshold (tail exactly z^-alpha there).
    """
    if n < 1000:
        raise DomainError("need n >= 1000")
    log_n = math.log(n)
    lo_eps = law.g_inv((1.0 - eps) * log_n)
    hi_eps = law.g_inv((1.0 + eps) * log_n)
    l = law.stability_index
    if l is not None:
        g_log = law.g_inv(log_n)
        lo_st = g_log * (1.0 - slack) / l
        hi_st = g_log * (1.0 + slack) * l
    if law.variant == "pareto":
        scale = law.pareto_threshold / law.scale_m  # served tail threshold
        lo_p = v_c(law, float(n), c)
        hi_p = u_rho(law, float(n), rho)

    in_eps = in_st = in_p = 0
    for trial in range(trials):
        rng = np.random.default_rng(int(derive_key(master_seed, trial)))
        m = -np.inf
        remaining = n
        while remaining > 0:
            take = min(remaining, 2_000_000)
            m = max(m, float(np.max(law.sample(rng, take))))
            remaining -= take
        if lo_eps <= m <= hi_eps:
            in_eps += 1
        if l is not None and lo_st <= m <= hi_st:
            in_st += 1
        if law.variant == "pareto" and lo_p <= m / scale <= hi_p:
            in_p += 1
    return RunningMaxReport(
        n=n,
        trials=trials,
        frac_in_eps_band=in_eps / trials,
        frac_in_stable_band=(in_st / trials) if l is not None else None,
        frac_in_pareto_band=(in_p / trials) if law.variant == "pareto" else None,
        eps=eps,
        slack=slack,
    )
