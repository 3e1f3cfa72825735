"""Holding-time tail laws.

A law is described through the exponent function g with
P(mu > r) = exp(-g(r)).  Supported families:

* ``pareto``  -- exact power tail (r/r0)^(-alpha) above a threshold r0,
  alpha > 1 (class with regularly varying e^g);
* ``log_pow`` -- g(r) = (log r)^beta for r >= 1, beta > 1;
* ``log_log`` -- g(r) = log r * loglog r for r >= e;
* ``weibull`` -- g(r) = r^alpha, alpha > 0 (stretched exponential).

Laws are served mean-one: the stored ``scale_m`` is the mean of the raw law
and the served variable is raw/m, so g_served(r) = g_raw(m * r).  The pareto
family bakes its threshold so the raw mean is exactly one (scale_m == 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import lambertw

from .errors import DomainError, NumericError

VARIANTS = ("pareto", "log_pow", "log_log", "weibull")

_E = math.e


@dataclass(frozen=True)
class TailLaw:
    """A holding-time distribution with tail exp(-g)."""

    variant: str
    alpha: float | None = None
    beta: float | None = None
    scale_m: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown tail law variant {self.variant!r}")
        if self.variant == "pareto":
            if self.alpha is None or self.alpha <= 1.0:
                raise DomainError("pareto needs alpha > 1")
        elif self.variant == "weibull":
            if self.alpha is None or self.alpha <= 0.0:
                raise DomainError("weibull needs alpha > 0")
        elif self.variant == "log_pow":
            if self.beta is None or self.beta <= 1.0:
                raise DomainError("log_pow needs beta > 1")
        if not (self.scale_m > 0.0 and math.isfinite(self.scale_m)):
            raise DomainError("scale_m must be positive and finite")

    # -- raw-law geometry ---------------------------------------------------

    @property
    def pareto_threshold(self) -> float:
        """Raw tail threshold r0 with mean r0*alpha/(alpha-1)."""
        if self.variant != "pareto":
            raise DomainError("threshold only defined for pareto laws")
        return (self.alpha - 1.0) / self.alpha

    def _g_raw(self, r):
        r = np.asarray(r, dtype=float)
        if self.variant == "pareto":
            r0 = self.pareto_threshold
            return np.where(r > r0, self.alpha * np.log(np.maximum(r, r0) / r0), 0.0)
        if self.variant == "weibull":
            return np.where(r > 0.0, np.maximum(r, 0.0) ** self.alpha, 0.0)
        if self.variant == "log_pow":
            lr = np.log(np.maximum(r, 1.0))
            return lr**self.beta
        lr = np.log(np.maximum(r, _E))
        return lr * np.log(lr)

    def _g_raw_inv(self, y):
        y = np.asarray(y, dtype=float)
        if self.variant == "pareto":
            r0 = self.pareto_threshold
            out = r0 * np.exp(y / self.alpha)
        elif self.variant == "weibull":
            out = y ** (1.0 / self.alpha)
        elif self.variant == "log_pow":
            out = np.exp(y ** (1.0 / self.beta))
        else:
            # solve x log x = y for x = log r via Lambert W
            out = np.exp(np.exp(np.real(lambertw(y))))
        return np.where(y > 0.0, out, 0.0)

    # -- served (mean-one scaled) law ---------------------------------------

    def g_eval(self, r):
        """-log P(mu > r) of the served law; 0 where the tail equals 1."""
        arr = np.asarray(r, dtype=float)
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise DomainError("g_eval needs finite r > 0")
        out = self._g_raw(self.scale_m * arr)
        return float(out) if np.isscalar(r) else out

    def g_inv(self, y):
        """Left-continuous inverse: smallest r with g_eval(r) >= y."""
        arr = np.asarray(y, dtype=float)
        if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
            raise DomainError("g_inv needs finite y >= 0")
        out = self._g_raw_inv(arr) / self.scale_m
        return float(out) if np.isscalar(y) else out

    def sample(self, rng, size=None):
        """Draw from the served law as g_inv(E), E ~ Exp(1)."""
        e = rng.standard_exponential(size)
        return self.g_inv(e)

    @property
    def stability_index(self) -> float | None:
        """The constant l bounding max mu / g_inv(log t), when finite."""
        return {
            "pareto": None,
            "log_pow": 1.0,
            "log_log": _E,
            "weibull": 1.0,
        }[self.variant]

    @property
    def cramer_holds(self) -> bool:
        """Whether E[exp(C mu)] is finite for some C > 0."""
        return self.variant == "weibull" and self.alpha >= 1.0

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        params = {}
        if self.alpha is not None:
            params["alpha"] = self.alpha
        if self.beta is not None:
            params["beta"] = self.beta
        return {"variant": self.variant, "params": params, "scale_m": self.scale_m}

    @classmethod
    def from_json(cls, obj: dict) -> "TailLaw":
        params = obj.get("params", {})
        return cls(
            variant=obj["variant"],
            alpha=params.get("alpha"),
            beta=params.get("beta"),
            scale_m=obj.get("scale_m", 1.0),
        )


def _raw_mean(law: TailLaw) -> float:
    """E[raw] = integral of exp(-g_raw) over (0, inf)."""
    if law.variant == "pareto":
        return law.pareto_threshold * law.alpha / (law.alpha - 1.0)
    if law.variant == "weibull":
        return math.gamma(1.0 + 1.0 / law.alpha)
    if law.variant == "log_pow":
        beta = law.beta
        val, err = integrate.quad(
            lambda x: math.exp(x - x**beta), 0.0, np.inf, epsrel=1e-10, epsabs=1e-12
        )
        mean = 1.0 + val
    else:
        val, err = integrate.quad(
            lambda x: math.exp(x - x * math.log(x)) if x > 1.0 else math.e,
            1.0,
            np.inf,
            epsrel=1e-10,
            epsabs=1e-12,
        )
        mean = _E + (val - 0.0)
    if not math.isfinite(mean) or err > 1e-8 * mean:
        raise NumericError(f"mean quadrature did not converge for {law.variant}")
    return mean


def make_mean_one(variant: str, alpha: float | None = None, beta: float | None = None) -> TailLaw:
    """Construct a law scaled to have mean exactly one."""
    raw = TailLaw(variant=variant, alpha=alpha, beta=beta, scale_m=1.0)
    return TailLaw(variant=variant, alpha=alpha, beta=beta, scale_m=_raw_mean(raw))


# Thin functional aliases matching the operation names used elsewhere.

def g_eval(law: TailLaw, r):
    return law.g_eval(r)


def g_inv(law: TailLaw, y):
    return law.g_inv(y)


def sample_mu(law: TailLaw, rng, size=None):
    return law.sample(rng, size)


def stability_index(law: TailLaw):
    return law.stability_index


def cramer_holds(law: TailLaw):
    return law.cramer_holds


def law_to_json_str(law: TailLaw) -> str:
    return json.dumps(law.to_json(), sort_keys=True)
