"""Reproducible random environments on the integer lattice.

Each site x carries a transition probability omega(x) in (1/2, 1) and a mean
holding time mu(x) > 0.  Values are functions of (master_seed, x) alone via
counter-based hashing, so any window can be regenerated identically in any
access order.  Omega and mu use disjoint sub-streams: changing the tail law
never changes omega for a fixed seed.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from ._bits import site_uniform
from .errors import DomainError
from .laws import TailLaw

OMEGA_VARIANTS = ("deterministic", "uniform", "two_point")


@dataclass(frozen=True)
class OmegaLaw:
    """Distribution of the per-site transition probability omega."""

    variant: str
    p: float | None = None          # deterministic
    a: float | None = None          # uniform support [a, b]
    b: float | None = None
    p1: float | None = None         # two_point values and weight of p1
    p2: float | None = None
    q: float | None = None

    def __post_init__(self):
        if self.variant not in OMEGA_VARIANTS:
            raise DomainError(f"unknown omega law variant {self.variant!r}")
        lo, hi = self.essinf, self.esssup
        if not (0.5 < lo <= hi < 1.0):
            raise DomainError("omega support must lie in (1/2, 1)")
        if self.variant == "two_point" and not (0.0 <= self.q <= 1.0):
            raise DomainError("two_point weight q must lie in [0, 1]")

    @property
    def essinf(self) -> float:
        if self.variant == "deterministic":
            return self.p
        if self.variant == "uniform":
            return self.a
        return min(self.p1, self.p2)

    @property
    def esssup(self) -> float:
        if self.variant == "deterministic":
            return self.p
        if self.variant == "uniform":
            return self.b
        return max(self.p1, self.p2)

    def from_uniform(self, u):
        """Map Uniform(0,1] draws to omega values."""
        if self.variant == "deterministic":
            return np.full_like(np.asarray(u, dtype=float), self.p)
        if self.variant == "uniform":
            return self.a + (self.b - self.a) * np.asarray(u, dtype=float)
        return np.where(np.asarray(u, dtype=float) <= self.q, self.p1, self.p2)

    def to_json(self) -> dict:
        out = {"variant": self.variant}
        for k in ("p", "a", "b", "p1", "p2", "q"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "OmegaLaw":
        kwargs = {k: obj[k] for k in ("p", "a", "b", "p1", "p2", "q") if k in obj}
        return cls(variant=obj["variant"], **kwargs)


def rho_mean(law: OmegaLaw) -> float:
    """E[(1 - omega)/omega], computed analytically per variant."""
    if law.variant == "deterministic":
        return (1.0 - law.p) / law.p
    if law.variant == "uniform":
        return math.log(law.b / law.a) / (law.b - law.a) - 1.0
    return law.q * (1.0 - law.p1) / law.p1 + (1.0 - law.q) * (1.0 - law.p2) / law.p2


def solomon_speed(law: OmegaLaw) -> float:
    """Asymptotic linear speed (1 - E[rho]) / (1 + E[rho])."""
    rho = rho_mean(law)
    return (1.0 - rho) / (1.0 + rho)


class Environment:
    """Lazily realized window of (omega, mu) pairs keyed by a master seed."""

    def __init__(
        self,
        omega_law: OmegaLaw,
        tail_law: TailLaw,
        master_seed: int,
        mu_overrides: dict[int, float] | None = None,
    ):
        self.omega_law = omega_law
        self.tail_law = tail_law
        self.master_seed = int(master_seed) & 0xFFFFFFFFFFFFFFFF
        self.mu_overrides = dict(mu_overrides or {})
        for x, m in self.mu_overrides.items():
            if not (m > 0.0 and math.isfinite(m)):
                raise DomainError(f"mu override at {x} must be positive")
        self._lo = 0  # realized window [_lo, _hi), empty when _lo == _hi
        self._hi = 0
        self._omega = np.empty(0)
        self._mu = np.empty(0)

    # -- realization --------------------------------------------------------

    def _generate(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        u_omega = site_uniform(self.master_seed, xs, 0)
        u_mu = site_uniform(self.master_seed, xs, 1)
        omega = self.omega_law.from_uniform(u_omega)
        # u in (0, 1] so -log(u) is Exp(1); keep it strictly positive
        mu = self.tail_law.g_inv(np.maximum(-np.log(u_mu), 1e-300))
        for x, m in self.mu_overrides.items():
            hit = np.nonzero(xs == x)[0]
            if hit.size:
                mu[hit] = m
        return omega, mu

    def ensure_window(self, lo: int, hi: int) -> None:
        """Extend the realized window to cover [lo, hi] inclusive."""
        lo, hi = int(lo), int(hi) + 1
        if self._lo == self._hi:
            xs = np.arange(lo, hi)
            self._omega, self._mu = self._generate(xs)
            self._lo, self._hi = lo, hi
            return
        if lo < self._lo:
            xs = np.arange(lo, self._lo)
            om, mu = self._generate(xs)
            self._omega = np.concatenate([om, self._omega])
            self._mu = np.concatenate([mu, self._mu])
            self._lo = lo
        if hi > self._hi:
            xs = np.arange(self._hi, hi)
            om, mu = self._generate(xs)
            self._omega = np.concatenate([self._omega, om])
            self._mu = np.concatenate([self._mu, mu])
            self._hi = hi

    @property
    def window(self) -> tuple[int, int]:
        """Realized inclusive window bounds; meaningless when empty."""
        return self._lo, self._hi - 1

    def site(self, x: int) -> tuple[float, float]:
        """(omega(x), mu(x)), extending the window if needed."""
        if self._lo == self._hi:
            self.ensure_window(x, x)
        else:
            self.ensure_window(min(x, self._lo), max(x, self._hi - 1))
        i = x - self._lo
        return float(self._omega[i]), float(self._mu[i])

    def omega(self, lo: int, hi: int) -> np.ndarray:
        """omega values over [lo, hi] inclusive (a copy-free view)."""
        self.ensure_window(lo, hi)
        return self._omega[lo - self._lo : hi - self._lo + 1]

    def mu(self, lo: int, hi: int) -> np.ndarray:
        """mu values over [lo, hi] inclusive."""
        self.ensure_window(lo, hi)
        return self._mu[lo - self._lo : hi - self._lo + 1]

    def with_mu_override(self, overrides: dict[int, float]) -> "Environment":
        """Copy of this environment with some mu values replaced (planting)."""
        merged = dict(self.mu_overrides)
        merged.update(overrides)
        return Environment(self.omega_law, self.tail_law, self.master_seed, merged)

    # -- export -------------------------------------------------------------

    def header_json(self) -> dict:
        return {
            "omega_law": self.omega_law.to_json(),
            "tail_law": self.tail_law.to_json(),
            "master_seed": self.master_seed,
        }

    def write_window_csv(self, path, lo: int, hi: int) -> None:
        self.ensure_window(lo, hi)
        with open(path, "w", newline="") as fh:
            fh.write("# environment window: %s\n" % json.dumps(self.header_json(), sort_keys=True))
            writer = csv.writer(fh)
            writer.writerow(["x", "omega", "mu"])
            for x in range(lo, hi + 1):
                i = x - self._lo
                writer.writerow([x, repr(float(self._omega[i])), repr(float(self._mu[i]))])
