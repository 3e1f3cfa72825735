import numpy as np

from rwre_slowdown.environment import Environment, OmegaLaw
from rwre_slowdown.laws import make_mean_one


class ConstMuEnvironment(Environment):
    """Environment with mu pinned to a constant (holding times mu * Exp(1)).

    Used for closed-form checks; the degenerate mu law is deliberately not
    part of the tail-law menu, so tests build it by overriding generation.
    """

    def __init__(self, omega_law, mu_value=1.0, master_seed=0):
        super().__init__(omega_law, make_mean_one("weibull", alpha=1.0), master_seed)
        self._mu_value = float(mu_value)

    def _generate(self, xs):
        omega, mu = super()._generate(xs)
        return omega, np.full_like(mu, self._mu_value)


def homogeneous_env(p=0.75, mu_value=1.0, master_seed=0):
    return ConstMuEnvironment(OmegaLaw(variant="deterministic", p=p), mu_value, master_seed)
