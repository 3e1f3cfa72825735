"""Slowdown probabilities for biased random walks in random environment
with random holding times.

The walk jumps right from x at rate omega(x)/mu(x) and left at rate
(1 - omega(x))/mu(x); both omega and the mean holding time mu are i.i.d.
over sites.  The toolkit brackets the slowdown probability P(X_t < v t)
with exact lower/upper bounds, certifies them against a uniformization
oracle at desk scales, estimates them by Monte Carlo (with a planted
importance sampler on the annealed side), and evaluates the predicted
decay rates.
"""

__version__ = "0.1.0"

from .asym import (
    RateEval,
    RunningMaxReport,
    check_h_slack,
    m_quenched,
    predicted_exponents,
    rate_eval,
    running_max_check,
    solve_h,
    u_rho,
    v_c,
)
from .environment import Environment, OmegaLaw, rho_mean, solomon_speed
from .errors import (
    ConfigError,
    DomainError,
    NumericError,
    ToolkitError,
    WindowTooSmallError,
)
from .exact import (
    BoundBracket,
    DecayConstants,
    FKQuery,
    SlowdownQuery,
    chebyshev_ub,
    decay_constants,
    exit_time,
    expected_hitting_time_right,
    fk_functional,
    green_column,
    green_interval,
    green_row,
    hitting_prob_left,
    homogeneous_mgf,
    make_query,
    slowdown_lower_bound,
    slowdown_upper_bound,
    uniformization_distribution,
    uniformization_slowdown,
    weights_c,
)
from .experiments import (
    ExperimentConfig,
    PlantedEstimate,
    TailExperimentConfig,
    planted_annealed_estimate,
    run_annealed_experiment,
    run_quenched_experiment,
    run_tail_lemma_experiment,
)
from .laws import TailLaw, make_mean_one
from .sim import (
    EstimateCI,
    SimOutcome,
    estimate_slowdown,
    estimate_speed,
    hitting_time_right,
    simulate_timechange,
    simulate_x,
    wilson_interval,
)

__all__ = [
    "__version__",
    "BoundBracket",
    "ConfigError",
    "DecayConstants",
    "DomainError",
    "Environment",
    "EstimateCI",
    "ExperimentConfig",
    "FKQuery",
    "NumericError",
    "OmegaLaw",
    "PlantedEstimate",
    "RateEval",
    "RunningMaxReport",
    "SimOutcome",
    "SlowdownQuery",
    "TailExperimentConfig",
    "TailLaw",
    "ToolkitError",
    "WindowTooSmallError",
    "check_h_slack",
    "chebyshev_ub",
    "decay_constants",
    "estimate_slowdown",
    "estimate_speed",
    "exit_time",
    "expected_hitting_time_right",
    "fk_functional",
    "green_column",
    "green_interval",
    "green_row",
    "hitting_prob_left",
    "hitting_time_right",
    "homogeneous_mgf",
    "m_quenched",
    "make_mean_one",
    "make_query",
    "planted_annealed_estimate",
    "predicted_exponents",
    "rate_eval",
    "rho_mean",
    "run_annealed_experiment",
    "run_quenched_experiment",
    "run_tail_lemma_experiment",
    "running_max_check",
    "simulate_timechange",
    "simulate_x",
    "slowdown_lower_bound",
    "slowdown_upper_bound",
    "solomon_speed",
    "solve_h",
    "u_rho",
    "uniformization_distribution",
    "uniformization_slowdown",
    "v_c",
    "weights_c",
    "wilson_interval",
]
