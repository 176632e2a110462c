"""Competitive reaction-diffusion toolkit for a two-habitat environment.

Solves the two- and three-species competition systems and the reduced
scalar equation on an interval, and independently constructs the
equilibria, invasion criteria, threshold bubbles and stationary fronts the
dynamics converge to.
"""

from .equilibria import (
    EquilibriumPoint,
    equilibria_2species,
    equilibria_3species,
    jacobian_2species,
    jacobian_3species,
    stability_classification,
)
from .experiments import (
    Scenario,
    Verdict,
    all_scenarios,
    bubble_threshold_probe,
    run_and_judge,
    scenario_case1,
    scenario_case2,
    scenario_wolb1,
    scenario_wolb2,
    scenario_wolb3,
    scenario_wolb4,
    strong_competition_study,
)
from .invasion import (
    AdmissibilityResult,
    Bubble,
    InvasionReport,
    admissible_initial_data,
    bubble_construct,
    bubble_half_width,
    gamma_coefficients,
    invasion_report,
    theta_threshold,
    wolbachia_classify,
)
from .model import (
    ModelParams,
    PiecewiseCapacity,
    Side,
    ValidationError,
    alpha,
    antiderivative_F,
    antiderivative_G,
    baseline_parameters,
    carrying_equilibrium,
    reaction_f,
    reaction_g,
)
from .pde import (
    Field,
    Grid1D,
    NumericalError,
    RunLog,
    SimState,
    default_dt,
    diffusion_step,
    run_to_time,
    segregation_metric,
    step_semi_implicit,
    tridiag_solve,
)
from .stationary import StationaryFront, front_construct, matching_value_solve

__version__ = "0.1.0"
