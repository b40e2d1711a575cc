from ._core import ConvergenceError, DomainConnectivityError, SolveReport, minimize
from .frequency import (
    eigen_asymptotics_extremal,
    peak_candidates,
    principal_frequency,
    set_tolerance_scale,
    solve_lane_emden,
)
from .hardy import hardy_constant
from .morrey import MorreyBoundError, morrey_mu, morrey_sharp_bound
from .radial import A4Violation, a4_lower_bound, interval_form, pi_pq, radial_ball_frequency, radial_form

__all__ = [
    "A4Violation",
    "ConvergenceError",
    "DomainConnectivityError",
    "MorreyBoundError",
    "SolveReport",
    "a4_lower_bound",
    "eigen_asymptotics_extremal",
    "hardy_constant",
    "interval_form",
    "minimize",
    "morrey_mu",
    "morrey_sharp_bound",
    "peak_candidates",
    "pi_pq",
    "principal_frequency",
    "radial_ball_frequency",
    "radial_form",
    "set_tolerance_scale",
    "solve_lane_emden",
]
