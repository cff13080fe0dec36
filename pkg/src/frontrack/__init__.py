"""Front tracking for 2x2 conservation laws with data of bounded p-variation."""
from .errors import FrontrackError
from .functionals import build_horizon, monitor_decay, upsilon
from .model import builtin_degenerate_system, builtin_p_system
from .pvar import StepFunction, max_p_sum, p_variation_seq, vector_p_variation
from .riemann import interact_opposite, interact_same, solve_riemann
from .tracking import load_trace, run, run_scenario, save_trace, solution_at

__version__ = "0.1.0"

__all__ = [
    "FrontrackError", "StepFunction", "build_horizon", "builtin_degenerate_system", "builtin_p_system",
    "interact_opposite", "interact_same", "load_trace", "max_p_sum", "monitor_decay", "p_variation_seq",
    "run", "run_scenario", "save_trace", "solution_at", "solve_riemann", "upsilon", "vector_p_variation",
]
