"""Cost-aware distributionally robust log-optimal portfolios."""
from .ambiguity import SampleSet, SupportBox, WassersteinBall, compound_support_bounds
from .costs import CostModel, PiecewiseLinear
from .kernels import BACKEND
from .solver import DroProblem, DroSolution, SolverConfig, elg_classical, solve, solve_path

__all__ = [
    "BACKEND",
    "CostModel",
    "DroProblem",
    "DroSolution",
    "PiecewiseLinear",
    "SampleSet",
    "SolverConfig",
    "SupportBox",
    "WassersteinBall",
    "compound_support_bounds",
    "elg_classical",
    "solve",
    "solve_path",
]
__version__ = "0.1.0"
