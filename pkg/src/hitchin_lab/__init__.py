"""Numerical laboratory for the Sp(4) Hitchin equations on cyclic Higgs bundles
and for singular flat surfaces of quartic differentials."""
__version__ = "0.1.0"

from .domain import (ConformalBackground, DomainError, QuarticInput, build_disk_background,
                     build_torus_background)
from .solver import NonConvergence, SolutionPair, SolverError, SolverOptions, solve_cyclic, solve_hitchin
from .metric import bound_report, decay_compare, induced_metric, ray_sweep
from .entropy import count_closed_geodesics, entropy_fit, flat_bound_curve

__all__ = [
    "__version__",
    "ConformalBackground", "DomainError", "QuarticInput", "build_disk_background", "build_torus_background",
    "NonConvergence", "SolutionPair", "SolverError", "SolverOptions", "solve_cyclic", "solve_hitchin",
    "bound_report", "decay_compare", "induced_metric", "ray_sweep",
    "count_closed_geodesics", "entropy_fit", "flat_bound_curve",
]
