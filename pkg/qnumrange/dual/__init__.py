from .dual_norm import DualNormEstimator, DualEstimate, SandwichReport
from .atomic_master import MasterSolution, solve_master, polish_coefficients, caratheodory_reduce, phase_grid

__all__ = [
    'DualNormEstimator', 'DualEstimate', 'SandwichReport',
    'MasterSolution', 'solve_master', 'polish_coefficients', 'caratheodory_reduce', 'phase_grid',
]
