from .optimizer import (
    OptimizerConfig, RadiusEstimate, RestartResult, best_of, gradient_converged, manifold_ascent, run_restarts,
    sphere_ascent, sphere_polish, sphere_retract, sphere_tangent,
)
from .radius_calculator import RadiusCalculator, classical_objective, reduced_objective
from .equivalence import EquivalenceChecker, EquivalenceReport, InequalityCheck, beta_constant, rank_k_lipschitz

__all__ = [
    'OptimizerConfig', 'RadiusEstimate', 'RestartResult', 'manifold_ascent', 'sphere_ascent',
    'sphere_polish', 'sphere_tangent', 'sphere_retract', 'gradient_converged',
    'run_restarts', 'best_of',
    'RadiusCalculator', 'classical_objective', 'reduced_objective',
    'EquivalenceChecker', 'EquivalenceReport', 'InequalityCheck', 'beta_constant', 'rank_k_lipschitz',
]
