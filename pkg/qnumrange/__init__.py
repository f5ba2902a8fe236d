# Core linear algebra
try:
    from .linalg import QParameter, DaggerMode
except ImportError:
    # Handle missing dependencies gracefully
    QParameter = None
    DaggerMode = None

# Radii
try:
    from .radius import RadiusCalculator, EquivalenceChecker, OptimizerConfig, RadiusEstimate
except ImportError:
    RadiusCalculator = None
    EquivalenceChecker = None
    OptimizerConfig = None
    RadiusEstimate = None

try:
    from .cradius import CRadiusCalculator
except ImportError:
    CRadiusCalculator = None

# Orbit of C_q and the dual norm
try:
    from .orbit import OrbitElement, build_cq, is_in_orbit, canonicalize, decompose_rank_one
except ImportError:
    OrbitElement = None
    build_cq = None
    is_in_orbit = None
    canonicalize = None
    decompose_rank_one = None

try:
    from .dual import DualNormEstimator, DualEstimate
except ImportError:
    DualNormEstimator = None
    DualEstimate = None

# Isometries
try:
    from .isometry import IsometryDescriptor, IsometryVerifier, IsometryRecovery, recover_parameters
except ImportError:
    IsometryDescriptor = None
    IsometryVerifier = None
    IsometryRecovery = None
    recover_parameters = None

# Grid-search references
try:
    from .oracle import GridSpec, brute_q_radius_2x2, brute_c_radius_2x2
except ImportError:
    GridSpec = None
    brute_q_radius_2x2 = None
    brute_c_radius_2x2 = None

try:
    from .storage import FileStorage
except ImportError:
    FileStorage = None

from .utils import ValidationError, DimensionError, DomainError, NotTheoremFormError, setup_logger

__version__ = "0.1.0"

__all__ = [
    # Linear algebra
    'QParameter',
    'DaggerMode',

    # Radii
    'RadiusCalculator',
    'EquivalenceChecker',
    'OptimizerConfig',
    'RadiusEstimate',
    'CRadiusCalculator',

    # Orbit and dual norm
    'OrbitElement',
    'build_cq',
    'is_in_orbit',
    'canonicalize',
    'decompose_rank_one',
    'DualNormEstimator',
    'DualEstimate',

    # Isometries
    'IsometryDescriptor',
    'IsometryVerifier',
    'IsometryRecovery',
    'recover_parameters',

    # Oracles
    'GridSpec',
    'brute_q_radius_2x2',
    'brute_c_radius_2x2',

    # Storage and utilities
    'FileStorage',
    'ValidationError',
    'DimensionError',
    'DomainError',
    'NotTheoremFormError',
    'setup_logger',
]
