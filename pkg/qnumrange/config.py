import copy
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from qnumrange.utils.exceptions import ValidationError

# Optimizer defaults (sphere ascent for r and r_q)
DEFAULT_RESTARTS = 32
DEFAULT_MAX_ITERS = 500
DEFAULT_GRAD_TOL = 1e-8
DEFAULT_STEP_TOL = 1e-12
DEFAULT_SEED = 0
DEFAULT_THREADS = 1

# Unitary-group ascent for r_C (rougher landscape, more restarts)
C_RADIUS_RESTARTS = 64

# Numerical rank / membership tolerances
RANK_TOL = 1e-9
ORBIT_TOL = 1e-8
SCALAR_TOL = 1e-9

# Dual norm estimation
DUAL_GAP_TOL = 0.02
DUAL_FEAS_TOL = 1e-8
DUAL_MAX_ROUNDS = 60
DUAL_PHASE_GRID = 24
DUAL_MAX_DIMENSION = 4
# Independent lower bound: ascent of |tr(TA)| / r_q(A) over the unit sphere of A
DUAL_ASCENT_ITERS = 20
DUAL_ASCENT_STARTS = 2

# Brute-force oracles
ORACLE_DENSITY = 64

# Sampled range convexity: midpoints of sample pairs vs a dense sample
CONVEXITY_SAMPLES = 100000
CONVEXITY_PAIRS = 500
CONVEXITY_TOL = 1e-2

# Environment variable carrying the default seed
SEED_ENV_VAR = "QNR_SEED"

DEFAULT_CONFIG: Dict[str, Any] = {
    "optimizer": {
        "restarts": DEFAULT_RESTARTS,
        "max_iters": DEFAULT_MAX_ITERS,
        "grad_tol": DEFAULT_GRAD_TOL,
        "step_tol": DEFAULT_STEP_TOL,
        "threads": DEFAULT_THREADS,
    },
    "c_radius": {
        "restarts": C_RADIUS_RESTARTS,
        "max_iters": DEFAULT_MAX_ITERS,
        "grad_tol": DEFAULT_GRAD_TOL,
        "step_tol": DEFAULT_STEP_TOL,
        "threads": DEFAULT_THREADS,
    },
    "dual": {
        "gap_tol": DUAL_GAP_TOL,
        "feas_tol": DUAL_FEAS_TOL,
        "max_rounds": DUAL_MAX_ROUNDS,
        "phase_grid": DUAL_PHASE_GRID,
        "max_dimension": DUAL_MAX_DIMENSION,
        "ascent_iters": DUAL_ASCENT_ITERS,
        "ascent_starts": DUAL_ASCENT_STARTS,
    },
    "oracle": {
        "density": ORACLE_DENSITY,
    },
    "logging": {
        "level": "INFO",
        "file": None,
    },
}


def default_seed() -> int:
    """Seed from QNR_SEED, falling back to DEFAULT_SEED"""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """Load a JSON config file laid out like config.example.json over the defaults"""
    if path is None:
        return copy.deepcopy(DEFAULT_CONFIG)

    config_path = Path(path)
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            user_config = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"Cannot read config {config_path}: {e}")

    if not isinstance(user_config, dict):
        raise ValidationError(f"Config {config_path} must hold a JSON object")

    return _deep_merge(DEFAULT_CONFIG, user_config)


def optimizer_config_from(config: Dict[str, Any], section: str = "optimizer",
                          seed: Optional[int] = None, **overrides):
    """Build an OptimizerConfig from a loaded config section"""
    from qnumrange.radius.optimizer import OptimizerConfig

    values = dict(config.get(section, {}))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return OptimizerConfig(
        restarts=int(values.get("restarts", DEFAULT_RESTARTS)),
        max_iters=int(values.get("max_iters", DEFAULT_MAX_ITERS)),
        step_tol=float(values.get("step_tol", DEFAULT_STEP_TOL)),
        grad_tol=float(values.get("grad_tol", DEFAULT_GRAD_TOL)),
        seed=default_seed() if seed is None else int(seed),
        threads=int(values.get("threads", DEFAULT_THREADS)),
    )
