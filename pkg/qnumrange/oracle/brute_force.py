"""
Grid-search references for 2x2 matrices

Deliberately independent of the optimizers: each oracle evaluates its own
objective on a full angular grid and reports the grid error bound next to
the maximum.
"""

from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np
from joblib import Parallel, delayed

from qnumrange import config as defaults
from qnumrange.linalg.types import ComplexMatrix, QParameter, as_matrix
from qnumrange.utils.exceptions import DimensionError, ValidationError

MIN_DENSITY = 8
# Lipschitz estimate of the objectives in each angle, per unit of ||A||
LIPSCHITZ_FACTOR = 4.0


@dataclass(frozen=True)
class GridSpec:
    """Points per angular parameter; angle k of a period P sits at P * k / density"""
    density: int = defaults.ORACLE_DENSITY
    threads: int = 1

    def __post_init__(self):
        if int(self.density) < MIN_DENSITY:
            raise ValidationError(f"grid density must be >= {MIN_DENSITY}, got {self.density}")
        if int(self.threads) < 1:
            raise ValidationError(f"threads must be >= 1, got {self.threads}")

    def angles(self, period: float, closed: bool = False) -> np.ndarray:
        # k / d is correctly rounded, so grids for d and m*d share their points exactly
        count = self.density + 1 if closed else self.density
        return period * (np.arange(count) / self.density)

    def half_spacing(self, period: float) -> float:
        return 0.5 * period / self.density


@dataclass
class OracleResult:
    value: float
    error_bound: float
    density: int

    def to_dict(self) -> Dict[str, Any]:
        return {'value': float(self.value), 'error_bound': float(self.error_bound),
                'density': int(self.density)}


def _require_2x2(M: ComplexMatrix, name: str) -> ComplexMatrix:
    M = as_matrix(M, name)
    if M.shape != (2, 2):
        raise DimensionError(f"{name} must be 2x2, got {M.shape}")
    return M


def _slab_max(func, slabs, threads: int) -> float:
    if threads > 1:
        values = Parallel(n_jobs=threads, prefer="threads")(delayed(func)(s) for s in slabs)
    else:
        values = [func(s) for s in slabs]
    return float(max(values))


def brute_q_radius_2x2(A: ComplexMatrix, q: Union[float, QParameter],
                       grid: GridSpec = GridSpec()) -> OracleResult:
    """
    max of q|<Ax,x>| + p|<Ax,z>| over x = (cos a, e^{i phi} sin a)

    z = (-conj x2, conj x1) spans the complement of x in C^2.
    """
    A = _require_2x2(A, "A")
    qp = QParameter.of(q)
    a_grid = grid.angles(0.5 * np.pi, closed=True)
    phases = np.exp(1j * grid.angles(2.0 * np.pi))

    def slab(a: float) -> float:
        x1 = np.full(phases.shape, np.cos(a), dtype=np.complex128)
        x2 = np.sin(a) * phases
        ax1 = A[0, 0] * x1 + A[0, 1] * x2
        ax2 = A[1, 0] * x1 + A[1, 1] * x2
        diag = np.conj(x1) * ax1 + np.conj(x2) * ax2
        # <Ax, z> = z* Ax with z = (-conj x2, conj x1)
        off = -x2 * ax1 + x1 * ax2
        return float(np.max(qp.q * np.abs(diag) + qp.p * np.abs(off)))

    value = _slab_max(slab, a_grid, grid.threads)
    norm = float(np.linalg.norm(A, 2))
    bound = LIPSCHITZ_FACTOR * norm * (grid.half_spacing(0.5 * np.pi) + grid.half_spacing(2.0 * np.pi))
    return OracleResult(value=value, error_bound=bound, density=grid.density)


def brute_c_radius_2x2(A: ComplexMatrix, C: ComplexMatrix, grid: GridSpec = GridSpec()) -> OracleResult:
    """
    max |tr(C U*AU)| over U = [[e^{ia} cos t, -e^{-ib} sin t], [e^{ib} sin t, e^{-ia} cos t]]

    The global phase of U cancels in U*AU and is not sampled.
    """
    A = _require_2x2(A, "A")
    C = _require_2x2(C, "C")
    t_grid = grid.angles(0.5 * np.pi, closed=True)
    phases = np.exp(1j * grid.angles(2.0 * np.pi))
    ea, eb = np.meshgrid(phases, phases, indexing='ij')

    def slab(t: float) -> float:
        c, s = np.cos(t), np.sin(t)
        U = np.empty(ea.shape + (2, 2), dtype=np.complex128)
        U[..., 0, 0] = ea * c
        U[..., 1, 0] = eb * s
        U[..., 0, 1] = -np.conj(eb) * s
        U[..., 1, 1] = np.conj(ea) * c
        similar = np.conj(np.swapaxes(U, -1, -2)) @ A @ U
        traces = np.einsum('ij,...ji->...', C, similar)
        return float(np.max(np.abs(traces)))

    value = _slab_max(slab, t_grid, grid.threads)
    norm = float(np.linalg.norm(A, 2)) * float(np.sum(np.linalg.svd(C, compute_uv=False)))
    bound = LIPSCHITZ_FACTOR * norm * (grid.half_spacing(0.5 * np.pi) + 2.0 * grid.half_spacing(2.0 * np.pi))
    return OracleResult(value=value, error_bound=bound, density=grid.density)
