import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import linalg as sla
from scipy.optimize import linprog

from qnumrange.linalg.types import ComplexMatrix
from qnumrange.utils.exceptions import DomainError

logger = logging.getLogger(__name__)

# Coefficients below this modulus are dropped from the support
SUPPORT_TOL = 1e-12


@dataclass
class MasterSolution:
    """Minimal sum of weights over a fixed atom set, with its dual iterate"""
    objective: float
    coefficients: np.ndarray
    dual_matrix: ComplexMatrix
    residual: float


def _real_vec(M: ComplexMatrix) -> np.ndarray:
    flat = M.ravel()
    return np.concatenate([flat.real, flat.imag])


def phase_grid(count: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(count) / count)


def solve_master(atoms: Sequence[ComplexMatrix], T: ComplexMatrix, phases: np.ndarray) -> MasterSolution:
    """
    min sum w  s.t.  sum_{j,m} w_jm phase_m atom_j = T,  w >= 0

    Solved with HiGHS. The equality marginals lambda give the dual iterate
    G with Re tr(G M) = lambda . [Re M, Im M], so Re tr(G phase_m atom_j) <= 1
    on every column.
    """
    n = T.shape[0]
    columns = [_real_vec(ph * X) for X in atoms for ph in phases]
    A_eq = np.column_stack(columns)
    b_eq = _real_vec(T)
    res = linprog(np.ones(A_eq.shape[1]), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method='highs')
    if res.status != 0:
        raise DomainError(f"master problem failed: {res.message}")

    weights = res.x.reshape(len(atoms), len(phases))
    coefficients = weights @ phases
    lam = np.asarray(res.eqlin.marginals)
    half = n * n
    G = (lam[:half] - 1j * lam[half:]).reshape(n, n).T
    combined = np.tensordot(coefficients, np.asarray(atoms), axes=1)
    return MasterSolution(objective=float(res.fun), coefficients=coefficients,
                          dual_matrix=G, residual=float(np.linalg.norm(combined - T)))


def polish_coefficients(atoms: Sequence[ComplexMatrix], coefficients: np.ndarray,
                        T: ComplexMatrix) -> np.ndarray:
    """Least-squares correction of the coefficients on their support"""
    coefficients = coefficients.copy()
    support = np.flatnonzero(np.abs(coefficients) > SUPPORT_TOL)
    if support.size == 0:
        return coefficients
    basis = np.column_stack([atoms[j].ravel() for j in support])
    residual = T.ravel() - basis @ coefficients[support]
    delta = np.linalg.lstsq(basis, residual, rcond=None)[0]
    coefficients[support] += delta
    return coefficients


def caratheodory_reduce(atoms: Sequence[ComplexMatrix], coefficients: np.ndarray) -> Tuple[List[int], np.ndarray]:
    """
    Support of at most 2n^2 + 1 atoms carrying the same sum and the same sum of |c|

    The rotated atoms c_j/|c_j| atom_j are points in R^{2n^2}; while there are
    more than 2n^2 + 1 of them a null vector mu of [points; 1] moves weight
    off the support without changing sum |c_j| or sum c_j atom_j.
    """
    support = [int(j) for j in np.flatnonzero(np.abs(coefficients) > SUPPORT_TOL)]
    if not support:
        return [], np.zeros(0, dtype=np.complex128)
    n = atoms[0].shape[0]
    limit = 2 * n * n + 1
    weights = np.abs(coefficients[support]).astype(float)
    rotations = coefficients[support] / weights
    points = [_real_vec(rot * atoms[j]) for rot, j in zip(rotations, support)]

    while len(support) > limit:
        system = np.vstack([np.column_stack(points), np.ones(len(points))])
        null = sla.null_space(system)
        if null.shape[1] == 0:
            break
        mu = null[:, 0]
        if not np.any(mu > 0):
            mu = -mu
        positive = mu > 0
        ratios = np.full(mu.shape, np.inf)
        ratios[positive] = weights[positive] / mu[positive]
        step = float(np.min(ratios))
        weights = weights - step * mu
        keep = weights > SUPPORT_TOL * max(1.0, float(np.max(weights)))
        keep[int(np.argmin(ratios))] = False
        support = [j for j, k in zip(support, keep) if k]
        rotations = rotations[keep]
        weights = weights[keep]
        points = [p for p, k in zip(points, keep) if k]

    logger.debug(f"Caratheodory reduction kept {len(support)} atoms (limit {limit})")
    return support, weights * rotations
