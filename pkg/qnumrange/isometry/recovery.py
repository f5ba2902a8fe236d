import logging
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np
from scipy import linalg as sla

from qnumrange.isometry.descriptor import IsometryDescriptor, apply, descriptor_to_dict
from qnumrange.isometry.verifier import BlackBoxMap, evaluate
from qnumrange.linalg.operations import hs_norm, matrix_unit
from qnumrange.linalg.sampling import complex_gaussian
from qnumrange.linalg.types import DaggerMode, QParameter
from qnumrange.utils.exceptions import DimensionError, NotTheoremFormError

# Structure tests (scalar psi(I), linearity, multiplicativity)
STRUCTURE_TOL = 1e-6
VALIDATION_TOL = 1e-8
VALIDATION_SAMPLES = 20


@dataclass
class RecoveryReport:
    descriptor: IsometryDescriptor
    validation_residual: float
    unit_residual: float
    evaluations: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'descriptor': descriptor_to_dict(self.descriptor),
            'validation_residual': float(self.validation_residual),
            'unit_residual': float(self.unit_residual),
            'evaluations': int(self.evaluations),
        }


class IsometryRecovery:
    """
    Recover (S0, mu, U, mode) from a black-box map of the form S0 + mu U* A^mode U

    Evaluates f at 0, I, every matrix unit E_ij, i E11 and the products
    E12 E22 and E21 E11 (n^2 + 5 evaluations), then validates on
    VALIDATION_SAMPLES random matrices.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.logger = logging.getLogger(__name__)

    def recover(self, f: BlackBoxMap, q: Union[float, QParameter], n: int) -> RecoveryReport:
        # The recovered form does not depend on q; it is only validated
        QParameter.of(q)
        if n < 2:
            raise DimensionError("recovery needs n >= 2 for the product inputs")
        zero = np.zeros((n, n), dtype=np.complex128)
        eye = np.eye(n, dtype=np.complex128)
        evaluations = 0

        def call(A):
            nonlocal evaluations
            evaluations += 1
            return evaluate(f, A)

        s0 = call(zero)

        def psi(A):
            return call(A) - s0

        psi_eye = psi(eye)
        mu_raw = np.trace(psi_eye) / n
        scalar_defect = hs_norm(psi_eye - mu_raw * eye)
        diagnostics = {'scalar_defect': scalar_defect, 'mu_modulus': float(abs(mu_raw))}
        if scalar_defect > STRUCTURE_TOL or abs(abs(mu_raw) - 1.0) > STRUCTURE_TOL:
            raise NotTheoremFormError("psi(I) is not a unit-modulus multiple of I", diagnostics)
        mu = mu_raw / abs(mu_raw)

        units = {(i, j): np.conj(mu) * psi(matrix_unit(n, i, j)) for i in range(n) for j in range(n)}
        chi_i11 = np.conj(mu) * psi(1j * matrix_unit(n, 0, 0))
        linear_res = hs_norm(chi_i11 - 1j * units[0, 0])
        antilinear_res = hs_norm(chi_i11 + 1j * units[0, 0])
        diagnostics.update(linear_residual=linear_res, antilinear_residual=antilinear_res)
        linear = self._decide(linear_res, antilinear_res, "linearity", diagnostics)

        # E12 E22 = E12 and E21 E11 = E21
        chi_p1 = np.conj(mu) * psi(matrix_unit(n, 0, 1) @ matrix_unit(n, 1, 1))
        chi_p2 = np.conj(mu) * psi(matrix_unit(n, 1, 0) @ matrix_unit(n, 0, 0))
        mult_res = (hs_norm(chi_p1 - units[0, 1] @ units[1, 1])
                    + hs_norm(chi_p2 - units[1, 0] @ units[0, 0]))
        anti_res = (hs_norm(chi_p1 - units[1, 1] @ units[0, 1])
                    + hs_norm(chi_p2 - units[0, 0] @ units[1, 0]))
        diagnostics.update(multiplicative_residual=mult_res, antimultiplicative_residual=anti_res)
        multiplicative = self._decide(mult_res, anti_res, "multiplicativity", diagnostics)
        mode = DaggerMode.from_flags(transposes=not multiplicative, conjugates=not linear)

        # chi(E_jj) = u_j u_j* with u_j = U* e_j; chi(E_1j) ties the phases to u_1
        evals, evecs = sla.eigh(units[0, 0])
        u1 = evecs[:, -1]
        columns = [u1]
        for j in range(1, n):
            chi = units[0, j]
            columns.append(chi.conj().T @ u1 if multiplicative else chi @ u1)
        u_adj = np.column_stack(columns)
        u = sla.polar(u_adj.conj().T)[0]
        flat = u.ravel()
        lead = flat[int(np.argmax(np.abs(flat)))]
        u = u * (np.conj(lead) / abs(lead))

        descriptor = IsometryDescriptor(s0=s0, mu=mu, u=u, mode=mode)
        unit_residual = max(
            hs_norm(descriptor.linear_part(matrix_unit(n, i, j)) - mu * units[i, j])
            for i in range(n) for j in range(n)
        )
        diagnostics['unit_residual'] = unit_residual

        rng = np.random.default_rng(self.seed)
        residual = 0.0
        for _ in range(VALIDATION_SAMPLES):
            A = complex_gaussian(rng, (n, n))
            expected = call(A)
            residual = max(residual, hs_norm(apply(descriptor, A) - expected) / max(1.0, hs_norm(expected)))
        diagnostics['validation_residual'] = residual
        if residual > VALIDATION_TOL:
            raise NotTheoremFormError(f"recovered descriptor misses f by {residual:.3e}", diagnostics)

        self.logger.info(f"recovered {mode.value} isometry, validation residual {residual:.3e}, {evaluations} evaluations")
        return RecoveryReport(descriptor=descriptor, validation_residual=residual,
                              unit_residual=unit_residual, evaluations=evaluations)

    @staticmethod
    def _decide(holds_res: float, fails_res: float, what: str, diagnostics: Dict[str, Any]) -> bool:
        """True when the first residual vanishes and the second does not"""
        first = holds_res <= STRUCTURE_TOL
        second = fails_res <= STRUCTURE_TOL
        if first == second:
            raise NotTheoremFormError(f"{what} test is ambiguous", diagnostics)
        return first


def recover_parameters(f: BlackBoxMap, q: Union[float, QParameter], n: int, seed: int = 0) -> IsometryDescriptor:
    return IsometryRecovery(seed).recover(f, q, n).descriptor
