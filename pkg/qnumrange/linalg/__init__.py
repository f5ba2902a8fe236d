from .types import ComplexMatrix, QParameter, DaggerMode, as_matrix, as_vector, require_same_size
from .operations import (
    SchattenOrder, inner, dyad, matrix_unit, trace, pairing, singular_values,
    schatten_norm, hs_norm, numerical_rank, dagger, gram_defect, extend_to_unitary, is_unitary,
)
from .sampling import (
    SampleKind, sample, complex_gaussian, unit_vector, haar_unitary, haar_unitaries,
    orthogonal_unit_vector,
)
from .matrix_io import (
    matrix_to_json, matrix_from_json, vector_to_json, vector_from_json,
    scalar_to_json, scalar_from_json,
)

__all__ = [
    'ComplexMatrix', 'QParameter', 'DaggerMode', 'as_matrix', 'as_vector', 'require_same_size',
    'SchattenOrder', 'inner', 'dyad', 'matrix_unit', 'trace', 'pairing', 'singular_values',
    'schatten_norm', 'hs_norm', 'numerical_rank', 'dagger', 'gram_defect', 'extend_to_unitary',
    'is_unitary',
    'SampleKind', 'sample', 'complex_gaussian', 'unit_vector', 'haar_unitary', 'haar_unitaries',
    'orthogonal_unit_vector',
    'matrix_to_json', 'matrix_from_json', 'vector_to_json', 'vector_from_json',
    'scalar_to_json', 'scalar_from_json',
]
