import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, TextIO, Union

import numpy as np
import pandas as pd

from qnumrange.linalg.matrix_io import matrix_from_json, matrix_to_json
from qnumrange.linalg.types import ComplexMatrix
from qnumrange.utils.exceptions import ValidationError

PathLike = Union[str, Path]


def _numpy_handler(obj):
    """Numpy scalars and arrays inside payloads"""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, 'item'):
        return obj.item()
    raise TypeError(f"Object of type {type(obj)} is not JSON serializable")


def dumps(payload: Any) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, no NaN"""
    try:
        return json.dumps(payload, default=_numpy_handler, indent=2, sort_keys=True,
                          ensure_ascii=False, allow_nan=False)
    except ValueError as e:
        raise ValidationError(f"payload is not finite JSON: {e}")


class FileStorage:
    """Matrix, JSON and CSV files for the command line, relative to base_path"""

    def __init__(self, base_path: Optional[PathLike] = None):
        self.base_path = Path(base_path) if base_path is not None else Path.cwd()
        self.logger = logging.getLogger(__name__)

    def _resolve(self, path: PathLike) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.base_path / path

    def load_json(self, path: PathLike) -> Any:
        filepath = self._resolve(path)
        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                payload = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            self.logger.error(f"Load JSON error: {e}")
            raise ValidationError(f"cannot read JSON from {filepath}: {e}")
        self.logger.debug(f"JSON loaded: {filepath}")
        return payload

    def load_matrix(self, path: PathLike) -> ComplexMatrix:
        """A matrix JSON document, or an object holding one under "matrix" """
        payload = self.load_json(path)
        if isinstance(payload, dict) and 'matrix' in payload and 'rows' not in payload:
            payload = payload['matrix']
        return matrix_from_json(payload)

    def save_matrix(self, path: PathLike, A: ComplexMatrix) -> str:
        return self.write_json(path, matrix_to_json(A))

    def write_json(self, target: Union[PathLike, TextIO], payload: Any) -> str:
        """Write one JSON document to a path or an open text stream"""
        text = dumps(payload) + "\n"
        if hasattr(target, 'write'):
            target.write(text)
            return ""
        filepath = self._resolve(target)
        try:
            filepath.parent.mkdir(parents=True, exist_ok=True)
            with open(filepath, 'w', encoding='utf-8') as f:
                f.write(text)
        except OSError as e:
            self.logger.error(f"Save JSON error: {e}")
            raise ValidationError(f"cannot write {filepath}: {e}")
        self.logger.info(f"JSON saved: {filepath}")
        return str(filepath)

    def write_points_csv(self, target: Union[PathLike, TextIO], points: Sequence[complex]) -> str:
        """Complex points as "re,im" rows"""
        points = np.asarray(points, dtype=np.complex128).ravel()
        df = pd.DataFrame({'re': points.real, 'im': points.imag})
        if hasattr(target, 'write'):
            df.to_csv(target, index=False, float_format='%.17g', lineterminator='\n')
            return ""
        filepath = self._resolve(target)
        df.to_csv(filepath, index=False, float_format='%.17g', lineterminator='\n')
        self.logger.info(f"Points saved to CSV: {filepath}")
        return str(filepath)

    @staticmethod
    def table(rows: Sequence[Dict[str, Any]]) -> pd.DataFrame:
        return pd.DataFrame(list(rows))
