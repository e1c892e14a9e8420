"""
Dense matrix CSV files.

One matrix row per line, comma separated, floats written with 17 significant
digits so that a write/read cycle reproduces every bit.
"""

from pathlib import Path

import numpy as np

from .constants import CsvFormat
from .errors import DimensionError, ValidationError


def save_matrix_csv(path: Path, X: np.ndarray) -> None:
    """Write a 2-D array as dense CSV."""
    arr = np.atleast_2d(np.asarray(X, dtype=float))
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, arr, fmt=CsvFormat.FLOAT_FMT, delimiter=CsvFormat.DELIMITER)


def load_matrix_csv(path: Path) -> np.ndarray:
    """
    Read a dense CSV matrix.

    Raises:
        ValidationError: If the file is missing or not numeric
        DimensionError: If rows have different lengths
    """
    if not path.exists():
        raise ValidationError(f"Matrix file not found: {path}")
    try:
        arr = np.loadtxt(path, delimiter=CsvFormat.DELIMITER, dtype=float, ndmin=2)
    except ValueError as e:
        if "columns" in str(e):
            raise DimensionError(f"Ragged rows in {path}: {e}") from e
        raise ValidationError(f"Cannot parse matrix file {path}: {e}") from e
    return arr


def save_mask_csv(path: Path, W: np.ndarray) -> None:
    """Write a binary mask as 0/1 integers."""
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.asarray(W, dtype=int), fmt="%d", delimiter=CsvFormat.DELIMITER)


def load_mask_csv(path: Path) -> np.ndarray:
    """
    Read a 0/1 mask file.

    Raises:
        ValidationError: If any entry is not 0 or 1
    """
    W = load_matrix_csv(path)
    if not np.all((W == 0) | (W == 1)):
        raise ValidationError(f"Mask file {path} contains entries other than 0 and 1")
    return W.astype(bool)
