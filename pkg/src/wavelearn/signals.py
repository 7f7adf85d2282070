"""Signal coercion helpers.

A signal is a length-T sequence of d-dimensional vectors, stored as a
(T, d) float array. 1-D arrays are accepted everywhere and treated as d=1.
"""

import numpy as np

from .errors import InvalidParameterError


def as_matrix(signal):
    """Coerce a signal to a (T, d) float array. Returns (array, was_1d)."""
    arr = np.asarray(signal, dtype=float)
    if arr.ndim == 1:
        return arr.reshape(-1, 1), True
    if arr.ndim == 2:
        return arr, False
    raise InvalidParameterError(f"signal must be 1-D or 2-D, got shape {arr.shape}")


def row_norms(arr):
    """Euclidean norm of each row of a (T, d) array."""
    return np.sqrt((arr * arr).sum(axis=1))
