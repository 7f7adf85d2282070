"""Streaming temporal dictionaries.

A dictionary is a collection of N temporal feature columns; each round it
exposes the features that are active (nonzero) together with their values.
Per the learning protocol, every per-round value has magnitude at most 1 and
every column has total squared value at least 1 over its horizon.

Column ordering convention, fixed project-wide: the all-one column first,
then wavelet columns by scale descending and location ascending.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameterError, ResourceLimitError


@dataclass(frozen=True)
class HaarIndex:
    """Index of one Haar feature: the all-one column or a (scale, location) wavelet."""

    kind: str  # "allone" or "wavelet"
    scale: int = 0
    location: int = 0


ALLONE = HaarIndex("allone")


class ActiveFeature(NamedTuple):
    index: object  # HaarIndex, or a plain column number for generic dictionaries
    value: object  # scalar in {-1, 0, +1} for unnormalized Haar, real otherwise


def haar_support(scale, location):
    """Closed support interval (1-based, inclusive) of wavelet (scale, location)."""
    width = 1 << scale
    start = width * (location - 1) + 1
    return start, width * location


def haar_column(m, scale, location):
    """Column number of wavelet (scale, location) in Haar_m; the all-one column is 0."""
    return (1 << (m - scale)) + location - 1


def haar_active_features(m, t):
    """The m+1 features of Haar_m active at round t.

    Returns the all-one feature (value 1) plus, for each scale j, the unique
    wavelet whose support contains t: value +1 on the first half of the
    support, -1 on the second half.
    """
    if m < 1:
        raise InvalidParameterError(f"m must be a positive integer, got {m}")
    horizon = 1 << m
    if not 1 <= t <= horizon:
        raise InvalidParameterError(f"round {t} outside [1, {horizon}]")
    feats = [ActiveFeature(ALLONE, 1.0)]
    for scale in range(m, 0, -1):
        width = 1 << scale
        location = (t + width - 1) // width
        offset = t - width * (location - 1)
        value = 1.0 if offset <= (width >> 1) else -1.0
        feats.append(ActiveFeature(HaarIndex("wavelet", scale, location), value))
    return feats


def haar_matrix(m):
    """Materialize the full T x T unnormalized Haar dictionary, T = 2^m.

    Rows are rounds, columns follow the project ordering. Guarded at m <= 16
    to keep materialization at desk scale.
    """
    if m < 1:
        raise InvalidParameterError(f"m must be a positive integer, got {m}")
    if m > 16:
        raise ResourceLimitError(f"haar_matrix limited to m <= 16, got {m}")
    horizon = 1 << m
    mat = np.zeros((horizon, horizon))
    mat[:, 0] = 1.0
    for scale in range(m, 0, -1):
        half = 1 << (scale - 1)
        for location in range(1, (1 << (m - scale)) + 1):
            start, _ = haar_support(scale, location)
            col = haar_column(m, scale, location)
            mat[start - 1 : start - 1 + half, col] = 1.0
            mat[start - 1 + half : start - 1 + 2 * half, col] = -1.0
    return mat


def fourier_features(base_frequency, max_order, t):
    """Constant-plus-harmonics feature vector of length 2K+1 at round t.

    Entry 0 is the constant 1; entries 2k-1 and 2k are cos(k w t) and
    sin(k w t) for harmonic orders k = 1..K.
    """
    if base_frequency <= 0:
        raise InvalidParameterError(
            f"base_frequency must be positive, got {base_frequency}"
        )
    if max_order < 1:
        raise InvalidParameterError(f"max_order must be >= 1, got {max_order}")
    k = np.arange(1, max_order + 1)
    angles = k * (base_frequency * t)
    out = np.empty(2 * max_order + 1)
    out[0] = 1.0
    out[1::2] = np.cos(angles)
    out[2::2] = np.sin(angles)
    return out


def identity_dictionary(d, t):
    """The static dictionary: d standard basis directions, active every round."""
    if d < 1:
        raise InvalidParameterError(f"d must be a positive integer, got {d}")
    eye = np.eye(d)
    return [ActiveFeature(n, eye[n]) for n in range(d)]


class HaarDictionary:
    """Active-column view over Haar_m for the sparse-coding learners.

    Emits (column, value) pairs with values in {-1, +1}; exactly m+1 columns
    are active each round.
    """

    def __init__(self, m):
        if m < 1:
            raise InvalidParameterError(f"m must be a positive integer, got {m}")
        self.m = m
        self.size = 1 << m
        self.horizon = 1 << m

    def active(self, t):
        return [
            (0 if feat.index.kind == "allone"
             else haar_column(self.m, feat.index.scale, feat.index.location),
             feat.value)
            for feat in haar_active_features(self.m, t)
        ]


class FourierDictionary:
    """Constant-plus-harmonics dictionary; all 2K+1 columns active every round."""

    def __init__(self, base_frequency, max_order):
        if base_frequency <= 0:
            raise InvalidParameterError("base_frequency must be positive")
        if max_order < 1:
            raise InvalidParameterError("max_order must be >= 1")
        self.base_frequency = float(base_frequency)
        self.max_order = int(max_order)
        self.size = 2 * self.max_order + 1
        self.horizon = None

    def active(self, t):
        values = fourier_features(self.base_frequency, self.max_order, t)
        return list(enumerate(values))


class IdentityDictionary:
    """Static dictionary H_t = I_d: one basis-vector feature per coordinate."""

    def __init__(self, dim):
        if dim < 1:
            raise InvalidParameterError(f"dim must be a positive integer, got {dim}")
        self.dim = dim
        self.size = dim
        self.horizon = None
        self._eye = np.eye(dim)

    def active(self, t):
        return [(n, self._eye[n]) for n in range(self.dim)]


class MatrixDictionary:
    """Explicit dictionary from an array: (T, N) scalars or (T, N, d) blocks.

    Zero entries are skipped, matching the sparse-activation protocol.
    """

    def __init__(self, blocks):
        arr = np.asarray(blocks, dtype=float)
        if arr.ndim not in (2, 3):
            raise InvalidParameterError(
                f"blocks must be (T, N) or (T, N, d), got shape {arr.shape}"
            )
        self.blocks = arr
        self.horizon = arr.shape[0]
        self.size = arr.shape[1]
        self.vector_features = arr.ndim == 3

    def active(self, t):
        if not 1 <= t <= self.horizon:
            raise InvalidParameterError(f"round {t} outside [1, {self.horizon}]")
        row = self.blocks[t - 1]
        if self.vector_features:
            return [(n, row[n]) for n in range(self.size) if np.any(row[n])]
        return [(n, float(row[n])) for n in range(self.size) if row[n] != 0.0]
