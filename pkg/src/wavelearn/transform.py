"""Orthonormal Haar analysis and synthesis of d-dimensional signals.

Coefficients are taken against the L2-normalized columns of the Haar
dictionary, coordinate by coordinate, so the transform is orthonormal and
energy-preserving. Analysis runs the classic averaging/differencing pyramid;
agreement with direct inner products is covered by tests.

Analysis is defined only for dyadic horizons. Live streams with other
lengths are handled upstream by the doubling wrapper in the learners module.
"""

import math

import numpy as np

from .errors import InvalidParameterError
from .signals import as_matrix, row_norms

_SQRT2 = math.sqrt(2.0)


class HaarCoefficients:
    """Transform-domain view of a length 2^m signal.

    ``allone`` is the d-vector coefficient of the normalized all-one column;
    ``levels[j]`` stacks the scale-j wavelet coefficients as a
    (2^(m-j), d) array whose row l-1 is the (j, l) coefficient.
    """

    def __init__(self, allone, levels, horizon, dim, flat=False):
        self.allone = np.asarray(allone, dtype=float)
        self.levels = {int(j): np.asarray(v, dtype=float) for j, v in levels.items()}
        self.horizon = int(horizon)
        self.dim = int(dim)
        self.flat = bool(flat)

    @classmethod
    def zeros(cls, horizon, dim=1, flat=False):
        if horizon < 1 or horizon & (horizon - 1):
            raise InvalidParameterError(f"horizon must be a power of two, got {horizon}")
        m = horizon.bit_length() - 1
        levels = {j: np.zeros((horizon >> j, dim)) for j in range(1, m + 1)}
        return cls(np.zeros(dim), levels, horizon, dim, flat)

    @property
    def max_scale(self):
        return self.horizon.bit_length() - 1

    def scales(self):
        return range(1, self.max_scale + 1)

    def coefficient(self, scale, location):
        """The d-vector coefficient of wavelet (scale, location)."""
        if scale not in self.levels:
            raise InvalidParameterError(f"scale {scale} outside [1, {self.max_scale}]")
        level = self.levels[scale]
        if not 1 <= location <= level.shape[0]:
            raise InvalidParameterError(
                f"location {location} outside [1, {level.shape[0]}] at scale {scale}"
            )
        return level[location - 1]

    def wavelet_items(self):
        """Iterate ((scale, location), coefficient) over all wavelet entries."""
        for j in self.scales():
            for l0, vec in enumerate(self.levels[j]):
                yield (j, l0 + 1), vec

    def energy(self):
        total = float(self.allone @ self.allone)
        for level in self.levels.values():
            total += float((level * level).sum())
        return total

    def wavelet_energy(self):
        return sum(float((level * level).sum()) for level in self.levels.values())

    def nonzero_count(self, threshold=None):
        """Number of wavelet coefficients with norm above the zero threshold.

        Exact zeros are not reliable in floating point, so the default
        threshold is 1e-12 times the square root of the total energy.
        """
        if threshold is None:
            threshold = 1e-12 * math.sqrt(self.energy())
        count = 0
        for level in self.levels.values():
            norms = np.sqrt((level * level).sum(axis=1))
            count += int((norms > threshold).sum())
        return count


def _check_dyadic(horizon):
    if horizon < 1 or horizon & (horizon - 1):
        raise InvalidParameterError(
            f"signal length must be a power of two, got {horizon}"
        )


def haar_analyze(signal):
    """Haar analysis via the O(T) averaging/differencing pyramid."""
    arr, flat = as_matrix(signal)
    horizon, dim = arr.shape
    _check_dyadic(horizon)
    m = horizon.bit_length() - 1
    levels = {}
    current = arr
    for j in range(1, m + 1):
        even = current[0::2]
        odd = current[1::2]
        levels[j] = (even - odd) / _SQRT2
        current = (even + odd) / _SQRT2
    return HaarCoefficients(current[0], levels, horizon, dim, flat)


def haar_synthesize(coeffs):
    """Inverse of haar_analyze; returns a signal of the analyzed shape."""
    current = coeffs.allone.reshape(1, coeffs.dim)
    for j in range(coeffs.max_scale, 0, -1):
        detail = coeffs.levels[j]
        merged = np.empty((2 * current.shape[0], coeffs.dim))
        merged[0::2] = (current + detail) / _SQRT2
        merged[1::2] = (current - detail) / _SQRT2
        current = merged
    return current[:, 0] if coeffs.flat else current


def detail_sequence(coeffs, scale):
    """Reconstruction using only the scale-j coefficients.

    Each (j, l) coefficient contributes +-2^(-j/2) times itself on the two
    halves of its support; supports at one scale tile the horizon.
    """
    if scale not in coeffs.levels:
        raise InvalidParameterError(
            f"scale {scale} outside [1, {coeffs.max_scale}]"
        )
    level = coeffs.levels[scale]
    width = 1 << scale
    half = width >> 1
    pattern = np.concatenate([np.ones(half), -np.ones(half)])
    signs = np.tile(pattern, level.shape[0])
    z = np.repeat(level, width, axis=0) * signs[:, None] * (2.0 ** (-scale / 2.0))
    return z[:, 0] if coeffs.flat else z


def allone_sequence(coeffs):
    """Reconstruction using only the all-one coefficient (constant in t)."""
    z = np.tile(coeffs.allone / math.sqrt(coeffs.horizon), (coeffs.horizon, 1))
    return z[:, 0] if coeffs.flat else z


def scale_regularity(coeffs, scale):
    """(path length, first-order variability) of the scale-j detail.

    The path length counts movement within each support only; steps that
    cross a support boundary are excluded. Both are computed literally from
    the reconstructed detail so they can serve as a test oracle.
    """
    z, _ = as_matrix(detail_sequence(coeffs, scale))
    horizon = z.shape[0]
    variability = float(row_norms(z).sum())
    if horizon < 2:
        return 0.0, variability
    diffs = z[1:] - z[:-1]
    steps = np.arange(1, horizon)  # step from round t to t+1
    inside = (steps % (1 << scale)) != 0
    path = float(row_norms(diffs[inside]).sum())
    return path, variability


def local_average(signal, start, length):
    """Replace ``length`` consecutive entries (0-based ``start``) by their mean."""
    arr, flat = as_matrix(signal)
    horizon = arr.shape[0]
    if length < 1 or start < 0 or start + length > horizon:
        raise InvalidParameterError(
            f"window [{start}, {start + length}) outside [0, {horizon})"
        )
    out = arr.copy()
    out[start : start + length] = arr[start : start + length].mean(axis=0)
    return out[:, 0] if flat else out
