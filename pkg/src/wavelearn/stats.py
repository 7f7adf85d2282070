"""Comparator regularity statistics and closed-form bound evaluators.

The eight statistics quantify how hard a comparator sequence is to track:
its maximum range, average, path length, norm sum, centered first and second
order variability, energy, and switch count. L2 norms throughout. The bound
evaluators are used by the empirical bound-dominance tests.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .freegrad import regret_bound_branch
from .signals import as_matrix, row_norms


@dataclass
class ComparatorStats:
    max_range: float          # max_t |u_t|
    average: np.ndarray       # mean of u_t (d-vector)
    path_length: float        # sum |u_{t+1} - u_t|
    norm_sum: float           # sum |u_t|
    first_variability: float  # sum |u_t - mean|
    energy: float             # sum |u_t|^2
    second_variability: float # sum |u_t - mean|^2
    switches: int             # count of t with u_{t+1} != u_t (coordinate-exact)


def comparator_stats(signal):
    """All eight statistics of a comparator sequence."""
    arr, _ = as_matrix(signal)
    if arr.shape[0] < 1:
        raise InvalidParameterError("comparator signal must be nonempty")
    norms = row_norms(arr)
    average = arr.mean(axis=0)
    centered = arr - average
    centered_norms = row_norms(centered)
    if arr.shape[0] > 1:
        diffs = arr[1:] - arr[:-1]
        path_length = float(row_norms(diffs).sum())
        switches = int(np.any(arr[1:] != arr[:-1], axis=1).sum())
    else:
        path_length = 0.0
        switches = 0
    return ComparatorStats(
        max_range=float(norms.max()),
        average=average,
        path_length=path_length,
        norm_sum=float(norms.sum()),
        first_variability=float(centered_norms.sum()),
        energy=float((norms * norms).sum()),
        second_variability=float((centered_norms * centered_norms).sum()),
        switches=switches,
    )


def sparsity_measure(components):
    """Squared L1/L2 ratio of the component norms, the classical sparsity measure.

    ``components`` is a list of signal components (arrays of any matching
    shape); each contributes its flattened Euclidean norm. Defined as 1 when
    every component is zero (the ratio is otherwise arbitrary there).
    """
    if len(components) == 0:
        raise InvalidParameterError("at least one component is required")
    norms = np.array([float(np.linalg.norm(np.asarray(c, dtype=float))) for c in components])
    denom = float((norms * norms).sum())
    if denom == 0.0:
        return 1.0
    total = float(norms.sum())
    return total * total / denom


def sizen_bound(coefficients, variances, residual, lipschitz, epsilon):
    """Explicit dynamic regret bound for an N-feature sparse-coding run.

    eps*G, plus one explicit FreeGrad branch per feature evaluated at budget
    eps/N with that feature's comparator coefficient magnitude and the
    surrogate variance the feature learner accumulated during the run, plus
    G times the norm sum of the reconstruction residual.

    ``coefficients`` holds per-feature comparator coefficients (scalars or
    d-vectors; only norms enter). ``variances`` holds the matching final
    variance accumulators. ``residual`` is a signal or None.
    """
    if lipschitz <= 0 or epsilon <= 0:
        raise InvalidParameterError("lipschitz and epsilon must be positive")
    coeff_list = list(coefficients)
    var_list = [float(v) for v in variances]
    if len(coeff_list) != len(var_list):
        raise InvalidParameterError(
            f"{len(coeff_list)} coefficients vs {len(var_list)} variances"
        )
    bound = epsilon * lipschitz
    if residual is not None:
        res, _ = as_matrix(residual)
        bound += lipschitz * float(row_norms(res).sum())
    n_features = len(coeff_list)
    if n_features == 0:
        return bound
    eps_each = epsilon / n_features
    for coeff, var in zip(coeff_list, var_list):
        norm = float(np.linalg.norm(np.atleast_1d(np.asarray(coeff, dtype=float))))
        bound += regret_bound_branch(norm, var, lipschitz, eps_each)
    return bound


def power_law_sparsity(alpha, horizon):
    """Sparsity of exact power-law coefficients n^(-alpha), n = 1..T.

    Evaluates the finite sums directly; grows like T^(2-2*alpha) for
    alpha in (0.5, 1).
    """
    if not 0.5 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (0.5, 1), got {alpha}")
    if horizon < 1:
        raise InvalidParameterError(f"horizon must be >= 1, got {horizon}")
    n = np.arange(1, horizon + 1, dtype=float)
    weights = n**-alpha
    total = float(weights.sum())
    return total * total / float((weights * weights).sum())
