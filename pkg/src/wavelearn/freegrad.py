"""FreeGrad: scale-free, gradient-adaptive, parameter-free static OLO.

The learner keeps two sufficient statistics: the gradient sum ``grad_sum``
(a d-vector, written ``s`` below) and a scalar ``variance`` accumulator
(written ``v``), initialized at the squared Lipschitz bound G^2. With
confidence budget ``eps``, the prediction is the closed form

    x = -eps * s * (2v + G|s|) * G^2 / (2 * (v + G|s|)^2 * sqrt(v))
        * exp(|s|^2 / (2v + 2G|s|)),

where |s| is the Euclidean norm of s. The exponential factor grows like
exp(t/2) under adversarially aligned gradients, so the magnitude is
assembled in log space and saturated at the largest finite float; the
direction is always preserved.

For d > 1 the variance update uses the squared gradient norm, so one scalar
v serves the whole vector learner. Predictions are invariant to any common
positive rescaling of the gradients and the Lipschitz constant.
"""

import math

import numpy as np

from .errors import InvalidParameterError, LipschitzViolationError

# Saturation point for the prediction magnitude.
LOG_MAGNITUDE_CAP = math.log(np.finfo(np.float64).max)

# Relative slack when checking gradient norms against the Lipschitz bound,
# absorbing float error accumulated in surrogate gradients.
GRAD_NORM_RTOL = 1e-9


def log_prediction_magnitude(grad_sum_norm, variance, lipschitz, epsilon):
    """Log of the prediction magnitude; -inf when the gradient sum is zero.

    Works elementwise on arrays as well as on scalars, so the vectorized
    Haar learner and the single-instance learner share one formula.
    """
    ga = lipschitz * grad_sum_norm
    with np.errstate(divide="ignore"):
        return (
            np.log(epsilon)
            + np.log(grad_sum_norm)
            + np.log(2.0 * variance + ga)
            + 2.0 * np.log(lipschitz)
            - np.log(2.0)
            - 2.0 * np.log(variance + ga)
            - 0.5 * np.log(variance)
            + grad_sum_norm * grad_sum_norm / (2.0 * variance + 2.0 * ga)
        )


class FreeGrad:
    """One parameter-free unconstrained learner instance (any dimension).

    State is single-owner mutable: one instance must not be updated
    concurrently, distinct instances are independent.
    """

    def __init__(self, dim, lipschitz, epsilon):
        if int(dim) < 1:
            raise InvalidParameterError(f"dim must be a positive integer, got {dim}")
        if lipschitz <= 0:
            raise InvalidParameterError(f"lipschitz must be positive, got {lipschitz}")
        if epsilon <= 0:
            raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
        self.dim = int(dim)
        self.lipschitz = float(lipschitz)
        self.epsilon = float(epsilon)
        self.grad_sum = np.zeros(self.dim)
        self.variance = self.lipschitz**2
        self.rounds_seen = 0

    def predict(self):
        """Closed-form prediction from the current state."""
        s = self.grad_sum
        norm_s = math.sqrt(float(s @ s))
        if norm_s == 0.0:
            return np.zeros(self.dim)
        logmag = log_prediction_magnitude(
            norm_s, self.variance, self.lipschitz, self.epsilon
        )
        mag = math.exp(min(float(logmag), LOG_MAGNITUDE_CAP))
        return (-mag / norm_s) * s

    def update(self, gradient):
        """Absorb one loss gradient: s += g, v += |g|^2.

        Gradients whose norm exceeds the Lipschitz bound (beyond relative
        slack) are rejected without touching the state; the regret guarantee
        is conditional on the bound, so violations are errors, not clamps.
        """
        g = np.atleast_1d(np.asarray(gradient, dtype=float))
        if g.shape != (self.dim,):
            raise InvalidParameterError(
                f"gradient shape {g.shape} does not match learner dim {self.dim}"
            )
        sq = float(g @ g)
        limit = self.lipschitz * (1.0 + GRAD_NORM_RTOL)
        if sq > limit * limit:
            raise LipschitzViolationError(
                f"gradient norm {math.sqrt(sq)} exceeds Lipschitz bound "
                f"{self.lipschitz}"
            )
        self.grad_sum = self.grad_sum + g
        self.variance += sq
        self.rounds_seen += 1


def regret_bound_branch(comparator_norm, variance_final, lipschitz, epsilon):
    """The comparator-dependent part of the FreeGrad static regret bound.

    max( 2|u| sqrt(V log+(2|u|V / (eps G^2))),
         4|u| G log(4|u| sqrt(V) / (eps G)) ),
    with log+ = max(0, log) and the second branch treated as 0 when its log
    argument is <= 1. Zero for a zero comparator.
    """
    un = float(comparator_norm)
    if un == 0.0:
        return 0.0
    arg1 = 2.0 * un * variance_final / (epsilon * lipschitz**2)
    sqrt_branch = 2.0 * un * math.sqrt(
        variance_final * max(0.0, math.log(arg1))
    )
    arg2 = 4.0 * un * math.sqrt(variance_final) / (epsilon * lipschitz)
    log_branch = 4.0 * un * lipschitz * math.log(arg2) if arg2 > 1.0 else 0.0
    return max(sqrt_branch, log_branch)


def freegrad_regret_bound(comparator, variance_final, lipschitz, epsilon):
    """Closed-form static regret bound eps*G + max(sqrt branch, log branch).

    ``comparator`` may be a scalar or a d-vector; only its Euclidean norm
    enters. ``variance_final`` is V_T = G^2 + sum of squared gradient norms
    from the run being bounded.
    """
    if lipschitz <= 0 or epsilon <= 0:
        raise InvalidParameterError("lipschitz and epsilon must be positive")
    if variance_final < lipschitz**2 * (1.0 - 1e-12):
        raise InvalidParameterError(
            f"variance_final {variance_final} below lipschitz^2 {lipschitz**2}"
        )
    un = float(np.linalg.norm(np.atleast_1d(np.asarray(comparator, dtype=float))))
    return epsilon * lipschitz + regret_bound_branch(
        un, variance_final, lipschitz, epsilon
    )
