"""Composite online learners built from per-feature FreeGrad instances.

FeatureLearner is the single-feature reduction: it turns the global OLO game
into a static problem for its column by exchanging surrogate gradients with
an inner FreeGrad. SparseCoder runs one FeatureLearner per dictionary column
(budget eps/N each) and sums the active contributions. HaarOLR is the tuned
fixed-horizon wavelet learner with array state, and AnytimeHaarOLR wraps it
with the doubling trick.

A composite learner is a single logical actor: predict() then update(g),
strictly alternating. Predictions are (d,) arrays and are formed by a
fixed-order sum, so sequential runs are reproducible bit for bit.
"""

import math

import numpy as np

from .dictionaries import HaarDictionary
from .errors import InvalidParameterError, LipschitzViolationError
from .freegrad import (
    GRAD_NORM_RTOL,
    LOG_MAGNITUDE_CAP,
    FreeGrad,
    log_prediction_magnitude,
)


def _feature_is_zero(value):
    if np.isscalar(value):
        return value == 0
    return not np.any(value)


class FeatureLearner:
    """One dictionary column and its inner parameter-free learner.

    Two wirings, chosen at construction:

    * scalar coefficient (default): the inner learner is 1-dimensional, the
      feature value may be a scalar or a d-vector, and the surrogate gradient
      is the inner product of the loss gradient with the feature value.
    * vector coefficient: the inner learner is d-dimensional, the feature
      value must be a scalar, and the surrogate gradient is value * g.

    On rounds where the feature value is zero the contribution is zero and
    the inner learner is neither queried nor updated.
    """

    def __init__(self, lipschitz, epsilon, dim=1, vector_coefficient=False):
        self.dim = int(dim)
        self.vector_coefficient = bool(vector_coefficient)
        inner_dim = self.dim if vector_coefficient else 1
        self.inner = FreeGrad(inner_dim, lipschitz, epsilon)
        self._value = None

    def contribution(self, value):
        """Prediction contribution for this round, given the feature value."""
        if np.isscalar(value):
            norm = abs(value)
        else:
            value = np.asarray(value, dtype=float)
            norm = float(np.linalg.norm(value))
        if norm > 1.0 + 1e-9:
            raise InvalidParameterError(
                f"feature value norm {norm} exceeds the protocol bound 1"
            )
        if np.isscalar(value) and not self.vector_coefficient and self.dim != 1:
            raise InvalidParameterError(
                "scalar feature values with a scalar coefficient require dim == 1"
            )
        self._value = value
        if _feature_is_zero(value):
            return np.zeros(self.dim)
        if self.vector_coefficient:
            return float(value) * self.inner.predict()
        coeff = float(self.inner.predict()[0])
        if np.isscalar(value):
            return np.full(1, coeff * value)
        return coeff * value

    def absorb(self, gradient):
        """Feed the round's loss gradient; no-op when the feature was zero."""
        value = self._value
        self._value = None
        if value is None or _feature_is_zero(value):
            return
        g = np.atleast_1d(np.asarray(gradient, dtype=float))
        if self.vector_coefficient:
            self.inner.update(float(value) * g)
        elif np.isscalar(value):
            self.inner.update(value * float(g[0]))
        else:
            self.inner.update(float(g @ value))


class SparseCoder:
    """General sparse-coding aggregator over a streaming dictionary.

    Each dictionary column gets a lazily created FeatureLearner with
    confidence budget eps/N; the round's prediction is the fixed-order sum
    of the active contributions, and the gradient is broadcast only to the
    learners that were active.
    """

    def __init__(self, dictionary, dim=1, lipschitz=1.0, epsilon=1.0):
        if lipschitz <= 0 or epsilon <= 0:
            raise InvalidParameterError("lipschitz and epsilon must be positive")
        self.dictionary = dictionary
        self.dim = int(dim)
        self.lipschitz = float(lipschitz)
        self.epsilon = float(epsilon)
        self.eps_each = float(epsilon) / dictionary.size
        self.learners = {}
        self.rounds_done = 0
        self.active_count_history = []
        self._active = None

    def _learner_for(self, column, value):
        learner = self.learners.get(column)
        if learner is None:
            learner = FeatureLearner(
                self.lipschitz,
                self.eps_each,
                dim=self.dim,
                vector_coefficient=np.isscalar(value) and self.dim > 1,
            )
            self.learners[column] = learner
        return learner

    def predict(self):
        t = self.rounds_done + 1
        pairs = self.dictionary.active(t)
        x = np.zeros(self.dim)
        active = []
        for column, value in pairs:
            if _feature_is_zero(value):
                continue
            learner = self._learner_for(column, value)
            x = x + learner.contribution(value)
            active.append(learner)
        self._active = active
        self.active_count_history.append(len(active))
        return x

    def update(self, gradient):
        if self._active is None:
            raise InvalidParameterError("update() called before predict()")
        g = np.atleast_1d(np.asarray(gradient, dtype=float))
        norm = float(np.sqrt(g @ g))
        if norm > self.lipschitz * (1.0 + GRAD_NORM_RTOL):
            raise LipschitzViolationError(
                f"gradient norm {norm} exceeds Lipschitz bound {self.lipschitz}"
            )
        for learner in self._active:
            learner.absorb(g)
        self._active = None
        self.rounds_done += 1

    def feature_variances(self):
        """Final variance accumulator per column (init value for untouched ones)."""
        init = self.lipschitz**2
        out = np.full(self.dictionary.size, init)
        for column, learner in self.learners.items():
            out[column] = learner.inner.variance
        return out


class HaarOLR:
    """Fixed-horizon wavelet learner (T = 2^m rounds, d-dimensional game).

    Semantically a SparseCoder over HaarDictionary(m) with d-dimensional
    (vector-coefficient) inner learners, but the per-column state lives in
    flat arrays: S (T, d) gradient sums and V (T,) variances, touched through
    precomputed active-column index/sign tables. Memory is O(T d) and each
    round costs O(d log T).
    """

    def __init__(self, m, dim=1, lipschitz=1.0, epsilon=1.0):
        if m < 1:
            raise InvalidParameterError(f"m must be a positive integer, got {m}")
        if lipschitz <= 0 or epsilon <= 0:
            raise InvalidParameterError("lipschitz and epsilon must be positive")
        self.m = int(m)
        self.dim = int(dim)
        self.horizon = 1 << m
        self.lipschitz = float(lipschitz)
        self.epsilon = float(epsilon)
        self.eps_each = float(epsilon) / self.horizon
        self.S = np.zeros((self.horizon, self.dim))
        self.V = np.full(self.horizon, self.lipschitz**2)
        self.rounds_done = 0
        self.active_count_history = []
        self._pending = None
        self._build_tables()

    def _build_tables(self):
        t = np.arange(1, self.horizon + 1)[:, None]
        scales = np.arange(self.m, 0, -1)[None, :]
        width = 1 << scales
        location = (t + width - 1) // width
        columns = (self.horizon >> scales) + location - 1
        first_half = (t - width * (location - 1)) <= (width >> 1)
        self._idx = np.concatenate(
            [np.zeros((self.horizon, 1), dtype=np.int64), columns.astype(np.int64)],
            axis=1,
        )
        self._sgn = np.concatenate(
            [np.ones((self.horizon, 1)), np.where(first_half, 1.0, -1.0)], axis=1
        )

    def predict(self):
        if self.rounds_done >= self.horizon:
            raise InvalidParameterError(
                f"horizon {self.horizon} exhausted; wrap with AnytimeHaarOLR to continue"
            )
        idx = self._idx[self.rounds_done]
        sgn = self._sgn[self.rounds_done]
        s = self.S[idx]
        v = self.V[idx]
        norms = np.sqrt((s * s).sum(axis=1))
        logmag = log_prediction_magnitude(norms, v, self.lipschitz, self.eps_each)
        mag = np.exp(np.minimum(logmag, LOG_MAGNITUDE_CAP))
        direction = s / np.where(norms > 0.0, norms, 1.0)[:, None]
        x = -((mag * sgn)[:, None] * direction).sum(axis=0) + 0.0
        self._pending = (idx, sgn)
        self.active_count_history.append(len(idx))
        return x

    def update(self, gradient):
        if self._pending is None:
            raise InvalidParameterError("update() called before predict()")
        g = np.atleast_1d(np.asarray(gradient, dtype=float))
        sq = float(g @ g)
        limit = self.lipschitz * (1.0 + GRAD_NORM_RTOL)
        if sq > limit * limit:
            raise LipschitzViolationError(
                f"gradient norm {math.sqrt(sq)} exceeds Lipschitz bound {self.lipschitz}"
            )
        idx, sgn = self._pending
        self.S[idx] += sgn[:, None] * g
        self.V[idx] += sq
        self._pending = None
        self.rounds_done += 1

    def feature_variances(self):
        return self.V.copy()

    def as_sparse_coder(self):
        """Object-composed twin with identical semantics (for cross-checks)."""
        return SparseCoder(
            HaarDictionary(self.m),
            dim=self.dim,
            lipschitz=self.lipschitz,
            epsilon=self.epsilon,
        )


class AnytimeHaarOLR:
    """Doubling-trick wrapper: block m lasts 2^m rounds on a fresh HaarOLR.

    All inner state is discarded at block boundaries (after cumulative rounds
    2, 6, 14, 30, ...). The fixed-horizon hyperparameter is set to 1.
    """

    def __init__(self, dim=1, lipschitz=1.0):
        self.dim = int(dim)
        self.lipschitz = float(lipschitz)
        self.block_index = 1
        self.rounds_in_block = 0
        self.rounds_done = 0
        self.inner = HaarOLR(1, dim=self.dim, lipschitz=self.lipschitz, epsilon=1.0)
        self.active_count_history = []

    def predict(self):
        x = self.inner.predict()
        self.active_count_history.append(self.inner.active_count_history[-1])
        return x

    def update(self, gradient):
        self.inner.update(gradient)
        self.rounds_in_block += 1
        self.rounds_done += 1
        if self.rounds_in_block == (1 << self.block_index):
            self.block_index += 1
            self.rounds_in_block = 0
            self.inner = HaarOLR(
                self.block_index, dim=self.dim, lipschitz=self.lipschitz, epsilon=1.0
            )
