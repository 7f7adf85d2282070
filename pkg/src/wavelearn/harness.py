"""Environments, game runner, regret computation, and comparator generators.

A game is the usual online convex optimization loop: the learner predicts,
the environment reveals a loss and a subgradient at the prediction, the
learner absorbs the subgradient. Every emitted subgradient must respect the
environment's Lipschitz bound; the runner aborts on violations.

A single game is strictly sequential. Independent games (seeds, parameter
sweeps) can run in parallel with isolated state and isolated generators.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, LipschitzViolationError
from .signals import as_matrix, row_norms


class AbsoluteLossEnvironment:
    """Scalar absolute loss |x - z_t| against a fixed target series.

    Subgradient convention: sign(x - z_t), with 0 at equality (the kink);
    any value in [-1, 1] would be valid there, 0 minimizes the magnitude.
    """

    linear = False

    def __init__(self, targets):
        self.targets = np.asarray(targets, dtype=float)
        if self.targets.ndim != 1 or self.targets.shape[0] < 1:
            raise InvalidParameterError("targets must be a nonempty 1-D series")
        self.dim = 1
        self.lipschitz = 1.0

    @property
    def horizon(self):
        return self.targets.shape[0]

    def loss(self, t, x):
        return abs(float(x[0]) - self.targets[t - 1])

    def gradient(self, t, x):
        err = float(x[0]) - self.targets[t - 1]
        if err > 0.0:
            return 1.0
        if err < 0.0:
            return -1.0
        return 0.0

    def comparator_loss(self, t, u):
        return abs(float(u[0]) - self.targets[t - 1])


class LinearEnvironment:
    """Oblivious linear losses <g_t, x> from a fixed gradient stream."""

    linear = True

    def __init__(self, gradients, lipschitz=None):
        arr, _ = as_matrix(gradients)
        self.gradients = arr
        self.dim = arr.shape[1]
        if lipschitz is None:
            norms = row_norms(arr)
            lipschitz = float(norms.max()) if norms.size else 1.0
            lipschitz = max(lipschitz, 1e-12)
        self.lipschitz = float(lipschitz)

    @property
    def horizon(self):
        return self.gradients.shape[0]

    def loss(self, t, x):
        return float(self.gradients[t - 1] @ x)

    def gradient(self, t, x):
        return self.gradients[t - 1]


class ZeroEnvironment(LinearEnvironment):
    """All-zero gradients: the degenerate sanity environment."""

    def __init__(self, horizon, dim=1, lipschitz=1.0):
        super().__init__(np.zeros((horizon, dim)), lipschitz=lipschitz)


class SignAdversaryEnvironment:
    """Adaptive linear adversary g_t = G * x_t / |x_t| (G * e_1 at x_t = 0).

    Always charges the player |<g_t, x_t>| = G |x_t|, the worst case for a
    wealth-style learner.
    """

    linear = True

    def __init__(self, lipschitz=1.0, dim=1):
        self.lipschitz = float(lipschitz)
        self.dim = int(dim)

    def loss(self, t, x):
        return self.lipschitz * float(np.linalg.norm(x))

    def gradient(self, t, x):
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            g = np.zeros(self.dim)
            g[0] = self.lipschitz
            return g
        return (self.lipschitz / norm) * np.asarray(x, dtype=float)


@dataclass
class RegretResult:
    true_loss: float   # sum l_t(x_t) - sum l_t(u_t)
    linearized: float  # sum <g_t, x_t - u_t>


@dataclass
class GameTrace:
    """Full record of one game: predictions, gradients, per-round losses."""

    predictions: np.ndarray   # (T, d)
    gradients: np.ndarray     # (T, d)
    player_losses: np.ndarray # (T,)
    env: object
    base_forecasts: np.ndarray = None  # fine-tuning only
    adjustments: np.ndarray = None     # fine-tuning only
    implied_comparator: np.ndarray = None  # fine-tuning only: truth - base
    extras: dict = field(default_factory=dict)

    @property
    def horizon(self):
        return self.predictions.shape[0]

    @property
    def dim(self):
        return self.predictions.shape[1]

    def total_loss(self):
        return float(self.player_losses.sum())

    def comparator_losses(self, comparator):
        """Per-round losses of a comparator sequence under the revealed losses.

        For linear environments the revealed loss is <g_t, .> with the
        recorded gradient; for target-based environments it is evaluated
        directly.
        """
        u, _ = as_matrix(comparator)
        if u.shape != self.predictions.shape:
            raise InvalidParameterError(
                f"comparator shape {u.shape} does not match trace shape "
                f"{self.predictions.shape}"
            )
        if getattr(self.env, "linear", False):
            return (self.gradients * u).sum(axis=1)
        return np.array(
            [self.env.comparator_loss(t, u[t - 1]) for t in range(1, self.horizon + 1)]
        )

    def linearized_losses(self, comparator):
        u, _ = as_matrix(comparator)
        if u.shape != self.predictions.shape:
            raise InvalidParameterError("comparator shape mismatch")
        return (self.gradients * (self.predictions - u)).sum(axis=1)

    def regret_series(self, comparator):
        """Cumulative (true-loss, linearized) regret prefixes vs a comparator."""
        true_series = np.cumsum(self.player_losses - self.comparator_losses(comparator))
        lin_series = np.cumsum(self.linearized_losses(comparator))
        return true_series, lin_series


def run_game(env, learner, horizon):
    """Drive learner against env for ``horizon`` rounds; returns the trace.

    Deterministic: the learner receives exactly one gradient per round, and
    any environment Lipschitz violation aborts with a diagnostic before the
    learner state is touched.
    """
    dim = env.dim
    predictions = np.empty((horizon, dim))
    gradients = np.empty((horizon, dim))
    losses = np.empty(horizon)
    limit = env.lipschitz * (1.0 + 1e-9)
    for t in range(1, horizon + 1):
        x = np.atleast_1d(np.asarray(learner.predict(), dtype=float))
        loss = env.loss(t, x)
        g = np.atleast_1d(np.asarray(env.gradient(t, x), dtype=float))
        gnorm = math.sqrt(float(g @ g))
        if gnorm > limit:
            raise LipschitzViolationError(
                f"environment emitted gradient of norm {gnorm} > {env.lipschitz} "
                f"at round {t}"
            )
        learner.update(g)
        predictions[t - 1] = x
        gradients[t - 1] = g
        losses[t - 1] = loss
    return GameTrace(predictions, gradients, losses, env)


def dynamic_regret(trace, comparator):
    """True-loss and linearized regret of the trace against a comparator."""
    comp_losses = trace.comparator_losses(comparator)
    lin = trace.linearized_losses(comparator)
    return RegretResult(
        true_loss=float(trace.player_losses.sum() - comp_losses.sum()),
        linearized=float(lin.sum()),
    )


def zeroth_order_hold(targets, initial=0.0):
    """Base forecasts a_t = z_{t-1}, with a configurable first-round value."""
    z = np.asarray(targets, dtype=float)
    return np.concatenate([[float(initial)], z[:-1]])


def fine_tune(base_forecasts, learner, targets, env=None):
    """Predict x_t = a_t + delta_t around a base forecaster.

    ``base_forecasts`` is the full a_{1:T} series (use zeros for no side
    information, or zeroth_order_hold(targets)). The per-round loss must be
    minimized at the target with value 0; the default is the absolute loss.
    Records the adjustment stream and the implied comparator z - a.
    """
    z = np.asarray(targets, dtype=float)
    if env is None:
        env = AbsoluteLossEnvironment(z)
    horizon = z.shape[0]
    a = np.asarray(base_forecasts, dtype=float)
    if a.shape != z.shape:
        raise InvalidParameterError(
            f"base forecast shape {a.shape} does not match targets {z.shape}"
        )
    dim = env.dim
    predictions = np.empty((horizon, dim))
    adjustments = np.empty((horizon, dim))
    gradients = np.empty((horizon, dim))
    losses = np.empty(horizon)
    limit = env.lipschitz * (1.0 + 1e-9)
    for t in range(1, horizon + 1):
        delta = np.atleast_1d(np.asarray(learner.predict(), dtype=float))
        x = a[t - 1] + delta
        loss = env.loss(t, x)
        g = np.atleast_1d(np.asarray(env.gradient(t, x), dtype=float))
        gnorm = math.sqrt(float(g @ g))
        if gnorm > limit:
            raise LipschitzViolationError(
                f"loss emitted gradient of norm {gnorm} > {env.lipschitz} at round {t}"
            )
        learner.update(g)
        predictions[t - 1] = x
        adjustments[t - 1] = delta
        gradients[t - 1] = g
        losses[t - 1] = loss
    return GameTrace(
        predictions,
        gradients,
        losses,
        env,
        base_forecasts=a.copy(),
        adjustments=adjustments,
        implied_comparator=(z - a),
    )


def example_comparator(kind, horizon, k):
    """The two quantitative comparator families (1-D).

    * "outlier": all entries 1 except k consecutive entries equal to
      sqrt(T), placed from index T//2 (interior for T >= 8); requires
      k <= sqrt(T).
    * "oscillation": u_t = 1 + alpha_t / sqrt(T) with alpha_t in {-1, +1}
      switching sign exactly k times at evenly spaced positions (remainder
      spread over the earliest segments); requires k <= T - 1.
    """
    if horizon < 1:
        raise InvalidParameterError(f"horizon must be >= 1, got {horizon}")
    root = math.sqrt(horizon)
    if kind == "outlier":
        if not 0 <= k <= root:
            raise InvalidParameterError(
                f"outlier block length {k} outside [0, sqrt(T)] for T={horizon}"
            )
        u = np.ones(horizon)
        start = horizon // 2
        u[start : start + int(k)] = root
        return u
    if kind == "oscillation":
        if not 0 <= k <= horizon - 1:
            raise InvalidParameterError(
                f"switch count {k} outside [0, T-1] for T={horizon}"
            )
        segments = int(k) + 1
        base, remainder = divmod(horizon, segments)
        alpha = np.empty(horizon)
        pos = 0
        for i in range(segments):
            length = base + (1 if i < remainder else 0)
            alpha[pos : pos + length] = 1.0 if i % 2 == 0 else -1.0
            pos += length
        return 1.0 + alpha / root
    raise InvalidParameterError(f"unknown comparator kind {kind!r}")


def gen_switching_series(horizon, switch_prob, noise_half_width, seed):
    """Synthetic switching series z_t = z_{t-1} * beta_t + zeta_t, z_0 = 1.

    beta_t is -1 with probability switch_prob (else +1) and zeta_t is uniform
    on [-q, q]. Deterministic for a fixed seed: a single (T, 2) uniform block
    from numpy's default generator (PCG64) is consumed row-major, so beta_t
    is drawn before zeta_t on every step.
    """
    if not 0.0 <= switch_prob <= 1.0:
        raise InvalidParameterError(f"switch_prob {switch_prob} outside [0, 1]")
    if noise_half_width < 0.0:
        raise InvalidParameterError(f"noise_half_width {noise_half_width} < 0")
    if horizon < 1:
        raise InvalidParameterError(f"horizon must be >= 1, got {horizon}")
    rng = np.random.default_rng(seed)
    u = rng.random((horizon, 2))
    beta = np.where(u[:, 0] < switch_prob, -1.0, 1.0)
    zeta = (2.0 * u[:, 1] - 1.0) * noise_half_width
    # z_t = c_t * (z_0 + sum_{i<=t} zeta_i / c_i) with c_t the running sign
    c = np.cumprod(beta)
    return c * (1.0 + np.cumsum(zeta / c))


def load_series(path, column=1):
    """Read a plain-text delimited series: one sample per line, comma-separated
    ``timestamp,value`` columns (a header line is detected by a non-numeric
    first token and skipped). ``column`` selects the value column; extra
    columns are ignored. Values are parsed as decimal floats.
    """
    values = []
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise InvalidParameterError(f"{path}: empty series file")
    start = 0
    first_fields = [f.strip() for f in lines[0].split(",")]
    try:
        float(first_fields[0])
    except (ValueError, IndexError):
        start = 1  # header
    for lineno, line in enumerate(lines[start:], start + 1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) <= column:
            raise InvalidParameterError(
                f"{path}:{lineno}: expected at least {column + 1} columns, "
                f"got {len(fields)}"
            )
        try:
            values.append(float(fields[column]))
        except ValueError as exc:
            raise InvalidParameterError(
                f"{path}:{lineno}: cannot parse {fields[column]!r} as float"
            ) from exc
    if not values:
        raise InvalidParameterError(f"{path}: no samples found")
    return np.array(values)


def write_series(path, values, forecasts=None):
    """Write a series in the same format load_series reads (timestamps 1..T)."""
    values = np.asarray(values, dtype=float)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("timestamp,value" + (",forecast\n" if forecasts is not None else "\n"))
        for t, v in enumerate(values, 1):
            if forecasts is not None:
                handle.write(f"{t},{v!r},{float(forecasts[t - 1])!r}\n")
            else:
                handle.write(f"{t},{v!r}\n")
