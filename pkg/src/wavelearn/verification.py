"""Empirical property suites for the wavelet lemmas and bound dominance.

Each check runs a seeded batch of random instances and verifies a claimed
identity or inequality on every one, allowing only tiny float slack. The
checks back both the `verify` CLI subcommand and the acceptance tests, which
invoke them at their full trial counts.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dictionaries import haar_matrix
from .freegrad import FreeGrad, freegrad_regret_bound
from .harness import example_comparator
from .learners import SparseCoder
from .dictionaries import MatrixDictionary
from .signals import as_matrix, row_norms
from .stats import comparator_stats, sizen_bound, sparsity_measure
from .transform import (
    detail_sequence,
    haar_analyze,
    haar_synthesize,
    local_average,
    scale_regularity,
)

INEQ_SLACK = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _leq(lhs, rhs, slack=INEQ_SLACK):
    return lhs <= rhs + slack * max(1.0, abs(rhs))


def _close(a, b, rel):
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def random_comparator(rng, horizon, dim):
    """A random comparator from a mixed family of shapes (values O(1))."""
    kind = rng.integers(0, 6)
    if kind == 0:  # iid gaussian
        return rng.normal(size=(horizon, dim))
    if kind == 1:  # random walk
        return np.cumsum(rng.normal(scale=0.3, size=(horizon, dim)), axis=0)
    if kind == 2:  # piecewise constant with a few switches
        switches = int(rng.integers(0, 6))
        cuts = np.sort(rng.choice(np.arange(1, horizon), size=min(switches, horizon - 1), replace=False)) if switches else []
        u = np.empty((horizon, dim))
        level = rng.normal(size=dim)
        prev = 0
        for cut in list(cuts) + [horizon]:
            u[prev:cut] = level
            level = rng.normal(size=dim)
            prev = cut
        return u
    if kind == 3:  # smooth sinusoid
        t = np.arange(horizon)
        freq = rng.uniform(0.5, 4.0, size=dim)
        phase = rng.uniform(0, 2 * math.pi, size=dim)
        return np.sin(2 * math.pi * freq[None, :] * t[:, None] / horizon + phase[None, :])
    if kind == 4:
        u = example_comparator("outlier", horizon, int(rng.integers(0, int(math.sqrt(horizon)) + 1)))
        return np.tile(u[:, None], (1, dim))
    u = example_comparator("oscillation", horizon, int(rng.integers(0, horizon)))
    return np.tile(u[:, None], (1, dim))


def piecewise_constant(rng, horizon, dim, switches):
    """Exactly ``switches`` switches at random positions, random levels."""
    positions = np.sort(
        rng.choice(np.arange(1, horizon), size=switches, replace=False)
    ) if switches else np.array([], dtype=int)
    u = np.empty((horizon, dim))
    prev = 0
    level = rng.normal(size=dim)
    for cut in list(positions) + [horizon]:
        u[prev:cut] = level
        # force an actual change of level between segments
        level = level + rng.normal(size=dim) + 0.1
        prev = cut
    return u


def check_haar_basis(max_m=10):
    """Orthogonality and round-trip identities for Haar_1 .. Haar_max_m."""
    rng = np.random.default_rng(0)
    worst_gram = 0.0
    worst_round = 0.0
    for m in range(1, max_m + 1):
        horizon = 1 << m
        mat = haar_matrix(m)
        normalized = mat / np.sqrt((mat * mat).sum(axis=0))
        gram = normalized.T @ normalized
        worst_gram = max(worst_gram, float(np.abs(gram - np.eye(horizon)).max()))
        # wavelet columns sum to zero, the all-one column sums to T
        sums = mat.sum(axis=0)
        if abs(sums[0] - horizon) > 0 or np.abs(sums[1:]).max() > 0:
            return CheckResult("haar basis", False, f"column sums wrong at m={m}")
        signal = rng.normal(size=(horizon, 2))
        back = haar_synthesize(haar_analyze(signal))
        scale = max(1.0, float(np.abs(signal).max()))
        worst_round = max(worst_round, float(np.abs(back - signal).max()) / scale)
    passed = worst_gram <= 1e-12 and worst_round <= 1e-9
    return CheckResult(
        "haar basis",
        passed,
        f"max |Gram - I| = {worst_gram:.2e}, max round-trip err = {worst_round:.2e}",
    )


def _location_regularity(coeffs, scale, location):
    """Within-support path length and variability of one (j, l) detail block,
    computed literally from the reconstructed scale-j detail."""
    z, _ = as_matrix(detail_sequence(coeffs, scale))
    width = 1 << scale
    block = z[(location - 1) * width : location * width]
    path = float(row_norms(block[1:] - block[:-1]).sum())
    variability = float(row_norms(block).sum())
    return path, variability


def check_wavelet_lemmas(trials=200, seed=7):
    """The transform-domain lemma suite on random comparators.

    Energy identity, the all-one/average identity, the per-(j,l) coefficient
    identity, per-scale dominance of path length and variability, the
    max-deviation-from-average bound, and switching sparsity.
    """
    rng = np.random.default_rng(seed)
    horizons = [8, 16, 32, 64, 128, 256]
    dims = [1, 3]
    for trial in range(trials):
        horizon = int(rng.choice(horizons))
        dim = int(rng.choice(dims))
        u = random_comparator(rng, horizon, dim)
        coeffs = haar_analyze(u)
        st = comparator_stats(u)

        if not _close(st.energy, coeffs.energy(), 1e-9):
            return CheckResult("wavelet lemmas", False,
                               f"trial {trial}: energy identity broke")
        allone_norm = float(np.linalg.norm(coeffs.allone))
        avg_norm = float(np.linalg.norm(st.average)) * math.sqrt(horizon)
        if not _close(allone_norm, avg_norm, 1e-12):
            return CheckResult("wavelet lemmas", False,
                               f"trial {trial}: all-one coefficient identity broke")
        if not _close(st.second_variability, coeffs.wavelet_energy(), 1e-9):
            return CheckResult("wavelet lemmas", False,
                               f"trial {trial}: centered energy identity broke")

        for scale in coeffs.scales():
            path_j, var_j = scale_regularity(coeffs, scale)
            if not _leq(path_j, st.path_length) or not _leq(var_j, st.first_variability):
                return CheckResult("wavelet lemmas", False,
                                   f"trial {trial}: per-scale dominance broke at j={scale}")
            for location in range(1, (horizon >> scale) + 1):
                coeff_norm = float(np.linalg.norm(coeffs.coefficient(scale, location)))
                p_loc, s_loc = _location_regularity(coeffs, scale, location)
                if not _close(coeff_norm, math.sqrt(p_loc * s_loc / 2.0), 1e-9):
                    return CheckResult(
                        "wavelet lemmas", False,
                        f"trial {trial}: coefficient identity broke at ({scale},{location})")

        deviations = row_norms(u - st.average)
        if not _leq(float(deviations.max()), st.path_length):
            return CheckResult("wavelet lemmas", False,
                               f"trial {trial}: |u_t - mean| <= P broke")

        switches = int(rng.integers(0, 6))
        pw = piecewise_constant(rng, horizon, dim, switches)
        pw_coeffs = haar_analyze(pw)
        limit = switches * math.log2(horizon)
        count = pw_coeffs.nonzero_count()
        if count > limit:
            return CheckResult("wavelet lemmas", False,
                               f"trial {trial}: {count} nonzero coeffs for K={switches}")
        components = [vec for _, vec in pw_coeffs.wavelet_items()]
        if switches and sparsity_measure(components) > limit + INEQ_SLACK:
            return CheckResult("wavelet lemmas", False,
                               f"trial {trial}: sparsity measure above K log2 T")
    return CheckResult("wavelet lemmas", True, f"{trials} comparators checked")


def check_local_averaging(trials=200, seed=11):
    """Local averaging dominance for P, first/second variability, S, E."""
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        horizon = int(rng.integers(4, 257))
        dim = int(rng.choice([1, 3]))
        u = random_comparator(rng, 1 << int(math.log2(horizon)) if False else horizon, dim)
        start = int(rng.integers(0, horizon))
        length = int(rng.integers(1, horizon - start + 1))
        w = local_average(u, start, length)
        a, b = comparator_stats(u), comparator_stats(w)
        checks = [
            (b.path_length, a.path_length),
            (b.first_variability, a.first_variability),
            (b.second_variability, a.second_variability),
            (b.norm_sum, a.norm_sum),
            (b.energy, a.energy),
        ]
        for got, limit in checks:
            if not _leq(got, limit):
                return CheckResult(
                    "local averaging", False,
                    f"trial {trial}: averaging increased a statistic "
                    f"({got} > {limit})")
    return CheckResult("local averaging", True, f"{trials} windows checked")


def check_stats_dominance(trials=500, seed=13):
    """The comparator-statistics dominance chain on random comparators."""
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        horizon = int(rng.integers(1, 257))
        dim = int(rng.choice([1, 2, 3]))
        u = random_comparator(rng, horizon, dim) if horizon >= 2 else rng.normal(size=(1, dim))
        st = comparator_stats(u)
        avg_term = float(np.linalg.norm(st.average)) * math.sqrt(horizon)
        root_e = math.sqrt(st.energy)
        root_ms = math.sqrt(st.max_range * st.norm_sum)
        ok = (
            _leq(avg_term, root_e)
            and _leq(root_e, root_ms)
            and _leq(st.first_variability, 2.0 * st.norm_sum)
            and _leq(st.second_variability, 2.0 * st.max_range * st.first_variability)
            and _leq(st.second_variability, 4.0 * st.max_range * st.norm_sum)
            and _leq(st.path_length, 2.0 * st.first_variability)
            and _leq(
                avg_term + math.sqrt(st.path_length * st.first_variability),
                root_ms + 2.0 * math.sqrt(2.0 * st.path_length * st.norm_sum),
            )
        )
        if not ok:
            return CheckResult("stats dominance chain", False,
                               f"trial {trial}: chain broke (T={horizon}, d={dim})")
    return CheckResult("stats dominance chain", True, f"{trials} comparators checked")


def _gradient_stream(family, rng, horizon, dim, lipschitz):
    """Oblivious gradient stream of one adversary family, norms <= G."""
    basis = np.eye(dim)
    if family == 0:  # fully aligned
        return np.tile(-lipschitz * basis[0], (horizon, 1))
    if family == 1:  # alternating
        signs = np.where(np.arange(horizon) % 2 == 0, 1.0, -1.0)
        return lipschitz * signs[:, None] * basis[0]
    if family == 2:  # random signed basis vectors
        cols = rng.integers(0, dim, size=horizon)
        signs = rng.choice([-1.0, 1.0], size=horizon)
        return lipschitz * signs[:, None] * basis[cols]
    if family == 3:  # random unit vectors
        g = rng.normal(size=(horizon, dim))
        return lipschitz * g / np.maximum(row_norms(g), 1e-300)[:, None]
    # random in-ball
    g = rng.normal(size=(horizon, dim))
    unit = g / np.maximum(row_norms(g), 1e-300)[:, None]
    return lipschitz * rng.random(horizon)[:, None] * unit


def freegrad_run(gradients, lipschitz, epsilon, adversarial=False):
    """Run one FreeGrad instance; returns (predictions, player linear loss A)."""
    arr, _ = as_matrix(gradients)
    horizon, dim = arr.shape
    learner = FreeGrad(dim, lipschitz, epsilon)
    predictions = np.empty((horizon, dim))
    total = 0.0
    for t in range(horizon):
        x = learner.predict()
        if adversarial:
            norm = float(np.linalg.norm(x))
            g = (lipschitz / norm) * x if norm > 0 else lipschitz * np.eye(dim)[0]
            arr[t] = g
        total += float(arr[t] @ x)
        predictions[t] = x
        learner.update(arr[t])
    return predictions, total, learner


def check_freegrad_dominance(trials=1000, seed=17, comparator_grid=(0.0, 0.1, 1.0, 10.0)):
    """Realized static regret never exceeds the closed-form bound.

    Uses the worst comparator direction in closed form: against any
    comparator of norm r the realized regret is at most A + r |s_T|, which
    is compared to the bound at norm r.
    """
    rng = np.random.default_rng(seed)
    worst_margin = math.inf
    for trial in range(trials):
        dim = int(rng.choice([1, 2, 5]))
        lipschitz = float(rng.choice([0.25, 1.0, 3.7]))
        epsilon = float(rng.choice([0.01, 1.0, 10.0]))
        horizon = int(rng.integers(1, 513))
        family = trial % 6
        adversarial = family == 5
        stream = (
            np.zeros((horizon, dim))
            if adversarial
            else _gradient_stream(family, rng, horizon, dim, lipschitz)
        )
        _, total, learner = freegrad_run(stream, lipschitz, epsilon, adversarial)
        s_norm = float(np.linalg.norm(learner.grad_sum))
        for r in comparator_grid:
            realized = total + r * s_norm
            bound = freegrad_regret_bound(r, learner.variance, lipschitz, epsilon)
            margin = bound - realized
            worst_margin = min(worst_margin, margin)
            if not _leq(realized, bound):
                return CheckResult(
                    "freegrad bound dominance", False,
                    f"trial {trial}: regret {realized} > bound {bound} at |u|={r}")
    return CheckResult(
        "freegrad bound dominance", True,
        f"{trials} sequences, min bound margin {worst_margin:.3g}")


def check_freegrad_scale_freeness(trials=50, seed=19, scales=(0.5, 3.0, 100.0), rtol=1e-12):
    """Full prediction sequences are invariant to scaling (g, G) -> (c g, c G)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(trials):
        dim = int(rng.choice([1, 2, 5]))
        lipschitz = float(rng.choice([0.25, 1.0, 3.7]))
        epsilon = float(rng.choice([0.01, 1.0, 10.0]))
        horizon = int(rng.integers(1, 513))
        stream = _gradient_stream(int(rng.integers(0, 5)), rng, horizon, dim, lipschitz)
        base, _, _ = freegrad_run(stream.copy(), lipschitz, epsilon)
        for c in scales:
            scaled, _, _ = freegrad_run(c * stream, c * lipschitz, epsilon)
            denom = np.maximum(np.abs(base), 1e-300)
            rel = float((np.abs(scaled - base) / denom).max()) if base.size else 0.0
            worst = max(worst, rel)
            if rel > rtol:
                return CheckResult(
                    "freegrad scale-freeness", False,
                    f"trial {trial}, c={c}: relative deviation {rel:.3e}")
    return CheckResult(
        "freegrad scale-freeness", True,
        f"{trials} sequences x {len(scales)} scales, max relative deviation {worst:.2e}")


def random_orthogonal_instance(rng, horizon, dim, n_features, with_residual=True):
    """Random orthonormal dictionary blocks, comparator in (or near) its span.

    Returns (blocks (T, N, d), comparator (T, d), coefficients (N,),
    residual (T, d)).
    """
    flat = rng.normal(size=(horizon * dim, n_features))
    q, _ = np.linalg.qr(flat)
    blocks = q.T.reshape(n_features, horizon, dim).transpose(1, 0, 2)
    coefficients = rng.normal(scale=rng.choice([0.1, 1.0, 5.0]), size=n_features)
    u_flat = q @ coefficients
    residual_flat = np.zeros(horizon * dim)
    if with_residual:
        w = rng.normal(size=horizon * dim)
        w -= q @ (q.T @ w)
        residual_flat = 0.5 * w
    u = (u_flat + residual_flat).reshape(horizon, dim)
    return blocks, u, coefficients, residual_flat.reshape(horizon, dim)


def check_sizen_dominance(trials=200, seed=23):
    """Realized dynamic regret of SparseCoder never exceeds sizen_bound."""
    rng = np.random.default_rng(seed)
    worst_margin = math.inf
    for trial in range(trials):
        horizon = int(rng.choice([16, 32, 64, 128, 256]))
        dim = int(rng.choice([1, 2, 3]))
        n_features = int(rng.integers(2, 9))
        lipschitz = float(rng.choice([0.5, 1.0, 3.0]))
        epsilon = float(rng.choice([0.3, 1.0, 5.0]))
        blocks, u, coefficients, residual = random_orthogonal_instance(
            rng, horizon, dim, n_features, with_residual=bool(rng.integers(0, 2))
        )
        coder = SparseCoder(
            MatrixDictionary(blocks), dim=dim, lipschitz=lipschitz, epsilon=epsilon
        )
        adversarial = bool(rng.integers(0, 2))
        realized = 0.0
        for t in range(1, horizon + 1):
            x = coder.predict()
            if adversarial:
                err = x - u[t - 1]
                norm = float(np.linalg.norm(err))
                g = (lipschitz / norm) * err if norm > 0 else lipschitz * np.eye(dim)[0]
            else:
                raw = rng.normal(size=dim)
                g = lipschitz * raw / max(float(np.linalg.norm(raw)), 1e-300)
            realized += float(g @ (x - u[t - 1]))
            coder.update(g)
        bound = sizen_bound(
            coefficients, coder.feature_variances(), residual, lipschitz, epsilon
        )
        worst_margin = min(worst_margin, bound - realized)
        if not _leq(realized, bound):
            return CheckResult(
                "sparse-coding bound dominance", False,
                f"trial {trial}: regret {realized} > bound {bound}")
    return CheckResult(
        "sparse-coding bound dominance", True,
        f"{trials} instances, min bound margin {worst_margin:.3g}")


def run_all(fast=False):
    """Run every suite; used by the `verify` CLI subcommand."""
    if fast:
        plan = [
            lambda: check_haar_basis(6),
            lambda: check_wavelet_lemmas(40),
            lambda: check_local_averaging(40),
            lambda: check_stats_dominance(100),
            lambda: check_freegrad_dominance(120),
            lambda: check_freegrad_scale_freeness(10),
            lambda: check_sizen_dominance(30),
        ]
    else:
        plan = [
            lambda: check_haar_basis(10),
            lambda: check_wavelet_lemmas(200),
            lambda: check_local_averaging(200),
            lambda: check_stats_dominance(500),
            lambda: check_freegrad_dominance(300),
            lambda: check_freegrad_scale_freeness(30),
            lambda: check_sizen_dominance(100),
        ]
    return [check() for check in plan]
