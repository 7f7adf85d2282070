"""Power-law verification tooling.

Sorted transform-domain magnitude spectra (Fourier or Haar), log-log linear
fits over the largest coefficients, and plot-data emission (delimited text
plus a self-contained SVG; no display needed).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .transform import haar_analyze


@dataclass
class PowerLawFit:
    alpha: float      # fitted decay exponent (negated log-log slope)
    intercept: float  # log-log intercept
    top_k: int        # number of leading magnitudes used, ranked descending
    residual: float   # sum of squared log-log residuals over the fitted ranks


def dft_magnitudes(series):
    """Descending magnitudes of the real-input DFT, second half discarded.

    Keeps bins 0..floor(T/2) (the rest is conjugate-symmetric for real
    input), takes absolute values, sorts descending.
    """
    z = np.asarray(series, dtype=float)
    if z.ndim != 1 or z.shape[0] < 2:
        raise InvalidParameterError("series must be 1-D with at least 2 samples")
    mags = np.abs(np.fft.rfft(z))
    return np.sort(mags)[::-1].copy()


def haar_magnitudes(series):
    """Descending absolute normalized-Haar coefficients (all-one included)."""
    z = np.asarray(series, dtype=float)
    if z.ndim != 1:
        raise InvalidParameterError("series must be 1-D")
    coeffs = haar_analyze(z)
    mags = [abs(float(coeffs.allone[0]))]
    for level in coeffs.levels.values():
        mags.extend(np.abs(level[:, 0]))
    return np.sort(np.array(mags))[::-1].copy()


def power_law_fit(magnitudes, top_k=100):
    """Ordinary least squares of log magnitude against log rank (1-based).

    Uses the ``top_k`` largest magnitudes only; all of them must be strictly
    positive.
    """
    if top_k < 2:
        raise InvalidParameterError(f"top_k must be >= 2, got {top_k}")
    mags = np.asarray(magnitudes, dtype=float)
    if mags.shape[0] < top_k:
        raise InvalidParameterError(
            f"need at least {top_k} magnitudes, got {mags.shape[0]}"
        )
    top = mags[:top_k]
    if np.any(top <= 0.0):
        raise InvalidParameterError(
            f"top {top_k} magnitudes must be strictly positive"
        )
    x = np.log(np.arange(1, top_k + 1, dtype=float))
    y = np.log(top)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(((y - (slope * x + intercept)) ** 2).sum())
    return PowerLawFit(
        alpha=float(-slope), intercept=float(intercept), top_k=int(top_k),
        residual=residual,
    )


def fitted_magnitudes(fit, ranks):
    """Fit line evaluated at the given 1-based ranks."""
    r = np.asarray(ranks, dtype=float)
    return np.exp(fit.intercept) * r ** (-fit.alpha)


def write_fit_data(path, magnitudes, fit):
    """Delimited plot data: rank, magnitude, fitted value (full precision)."""
    mags = np.asarray(magnitudes, dtype=float)
    fitted = fitted_magnitudes(fit, np.arange(1, mags.shape[0] + 1))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("rank,magnitude,fitted\n")
        for rank, (mag, fv) in enumerate(zip(mags, fitted), 1):
            handle.write(f"{rank},{mag!r},{fv!r}\n")


def write_fit_plot(path, magnitudes, fit, title=None):
    """Self-contained SVG: log-log magnitude scatter with the fitted line."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    mags = np.asarray(magnitudes, dtype=float)
    positive = mags[mags > 0.0]
    ranks = np.arange(1, positive.shape[0] + 1)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(ranks, positive, ".", markersize=3, label="sorted magnitudes")
    fit_ranks = np.arange(1, fit.top_k + 1)
    ax.loglog(
        fit_ranks,
        fitted_magnitudes(fit, fit_ranks),
        "--",
        label=f"fit, alpha={fit.alpha:.3f}",
    )
    ax.set_xlabel("rank")
    ax.set_ylabel("coefficient magnitude")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def log_log_slope(sizes, values):
    """Least-squares slope of log(values) against log(sizes)."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if x.shape[0] < 2:
        raise InvalidParameterError("need at least two points for a slope")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
