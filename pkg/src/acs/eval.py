"""Evaluation metrics: kernel MMD, exact KL, mode coverage, energy curves."""

from dataclasses import dataclass

import numpy as np

from acs.core import DEFAULT_ENUM_CAP, exact_probabilities

__all__ = [
    "KernelSpec",
    "mmd_sq",
    "log10_mmd",
    "empirical_kl",
    "mode_coverage",
    "avg_energy_curve",
]

MMD_LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Exponential-Hamming kernel k(x,y) = exp(-hamming(x,y)/(bandwidth*d)).

    Positive definite on the binary cube for any positive bandwidth; the
    bandwidth rescales Hamming distance relative to dimension.
    """

    bandwidth: float = 1.0

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")

    def gram(self, X, Y):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        d = X.shape[1]
        ham = (X[:, None, :] != Y[None, :, :]).sum(axis=2)
        return np.exp(-ham / (self.bandwidth * d))


def mmd_sq(X, Y, kernel=None, estimator="biased"):
    """Squared maximum mean discrepancy between two sample sets.

    Args:
        X: (n, d) samples.
        Y: (m, d) samples from the same space.
        kernel: KernelSpec (default exponential-Hamming, bandwidth 1).
        estimator: "biased" (V-statistic, nonnegative) or "unbiased"
            (U-statistic, needs >= 2 samples per set).

    Returns:
        The squared-MMD estimate.
    """
    kernel = kernel or KernelSpec()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[0] == 0 or Y.shape[0] == 0:
        raise ValueError("sample sets must be non-empty")
    Kxx, Kyy, Kxy = kernel.gram(X, X), kernel.gram(Y, Y), kernel.gram(X, Y)
    if estimator == "biased":
        # the V-statistic is >= 0; cancellation can leave a negative ulp
        return float(max(Kxx.mean() + Kyy.mean() - 2.0 * Kxy.mean(), 0.0))
    if estimator == "unbiased":
        n, m = X.shape[0], Y.shape[0]
        if n < 2 or m < 2:
            raise ValueError("unbiased estimator needs >= 2 samples per set")
        xx = (Kxx.sum() - np.trace(Kxx)) / (n * (n - 1))
        yy = (Kyy.sum() - np.trace(Kyy)) / (m * (m - 1))
        return float(xx + yy - 2.0 * Kxy.mean())
    raise ValueError("unknown estimator %r" % (estimator,))


def log10_mmd(X, Y, kernel=None):
    """log10 of the biased squared MMD, floored at 1e-12 for plotting."""
    return float(np.log10(max(mmd_sq(X, Y, kernel, "biased"), MMD_LOG_FLOOR)))


def empirical_kl(samples, target, smoothing=0.5, cap=DEFAULT_ENUM_CAP):
    """KL(p_hat || pi) of smoothed empirical frequencies vs the exact pmf.

    Counts are smoothed additively: (count + smoothing) / (n + smoothing
    * |Theta|).

    Args:
        samples: (n, d) chain states.
        target: Enumerable TargetModel.
        smoothing: Additive pseudo-count (default 0.5).

    Returns:
        The KL divergence in nats (>= 0).
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    pi = exact_probabilities(target, cap=cap)
    counts = np.bincount(target.space.state_indices(samples), minlength=pi.size).astype(float)
    n = samples.shape[0]
    p_hat = (counts + smoothing) / (n + smoothing * pi.size)
    mask = p_hat > 0
    return float(np.sum(p_hat[mask] * (np.log(p_hat[mask]) - np.log(pi[mask]))))


def mode_coverage(states, modes, radius_linf=5.0):
    """Distinct modes visited within an L-infinity radius.

    Args:
        states: (n, d) chain states in visit order.
        modes: (l, d) mode centers.
        radius_linf: Ball radius around each center.

    Returns:
        (visited_count, first_visit): count of visited modes and the
        per-mode first-visit step index (-1 when never visited).
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    modes = np.atleast_2d(np.asarray(modes, dtype=float))
    inside = np.max(np.abs(states[:, None, :] - modes[None, :, :]), axis=2) <= radius_linf
    any_visit = inside.any(axis=0)
    first = np.where(any_visit, inside.argmax(axis=0), -1)
    return int(any_visit.sum()), first


def avg_energy_curve(energies, window=100):
    """Cumulative and windowed running means of a chain's energies.

    Args:
        energies: Per-step energy array.
        window: Trailing-window length for the windowed mean.

    Returns:
        (cumulative, windowed): arrays of the same length as the input;
        the windowed mean uses the last min(window, t+1) entries.
    """
    e = np.asarray(energies, dtype=float)
    cum = np.cumsum(e) / np.arange(1, e.size + 1)
    c = np.concatenate([[0.0], np.cumsum(e)])
    t = np.arange(1, e.size + 1)
    lo = np.maximum(0, t - window)
    windowed = (c[t] - c[lo]) / (t - lo)
    return cum, windowed
