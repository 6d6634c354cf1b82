"""Cyclical (alpha, beta) schedules.

The step-size schedule is a clipped half-cosine that starts each cycle
at ``alpha_max`` and decays toward ``alpha_min``:

    alpha_k = max( (alpha_max / 2) * (cos(pi * (k mod s) / s) + 1), alpha_min )

``literal_eq7`` switches to the unscaled variant
``max(alpha_max * cos(pi * (k mod s) / s) + 1, alpha_min)`` for audits;
the default grouping is the one that actually starts at ``alpha_max``
and stays positive.  The balancing-parameter schedule is normally fit by
the tuner; :func:`naive_beta_schedule` applies the same cosine shape
between ``beta_max`` and ``beta_min`` for burn-in use.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Schedule", "step_size_at", "build_alpha_schedule", "naive_beta_schedule"]


def step_size_at(k, s, alpha_max, alpha_min, literal_eq7=False):
    """Step size at within-run step index ``k`` (cycle position k mod s).

    Args:
        k: Global step index >= 0.
        s: Steps per cycle >= 1.
        alpha_max: Cycle-start step size.
        alpha_min: Floor step size, 0 < alpha_min <= alpha_max.
        literal_eq7: Use the unscaled printed form (audit only).

    Returns:
        The scheduled step size.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if not 0 < alpha_min <= alpha_max:
        raise ValueError("need 0 < alpha_min <= alpha_max")
    c = np.cos(np.pi * (np.asarray(k) % s) / s)
    if literal_eq7:
        return np.maximum(alpha_max * c + 1.0, alpha_min)
    return np.maximum((alpha_max / 2.0) * (c + 1.0), alpha_min)


def build_alpha_schedule(s, alpha_max, alpha_min, literal_eq7=False):
    """Length-s array of step sizes for one cycle."""
    return np.asarray(step_size_at(np.arange(s), s, alpha_max, alpha_min, literal_eq7), dtype=float)


def naive_beta_schedule(s, beta_max, beta_min):
    """Cosine interpolation between beta bounds, clipped below at beta_min.

    Burn-in helper only; tuned runs get their beta schedule from the
    tuner's per-position search.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if not 0.5 <= beta_min <= beta_max < 1:
        raise ValueError("need 0.5 <= beta_min <= beta_max < 1")
    c = np.cos(np.pi * (np.arange(s) % s) / s)
    return np.maximum((beta_max / 2.0) * (c + 1.0), beta_min)


@dataclass(frozen=True)
class Schedule:
    """Per-cycle (alpha, beta) pairs applied as step k uses index k mod s.

    Invariants checked on construction: equal lengths, positive
    non-increasing alphas, betas non-increasing within [0.5, 1).
    A constant schedule (alpha_max = alpha_min, beta = 0.5 throughout)
    is the configuration equivalent to the constant-parameter sampler.
    """

    alphas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alphas", np.asarray(self.alphas, dtype=float))
        object.__setattr__(self, "betas", np.asarray(self.betas, dtype=float))
        a, b = self.alphas, self.betas
        if a.ndim != 1 or a.shape != b.shape or a.size < 1:
            raise ValueError("alphas and betas must be equal-length 1-D arrays")
        if np.any(a <= 0):
            raise ValueError("step sizes must be positive")
        if np.any(np.diff(a) > 1e-12):
            raise ValueError("alphas must be non-increasing within the cycle")
        if np.any(b < 0.5) or np.any(b >= 1):
            raise ValueError("betas must lie in [0.5, 1)")
        if np.any(np.diff(b) > 1e-12):
            raise ValueError("betas must be non-increasing within the cycle")

    @property
    def steps_per_cycle(self):
        return int(self.alphas.size)

    def at(self, k):
        """(alpha, beta) for global step k."""
        i = int(k) % self.steps_per_cycle
        return float(self.alphas[i]), float(self.betas[i])

    @classmethod
    def constant(cls, alpha, beta=0.5, s=1):
        """Constant-parameter schedule (the baseline sampler's settings)."""
        return cls(np.full(s, float(alpha)), np.full(s, float(beta)))

    def to_dict(self):
        return {"alphas": self.alphas.tolist(), "betas": self.betas.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["alphas"], dtype=float), np.asarray(d["betas"], dtype=float))
