"""Concrete target distributions.

Three families cover the experiment surface:

* :class:`SyntheticMultimodal` — a 2-D ordinal grid whose log density is
  a mixture of squared-exponential bumps around integer mode centers,
  with optional unequal mode weights;
* :class:`RbmModel` — binary restricted Boltzmann machine scored by its
  exact free energy, with Block Gibbs transitions;
* :class:`QuadraticTarget` — strongly concave quadratic energy on a
  small ordinal box, used by the theory verification.
"""

import numpy as np
from scipy.special import expit, logsumexp

from acs.core import DiscreteSpace, TargetModel

__all__ = [
    "SyntheticMultimodal",
    "RbmModel",
    "QuadraticTarget",
    "build_grid_modes",
    "sample_rbm_synthetic",
]


def _softplus(z):
    return np.logaddexp(0.0, z)


class SyntheticMultimodal(TargetModel):
    """Mixture-of-bumps log density on an ordinal grid.

    U(theta) = log sum_i w_i * exp(-||theta - mu_i||^2 / (2 sigma_sq)).

    Args:
        modes: (l, 2) mode centers inside [0, N]^2.
        sigma_sq: Per-mode variance (> 0).
        max_value: Grid upper bound N; the space is {0..N}^2.
        weights: Optional per-mode nonnegative weights (default all 1).
        literal_sign: Audit flag reproducing the sign-flipped variant
            with a +||.||^2/(2 sigma_sq) exponent, which pushes mass away
            from the listed centers.  Off by default.
    """

    def __init__(self, modes, sigma_sq, max_value, weights=None, literal_sign=False):
        self.modes = np.asarray(modes, dtype=float).reshape(-1, 2)
        if sigma_sq <= 0:
            raise ValueError("sigma_sq must be positive")
        self.sigma_sq = float(sigma_sq)
        if np.any(self.modes < 0) or np.any(self.modes > max_value):
            raise ValueError("modes must lie inside [0, N]^2")
        self.space = DiscreteSpace.ordinal(max_value, 2)
        if weights is None:
            weights = np.ones(len(self.modes))
        self.weights = np.asarray(weights, dtype=float)
        if self.weights.shape != (len(self.modes),) or self.weights.sum() <= 0:
            raise ValueError("weights must match modes and have positive sum")
        self.literal_sign = bool(literal_sign)
        self._log_w = np.log(np.where(self.weights > 0, self.weights, 1e-300))

    def _component_logits(self, states):
        d = states[:, None, :] - self.modes[None, :, :]
        sq = np.sum(d * d, axis=2)
        sign = 1.0 if self.literal_sign else -1.0
        return self._log_w[None, :] + sign * sq / (2.0 * self.sigma_sq), d

    def energy_many(self, states):
        states = np.atleast_2d(np.asarray(states, dtype=float))
        logits, _ = self._component_logits(states)
        return logsumexp(logits, axis=1)

    def energy(self, state):
        return float(self.energy_many(np.asarray(state, dtype=float)[None, :])[0])

    def grad_many(self, states):
        states = np.atleast_2d(np.asarray(states, dtype=float))
        logits, d = self._component_logits(states)
        p = np.exp(logits - logsumexp(logits, axis=1, keepdims=True))
        sign = -1.0 if self.literal_sign else 1.0
        return sign * np.einsum("nl,nld->nd", p, -d) / self.sigma_sq

    def grad(self, state):
        return self.grad_many(np.asarray(state, dtype=float)[None, :])[0]


def build_grid_modes(num_modes, spacing):
    """Evenly spaced square grid of mode centers.

    N = (sqrt(num_modes) + 1) * spacing, and mode (i, j) sits at
    (N / (sqrt(num_modes) + 2)) * (i+1, j+1), rounded to the nearest
    integer grid point.

    Args:
        num_modes: Perfect square number of modes.
        spacing: Distance budget between neighboring modes (> 0).

    Returns:
        (modes, N): (num_modes, 2) float array of rounded centers, and
        the integer grid bound N.
    """
    root = int(round(num_modes**0.5))
    if root * root != num_modes:
        raise ValueError("num_modes must be a perfect square")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    n_max = int(round((root + 1) * spacing))
    scale = n_max / (root + 2)
    modes = [
        (round(scale * (i + 1)), round(scale * (j + 1)))
        for i in range(root)
        for j in range(root)
    ]
    return np.asarray(modes, dtype=float), n_max


class RbmModel(TargetModel):
    """Binary RBM scored by its exact free energy.

    U(x) = sum_j softplus((W x + a)_j) + b^T x, the log of the
    hidden-marginalized unnormalized likelihood.  ``energy``/``grad``
    accept single states or (n, d) batches via the ``*_many`` variants.

    Args:
        weights: (n_hidden, n_visible) matrix W.
        hidden_bias: length n_hidden vector a.
        visible_bias: length n_visible vector b.
    """

    def __init__(self, weights, hidden_bias, visible_bias):
        self.W = np.asarray(weights, dtype=float)
        self.a = np.asarray(hidden_bias, dtype=float)
        self.b = np.asarray(visible_bias, dtype=float)
        if self.W.shape != (self.a.size, self.b.size):
            raise ValueError("W must be (n_hidden, n_visible)")
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise ValueError("parameters must be finite")
        self.space = DiscreteSpace.binary(self.b.size)

    @property
    def n_hidden(self):
        return self.a.size

    @property
    def n_visible(self):
        return self.b.size

    def energy_many(self, states):
        X = np.atleast_2d(np.asarray(states, dtype=float))
        return _softplus(X @ self.W.T + self.a).sum(axis=1) + X @ self.b

    def energy(self, state):
        return float(self.energy_many(np.asarray(state, dtype=float)[None, :])[0])

    def grad_many(self, states):
        X = np.atleast_2d(np.asarray(states, dtype=float))
        return expit(X @ self.W.T + self.a) @ self.W + self.b

    def grad(self, state):
        return self.grad_many(np.asarray(state, dtype=float)[None, :])[0]

    def block_gibbs_step(self, x, rng):
        """One h-then-x Block Gibbs sweep from visible state ``x``.

        Consumes n_hidden uniforms for the hidden draw, then n_visible
        for the visible draw.
        """
        x = np.asarray(x, dtype=float)
        h = (rng.uniform(self.n_hidden) < expit(self.W @ x + self.a)).astype(float)
        return (rng.uniform(self.n_visible) < expit(h @ self.W + self.b)).astype(float)

    def block_gibbs_many(self, X, rng):
        """Batched Block Gibbs sweep on an (n, n_visible) population."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        h = (rng.uniform((X.shape[0], self.n_hidden)) < expit(X @ self.W.T + self.a)).astype(float)
        return (rng.uniform(X.shape) < expit(h @ self.W + self.b)).astype(float)

    def exact_log_partition(self, cap=2**20):
        """Exact log Z by enumerating the smaller of the two layers.

        Enumerating hidden states uses
        log Z = logsumexp_h [a^T h + sum_i softplus((W^T h + b)_i)];
        enumerating visible states sums exp of the free energy.
        """
        side = min(self.n_visible, self.n_hidden)
        if 2**side > cap:
            raise ValueError("smaller RBM layer exceeds enumeration cap")
        states = ((np.arange(2**side)[:, None] >> np.arange(side - 1, -1, -1)) & 1).astype(float)
        if self.n_visible <= self.n_hidden:
            return float(logsumexp(self.energy_many(states)))
        pre = states @ self.W + self.b
        return float(logsumexp(states @ self.a + _softplus(pre).sum(axis=1)))


def sample_rbm_synthetic(space, n_hidden, rng, weight_scale=0.2, bias_scale=0.1):
    """Random RBM on a binary space, deterministic under the stream.

    Weights draw from Normal(0, weight_scale^2) and both biases from
    Normal(0, bias_scale^2).  The defaults give a nearly flat target;
    sampling-pressure experiments pass a larger ``weight_scale`` so that
    proposal step sizes actually trade off against acceptance.

    Args:
        space: Binary DiscreteSpace supplying n_visible.
        n_hidden: Number of hidden units.
        rng: RngStream; draws n_hidden*n_visible + n_hidden + n_visible
            normals via inverse-CDF from uniforms.

    Returns:
        RbmModel.
    """
    if not space.is_binary:
        raise ValueError("RBMs need a binary space")
    from scipy.special import ndtri

    nv = space.dims
    draws = ndtri(rng.uniform(n_hidden * nv + n_hidden + nv))
    W = weight_scale * draws[: n_hidden * nv].reshape(n_hidden, nv)
    a = bias_scale * draws[n_hidden * nv : n_hidden * nv + n_hidden]
    b = bias_scale * draws[n_hidden * nv + n_hidden :]
    return RbmModel(W, a, b)


class QuadraticTarget(TargetModel):
    """Strongly concave quadratic energy on a small ordinal box.

    U(theta) = -1/2 (theta - c)^T H (theta - c) with H symmetric positive
    definite, so the gradient-Lipschitz constant is M = lambda_max(H) and
    the strong-concavity constant is m = lambda_min(H).

    Args:
        center: Energy maximizer c (need not be a grid point).
        hessian: Symmetric positive-definite matrix H.
        max_value: Ordinal bound N; the space is {0..N}^d.
    """

    def __init__(self, center, hessian, max_value):
        self.center = np.asarray(center, dtype=float)
        self.H = np.asarray(hessian, dtype=float)
        d = self.center.size
        if self.H.shape != (d, d) or not np.allclose(self.H, self.H.T):
            raise ValueError("hessian must be symmetric (d, d)")
        eig = np.linalg.eigvalsh(self.H)
        if eig[0] <= 0:
            raise ValueError("hessian must be positive definite")
        self.lipschitz_m = float(eig[-1])
        self.concavity_m = float(eig[0])
        self.space = DiscreteSpace.ordinal(max_value, d)

    def energy_many(self, states):
        X = np.atleast_2d(np.asarray(states, dtype=float)) - self.center
        return -0.5 * np.einsum("ni,ij,nj->n", X, self.H, X)

    def energy(self, state):
        return float(self.energy_many(np.asarray(state, dtype=float)[None, :])[0])

    def grad_many(self, states):
        X = np.atleast_2d(np.asarray(states, dtype=float)) - self.center
        return -X @ self.H

    def grad(self, state):
        return self.grad_many(np.asarray(state, dtype=float)[None, :])[0]

    def diameter(self):
        """Exact diameter of the state set (opposite box corners)."""
        span = (self.space.n_values - 1).astype(float)
        return float(np.sqrt(span @ span))
