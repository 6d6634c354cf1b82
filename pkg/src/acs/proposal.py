"""Gradient-informed coordinate-wise proposal and its MH correction.

Each coordinate proposes independently from a categorical whose logits
combine a first-order expansion of the energy with a squared-distance
penalty:

    logit(v) = beta * g_i * (v - theta_i) - (v - theta_i)^2 / (2 alpha)

beta = 0.5 gives the locally balanced proposal, beta -> 1 the globally
balanced one; alpha scales how far proposals reach.  The acceptance rule
is the exact Metropolis-Hastings ratio with the reverse proposal density
evaluated at a fresh gradient of the proposed state, all in log space.

RNG layout per MH step: one uniform per coordinate (in coordinate
order) for the proposal, then one acceptance uniform — d + 1 draws
regardless of parameters, so schedules never shift the stream.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProposalParams",
    "ProposalOutcome",
    "coordinate_logits",
    "sample_proposal",
    "mh_accept_prob",
    "mh_step",
    "mh_step_many",
]


@dataclass(frozen=True)
class ProposalParams:
    """Step size alpha > 0 and balancing parameter beta in [0.5, 1)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not 0.5 <= self.beta < 1:
            raise ValueError("beta must lie in [0.5, 1)")


@dataclass(frozen=True)
class ProposalOutcome:
    """A proposed state with exact forward/reverse log proposal densities."""

    proposed: np.ndarray
    forward_logprob: float
    reverse_logprob: float


def _logits_matrix(theta, g, n_values, params):
    """(d, max_n) matrix of logits with -inf padding for ragged domains."""
    max_n = int(np.max(n_values))
    vals = np.arange(max_n, dtype=float)
    disp = vals[None, :] - theta[:, None]
    logits = params.beta * g[:, None] * disp - disp * disp / (2.0 * params.alpha)
    mask = vals[None, :] >= np.asarray(n_values)[:, None]
    logits[mask] = -np.inf
    return logits


def coordinate_logits(theta, g, i, params, space):
    """Unnormalized logits over coordinate i's values.

    Args:
        theta: Current state.
        g: Gradient of the target at ``theta``.
        i: Coordinate index.
        params: ProposalParams.
        space: DiscreteSpace supplying the value count for coordinate i.

    Returns:
        Array of logits, one per value in 0..N_i; the proposal for the
        coordinate is the softmax of these (logit 0 at v = theta_i).
    """
    theta = np.asarray(theta, dtype=float)
    g = np.asarray(g, dtype=float)
    return _logits_matrix(theta, g, space.n_values, params)[i, : int(space.n_values[i])]


def _log_softmax(logits):
    m = np.max(logits, axis=-1, keepdims=True)
    z = logits - m
    return z - np.log(np.sum(np.exp(z), axis=-1, keepdims=True))


def _draw_rows(log_probs, u):
    """Inverse-CDF draw per row; ties in the cumsum resolve to the lower index."""
    cum = np.cumsum(np.exp(log_probs), axis=-1)
    cum[..., -1] = np.maximum(cum[..., -1], 1.0)
    return (cum < u[..., None]).sum(axis=-1)


def sample_proposal(theta, target, params, rng):
    """Propose a full state and score both proposal directions.

    Every coordinate is sampled independently from its categorical; the
    reverse density is evaluated with a fresh gradient at the proposed
    state.  Exactly two gradient evaluations happen per call.

    Args:
        theta: Current state.
        target: TargetModel.
        params: ProposalParams.
        rng: RngStream (consumes d uniforms).

    Returns:
        ProposalOutcome.
    """
    theta = np.asarray(theta, dtype=float)
    n_values = target.space.n_values
    lp_fwd = _log_softmax(_logits_matrix(theta, target.grad(theta), n_values, params))
    chosen = _draw_rows(lp_fwd, rng.uniform(theta.size))
    proposed = chosen.astype(float)
    rows = np.arange(theta.size)
    forward = float(lp_fwd[rows, chosen].sum())
    lp_rev = _log_softmax(_logits_matrix(proposed, target.grad(proposed), n_values, params))
    reverse = float(lp_rev[rows, np.round(theta).astype(int)].sum())
    return ProposalOutcome(proposed, forward, reverse)


def mh_accept_prob(theta, outcome, target, params):
    """Eq.-style acceptance min(1, exp(dU + rev - fwd)), fully in log space."""
    la = (
        target.energy(outcome.proposed)
        - target.energy(theta)
        + outcome.reverse_logprob
        - outcome.forward_logprob
    )
    return float(np.exp(min(la, 0.0)))


def mh_step(theta, target, params, rng):
    """One proposal plus accept/reject decision.

    Args:
        theta: Current state.
        target: TargetModel.
        params: ProposalParams.
        rng: RngStream (consumes d + 1 uniforms).

    Returns:
        (next_state, accepted, accept_prob).
    """
    out = sample_proposal(theta, target, params, rng)
    ap = mh_accept_prob(theta, out, target, params)
    accepted = rng.uniform() < ap
    return (out.proposed if accepted else np.asarray(theta, dtype=float)), bool(accepted), ap


def mh_step_many(X, target, params, rng, skip_mh=False):
    """Batched MH step for a population of binary-space chains.

    Used by the learning buffer and the buffered tuner.  Consumes an
    (n, d) block of proposal uniforms and then an (n,) block of
    acceptance uniforms; the acceptance block is drawn even when
    ``skip_mh`` forces every proposal through, so the stream layout does
    not depend on the schedule position.

    Args:
        X: (n, d) population of states.
        target: TargetModel on a binary space with ``*_many`` methods.
        params: ProposalParams.
        rng: RngStream.
        skip_mh: Take all proposals unconditionally (no correction).

    Returns:
        (X_next, accept_probs, accepted_mask).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if not target.space.is_binary:
        raise ValueError("mh_step_many supports binary spaces only")
    delta = 1.0 - 2.0 * X
    fl = params.beta * target.grad_many(X) * delta - 1.0 / (2.0 * params.alpha)
    log_flip = -np.logaddexp(0.0, -fl)
    log_stay = -np.logaddexp(0.0, fl)
    flips = np.log(rng.uniform(X.shape)) < log_flip
    Xp = np.where(flips, 1.0 - X, X)
    u = rng.uniform(X.shape[0])
    if skip_mh:
        return Xp, np.ones(X.shape[0]), np.ones(X.shape[0], dtype=bool)
    fwd = np.where(flips, log_flip, log_stay).sum(axis=1)
    flr = params.beta * target.grad_many(Xp) * (1.0 - 2.0 * Xp) - 1.0 / (2.0 * params.alpha)
    rev = np.where(flips, -np.logaddexp(0.0, -flr), -np.logaddexp(0.0, flr)).sum(axis=1)
    la = target.energy_many(Xp) - target.energy_many(X) + rev - fwd
    ap = np.exp(np.minimum(la, 0.0))
    accepted = u < ap
    return np.where(accepted[:, None], Xp, X), ap, accepted
