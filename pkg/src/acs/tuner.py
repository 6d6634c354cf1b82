"""Automatic schedule tuning targeting a desired acceptance rate.

The tuner runs a short burn-in, estimates the smallest and largest
useful step sizes by walking an interval endpoint toward the acceptance
target rho*, spreads a cosine schedule between them, and then fits the
per-position balancing parameters by maximizing acceptance under a
shrinking ceiling.

Acceptance estimates are deliberately cheap — one proposal per
candidate by default — so the whole procedure consumes only a few
hundred sampling steps, all of which double as extra burn-in because the
chain state threads through every evaluation.

Tie-breaking: single-draw acceptance estimates saturate at exactly 1.0
wherever proposals are timid, which makes ties common.  Candidates are
therefore scanned outward from the current bound and ties go to the
candidate farthest from it, so the walk cannot deadlock inside a
saturated region.
"""

from dataclasses import dataclass

import numpy as np

from acs.proposal import ProposalParams, mh_accept_prob, mh_step, mh_step_many, sample_proposal
from acs.schedule import Schedule, build_alpha_schedule, naive_beta_schedule

__all__ = [
    "TunerConfig",
    "init_burnin",
    "estimate_alpha",
    "estimate_alpha_batch",
    "estimate_bal_schedule",
    "auto_tune",
]

# Step sizes are never allowed to reach 0 exactly.
ALPHA_EPS = 1e-6


@dataclass(frozen=True)
class TunerConfig:
    """Tuning hyperparameters.

    ``alpha_ceil`` defaults to None, which resolves to 5 on binary
    spaces and 60 on ordinal grids — the two regimes need very
    different maximum step sizes.

    Attributes:
        beta_max: Cycle-start balancing parameter.
        beta_min: Cycle-end balancing parameter (locally balanced 0.5).
        rho_star: Target acceptance rate.
        steps_per_cycle: Schedule length s.
        alpha_ceil: Upper step-size bound (None = per-space default).
        alpha_floor: Lower step-size bound.
        zeta: Range-shrink factor for the step-size walk.
        budget: Acceptance evaluations per estimate_alpha call.
        t_alpha: Candidates per estimate_alpha round.
        t_bal: Candidates per balancing-schedule position.
        burnin_nomh: Uncorrected burn-in steps.
        burnin_mh: Corrected burn-in steps (floor(burnin_mh / s) cycles).
        additive_updates: Use the additive range-update variant.
        acc_samples: Proposals averaged per acceptance estimate.
    """

    beta_max: float = 0.95
    beta_min: float = 0.5
    rho_star: float = 0.5
    steps_per_cycle: int = 20
    alpha_ceil: float = None
    alpha_floor: float = 0.05
    zeta: float = 0.5
    budget: int = 200
    t_alpha: int = 5
    t_bal: int = 10
    burnin_nomh: int = 50
    burnin_mh: int = 50
    additive_updates: bool = False
    acc_samples: int = 1

    def __post_init__(self):
        if not 0.5 <= self.beta_min <= self.beta_max < 1:
            raise ValueError("need 0.5 <= beta_min <= beta_max < 1")
        if not 0 < self.rho_star < 1:
            raise ValueError("rho_star must lie in (0, 1)")
        if self.zeta <= 0:
            raise ValueError("zeta must be positive")
        if self.alpha_ceil is not None and self.alpha_floor >= self.alpha_ceil:
            raise ValueError("alpha_floor must be below alpha_ceil")

    def resolved_ceil(self, space):
        if self.alpha_ceil is not None:
            return float(self.alpha_ceil)
        return 5.0 if space.is_binary else 60.0


def init_burnin(cfg, target, theta, rng):
    """Two-stage burn-in: raw exploration then schedule warm-up.

    Stage one takes ``burnin_nomh`` uncorrected proposals at
    (alpha_ceil, beta_max); stage two runs floor(burnin_mh / s) full
    MH cycles under naive cosine schedules between the bounds.

    Returns:
        The final chain state.
    """
    theta = np.asarray(theta, dtype=float)
    ceil = cfg.resolved_ceil(target.space)
    p_big = ProposalParams(ceil, cfg.beta_max)
    for _ in range(cfg.burnin_nomh):
        theta = sample_proposal(theta, target, p_big, rng).proposed
    s = cfg.steps_per_cycle
    alphas = build_alpha_schedule(s, ceil, cfg.alpha_floor)
    betas = naive_beta_schedule(s, cfg.beta_max, cfg.beta_min)
    for _ in range(cfg.burnin_mh // s):
        for k in range(s):
            theta, _, _ = mh_step(theta, target, ProposalParams(alphas[k], betas[k]), rng)
    return theta


def _next_bound(alpha_bound, rho_err, zeta, max_mode, additive, ceil):
    if additive:
        prop = alpha_bound - zeta * rho_err if max_mode else alpha_bound + zeta * rho_err
    else:
        prop = alpha_bound * (1 - zeta * rho_err) if max_mode else alpha_bound * (1 + zeta * rho_err)
    return min(max(prop, ALPHA_EPS), ceil)


def estimate_alpha(
    target,
    alpha_bound,
    beta,
    theta,
    rng,
    rho_star=0.5,
    zeta=0.5,
    budget=200,
    t=5,
    max_mode=True,
    alpha_ceil=5.0,
    additive=False,
    acc_samples=1,
    telemetry=None,
):
    """Walk a step-size bound toward the acceptance target.

    Each round proposes a shrunken/grown range end, evaluates ``t``
    evenly spaced candidates in the range with ``acc_samples`` proposals
    each, and moves the bound to the candidate whose estimated
    acceptance is closest to ``rho_star``; the chain state advances to
    the winner's proposal.

    Args:
        target: TargetModel.
        alpha_bound: Starting bound (ceiling in max mode, floor otherwise).
        beta: Balancing parameter used for every evaluation.
        theta: Chain state to thread through the search.
        rng: RngStream.
        rho_star: Acceptance target.
        zeta: Range-update factor.
        budget: Total acceptance evaluations (>= t * acc_samples).
        t: Candidates per round.
        max_mode: Walk downward from a ceiling (else upward from a floor).
        alpha_ceil: Hard upper clamp for any evaluated step size.
        additive: Use the additive range update instead of multiplicative.
        acc_samples: Proposals averaged per candidate.
        telemetry: Optional list collecting per-evaluation records.

    Returns:
        (alpha, theta_out, rho_final).
    """
    theta = np.asarray(theta, dtype=float)
    per_round = t * acc_samples
    if budget < per_round:
        raise ValueError("budget must allow at least one round of t*acc_samples evaluations")
    rho_cur = 0.0
    for rnd in range(budget // per_round):
        prop = _next_bound(alpha_bound, abs(rho_star - rho_cur), zeta, max_mode, additive, alpha_ceil)
        cands = np.linspace(min(prop, alpha_bound), max(prop, alpha_bound), t)
        if max_mode:
            cands = cands[::-1]  # scan outward from the current bound
        best = None
        for alpha in cands:
            params = ProposalParams(max(alpha, ALPHA_EPS), beta)
            acc = state = None
            accs = []
            for _ in range(acc_samples):
                out = sample_proposal(theta, target, params, rng)
                accs.append(mh_accept_prob(theta, out, target, params))
                state = out.proposed
            acc = float(np.mean(accs))
            if telemetry is not None:
                telemetry.append(
                    {"phase": "alpha_max" if max_mode else "alpha_min", "round": rnd,
                     "alpha": float(alpha), "beta": float(beta), "accept": acc}
                )
            if best is None or abs(rho_star - acc) <= abs(rho_star - best[1]):
                best = (float(alpha), acc, state)
        alpha_bound, rho_cur, theta = best
    return alpha_bound, theta, rho_cur


def estimate_alpha_batch(
    target,
    alpha_bound,
    beta,
    X,
    rng,
    rho_star=0.5,
    zeta=0.5,
    budget=200,
    t=5,
    max_mode=True,
    alpha_ceil=5.0,
    additive=False,
):
    """Population variant of :func:`estimate_alpha` for binary targets.

    Acceptance per candidate is the mean over the whole population of a
    single batched MH step; the population advances through the winner's
    step, so the evaluations double as buffer updates during learning.

    Returns:
        (alpha, X_out, rho_final).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if budget < t:
        raise ValueError("budget must allow at least one round")
    rho_cur = 0.0
    for _ in range(budget // t):
        prop = _next_bound(alpha_bound, abs(rho_star - rho_cur), zeta, max_mode, additive, alpha_ceil)
        cands = np.linspace(min(prop, alpha_bound), max(prop, alpha_bound), t)
        if max_mode:
            cands = cands[::-1]
        best = None
        for alpha in cands:
            params = ProposalParams(max(alpha, ALPHA_EPS), beta)
            Xn, ap, _ = mh_step_many(X, target, params, rng)
            acc = float(ap.mean())
            if best is None or abs(rho_star - acc) <= abs(rho_star - best[1]):
                best = (float(alpha), acc, Xn)
        alpha_bound, rho_cur, X = best
    return alpha_bound, X, rho_cur


def estimate_bal_schedule(target, alphas, beta_max, beta_min, theta, rng, t=10, telemetry=None):
    """Fit the per-position balancing parameters.

    Position 0 is pinned to ``beta_max`` and the last position to
    ``beta_min``; in between, each position picks the acceptance-
    maximizing beta from ``t`` candidates in [beta_min, previous beta],
    which makes the result non-increasing by construction.  Ties go to
    the larger beta so saturated acceptance keeps the more exploratory
    setting.

    Returns:
        betas array of the same length as ``alphas``.
    """
    theta = np.asarray(theta, dtype=float)
    s = len(alphas)
    if s < 2:
        raise ValueError("need at least 2 schedule positions")
    betas = np.empty(s)
    betas[0] = beta_max
    b_ceil = beta_max
    for i in range(1, s - 1):
        best = None
        for beta in np.linspace(beta_min, b_ceil, t)[::-1]:
            params = ProposalParams(float(alphas[i]), float(beta))
            out = sample_proposal(theta, target, params, rng)
            acc = mh_accept_prob(theta, out, target, params)
            if telemetry is not None:
                telemetry.append(
                    {"phase": "bal", "round": i, "alpha": float(alphas[i]),
                     "beta": float(beta), "accept": acc}
                )
            if best is None or acc > best[1]:
                best = (float(beta), acc, out.proposed)
        betas[i], _, theta = best
        b_ceil = betas[i]
    betas[s - 1] = beta_min
    return betas, theta


def auto_tune(cfg, target, theta_init, rng, telemetry=None):
    """Full tuning pipeline: burn-in, step-size bounds, beta schedule.

    Args:
        cfg: TunerConfig.
        target: TargetModel.
        theta_init: Starting state.
        rng: RngStream.
        telemetry: Optional list collecting per-evaluation records.

    Returns:
        (Schedule, theta_final).
    """
    ceil = cfg.resolved_ceil(target.space)
    theta = init_burnin(cfg, target, np.asarray(theta_init, dtype=float), rng)
    common = dict(
        rho_star=cfg.rho_star,
        zeta=cfg.zeta,
        budget=cfg.budget,
        t=cfg.t_alpha,
        alpha_ceil=ceil,
        additive=cfg.additive_updates,
        acc_samples=cfg.acc_samples,
        telemetry=telemetry,
    )
    alpha_min, theta, _ = estimate_alpha(
        target, cfg.alpha_floor, cfg.beta_min, theta, rng, max_mode=False, **common
    )
    alpha_max, theta, _ = estimate_alpha(
        target, ceil, cfg.beta_max, theta, rng, max_mode=True, **common
    )
    alpha_max = max(alpha_max, alpha_min)
    alphas = build_alpha_schedule(cfg.steps_per_cycle, alpha_max, alpha_min)
    betas, theta = estimate_bal_schedule(
        target, alphas, cfg.beta_max, cfg.beta_min, theta, rng, t=cfg.t_bal, telemetry=telemetry
    )
    return Schedule(alphas, betas), theta
