"""Chain drivers: the cyclical sampler and its baselines.

All drivers share the trace container and the per-step RNG discipline
from :mod:`acs.proposal`; a cyclical run with a constant schedule is
bit-identical to the constant-parameter baseline under the same seed.
"""

from dataclasses import dataclass, field

import numpy as np

from acs.proposal import ProposalParams, mh_step

__all__ = [
    "RecordConfig",
    "SampleTrace",
    "acs_run",
    "dmala_run",
    "random_walk_run",
    "single_flip_informed_run",
    "block_gibbs_run",
    "greedy_mode_ascent",
    "mode_escape_run",
]


@dataclass(frozen=True)
class RecordConfig:
    """What a run keeps per step.

    ``record_states=None`` resolves to full-state recording for d <= 100
    and energy-only above that; ``thin`` keeps every thin-th state.
    """

    record_states: bool = None
    thin: int = 1

    def keep_states(self, dims):
        if self.record_states is None:
            return dims <= 100
        return self.record_states


@dataclass
class SampleTrace:
    """Recorded chain output.

    Attributes:
        states: (n_recorded, d) array, or None when not recorded.
        energies: Energy of the chain state after every step.
        accept_probs: Per-step MH acceptance probability (ones for
            samplers without a rejection step).
        accepted: Per-step accept indicator.
        meta: Run metadata (sampler name, parameters, seeds).
    """

    states: np.ndarray
    energies: np.ndarray
    accept_probs: np.ndarray
    accepted: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def attempt_count(self):
        return int(self.accepted.size)

    @property
    def accept_count(self):
        return int(self.accepted.sum())

    @property
    def accept_rate(self):
        return self.accept_count / max(1, self.attempt_count)


class _Recorder:
    def __init__(self, n_steps, dims, record_cfg):
        self.cfg = record_cfg or RecordConfig()
        self.keep = self.cfg.keep_states(dims)
        n_rec = len(range(0, n_steps, self.cfg.thin))
        self.states = np.empty((n_rec, dims)) if self.keep else None
        self.energies = np.empty(n_steps)
        self.accept_probs = np.empty(n_steps)
        self.accepted = np.empty(n_steps, dtype=bool)
        self._row = 0

    def push(self, step, state, energy, ap, acc):
        if self.keep and step % self.cfg.thin == 0:
            self.states[self._row] = state
            self._row += 1
        self.energies[step] = energy
        self.accept_probs[step] = ap
        self.accepted[step] = acc

    def trace(self, meta):
        return SampleTrace(self.states, self.energies, self.accept_probs, self.accepted, meta)


def acs_run(target, schedule, n_cycles, theta0, rng, record_cfg=None):
    """Run the cyclical sampler for ``n_cycles`` full cycles.

    Step k uses the schedule entry k mod s; every step is a single
    MH-corrected proposal.

    Args:
        target: TargetModel.
        schedule: Schedule of per-position (alpha, beta) pairs.
        n_cycles: Number of cycles; total steps = n_cycles * s.
        theta0: Starting state.
        rng: RngStream.
        record_cfg: RecordConfig.

    Returns:
        SampleTrace.
    """
    theta = np.asarray(theta0, dtype=float)
    n_steps = n_cycles * schedule.steps_per_cycle
    rec = _Recorder(n_steps, theta.size, record_cfg)
    for step in range(n_steps):
        alpha, beta = schedule.at(step)
        theta, acc, ap = mh_step(theta, target, ProposalParams(alpha, beta), rng)
        rec.push(step, theta, target.energy(theta), ap, acc)
    return rec.trace({"sampler": "acs", "schedule": schedule.to_dict()})


def dmala_run(target, alpha, n_steps, theta0, rng, record_cfg=None, beta=0.5):
    """Constant-parameter baseline: fixed (alpha, beta) every step."""
    theta = np.asarray(theta0, dtype=float)
    params = ProposalParams(alpha, beta)
    rec = _Recorder(n_steps, theta.size, record_cfg)
    for step in range(n_steps):
        theta, acc, ap = mh_step(theta, target, params, rng)
        rec.push(step, theta, target.energy(theta), ap, acc)
    return rec.trace({"sampler": "dmala", "alpha": alpha, "beta": beta})


def random_walk_run(target, n_steps, theta0, rng, record_cfg=None):
    """Uninformed baseline: resample one uniform coordinate per step.

    The proposal picks a coordinate uniformly, then a value uniformly
    from that coordinate's domain (possibly the current one); the
    proposal is symmetric, so acceptance uses energies only.  Three
    uniforms per step.
    """
    theta = np.asarray(theta0, dtype=float)
    n_values = target.space.n_values
    d = theta.size
    rec = _Recorder(n_steps, d, record_cfg)
    energy = target.energy(theta)
    for step in range(n_steps):
        i = min(int(rng.uniform() * d), d - 1)
        v = min(int(rng.uniform() * n_values[i]), int(n_values[i]) - 1)
        prop = theta.copy()
        prop[i] = v
        e_prop = target.energy(prop)
        ap = float(np.exp(min(e_prop - energy, 0.0)))
        acc = rng.uniform() < ap
        if acc:
            theta, energy = prop, e_prop
        rec.push(step, theta, energy, ap, acc)
    return rec.trace({"sampler": "random_walk"})


def single_flip_informed_run(target, n_steps, theta0, rng, record_cfg=None, temp=1.0):
    """Locally informed single-flip baseline for binary targets.

    Proposes one coordinate to flip from a softmax over first-order
    energy changes (0.5 * g_i * (1 - 2 x_i) / temp) and corrects with
    the exact MH ratio, re-scoring the flip distribution at the
    proposed state.
    """
    if not target.space.is_binary:
        raise ValueError("single-flip sampler needs a binary space")
    theta = np.asarray(theta0, dtype=float)
    rec = _Recorder(n_steps, theta.size, record_cfg)

    def flip_logprobs(state):
        logits = 0.5 * target.grad(state) * (1.0 - 2.0 * state) / temp
        m = logits.max()
        z = logits - m
        return z - np.log(np.exp(z).sum())

    energy = target.energy(theta)
    for step in range(n_steps):
        lp_fwd = flip_logprobs(theta)
        cum = np.cumsum(np.exp(lp_fwd))
        cum[-1] = max(cum[-1], 1.0)
        i = int(np.searchsorted(cum, rng.uniform(), side="left"))
        prop = theta.copy()
        prop[i] = 1.0 - prop[i]
        e_prop = target.energy(prop)
        lp_rev = flip_logprobs(prop)
        la = e_prop - energy + lp_rev[i] - lp_fwd[i]
        ap = float(np.exp(min(la, 0.0)))
        acc = rng.uniform() < ap
        if acc:
            theta, energy = prop, e_prop
        rec.push(step, theta, energy, ap, acc)
    return rec.trace({"sampler": "single_flip", "temp": temp})


def block_gibbs_run(rbm, n_sweeps, x0, rng, record_cfg=None):
    """Block Gibbs chain on an RBM; treated as ground truth."""
    x = np.asarray(x0, dtype=float)
    rec = _Recorder(n_sweeps, x.size, record_cfg)
    for step in range(n_sweeps):
        x = rbm.block_gibbs_step(x, rng)
        rec.push(step, x, rbm.energy(x), 1.0, True)
    return rec.trace({"sampler": "block_gibbs"})


def greedy_mode_ascent(target, start):
    """Deterministic coordinate ascent to a local energy maximum.

    Scans all single-coordinate value changes, takes the strictly best
    one (ties resolve to the lowest coordinate, then lowest value), and
    repeats until no strict improvement exists.
    """
    theta = np.asarray(start, dtype=float)
    n_values = target.space.n_values
    energy = target.energy(theta)
    improved = True
    while improved:
        improved = False
        cands = []
        for i in range(theta.size):
            for v in range(int(n_values[i])):
                if v != int(theta[i]):
                    c = theta.copy()
                    c[i] = v
                    cands.append(c)
        if not cands:
            break
        cands = np.asarray(cands)
        energies = target.energy_many(cands)
        best = int(np.argmax(energies))  # argmax takes the first max: lowest (i, v)
        if energies[best] > energy:
            theta, energy = cands[best], float(energies[best])
            improved = True
    return theta


def mode_escape_run(target, hint, run_fn, rng, record_cfg=None, **run_kwargs):
    """Run a sampler from the local mode nearest a hint state.

    Locates the mode by :func:`greedy_mode_ascent` from ``hint`` and
    calls ``run_fn(target, theta0=mode, rng=rng, ...)``.

    Returns:
        (SampleTrace, mode_state).
    """
    mode = greedy_mode_ascent(target, hint)
    trace = run_fn(target, theta0=mode, rng=rng, record_cfg=record_cfg, **run_kwargs)
    trace.meta["mode_start"] = mode.tolist()
    return trace, mode
