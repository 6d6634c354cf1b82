"""RBM maximum-likelihood training and partition-function estimation.

Training follows persistent contrastive divergence: a buffer of model
chains advances a few sampler steps per iteration and the parameter
update ascends E_data[grad U] - E_model[grad U].  The cyclical variant
re-shapes the per-iteration sampling into exploration/exploitation
cycles and periodically re-estimates its two step sizes from the buffer
itself.  Partition functions come from annealed importance sampling
along a tempered-parameter path whose base (W = 0, same visible bias)
has an analytic log Z, or from exact enumeration at desk scale.
"""

import copy
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logsumexp

from acs.proposal import ProposalParams, mh_step_many
from acs.targets import RbmModel
from acs.tuner import TunerConfig, estimate_alpha_batch

__all__ = [
    "PcdConfig",
    "LearnTrace",
    "ml_gradient",
    "pcd_train",
    "acs_pcd_train",
    "ais_log_z",
    "exact_log_likelihood",
    "make_two_cluster_dataset",
]


@dataclass(frozen=True)
class PcdConfig:
    """Training hyperparameters.

    Attributes:
        buffer_size: Persistent chains in the negative-phase buffer.
        sampling_steps_per_iter: Sampler steps per iteration (plain PCD).
        learning_rate: Optimizer step size.
        n_iters: Parameter updates.
        batch_size: Data minibatch size (None = full buffer size).
        optimizer: "adam" (native implementation) or "sgd".
        cd: Reset the buffer to the data batch each iteration (CD mode).
        cycle_length: Iterations per cycle for the cyclical variant.
        tune_interval: Cycles between re-tuning (None = never).
        big_steps: Sampler steps in the exploration iteration.
        small_steps: Sampler steps in the exploitation iterations.
        alpha_max: Initial exploration step size (None = tuner ceiling).
        alpha_min: Initial exploitation step size (None = tuner floor).
        tuner: TunerConfig supplying beta bounds and search settings.
        checkpoint_interval: Keep a model copy every this many
            iterations (None = only the final model).
    """

    buffer_size: int = 100
    sampling_steps_per_iter: int = 5
    learning_rate: float = 0.001
    n_iters: int = 1000
    batch_size: int = None
    optimizer: str = "adam"
    cd: bool = False
    cycle_length: int = 10
    tune_interval: int = 5
    big_steps: int = 5
    small_steps: int = 5
    alpha_max: float = None
    alpha_min: float = None
    tuner: TunerConfig = field(default_factory=TunerConfig)
    checkpoint_interval: int = None

    def __post_init__(self):
        if min(self.buffer_size, self.sampling_steps_per_iter, self.n_iters,
               self.cycle_length, self.big_steps, self.small_steps) < 1:
            raise ValueError("counts must be positive")
        if self.batch_size is not None and self.batch_size > self.buffer_size:
            raise ValueError("buffer must hold at least one batch")


@dataclass
class LearnTrace:
    """Per-iteration training telemetry plus model checkpoints."""

    data_energy: list = field(default_factory=list)
    buffer_energy: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    alpha_pair: list = field(default_factory=list)
    checkpoints: list = field(default_factory=list)


def ml_gradient(model, data_batch, model_batch):
    """Likelihood-ascent gradient: data-phase minus model-phase means.

    Per-parameter terms of grad U for the RBM free energy:
    dU/dW = sigmoid(Wx + a) x^T, dU/da = sigmoid(Wx + a), dU/db = x.

    Args:
        model: RbmModel.
        data_batch: (n, d) data states.
        model_batch: (m, d) buffer states.

    Returns:
        (dW, da, db) arrays shaped like the parameters.
    """
    Xd = np.atleast_2d(np.asarray(data_batch, dtype=float))
    Xm = np.atleast_2d(np.asarray(model_batch, dtype=float))
    if Xd.shape[0] == 0 or Xm.shape[0] == 0:
        raise ValueError("batches must be non-empty")
    hd = expit(Xd @ model.W.T + model.a)
    hm = expit(Xm @ model.W.T + model.a)
    dW = hd.T @ Xd / Xd.shape[0] - hm.T @ Xm / Xm.shape[0]
    da = hd.mean(axis=0) - hm.mean(axis=0)
    db = Xd.mean(axis=0) - Xm.mean(axis=0)
    return dW, da, db


class _Adam:
    """Adaptive-moment ascent from the defining update equations."""

    def __init__(self, shapes, lr, b1=0.9, b2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps
        self.t = 0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]

    def step(self, params, grads):
        self.t += 1
        out = []
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = self.b1 * self.m[i] + (1 - self.b1) * g
            self.v[i] = self.b2 * self.v[i] + (1 - self.b2) * g * g
            m_hat = self.m[i] / (1 - self.b1**self.t)
            v_hat = self.v[i] / (1 - self.b2**self.t)
            out.append(p + self.lr * m_hat / (np.sqrt(v_hat) + self.eps))
        return out


class _Sgd:
    def __init__(self, lr):
        self.lr = lr

    def step(self, params, grads):
        return [p + self.lr * g for p, g in zip(params, grads)]


def _make_optimizer(cfg, model):
    shapes = [model.W.shape, model.a.shape, model.b.shape]
    if cfg.optimizer == "adam":
        return _Adam(shapes, cfg.learning_rate)
    if cfg.optimizer == "sgd":
        return _Sgd(cfg.learning_rate)
    raise ValueError("unknown optimizer %r" % (cfg.optimizer,))


def _minibatch(dataset, size, rng):
    idx = np.minimum((rng.uniform(size) * dataset.shape[0]).astype(int), dataset.shape[0] - 1)
    return dataset[idx]


def _advance(model, X, spec, rng, steps):
    kind = spec.get("kind", "dmala")
    if kind == "gibbs":
        for _ in range(steps):
            X = model.block_gibbs_many(X, rng)
        return X
    if kind == "dmala":
        params = ProposalParams(spec.get("alpha", 0.2), spec.get("beta", 0.5))
        for _ in range(steps):
            X, _, _ = mh_step_many(X, model, params, rng)
        return X
    raise ValueError("unknown sampler kind %r" % (kind,))


def _record(trace, model, Xd, B, grads, alpha_pair):
    trace.data_energy.append(float(model.energy_many(Xd).mean()))
    trace.buffer_energy.append(float(model.energy_many(B).mean()))
    trace.grad_norm.append(float(np.sqrt(sum(float(np.sum(g * g)) for g in grads))))
    trace.alpha_pair.append(alpha_pair)


def pcd_train(model, dataset, sampler_spec, cfg, rng):
    """Persistent (or plain) contrastive-divergence training.

    The buffer initializes from Bernoulli(0.5) chains; each iteration
    advances every chain ``sampling_steps_per_iter`` steps with the
    given sampler, then applies one optimizer update.

    Args:
        model: Initial RbmModel (left unmodified).
        dataset: (n, d) binary training data.
        sampler_spec: {"kind": "dmala", "alpha": ..., "beta": ...} or
            {"kind": "gibbs"}.
        cfg: PcdConfig.
        rng: RngStream.

    Returns:
        (trained RbmModel, LearnTrace).
    """
    dataset = np.atleast_2d(np.asarray(dataset, dtype=float))
    model = RbmModel(model.W.copy(), model.a.copy(), model.b.copy())
    opt = _make_optimizer(cfg, model)
    batch = cfg.batch_size or cfg.buffer_size
    B = (rng.uniform((cfg.buffer_size, model.n_visible)) < 0.5).astype(float)
    trace = LearnTrace()
    for it in range(cfg.n_iters):
        Xd = _minibatch(dataset, batch, rng)
        if cfg.cd:
            B = Xd.copy()
        B = _advance(model, B, sampler_spec, rng, cfg.sampling_steps_per_iter)
        grads = ml_gradient(model, Xd, B)
        model.W, model.a, model.b = opt.step([model.W, model.a, model.b], grads)
        _record(trace, model, Xd, B, grads, None)
        if cfg.checkpoint_interval and (it + 1) % cfg.checkpoint_interval == 0:
            trace.checkpoints.append((it + 1, copy.deepcopy(model)))
    return model, trace


def acs_pcd_train(model, dataset, cfg, rng):
    """Cyclical-schedule PCD.

    Iteration 0 of each length-s cycle explores with (alpha_max,
    beta_max) for ``big_steps`` sampler steps; the remaining iterations
    exploit with (alpha_min, beta_min) for ``small_steps`` MH-corrected
    steps.  The very first sampling step of an exploration iteration
    skips the MH correction — the jump to the large step size would
    otherwise almost always be rejected — unless the schedule is flat,
    in which case there is no jump and every step stays corrected (this
    keeps a flat configuration identical to plain PCD).  Every
    ``tune_interval`` cycles the two step sizes re-estimate from the
    buffer: the exploration size at the cycle-start iteration, the
    exploitation size at the following one; those evaluations advance
    the buffer too.

    Args:
        model: Initial RbmModel (left unmodified).
        dataset: (n, d) binary training data.
        cfg: PcdConfig.
        rng: RngStream.

    Returns:
        (trained RbmModel, LearnTrace).
    """
    dataset = np.atleast_2d(np.asarray(dataset, dtype=float))
    model = RbmModel(model.W.copy(), model.a.copy(), model.b.copy())
    opt = _make_optimizer(cfg, model)
    batch = cfg.batch_size or cfg.buffer_size
    tc = cfg.tuner
    ceil = tc.resolved_ceil(model.space)
    alpha_max = cfg.alpha_max if cfg.alpha_max is not None else ceil
    alpha_min = cfg.alpha_min if cfg.alpha_min is not None else tc.alpha_floor
    B = (rng.uniform((cfg.buffer_size, model.n_visible)) < 0.5).astype(float)
    trace = LearnTrace()
    s = cfg.cycle_length
    for it in range(cfg.n_iters):
        # minibatch first so a flat schedule replays plain PCD's rng stream
        Xd = _minibatch(dataset, batch, rng)
        cycle, pos = divmod(it, s)
        retune = cfg.tune_interval is not None and cycle % cfg.tune_interval == 0
        if retune and pos == 0:
            alpha_max, B, _ = estimate_alpha_batch(
                model, alpha_max, tc.beta_max, B, rng, rho_star=tc.rho_star,
                zeta=tc.zeta, budget=tc.budget, t=tc.t_alpha, max_mode=True,
                alpha_ceil=ceil, additive=tc.additive_updates,
            )
        if retune and pos == 1:
            alpha_min, B, _ = estimate_alpha_batch(
                model, alpha_min, tc.beta_min, B, rng, rho_star=tc.rho_star,
                zeta=tc.zeta, budget=tc.budget, t=tc.t_alpha, max_mode=False,
                alpha_ceil=ceil, additive=tc.additive_updates,
            )
        alpha_max = max(alpha_max, alpha_min)
        flat = alpha_max == alpha_min and tc.beta_max == tc.beta_min
        if pos == 0:
            params = ProposalParams(alpha_max, tc.beta_max)
            for j in range(cfg.big_steps):
                B, _, _ = mh_step_many(B, model, params, rng, skip_mh=(j == 0 and not flat))
        else:
            params = ProposalParams(alpha_min, tc.beta_min)
            for _ in range(cfg.small_steps):
                B, _, _ = mh_step_many(B, model, params, rng)
        grads = ml_gradient(model, Xd, B)
        model.W, model.a, model.b = opt.step([model.W, model.a, model.b], grads)
        _record(trace, model, Xd, B, grads, (float(alpha_max), float(alpha_min)))
        if cfg.checkpoint_interval and (it + 1) % cfg.checkpoint_interval == 0:
            trace.checkpoints.append((it + 1, copy.deepcopy(model)))
    return model, trace


def ais_log_z(model, n_temps, steps_per_temp, n_particles, rng):
    """Annealed-importance estimate of the RBM log partition function.

    The path tempers the hidden pre-activations: at inverse temperature
    t the intermediate model has weights t W and hidden bias t a with
    the visible bias fixed, so t = 0 is the analytic base
    log Z_0 = sum_i softplus(b_i) + n_hidden log 2 and t = 1 the target.
    Particles start as exact base draws, pick up a weight increment at
    each rung, and move by Block Gibbs sweeps of the tempered model.

    Args:
        model: RbmModel.
        n_temps: Annealing rungs (ladder t_k = k / n_temps, k = 1..n_temps).
        steps_per_temp: Block Gibbs sweeps per rung.
        n_particles: Importance particles.
        rng: RngStream.

    Returns:
        (log_z_estimate, variance of the per-particle log weights).
    """
    if min(n_temps, n_particles) < 1 or steps_per_temp < 0:
        raise ValueError("counts must be positive")
    nh = model.n_hidden
    log_z_base = float(np.logaddexp(0.0, model.b).sum() + nh * np.log(2.0))
    X = (rng.uniform((n_particles, model.n_visible)) < expit(model.b)).astype(float)

    def tempered_energy(t, X):
        return np.logaddexp(0.0, t * (X @ model.W.T + model.a)).sum(axis=1) + X @ model.b

    log_w = np.zeros(n_particles)
    t_prev = 0.0
    for k in range(1, n_temps + 1):
        t = k / n_temps
        log_w += tempered_energy(t, X) - tempered_energy(t_prev, X)
        tempered = RbmModel(t * model.W, t * model.a, model.b)
        for _ in range(steps_per_temp):
            X = tempered.block_gibbs_many(X, rng)
        t_prev = t
    log_z = log_z_base + float(logsumexp(log_w)) - np.log(n_particles)
    return log_z, float(np.var(log_w))


def exact_log_likelihood(model, dataset):
    """Mean exact log likelihood: mean U(x) - log Z by enumeration.

    Feasible when the smaller RBM layer has at most ~20 units.
    """
    dataset = np.atleast_2d(np.asarray(dataset, dtype=float))
    return float(model.energy_many(dataset).mean() - model.exact_log_partition())


def make_two_cluster_dataset(rng, n=250, dims=10, noise=0.1):
    """Binary dataset around two complementary half-on prototypes.

    Each sample copies one of the prototypes (first half on / second
    half on) chosen uniformly, then flips every bit independently with
    probability ``noise``.
    """
    proto = np.zeros((2, dims))
    proto[0, : dims // 2] = 1.0
    proto[1, dims // 2 :] = 1.0
    labels = (rng.uniform(n) < 0.5).astype(int)
    X = proto[labels]
    flips = rng.uniform((n, dims)) < noise
    return np.abs(X - flips).astype(float)
