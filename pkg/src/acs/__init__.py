"""Cyclical gradient-informed MCMC for discrete distributions.

The package provides:

* coordinate-wise gradient-informed proposals with a step size ``alpha``
  and a balancing parameter ``beta``, plus their exact Metropolis-Hastings
  correction (:mod:`acs.proposal`);
* cyclical (alpha, beta) schedules and an automatic tuner targeting a
  desired acceptance rate (:mod:`acs.schedule`, :mod:`acs.tuner`);
* chain drivers for the cyclical sampler and baselines
  (:mod:`acs.samplers`);
* RBM targets, maximum-likelihood training with persistent chains, and
  annealed-importance partition-function estimation (:mod:`acs.targets`,
  :mod:`acs.learning`);
* exact transition-matrix construction and numerical verification of the
  minorization/ergodicity bounds on enumerable spaces (:mod:`acs.theory`);
* evaluation metrics (MMD, exact KL, mode coverage) and an experiment
  CLI (:mod:`acs.eval`, :mod:`acs.cli`).
"""

from acs.core import (
    DiscreteSpace,
    RngStream,
    TargetModel,
    distance_sq,
    enumerate_states,
    exact_log_partition,
    exact_sample,
)
from acs.eval import empirical_kl, log10_mmd, mmd_sq, mode_coverage
from acs.learning import (
    PcdConfig,
    acs_pcd_train,
    ais_log_z,
    exact_log_likelihood,
    ml_gradient,
    pcd_train,
)
from acs.proposal import ProposalOutcome, ProposalParams, mh_accept_prob, mh_step, sample_proposal
from acs.samplers import RecordConfig, SampleTrace, acs_run, dmala_run
from acs.schedule import Schedule, build_alpha_schedule, naive_beta_schedule, step_size_at
from acs.targets import QuadraticTarget, RbmModel, SyntheticMultimodal, build_grid_modes, sample_rbm_synthetic
from acs.theory import exact_kernel, minorization_epsilon, verify_minorization
from acs.tuner import TunerConfig, auto_tune

__all__ = [
    "DiscreteSpace",
    "PcdConfig",
    "ProposalOutcome",
    "ProposalParams",
    "QuadraticTarget",
    "RbmModel",
    "RecordConfig",
    "RngStream",
    "SampleTrace",
    "Schedule",
    "SyntheticMultimodal",
    "TargetModel",
    "TunerConfig",
    "acs_pcd_train",
    "acs_run",
    "ais_log_z",
    "auto_tune",
    "build_alpha_schedule",
    "build_grid_modes",
    "distance_sq",
    "dmala_run",
    "empirical_kl",
    "enumerate_states",
    "exact_kernel",
    "exact_log_likelihood",
    "exact_log_partition",
    "exact_sample",
    "log10_mmd",
    "mh_accept_prob",
    "mh_step",
    "minorization_epsilon",
    "ml_gradient",
    "mmd_sq",
    "mode_coverage",
    "naive_beta_schedule",
    "pcd_train",
    "sample_proposal",
    "sample_rbm_synthetic",
    "step_size_at",
    "verify_minorization",
]

__version__ = "0.1.0"
