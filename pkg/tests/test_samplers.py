import numpy as np
import pytest

from acs.core import RngStream, exact_probabilities
from acs.samplers import (
    RecordConfig,
    acs_run,
    block_gibbs_run,
    dmala_run,
    greedy_mode_ascent,
    mode_escape_run,
    random_walk_run,
    single_flip_informed_run,
)
from acs.schedule import Schedule, build_alpha_schedule, naive_beta_schedule
from acs.targets import QuadraticTarget, RbmModel, SyntheticMultimodal, build_grid_modes


def _quad():
    return QuadraticTarget([2.0, 2.0], np.eye(2) * 0.4, 4)


def _rbm():
    rng = np.random.default_rng(2)
    return RbmModel(rng.normal(0, 1.0, (3, 4)), rng.normal(0, 0.2, 3), np.zeros(4))


def test_acs_run_shapes_and_determinism():
    sched = Schedule(build_alpha_schedule(4, 8.0, 0.2), naive_beta_schedule(4, 0.9, 0.5))
    t = _quad()
    tr1 = acs_run(t, sched, 25, np.zeros(2), RngStream(3))
    tr2 = acs_run(t, sched, 25, np.zeros(2), RngStream(3))
    assert tr1.energies.shape == (100,)
    assert tr1.states.shape == (100, 2)
    assert np.array_equal(tr1.states, tr2.states)
    assert np.array_equal(tr1.energies, tr2.energies)
    assert np.all((tr1.accept_probs >= 0) & (tr1.accept_probs <= 1))
    assert tr1.meta["sampler"] == "acs"


def test_degenerate_schedule_equals_constant_sampler():
    # flat schedule == the constant-parameter baseline, bit for bit
    t = _quad()
    sched = Schedule.constant(2.5, beta=0.5, s=1)
    a = acs_run(t, sched, 500, np.zeros(2), RngStream(7))
    d = dmala_run(t, 2.5, 500, np.zeros(2), RngStream(7))
    assert np.array_equal(a.states, d.states)
    assert np.array_equal(a.energies, d.energies)
    assert np.array_equal(a.accept_probs, d.accept_probs)
    assert np.array_equal(a.accepted, d.accepted)


def test_recorder_thinning():
    t = _quad()
    tr = dmala_run(t, 1.0, 10, np.zeros(2), RngStream(1), RecordConfig(thin=3))
    assert tr.states.shape == (4, 2)  # steps 0, 3, 6, 9
    assert tr.energies.shape == (10,)


def test_recorder_state_toggle():
    t = _quad()
    tr = dmala_run(t, 1.0, 5, np.zeros(2), RngStream(1), RecordConfig(record_states=False))
    assert tr.states is None
    assert tr.energies.shape == (5,)


def test_random_walk_stationary_on_small_target():
    t = QuadraticTarget([1.0], [[0.8]], 2)
    pi = exact_probabilities(t)
    tr = random_walk_run(t, 30000, np.array([0.0]), RngStream(5))
    counts = np.bincount(tr.states[:, 0].astype(int), minlength=3)
    assert np.max(np.abs(counts / 30000 - pi)) < 0.02


def test_random_walk_rng_layout():
    # exactly 3 uniforms per step: coordinate, value, acceptance
    t = _quad()
    rng = RngStream(13)
    random_walk_run(t, 10, np.zeros(2), rng)
    ref = RngStream(13)
    ref.uniform(30)
    assert rng.uniform(4).tolist() == ref.uniform(4).tolist()


def test_single_flip_requires_binary():
    with pytest.raises(ValueError):
        single_flip_informed_run(_quad(), 5, np.zeros(2), RngStream(0))


def test_single_flip_stationary_on_tiny_rbm():
    rbm = _rbm()
    pi = exact_probabilities(rbm)
    tr = single_flip_informed_run(rbm, 40000, np.zeros(4), RngStream(9))
    counts = np.bincount(rbm.space.state_indices(tr.states), minlength=16)
    assert np.max(np.abs(counts / 40000 - pi)) < 0.02


def test_block_gibbs_run_records():
    rbm = _rbm()
    tr = block_gibbs_run(rbm, 50, np.zeros(4), RngStream(3))
    assert tr.states.shape == (50, 4)
    assert np.all(tr.accept_probs == 1.0)
    assert set(np.unique(tr.states)) <= {0.0, 1.0}


def test_greedy_ascent_finds_mode_center():
    # sharp, unevenly weighted bumps so the nearest center is a strict
    # local maximum (equal weights tie to machine precision here)
    modes, n_max = build_grid_modes(4, 5)
    t = SyntheticMultimodal(modes, 0.5, n_max, weights=[1.0, 1.0, 3.0, 1.0])
    start = modes[2] + np.array([2.0, -1.0])
    mode = greedy_mode_ascent(t, start)
    assert np.array_equal(mode, modes[2])


def test_greedy_ascent_flat_returns_start():
    class Flat(QuadraticTarget):
        def energy(self, theta):
            return 0.0

    t = Flat([1.0, 1.0], np.eye(2), 3)
    assert np.array_equal(greedy_mode_ascent(t, np.array([2.0, 1.0])), [2.0, 1.0])


def test_mode_escape_starts_at_ascended_mode():
    modes, n_max = build_grid_modes(4, 5)
    t = SyntheticMultimodal(modes, 0.5, n_max)
    trace, mode = mode_escape_run(
        t, modes[0] + 1.0, dmala_run, RngStream(4), alpha=2.0, n_steps=20,
    )
    assert np.array_equal(mode, modes[0])
    assert trace.meta["mode_start"] == modes[0].tolist()
    assert trace.energies.shape == (20,)
