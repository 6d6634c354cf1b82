import numpy as np
import pytest

from acs.core import DiscreteSpace, RngStream, check_gradient, enumerate_states
from acs.targets import (
    QuadraticTarget,
    RbmModel,
    SyntheticMultimodal,
    build_grid_modes,
    sample_rbm_synthetic,
)


def test_grid_modes_square_count():
    modes, n_max = build_grid_modes(25, 5)
    assert modes.shape == (25, 2)
    assert n_max == 30
    assert len({tuple(m) for m in modes.tolist()}) == 25
    assert np.all(modes >= 0) and np.all(modes <= n_max)


def test_grid_modes_paper_scale():
    modes, n_max = build_grid_modes(25, 75)
    assert n_max == 450
    # evenly spaced rows: first mode sits one spacing unit in
    assert modes[0].tolist() == [round(450 / 7), round(450 / 7)]


def test_grid_modes_rejects_non_square():
    with pytest.raises(ValueError):
        build_grid_modes(24, 5)


def _mm():
    modes, n_max = build_grid_modes(4, 5)
    return SyntheticMultimodal(modes, 2.0, n_max, weights=[3.0, 1.0, 1.0, 1.0])


def test_multimodal_energy_matches_direct_logsumexp():
    t = _mm()
    theta = np.array([4.0, 9.0])
    direct = np.log(
        sum(
            w * np.exp(-np.sum((theta - m) ** 2) / (2 * 2.0))
            for w, m in zip([3.0, 1.0, 1.0, 1.0], t.modes)
        )
    )
    assert abs(t.energy(theta) - direct) < 1e-12


def test_multimodal_gradient_contract():
    t = _mm()
    assert check_gradient(t, [[4.0, 9.0], [0.0, 0.0], [7.0, 7.0]]) < 1e-5


def test_multimodal_peak_at_heavy_mode():
    t = _mm()
    states = enumerate_states(t.space)
    best = states[np.argmax(t.energy_many(states))]
    assert np.array_equal(best, t.modes[0])


def test_multimodal_literal_sign_pushes_mass_away():
    modes, n_max = build_grid_modes(4, 5)
    flipped = SyntheticMultimodal(modes, 2.0, n_max, literal_sign=True)
    at_mode = flipped.energy(modes[0])
    corner = flipped.energy(np.array([0.0, float(n_max)]))
    assert corner > at_mode


def test_multimodal_validation():
    with pytest.raises(ValueError):
        SyntheticMultimodal([[0.0, 0.0]], 0.0, 10)
    with pytest.raises(ValueError):
        SyntheticMultimodal([[12.0, 0.0]], 1.0, 10)
    with pytest.raises(ValueError):
        SyntheticMultimodal([[1.0, 1.0]], 1.0, 10, weights=[0.0])


def _rbm_fixed():
    W = np.array([[0.5, -0.3, 0.2], [0.1, 0.4, -0.6]])
    return RbmModel(W, np.array([0.05, -0.1]), np.array([0.3, -0.2, 0.1]))


def test_rbm_energy_matches_hidden_enumeration():
    # free energy == log sum over hidden configurations (oracle value)
    rbm = _rbm_fixed()
    assert abs(rbm.energy(np.array([1.0, 0.0, 1.0])) - 1.9743589566007855) < 1e-12


def test_rbm_gradient_contract():
    rbm = _rbm_fixed()
    states = [[0.0, 0.0, 0.0], [1.0, 0.0, 1.0], [1.0, 1.0, 1.0]]
    assert check_gradient(rbm, states) < 1e-5


def test_rbm_partition_sides_agree():
    # hidden-side and visible-side enumeration give the same log Z
    rng = np.random.default_rng(4)
    rbm = RbmModel(rng.normal(0, 0.7, (5, 3)), rng.normal(0, 0.2, 5), rng.normal(0, 0.2, 3))
    wide = RbmModel(rbm.W.T, rbm.b, rbm.a)  # swap roles: now visible side is smaller
    assert abs(rbm.exact_log_partition() - wide.exact_log_partition()) < 1e-10


def test_rbm_partition_matches_direct_sum():
    rbm = _rbm_fixed()
    states = enumerate_states(DiscreteSpace.binary(3))
    direct = np.log(np.exp(rbm.energy_many(states)).sum())
    assert abs(rbm.exact_log_partition() - direct) < 1e-12


def test_rbm_shape_validation():
    with pytest.raises(ValueError):
        RbmModel(np.ones((2, 3)), np.zeros(3), np.zeros(2))
    with pytest.raises(ValueError):
        RbmModel(np.full((2, 3), np.nan), np.zeros(2), np.zeros(3))


def test_block_gibbs_preserves_target():
    # occupancy after many sweeps matches exact probabilities
    rng = np.random.default_rng(8)
    rbm = RbmModel(rng.normal(0, 1.0, (3, 4)), rng.normal(0, 0.2, 3), np.zeros(4))
    from acs.core import exact_probabilities

    pi = exact_probabilities(rbm)
    stream = RngStream(12)
    x = np.zeros(4)
    counts = np.zeros(16)
    for _ in range(200):
        x = rbm.block_gibbs_step(x, stream)
    for _ in range(30000):
        x = rbm.block_gibbs_step(x, stream)
        counts[rbm.space.state_index(x)] += 1
    assert np.max(np.abs(counts / 30000 - pi)) < 0.02


def test_sample_rbm_synthetic_deterministic():
    sp = DiscreteSpace.binary(6)
    a = sample_rbm_synthetic(sp, 4, RngStream(3), weight_scale=1.0)
    b = sample_rbm_synthetic(sp, 4, RngStream(3), weight_scale=1.0)
    assert np.array_equal(a.W, b.W) and np.array_equal(a.a, b.a) and np.array_equal(a.b, b.b)
    assert a.W.shape == (4, 6)
    # empirical scale in the right ballpark
    assert 0.5 < a.W.std() < 1.6


def test_quadratic_constants():
    t = QuadraticTarget([2.0, 2.0], [[0.5, 0.1], [0.1, 0.4]], 4)
    eig = np.linalg.eigvalsh(np.array([[0.5, 0.1], [0.1, 0.4]]))
    assert abs(t.lipschitz_m - eig[-1]) < 1e-12
    assert abs(t.concavity_m - eig[0]) < 1e-12
    assert t.diameter() == np.sqrt(32.0)
    assert t.energy(np.array([2.0, 2.0])) == 0.0
    assert check_gradient(t, [[0.0, 0.0], [4.0, 1.0]]) < 1e-5


def test_quadratic_validation():
    with pytest.raises(ValueError):
        QuadraticTarget([0.0, 0.0], [[1.0, 0.5], [0.4, 1.0]], 4)  # asymmetric
    with pytest.raises(ValueError):
        QuadraticTarget([0.0], [[-1.0]], 4)  # not positive definite
