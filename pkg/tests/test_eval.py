import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acs.core import RngStream, exact_sample
from acs.eval import KernelSpec, avg_energy_curve, empirical_kl, log10_mmd, mmd_sq, mode_coverage
from acs.targets import QuadraticTarget

X0 = np.array([[0, 0], [1, 1], [0, 1]], dtype=float)
Y0 = np.array([[0, 0], [1, 0]], dtype=float)


def test_kernel_spec():
    k = KernelSpec(bandwidth=2.0)
    G = k.gram(X0, X0)
    assert np.array_equal(np.diag(G), np.ones(3))
    assert G[0, 1] == np.exp(-2.0 / 4.0)  # hamming 2, d 2, bw 2
    with pytest.raises(ValueError):
        KernelSpec(bandwidth=0.0)


def test_mmd_frozen_oracles():
    assert abs(mmd_sq(X0, Y0) - 0.3028018783842128) < 1e-15
    assert abs(mmd_sq(X0, Y0, estimator="unbiased") - -0.05160604058205842) < 1e-15


def test_mmd_identical_sets_vanish():
    assert mmd_sq(X0, X0) == 0.0
    assert log10_mmd(X0, X0) == -12.0


def test_mmd_validation():
    with pytest.raises(ValueError):
        mmd_sq(X0[:0], Y0)
    with pytest.raises(ValueError):
        mmd_sq(X0[:1], Y0, estimator="unbiased")
    with pytest.raises(ValueError):
        mmd_sq(X0, Y0, estimator="nope")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 12), st.integers(2, 12))
def test_biased_mmd_nonnegative(seed, n, m):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, (n, 3)).astype(float)
    Y = rng.integers(0, 2, (m, 3)).astype(float)
    assert mmd_sq(X, Y) >= 0.0


def test_log10_mmd_consistent():
    v = mmd_sq(X0, Y0)
    assert log10_mmd(X0, Y0) == pytest.approx(np.log10(v), abs=1e-15)


def test_empirical_kl_frozen_oracle():
    # 3-state quadratic: energies [-0.4, 0, -0.4]; counts [4, 1, 0]
    t = QuadraticTarget([1.0], [[0.8]], 2)
    samples = np.array([[0.0]] * 4 + [[1.0]])
    assert abs(empirical_kl(samples, t) - 0.3678487752012972) < 1e-12


def test_empirical_kl_nonneg_and_improves():
    t = QuadraticTarget([2.0], [[0.5]], 4)
    skewed = np.zeros((50, 1))
    good = exact_sample(t, 50, RngStream(3))
    assert empirical_kl(skewed, t) > empirical_kl(good, t) >= 0.0


def test_empirical_kl_large_exact_sample_small():
    t = QuadraticTarget([2.0, 2.0], np.eye(2) * 0.4, 4)
    samples = exact_sample(t, 20000, RngStream(8))
    assert empirical_kl(samples, t) < 0.01


def test_mode_coverage():
    modes = np.array([[0.0, 0.0], [10.0, 10.0], [20.0, 0.0]])
    states = np.array([[1.0, 2.0], [3.0, 3.0], [9.0, 12.0], [8.0, 8.0]])
    count, first = mode_coverage(states, modes, radius_linf=2.0)
    assert count == 2
    assert first.tolist() == [0, 2, -1]
    # boundary is inclusive
    count_b, _ = mode_coverage(np.array([[18.0, 2.0]]), modes, radius_linf=2.0)
    assert count_b == 1


def test_avg_energy_curve_matches_direct():
    rng = np.random.default_rng(0)
    e = rng.normal(size=37)
    cum, win = avg_energy_curve(e, window=5)
    for t in range(e.size):
        assert cum[t] == pytest.approx(e[: t + 1].mean(), abs=1e-12)
        lo = max(0, t + 1 - 5)
        assert win[t] == pytest.approx(e[lo : t + 1].mean(), abs=1e-12)


def test_avg_energy_curve_wide_window_is_cumulative():
    e = np.linspace(-3, 1, 20)
    cum, win = avg_energy_curve(e, window=100)
    assert np.allclose(cum, win, atol=1e-14)
