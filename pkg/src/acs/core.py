"""Shared state-space, target-model and RNG plumbing.

States are plain ``numpy`` float vectors holding the integer coordinate
values (binary coordinates as 0/1, ordinal coordinates as 0..N).  All
distance and gradient arithmetic operates directly on this integer
embedding; target energies are differentiable extensions that accept any
real vector, which is what makes finite-difference gradient checks and
gradient-informed proposals well defined.
"""

import numpy as np
from scipy.special import logsumexp

# Enumeration refuses spaces larger than this unless the caller raises it.
DEFAULT_ENUM_CAP = 2**20

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(z):
    """One splitmix64 finalization round; used for seed derivation."""
    z = (z + _SPLITMIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


class DiscreteSpace:
    """A coordinate-factorized finite domain.

    Each coordinate takes integer values ``0..n_values[i]-1``; binary
    coordinates have ``n_values[i] == 2``.

    Args:
        n_values: Per-coordinate domain sizes (each >= 2), or a single
            int paired with ``dims`` for a uniform domain.
        dims: Number of coordinates when ``n_values`` is a scalar.
    """

    def __init__(self, n_values, dims=None):
        if np.isscalar(n_values):
            if dims is None:
                raise ValueError("dims required when n_values is scalar")
            n_values = [int(n_values)] * dims
        self.n_values = np.asarray(n_values, dtype=np.int64)
        if self.n_values.ndim != 1 or self.n_values.size < 1:
            raise ValueError("need at least one coordinate")
        if np.any(self.n_values < 2):
            raise ValueError("every coordinate domain needs >= 2 values")
        self.dims = int(self.n_values.size)

    @classmethod
    def binary(cls, dims):
        """Binary cube {0,1}^dims."""
        return cls(2, dims=dims)

    @classmethod
    def ordinal(cls, max_value, dims):
        """Ordinal box {0..max_value}^dims."""
        return cls(int(max_value) + 1, dims=dims)

    @property
    def is_binary(self):
        return bool(np.all(self.n_values == 2))

    @property
    def uniform_n(self):
        """Common domain size if all coordinates share one, else None."""
        n0 = int(self.n_values[0])
        return n0 if np.all(self.n_values == n0) else None

    def size(self):
        """Total number of states |Theta| (Python int, exact)."""
        total = 1
        for n in self.n_values:
            total *= int(n)
        return total

    def contains(self, state):
        state = np.asarray(state)
        return (
            state.shape == (self.dims,)
            and np.all(state == np.round(state))
            and np.all(state >= 0)
            and np.all(state < self.n_values)
        )

    def state_index(self, state):
        """Index of ``state`` in enumeration order (coordinate 0 slowest)."""
        idx = 0
        for i in range(self.dims):
            idx = idx * int(self.n_values[i]) + int(round(float(state[i])))
        return idx

    def state_indices(self, states):
        """Vectorized :meth:`state_index` for an (n, d) array."""
        states = np.asarray(states)
        idx = np.zeros(states.shape[0], dtype=np.int64)
        for i in range(self.dims):
            idx = idx * self.n_values[i] + np.round(states[:, i]).astype(np.int64)
        return idx


class TargetModel:
    """Contract for targets: unnormalized log density U and its gradient.

    ``energy`` returns U(theta), the log of the unnormalized probability
    mass, evaluated via a differentiable extension so that it also
    accepts off-grid real vectors.  ``grad`` is the analytic gradient of
    that extension.  Subclasses may override ``energy_many``/``grad_many``
    with vectorized versions; the defaults loop.
    """

    space = None

    def energy(self, state):
        raise NotImplementedError

    def grad(self, state):
        raise NotImplementedError

    def energy_many(self, states):
        states = np.asarray(states, dtype=float)
        return np.array([self.energy(s) for s in states])

    def grad_many(self, states):
        states = np.asarray(states, dtype=float)
        return np.stack([self.grad(s) for s in states])


class RngStream:
    """Deterministic uniform stream backed by counter-based Philox.

    Identical seeds give bit-identical draw sequences across runs and
    platforms.  Parallel chains derive independent child streams through
    :meth:`split`, which hashes (seed, index) with splitmix64 so that no
    child repeats the parent stream.

    Args:
        seed: 64-bit integer seed.
    """

    def __init__(self, seed):
        self.seed = int(seed) & _MASK64
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def uniform(self, size=None):
        """Uniform(0,1) draw(s); scalar float when ``size`` is None."""
        if size is None:
            return float(self._gen.random())
        return self._gen.random(size)

    def split(self, index):
        """Child stream for chain ``index`` (deterministic, parent left untouched)."""
        return RngStream(splitmix64(self.seed ^ splitmix64(int(index) + 1)))

    def categorical(self, probs):
        """Inverse-CDF draw from explicit probabilities.

        Ties in the cumulative sums resolve toward the lower value index
        (``searchsorted`` with side='left'), which pins down the exact
        draw sequence for reproducibility.
        """
        return inverse_cdf_index(np.asarray(probs, dtype=float), self.uniform())


def inverse_cdf_index(probs, u):
    """Index i with cumsum(probs)[i-1] <= u < cumsum(probs)[i], ties low."""
    cum = np.cumsum(probs)
    cum[-1] = max(cum[-1], 1.0)  # guard against rounding below 1
    return int(np.searchsorted(cum, u, side="left"))


def distance_sq(a, b):
    """Squared Euclidean distance between two states of one space.

    Args:
        a: State vector.
        b: State vector of the same length.

    Returns:
        Sum of squared coordinate differences (floats).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch: %s vs %s" % (a.shape, b.shape))
    d = a - b
    return float(d @ d)


def enumerate_states(space, cap=DEFAULT_ENUM_CAP):
    """All states of ``space`` in lexicographic order, coordinate 0 slowest.

    Args:
        space: DiscreteSpace with size() <= cap.
        cap: Enumeration cap; exceeding it raises instead of approximating.

    Returns:
        (|Theta|, d) float array; row k is the state with index k.
    """
    total = space.size()
    if total > cap:
        raise ValueError("state count %d exceeds enumeration cap %d" % (total, cap))
    grids = np.meshgrid(*[np.arange(n) for n in space.n_values], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(float)


def exact_log_partition(target, cap=DEFAULT_ENUM_CAP):
    """log Z = log sum_theta exp(U(theta)) over the full enumeration."""
    states = enumerate_states(target.space, cap=cap)
    return float(logsumexp(target.energy_many(states)))


def exact_probabilities(target, cap=DEFAULT_ENUM_CAP):
    """Exact normalized pmf over enumeration order."""
    states = enumerate_states(target.space, cap=cap)
    e = target.energy_many(states)
    p = np.exp(e - logsumexp(e))
    return p / p.sum()


def exact_sample(target, n, rng, cap=DEFAULT_ENUM_CAP):
    """Exact i.i.d. draws from an enumerable target by inverse CDF.

    Args:
        target: Enumerable TargetModel.
        n: Number of samples.
        rng: RngStream.

    Returns:
        (n, d) float array of exact samples.
    """
    states = enumerate_states(target.space, cap=cap)
    probs = exact_probabilities(target, cap=cap)
    cum = np.cumsum(probs)
    cum[-1] = max(cum[-1], 1.0)
    idx = np.searchsorted(cum, rng.uniform(n), side="left")
    return states[idx]


def check_gradient(target, states, step=1e-4, rtol=1e-5):
    """Max relative error of ``target.grad`` vs central finite differences.

    The contract for every shipped target: relative error below 1e-5 at
    step 1e-4 on in-domain states.
    """
    worst = 0.0
    for s in np.asarray(states, dtype=float):
        g = np.asarray(target.grad(s), dtype=float)
        fd = np.empty_like(g)
        for i in range(s.size):
            hi, lo = s.copy(), s.copy()
            hi[i] += step
            lo[i] -= step
            fd[i] = (target.energy(hi) - target.energy(lo)) / (2 * step)
        denom = max(1.0, float(np.max(np.abs(fd))))
        worst = max(worst, float(np.max(np.abs(g - fd))) / denom)
    if worst > rtol:
        raise AssertionError("gradient mismatch: rel err %.3g > %.3g" % (worst, rtol))
    return worst
