"""Exact transition matrices and numerical verification of ergodicity bounds.

On enumerable targets the full MH kernel is computable in closed form:
off-diagonal entries are acceptance times proposal probability and the
diagonal absorbs every rejection plus the accepted self-proposal, so
rows sum to one by construction.  On top of the exact kernel this module
verifies, numerically rather than symbolically, the chain's minorization
constant, the geometric total-variation envelope it implies, and the
same bound for the composite kernel of one full schedule cycle.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from acs.core import DEFAULT_ENUM_CAP, enumerate_states, exact_probabilities
from acs.proposal import _log_softmax, _logits_matrix

__all__ = [
    "TransitionMatrix",
    "ConcavityConstants",
    "exact_kernel",
    "check_stationarity",
    "check_detailed_balance",
    "concavity_constants",
    "log_minorization_epsilon",
    "minorization_epsilon",
    "verify_minorization",
    "tv_convergence_curve",
    "composite_cycle_kernel",
    "second_eigenvalue_modulus",
]


@dataclass
class TransitionMatrix:
    """Row-stochastic kernel over enumeration order.

    Attributes:
        P: (S, S) transition probabilities.
        states: (S, d) states in enumeration order.
        self_accept_mass: Per-state accepted self-proposal probability
            (part of the diagonal).
        rejected_mass: Per-state total rejection probability (the other
            part of the diagonal).
    """

    P: np.ndarray
    states: np.ndarray
    self_accept_mass: np.ndarray = None
    rejected_mass: np.ndarray = None

    def __post_init__(self):
        rs = self.P.sum(axis=1)
        if np.max(np.abs(rs - 1.0)) > 1e-12:
            raise ValueError("rows must sum to 1 within 1e-12")
        if np.min(self.P) < 0:
            raise ValueError("entries must be nonnegative")


def _log_q_matrix(target, params, cap):
    """(S, S) log proposal densities between all state pairs."""
    states = enumerate_states(target.space, cap=cap)
    S, d = states.shape
    grads = target.grad_many(states)
    n_values = target.space.n_values
    log_q = np.zeros((S, S))
    tables = np.empty((S, d, int(np.max(n_values))))
    for s in range(S):
        tables[s] = _log_softmax(_logits_matrix(states[s], grads[s], n_values, params))
    V = np.round(states).astype(int)
    for i in range(d):
        log_q += tables[:, i, :][:, V[:, i]]
    return states, log_q


def exact_kernel(target, params, cap=DEFAULT_ENUM_CAP):
    """Exact MH kernel for the gradient-informed proposal.

    Args:
        target: Enumerable TargetModel.
        params: ProposalParams.
        cap: Enumeration cap.

    Returns:
        TransitionMatrix with rejection/self-acceptance diagnostics.
    """
    states, log_q = _log_q_matrix(target, params, cap)
    U = target.energy_many(states)
    la = U[None, :] - U[:, None] + log_q.T - log_q
    A = np.exp(np.minimum(la, 0.0))
    P = A * np.exp(log_q)
    off_diag = P - np.diag(np.diag(P))
    self_accept = np.exp(np.diag(log_q))  # diagonal acceptance is always 1
    rejected = 1.0 - off_diag.sum(axis=1) - self_accept
    # summation noise can push the off-diagonal mass a few ulp past 1
    P = off_diag + np.diag(np.maximum(1.0 - off_diag.sum(axis=1), 0.0))
    return TransitionMatrix(P, states, self_accept, np.maximum(rejected, 0.0))


def check_stationarity(P, pi_exact):
    """max |pi P - pi| over states."""
    P = P.P if isinstance(P, TransitionMatrix) else P
    return float(np.max(np.abs(pi_exact @ P - pi_exact)))


def check_detailed_balance(P, pi_exact):
    """max |pi(s) P[s,t] - pi(t) P[t,s]| over pairs."""
    P = P.P if isinstance(P, TransitionMatrix) else P
    F = pi_exact[:, None] * P
    return float(np.max(np.abs(F - F.T)))


@dataclass(frozen=True)
class ConcavityConstants:
    """Constants entering the minorization bound.

    Attributes:
        lipschitz_m: Gradient-Lipschitz constant M (largest Hessian
            eigenvalue for quadratic targets).
        concavity_m: Strong-concavity constant m > 0 (smallest).
        diam: Exact diameter of the state set.
        grad_norm_at_a: Smallest gradient norm over the state set.
    """

    lipschitz_m: float
    concavity_m: float
    diam: float
    grad_norm_at_a: float


def concavity_constants(target, cap=DEFAULT_ENUM_CAP):
    """Exact constants for a quadratic target by enumeration.

    The Lipschitz/concavity constants come from the Hessian spectrum;
    the gradient-norm minimizer is found by exhaustive search.
    """
    states = enumerate_states(target.space, cap=cap)
    norms = np.linalg.norm(target.grad_many(states), axis=1)
    return ConcavityConstants(
        lipschitz_m=target.lipschitz_m,
        concavity_m=target.concavity_m,
        diam=target.diameter(),
        grad_norm_at_a=float(norms.min()),
    )


def log_minorization_epsilon(c, alpha, beta, variant="proof"):
    """log of the minorization constant epsilon_{beta,alpha}.

    The "proof" variant is exp{-(1/alpha + beta M - beta m / 2) diam^2
    - ||grad U(a)|| diam}; the "preamble" variant replaces 1/alpha with
    1/(2 alpha) and scales the gradient term by beta.  The proof form is
    the smaller of the two and is what verification asserts against.

    Args:
        c: ConcavityConstants.
        alpha: Step size; must satisfy alpha < 1 / (beta M).
        beta: Balancing parameter.
        variant: "proof" or "preamble".

    Returns:
        log epsilon (a nonpositive real).
    """
    if not alpha < 1.0 / (beta * c.lipschitz_m):
        raise ValueError("hypothesis alpha < 1/(beta M) violated")
    d2 = c.diam * c.diam
    if variant == "proof":
        return -(1.0 / alpha + beta * c.lipschitz_m - beta * c.concavity_m / 2.0) * d2 - c.grad_norm_at_a * c.diam
    if variant == "preamble":
        return (
            -(1.0 / (2.0 * alpha) + beta * c.lipschitz_m - beta * c.concavity_m / 2.0) * d2
            - beta * c.grad_norm_at_a * c.diam
        )
    raise ValueError("unknown variant %r" % (variant,))


def minorization_epsilon(c, alpha, beta, variant="proof"):
    """epsilon_{beta,alpha} itself; underflows to 0 for tiny alpha."""
    return float(np.exp(log_minorization_epsilon(c, alpha, beta, variant)))


@dataclass
class MinorizationReport:
    """Outcome of a minorization check: passes iff margin >= 0.

    Carries the exact kernel and stationary distribution so callers can
    run further checks without rebuilding them.
    """

    epsilon: float
    min_ratio: float
    margin: float
    alpha: float
    beta: float
    hypothesis_ok: bool = True
    kernel: TransitionMatrix = None
    pi: np.ndarray = None


def verify_minorization(target, alpha, beta, variant="proof", cap=DEFAULT_ENUM_CAP):
    """Check min P[s,t] / nu(t) >= epsilon on the exact kernel.

    nu is the beta-tempered target exp(beta U) / Z_beta from the bound's
    statement.  The bound is typically loose, so the report carries both
    epsilon and the empirical minimum ratio.
    """
    from acs.proposal import ProposalParams

    c = concavity_constants(target, cap=cap)
    eps = minorization_epsilon(c, alpha, beta, variant)
    tm = exact_kernel(target, ProposalParams(alpha, beta), cap=cap)
    U = target.energy_many(tm.states)
    pi = np.exp(U - logsumexp(U))
    log_nu = beta * U - logsumexp(beta * U)
    ratio = tm.P / np.exp(log_nu)[None, :]
    min_ratio = float(ratio.min())
    return MinorizationReport(
        eps, min_ratio, min_ratio - eps, alpha, beta,
        hypothesis_ok=alpha < 1.0 / (beta * c.lipschitz_m), kernel=tm, pi=pi,
    )


def tv_convergence_curve(P, pi_exact, n_max):
    """Worst-case TV distance to pi after n = 1..n_max steps.

    The worst case over starting distributions is attained at a Dirac,
    so the curve is max over rows of half the L1 distance of P^n to pi.
    """
    P = P.P if isinstance(P, TransitionMatrix) else P
    tv = np.empty(n_max)
    Pn = P.copy()
    for n in range(n_max):
        tv[n] = 0.5 * np.max(np.abs(Pn - pi_exact[None, :]).sum(axis=1))
        if n + 1 < n_max:
            Pn = Pn @ P
    return tv


def _compensated_matmul(A, B):
    """Kahan-compensated product for when plain BLAS drifts too far."""
    C = np.zeros_like(A)
    comp = np.zeros_like(A)
    for k in range(A.shape[1]):
        y = A[:, k : k + 1] * B[k] - comp
        t = C + y
        comp = (t - C) - y
        C = t
    return C


def composite_cycle_kernel(target, schedule, cap=DEFAULT_ENUM_CAP):
    """Exact kernel of one full schedule cycle: P_1 P_2 ... P_s.

    Products run in float64 and fall back to compensated accumulation
    if the row-sum residual ever exceeds the 1e-12 contract.

    Returns:
        TransitionMatrix of the cycle-composite kernel.
    """
    from acs.proposal import ProposalParams

    kernels = [
        exact_kernel(target, ProposalParams(*schedule.at(k)), cap=cap)
        for k in range(schedule.steps_per_cycle)
    ]
    P = kernels[0].P
    for tm in kernels[1:]:
        nxt = P @ tm.P
        if np.max(np.abs(nxt.sum(axis=1) - 1.0)) > 1e-12:
            nxt = _compensated_matmul(P, tm.P)
        P = nxt
    return TransitionMatrix(P, kernels[0].states)


def second_eigenvalue_modulus(P):
    """|lambda_2| of the kernel (second-largest eigenvalue modulus)."""
    P = P.P if isinstance(P, TransitionMatrix) else P
    mags = np.sort(np.abs(np.linalg.eigvals(P)))[::-1]
    return float(mags[1])
