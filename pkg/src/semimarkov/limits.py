"""Analytical limit parameters theta, mu, gamma^2 of the scaled integral path.

The centered displacement sequence eta_k = (V_{k-1} - theta) xi_k has mean
zero under the invariant law; its variance constant gamma^2 is computed here
as the covariance series cov(0) + 2 sum_{k>=1} cov(k), with each lag obtained
in closed form by conditioning on the chain step taken after the first
sojourn:

    cov(k) = sum_{v,u,w} pi_v (v - theta) p_vu m_vu [P^(k-1)]_uw (w - theta) mu_w

(the first sojourn's conditional law integrates to m_vu regardless of its
shape, so no densities appear).  Periodic chains have no convergent series;
deterministic cycles get the exact per-state closed form, and all other
periodic kernels fall back to the regenerative cycle estimator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotIrreducible, PeriodicChain
from .kernel import SemiMarkovKernel, _slem, validate_kernel

_MAX_SERIES_TERMS = 100_000


@dataclass(frozen=True)
class LimitParameters:
    """Drift and diffusion of the limiting Brownian motion.

    theta is the long-run mean velocity, mu the mean stationary sojourn,
    gamma2 the variance constant of the centered displacement sums, and
    diffusion = gamma2 / mu the variance rate of the weak limit.
    """

    theta: float
    mu: float
    gamma2: float
    diffusion: float
    method: str

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if self.gamma2 < 0:
            raise ValueError("gamma2 must be >= 0")
        if abs(self.diffusion - self.gamma2 / self.mu) > 1e-12:
            raise ValueError("diffusion must equal gamma2 / mu")


def theta(kernel: SemiMarkovKernel, pi: np.ndarray) -> float:
    """Long-run mean velocity E_pi[V_0 S_1] / E_pi[S_1]."""
    mu_v = kernel.conditional_mean_sojourns()
    return float(pi @ (kernel.states * mu_v)) / float(pi @ mu_v)


def mean_sojourn(kernel: SemiMarkovKernel, pi: np.ndarray) -> float:
    """mu = E_pi[S_1]."""
    return float(pi @ kernel.conditional_mean_sojourns())


def _cov_ingredients(kernel: SemiMarkovKernel, pi: np.ndarray, th: float):
    M1, _ = kernel.moment_matrices()
    r = pi * (kernel.states - th)
    M = kernel.P * M1
    g = (kernel.states - th) * kernel.conditional_mean_sojourns()
    return r, M, g


def autocovariance(kernel: SemiMarkovKernel, pi: np.ndarray, th: float, k: int) -> float:
    """E_pi[eta_1 eta_{1+k}] (variance of eta for k = 0)."""
    if k < 0:
        raise ValueError("lag must be >= 0")
    if k == 0:
        m2_v = kernel.conditional_second_sojourns()
        return float(pi @ ((kernel.states - th) ** 2 * m2_v))
    r, M, g = _cov_ingredients(kernel, pi, th)
    h = np.linalg.matrix_power(kernel.P, k - 1) @ g
    return float(r @ (M @ h))


def gamma2_series(
    kernel: SemiMarkovKernel, pi: np.ndarray, th: float, tol: float = 1e-10
) -> float:
    """gamma^2 = cov(0) + 2 sum_{k>=1} cov(k), truncated by the geometric tail.

    Requires an aperiodic chain (slem < 1); the sum stops at the first lag
    K >= m where |cov(K)| rho / (1 - rho) < tol with rho = slem.
    """
    rho = _slem(kernel.P)
    if rho >= 1.0:
        raise PeriodicChain("covariance series diverges for slem = 1")
    total = autocovariance(kernel, pi, th, 0)
    r, M, g = _cov_ingredients(kernel, pi, th)
    c = M.T @ r
    h = g
    # run at least m lags so rank-deficient transients (slem = 0 with a
    # nilpotent part) cannot trigger the tail bound prematurely
    m = kernel.n_states
    for k in range(1, _MAX_SERIES_TERMS):
        ck = float(c @ h)
        total += 2.0 * ck
        if k >= m and abs(ck) * rho / (1.0 - rho) < tol:
            return total
        h = kernel.P @ h
    raise RuntimeError("covariance series did not truncate")  # pragma: no cover


def _is_cyclic_permutation(P: np.ndarray) -> bool:
    return bool(((P == 0.0) | (P == 1.0)).all() and (P.sum(axis=1) == 1.0).all())


def _alternating_closed_form(kernel: SemiMarkovKernel) -> tuple[float, float, float]:
    """Exact (theta, mu, gamma2) when P is a deterministic cycle."""
    m = kernel.n_states
    succ = kernel.P.argmax(axis=1)
    mu_i = np.empty(m)
    var_i = np.empty(m)
    for i in range(m):
        law = kernel.laws[i][int(succ[i])]
        mu_i[i] = law.mean
        var_i[i] = law.variance
    v = kernel.states
    th = float((v * mu_i).sum() / mu_i.sum())
    mu = float(mu_i.mean())
    gamma2 = float((var_i * (v - th) ** 2).mean())
    return th, mu, gamma2


def limit_parameters(
    kernel: SemiMarkovKernel,
    *,
    tol: float = 1e-10,
    n_cycles: int = 200_000,
    seed: int = 0,
) -> LimitParameters:
    """theta, mu, gamma^2 and the diffusion coefficient for a kernel.

    Dispatch: aperiodic kernels use the covariance series; deterministic
    cyclic transition structures use the exact per-state closed form; other
    periodic kernels fall back to the regenerative cycle estimator (Monte
    Carlo with the fixed seed and cycle count given here, so the result is
    deterministic).
    """
    structure = validate_kernel(kernel)
    if not structure.irreducible:
        raise NotIrreducible("limit parameters need an irreducible chain")
    pi = structure.pi
    th = theta(kernel, pi)
    mu = mean_sojourn(kernel, pi)
    if structure.period == 1:
        g2 = gamma2_series(kernel, pi, th, tol)
        method = "series"
    elif _is_cyclic_permutation(kernel.P):
        th, mu, g2 = _alternating_closed_form(kernel)
        method = "alternating_closed_form"
    else:
        from .regen import estimate_gamma2_cycles

        g2, _ = estimate_gamma2_cycles(kernel, 0, n_cycles, th, seed)
        method = "cycle"
    if -1e-12 < g2 < 0.0:  # roundoff only; truly negative estimates must raise
        g2 = 0.0
    return LimitParameters(theta=th, mu=mu, gamma2=g2, diffusion=g2 / mu, method=method)


def occupancy_limit(kernel: SemiMarkovKernel, pi: np.ndarray) -> np.ndarray:
    """Limiting law of V(t): pi_v mu_v / sum_w pi_w mu_w."""
    mu_v = kernel.conditional_mean_sojourns()
    w = pi * mu_v
    return w / w.sum()
