"""Alternating renewal kernels and closed-form telegraph laws.

A two-state alternating kernel with exponential holding times is the
(generalized, possibly asymmetric) telegraph process: exact state law,
counting-process PMF and limiting drift/diffusion all have closed or
quadrature-exact forms, which the rest of the laboratory uses as ground
truth against Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureFailure
from .kernel import SemiMarkovKernel, SojournLaw

PMF_ABS_TOL = 1e-12


@dataclass(frozen=True)
class TelegraphSpec:
    """Two velocities with exponential switching rates; p = P{V(0) = v1}."""

    v1: float
    v2: float
    lambda1: float
    lambda2: float
    p: float = 1.0

    def __post_init__(self):
        if self.v1 == self.v2:
            raise ValueError("velocities must differ")
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise ValueError("rates must be > 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")

    def kernel(self) -> SemiMarkovKernel:
        return alternating_kernel(
            [self.v1, self.v2],
            [SojournLaw.exponential(self.lambda1), SojournLaw.exponential(self.lambda2)],
        )


def alternating_kernel(values, laws) -> SemiMarkovKernel:
    """Deterministic cycle v_1 -> v_2 -> ... -> v_m -> v_1, one law per state."""
    values = list(values)
    laws = list(laws)
    m = len(values)
    if len(laws) != m:
        raise ValueError("need exactly one sojourn law per state")
    P = np.zeros((m, m))
    table: list[list[SojournLaw | None]] = [[None] * m for _ in range(m)]
    for i in range(m):
        j = (i + 1) % m
        P[i, j] = 1.0
        table[i][j] = laws[i]
    return SemiMarkovKernel(states=np.asarray(values, dtype=float), P=P, laws=tuple(map(tuple, table)))


def alternating_limits(values, means, variances) -> tuple[float, float, float]:
    """Exact (theta, mu, gamma2) of an alternating renewal process."""
    v = np.asarray(values, dtype=float)
    mu_i = np.asarray(means, dtype=float)
    var_i = np.asarray(variances, dtype=float)
    if not (v.shape == mu_i.shape == var_i.shape):
        raise ValueError("values, means and variances must have equal length")
    th = float((v * mu_i).sum() / mu_i.sum())
    mu = float(mu_i.mean())
    gamma2 = float((var_i * (v - th) ** 2).mean())
    return th, mu, gamma2


def telegraph_state_law(spec: TelegraphSpec, t) -> float | np.ndarray:
    """P{V(t) = v1} for the two-state exponential kernel.

    Exponential mixture from the forward equation; tends to
    lambda2 / (lambda1 + lambda2) as t grows.
    """
    l1, l2 = spec.lambda1, spec.lambda2
    total = l1 + l2
    out = l2 / total + (spec.p * l1 - (1.0 - spec.p) * l2) / total * np.exp(-total * np.asarray(t, dtype=float))
    return float(out) if np.isscalar(t) else out


def telegraph_limit(spec: TelegraphSpec) -> tuple[float, float]:
    """(drift, diffusion coefficient) of the weak limit of the telegraph motion."""
    l1, l2 = spec.lambda1, spec.lambda2
    drift = (spec.v1 * l2 + spec.v2 * l1) / (l1 + l2)
    diffusion = 2.0 * l1 * l2 * (spec.v1 - spec.v2) ** 2 / (l1 + l2) ** 3
    return drift, diffusion


def _poisson_pmf(rate_t: float, n: int) -> float:
    return math.exp(n * math.log(rate_t) - rate_t - math.lgamma(n + 1))


def alternating_poisson_pmf(lambda1: float, lambda2: float, t: float, n: int) -> float:
    """P{N(t) = n} for the alternating Poisson process started in state 1.

    n = 0 is the elementary no-arrival probability; equal rates reduce
    exactly to the Poisson PMF (bypassing the removable x = 0 limit).  For
    n >= 1 the probability is a beta-weighted exponential integral evaluated
    by adaptive quadrature; the sign convention of its argument,
    x = t (lambda2 - lambda1), is the one validated against the direct
    convolution for n = 1.  The quadrature tolerance applies to the returned
    probability (absolute, 1e-12).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if t <= 0 or lambda1 <= 0 or lambda2 <= 0:
        raise ValueError("t and rates must be > 0")
    if n == 0:
        return math.exp(-lambda1 * t)
    if lambda1 == lambda2:
        return _poisson_pmf(lambda1 * t, n)

    k, odd = divmod(n, 2)
    if odd:
        alpha, beta = k + 1, k + 1
        log_coef = (k + 1) * math.log(lambda1 * t) + k * math.log(lambda2 * t)
    else:
        alpha, beta = k, k + 1
        log_coef = k * math.log(lambda1 * t) + k * math.log(lambda2 * t)
    log_pre = log_coef - lambda1 * t - math.lgamma(alpha) - math.lgamma(beta)
    x = t * (lambda2 - lambda1)

    a1 = alpha - 1
    b1 = beta - 1

    def integrand(u: float) -> float:
        if u <= 0.0:
            return math.exp(log_pre) if a1 == 0 else 0.0
        if u >= 1.0:
            return math.exp(log_pre - x) if b1 == 0 else 0.0
        return math.exp(log_pre + a1 * math.log(u) + b1 * math.log1p(-u) - x * u)

    value, abserr = quad(integrand, 0.0, 1.0, epsabs=PMF_ABS_TOL, epsrel=0.0, limit=200)
    if abserr > PMF_ABS_TOL:
        raise QuadratureFailure(
            f"pmf quadrature error {abserr:.2e} above {PMF_ABS_TOL:.0e} for n={n}, t={t}"
        )
    return float(value)
