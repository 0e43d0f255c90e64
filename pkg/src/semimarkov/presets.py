"""Canonical kernels used by the test suite, the scripts and the docs."""

from __future__ import annotations

import numpy as np

from .kernel import SemiMarkovKernel, SojournLaw
from .telegraph import TelegraphSpec, alternating_kernel

E = SojournLaw.exponential
G = SojournLaw.gamma
U = SojournLaw.uniform
D = SojournLaw.deterministic


def symmetric_telegraph(v0: float = 1.0, rate: float = 1.0) -> SemiMarkovKernel:
    """Velocities +-v0 with a common exponential switching rate."""
    return alternating_kernel([v0, -v0], [E(rate), E(rate)])


def asymmetric_telegraph() -> TelegraphSpec:
    """The worked asymmetric example: v = (2, -1), rates (1, 2)."""
    return TelegraphSpec(v1=2.0, v2=-1.0, lambda1=1.0, lambda2=2.0)


def deterministic_cycle(c: float = 1.0) -> SemiMarkovKernel:
    """Triangle-wave kernel: velocities +-1 held for exactly c."""
    return alternating_kernel([1.0, -1.0], [D(c), D(c)])


def equal_rows_pm1() -> SemiMarkovKernel:
    """Both rows (1/2, 1/2): i.i.d. signs, so all lag covariances vanish."""
    P = np.full((2, 2), 0.5)
    laws = ((E(1.0), E(1.0)), (E(1.0), E(1.0)))
    return SemiMarkovKernel(states=np.array([1.0, -1.0]), P=P, laws=laws)


def two_state_lazy() -> SemiMarkovKernel:
    """Aperiodic two-state chain with slem 0.25 and mixed sojourn families."""
    P = np.array([[0.5, 0.5], [0.25, 0.75]])
    laws = ((E(1.0), G(2.0, 2.0)), (U(0.0, 1.0), D(0.8)))
    return SemiMarkovKernel(states=np.array([1.5, -0.5]), P=P, laws=laws)


def three_state_aperiodic() -> SemiMarkovKernel:
    """Reversible lazy three-state chain exercising all four sojourn families.

    Real spectrum (1, 1/2, 1/4) keeps the lag covariances geometrically
    dominated by the lag-1 value, which the mixing-proxy bound relies on.
    """
    P = np.array(
        [
            [0.5, 0.25, 0.25],
            [0.25, 0.5, 0.25],
            [0.125, 0.125, 0.75],
        ]
    )
    laws = (
        (G(2.0, 4.0), E(1.5), U(0.2, 1.0)),
        (E(2.0), D(0.6), G(1.5, 2.0)),
        (U(0.1, 0.5), E(1.0), G(3.0, 5.0)),
    )
    return SemiMarkovKernel(states=np.array([-1.0, 0.5, 2.0]), P=P, laws=laws)


def bipartite_periodic() -> SemiMarkovKernel:
    """Period-2 chain that is not a deterministic cycle (forces the cycle estimator)."""
    P = np.array([[0.0, 0.5, 0.5], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    laws = (
        (None, E(1.0), U(0.5, 1.5)),
        (G(2.0, 2.0), None, None),
        (E(2.0), None, None),
    )
    return SemiMarkovKernel(states=np.array([1.0, -1.0, 2.0]), P=P, laws=laws)


# Aperiodic kernels against which the mixing-proxy bounds are asserted.
APERIODIC_TEST_KERNELS = {
    "equal_rows_pm1": equal_rows_pm1,
    "two_state_lazy": two_state_lazy,
    "three_state_aperiodic": three_state_aperiodic,
}
