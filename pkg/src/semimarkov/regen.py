"""Regenerative cycle decomposition and cycle-based estimators.

Passage times to a reference state v0 cut the step sequence
{(V_{k-1}, xi_k)}_{k>=1} into i.i.d. cycles.  Harvesting starts the chain at
v0, so the delay segment is empty and every harvested cycle is a canonical
copy; the cycle second moment then gives the limit variance, and cycle sums
of any catalog observable give the Wald-identity check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotIrreducible
from .kernel import SemiMarkovKernel, validate_kernel
from .simulate import SEED_DEFAULT, Trajectory, as_rng, sample_markov_renewal

# Closed catalog of observables f(v, x); `centered` is f = (v - theta) x.
F_CATALOG = ("one", "x", "vx", "centered")


def evaluate_observable(tag: str, v: np.ndarray, x: np.ndarray, theta: float = 0.0) -> np.ndarray:
    if tag == "one":
        return np.ones_like(x)
    if tag == "x":
        return np.asarray(x, dtype=float)
    if tag == "vx":
        return v * x
    if tag == "centered":
        return (v - theta) * x
    raise ValueError(f"unknown observable tag {tag!r}; catalog: {F_CATALOG}")


def stationary_observable_mean(
    tag: str, kernel: SemiMarkovKernel, pi: np.ndarray, theta: float = 0.0
) -> float:
    """E_pi[f(V_0, xi_1)] in closed form for a catalog observable."""
    mu_v = kernel.conditional_mean_sojourns()
    if tag == "one":
        return 1.0
    if tag == "x":
        return float(pi @ mu_v)
    if tag == "vx":
        return float(pi @ (kernel.states * mu_v))
    if tag == "centered":
        return float(pi @ ((kernel.states - theta) * mu_v))
    raise ValueError(f"unknown observable tag {tag!r}; catalog: {F_CATALOG}")


@dataclass(frozen=True)
class CycleSet:
    """Trajectory split at passage times to a reference state.

    anchors holds the chain indices at which the chain sits in v0 and a cycle
    boundary occurs: every k >= 1 with V_k = v0, preceded by 0 when V_0 = v0.
    Cycle m consists of steps anchors[m]+1 .. anchors[m+1]; the head is all
    steps up to the first anchor (the delay), the tail all steps after the
    last one.  Step k maps to index k-1 of the sojourn array.
    """

    trajectory: Trajectory
    reference_state: int
    anchors: np.ndarray

    @property
    def n_cycles(self) -> int:
        return max(self.anchors.size - 1, 0)

    def cycle_lengths(self) -> np.ndarray:
        return np.diff(self.anchors)

    def cycle_slice(self, i: int) -> slice:
        """Index range into the step arrays (sojourns / previous states)."""
        return slice(int(self.anchors[i]), int(self.anchors[i + 1]))

    @property
    def head_slice(self) -> slice:
        first = int(self.anchors[0]) if self.anchors.size else self.trajectory.n_steps
        return slice(0, first)

    @property
    def tail_slice(self) -> slice:
        n = self.trajectory.n_steps
        last = int(self.anchors[-1]) if self.anchors.size else n
        return slice(last, n)

    def cycle_steps(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """(previous-state indices, sojourns) of cycle i."""
        sl = self.cycle_slice(i)
        return self.trajectory.states[:-1][sl], self.trajectory.sojourns[sl]

    def cycle_sums(self, tag: str, theta: float = 0.0, n_cycles: int | None = None) -> np.ndarray:
        """Per-cycle sums of a catalog observable, for the first n_cycles cycles."""
        n = self.n_cycles if n_cycles is None else n_cycles
        if n > self.n_cycles:
            raise ValueError(f"requested {n} cycles, only {self.n_cycles} available")
        if n == 0:
            return np.empty(0)
        traj = self.trajectory
        term = evaluate_observable(tag, traj.state_values[traj.states[:-1]], traj.sojourns, theta)
        sums = np.add.reduceat(term, self.anchors[: n + 1])
        return sums[:n]


def cycle_summary_rows(cs: CycleSet, theta: float = 0.0, n_cycles: int | None = None):
    """Rows (cycle_index, length, cycle_sum, cycle_sum_sq) of centered sums."""
    n = cs.n_cycles if n_cycles is None else n_cycles
    lengths = cs.cycle_lengths()[:n]
    sums = cs.cycle_sums("centered", theta, n)
    return [
        (i, int(lengths[i]), float(sums[i]), float(sums[i] ** 2)) for i in range(n)
    ]


def split_cycles(traj: Trajectory, v0: int) -> CycleSet:
    """Cut a trajectory at successive passage times to state index v0.

    Zero complete cycles (anchors.size <= 1) is a valid outcome; callers must
    check n_cycles.
    """
    passages = np.nonzero(traj.states[1:] == v0)[0] + 1
    if traj.states[0] == v0:
        anchors = np.concatenate([[0], passages])
    else:
        anchors = passages
    return CycleSet(trajectory=traj, reference_state=int(v0), anchors=anchors.astype(np.int64))


def _extend(traj: Trajectory, more: Trajectory) -> Trajectory:
    states = np.concatenate([traj.states, more.states[1:]])
    sojourns = np.concatenate([traj.sojourns, more.sojourns])
    arrivals = np.concatenate([[0.0], np.cumsum(sojourns)])
    return Trajectory(traj.state_values, states, sojourns, arrivals)


def harvest_cycles(
    kernel: SemiMarkovKernel, v0: int, n_cycles: int, seed=SEED_DEFAULT
) -> tuple[CycleSet, np.ndarray]:
    """One long trajectory started at v0, split into >= n_cycles cycles.

    Returns the cycle set and the invariant distribution of the validated
    kernel.  Raises NotIrreducible when the embedded chain is not.
    """
    structure = validate_kernel(kernel)
    if not structure.irreducible:
        raise NotIrreducible("cycle harvesting needs an irreducible chain")
    rng = as_rng(seed)
    expected = 1.0 / structure.pi[v0]
    traj = sample_markov_renewal(
        kernel, v0, n_steps=int(n_cycles * expected * 1.1) + 32, seed=rng
    )
    cs = split_cycles(traj, v0)
    while cs.n_cycles < n_cycles:
        shortfall = n_cycles - cs.n_cycles
        more = sample_markov_renewal(
            kernel,
            int(traj.states[-1]),
            n_steps=int(shortfall * expected * 1.2) + 32,
            seed=rng,
        )
        traj = _extend(traj, more)
        cs = split_cycles(traj, v0)
    return cs, structure.pi


def estimate_gamma2_cycles(
    kernel: SemiMarkovKernel,
    v0: int,
    n_cycles: int,
    theta: float,
    seed=SEED_DEFAULT,
) -> tuple[float, float]:
    """Limit variance from the regenerative cycle second moment.

    gamma^2 = pi_{v0} E[(sum over one cycle of (V_{k-1} - theta) xi_k)^2];
    returns the estimate and its Monte Carlo standard error.
    """
    cs, pi = harvest_cycles(kernel, v0, n_cycles, seed)
    C = cs.cycle_sums("centered", theta, n_cycles) ** 2
    pv = float(pi[v0])
    return pv * float(C.mean()), pv * float(C.std(ddof=1)) / np.sqrt(n_cycles)


def wald_check(
    kernel: SemiMarkovKernel,
    f: str,
    v0: int,
    n_cycles: int,
    seed=SEED_DEFAULT,
) -> tuple[float, float, float]:
    """Monte Carlo lhs vs analytical rhs of the cycle-sum identity.

    lhs is the mean over cycles of sum f(V_{k-1}, xi_k); rhs is
    E[tau_1 | V_0 = v0] * E_pi[f] with E[tau_1 | v0] = 1 / pi_{v0} taken
    analytically (Kac).  Returns (lhs, rhs, std_error of lhs).
    """
    if f not in F_CATALOG:
        raise ValueError(f"unknown observable tag {f!r}; catalog: {F_CATALOG}")
    theta = 0.0
    if f == "centered":
        from .limits import theta as theta_fn

        structure = validate_kernel(kernel)
        if not structure.irreducible:
            raise NotIrreducible("Wald check needs an irreducible chain")
        theta = theta_fn(kernel, structure.pi)
    cs, pi = harvest_cycles(kernel, v0, n_cycles, seed)
    sums = cs.cycle_sums(f, theta, n_cycles)
    rhs = stationary_observable_mean(f, kernel, pi, theta) / float(pi[v0])
    return float(sums.mean()), rhs, float(sums.std(ddof=1)) / np.sqrt(n_cycles)
