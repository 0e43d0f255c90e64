"""Exact sampling of Markov renewal trajectories and derived path processes.

Sampling order follows the kernel factorization Q_vw = p_vw F_vw: the next
state is drawn from the current row of P, then the sojourn from the law
attached to the realized (current, next) pair.  All randomness flows through
numpy Generators; replication streams are derived with SeedSequence spawn
keys so results never depend on worker count or scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HorizonExceeded
from .kernel import SemiMarkovKernel

SEED_DEFAULT = 42


def child_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream number `index` under the master seed."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Trajectory:
    """One realized Markov renewal path.

    states holds the embedded chain V_0..V_n as indices into state_values;
    sojourns holds xi_1..xi_n and arrivals the prefix sums S_0=0..S_n.  The
    horizon (time up to which N, V, X, R are defined) is the last arrival.
    """

    state_values: np.ndarray
    states: np.ndarray
    sojourns: np.ndarray
    arrivals: np.ndarray

    def __post_init__(self):
        for name in ("state_values", "states", "sojourns", "arrivals"):
            arr = np.asarray(getattr(self, name))
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.arrivals.size != self.states.size or self.sojourns.size != self.states.size - 1:
            raise ValueError("inconsistent trajectory lengths")

    @property
    def n_steps(self) -> int:
        return self.sojourns.size

    @property
    def initial_state(self) -> int:
        return int(self.states[0])

    @property
    def horizon(self) -> float:
        return float(self.arrivals[-1])

    def values(self) -> np.ndarray:
        """Velocity value at each chain index."""
        return self.state_values[self.states]

    def check(self, kernel: SemiMarkovKernel | None = None) -> None:
        """Assert structural invariants (used by tests, not on the hot path)."""
        if not (np.diff(self.arrivals) > 0).all():
            raise AssertionError("arrivals not strictly increasing")
        np.testing.assert_allclose(
            self.arrivals[1:], self.arrivals[0] + np.cumsum(self.sojourns), rtol=1e-9
        )
        if kernel is not None:
            p = kernel.P[self.states[:-1], self.states[1:]]
            if self.n_steps and not (p > 0).all():
                raise AssertionError("trajectory uses a zero-probability transition")


def _cum_rows(P: np.ndarray) -> np.ndarray:
    return np.cumsum(P, axis=1)


def _sample_chain(cumP: np.ndarray, start: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Embedded chain path of n transitions starting from `start`.

    Draws a candidate next state for every (step, current state) pair fully
    vectorized, then threads the realized path through the candidate table.
    """
    m = cumP.shape[0]
    if n == 0:
        return np.array([start], dtype=np.int64)
    u = rng.random((n, m))
    cand = np.empty((n, m), dtype=np.int64)
    for v in range(m):
        cand[:, v] = np.searchsorted(cumP[v], u[:, v], side="right")
    np.clip(cand, 0, m - 1, out=cand)
    path = [start]
    append = path.append
    s = start
    for row in cand.tolist():
        s = row[s]
        append(s)
    return np.asarray(path, dtype=np.int64)


def _sample_sojourns(
    kernel: SemiMarkovKernel, path: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Sojourns conditional on consecutive state pairs, drawn pair-group-wise."""
    m = kernel.n_states
    n = path.size - 1
    xi = np.empty(n)
    if n == 0:
        return xi
    pair = path[:-1] * m + path[1:]
    for v in range(m):
        for w in range(m):
            law = kernel.laws[v][w]
            if law is None:
                continue
            idx = np.nonzero(pair == v * m + w)[0]
            if idx.size:
                xi[idx] = law.sample(rng, idx.size)
    return xi


def _resolve_initial(kernel, initial, rng) -> int:
    if np.isscalar(initial) or isinstance(initial, (int, np.integer)):
        i = int(initial)
        if not 0 <= i < kernel.n_states:
            raise ValueError(f"initial state index {i} out of range")
        return i
    dist = np.asarray(initial, dtype=float)
    if dist.shape != (kernel.n_states,) or abs(dist.sum() - 1.0) > 1e-9 or (dist < 0).any():
        raise ValueError("initial distribution must be a probability vector over states")
    return int(rng.choice(kernel.n_states, p=dist))


def sample_markov_renewal(
    kernel: SemiMarkovKernel,
    initial,
    *,
    n_steps: int | None = None,
    until_time: float | None = None,
    seed=SEED_DEFAULT,
) -> Trajectory:
    """Sample a trajectory for exactly n_steps transitions or past a horizon.

    In until_time mode, generation continues until the first arrival strictly
    beyond T, so N(t), V(t), X(t) and R(t) are defined on the whole of [0, T]
    (the over-generated arrival supplies the next sojourn needed by R).
    Fully deterministic given (kernel, initial, mode, seed).
    """
    if (n_steps is None) == (until_time is None):
        raise ValueError("specify exactly one of n_steps or until_time")
    rng = as_rng(seed)
    start = _resolve_initial(kernel, initial, rng)
    cumP = _cum_rows(kernel.P)

    if n_steps is not None:
        if n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        path = _sample_chain(cumP, start, n_steps, rng)
        xi = _sample_sojourns(kernel, path, rng)
        arrivals = np.concatenate([[0.0], np.cumsum(xi)])
        return Trajectory(kernel.states, path, xi, arrivals)

    T = float(until_time)
    if T <= 0:
        raise ValueError("until_time must be > 0")
    mu_min = kernel.conditional_mean_sojourns().min()
    path_parts = [np.array([start], dtype=np.int64)]
    xi_parts: list[np.ndarray] = []
    total = 0.0
    cur = start
    while total <= T:
        block = int((T - total) / mu_min * 1.1) + 16
        chunk = _sample_chain(cumP, cur, block, rng)
        xi = _sample_sojourns(kernel, chunk, rng)
        path_parts.append(chunk[1:])
        xi_parts.append(xi)
        total += float(xi.sum())
        cur = int(chunk[-1])
    path = np.concatenate(path_parts)
    xi = np.concatenate(xi_parts)
    arrivals = np.concatenate([[0.0], np.cumsum(xi)])
    n_keep = int(np.searchsorted(arrivals, T, side="right"))  # first arrival > T
    return Trajectory(kernel.states, path[: n_keep + 1], xi[:n_keep], arrivals[: n_keep + 1])


def _check_time(traj: Trajectory, t: float) -> float:
    t = float(t)
    if t < 0:
        raise ValueError("t must be >= 0")
    if t > traj.horizon:
        raise HorizonExceeded(f"t={t} beyond generated horizon {traj.horizon}")
    return t


def counting(traj: Trajectory, t: float) -> int:
    """N(t): index of the last arrival at or before t."""
    t = _check_time(traj, t)
    return int(np.searchsorted(traj.arrivals, t, side="right")) - 1


def semi_markov_value(traj: Trajectory, t: float) -> float:
    """V(t) = value of the chain at index N(t); right-continuous at arrivals."""
    return float(traj.state_values[traj.states[counting(traj, t)]])


def residual_life(traj: Trajectory, t: float) -> float:
    """R(t) = t - S_{N(t)}, the time elapsed since the last arrival."""
    t = _check_time(traj, t)
    return t - float(traj.arrivals[counting(traj, t)])


def _integral_at_arrivals(traj: Trajectory) -> np.ndarray:
    """X(S_k) for all k: prefix sums of the displacement increments."""
    v = traj.state_values[traj.states[:-1]]
    return np.concatenate([[0.0], np.cumsum(v * traj.sojourns)])


def integral_path(traj: Trajectory, grid) -> np.ndarray:
    """X(t) on an increasing grid, exact for the piecewise-linear path."""
    grid = np.asarray(grid, dtype=float)
    if grid.size and (np.diff(grid) < 0).any():
        raise ValueError("grid must be non-decreasing")
    if grid.size:
        _check_time(traj, grid[-1])
        if grid[0] < 0:
            raise ValueError("grid times must be >= 0")
    X_arr = _integral_at_arrivals(traj)
    idx = np.searchsorted(traj.arrivals, grid, side="right") - 1
    vals = traj.state_values[traj.states[idx]]
    return X_arr[idx] + vals * (grid - traj.arrivals[idx])


def scaled_integral_path(
    kernel: SemiMarkovKernel,
    lam: float,
    theta: float,
    grid,
    seed=SEED_DEFAULT,
    initial=0,
) -> np.ndarray:
    """X_lambda(t) = (X(lambda t) - theta lambda t) / sqrt(lambda) on the grid.

    A fresh trajectory is generated with horizon lambda * max(grid).
    """
    if lam <= 0:
        raise ValueError("lambda must be > 0")
    grid = np.asarray(grid, dtype=float)
    t_max = float(grid.max()) if grid.size else 0.0
    if t_max <= 0:
        return np.zeros(grid.shape)
    traj = sample_markov_renewal(kernel, initial, until_time=lam * t_max, seed=seed)
    X = integral_path(traj, lam * grid)
    return (X - theta * lam * grid) / np.sqrt(lam)
