"""Lockstep Monte Carlo engine: many replications advanced one event at a time.

The statistical suites need only a few path functionals (N, V, X at fixed
stop times) per replication, so instead of materializing trajectories this
engine evolves all replications of a chunk in vectorized lockstep and records
the functionals as each stop time is crossed.

Replications are partitioned into fixed-size chunks; chunk i always uses the
stream child(seed, i) regardless of how chunks are assigned to workers, so
results are bitwise independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .kernel import SemiMarkovKernel
from .simulate import child_rng

CHUNK_SIZE = 16384


@dataclass(frozen=True)
class PathStatistics:
    """Per-replication functionals recorded at the stop times.

    counts[r, j] = N(stops[j]); state_idx[r, j] = chain index of V(stops[j]);
    integral[r, j] = X(stops[j]).
    """

    stops: np.ndarray
    counts: np.ndarray
    state_idx: np.ndarray
    integral: np.ndarray


def _evolve_chunk(
    kernel: SemiMarkovKernel, n: int, stops: np.ndarray, initial, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = kernel.n_states
    values = kernel.states
    cumP = np.cumsum(kernel.P, axis=1)
    k = stops.size

    if np.isscalar(initial) or isinstance(initial, (int, np.integer)):
        state = np.full(n, int(initial), dtype=np.int64)
    else:
        state = rng.choice(m, size=n, p=np.asarray(initial, dtype=float))

    S = np.zeros(n)
    X = np.zeros(n)
    n_events = np.zeros(n, dtype=np.int64)
    next_stop = np.zeros(n, dtype=np.int64)
    counts = np.zeros((n, k), dtype=np.int64)
    state_at = np.zeros((n, k), dtype=np.int64)
    X_at = np.zeros((n, k))

    active = np.arange(n)
    while active.size:
        cur = state[active]
        u = rng.random(active.size)
        nxt = (u[:, None] >= cumP[cur]).sum(axis=1)
        np.clip(nxt, 0, m - 1, out=nxt)

        xi = np.empty(active.size)
        pair = cur * m + nxt
        for v in range(m):
            for w in range(m):
                law = kernel.laws[v][w]
                if law is None:
                    continue
                idx = np.nonzero(pair == v * m + w)[0]
                if idx.size:
                    xi[idx] = law.sample(rng, idx.size)

        S_new = S[active] + xi
        # record every stop inside the current sojourn [S, S_new)
        while True:
            pending = next_stop[active] < k
            rec = pending.copy()
            rec[pending] = stops[next_stop[active[pending]]] < S_new[pending]
            if not rec.any():
                break
            ridx = active[rec]
            j = next_stop[ridx]
            tau = stops[j]
            counts[ridx, j] = n_events[ridx]
            state_at[ridx, j] = state[ridx]
            X_at[ridx, j] = X[ridx] + values[state[ridx]] * (tau - S[ridx])
            next_stop[ridx] += 1

        X[active] += values[cur] * xi
        S[active] = S_new
        state[active] = nxt
        n_events[active] += 1
        active = active[next_stop[active] < k]

    return counts, state_at, X_at


def _chunk_task(args) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    kernel, count, stops, initial, seed, chunk_index = args
    return _evolve_chunk(kernel, count, stops, initial, child_rng(seed, chunk_index))


def map_ordered(fn, tasks, workers: int):
    """Apply fn over tasks, optionally in a process pool, preserving order."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def sample_path_statistics(
    kernel: SemiMarkovKernel,
    n_reps: int,
    stops,
    initial,
    seed: int,
    *,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> PathStatistics:
    """Record N, V, X at the given stop times over n_reps replications."""
    stops = np.asarray(stops, dtype=float)
    if stops.size == 0 or (np.diff(stops) <= 0).any() or stops[0] < 0:
        raise ValueError("stops must be strictly increasing and non-negative")
    tasks = []
    lo = 0
    chunk_index = 0
    while lo < n_reps:
        count = min(chunk_size, n_reps - lo)
        tasks.append((kernel, count, stops, initial, seed, chunk_index))
        lo += count
        chunk_index += 1
    parts = map_ordered(_chunk_task, tasks, workers)
    counts = np.concatenate([p[0] for p in parts], axis=0)
    state_at = np.concatenate([p[1] for p in parts], axis=0)
    X_at = np.concatenate([p[2] for p in parts], axis=0)
    return PathStatistics(stops=stops, counts=counts, state_idx=state_at, integral=X_at)
