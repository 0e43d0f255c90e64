"""Semi-Markov kernel data model and embedded-chain structure.

A kernel is the pair (P, F): a row-stochastic transition matrix over a
finite set of real velocity labels, together with a conditional sojourn
law F_vw for every transition with p_vw > 0.  The joint transition law
factorizes as Q_vw(t) = p_vw * F_vw(t), so sampling never needs density
evaluation: draw the next state from the row of P, then the sojourn from
the law attached to the realized (current, next) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InvalidStochasticMatrix, MissingSojournLaw, NotIrreducible, PeriodicChain

ROW_SUM_TOL = 1e-9

_FAMILIES = ("exponential", "gamma", "uniform", "deterministic")


@dataclass(frozen=True)
class SojournLaw:
    """Closed-form holding-time distribution on (0, inf).

    Restricted to four families with exact first and second raw moments,
    which keeps every downstream limit parameter analytical.
    """

    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown sojourn family {self.family!r}")
        p = tuple(float(x) for x in self.params)
        object.__setattr__(self, "params", p)
        if self.family == "exponential":
            (rate,) = p
            if rate <= 0:
                raise ValueError("exponential rate must be > 0")
        elif self.family == "gamma":
            shape, rate = p
            if shape <= 0 or rate <= 0:
                raise ValueError("gamma shape and rate must be > 0")
        elif self.family == "uniform":
            a, b = p
            if a < 0 or b <= a:
                raise ValueError("uniform requires 0 <= a < b")
        else:  # deterministic
            (c,) = p
            if c <= 0:
                raise ValueError("deterministic value must be > 0")

    @classmethod
    def exponential(cls, rate: float) -> "SojournLaw":
        return cls("exponential", (rate,))

    @classmethod
    def gamma(cls, shape: float, rate: float) -> "SojournLaw":
        return cls("gamma", (shape, rate))

    @classmethod
    def uniform(cls, a: float, b: float) -> "SojournLaw":
        return cls("uniform", (a, b))

    @classmethod
    def deterministic(cls, c: float) -> "SojournLaw":
        return cls("deterministic", (c,))

    def moments(self) -> tuple[float, float]:
        """Exact first and second raw moments (m1, m2)."""
        if self.family == "exponential":
            (rate,) = self.params
            return 1.0 / rate, 2.0 / rate**2
        if self.family == "gamma":
            shape, rate = self.params
            return shape / rate, shape * (shape + 1.0) / rate**2
        if self.family == "uniform":
            a, b = self.params
            return (a + b) / 2.0, (a * a + a * b + b * b) / 3.0
        (c,) = self.params
        return c, c * c

    @property
    def mean(self) -> float:
        return self.moments()[0]

    @property
    def variance(self) -> float:
        m1, m2 = self.moments()
        return m2 - m1 * m1

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.family == "exponential":
            return rng.exponential(1.0 / self.params[0], size)
        if self.family == "gamma":
            shape, rate = self.params
            return rng.gamma(shape, 1.0 / rate, size)
        if self.family == "uniform":
            a, b = self.params
            return rng.uniform(a, b, size)
        return np.full(size, self.params[0])


def sojourn_moments(law: SojournLaw) -> tuple[float, float]:
    """First and second raw moments of a sojourn law, in closed form."""
    return law.moments()


@dataclass(frozen=True, eq=False)
class SemiMarkovKernel:
    """Finite velocity set with transition matrix and conditional sojourn laws.

    laws[v][w] must be present exactly where P[v, w] > 0; entries where
    P[v, w] == 0 are None.  Immutable after construction.
    """

    states: np.ndarray
    P: np.ndarray
    laws: tuple[tuple[SojournLaw | None, ...], ...]

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        P = np.asarray(self.P, dtype=float)
        if states.ndim != 1 or states.size < 2:
            raise ValueError("need at least two states")
        m = states.size
        if P.shape != (m, m):
            raise ValueError(f"P must be {m}x{m}, got {P.shape}")
        if len(set(states.tolist())) != m:
            raise ValueError("state labels must be pairwise distinct")
        laws = tuple(tuple(row) for row in self.laws)
        if len(laws) != m or any(len(row) != m for row in laws):
            raise ValueError("laws table must match P in shape")
        states = states.copy()
        P = P.copy()
        states.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "laws", laws)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SemiMarkovKernel):
            return NotImplemented
        return (
            np.array_equal(self.states, other.states)
            and np.array_equal(self.P, other.P)
            and self.laws == other.laws
        )

    @property
    def n_states(self) -> int:
        return self.states.size

    def state_index(self, value: float) -> int:
        idx = np.nonzero(self.states == value)[0]
        if idx.size == 0:
            raise ValueError(f"no state with value {value}")
        return int(idx[0])

    def moment_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """(M1, M2): conditional sojourn moments m_vw, m2_vw (0 where p_vw = 0)."""
        m = self.n_states
        M1 = np.zeros((m, m))
        M2 = np.zeros((m, m))
        for v in range(m):
            for w in range(m):
                law = self.laws[v][w]
                if law is not None:
                    M1[v, w], M2[v, w] = law.moments()
        return M1, M2

    def conditional_mean_sojourns(self) -> np.ndarray:
        """mu_v = E[xi_1 | V_0 = v] = sum_w p_vw m_vw."""
        M1, _ = self.moment_matrices()
        return (self.P * M1).sum(axis=1)

    def conditional_second_sojourns(self) -> np.ndarray:
        """m2_v = E[xi_1^2 | V_0 = v]."""
        _, M2 = self.moment_matrices()
        return (self.P * M2).sum(axis=1)


@dataclass(frozen=True)
class ChainStructure:
    """Spectral/stationary summary of the embedded chain."""

    irreducible: bool
    period: int
    pi: np.ndarray = field(repr=False)
    slem: float

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float).copy()
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)


def _support_graph(P: np.ndarray) -> csr_matrix:
    return csr_matrix((P > 0.0).astype(np.int8))


def _is_irreducible(P: np.ndarray) -> bool:
    n_comp, _ = connected_components(_support_graph(P), directed=True, connection="strong")
    return n_comp == 1


def _period(P: np.ndarray) -> int:
    """Period of the class of state 0: gcd of level mismatches on a BFS tree.

    For an edge u -> w with BFS levels l(u), l(w), every closed walk through
    state 0 picks up cycle length contributions l(u) + 1 - l(w); the gcd of
    those over all support edges reachable from 0 is the period.
    """
    m = P.shape[0]
    level = np.full(m, -1, dtype=int)
    level[0] = 0
    frontier = [0]
    order = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for w in np.nonzero(P[u] > 0.0)[0]:
                if level[w] < 0:
                    level[w] = level[u] + 1
                    nxt.append(int(w))
                    order.append(int(w))
        frontier = nxt
    g = 0
    for u in order:
        for w in np.nonzero(P[u] > 0.0)[0]:
            if level[w] >= 0:
                g = math.gcd(g, level[u] + 1 - int(level[w]))
    return g if g > 0 else 1


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Invariant probability vector pi with pi P = pi, sum(pi) = 1.

    Solved directly from the (m+1)-equation overdetermined system (exact for
    small finite chains, no power iteration).  Raises NotIrreducible when the
    support digraph is not strongly connected.
    """
    P = np.asarray(P, dtype=float)
    if not _is_irreducible(P):
        raise NotIrreducible("support digraph of P is not strongly connected")
    m = P.shape[0]
    A = np.vstack([P.T - np.eye(m), np.ones((1, m))])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    return pi


def _slem(P: np.ndarray) -> float:
    """Second-largest eigenvalue modulus, counted with multiplicity."""
    ev = np.sort(np.abs(np.linalg.eigvals(P)))[::-1]
    return float(min(ev[1], 1.0)) if ev.size > 1 else 0.0


def validate_kernel(kernel: SemiMarkovKernel) -> ChainStructure:
    """Validate stochasticity and law coverage; return the chain structure.

    Non-irreducibility is reported in the structure, not raised; row-sum or
    sign violations raise InvalidStochasticMatrix, and a missing law where
    p_vw > 0 raises MissingSojournLaw.
    """
    P = kernel.P
    m = kernel.n_states
    if (P < 0.0).any():
        raise InvalidStochasticMatrix("negative transition probability")
    row_sums = P.sum(axis=1)
    bad = np.nonzero(np.abs(row_sums - 1.0) > ROW_SUM_TOL)[0]
    if bad.size:
        raise InvalidStochasticMatrix(
            f"row {bad[0]} sums to {row_sums[bad[0]]!r}, expected 1"
        )
    for v in range(m):
        for w in range(m):
            if P[v, w] > 0.0 and kernel.laws[v][w] is None:
                raise MissingSojournLaw(f"p[{v},{w}] > 0 but no sojourn law given")
    irreducible = _is_irreducible(P)
    period = _period(P)
    if irreducible:
        pi = stationary_distribution(P)
    else:
        pi = np.full(m, np.nan)
    return ChainStructure(irreducible=irreducible, period=period, pi=pi, slem=_slem(P))


def tv_distance_profile(P: np.ndarray, pi: np.ndarray, n_max: int) -> np.ndarray:
    """d(n) for n = 0..n_max, d(n) = max_w (1/2) sum_v |[P^n]_wv - pi_v|."""
    P = np.asarray(P, dtype=float)
    pi = np.asarray(pi, dtype=float)
    out = np.empty(n_max + 1)
    Pn = np.eye(P.shape[0])
    for n in range(n_max + 1):
        out[n] = 0.5 * np.abs(Pn - pi[None, :]).sum(axis=1).max()
        if n < n_max:
            Pn = Pn @ P
    return out


def tv_to_stationary(P: np.ndarray, pi: np.ndarray, n: int) -> float:
    """Worst-case total-variation distance of the n-step law from pi.

    Requires an irreducible aperiodic chain; periodic chains do not mix and
    raise PeriodicChain.
    """
    P = np.asarray(P, dtype=float)
    if not _is_irreducible(P):
        raise NotIrreducible("support digraph of P is not strongly connected")
    if _period(P) != 1:
        raise PeriodicChain("tv_to_stationary requires an aperiodic chain")
    if n < 0:
        raise ValueError("n must be >= 0")
    return float(tv_distance_profile(P, pi, n)[n])


def tv_decay_rate(P: np.ndarray, pi: np.ndarray, n_max: int = 30, floor: float = 1e-13) -> float:
    """Empirical geometric decay rate of d(n), n = 1..n_max.

    Log-linear least-squares fit of log d(n) on n; points at or below the
    floating-point noise floor are excluded.  Returns 0.0 when the chain is
    exactly stationary after one step (no decay to fit).
    """
    d = tv_distance_profile(P, pi, n_max)
    ns = np.arange(1, n_max + 1)
    mask = d[1:] > floor
    if mask.sum() < 2:
        return 0.0
    slope = np.polyfit(ns[mask], np.log(d[1:][mask]), 1)[0]
    return float(np.exp(slope))
