"""Full-dimension statevector simulation of ranked Grover search.

The diffusion operator is never built as a matrix; it is applied as the
rank-one update ``2<psi0|v>|psi0> - v`` in O(n), which keeps runs at
n = 2**16 cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidCounts, NoLocalMax, OutOfRange, UsageError

PROB_TOL = 1e-10


def grover_angle(n: int, m: int) -> float:
    """Rotation angle ``2*arcsin(sqrt(m/n))`` of one Grover iteration."""
    if n < 1 or m < 1 or m > n:
        raise InvalidCounts(f"need 1 <= m <= n, got n={n}, m={m}")
    # m/n is a single correctly rounded division; no intermediate rounding
    return 2.0 * math.asin(math.sqrt(m / n))


def grover_optimal_steps(n: int, m: int) -> int:
    return math.floor(math.pi / (2.0 * grover_angle(n, m)))


def grover_success(n: int, m: int, t) -> np.ndarray | float:
    """Total marked probability of the unmodified algorithm after ``t`` steps."""
    theta = grover_angle(n, m)
    return np.sin((2 * np.asarray(t) + 1) * theta / 2.0) ** 2


@dataclass(frozen=True)
class PriorityOracle:
    """Marked items of a size-``n`` database with priorities in [-1, 0].

    A marked item ``x`` picks up the phase ``-exp(i*pi*eps_x)``; unmarked
    items are left alone.  ``eps = 0`` is the ordinary Grover sign flip
    and ``eps = -1`` leaves the item untouched.
    """

    n: int
    marked: Mapping[int, float]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidCounts(f"database size must be positive, got {self.n}")
        if not 1 <= len(self.marked) <= self.n:
            raise InvalidCounts(f"need 1 <= |marked| <= n, got {len(self.marked)}")
        for x, eps in self.marked.items():
            if not 0 <= x < self.n:
                raise OutOfRange(f"marked index {x} outside [0, {self.n})")
            if not -1.0 <= eps <= 0.0:
                raise OutOfRange(f"priority {eps} for item {x} outside [-1, 0]")
        object.__setattr__(self, "marked", dict(sorted(self.marked.items())))

    @classmethod
    def two_class(cls, n: int, m: int, eps_tilde: float) -> "PriorityOracle":
        """Items ``0..m/2-1`` at priority 0 and ``m/2..m-1`` at ``eps_tilde``."""
        if m % 2:
            raise UsageError(f"two equal classes need even m, got {m}")
        half = m // 2
        marked = {x: 0.0 for x in range(half)}
        marked.update({x: float(eps_tilde) for x in range(half, m)})
        return cls(n, marked)

    @property
    def m(self) -> int:
        return len(self.marked)

    @property
    def indices(self) -> np.ndarray:
        return np.fromiter(self.marked.keys(), dtype=np.int64, count=self.m)

    @property
    def priorities(self) -> np.ndarray:
        return np.fromiter(self.marked.values(), dtype=float, count=self.m)

    def marked_phases(self) -> np.ndarray:
        return -np.exp(1j * np.pi * self.priorities)

    def diagonal(self) -> np.ndarray:
        d = np.ones(self.n, dtype=complex)
        d[self.indices] = self.marked_phases()
        return d


def uniform_initial(n: int) -> np.ndarray:
    if n < 1:
        raise InvalidCounts(f"database size must be positive, got {n}")
    return np.full(n, 1.0 / math.sqrt(n), dtype=complex)


def apply_oracle(state: np.ndarray, oracle: PriorityOracle) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.shape != (oracle.n,):
        raise DimensionMismatch(f"state has shape {state.shape}, oracle acts on n={oracle.n}")
    out = state.copy()
    out[oracle.indices] *= oracle.marked_phases()
    return out


def apply_diffusion(state: np.ndarray) -> np.ndarray:
    """Reflect ``state`` about the uniform superposition."""
    state = np.asarray(state, dtype=complex)
    return 2.0 * state.mean() - state


@dataclass
class ProbabilityTrace:
    """Per-step measurement probabilities of the marked items.

    ``probs[t, k]`` is the probability of observing ``indices[k]`` after
    ``t`` oracle queries and ``failure[t]`` is the mass on unmarked items.
    """

    indices: np.ndarray
    probs: np.ndarray
    failure: np.ndarray
    priorities: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def steps(self) -> int:
        return self.probs.shape[0] - 1

    @property
    def total(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def item(self, x: int) -> np.ndarray:
        k = int(np.flatnonzero(self.indices == x)[0])
        return self.probs[:, k]

    def class_sum(self, eps: float, atol: float = 1e-15) -> np.ndarray:
        """Summed probability of every marked item whose priority is ``eps``."""
        sel = np.abs(self.priorities - eps) <= atol
        return self.probs[:, sel].sum(axis=1)

    def check_conservation(self, tol: float = PROB_TOL) -> bool:
        tot = self.total + self.failure
        in_range = (self.probs >= -tol).all() and (self.probs <= 1 + tol).all()
        return bool(in_range and np.abs(tot - 1.0).max() < tol)


def _run(branches: Sequence[tuple[float, np.ndarray]], oracle: PriorityOracle,
         steps: int) -> ProbabilityTrace:
    if steps < 0:
        raise UsageError(f"step count must be non-negative, got {steps}")
    idx = oracle.indices
    phases = oracle.marked_phases()
    probs = np.zeros((steps + 1, oracle.m))
    for weight, vec in branches:
        v = np.array(vec, dtype=complex)
        if v.shape != (oracle.n,):
            raise DimensionMismatch(f"state has shape {v.shape}, oracle acts on n={oracle.n}")
        for t in range(steps + 1):
            amp = v[idx]
            probs[t] += weight * (amp.real ** 2 + amp.imag ** 2)
            if t == steps:
                break
            amp *= phases
            v[idx] = amp
            v = 2.0 * v.mean() - v
    failure = 1.0 - probs.sum(axis=1)
    return ProbabilityTrace(idx, probs, failure, oracle.priorities)


def evolve(oracle: PriorityOracle, steps: int, initial: np.ndarray | None = None) -> ProbabilityTrace:
    """Probabilities of each marked item under ``(D O)^t |psi0>`` for t = 0..steps."""
    v = uniform_initial(oracle.n) if initial is None else initial
    return _run([(1.0, v)], oracle, steps)


def final_state(oracle: PriorityOracle, t: int, initial: np.ndarray | None = None) -> np.ndarray:
    v = uniform_initial(oracle.n) if initial is None else np.array(initial, dtype=complex)
    for _ in range(t):
        v = apply_diffusion(apply_oracle(v, oracle))
    return v


@dataclass(frozen=True)
class DensityState:
    """Convex mixture of pure states, ``rho = sum_k w_k |v_k><v_k|``."""

    branches: tuple[tuple[float, np.ndarray], ...]

    def __post_init__(self):
        if not self.branches:
            raise UsageError("a mixture needs at least one branch")
        weights = [w for w, _ in self.branches]
        if any(w <= 0 for w in weights):
            raise UsageError("mixture weights must be positive")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise UsageError(f"mixture weights sum to {sum(weights)}, not 1")
        dims = {np.shape(v) for _, v in self.branches}
        if len(dims) != 1:
            raise DimensionMismatch(f"branches have differing shapes {dims}")
        for _, v in self.branches:
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise UsageError("mixture branches must be unit vectors")

    @classmethod
    def pure(cls, v: np.ndarray) -> "DensityState":
        return cls(((1.0, np.asarray(v, dtype=complex)),))

    @property
    def dim(self) -> int:
        return len(self.branches[0][1])

    def matrix(self, subset: Iterable[int] | None = None) -> np.ndarray:
        """Dense density matrix, optionally restricted to basis indices ``subset``."""
        sel = slice(None) if subset is None else np.asarray(list(subset))
        return sum(w * np.outer(v[sel], v[sel].conj()) for w, v in self.branches)

    def trace(self) -> float:
        return float(sum(w * np.vdot(v, v).real for w, v in self.branches))


def evolve_density(rho: DensityState, oracle: PriorityOracle, steps: int) -> ProbabilityTrace:
    """Branch-wise evolution of a mixture; probabilities are weight averages."""
    return _run(rho.branches, oracle, steps)


def first_local_max(series: Sequence[float]) -> tuple[int, float]:
    """First peak of ``series`` at t >= 1.

    Returns the smallest ``t`` with ``series[t] >= series[t-1]`` and
    ``series[t] > series[t+1]``; a plateau therefore resolves to its last
    index.  ``t = 0`` is never reported.
    """
    s = np.asarray(series, dtype=float)
    if s.size < 3:
        raise UsageError("need at least three samples to locate a local maximum")
    rising = s[1:-1] >= s[:-2]
    falling = s[1:-1] > s[2:]
    hits = np.flatnonzero(rising & falling)
    if hits.size == 0:
        raise NoLocalMax(f"no local maximum among {s.size} samples")
    t = int(hits[0]) + 1
    return t, float(s[t])
