"""Coherent versus incoherent starting states for two ranked targets.

The coherent start is the usual uniform superposition.  The incoherent
start mixes two branches, each holding only one of the targets next to
the unmarked superposition, so the target block of the density matrix is
diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoLocalMax, UsageError, ZeroMass
from .simulator import (DensityState, PriorityOracle, evolve, evolve_density,
                        first_local_max, grover_optimal_steps, uniform_initial)

DEFAULT_N = 1000
DEFAULT_TARGETS = (0, 1)


def l1_coherence(rho: DensityState, subset: Sequence[int] | None = None) -> float:
    """Sum of off-diagonal magnitudes of ``rho`` restricted to ``subset``.

    The restricted block is renormalised to unit trace first.
    """
    block = rho.matrix(subset)
    tr = np.trace(block).real
    if tr <= 1e-300:
        raise ZeroMass("projection onto the subset carries no probability")
    block = block / tr
    mags = np.abs(block)
    return float(mags.sum() - np.trace(mags))


def unmarked_superposition(n: int, targets: Sequence[int] = DEFAULT_TARGETS) -> np.ndarray:
    v = np.full(n, 1.0 / math.sqrt(n - len(targets)), dtype=complex)
    v[list(targets)] = 0.0
    return v


def incoherent_initial(n: int = DEFAULT_N, targets: Sequence[int] = DEFAULT_TARGETS) -> DensityState:
    """Equal mixture of ``(sqrt(n-1)|0_L> + |x_i>)/sqrt(n)`` for both targets."""
    x1, x2 = targets
    if x1 == x2:
        raise UsageError("the two targets must differ")
    rest = unmarked_superposition(n, targets) * math.sqrt((n - 1) / n)
    branches = []
    for x in (x1, x2):
        v = rest.copy()
        v[x] = 1.0 / math.sqrt(n)
        branches.append((0.5, v))
    return DensityState(tuple(branches))


def incoherent_fidelity(a: int, n: int = DEFAULT_N) -> float:
    """Fidelity of the uniform start with the mixture whose unmarked weight is a/n."""
    return (math.sqrt(a / n * (n - 2) / n) + math.sqrt((1 - a / n) / n)) ** 2


def best_incoherent_fidelity(n: int = DEFAULT_N) -> tuple[int, float]:
    scores = [incoherent_fidelity(a, n) for a in range(n + 1)]
    best = int(np.argmax(scores))
    return best, scores[best]


@dataclass(frozen=True)
class CoherenceReport:
    """First-local-max data per grid point; column k refers to target k.

    ``p_opt``/``t_psi`` come from the coherent start, ``h_opt``/``t_rho``
    from the incoherent mixture.
    """

    eps_tilde: np.ndarray
    p_opt: np.ndarray
    h_opt: np.ndarray
    t_psi: np.ndarray
    t_rho: np.ndarray

    @property
    def prob_ratio(self) -> np.ndarray:
        return self.p_opt / self.h_opt

    @property
    def query_ratio(self) -> np.ndarray:
        return self.t_psi / self.t_rho


def default_grid(points: int = 100) -> np.ndarray:
    return np.linspace(-1.0, -0.01, points)


def _peaks(run, oracle, steps: int, max_steps: int):
    while True:
        trace = run(oracle, steps)
        try:
            return [first_local_max(trace.probs[:, k]) for k in range(trace.probs.shape[1])]
        except NoLocalMax:
            if steps >= max_steps:
                raise
            steps *= 2


def coherence_sweep(eps_grid: Sequence[float] | None = None, n: int = DEFAULT_N,
                    targets: Sequence[int] = DEFAULT_TARGETS) -> CoherenceReport:
    grid = default_grid() if eps_grid is None else np.asarray(eps_grid, dtype=float)
    x1, x2 = targets
    rho0 = incoherent_initial(n, targets)
    psi0 = uniform_initial(n)
    steps = 6 * grover_optimal_steps(n, 2) + 10
    max_steps = 64 * steps

    rows = []
    for eps in grid:
        oracle = PriorityOracle(n, {x1: 0.0, x2: float(eps)})
        pure = _peaks(lambda o, s: evolve(o, s, psi0), oracle, steps, max_steps)
        mixed = _peaks(lambda o, s: evolve_density(rho0, o, s), oracle, steps, max_steps)
        rows.append((pure, mixed))

    return CoherenceReport(
        eps_tilde=grid,
        p_opt=np.array([[p[1] for p in pure] for pure, _ in rows]),
        h_opt=np.array([[h[1] for h in mixed] for _, mixed in rows]),
        t_psi=np.array([[p[0] for p in pure] for pure, _ in rows]),
        t_rho=np.array([[h[0] for h in mixed] for _, mixed in rows]),
    )
