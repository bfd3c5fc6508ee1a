"""Head-to-head with the amplitude-encoded priority oracle at n = 8, m = 2.

Target 1 is ``|000>`` (index 0) and target 2 is ``|111>`` (index 7).  The
amplitude-encoded algorithm runs one query, the phase-encoded one two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import NoSolution, OutOfRange

N8 = 8
TARGETS = (0, 7)
SEARCH_INTERVAL = (-0.99, -0.01)
BISECT_XTOL = 1e-12


def _check_eps(eps: float) -> None:
    if not -1.0 <= eps <= 0.0:
        raise OutOfRange(f"priority {eps} outside [-1, 0]")


def ps_vector(eps: float, n: int = N8) -> np.ndarray:
    _check_eps(eps)
    w = np.zeros(n, dtype=complex)
    w[TARGETS[0]] = math.sqrt(1 + eps)
    w[TARGETS[1]] = math.sqrt(-eps)
    return w


def ps_oracle(eps: float) -> np.ndarray:
    """Reflection ``I - 2|w><w|`` with ``|w> = sqrt(1+eps)|x1> + sqrt(-eps)|x2>``."""
    w = ps_vector(eps)
    return np.eye(N8, dtype=complex) - 2 * np.outer(w, w.conj())


def ps_query_count(n: int, eps: float) -> int:
    _check_eps(eps)
    s = math.sqrt((1 + eps) / n) + math.sqrt(-eps / n)
    x = math.acos(s) / (2 * math.asin(s))
    # nearest integer, halves away from zero (x is positive)
    return math.floor(x + 0.5)


def ps_probs(eps: float) -> tuple[float, float]:
    _check_eps(eps)
    r = math.sqrt(-eps * (1 + eps))
    return (1 + 2 * r + 4 * (1 + eps)) ** 2 / 32, (1 + 2 * r - 4 * eps) ** 2 / 32


def our_probs_n8(eps_tilde: float) -> tuple[float, float]:
    c = math.cos(math.pi * eps_tilde)
    return (373 - 210 * c - 99 * c * c) / 512, (61 + 30 * c - 27 * c * c) / 512


def eps_tilde_from_cos(c: float) -> float:
    """Priority with ``cos(pi*eps_tilde) = c`` on the [-1, 0] branch."""
    return -math.acos(c) / math.pi


@dataclass(frozen=True)
class ComparisonRow:
    R: float
    eps: float
    eps_tilde: float
    Q1: float
    Q2: float
    P1: float
    P2: float

    @property
    def Q_total(self) -> float:
        return self.Q1 + self.Q2

    @property
    def P_total(self) -> float:
        return self.P1 + self.P2


def _ratio(f):
    def g(x):
        a, b = f(x)
        return a / b
    return g


def _solve(ratio, R: float, lo: float, hi: float, label: str) -> float:
    grid = np.linspace(lo, hi, 401)
    vals = np.array([ratio(x) for x in grid])
    steps = np.diff(vals)
    monotone = (steps > 0).all() or (steps < 0).all()
    span = (float(vals.min()), float(vals.max()))
    if not span[0] <= R <= span[1]:
        raise NoSolution(f"{label}: ratio {R} unattainable on [{lo}, {hi}]; "
                         f"attainable interval is [{span[0]:.6g}, {span[1]:.6g}]")
    if not monotone:
        # bracket the first crossing on the grid, then refine
        k = int(np.flatnonzero(np.diff(np.sign(vals - R)) != 0)[0])
        lo, hi = grid[k], grid[k + 1]
    if ratio(lo) == R:
        return lo
    if ratio(hi) == R:
        return hi
    return scipy.optimize.bisect(lambda x: ratio(x) - R, lo, hi, xtol=BISECT_XTOL, maxiter=200)


def match_ratio(R: float, eps_range: tuple[float, float] = SEARCH_INTERVAL,
                eps_tilde_range: tuple[float, float] = SEARCH_INTERVAL) -> ComparisonRow:
    """Tune both oracles so each gives ``P(x1)/P(x2) = R``; report both totals."""
    if R < 1:
        raise OutOfRange(f"ratio must be >= 1, got {R}")
    eps = _solve(_ratio(ps_probs), R, *eps_range, label="amplitude oracle")
    eps_t = _solve(_ratio(our_probs_n8), R, *eps_tilde_range, label="phase oracle")
    q1, q2 = ps_probs(eps)
    p1, p2 = our_probs_n8(eps_t)
    return ComparisonRow(R, eps, eps_t, q1, q2, p1, p2)


def dense_run(oracle: np.ndarray, t: int) -> np.ndarray:
    """Dense ``(D O)^t |psi0>`` at n = 8, independent of the closed forms."""
    psi = np.full(N8, 1 / math.sqrt(N8), dtype=complex)
    D = 2 * np.outer(psi, psi.conj()) - np.eye(N8)
    state = psi.copy()
    for _ in range(t):
        state = D @ (oracle @ state)
    return state


def phase_oracle_n8(eps_tilde: float) -> np.ndarray:
    d = np.ones(N8, dtype=complex)
    d[TARGETS[0]] = -1
    d[TARGETS[1]] = -np.exp(1j * math.pi * eps_tilde)
    return np.diag(d)
