"""Analytic engine for the two-priority-class problem.

With ``m/2`` marked items at priority 0 and ``m/2`` at priority
``eps_tilde``, the evolution never leaves the span of three logical
states: the uniform superposition of unmarked items, of class-0 items and
of class-``eps_tilde`` items.  The 3x3 step operator is diagonalised once
(eigenvalues from a cubic, eigenvectors from a closed formula) after which
any step count costs O(1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidClassSplit, OutOfRange
from .numerics import eig_unitary3, solve_cubic
from .simulator import grover_angle

SQRT2 = math.sqrt(2.0)
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class LogicalSystem:
    n: int
    m: int
    eps_tilde: float

    def __post_init__(self):
        _check_split(self.n, self.m)
        if not -1.0 <= self.eps_tilde <= 0.0:
            raise OutOfRange(f"eps_tilde={self.eps_tilde} outside [-1, 0]")

    @property
    def theta(self) -> float:
        return grover_angle(self.n, self.m)


def _check_split(n: int, m: int) -> None:
    if m < 1 or n < 1:
        raise OutOfRange(f"need positive n and m, got n={n}, m={m}")
    if m % 2:
        raise InvalidClassSplit(f"two equal priority classes need even m, got {m}")
    if 2 * m > n:
        raise OutOfRange(f"the logical reduction needs m <= n/2, got n={n}, m={m}")


def initial_vector(theta: float) -> np.ndarray:
    s = math.sin(theta / 2.0) / SQRT2
    return np.array([math.cos(theta / 2.0), s, s], dtype=complex)


def diffusion3(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([
        [c, s / SQRT2, s / SQRT2],
        [s / SQRT2, -(1 + c) / 2, (1 - c) / 2],
        [s / SQRT2, (1 - c) / 2, -(1 + c) / 2],
    ], dtype=complex)


def oracle3(eps_tilde: float) -> np.ndarray:
    return np.diag([1.0, -1.0, -cmath.exp(1j * math.pi * eps_tilde)])


def reduce(n: int, m: int, eps_tilde: float):
    """Initial state, diffusion, oracle and step operator in the logical basis.

    Returns ``(initial, D3, O3, G3)`` with ``G3 = D3 @ O3``.
    """
    system = LogicalSystem(n, m, eps_tilde)
    theta = system.theta
    D3 = diffusion3(theta)
    O3 = oracle3(eps_tilde)
    return initial_vector(theta), D3, O3, D3 @ O3


def coefficient_a(theta: float, eps_tilde: float) -> complex:
    c = math.cos(theta)
    return (1 + 3 * c) / 2 + cmath.exp(1j * math.pi * eps_tilde) * (1 + c) / 2


def characteristic_coefficients(theta: float, eps_tilde: float) -> tuple[complex, complex, complex]:
    """``(c2, c1, c0)`` of the monic characteristic cubic of the step operator."""
    a = coefficient_a(theta, eps_tilde)
    u = cmath.exp(1j * math.pi * eps_tilde)
    return -a, u * a.conjugate(), -u


def closed_form_eigenvector(lam: complex, theta: float, eps_tilde: float) -> np.ndarray | None:
    """Normalised eigenvector for eigenvalue ``lam`` with a real, non-negative
    last component.  Returns ``None`` when the phase factor is 0/0."""
    c, s = math.cos(theta), math.sin(theta)
    u = cmath.exp(1j * math.pi * eps_tilde)
    denom = 1 + c - lam * (1 + 3 * c - 2 * lam)
    mag = abs(denom)
    if mag < 1e-14:
        return None
    phase = mag / denom
    norm = math.sqrt(2 * abs(1 - lam) ** 2 * s * s
                     + abs(1 + lam) ** 2 * (1 - c) ** 2
                     + mag * mag)
    return np.array([
        SQRT2 * (1 - lam) * s * u * phase,
        -(1 + lam) * (1 - c) * u * phase,
        mag,
    ], dtype=complex) / norm


@dataclass(frozen=True)
class Eigensystem:
    """Eigenvalues and orthonormal eigenvectors (columns) of the step operator."""

    theta: float
    eps_tilde: float
    eigenvalues: np.ndarray
    vectors: np.ndarray
    a: complex
    degenerate: bool = False

    def pairs(self):
        return [(complex(self.eigenvalues[j]), self.vectors[:, j]) for j in range(3)]

    def amplitudes(self, steps) -> np.ndarray:
        """Logical amplitudes after each step count in ``steps``; shape (len, 3)."""
        t = np.atleast_1d(np.asarray(steps))
        coeff = self.vectors.conj().T @ initial_vector(self.theta)
        # lambda**t as exp(i t arg lambda): no drift for large t
        powers = np.exp(1j * np.outer(t, np.angle(self.eigenvalues)))
        return (powers * coeff) @ self.vectors.T


def eigensystem(theta: float, eps_tilde: float) -> Eigensystem:
    if not 0.0 < theta <= math.pi / 2 + 1e-15:
        raise OutOfRange(f"closed-form eigenvectors need 0 < theta <= pi/2, got {theta}")
    a = coefficient_a(theta, eps_tilde)
    lams = solve_cubic(*characteristic_coefficients(theta, eps_tilde))

    gaps = [abs(lams[i] - lams[j]) for i in range(3) for j in range(i + 1, 3)]
    vecs = [closed_form_eigenvector(lam, theta, eps_tilde) for lam in lams]
    if min(gaps) < DEGENERACY_TOL or any(v is None for v in vecs):
        G3 = diffusion3(theta) @ oracle3(eps_tilde)
        pairs = eig_unitary3(G3)
        return Eigensystem(theta, eps_tilde,
                           np.array([p[0] for p in pairs]),
                           np.column_stack([p[1] for p in pairs]), a, degenerate=True)

    # Roots of the cubic lose accuracy like eps/theta**2 as theta -> 0 (all
    # three cluster near 1).  One Rayleigh-quotient pass on the normal
    # operator squares the vector error away.
    G3 = diffusion3(theta) @ oracle3(eps_tilde)
    refined_l, refined_v = [], []
    for lam, v in zip(lams, vecs):
        rq = complex(np.vdot(v, G3 @ v))
        rq /= abs(rq)
        w = closed_form_eigenvector(rq, theta, eps_tilde)
        if w is None:
            rq, w = lam, v
        refined_l.append(rq)
        refined_v.append(w)
    return Eigensystem(theta, eps_tilde, np.array(refined_l), np.column_stack(refined_v), a)


def final_state(theta: float, eps_tilde: float, t: int) -> np.ndarray:
    """Logical amplitudes of ``(D O)^t |psi0>``."""
    if t < 0:
        raise OutOfRange(f"step count must be non-negative, got {t}")
    return eigensystem(theta, eps_tilde).amplitudes([t])[0]


def success_probs(n: int, m: int, eps_tilde: float, t: int) -> tuple[float, float, float]:
    """``(p_class0, p_class_eps, p_fail)`` after ``t`` steps."""
    system = LogicalSystem(n, m, eps_tilde)
    amp = final_state(system.theta, eps_tilde, t)
    p = np.abs(amp) ** 2
    return float(p[1]), float(p[2]), float(p[0])


def class_probability_series(n: int, m: int, eps_tilde: float, steps: int) -> np.ndarray:
    """Rows ``(p_class0, p_class_eps, p_fail)`` for t = 0..steps."""
    system = LogicalSystem(n, m, eps_tilde)
    es = eigensystem(system.theta, eps_tilde)
    p = np.abs(es.amplitudes(np.arange(steps + 1))) ** 2
    return p[:, [1, 2, 0]]
