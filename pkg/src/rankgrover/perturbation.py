"""Second-order expansion of the two class probabilities in ``eps_tilde``.

Valid while ``|eps_tilde|`` is small; the error is O(eps_tilde**3) or
better for fixed ``(theta, t)``.  No regime check is enforced here, the
order test in the suite is what pins the regime down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAngle

_HALF_ANGLE_EPS = 1e-12
_PI2_4 = math.pi ** 2 / 4


def _half_sine(theta: float) -> float:
    s = math.sin(theta / 2)
    if abs(s) < _HALF_ANGLE_EPS:
        raise DegenerateAngle(f"sin(theta/2) vanishes at theta={theta}")
    return s


def dirichlet_sum(a: float, theta: float, t: int) -> float:
    """``sum_{j<t} sin(a + j*theta)`` in closed form.

    Raises :class:`DegenerateAngle` when theta is a multiple of 2*pi; the
    sum is then just ``t*sin(a)``.
    """
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    return math.sin(t * theta / 2) * math.sin(a + (t - 1) * theta / 2) / _half_sine(theta)


@dataclass(frozen=True)
class PerturbationTerms:
    s1: float
    s2: float
    s3: float
    s4: float
    theta: float
    t: int


def _s1_closed(theta: float, t: int) -> float:
    sh = _half_sine(theta)
    return (math.sin(t * theta / 2) ** 2 / sh
            - t / 2 * math.sin((t + 0.5) * theta)
            + math.sin(t * theta) * sh / (2 * math.sin(theta)))


def _s3_closed(theta: float, t: int) -> float:
    sh = _half_sine(theta)
    return (math.sin(t * theta / 2) ** 2 / sh
            + t / 2 * math.sin((t + 0.5) * theta)
            - math.sin(t * theta) * sh / (2 * math.sin(theta)))


def _double_sums(theta: float, t: int) -> tuple[float, float]:
    if t < 2:
        return 0.0, 0.0
    j = np.arange(t - 1)[:, None]
    k = np.arange(t - 1)[None, :]
    inside = (j + k) <= t - 2
    kern = (1 + np.cos((k + 1) * theta)) * np.sin((t - j - k - 1.5) * theta)
    kern = np.where(inside, kern, 0.0)
    s2 = float(((1 - np.cos((j + 1) * theta)) * kern).sum())
    s4 = float(((1 + np.cos((j + 1) * theta)) * kern).sum())
    return s2, s4


def s_terms(theta: float, t: int) -> PerturbationTerms:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return PerturbationTerms(0.0, 0.0, 0.0, 0.0, theta, 0)
    s2, s4 = _double_sums(theta, t)
    return PerturbationTerms(_s1_closed(theta, t), s2, _s3_closed(theta, t), s4, theta, t)


def s2_plus_s4_closed(theta: float, t: int) -> float:
    """Closed form of ``s2 + s4``, used as a cross-check on the double sums."""
    sh = _half_sine(theta)
    return ((t - 2) * math.sin(t * theta / 2) ** 2 / sh
            + (t * math.sin(theta) - math.sin(t * theta) * math.cos(theta))
            / (2 * math.sin(theta) * sh))


def approx_probs(theta: float, t: int, eps_tilde: float) -> tuple[float, float]:
    """Second-order approximations of the class-0 and class-eps probabilities."""
    if t == 0:
        base = math.sin(theta / 2) ** 2 / 2
        return base, base
    s = s_terms(theta, t)
    peak = math.sin((t + 0.5) * theta)
    e2 = eps_tilde * eps_tilde
    p0 = (peak ** 2 + _PI2_4 * (2 * (s.s1 + s.s2) * peak + s.s1 ** 2) * e2) / 2
    peps = (peak ** 2 + _PI2_4 * (-2 * (s.s3 + s.s4) * peak + s.s3 ** 2) * e2) / 2
    return p0, peps


def class_gap(theta: float, t: int, eps_tilde: float) -> float:
    """Approximate ``p_class0 - p_class_eps``; positive means correct ranking."""
    sh = _half_sine(theta)
    st = math.sin(theta)
    if abs(st) < _HALF_ANGLE_EPS:
        raise DegenerateAngle(f"sin(theta) vanishes at theta={theta}")
    first = (t * st - math.sin(t * theta) * math.cos(theta)) / (2 * st * sh)
    second = math.sin(t * theta / 2) ** 2 * math.sin(t * theta) / st
    return _PI2_4 * (first * math.sin((t + 0.5) * theta) + second) * eps_tilde ** 2


def prioritization_condition(theta: float, t: int) -> bool:
    """Sufficient condition on ``t`` for class 0 to beat class eps at small eps."""
    if min(math.sin(t * theta), math.cos(t * theta)) < 0:
        return False
    tan = math.tan(theta)
    return t > 1 / tan if tan != 0 else False
