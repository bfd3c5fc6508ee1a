"""Small dense complex linear algebra and a closed-form cubic solver.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``;
scalars are Python ``complex``.  Everything here is a pure function.
"""

from __future__ import annotations

import cmath
import math
import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotUnitary, PrecisionWarning

CVector = np.ndarray
CMatrix = np.ndarray

DEFAULT_TOL = 1e-10

_OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)
_OMEGA_BAR = _OMEGA.conjugate()
# relative discriminant size below which Cardano loses digits to a near-repeated root
_DEGENERACY_RTOL = 1e-10


def principal_arg(z: complex) -> float:
    """Argument of ``z`` in (-pi, pi]; maps the -pi branch onto +pi."""
    a = cmath.phase(z)
    if a <= -math.pi:
        return math.pi
    return a


def root_order_key(z: complex) -> tuple[float, float]:
    return (principal_arg(z), abs(z))


def _poly(r: complex, c2: complex, c1: complex, c0: complex) -> complex:
    return ((r + c2) * r + c1) * r + c0


def _dpoly(r: complex, c2: complex, c1: complex) -> complex:
    return (3.0 * r + 2.0 * c2) * r + c1


def _cardano(c2: complex, c1: complex, c0: complex) -> list[complex] | None:
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2 ** 3 / 27.0 - c2 * c1 / 3.0 + c0
    half_q = q / 2.0
    third_p = p / 3.0
    disc = half_q * half_q + third_p ** 3
    scale = max(abs(half_q) ** 2, abs(third_p) ** 3)
    if scale == 0.0 or abs(disc) <= _DEGENERACY_RTOL * scale:
        return None
    sq = cmath.sqrt(disc)
    # pick the sign that avoids cancellation
    w = -half_q + sq if abs(-half_q + sq) >= abs(-half_q - sq) else -half_q - sq
    u = w ** (1.0 / 3.0)
    v = -third_p / u
    ys = [u + v, u * _OMEGA + v * _OMEGA_BAR, u * _OMEGA_BAR + v * _OMEGA]
    return [y - shift for y in ys]


def _companion_roots(c2: complex, c1: complex, c0: complex) -> list[complex]:
    comp = np.array([[-c2, -c1, -c0], [1, 0, 0], [0, 1, 0]], dtype=complex)
    return [complex(r) for r in np.linalg.eigvals(comp)]


def solve_cubic(c2: complex, c1: complex, c0: complex,
                tol: float = DEFAULT_TOL) -> tuple[complex, complex, complex]:
    """Roots of ``x**3 + c2*x**2 + c1*x + c0``.

    Uses Cardano's formula in complex arithmetic, falling back to a
    companion-matrix eigensolve when the discriminant is close to zero
    (near-repeated roots).  Each root is polished with Newton steps.

    Returns the three roots ordered by principal argument in (-pi, pi],
    ties broken by modulus.  A :class:`PrecisionWarning` is emitted when a
    residual exceeds ``tol * max(1, |c0|)``.
    """
    c2, c1, c0 = complex(c2), complex(c1), complex(c0)
    if not all(cmath.isfinite(c) for c in (c2, c1, c0)):
        raise ValueError("cubic coefficients must be finite")

    roots = _cardano(c2, c1, c0)
    if roots is None:
        roots = _companion_roots(c2, c1, c0)

    polished = []
    for r in roots:
        for _ in range(3):
            d = _dpoly(r, c2, c1)
            if abs(d) < 1e-8:
                break
            step = _poly(r, c2, c1, c0) / d
            r -= step
            if abs(step) <= 1e-17 * max(1.0, abs(r)):
                break
        polished.append(r)

    bound = tol * max(1.0, abs(c0))
    worst = max(abs(_poly(r, c2, c1, c0)) for r in polished)
    if worst >= bound:
        warnings.warn(f"cubic residual {worst:.3e} exceeds {bound:.3e}",
                      PrecisionWarning, stacklevel=2)
    polished.sort(key=root_order_key)
    return tuple(polished)  # type: ignore[return-value]


def is_unitary(U: CMatrix, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``max |U^dagger U - I| < tol``."""
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {U.shape}")
    err = np.abs(U.conj().T @ U - np.eye(U.shape[0]))
    return bool(err.max(initial=0.0) < tol)


def _fix_gauge(v: CVector) -> CVector:
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def eig_unitary3(U: CMatrix, tol: float = DEFAULT_TOL) -> list[tuple[complex, CVector]]:
    """Eigenpairs of a 3x3 unitary matrix.

    The complex Schur form of a normal matrix is diagonal, so the Schur
    vectors are an orthonormal eigenbasis even inside degenerate
    eigenspaces.  Eigenvectors are gauge-fixed so their largest entry is
    real and positive; pairs are ordered like :func:`solve_cubic` roots.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (3, 3):
        raise DimensionMismatch(f"expected 3x3, got {U.shape}")
    if not is_unitary(U, tol):
        raise NotUnitary("matrix is not unitary within tolerance")
    T, Z = scipy.linalg.schur(U, output="complex")
    pairs = [(complex(T[j, j]), _fix_gauge(Z[:, j].copy())) for j in range(3)]
    pairs.sort(key=lambda p: root_order_key(p[0]))
    return pairs


def dagger(M: CMatrix) -> CMatrix:
    return np.asarray(M).conj().T


def unit_phase_power(lam: complex, t: int) -> complex:
    """``lam**t`` for a unit-modulus ``lam`` without multiplicative drift."""
    return cmath.exp(1j * t * cmath.phase(lam))
