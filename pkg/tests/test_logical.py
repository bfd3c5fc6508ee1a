from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankgrover import logical
from rankgrover.errors import InvalidClassSplit, OutOfRange
from rankgrover.simulator import PriorityOracle, final_state as sv_final_state, grover_angle

thetas = st.floats(1e-3, math.pi / 2)
epss = st.floats(-1.0, 0.0)


def independent_G3(theta: float, eps: float) -> np.ndarray:
    """Product D3 O3 written out entry by entry."""
    c, s = math.cos(theta), math.sin(theta)
    u = cmath.exp(1j * math.pi * eps)
    r = 1 / math.sqrt(2)
    return np.array([
        [c, -s * r, -u * s * r],
        [s * r, (1 + c) / 2, -u * (1 - c) / 2],
        [s * r, -(1 - c) / 2, u * (1 + c) / 2],
    ])


def test_oracle3_examples():
    assert np.allclose(logical.oracle3(0.0), np.diag([1, -1, -1]))
    assert np.allclose(logical.oracle3(-1.0), np.diag([1, -1, 1]))


@settings(max_examples=50, deadline=None)
@given(epss)
def test_reduced_product_matches_independent_transcription(eps):
    init, D3, O3, G3 = logical.reduce(8, 2, eps)
    theta = grover_angle(8, 2)
    assert np.allclose(G3, independent_G3(theta, eps), atol=1e-14)
    assert np.abs(G3.conj().T @ G3 - np.eye(3)).max() < 1e-12
    assert np.isclose(np.linalg.norm(init), 1)


def test_reduce_preconditions():
    with pytest.raises(InvalidClassSplit):
        logical.reduce(16, 3, -0.1)
    with pytest.raises(OutOfRange):
        logical.reduce(8, 6, -0.1)


def test_coefficient_a_examples():
    th = 0.7
    assert np.isclose(logical.coefficient_a(th, 0.0), 1 + 2 * math.cos(th))
    assert np.isclose(logical.coefficient_a(th, -1.0), math.cos(th))
    assert np.isclose(logical.coefficient_a(math.pi / 2, -0.5), 0.5 - 0.5j)


@settings(max_examples=100, deadline=None)
@given(thetas, epss, st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False), min_size=5, max_size=5))
def test_characteristic_polynomial_identity(theta, eps, lams):
    G = logical.diffusion3(theta) @ logical.oracle3(eps)
    c2, c1, c0 = logical.characteristic_coefficients(theta, eps)
    for lam in lams:
        lhs = np.linalg.det(G - lam * np.eye(3))
        rhs = -(lam ** 3 + c2 * lam ** 2 + c1 * lam + c0)
        assert abs(lhs - rhs) < 1e-9 * max(1, abs(lam) ** 3)


@settings(max_examples=300, deadline=None)
@given(thetas, epss)
def test_eigensystem_residuals(theta, eps):
    es = logical.eigensystem(theta, eps)
    G = logical.diffusion3(theta) @ logical.oracle3(eps)
    assert np.allclose(np.abs(es.eigenvalues), 1, atol=1e-9)
    for lam, v in es.pairs():
        assert np.isclose(np.linalg.norm(v), 1)
        assert np.linalg.norm(G @ v - lam * v) < 1e-9
    V = es.vectors
    assert np.abs(V.conj().T @ V - np.eye(3)).max() < 1e-8


def test_closed_form_vector_solves_the_linear_system_many_samples():
    rng = np.random.default_rng(3)
    for _ in range(10_000):
        theta, eps = rng.uniform(1e-3, math.pi / 2), rng.uniform(-1, 0)
        es = logical.eigensystem(theta, eps)
        if es.degenerate:
            continue
        G = logical.diffusion3(theta) @ logical.oracle3(eps)
        for lam, v in es.pairs():
            assert np.abs((G - lam * np.eye(3)) @ v).max() < 1e-9


def test_zero_priority_eigenvectors():
    theta = 0.4
    es = logical.eigensystem(theta, 0.0)
    s2 = math.sqrt(2)
    for lam_ref, ref in [(1.0, np.array([0, -1, 1]) / s2),
                         (cmath.exp(1j * theta), np.array([1j * s2, 1, 1]) / 2)]:
        j = int(np.argmin(np.abs(es.eigenvalues - lam_ref)))
        assert abs(abs(np.vdot(ref, es.vectors[:, j])) - 1) < 1e-12


def test_minus_one_priority_spectrum():
    theta = grover_angle(8, 2)
    es = logical.eigensystem(theta, -1.0)
    tp = math.acos(1 - 2 / 8)
    for ref in (-1, cmath.exp(1j * tp), cmath.exp(-1j * tp)):
        assert np.abs(es.eigenvalues - ref).min() < 1e-10


def test_closed_form_vector_singular_case():
    # N = 1 + c - lam (1 + 3c - 2 lam) vanishes at the roots of 2 lam^2 - (1 + 3c) lam + 1 + c
    theta = 0.4
    c = math.cos(theta)
    for lam in np.roots([2, -(1 + 3 * c), 1 + c]):
        assert logical.closed_form_eigenvector(complex(lam), theta, -0.3) is None


def test_eigensystem_precondition():
    with pytest.raises(OutOfRange):
        logical.eigensystem(2.0, -0.1)
    with pytest.raises(OutOfRange):
        logical.eigensystem(0.0, -0.1)


def test_final_state_at_zero_steps_is_initial():
    theta = 0.3
    assert np.allclose(logical.final_state(theta, -0.4, 0), logical.initial_vector(theta))


def test_final_state_matches_statevector_amplitudes():
    n, m, eps, t = 8, 2, -0.3, 2
    v = sv_final_state(PriorityOracle.two_class(n, m, eps), t)
    amp = logical.final_state(grover_angle(n, m), eps, t)
    unmarked = v[2:].sum() / math.sqrt(n - m)
    assert np.allclose(amp, [unmarked, v[0], v[1]], atol=1e-12)


@pytest.mark.parametrize("t", [0, 1, 5, 17])
def test_zero_priority_recovers_grover(t):
    n, m = 256, 2
    p0, pe, pf = logical.success_probs(n, m, 0.0, t)
    expected = math.sin((2 * t + 1) * grover_angle(n, m) / 2) ** 2
    assert math.isclose(p0, expected / 2, abs_tol=1e-12)
    assert math.isclose(pe, expected / 2, abs_tol=1e-12)
    assert math.isclose(p0 + pe + pf, 1, abs_tol=1e-9)


def test_success_probs_at_minus_one():
    p0, pe, _ = logical.success_probs(8, 2, -1.0, 2)
    assert math.isclose(p0, 484 / 512, abs_tol=1e-12)
    assert math.isclose(pe, 4 / 512, abs_tol=1e-12)
    single = math.sin(5 * grover_angle(8, 1) / 2) ** 2
    assert math.isclose(p0, single, abs_tol=1e-12)


def test_precision_at_scale():
    for eps in np.linspace(-0.1, -0.01, 10):
        p0, pe, _ = logical.success_probs(2 ** 16, 2, float(eps), 0)
        assert abs(p0 + pe - 2.0 ** -15) < 1.3e-10


def test_long_horizon_stays_normalised():
    es = logical.eigensystem(0.01, -0.37)
    amp = es.amplitudes([10 ** 6])[0]
    assert abs(np.linalg.norm(amp) - 1) < 1e-9


def test_series_shape_and_columns():
    s = logical.class_probability_series(64, 4, -0.2, 10)
    assert s.shape == (11, 3)
    assert np.allclose(s.sum(axis=1), 1, atol=1e-12)


def test_degenerate_fallback_agrees(monkeypatch):
    theta, eps = 0.3, -0.45
    closed = logical.eigensystem(theta, eps)
    monkeypatch.setattr(logical, "DEGENERACY_TOL", 10.0)
    fallback = logical.eigensystem(theta, eps)
    assert fallback.degenerate and not closed.degenerate
    steps = np.arange(40)
    assert np.allclose(np.abs(closed.amplitudes(steps)) ** 2,
                       np.abs(fallback.amplitudes(steps)) ** 2, atol=1e-12)
