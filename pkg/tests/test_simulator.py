from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankgrover.errors import DimensionMismatch, InvalidCounts, NoLocalMax, UsageError
from rankgrover.simulator import (DensityState, PriorityOracle, apply_diffusion, apply_oracle,
                                  evolve, evolve_density, final_state, first_local_max,
                                  grover_angle, grover_optimal_steps, grover_success,
                                  uniform_initial)


def dense_reference(oracle: PriorityOracle, t: int) -> np.ndarray:
    """(D O)^t |psi0> with both operators as explicit matrices."""
    n = oracle.n
    psi = np.full(n, 1 / math.sqrt(n), dtype=complex)
    D = 2 * np.outer(psi, psi) - np.eye(n)
    O = np.diag(oracle.diagonal())
    v = psi.copy()
    for _ in range(t):
        v = D @ (O @ v)
    return v


def test_grover_angle_examples():
    assert math.isclose(grover_angle(4, 1), math.pi / 3)
    assert math.isclose(grover_angle(2, 1), math.pi / 2)
    # asin x = x + x^3/6 + 3x^5/40 + ... at x = 1/sqrt(128)
    x = 1 / math.sqrt(128)
    series = 2 * (x + x ** 3 / 6 + 3 * x ** 5 / 40 + 15 * x ** 7 / 336)
    assert math.isclose(grover_angle(256, 2), series, abs_tol=1e-10)
    assert math.isclose(grover_angle(256, 2), 0.1770077, abs_tol=1e-7)
    assert grover_optimal_steps(256, 2) == 8


@pytest.mark.parametrize("n,m", [(4, 0), (4, 5), (0, 0)])
def test_grover_angle_rejects_bad_counts(n, m):
    with pytest.raises(InvalidCounts):
        grover_angle(n, m)


def test_uniform_initial():
    assert np.allclose(uniform_initial(1), [1])
    assert np.allclose(uniform_initial(4), [0.5] * 4)
    assert math.isclose(np.vdot(uniform_initial(256), uniform_initial(256)).real, 1)


def test_oracle_phases():
    v = uniform_initial(4)
    out = apply_oracle(v, PriorityOracle(4, {2: -0.5}))
    assert np.allclose(out[2], 1j * v[2])
    assert np.allclose(np.delete(out, 2), np.delete(v, 2))
    unmark = apply_oracle(v, PriorityOracle(4, {0: -1.0, 3: -1.0}))
    assert np.allclose(unmark, v)
    flip = apply_oracle(v, PriorityOracle(4, {1: 0.0}))
    assert np.allclose(flip, v * np.array([1, -1, 1, 1]))


def test_oracle_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply_oracle(np.ones(3), PriorityOracle(4, {0: 0.0}))


@pytest.mark.parametrize("marked", [{}, {4: 0.0}, {0: 0.5}, {0: -1.5}])
def test_oracle_validation(marked):
    with pytest.raises(UsageError):
        PriorityOracle(4, marked)


def test_two_class_layout():
    o = PriorityOracle.two_class(16, 4, -0.3)
    assert list(o.indices) == [0, 1, 2, 3]
    assert list(o.priorities) == [0.0, 0.0, -0.3, -0.3]


def test_diffusion_examples():
    psi = uniform_initial(8)
    assert np.allclose(apply_diffusion(psi), psi)
    assert np.allclose(apply_diffusion(np.array([1, 0])), [0, 1])
    v = np.random.default_rng(0).normal(size=8) + 0j
    assert np.allclose(apply_diffusion(apply_diffusion(v)), v, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 64), st.data())
def test_unitarity(n, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 31)))
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    v /= np.linalg.norm(v)
    k = data.draw(st.integers(1, n))
    marked = {int(x): float(rng.uniform(-1, 0)) for x in rng.choice(n, size=k, replace=False)}
    o = PriorityOracle(n, marked)
    assert abs(np.linalg.norm(apply_oracle(v, o)) - 1) < 1e-12
    assert abs(np.linalg.norm(apply_diffusion(v)) - 1) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.data())
def test_evolve_matches_dense_reference(n, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 31)))
    k = data.draw(st.integers(1, n))
    marked = {int(x): float(rng.uniform(-1, 0)) for x in rng.choice(n, size=k, replace=False)}
    o = PriorityOracle(n, marked)
    T = 12
    trace = evolve(o, T)
    assert trace.check_conservation()
    for t in (0, 1, 5, T):
        ref = np.abs(dense_reference(o, t)[o.indices]) ** 2
        assert np.allclose(trace.probs[t], ref, atol=1e-12)


def test_evolve_examples():
    tr = evolve(PriorityOracle(4, {0: 0.0}), 1)
    assert math.isclose(tr.probs[1, 0], 1.0)
    tr = evolve(PriorityOracle(256, {0: 0.0, 1: -0.1}), 8)
    assert tr.probs[8, 0] > tr.probs[8, 1]
    assert np.allclose(tr.probs[0], 1 / 256)


def test_two_class_at_large_n_starts_at_marked_fraction():
    tr = evolve(PriorityOracle.two_class(2 ** 16, 2, -0.05), 0)
    assert abs(tr.total[0] - 2.0 ** -15) < 1e-15


def test_grover_recovery_small():
    for n, m in [(16, 1), (64, 4), (100, 50)]:
        tr = evolve(PriorityOracle(n, {x: 0.0 for x in range(m)}), 40)
        assert np.allclose(tr.total, grover_success(n, m, np.arange(41)), atol=1e-10)


def test_all_unmarked_is_periodic():
    o = PriorityOracle(32, {3: -1.0, 9: -1.0})
    tr = evolve(o, 10)
    assert np.allclose(tr.probs[::2], 1 / 32, atol=1e-12)


def test_final_state_agrees_with_trace():
    o = PriorityOracle(32, {1: 0.0, 5: -0.4})
    v = final_state(o, 7)
    assert np.allclose(np.abs(v[o.indices]) ** 2, evolve(o, 7).probs[7])


def test_class_sum_and_item():
    o = PriorityOracle.two_class(64, 4, -0.2)
    tr = evolve(o, 5)
    assert np.allclose(tr.class_sum(0.0), tr.item(0) + tr.item(1))
    assert np.allclose(tr.class_sum(-0.2) + tr.class_sum(0.0), tr.total)


def test_density_pure_matches_evolve():
    o = PriorityOracle(50, {0: 0.0, 1: -0.7})
    a = evolve(o, 20)
    b = evolve_density(DensityState.pure(uniform_initial(50)), o, 20)
    assert np.allclose(a.probs, b.probs)


def test_density_validation():
    v = uniform_initial(4)
    with pytest.raises(UsageError):
        DensityState(())
    with pytest.raises(UsageError):
        DensityState(((0.5, v),))
    with pytest.raises(UsageError):
        DensityState(((1.0, 2 * v),))
    with pytest.raises(DimensionMismatch):
        DensityState(((0.5, v), (0.5, uniform_initial(3))))


def test_density_matrix_block():
    v = np.array([1, 1j, 0, 0]) / math.sqrt(2)
    rho = DensityState.pure(v)
    assert np.allclose(rho.matrix([0, 1]), np.outer(v[:2], v[:2].conj()))
    assert math.isclose(rho.trace(), 1)


def test_first_local_max_rules():
    assert first_local_max([0, 1, 0]) == (1, 1.0)
    assert first_local_max([0, 1, 1, 0]) == (2, 1.0)
    theta = grover_angle(256, 2)
    series = [math.sin((2 * t + 1) * theta / 2) ** 2 for t in range(21)]
    assert first_local_max(series)[0] == 8
    # t = 0 is never a peak
    assert first_local_max([5, 1, 2, 1])[0] == 2
    with pytest.raises(NoLocalMax):
        first_local_max([0, 1, 2, 3])
    with pytest.raises(UsageError):
        first_local_max([0, 1])


def test_negative_steps_rejected():
    with pytest.raises(UsageError):
        evolve(PriorityOracle(4, {0: 0.0}), -1)


def test_oracle_phase_convention():
    o = PriorityOracle(8, {2: -0.25})
    assert np.isclose(o.diagonal()[2], -cmath.exp(-0.25j * math.pi))
