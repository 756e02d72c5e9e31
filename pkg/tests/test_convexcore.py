import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpxpoly.convexcore import (MinMaxProblem, SumModuliProblem, solve_min_max_affine,
                                solve_min_sum_moduli, solve_min_sum_moduli_batch)
from cpxpoly.errors import Infeasible

from conftest import brute_min_sum_moduli, cgauss

# frozen from brute_min_sum_moduli on the three-column example
THREE_COLUMN_VALUE = 1.4142135623730951


def test_identity_system():
    rep = solve_min_sum_moduli(SumModuliProblem(np.eye(2), [3, 4j]))
    assert rep.value == pytest.approx(7, abs=1e-8)
    assert np.allclose(rep.primal, [3, 4j], atol=1e-8)


def test_three_column_example_matches_oracle():
    A = np.array([[1, 0, 1 / np.sqrt(2)], [0, 1, 1 / np.sqrt(2)]], dtype=complex)
    b = np.array([1, 1], dtype=complex)
    assert brute_min_sum_moduli(A, b) == pytest.approx(THREE_COLUMN_VALUE, abs=1e-10)
    rep = solve_min_sum_moduli(SumModuliProblem(A, b))
    assert rep.value == pytest.approx(THREE_COLUMN_VALUE, abs=1e-8)
    assert np.allclose(rep.primal, [0, 0, np.sqrt(2)], atol=1e-6)


def test_zero_right_hand_side():
    rep = solve_min_sum_moduli(SumModuliProblem(np.eye(3), np.zeros(3)))
    assert rep.value == 0 and np.all(rep.primal == 0)


def test_infeasible_rhs():
    with pytest.raises(Infeasible):
        solve_min_sum_moduli(SumModuliProblem(np.array([[1.0], [0.0]]), [0, 1]))


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        solve_min_sum_moduli(SumModuliProblem(np.eye(2), [1, 1]), tol=0)


def test_dual_certificate_contract(rng):
    for _ in range(20):
        A = cgauss(rng, 3, 5)
        b = cgauss(rng, 3)
        rep = solve_min_sum_moduli(SumModuliProblem(A, b), tol=1e-8)
        assert np.linalg.norm(A @ rep.primal - b) <= 1e-8 * (1 + np.linalg.norm(b))
        assert np.max(np.abs(rep.dual @ A)) <= 1 + 1e-8
        assert np.real(rep.dual @ b) >= rep.value - rep.gap - 1e-12
        assert rep.gap >= 0 and rep.converged


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_square_systems_are_exact(seed, n):
    r = np.random.default_rng(seed)
    A = cgauss(r, n, n)
    b = cgauss(r, n)
    exact = float(np.sum(np.abs(np.linalg.solve(A, b))))
    assert solve_min_sum_moduli(SumModuliProblem(A, b)).value == pytest.approx(exact, rel=1e-8)


def test_column_order_does_not_matter(rng):
    # convexity: reordering the columns (a different starting point) keeps the optimum
    for _ in range(10):
        A = cgauss(rng, 2, 4)
        b = cgauss(rng, 2)
        v0 = solve_min_sum_moduli(SumModuliProblem(A, b)).value
        perm = rng.permutation(4)
        v1 = solve_min_sum_moduli(SumModuliProblem(A[:, perm], b)).value
        assert abs(v0 - v1) <= 10 * 1e-8 * (1 + v0)


def test_batch_matches_oracle(rng):
    A = cgauss(rng, 2, 4)
    B = cgauss(rng, 2, 40)
    values, lams = solve_min_sum_moduli_batch(A, B, 1e-9, chunk=16)
    oracle = np.array([brute_min_sum_moduli(A, b) for b in B.T])
    assert np.allclose(values, oracle, atol=1e-7)
    assert np.allclose(A @ lams, B, atol=1e-9)
    assert np.allclose(np.abs(lams).sum(axis=0), values, atol=1e-12)


def test_min_max_without_subspace():
    F = np.eye(3)
    rep = solve_min_max_affine(MinMaxProblem(F, [1, -2j, 0.5]))
    assert rep.value == pytest.approx(2)


def test_min_max_counterexample_instance():
    u = np.array([0, 0, -1j, 1j])
    v = np.array([1j, -1j, 1 - 1j, 1 + 1j])
    rep = solve_min_max_affine(MinMaxProblem(np.eye(4), np.ones(4), np.column_stack([u, v])))
    assert rep.value == pytest.approx(1, abs=1e-8)
    assert np.allclose(rep.primal, 0, atol=1e-6)


def test_min_max_two_dim_against_grid():
    x = np.array([1, -1], dtype=complex)
    B = np.array([[1], [1]], dtype=complex)
    # grid oracle over the complex coefficient
    s = np.linspace(-1, 1, 401)
    cr, ci = np.meshgrid(s, s)
    c = cr + 1j * ci
    grid = np.maximum(np.abs(1 - c), np.abs(-1 - c)).min()
    rep = solve_min_max_affine(MinMaxProblem(np.eye(2), x, B))
    assert abs(rep.value - grid) <= 1e-4
    assert rep.value == pytest.approx(1, abs=1e-8)
    assert abs(rep.primal[0]) <= 1e-6


def test_min_max_multipliers(rng):
    for _ in range(10):
        F = cgauss(rng, 6, 3)
        x = cgauss(rng, 3)
        B = cgauss(rng, 3, 1)
        rep = solve_min_max_affine(MinMaxProblem(F, x, B))
        assert np.all(rep.dual >= 0) and rep.dual.sum() == pytest.approx(1)
        mods = np.abs(F @ (x - B @ rep.primal))
        off = mods < rep.value - 1e-6
        assert np.all(rep.dual[off] <= 1e-6)
        # weak duality and annihilation of B
        assert np.real(rep.functional @ x) <= rep.value + 1e-9
        assert np.max(np.abs(rep.functional @ B)) <= 1e-6
