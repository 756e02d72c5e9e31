import numpy as np
import pytest

from cpxpoly.algebra import Subspace
from cpxpoly.approx import (ApproxInstance, UniquenessReport, alpha_probe, alpha_probe_points,
                            best_approximation, certify, certify_adjoint, certify_l1,
                            estimate_alpha_constant, general_2strong_check, smarzewski_constant)
from cpxpoly.errors import DomainError, PreconditionViolated, PrerequisiteFailed
from cpxpoly.norms import LpNorm, PolytopeNorm, l1, linf, norm_eval

import mpmath

U = np.array([0, 0, -1j, 1j])
V = np.array([1j, -1j, 1 - 1j, 1 + 1j])
D1 = np.array([1, -1, 1j, -1j])


@pytest.fixture
def counterexample():
    return ApproxInstance(linf(4), Subspace.from_span([U, V]), np.ones(4))


@pytest.fixture
def l1_example():
    return ApproxInstance(l1(4), Subspace.from_span([D1]), np.ones(4))


def _l1_alpha2_limit_oracle():
    # ((2 + 2 sqrt(1 + t^2))^2 - 16) / (4 t)^2 at t = 1e-30, 80 digits
    with mpmath.workdps(80):
        t = mpmath.mpf("1e-30")
        return float(((2 + 2 * mpmath.sqrt(1 + t ** 2)) ** 2 - 16) / (4 * t) ** 2)


L1_ALPHA2_LIMIT = 0.5  # frozen from _l1_alpha2_limit_oracle


def test_instance_rejects_x_in_Y():
    with pytest.raises(DomainError):
        ApproxInstance(linf(2), Subspace.from_span([[1, 0]]), [2, 0])


def test_best_approximation_counterexample(counterexample):
    res = best_approximation(counterexample)
    assert res.distance == pytest.approx(1, abs=1e-8)
    assert np.allclose(res.y_star, 0, atol=1e-6)
    assert res.annihilation_residual < 1e-6


def test_best_approximation_l1_example(l1_example):
    res = best_approximation(l1_example)
    assert res.distance == pytest.approx(4, abs=1e-8)
    assert norm_eval(l1(4), res.y_star) <= 1e-6 or res.distance == pytest.approx(4)


def test_best_approximation_coordinate_split():
    res = best_approximation(ApproxInstance(l1(2), Subspace.from_span([[1, 0]]), [1, 1]))
    assert np.allclose(res.y_star, [1, 0], atol=1e-6)
    assert res.distance == pytest.approx(1, abs=1e-8)


def test_best_approximation_lp_dual_certificate():
    h = LpNorm(1.5, 3)
    res = best_approximation(ApproxInstance(h, Subspace.from_span([[1, 1, 0]]), [1, 0, 1]))
    assert res.value_residual < 1e-9 and res.annihilation_residual < 1e-7


def test_certify_adjoint_counterexample(counterexample):
    assert certify_adjoint(counterexample).status == "unique"


def test_certify_adjoint_nonunique():
    rep = certify_adjoint(ApproxInstance(linf(2), Subspace.from_span([[0, 1]]), [1, 0]))
    assert rep.status == "best-nonunique"
    w = rep.witness
    assert norm_eval(linf(2), np.array([1, 0]) - 0.5 * w / norm_eval(linf(2), w)) == pytest.approx(1)


def test_certify_adjoint_diagonal_two_strong():
    inst = ApproxInstance(linf(2), Subspace.from_span([[1, -1]]), [1, 1])
    rep = certify_adjoint(inst)
    assert rep.status == "two-strong" and rep.constant == pytest.approx(1)
    # direct check over a coefficient grid: |x - c y|^2 >= 1 + |c|^2 |y|^2
    s = np.linspace(-2, 2, 81)
    c = (s[:, None] + 1j * s[None, :]).ravel()
    lhs = np.maximum(np.abs(1 - c), np.abs(1 + c)) ** 2
    assert np.all(lhs >= 1 + rep.constant * np.abs(c) ** 2 - 1e-12)


def test_certify_l1_example(l1_example):
    rep = certify_l1(l1_example)
    assert rep.status == "two-strong" and rep.constant > 0


def test_certify_l1_real_nonunique():
    inst = ApproxInstance(l1(2), Subspace.from_span([[1, -1]]), [1, 1])
    assert certify_l1(inst).status == "best-nonunique"
    assert certify_l1(inst, real_mode=True).status == "best-nonunique"


def test_certify_l1_not_best():
    rep = certify_l1(ApproxInstance(l1(2), Subspace.from_span([[0, 1]]), [2, 1]))
    assert rep.status == "not-best"
    w = rep.witness / np.abs(rep.witness).max()
    assert abs(abs(w[1]) - 1) < 1e-9 and abs(w[0]) < 1e-9


def test_certify_dispatch(l1_example, counterexample):
    assert certify(l1_example).status == "two-strong"
    assert certify(counterexample).status == "unique"


def test_report_invariants():
    with pytest.raises(ValueError):
        UniquenessReport("two-strong", constant=None)
    with pytest.raises(ValueError):
        UniquenessReport("weird")


def test_general_check_on_real_instance():
    rep = general_2strong_check(ApproxInstance(linf(2), Subspace.from_span([[1, -1]]), [1, 1]))
    assert rep.status == "two-strong" and rep.constant > 0


def test_general_check_counterexample_not_real(counterexample):
    rep = general_2strong_check(counterexample)
    assert rep.status == "unique" and rep.details["check"] == "failed"
    assert rep.details["image_real"] is False


def test_general_check_needs_uniqueness():
    with pytest.raises(PrerequisiteFailed):
        general_2strong_check(ApproxInstance(linf(2), Subspace.from_span([[0, 1]]), [1, 0]))


def test_general_check_random_real_subspace(rng):
    # Y inside the kernel of a positive functional keeps x = 1 a best approximation
    f = rng.uniform(0.5, 1.5, 5)
    Y = Subspace.from_span(np.linalg.svd(f[None, :])[2][1:].T @ rng.standard_normal((4, 2)))
    inst = ApproxInstance(linf(5), Y, np.ones(5))
    rep = general_2strong_check(inst)
    assert rep.status == "two-strong"
    for _ in range(200):
        y = inst.Y.basis @ (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        y *= rng.uniform(0.01, 3) / norm_eval(linf(5), y)
        assert norm_eval(linf(5), inst.x - y) ** 2 >= 1 + rep.constant * norm_eval(linf(5), y) ** 2 - 1e-9


def test_smarzewski_examples():
    inst = ApproxInstance(linf(2), Subspace.from_span([[1, -1]]), [1, 1])
    r = smarzewski_constant(inst, [[1, 0], [0, 1]], [0.5, 0.5])
    assert r > 0
    with pytest.raises(PreconditionViolated):
        smarzewski_constant(ApproxInstance(linf(3), Subspace.from_span([[0, 0, 1]]), [1, 1, 0]),
                            [[1, 0, 0], [0, 1, 0]], [0.5, 0.5])


def test_counterexample_ratio_sequence(counterexample):
    ns = np.arange(1, 101)
    ys = [(1 / k - 1 / k ** 2) * U + V / k ** 2 for k in ns]
    probe = alpha_probe_points(counterexample, ys, 2.0, params=ns)
    assert np.max(np.abs(probe.ratios - 1 / (ns ** 2 + 1))) <= 1e-9
    assert probe.ratios[0] == pytest.approx(0.5)
    assert probe.verdict == "vanishing"
    r_hat, _ = estimate_alpha_constant(counterexample, 2.0, samples=500, extra_points=ys)
    assert r_hat <= 1 / (100 ** 2 + 1) + 1e-9


def test_l1_alpha_probes(l1_example):
    assert _l1_alpha2_limit_oracle() == pytest.approx(L1_ALPHA2_LIMIT, abs=1e-12)
    p15 = alpha_probe(l1_example, D1, 1.5)
    p2 = alpha_probe(l1_example, D1, 2.0)
    assert p15.verdict == "vanishing"
    assert p2.verdict == "bounded-below"
    assert p2.ratios[-1] == pytest.approx(L1_ALPHA2_LIMIT, abs=1e-5)
    exact = (2 + 2 * np.sqrt(1 + p2.ts ** 2)) ** 2
    assert np.max(np.abs(p2.powered_norms - exact) / exact) <= 1e-9


def test_l1_sampled_constant_dominates_certified(l1_example):
    cert = certify_l1(l1_example)
    r_hat, _ = estimate_alpha_constant(l1_example, 2.0, samples=2000, seed=3)
    assert r_hat >= cert.constant * (1 - 1e-6)


def test_alpha_one_far_points(counterexample, rng):
    # far from x the ratio is at least 1/2 by the triangle inequality
    for _ in range(20):
        y = counterexample.Y.basis @ (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        y *= 4 / norm_eval(linf(4), y) * rng.uniform(1, 5)
        p = alpha_probe_points(counterexample, [y], 1.0, exact=False)
        assert p.ratios[0] >= 0.5 - 1e-12


def test_probe_direction_must_lie_in_Y(l1_example):
    with pytest.raises(ValueError):
        alpha_probe(l1_example, [1, 0, 0, 0], 2.0)
