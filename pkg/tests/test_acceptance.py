"""Acceptance runner: one test per criterion, each printing a single PASS/FAIL line."""

import time

import numpy as np
import pytest

from cpxpoly.algebra import Subspace, modulus_lower_bounds, phase_normalize
from cpxpoly.approx import ApproxInstance, alpha_probe, alpha_probe_points, certify_adjoint, certify_l1
from cpxpoly.convexcore import SumModuliProblem, solve_min_sum_moduli
from cpxpoly.duality import family_is_pairwise_nonproportional, non_self_duality_witness
from cpxpoly.norms import (AdjointNorm, LpNorm, PolytopeNorm, dual_norm_eval, essentialize, l1,
                           linf, norm_many)
from cpxpoly.projections import (chalmers_metcalf, linfty_hyperplane_minimal,
                                 minimal_projection_search, onedim_alpha_probe, operator_norm,
                                 proj_alpha_probe, real_polar_vertices,
                                 _hyperplane_terms)

from conftest import brute_min_sum_moduli, cgauss


def _report(capsys, number, title, checks, elapsed, budget):
    checks = dict(checks)
    checks[f"runtime < {budget:g} s"] = elapsed < budget
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    line = f"criterion {number} {title}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s)"
    if failed:
        line += " failed: " + "; ".join(failed)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_criterion_1_linf4_counterexample(capsys):
    t0 = time.perf_counter()
    u = np.array([0, 0, -1j, 1j])
    v = np.array([1j, -1j, 1 - 1j, 1 + 1j])
    inst = ApproxInstance(linf(4), Subspace.from_span([u, v]), np.ones(4))
    ns = np.arange(1, 101)
    ys = [(1 / k - 1 / k ** 2) * u + v / k ** 2 for k in ns]
    probe = alpha_probe_points(inst, ys, 2.0, params=ns)
    err = float(np.max(np.abs(probe.ratios - 1 / (ns ** 2 + 1))))
    status = certify_adjoint(inst).status
    _report(capsys, 1, "linf4 counterexample",
            {f"ratio error {err:.1e} <= 1e-9": err <= 1e-9, f"status {status}": status == "unique"},
            time.perf_counter() - t0, 1.0)


def test_criterion_2_l1_example(capsys):
    t0 = time.perf_counter()
    d = np.array([1, -1, 1j, -1j])
    inst = ApproxInstance(l1(4), Subspace.from_span([d]), np.ones(4))
    cert = certify_l1(inst)
    p15 = alpha_probe(inst, d, 1.5)
    p2 = alpha_probe(inst, d, 2.0)
    ts = np.linspace(0.01, 0.99, 50)
    curve_ok = True
    for a in (1.5, 2.0):
        rep = alpha_probe(inst, d, a, t_list=ts[::-1])
        exact = (2 + 2 * np.sqrt(1 + rep.ts ** 2)) ** a
        curve_ok &= bool(np.max(np.abs(rep.powered_norms - exact)) <= 1e-9)
    _report(capsys, 2, "l1 example", {
        f"status {cert.status}": cert.status == "two-strong" and cert.constant > 0,
        f"alpha 1.5 {p15.verdict}": p15.verdict == "vanishing",
        f"alpha 2 {p2.verdict}": p2.verdict == "bounded-below",
        "exact curve to 1e-9": curve_ok,
    }, time.perf_counter() - t0, 1.0)


def _random_simplex_point(rng, n):
    while True:
        f = rng.dirichlet(np.ones(n))
        if np.all(f < 0.5) and np.all(f > 0):
            return f


def test_criterion_3_linf_hyperplanes(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    bad = {"equal-maximum": 0, "search": 0, "cm weights": 0, "cm trace": 0,
           "alpha 1.9": 0, "alpha 2": 0}
    for i in range(100):
        n = (3, 4, 5)[i % 3]
        f = _random_simplex_point(rng, n)
        P, lam = linfty_hyperplane_minimal(f)
        mult, g = phase_normalize(f)
        terms = _hyperplane_terms(g, (mult.conj() * P.w[:, 0]))
        bad["equal-maximum"] += np.max(np.abs(terms - (1 + lam))) > 1e-9
        _, value = minimal_projection_search(linf(n), P.Y)
        bad["search"] += abs(value - (1 + lam)) > 1e-4
        cm = chalmers_metcalf(P, linf(n))
        bad["cm weights"] += not np.all(cm.weights > 0)
        bad["cm trace"] += abs(cm.trace - (1 + lam)) > 1e-6
        u = rng.standard_normal(n)
        u -= f * (f @ u) / (f @ f)
        u /= np.abs(u).max()
        bad["alpha 1.9"] += proj_alpha_probe(linf(n), P.Y, P, u, 1.9).verdict != "vanishing"
        bad["alpha 2"] += proj_alpha_probe(linf(n), P.Y, P, u, 2.0).verdict != "bounded-below"
    _report(capsys, 3, "linf hyperplane closed form",
            {f"{k} failures {v}": v == 0 for k, v in bad.items()},
            time.perf_counter() - t0, 30.0)


def test_criterion_4_lp_rank_one(capsys):
    t0 = time.perf_counter()
    h = LpNorm(1.5, 3)
    checks = {}
    for a in (1.0, 2.0, 2.5):
        rep = onedim_alpha_probe(h, [1, 0, 0], [1, 0, 0], [0, 1, 0], a,
                                 t_list=10.0 ** -np.arange(1, 7))
        s = rep.details["loglog_slope"]
        checks[f"alpha {a}: slope {s:.4f} vs {h.q - a:g}"] = abs(s - (h.q - a)) <= 0.05
    _report(capsys, 4, "lp rank-one projections", checks, time.perf_counter() - t0, 1.0)


def test_criterion_5_non_self_duality(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    failures = 0
    for n in (2, 3):
        for _ in range(50):
            V = essentialize(cgauss(rng, n + 3, n))
            P = PolytopeNorm(V)
            fam = non_self_duality_witness(P, 8, seed=int(rng.integers(1 << 30)))
            k, l = fam.pair
            ok = len(fam.functionals) == 8 and family_is_pairwise_nonproportional(fam)
            top = 0.0
            for f in fam.functionals:
                ok &= abs(dual_norm_eval(P, f) - 1) <= 1e-8
                mods = np.abs(V @ f)
                ok &= abs(mods[k] - 1) <= 1e-9 and abs(mods[l] - 1) <= 1e-9
                others = np.delete(mods, [k, l])
                top = max(top, others.max() if others.size else 0.0)
            ok &= top < 1
            failures += not ok
    _report(capsys, 5, "non-self-duality witnesses", {f"failures {failures}": failures == 0},
            time.perf_counter() - t0, 10.0)


def test_criterion_6_property_suites(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    checks = {}
    # modulus inequalities
    x = cgauss(rng, 10 ** 5)
    y = cgauss(rng, 10 ** 5)
    t = rng.random(10 ** 5)
    viol = 0
    for xi, yi, ti in zip(x, y, t):
        lin, _ = modulus_lower_bounds(xi, yi)
        viol += abs(xi - yi) < lin - 1e-12 * (abs(xi) + abs(yi))
        if abs(ti * yi) <= abs(xi) / 2:
            _, quad = modulus_lower_bounds(xi, yi, t=ti)
            viol += abs(xi - ti * yi) < quad - 1e-12 * (abs(xi) + abs(yi))
    checks[f"modulus inequality violations {viol}"] = viol == 0
    # |x + iy| >= |x| for real x, y
    worst = 0.0
    for i in range(20):
        n = 2 + i % 2
        R = rng.standard_normal((n + 1 + i % 3, n))
        X = rng.standard_normal((n, 10 ** 4))
        Yr = rng.standard_normal((n, 10 ** 4))
        facet = AdjointNorm(R)
        gap = norm_many(facet, X + 1j * Yr) - norm_many(facet, X.astype(complex))
        worst = min(worst, float(gap.min()))
        # real vertex norm: |x| is exact through the real polar vertices
        V = R[: n + 1]
        real_norm = np.max(np.abs(real_polar_vertices(V) @ X), axis=0)
        gap = norm_many(PolytopeNorm(V), X + 1j * Yr) - real_norm
        worst = min(worst, float(gap.min()))
    checks[f"real-part bound worst {worst:.1e} >= -1e-7"] = worst >= -1e-7
    # vertex and facet routes
    route = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 4))
        dom = PolytopeNorm(cgauss(rng, n + 2, n))
        cod = AdjointNorm(cgauss(rng, n + 1, n))
        L = cgauss(rng, n, n)
        a = operator_norm(L, dom, cod, route="vertex")
        b = operator_norm(L, dom, cod, route="facet")
        route = max(route, abs(a - b) / max(1.0, a))
    checks[f"route disagreement {route:.1e} <= 1e-7"] = route <= 1e-7
    # three-dimensional projections with lambda > 1
    verdicts, seed = [], 0
    while len(verdicts) < 20:
        r = np.random.default_rng(seed)
        seed += 1
        h = PolytopeNorm(essentialize(cgauss(r, 6, 3)))
        Y = Subspace.from_kernel([cgauss(r, 3)])
        P, value = minimal_projection_search(h, Y)
        if value <= 1.001:
            continue
        D = (Y.basis @ cgauss(r, 2))[:, None]
        verdicts.append(proj_alpha_probe(h, Y, P, D, 2.0).verdict)
    nb = sum(v == "bounded-below" for v in verdicts)
    checks[f"3-dim alpha 2 bounded-below {nb}/20"] = nb == 20
    _report(capsys, 6, "property suites", checks, time.perf_counter() - t0, 60.0)


def test_criterion_7_solver_oracles(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    sq_err, bf_err = 0.0, 0.0
    for i in range(1000):
        n = int(rng.integers(1, 4))
        A = cgauss(rng, n, n)
        b = cgauss(rng, n)
        exact = float(np.sum(np.abs(np.linalg.solve(A, b))))
        got = solve_min_sum_moduli(SumModuliProblem(A, b)).value
        sq_err = max(sq_err, abs(got - exact) / max(1.0, exact))
        N = n + int(rng.integers(0, 3))
        A = cgauss(rng, n, N)
        got = solve_min_sum_moduli(SumModuliProblem(A, b)).value
        oracle = brute_min_sum_moduli(A, b)
        bf_err = max(bf_err, abs(got - oracle) / max(1.0, oracle))
    _report(capsys, 7, "solver oracle equivalence", {
        f"square error {sq_err:.1e} <= 1e-8": sq_err <= 1e-8,
        f"brute-force error {bf_err:.1e} <= 1e-6": bf_err <= 1e-6,
    }, time.perf_counter() - t0, 30.0)
