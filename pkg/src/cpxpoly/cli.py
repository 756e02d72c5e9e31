"""Command-line interface: instance files, named example cases and probe tables.

Instance files are YAML (JSON is a subset).  A complex entry is written as a
two-element list [re, im]; a bare number is real.  Matrices are lists of rows.

    n: 4
    norm: {kind: facets, data: [[1, 0, 0, 0], ...]}      # or vertices / lp with p
    subspace: {span: [[0, 0, [0, -1], [0, 1]], ...]}     # or kernel: [...]
    x: [1, 1, 1, 1]
    y0: [...]                                            # optional direction / candidate
    projection: {g: [[...]], w: [[...]]}                 # optional, w given as a list of columns
"""

import argparse
import csv
import os
import sys
import time
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
import yaml

from . import approx, duality, projections
from .algebra import Subspace
from .errors import (CpxError, MaxIterations, ParseError, RetryExhausted, UnknownCase,
                     ValidationError)
from .norms import AdjointNorm, LpNorm, PolytopeNorm, dual_norm_eval, essentialize, linf, l1, norm_eval

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_MISMATCH, EXIT_NONCONVERGENCE = 0, 1, 2, 3, 4
CSV_COLUMNS = ["t", "ratio", "alpha", "verdict-flag"]


# ------------------------------------------------------------- instances

def _entry(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ParseError(f"{where}: boolean is not a number")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    raise ParseError(f"{where}: expected a number or [re, im], got {value!r}")


def _vector(value, where: str) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or not value:
        raise ParseError(f"{where}: expected a non-empty list")
    return np.array([_entry(v, f"{where}[{i}]") for i, v in enumerate(value)], dtype=complex)


def _matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or not value:
        raise ParseError(f"{where}: expected a non-empty list of rows")
    rows = [_vector(r, f"{where}[{i}]") for i, r in enumerate(value)]
    if len({r.size for r in rows}) != 1:
        raise ValidationError(f"{where}: rows have different lengths")
    return np.vstack(rows)


def _encode(z) -> Any:
    if isinstance(z, np.ndarray):
        return [_encode(v) for v in z]
    z = complex(z)
    return float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)]


@dataclass
class InstanceFile:
    n: int
    norm_kind: str
    norm_data: Optional[np.ndarray] = None
    p: Optional[float] = None
    subspace_kind: Optional[str] = None
    subspace_data: Optional[np.ndarray] = None
    x: Optional[np.ndarray] = None
    y0: Optional[np.ndarray] = None
    proj_g: Optional[np.ndarray] = None
    proj_w: Optional[np.ndarray] = None

    def norm(self):
        if self.norm_kind == "vertices":
            return PolytopeNorm(self.norm_data)
        if self.norm_kind == "facets":
            return AdjointNorm(self.norm_data)
        return LpNorm(self.p, self.n)

    def subspace(self) -> Subspace:
        if self.subspace_kind is None:
            raise ValidationError("subspace: required for this command")
        if self.subspace_kind == "span":
            return Subspace.from_span(self.subspace_data.T)
        return Subspace.from_kernel(self.subspace_data)

    def instance(self) -> approx.ApproxInstance:
        if self.x is None:
            raise ValidationError("x: required for this command")
        return approx.ApproxInstance(self.norm(), self.subspace(), self.x)

    def projection(self) -> Optional[projections.ProjectionRep]:
        if self.proj_g is None:
            return None
        return projections.ProjectionRep(self.subspace(), self.proj_g, self.proj_w.T)

    def to_dict(self) -> dict:
        out: dict = {"n": self.n, "norm": {"kind": self.norm_kind}}
        if self.norm_kind == "lp":
            out["norm"]["p"] = self.p
        else:
            out["norm"]["data"] = _encode(self.norm_data)
        if self.subspace_kind:
            out["subspace"] = {self.subspace_kind: _encode(self.subspace_data)}
        for key in ("x", "y0"):
            if getattr(self, key) is not None:
                out[key] = _encode(getattr(self, key))
        if self.proj_g is not None:
            out["projection"] = {"g": _encode(self.proj_g), "w": _encode(self.proj_w)}
        return out

    def equals(self, other: "InstanceFile") -> bool:
        def same(a, b):
            if a is None or b is None:
                return a is b
            return a.shape == b.shape and np.array_equal(a, b)
        return (self.n == other.n and self.norm_kind == other.norm_kind and self.p == other.p
                and self.subspace_kind == other.subspace_kind
                and all(same(getattr(self, k), getattr(other, k))
                        for k in ("norm_data", "subspace_data", "x", "y0", "proj_g", "proj_w")))


def instance_from_dict(doc: Any) -> InstanceFile:
    if not isinstance(doc, dict):
        raise ParseError("top level: expected a mapping")
    if "n" not in doc or not isinstance(doc["n"], int) or doc["n"] < 1:
        raise ParseError("n: expected a positive integer")
    n = doc["n"]
    nd = doc.get("norm")
    if not isinstance(nd, dict) or nd.get("kind") not in ("vertices", "facets", "lp"):
        raise ParseError("norm.kind: expected one of vertices, facets, lp")
    inst = InstanceFile(n=n, norm_kind=nd["kind"])
    if inst.norm_kind == "lp":
        if not isinstance(nd.get("p"), (int, float)):
            raise ParseError("norm.p: expected a number")
        inst.p = float(nd["p"])
    else:
        inst.norm_data = _matrix(nd.get("data"), "norm.data")
        if inst.norm_data.shape[1] != n:
            raise ValidationError(f"norm.data: rows have length {inst.norm_data.shape[1]}, n = {n}")
    if "subspace" in doc:
        sd = doc["subspace"]
        if not isinstance(sd, dict) or len(sd) != 1 or next(iter(sd)) not in ("span", "kernel"):
            raise ParseError("subspace: expected exactly one of span, kernel")
        inst.subspace_kind = next(iter(sd))
        inst.subspace_data = _matrix(sd[inst.subspace_kind], f"subspace.{inst.subspace_kind}")
        if inst.subspace_data.shape[1] != n:
            raise ValidationError(f"subspace.{inst.subspace_kind}: vectors must have length {n}")
    for key in ("x", "y0"):
        if key in doc:
            v = _vector(doc[key], key)
            if v.size != n:
                raise ValidationError(f"{key}: length {v.size}, n = {n}")
            setattr(inst, key, v)
    if "projection" in doc:
        pd = doc["projection"]
        if not isinstance(pd, dict) or "g" not in pd or "w" not in pd:
            raise ParseError("projection: expected g and w")
        inst.proj_g = _matrix(pd["g"], "projection.g")
        inst.proj_w = _matrix(pd["w"], "projection.w")
        if inst.proj_g.shape != inst.proj_w.shape or inst.proj_g.shape[1] != n:
            raise ValidationError("projection: g and w must both be d x n")
    # enforce type invariants at load time
    inst.norm()
    if inst.subspace_kind:
        inst.subspace()
    if inst.proj_g is not None:
        inst.projection()
    return inst


def parse_instance(path: str) -> InstanceFile:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ParseError(f"{path}{loc}: {exc}") from exc
    return instance_from_dict(doc)


def serialize_instance(inst: InstanceFile) -> str:
    return yaml.safe_dump(inst.to_dict(), sort_keys=False)


# --------------------------------------------------------------- reports

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def make_report(command: str, status: str, numbers=None, witnesses=None, provenance=None) -> dict:
    return {"command": command, "status": status, "numbers": numbers or {},
            "witnesses": witnesses or {}, "provenance": provenance or {}}


def write_csv(path: str, report: approx.AlphaProbeReport):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(CSV_COLUMNS)
        flag = 1 if report.verdict == "vanishing" else 0
        for t, r in zip(report.ts, report.ratios):
            wr.writerow([repr(float(t)), repr(float(r)), report.alpha, flag])


def _uniq_numbers(rep: approx.UniquenessReport) -> dict:
    return {"constant": rep.constant, "label": rep.label,
            **{k: v for k, v in rep.details.items() if not isinstance(v, np.ndarray)}}


# ----------------------------------------------------------------- cases

def _case_linf4(args):
    u = np.array([0, 0, -1j, 1j])
    v = np.array([1j, -1j, 1 - 1j, 1 + 1j])
    inst = approx.ApproxInstance(linf(4), Subspace.from_span([u, v]), np.ones(4))
    cert = approx.certify_adjoint(inst, args.tol)
    ns = np.arange(1, 101)
    ys = [(1 / k - 1 / k ** 2) * u + v / k ** 2 for k in ns]
    probe = approx.alpha_probe_points(inst, ys, 2.0, params=ns)
    err = float(np.max(np.abs(probe.ratios - 1 / (ns ** 2 + 1))))
    ok = err <= 1e-9 and cert.status == "unique"
    nums = {"certify_status": cert.status, "max_ratio_error": err,
            "ratio_n1": probe.ratios[0], "ratio_n100": probe.ratios[-1]}
    return ok, nums, probe


def _case_l1(args):
    d = np.array([1, -1, 1j, -1j])
    inst = approx.ApproxInstance(l1(4), Subspace.from_span([d]), np.ones(4))
    cert = approx.certify_l1(inst, tol=args.tol, seed=args.seed)
    p15 = approx.alpha_probe(inst, d, 1.5)
    p2 = approx.alpha_probe(inst, d, 2.0)
    curve_err = float(np.max(np.abs(p2.powered_norms - (2 + 2 * np.sqrt(1 + p2.ts ** 2)) ** 2)
                             / (2 + 2 * np.sqrt(1 + p2.ts ** 2)) ** 2))
    ok = (cert.status == "two-strong" and cert.constant > 0 and p15.verdict == "vanishing"
          and p2.verdict == "bounded-below" and curve_err <= 1e-9)
    nums = {"certify_status": cert.status, "constant": cert.constant,
            "verdict_alpha_1.5": p15.verdict, "verdict_alpha_2": p2.verdict,
            "curve_rel_error": curve_err, "ratio_limit_alpha_2": p2.ratios[-1]}
    return ok, nums, p2


def _case_hyperplane(args):
    f = np.ones(3) / 3
    P, lam = projections.linfty_hyperplane_minimal(f)
    nP = projections.projection_norm(P, linf(3))
    cm = projections.chalmers_metcalf(P, linf(3), args.tol)
    probe = projections.proj_alpha_probe(linf(3), P.Y, P, np.array([1.0, -1.0, 0.0]), 1.9)
    ok = (abs(lam - 1 / 3) <= 1e-12 and abs(nP - 4 / 3) <= 1e-9
          and bool(np.all(cm.weights > 0)) and abs(cm.trace - 4 / 3) <= 1e-6
          and probe.verdict == "vanishing")
    nums = {"lambda": lam, "projection_norm": nP, "cm_weights": cm.weights,
            "cm_trace": cm.trace, "cm_flags": cm.flags, "verdict_alpha_1.9": probe.verdict}
    return ok, nums, probe


def _case_lp(args):
    h = LpNorm(1.5, 2)
    slopes, last = {}, None
    for a in (1.0, 2.0, 2.5):
        last = projections.onedim_alpha_probe(h, [1, 0], [1, 0], [0, 1], a)
        slopes[a] = last.details["loglog_slope"]
    ok = all(abs(s - (h.q - a)) <= 0.05 for a, s in slopes.items())
    nums = {"q": h.q, "slopes": {str(a): s for a, s in slopes.items()}}
    return ok, nums, last


def _case_witness(args):
    rng = np.random.default_rng(args.seed)
    V = essentialize(rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2)))
    P = PolytopeNorm(V)
    fam = duality.non_self_duality_witness(P, 8, seed=args.seed)
    dn = [dual_norm_eval(P, f) for f in fam.functionals]
    ok = (len(fam.functionals) == 8 and max(abs(d - 1) for d in dn) <= 1e-8
          and duality.family_is_pairwise_nonproportional(fam))
    nums = {"vertices": V.shape[0], "pair": list(fam.pair), "dual_norms": dn,
            "delta": fam.delta}
    return ok, nums, None


CASES = {
    "linf4-counterexample": _case_linf4,
    "l1-alpha2": _case_l1,
    "linf-hyperplane": _case_hyperplane,
    "lp-1dim": _case_lp,
    "duality-witness": _case_witness,
}


def run_case(name: str, args=None):
    """Run a named example.  Returns (report, passed, probe report or None)."""
    if name not in CASES:
        raise UnknownCase(f"unknown case {name!r}; choose from {', '.join(CASES)}")
    args = args or argparse.Namespace(tol=1e-8, seed=0, samples=10 ** 4)
    t0 = time.perf_counter()
    ok, nums, probe = CASES[name](args)
    rep = make_report(f"run-case {name}", "pass" if ok else "fail", nums,
                      provenance={"tol": args.tol, "seed": args.seed,
                                  "seconds": time.perf_counter() - t0})
    return rep, ok, probe


# -------------------------------------------------------------- commands

def _cmd_norm_eval(args, inst):
    return make_report("norm-eval", "ok", {"norm": norm_eval(inst.norm(), inst.x, args.tol)})


def _cmd_dual_eval(args, inst):
    return make_report("dual-eval", "ok", {"dual_norm": dual_norm_eval(inst.norm(), inst.x, args.tol)})


def _cmd_best_approx(args, inst):
    res = approx.best_approximation(inst.instance(), args.tol)
    return make_report("best-approx", "ok",
                       {"distance": res.distance, "value_residual": res.value_residual,
                        "annihilation_residual": res.annihilation_residual},
                       {"y_star": res.y_star, "dual_certificate": res.dual_cert},
                       {"iterations": res.iterations})


def _cmd_certify(args, inst):
    rep = approx.certify(inst.instance(), args.tol, args.seed)
    return make_report("certify", rep.status, _uniq_numbers(rep),
                       {"witness": rep.witness} if rep.witness is not None else {})


def _cmd_strong_constant(args, inst):
    rep = approx.general_2strong_check(inst.instance(), args.tol)
    return make_report("strong-constant", rep.status, _uniq_numbers(rep))


def _cmd_alpha_probe(args, inst):
    if inst.y0 is None:
        raise ValidationError("y0: alpha-probe needs a direction in y0")
    P = inst.projection()
    if P is not None:
        probe = projections.proj_alpha_probe(inst.norm(), P.Y, P, inst.y0, args.alpha)
    else:
        probe = approx.alpha_probe(inst.instance(), inst.y0, args.alpha)
    if args.csv:
        write_csv(args.csv, probe)
    return make_report("alpha-probe", probe.verdict,
                       {"alpha": probe.alpha, "first_ratio": probe.ratios[0],
                        "last_ratio": probe.ratios[-1]})


def _cmd_min_proj(args, inst):
    P, value = projections.minimal_projection_search(inst.norm(), inst.subspace(), args.tol,
                                                     method=args.method, seed=args.seed)
    return make_report("min-proj", "ok", {"projection_norm": value}, {"g": P.g, "w": P.w.T},
                       {"method": args.method})


def _projection_or_search(args, inst):
    P = inst.projection()
    if P is None:
        P, _ = projections.minimal_projection_search(inst.norm(), inst.subspace(), args.tol)
    return P


def _cmd_cm(args, inst):
    P = _projection_or_search(args, inst)
    cm = projections.chalmers_metcalf(P, inst.norm(), args.tol, seed=args.seed)
    return make_report("cm", "ok", {"trace": cm.trace, "projection_norm": cm.projection_norm,
                                    "weights": cm.weights,
                                    "invariance_residual": cm.invariance_residual, **cm.flags},
                       {"pairs": [{"x": p.x, "f": p.f} for p in cm.pairs]})


def _cmd_realify(args, inst):
    P = _projection_or_search(args, inst)
    cm = projections.chalmers_metcalf(P, inst.norm(), args.tol, seed=args.seed)
    rep = projections.realify_and_certify(inst.norm(), P.Y, P, cm, args.tol,
                                          samples=min(args.samples, 2000), seed=args.seed)
    return make_report("realify-certify", rep.status, _uniq_numbers(rep))


def _cmd_witness(args, inst):
    h = inst.norm()
    if not isinstance(h, PolytopeNorm):
        raise ValidationError("norm.kind: duality-witness needs vertices")
    fam = duality.non_self_duality_witness(PolytopeNorm(essentialize(h.vertices)), args.K,
                                           seed=args.seed)
    return make_report("duality-witness", "ok", {"pair": list(fam.pair), "delta": fam.delta},
                       {"functionals": fam.functionals, "ts": fam.ts})


COMMANDS = {
    "norm-eval": _cmd_norm_eval, "dual-eval": _cmd_dual_eval,
    "best-approx": _cmd_best_approx, "certify": _cmd_certify,
    "strong-constant": _cmd_strong_constant, "alpha-probe": _cmd_alpha_probe,
    "min-proj": _cmd_min_proj, "cm": _cmd_cm, "realify-certify": _cmd_realify,
    "duality-witness": _cmd_witness,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="solver tolerance (default 1e-8)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--samples", type=int, default=10 ** 4,
                        help="sample count for sampled constants (default 10000)")
    common.add_argument("--csv", default=None, help="write the probe table to this path")
    parser = _Parser(prog="cpxpoly", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        p.add_argument("instance", help="YAML or JSON instance file")
        if name == "alpha-probe":
            p.add_argument("--alpha", type=float, required=True)
        if name == "min-proj":
            p.add_argument("--method", choices=["socp", "subgradient"], default="socp")
        if name == "duality-witness":
            p.add_argument("--K", type=int, default=8)
    p = sub.add_parser("run-case", parents=[common])
    p.add_argument("name", help="one of " + ", ".join(CASES))
    return parser


def _threads() -> Optional[int]:
    raw = os.environ.get("CPX_APPROX_THREADS")
    if raw is None:
        return None
    try:
        val = int(raw)
    except ValueError:
        raise ValidationError("CPX_APPROX_THREADS must be a positive integer")
    if val < 1:
        raise ValidationError("CPX_APPROX_THREADS must be a positive integer")
    return val


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = _threads()
        if args.command == "run-case":
            rep, ok, probe = run_case(args.name, args)
            code = EXIT_OK if ok else EXIT_MISMATCH
            if args.csv and probe is not None:
                write_csv(args.csv, probe)
        else:
            inst = parse_instance(args.instance)
            rep = COMMANDS[args.command](args, inst)
            rep["provenance"].update(tol=args.tol, seed=args.seed, samples=args.samples)
            code = EXIT_OK
        rep["provenance"]["threads"] = threads
        sys.stdout.write(yaml.safe_dump(_plain(rep), sort_keys=False))
        return code
    except (MaxIterations, RetryExhausted) as exc:
        sys.stderr.write(f"solver did not converge: {exc}\n")
        return EXIT_NONCONVERGENCE
    except (OSError, ValueError, CpxError) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
