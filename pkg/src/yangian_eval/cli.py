"""Command line front end: ``yangian-eval verify --check ... --algebra ... --n ...``.

Exit codes: 0 when every identity holds, 1 when some identity was verified to
fail, 2 when the run could not be carried out (bad flags, unsupported backend,
backend disagreement).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import checker as ck
from .errors import LieViolation, NonCentralCasimir, W12Nonzero, YangianError
from .metric import make_metric
from .reps import (
    GeneratorMatrix,
    casimir_m2,
    fundamental_rep,
    graded_split,
    js_rep,
    load_rep,
    on_fock,
    r_as_quadratic,
    spinor_rep,
)
from .results import NONZERO, ZERO, CheckResult, ConstraintReport, EvaluationData, result_from
from .tensorspace import make_ipk, verify_ybe

CHECKS = ("ybe", "rll", "linear", "quadratic", "lie-resolution", "spin-conditions",
          "center", "fuse", "decompose", "charpoly")
REPS = ("fundamental", "spinor", "js", "r-quadratic", "free")
BACKENDS = ("symbolic", "matrix", "both")


# letter names for the second factor of a fused product
SECOND_NAMES = {"fundamental": {"name": "f"}, "spinor": {"name": "b"}, "js": {"x": "y", "d": "p"},
                "r-quadratic": {"name": "f"}}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    check: str
    algebra: str
    n: int
    rep: str
    backend: str
    fmt: str
    out: Optional[str]
    max_degree: Optional[int]
    relations: str
    order: int
    table: bool
    timing: bool

    def echo(self) -> Dict:
        return {"check": self.check, "algebra": self.algebra, "n": self.n, "rep": self.rep,
                "backend": self.backend, "format": self.fmt, "max_degree": self.max_degree,
                "relations": self.relations, "order": self.order}


@dataclass
class Rep:
    """What a check may need from a representation."""

    Gbar: Optional[GeneratorMatrix]
    G: GeneratorMatrix
    H: Optional[GeneratorMatrix]
    resolution: Optional[ck.Resolution] = None

    @property
    def quadratic(self) -> bool:
        return self.H is not None

    def lax(self) -> GeneratorMatrix:
        return ck.lax_operator(self.G, self.H)


# ---------------------------------------------------------------- reps
def _capped(mats: Sequence[Optional[GeneratorMatrix]], cap: Optional[int]):
    if cap is None:
        return list(mats)
    alg = next(m.algebra for m in mats if m is not None and m.algebra is not None)
    capped = alg.with_max_degree(cap)
    return [None if m is None else m.map(lambda x: x.lift(capped) if hasattr(x, "lift") else capped.scalar(x))
            for m in mats]


def base_matrices(cfg: RunConfig, metric, names: Optional[Dict] = None):
    """(G, H, linear?) straight from the builder, before any backend change."""
    names = names or {}
    rep = cfg.rep
    if rep == "fundamental":
        return fundamental_rep(metric, **names), None
    if rep == "spinor":
        return spinor_rep(metric, **names), None
    if rep == "js":
        return js_rep(metric, **names), None
    if rep == "r-quadratic":
        return r_as_quadratic(metric, **names)
    if rep == "free":
        return ck.free_pair(metric)
    if rep.startswith("file:"):
        G, H = load_rep(rep[5:])
        if G.metric.n != metric.n or G.metric.eps != metric.eps:
            raise UsageError(f"file declares {G.metric}, flags ask for {metric}")
        return G, H
    raise UsageError(f"unknown representation {rep!r}")


def build_rep(cfg: RunConfig, metric, realize: Callable, names: Optional[Dict] = None) -> Rep:
    G, H = base_matrices(cfg, metric, names)
    if G.algebra is not None:
        G, H = _capped([G, H], cfg.max_degree)
        G, H = realize(G, H)
    if cfg.rep == "js":
        res = ck.resolve_quadratic(G, cfg.relations, "k" if names else "g")
        return Rep(G, res.G, res.H, res)
    if H is None:
        return Rep(G, G, None)
    st = ck.quadratic_structure(G, H)
    return Rep(st["Gbar"], G, H)


def _symbolic(G, H):
    return G, H


def _matrix(G, H):
    return tuple(on_fock(G, H))


# ---------------------------------------------------------------- checks
def _ybe(cfg: RunConfig, metric, realize) -> ConstraintReport:
    rep = ConstraintReport()
    rep.add(verify_ybe(metric))
    I, P, K = make_ipk(metric)
    eps, n = metric.eps, metric.n
    rep.add(result_from("KP.PK", P * K - K * eps))
    rep.add(result_from("KP.KP", K * P - K * eps))
    rep.add(result_from("KP.K2", K * K - K * (n * eps)))
    rep.add(result_from("KP.P2", P * P - I))
    return rep


def _single(result: CheckResult) -> ConstraintReport:
    rep = ConstraintReport()
    rep.add(result)
    return rep


def _rll(cfg, metric, realize) -> ConstraintReport:
    r = build_rep(cfg, metric, realize)
    return _single(ck.verify_rll(r.lax()))


def _linear(cfg, metric, realize) -> ConstraintReport:
    r = build_rep(cfg, metric, realize)
    return ck.check_linear(r.G if not r.quadratic else r.Gbar)


def _quadratic(cfg, metric, realize) -> ConstraintReport:
    r = build_rep(cfg, metric, realize)
    H = r.H if r.H is not None else r.G.identity(0)
    return ck.check_quadratic(r.G, H)


def _lie_resolution(cfg, metric, realize) -> ConstraintReport:
    G, H = base_matrices(cfg, metric)
    if G.algebra is not None:
        G, H = _capped([G, H], cfg.max_degree)
        G, H = realize(G, H)
    Gbar = G if H is None else ck.quadratic_structure(G, H)["Gbar"]
    try:
        return ck.check_lie_resolution(Gbar, cfg.relations)
    except W12Nonzero:
        _, w = ck.compute_w12(Gbar)
        rep = ConstraintReport()
        rep.add(w.by_id("W12"))
        rep.flags.append("W12 is nonzero; the resolution does not apply")
        return rep
    except NonCentralCasimir as e:
        rep = ConstraintReport()
        rep.add(CheckResult("LR.M2_CENTRAL", NONZERO, ((), str(e))))
        return rep


def _spin(cfg, metric, realize) -> ConstraintReport:
    r = build_rep(cfg, metric, realize)
    try:
        return ck.check_spin_conditions(r.Gbar)
    except LieViolation:
        return _single(ck.check_lie(r.Gbar))


def _center(cfg, metric, realize) -> ConstraintReport:
    r = build_rep(cfg, metric, realize)
    L = r.lax()
    cf = ck.center_function(L)
    rep = cf.report
    one = r.G.one()
    u = ck._spectral(r.G._sample, ck.U)
    if r.quadratic:
        st = ck.quadratic_structure(r.G, r.H)
        _, pc = ck.product_relations(st, metric)
        expected = ck.center_closed_form(metric, 2, u=u, g=st["g"], h=st["h"], c26=pc["c26"], c28=pc["c28"])
    else:
        dg = graded_split(r.G)
        Gb = dg.antisym
        c13, _ = ck.proportional_part(Gb * Gb + Gb * metric.beta, "C163")
        expected = ck.center_closed_form(metric, 1, u=u, g=dg.trace_part, c13=c13)
    if cf.c is None:
        rep.add(CheckResult("CENTER.CLOSED_FORM", NONZERO, ((), "C(u) is not proportional to eps_ab")))
    else:
        rep.add(result_from("CENTER.CLOSED_FORM", cf.c - expected * one))
    rep.flags.append(f"c(u) = {cf.c}" if cf.c is not None else "c(u) undefined")
    return rep


def _fuse(cfg, metric, realize) -> ConstraintReport:
    if cfg.rep not in SECOND_NAMES:
        raise UsageError(f"fuse needs a built-in representation, got {cfg.rep!r}")
    sym = RunConfig(**{**cfg.__dict__, "backend": "symbolic"})
    L1 = build_rep(sym, metric, _symbolic).lax()
    L2 = build_rep(sym, metric, _symbolic, SECOND_NAMES[cfg.rep]).lax()
    F = ck.fuse(L1, L2)
    if realize is _matrix:
        (F,) = on_fock(F)
    rep = _single(ck.verify_rll(F))
    rep.results[0].id = "FUSE.RLL"
    return rep


def _decompose(cfg, metric, realize) -> ConstraintReport:
    G, H = base_matrices(cfg, metric)
    if H is None:
        H = G.identity(0)
    if realize is _matrix:
        G, H = _matrix(G, H)
    d = ck.decompose_rll(G, H, cfg.relations, classify=cfg.table)
    rep = ConstraintReport()
    rep.add(d.report.by_id("DECOMP.RECONSTRUCTION"))
    form = d.report.by_id("DECOMP.RLL2_DISPLAYED_FORM")
    rep.flags.append("displayed left side (with -G in the second product) "
                     + ("equals" if form.ok else "differs from") + " the RLL difference")
    rep.flags.extend(d.report.flags)
    for key, status in d.table.items():
        rep.flags.append(f"table {key}: {status}")
    return rep


def _charpoly(cfg, metric, realize) -> ConstraintReport:
    r = build_rep(cfg, metric, realize)
    Gb = r.Gbar
    rep = ConstraintReport()
    M = ck.trace_square(Gb)
    m2 = casimir_m2(Gb)
    if cfg.order == 2:
        coeffs = ck.char_poly(2, metric, m2)
        rep.add(result_from("CHARPOLY.2", ck.matrix_poly(Gb, coeffs)))
    else:
        coeffs = ck.char_poly(3, metric, M)
        rep.add(result_from("CHARPOLY.3", ck.chi_eval(Gb, M)))
    label = "m2" if cfg.order == 2 else "M"
    rep.flags.append(f"coefficients in {label}: " + ", ".join(str(c) for c in ck.char_poly(cfg.order, metric, label)))
    rep.centrals = EvaluationData(m2=ck._display(m2))
    return rep


RUNNERS = {"ybe": _ybe, "rll": _rll, "linear": _linear, "quadratic": _quadratic,
           "lie-resolution": _lie_resolution, "spin-conditions": _spin, "center": _center,
           "fuse": _fuse, "decompose": _decompose, "charpoly": _charpoly}


# ---------------------------------------------------------------- reporting
def report_json(cfg: RunConfig, rep: ConstraintReport, extra: Dict) -> Dict:
    out = {
        "config": cfg.echo(),
        "results": [r.to_json() for r in rep.results],
        "centrals": rep.centrals.to_json(),
        "flags": list(rep.flags),
        "verdict": ZERO if rep.all_zero else NONZERO,
    }
    out.update(extra)
    return out


def report_text(doc: Dict) -> str:
    c = doc["config"]
    lines = [f"check {c['check']} on {c['rep']} of {c['algebra']}({c['n']}), backend {c['backend']}"]
    for r in doc["results"]:
        line = f"  {r['id']}: {r['status']}"
        if r["witness"] is not None:
            line += f" at {r['witness']['indices']} -> {r['witness']['entry']}"
        lines.append(line)
    cent = {k: v for k, v in doc["centrals"].items() if v is not None}
    if cent:
        lines.append("centrals: " + ", ".join(f"{k} = {v}" for k, v in cent.items()))
    for f in doc.get("flags", []):
        lines.append(f"note: {f}")
    if "disagreements" in doc:
        lines.append(f"backend disagreements: {len(doc['disagreements'])}")
        for s in doc.get("single_backend", []):
            lines.append(f"only on {s['backend']} backend: {s['id']}")
    if "seconds" in doc:
        lines.append(f"seconds: {doc['seconds']}")
    lines.append(f"verdict: {doc['verdict']}")
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file and rename, so readers never see a partial
    report. Existing non-regular targets (devices, pipes) are written directly."""
    if os.path.exists(path) and not os.path.isfile(path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def compare_backends(a: ConstraintReport, b: ConstraintReport) -> Tuple[List[Dict], List[Dict]]:
    """Verdict mismatches, and ids only one backend could evaluate."""
    sa = {r.id: r.status for r in a.results}
    sb = {r.id: r.status for r in b.results}
    differ, single = [], []
    for key in sorted(set(sa) | set(sb)):
        if key in sa and key in sb:
            if sa[key] != sb[key]:
                differ.append({"id": key, "symbolic": sa[key], "matrix": sb[key]})
        else:
            single.append({"id": key, "backend": "symbolic" if key in sa else "matrix"})
    return differ, single


def execute(cfg: RunConfig) -> Tuple[Dict, int]:
    """Run one configuration; returns the report document and exit code."""
    metric = make_metric(cfg.algebra, cfg.n)
    runner = RUNNERS[cfg.check]
    start = time.perf_counter()
    extra: Dict = {}
    if cfg.backend == "symbolic":
        rep = runner(cfg, metric, _symbolic)
    elif cfg.backend == "matrix":
        rep = runner(cfg, metric, _matrix)
    else:
        rep = runner(cfg, metric, _symbolic)
        other = runner(cfg, metric, _matrix)
        extra["disagreements"], extra["single_backend"] = compare_backends(rep, other)
    if cfg.timing:
        extra["seconds"] = round(time.perf_counter() - start, 3)
    doc = report_json(cfg, rep, extra)
    if extra.get("disagreements"):
        return doc, 2
    return doc, 0 if rep.all_zero else 1


# ---------------------------------------------------------------- entry point
def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="yangian-eval",
                                description="Exact checks of orthogonal and symplectic Yangian evaluations.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run one check and write a report")
    v.add_argument("--check", required=True, choices=CHECKS)
    v.add_argument("--algebra", default="so", choices=("so", "sp"))
    v.add_argument("--n", type=int, default=3)
    v.add_argument("--rep", default=None,
                   help="fundamental, spinor, js, r-quadratic, free or file:<path>")
    v.add_argument("--backend", default="symbolic", choices=BACKENDS)
    v.add_argument("--out", default=None, help="report path (default: standard output)")
    v.add_argument("--format", dest="fmt", default="json", choices=("json", "text"))
    v.add_argument("--max-degree", type=int, default=None, help="word-length cap for normal forms")
    v.add_argument("--relations", default=ck.CORRECTED, choices=(ck.CORRECTED, ck.LITERAL),
                   help="central relations for lie-resolution, prefactors for decompose")
    v.add_argument("--order", type=int, default=3, choices=(2, 3), help="characteristic polynomial order")
    v.add_argument("--table", action="store_true", help="classify the reduction identities (decompose)")
    v.add_argument("--timing", action="store_true", help="include wall time in the report")
    return p


def _default_rep(check: str) -> str:
    return {"decompose": "free", "ybe": "fundamental", "lie-resolution": "js",
            "quadratic": "r-quadratic"}.get(check, "spinor")


def config_from(ns: argparse.Namespace) -> RunConfig:
    rep = ns.rep or _default_rep(ns.check)
    if rep not in REPS and not rep.startswith("file:"):
        raise UsageError(f"unknown representation {rep!r}")
    if ns.n < 1:
        raise UsageError("--n must be positive")
    if ns.max_degree is not None and ns.max_degree < 1:
        raise UsageError("--max-degree must be positive")
    return RunConfig(ns.check, ns.algebra, ns.n, rep, ns.backend, ns.fmt, ns.out, ns.max_degree,
                     ns.relations, ns.order, ns.table, ns.timing)


def main(argv: Optional[Sequence[str]] = None) -> int:
    p = parser()
    try:
        ns = p.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        cfg = config_from(ns)
        doc, code = execute(cfg)
    except (UsageError, YangianError, ValueError, OSError) as e:
        print(f"yangian-eval: error: {e}", file=sys.stderr)
        return 2
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n" if cfg.fmt == "json" else report_text(doc)
    if cfg.out:
        try:
            write_atomic(cfg.out, text)
        except OSError as e:
            print(f"yangian-eval: error: cannot write {cfg.out}: {e}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    if code == 2:
        print("yangian-eval: error: symbolic and matrix backends disagree", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
