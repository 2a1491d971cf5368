"""Command-line entry point: model listings, reports, the torus solver, verify-all.

Exit codes: 0 pass, 1 verification failure (or nonzero obstruction),
2 usage error, 3 solver resonance.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import sympy

from . import __version__
from .complex import FormModel, cohomology_table, cokernel_complex, top_degree_check
from .exterior import ModelError
from .field import FieldMismatchError
from .fourier import (
    FourierSeries,
    ObstructionError,
    ResonanceError,
    SlopeError,
    SlopeSpec,
    denominator_law,
    diophantine_profile,
    min_denominator,
    solve_cohomological,
)
from .identities import element_identities, matrix_identities
from .models import (
    DEFAULT_GENUS,
    PUBLISHED_TABLES,
    ModelFileError,
    ModelSpec,
    derive_operator_tables,
    foliation_ideal_check,
    instantiate,
    is_single_jordan_cell,
    jordan_profile,
    basic_powers_check,
    model_to_dict,
    registry,
)
from .sequences import seven_term_sequence, cokernel_long_sequence, surface_index_profile, basic_h1_comparison, corrupt_map, verify_exactness

SCHEMA_VERSION = "1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESONANCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def to_jsonable(x):
    """Recursively convert report values to plain JSON types."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, sympy.Basic):
        if x == sympy.oo:
            return "infinite"
        if x.is_Integer:
            return int(x)
        return str(x)
    if hasattr(x, "as_dict"):
        return to_jsonable(x.as_dict())
    return str(x)


def render_text(report: dict, indent: int = 0) -> str:
    """Indented key/value rendering carrying the same values as the JSON."""
    lines = []
    pad = "  " * indent
    for k, v in report.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(render_text(v, indent + 1))
        elif isinstance(v, list) and v and all(isinstance(e, dict) for e in v):
            lines.append(f"{pad}{k}:")
            for j, e in enumerate(v):
                lines.append(f"{pad}  [{j}]")
                lines.append(render_text(e, indent + 2))
        else:
            lines.append(f"{pad}{k}: {json.dumps(v, ensure_ascii=False)}")
    return "\n".join(x for x in lines if x)


def emit(report: dict, fmt: str, out: str | None = None) -> None:
    report = to_jsonable(report)
    if fmt == "json":
        text = json.dumps(report, indent=2, ensure_ascii=False)
    else:
        text = render_text(report)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


# ---------------------------------------------------------------------------
# model report


def _model_from_args(args) -> FormModel:
    if getattr(args, "model_file", None):
        return instantiate(ModelSpec("custom-from-file", path=args.model_file))
    kind = args.model
    if kind not in registry():
        raise UsageError(f"unknown model {kind!r}; available: {', '.join(sorted(registry()))}")
    params = {}
    if kind in ("torus", "flat-symplectic-torus") and args.n is not None:
        params["n"] = args.n
    if kind.startswith("sl2"):
        params["genus"] = args.genus
    try:
        return instantiate(ModelSpec(kind, **params))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def describe_model(m: FormModel) -> dict:
    names = m.names
    d_lines = [f"d{names[i]} = {m.format(v) if v else '0'}" for i, v in enumerate(m.calc.d_values)]
    i_lines = [f"iX({names[i]}) = {m.field.format(v)}" for i, v in enumerate(m.calc.iX_values)]
    out = {"name": m.name, "generators": list(names), "d": d_lines, "iX": i_lines,
           "symbols": list(m.field.symbols), "betti": list(m.betti) if m.betti else None,
           "computes_de_rham": m.computes_de_rham}
    if m.genus is not None:
        out["genus"] = m.genus
    if m.imported_facts:
        out["imported_facts"] = list(m.imported_facts)
    return out


def _sequence_summary(r) -> dict:
    out = {
        "terms": [{"label": t.label, "dim": t.dim, "provenance": t.provenance} for t in r.terms],
        "nodes": r.nodes,
        "alternating_sum": r.alternating_sum,
        "passed": r.passed,
    }
    if r.fredholm:
        out["fredholm"] = {k: v.as_dict() for k, v in r.fredholm.items()}
    if r.constraints:
        out["constraints"] = r.constraints
    if r.notes:
        out["notes"] = r.notes
    return out


def model_report(m: FormModel, published: dict | None = None, fault: str | None = None) -> dict:
    """Every verification that applies to the model, with an overall verdict."""
    checks: dict[str, bool] = {}
    rep: dict = {"model": describe_model(m)}
    rep["cohomology"] = cohomology_table(m)

    p1 = top_degree_check(m)
    rep["top_degree"] = {"H^n_X": p1.top_relative_dim, "C^(n-1)_X": p1.cokernel_dim, "passed": p1.passed}
    checks["top_degree"] = p1.passed

    t1 = []
    for k in range(-1, m.n):
        r = seven_term_sequence(m, k)
        if fault == "sequence" and k == 0:
            r = corrupt_map(r, "h_*" if r.map("h_*").rank() else "j_*")
            if not r.map("j_*").rank() and not r.map("h_*").rank():
                r = corrupt_map(r, "d_*")
            verify_exactness(r)
        entry = {"k": k, **_sequence_summary(r),
                 "condensed": {"dims": r.condensed.dims, "nodes": r.condensed.nodes,
                               "passed": r.condensed.passed},
                 "condensed_agrees": r.extra["condensed_agrees"]}
        if "j_is_isomorphism" in r.extra:
            entry["j_is_isomorphism"] = r.extra["j_is_isomorphism"]
        ok = bool(r.passed and r.condensed.passed and r.extra["condensed_agrees"]
                  and r.extra.get("j_is_isomorphism", True))
        checks[f"seven_term[k={k}]"] = ok
        t1.append(entry)
    rep["seven_term"] = t1

    cc = cokernel_complex(m)
    rep["cokernel_complex"] = {"dims": cc.dims, "d_C_squared_zero": cc.squares_vanish,
                               "cohomology_dims_model": cc.cohomology_dims}
    checks["cokernel_complex"] = cc.squares_vanish

    t2 = cokernel_long_sequence(m)
    t2_out = _sequence_summary(t2)
    t2_out["H_C_dims"] = [t.dim for t in t2.terms if t.label.endswith("_C") and not t.label.startswith("H^-1")]
    ident = t2.extra.get("index_identity")
    if ident:
        t2_out["index_identity"] = {"lhs": ident["lhs"], "rhs": ident["rhs"], "holds": ident["holds"]}
    if "model_internal_passed" in t2.extra:
        t2_out["model_internal_passed"] = t2.extra["model_internal_passed"]
        checks["cokernel_sequence[model-internal]"] = bool(t2.extra["model_internal_passed"])
    rep["cokernel_sequence"] = t2_out
    if t2.passed is not None:
        checks["cokernel_sequence"] = bool(t2.passed)

    if m.betti is not None:
        c2 = basic_h1_comparison(m)
        rep["basic_h1_comparison"] = {k: v for k, v in c2.items()}
        if "matrix_agrees" in c2:
            checks["basic_h1_comparison"] = c2["matrix_agrees"]

    table_rows = (published or {}).get(m.name, PUBLISHED_TABLES.get(m.name))
    if table_rows:
        table = derive_operator_tables(m, table_rows)
        counts = table.counts()
        bad_pm = [d for d in table.diffs if d.unambiguous and d.status != "match"]
        rep["operator_table"] = {
            "counts": counts,
            "diffs": [{"op": d.op, "argument": list(d.argument), "expected": d.expected,
                       "derived": d.derived, "status": d.status, "printed": d.printed,
                       "literal_status": d.literal_status, "note": d.note}
                      for d in table.diffs if d.status != "match" or d.literal_status != "match"],
        }
        checks["operator_table"] = counts["mismatch"] == 0 and not bad_pm

    if m.name.startswith("sl2"):
        wp, w0 = m.generator("w+"), m.generator("w0")
        good = foliation_ideal_check(m, [wp])
        bad = foliation_ideal_check(m, [w0])
        rep["foliation_ideals"] = {"(w+)": good.passed, "(w0)": bad.passed}
        checks["foliation_ideals"] = good.passed and not bad.passed
        if "horocycle" in m.name:
            prof = jordan_profile(m.matrix("lie", 1))
            rep["lie_degree1_ranks"] = prof
            checks["single_jordan_cell"] = is_single_jordan_cell(m.matrix("lie", 1))

    if "symplectic_form" in m.extras:
        l2 = basic_powers_check(m)
        rep["basic_powers"] = {"rows": l2.rows, "passed": l2.passed}
        neg = basic_powers_check(m, m.generator("dt"))
        rep["basic_powers_negative_control"] = {"passed": neg.passed}
        checks["basic_powers"] = l2.passed and not neg.passed

    rep["checks"] = checks
    rep["passed"] = all(checks.values())
    return rep


def cmd_report(args) -> int:
    m = _model_from_args(args)
    rep = {"schema_version": SCHEMA_VERSION, "version": __version__,
           "parameters": {"model": m.name, "n": m.n, "genus": m.genus},
           **model_report(m)}
    emit(rep, args.format, args.out)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_models(args) -> int:
    if args.action == "list":
        out = {"models": {k: v for k, v in sorted(registry().items())}}
        emit(out, args.format)
        return EXIT_OK
    if not args.name:
        raise UsageError("models show needs a model name")
    if args.name not in registry():
        raise UsageError(f"unknown model {args.name!r}")
    args.model, args.model_file = args.name, None
    m = _model_from_args(args)
    emit({"model": describe_model(m), "file_form": model_to_dict(m)}, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# torus solver


def cmd_solve(args) -> int:
    try:
        alpha = SlopeSpec.parse(args.alpha)
    except SlopeError as exc:
        raise UsageError(str(exc)) from exc
    try:
        g = FourierSeries.load(args.coeffs)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read series: {exc}") from exc
    rep = {"schema_version": SCHEMA_VERSION, "version": __version__,
           "alpha": {"text": alpha.text, "kind": alpha.kind, "value": float(alpha),
                     "rational": alpha.is_rational},
           "support_size": len(g.coeffs)}
    try:
        f, diag = solve_cohomological(alpha, g, subtract_mean=args.subtract_mean)
    except ObstructionError as exc:
        rep["error"] = "obstruction"
        rep["obstruction"] = exc.value
        rep["passed"] = False
        emit(rep, args.format)
        return EXIT_FAIL
    except ResonanceError as exc:
        rep["error"] = "resonance"
        rep["frequency"] = list(exc.frequency)
        rep["passed"] = False
        emit(rep, args.format)
        return EXIT_RESONANCE
    rep["diagnostics"] = diag.as_dict()
    rep["real_output"] = f.is_conjugate_symmetric(1e-12)
    if args.out:
        f.dump(args.out)
        rep["solution_file"] = args.out
    else:
        rep["solution"] = f.to_records()
    rep["passed"] = True
    emit(rep, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify-all


VERIFY_MODELS = (("torus", 2), ("torus", 3), ("torus", 4), ("torus", 5), ("sl2-geodesic", None),
                 ("sl2-horocycle-plus", None), ("sl2-horocycle-minus", None),
                 ("flat-symplectic-torus", 4))


def _corrupted_tables() -> dict:
    rows = [list(r) for r in PUBLISHED_TABLES["sl2-geodesic"]]
    for r in rows:
        if r[0] == "contract" and r[1] == ("w0",):
            r[2] = {(): 2}
    return {"sl2-geodesic": [tuple(r) for r in rows]}


def verify_all(seed: int = 0, genus: int = DEFAULT_GENUS, fault: str | None = None) -> dict:
    from . import sl2_numeric as numeric

    checks: dict[str, bool] = {}
    out: dict = {"schema_version": SCHEMA_VERSION, "version": __version__, "seed": seed, "genus": genus}

    models = []
    for kind, n in VERIFY_MODELS:
        params = {"n": n} if n is not None else {"genus": genus}
        models.append(instantiate(ModelSpec(kind, **params)))
    models.sort(key=lambda m: m.name)

    ident = {}
    for j, m in enumerate(models):
        if m.name == "torus-5":
            continue
        e = element_identities(m, 100, seed + j)
        mx = matrix_identities(m)
        ident[m.name] = {"elements": e.as_dict(), "matrices": mx.as_dict()}
        checks[f"identities/{m.name}"] = e.passed and mx.passed
    out["identities"] = ident

    published = _corrupted_tables() if fault == "table" else None
    reports = {}
    for m in models:
        r = model_report(m, published, fault if m.name == "torus-2" else None)
        reports[m.name] = {"checks": r["checks"], "passed": r["passed"],
                           "cohomology": {k: r["cohomology"][k] for k in ("H_basic", "H_inv", "H_X", "C_X")},
                           "cokernel_sequence": {"H_C_dims": r["cokernel_sequence"]["H_C_dims"],
                                        "constraints": r["cokernel_sequence"].get("constraints", [])}}
        for name, ok in r["checks"].items():
            checks[f"report/{m.name}/{name}"] = ok
    out["models"] = reports

    cor1 = {}
    for g in range(1, 11):
        p = surface_index_profile(g)
        fd = p.fredholm["h_*"]
        ok = (-fd.index == 2 - 2 * g and fd.kernel == 2 * g - 1 and fd.cokernel == 1
              and p.extra["infinite_dimensional"] == (g >= 2))
        cor1[str(g)] = {"kernel": fd.kernel, "cokernel": fd.cokernel, "index": fd.index,
                        "infinite_dimensional": p.extra["infinite_dimensional"]}
        checks[f"surface_index/g={g}"] = ok
    w1 = surface_index_profile(1, 1)
    checks["surface_index/g=1,W=1"] = w1.term("C^0_X").dim == 1
    out["surface_index"] = cor1

    num: dict = {}
    bc = numeric.bracket_check()
    num["bracket"] = bc.errors
    checks["numeric/bracket"] = bc.passed
    lie_checks = {}
    for kind in numeric.FLOW_KINDS:
        for k in range(4):
            lc = numeric.numeric_lie_check(k, kind, seed=seed)
            lie_checks[f"{kind}/{k}"] = lc.as_dict()
            checks[f"numeric/lie/{kind}/{k}"] = lc.passed()
    num["lie"] = lie_checks
    mc = numeric.maurer_cartan_check(seed=seed)
    num["maurer_cartan_max_deviation"] = mc.max_deviation
    checks["numeric/maurer_cartan"] = mc.passed()
    periods = {}
    for t in (1, 2, 4):
        pr = numeric.closed_geodesic_period(np.diag([math.exp(t / 2), math.exp(-t / 2)]))
        periods[str(t)] = {"length": pr.length, "integral": pr.integral, "deviation": pr.deviation}
        checks[f"numeric/period/t={t}"] = pr.deviation < 1e-9 and abs(pr.length - t) < 1e-12
    num["periods"] = periods
    rng = np.random.default_rng(seed)
    worst_group, worst_dual = 0.0, 0.0
    for _ in range(100):
        gpt = numeric.random_group_point(rng)
        worst_dual = max(worst_dual, numeric.duality_error(gpt))
        s, t = rng.uniform(-5, 5, size=2)
        for kind in numeric.FLOW_KINDS:
            worst_group = max(worst_group, numeric.group_law_error(kind, gpt, s, t))
    num["group_law_max_error"] = worst_group
    num["duality_max_error"] = worst_dual
    checks["numeric/group_law"] = worst_group < 1e-12
    checks["numeric/duality"] = worst_dual < 1e-12
    out["numeric"] = num

    four: dict = {}
    worst = 0.0
    real_ok = True
    for _ in range(20):
        gser = FourierSeries.random_real(int(rng.integers(1, 65)), rng, density=0.3)
        f, diag = solve_cohomological("golden", gser)
        worst = max(worst, diag.residual)
        real_ok = real_ok and f.is_conjugate_symmetric(1e-15)
    four["roundtrip_max_residual"] = worst
    checks["fourier/roundtrip"] = worst < 1e-12
    checks["fourier/reality"] = real_ok
    try:
        solve_cohomological("1/2", FourierSeries({(1, -2): 1}))
        checks["fourier/resonance"] = False
    except ResonanceError:
        checks["fourier/resonance"] = True
    golden, liou = min_denominator("golden", 10 ** 6), min_denominator("liouville:4", 10 ** 6)
    four["min_denominator"] = {"golden": golden.as_dict(), "liouville:4": liou.as_dict()}
    checks["fourier/liouville_gap"] = liou.value * 1e3 <= golden.value
    law = denominator_law("golden", 10 ** 6)
    four["golden_law"] = {"c_by_n": law.c_by_n, "c_by_max": law.c_by_max}
    checks["fourier/golden_law"] = abs(law.c_by_n - 1 / math.sqrt(5)) < 1e-3
    four["golden_profile_quality_tail"] = diophantine_profile("golden", 25).quality[-1]
    out["fourier"] = four

    failed = sorted(k for k, v in checks.items() if not v)
    out["checks"] = dict(sorted(checks.items()))
    out["failed"] = failed
    out["passed"] = not failed
    return out


def cmd_verify_all(args) -> int:
    rep = verify_all(args.seed, args.genus, args.inject_fault)
    emit(rep, args.format, args.out)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flowforms", description="Cohomology of flows on finite form models.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pm = sub.add_parser("models", help="list or show built-in models")
    pm.add_argument("action", choices=["list", "show"])
    pm.add_argument("name", nargs="?")
    pm.add_argument("--n", type=int)
    pm.add_argument("--genus", type=int, default=DEFAULT_GENUS)
    pm.add_argument("--format", choices=["text", "json"], default="text")
    pm.set_defaults(func=cmd_models)

    pr = sub.add_parser("report", help="full verification report for one model")
    src = pr.add_mutually_exclusive_group(required=True)
    src.add_argument("--model")
    src.add_argument("--model-file")
    pr.add_argument("--n", type=int)
    pr.add_argument("--genus", type=int, default=DEFAULT_GENUS)
    pr.add_argument("--format", choices=["text", "json"], default="text")
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_report)

    ps = sub.add_parser("solve-torus", help="solve (∂x + α∂y) f = g by Fourier inversion")
    ps.add_argument("--alpha", required=True, help="p/q, decimal, (a+b*sqrt(d))/c, golden, liouville:K")
    ps.add_argument("--coeffs", required=True, help="JSON list of {m, n, re, im}")
    ps.add_argument("--subtract-mean", action="store_true")
    ps.add_argument("--out", help="write the solution series here")
    ps.add_argument("--format", choices=["text", "json"], default="text")
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify-all", help="run every check")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--genus", type=int, default=DEFAULT_GENUS)
    pv.add_argument("--format", choices=["text", "json"], default="text")
    pv.add_argument("--out")
    pv.add_argument("--inject-fault", choices=["table", "sequence"], help=argparse.SUPPRESS)
    pv.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelFileError, ModelError, FieldMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
