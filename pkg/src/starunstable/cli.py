"""Command line interface.

Exit codes: 0 success or match, 1 verified mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional

from . import steenrod
from .freealg import FreeAlgebra
from .gf2core import F2Vector
from .kfunctor import (
    FLAVORS,
    NotReducedError,
    ThetaIso,
    build_quotient,
    ideal_equalities_check,
    verify_theorem_table,
)
from .models import compare_with_free, model_from_spec
from .operads import (
    DecoratedCom,
    Operad,
    com_operad,
    compose_with_unary,
    is_central,
    lev_operad,
    magcom_operad,
    truncated_lev,
    unary_operad,
)
from .unstable import Loops, UnstableModule, free_module, is_reduced, phi, suspend

DEFAULT_CAP = 12
OPERADS = ["com", "ucom", "lev", "tqlev:<q>", "magcom", "ucom.d", "ucom.dpm", "ucom.qsd:<s>", "ucom.tqd:<q>"]
MODULES = ["F<n>", "SigmaF<n>", "PhiF<n>", "SOF<n>"]
STARS = ["gen", "dot", "dot.dd"]
CONVENTION_NOTE = ("note: coset representatives are the smallest monomials outside the leading terms of the ideal, "
                   "and sections are chosen by convention; dimensions do not depend on either choice")


class UsageError(Exception):
    pass


# spec parsing ---------------------------------------------------------------


def resolve_operad(spec: str, cap: int) -> Operad:
    s = spec.strip().lower()
    arity_cap = max(2 * cap, 8)
    ecap = 4 * cap + 16
    try:
        if s == "com":
            return com_operad(False, arity_cap)
        if s == "ucom":
            return com_operad(True, arity_cap)
        if s == "lev":
            return lev_operad(arity_cap)
        if s.startswith("tqlev:"):
            return truncated_lev(int(s.split(":")[1]), arity_cap)
        if s == "magcom":
            return magcom_operad(max(cap, 4))
        if s == "ucom.d":
            return compose_with_unary(com_operad(True, arity_cap), unary_operad("D", ecap))
        if s == "ucom.dpm":
            return compose_with_unary(com_operad(True, arity_cap), unary_operad("Dpm", ecap))
        if s.startswith("ucom.qsd:"):
            return compose_with_unary(com_operad(True, arity_cap), unary_operad(("QsD", int(s.split(":")[1]))))
        if s.startswith("ucom.tqd:"):
            return compose_with_unary(com_operad(True, arity_cap), unary_operad(("TqD", int(s.split(":")[1]))))
    except ValueError as exc:
        raise UsageError(f"bad operad spec {spec!r}: {exc}") from None
    raise UsageError(f"unknown operad {spec!r}; known: {', '.join(OPERADS)}")


def resolve_module(spec: str, cap: int) -> UnstableModule:
    s = spec.strip()
    try:
        for prefix, build in (("SigmaF", lambda n: suspend(free_module(n, cap - 1))),
                              ("PhiF", lambda n: phi(free_module(n, cap))),
                              ("SOF", lambda n: Loops(free_module(n, cap)).ssm),
                              ("F", lambda n: free_module(n, cap))):
            if s.startswith(prefix) and s[len(prefix):].isdigit():
                return build(int(s[len(prefix):]))
    except ValueError as exc:
        raise UsageError(f"bad module spec {spec!r}: {exc}") from None
    raise UsageError(f"unknown module {spec!r}; known: {', '.join(MODULES)}")


def resolve_star(P: Operad, spec: Optional[str]) -> F2Vector:
    s = (spec or "gen").strip().lower()
    if s == "gen":
        return P.default_star()
    if s == "dot":
        if isinstance(P, DecoratedCom) and not P.kraft:
            return F2Vector(((0, 0),))
        raise UsageError(f"star 'dot' needs a Com-type operad, not {P.name}")
    if s == "dot.dd":
        if isinstance(P, DecoratedCom) and P.monoid.kind != "trivial" and not P.kraft:
            return P.default_star()
        raise UsageError(f"star 'dot.dd' needs uCom composed with a unary operad, not {P.name}")
    raise UsageError(f"unknown star {spec!r}; known: {', '.join(STARS)}")


def resolve_weight(P: Operad, raw: Optional[str], notes: List[str]):
    if raw is None:
        if getattr(P, "supports_weight", False):
            notes.append(f"{P.name} is infinite in each degree; using the weight-1 piece")
            return Fraction(1)
        return None
    if not getattr(P, "supports_weight", False):
        raise UsageError(f"{P.name} has no weight grading")
    return Fraction(raw)


def resolve_section(loops: Loops, spec: Optional[str], seed: int = 0):
    s = (spec or "classical").strip().lower()
    if s == "classical":
        return loops.complement_section()
    if s == "random":
        return loops.random_section(seed)
    if s.startswith("random:"):
        try:
            return loops.random_section(int(s.split(":", 1)[1]))
        except ValueError:
            pass
    raise UsageError(f"unknown section {spec!r}; use classical or random:<seed>")


# output -------------------------------------------------------------------------


def emit(args, report: Dict, text: str) -> None:
    out = json.dumps(report, sort_keys=True) if args.format == "json" else text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    print(out)


def table(header: List[str], rows: List[List]) -> str:
    cols = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cols) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cols]
    return "\n".join(lines)


def dims_report(dims: List[int]) -> Dict:
    return {"degrees": [{"d": d, "dim": n} for d, n in enumerate(dims)]}


def dims_text(title: str, dims: List[int]) -> str:
    return title + "\n" + table(["d", "dim"], [[d, n] for d, n in enumerate(dims)])


# subcommands -------------------------------------------------------------------------


def cmd_adem(args) -> int:
    try:
        word = tuple(int(x) for x in args.word.replace(",", " ").split())
        w = steenrod.clean(word)
    except ValueError as exc:
        raise UsageError(f"bad word {args.word!r}: {exc}") from None
    res = steenrod.adem_normalize(w)
    terms = sorted(res, reverse=True)
    report = {"word": list(w), "degree": steenrod.degree(w), "terms": [list(t) for t in terms]}
    emit(args, report, steenrod.fmt_element(res))
    return 0


def cmd_fn_basis(args) -> int:
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    if args.max_degree < args.n:
        raise UsageError("--max-degree must be at least --n")
    F = free_module(args.n, args.max_degree)
    rows = []
    for d in range(args.max_degree + 1):
        for I in F.basis(d):
            rows.append({"d": d, "sequence": list(I), "excess": steenrod.excess(I)})
    lines = [f"F({args.n}) basis up to degree {args.max_degree}"]
    for r in rows:
        word = steenrod.fmt_word(tuple(r["sequence"]))
        lines.append(f"  {r['d']:3d}  {word if r['sequence'] else ''} iota_{args.n}".replace("  iota", " iota"))
    report = {"n": args.n, "basis": rows, "dims": F.dims()}
    emit(args, report, "\n".join(lines))
    return 0


def cmd_module_dims(args) -> int:
    M = resolve_module(args.module, args.max_degree)
    report = dims_report(M.dims()[: args.max_degree + 1])
    report["module"] = args.module
    emit(args, report, dims_text(args.module, M.dims()[: args.max_degree + 1]))
    return 0


def cmd_check_central(args) -> int:
    P = resolve_operad(args.operad, max(args.max_arity, 8))
    star = resolve_star(P, args.op)
    ok, bad = is_central(P, star)
    report = {"operad": P.name, "star": sorted(map(str, star)), "central": ok,
              "failing_generator": None if ok else P.fmt(bad)}
    if ok:
        text = f"{P.name}: star is {P.name}-central"
    else:
        text = f"{P.name}: centrality relation star(mu,mu) = mu(star,...,star).sigma fails at mu = {P.fmt(bad)}"
    emit(args, report, text)
    return 0 if ok else 1


def cmd_operad_dims(args) -> int:
    P = resolve_operad(args.operad, max(args.max_arity, 4))
    dims = []
    for n in range(args.max_arity + 1):
        if isinstance(P, DecoratedCom) and not P.kraft and not P.monoid.bounded:
            dims.append(None)
        else:
            dims.append(len(P.basis(n)))
    report = {"operad": P.name, "arities": [{"n": n, "dim": d} for n, d in enumerate(dims)]}
    text = f"{P.name}\n" + table(["n", "dim"], [[n, "inf" if d is None else d] for n, d in enumerate(dims)])
    emit(args, report, text)
    return 0


def cmd_free_dims(args) -> int:
    P = resolve_operad(args.operad, args.max_degree)
    M = resolve_module(args.module, args.max_degree)
    notes: List[str] = []
    A = FreeAlgebra(P, M, args.max_degree, resolve_weight(P, args.weight, notes))
    dims = A.dims()
    report = dims_report(dims)
    emit(args, report, "\n".join(notes + [dims_text(A.name, dims)]))
    return 0


def cmd_k_dims(args) -> int:
    P = resolve_operad(args.operad, args.max_degree)
    M = resolve_module(args.module, args.max_degree)
    star = resolve_star(P, args.star)
    notes: List[str] = []
    A = FreeAlgebra(P, M, args.max_degree, resolve_weight(P, args.weight, notes))
    section = None
    if args.flavor == "e":
        section = resolve_section(Loops(M), args.section, args.seed)
    K = build_quotient(A, args.flavor, star, section)
    dims = K.dims()
    emit(args, dims_report(dims), "\n".join(notes + [dims_text(K.name, dims), CONVENTION_NOTE]))
    return 0


def cmd_ideal_check(args) -> int:
    P = resolve_operad(args.operad, args.max_degree)
    M = resolve_module(args.module, args.max_degree)
    star = resolve_star(P, args.star)
    notes: List[str] = []
    A = FreeAlgebra(P, M, args.max_degree, resolve_weight(P, args.weight, notes))
    flavors = [f.strip() for f in args.flavor.split(",")] if args.flavor else list(FLAVORS)
    for f in flavors:
        if f not in FLAVORS:
            raise UsageError(f"unknown flavor {f!r}; known: {', '.join(FLAVORS)}")
    section = resolve_section(Loops(M), args.section, args.seed) if "e" in flavors else None
    rep = ideal_equalities_check(A, section, star, flavors)
    rows = [[r["d"]] + [r["ranks"][f] for f in flavors] + [r["union"], "yes" if r["equal"] else "NO"] for r in rep["degrees"]]
    text = "\n".join(notes + [f"ideal spans in {A.name}", table(["d"] + flavors + ["union", "equal"], rows)])
    emit(args, rep, text)
    return 0 if rep["ok"] else 1


def cmd_verify_theorem(args) -> int:
    P = resolve_operad(args.operad, args.max_degree)
    M = resolve_module(args.module, args.max_degree)
    star = resolve_star(P, args.star)
    notes: List[str] = []
    weight = resolve_weight(P, args.weight, notes)
    reduced, _ = is_reduced(M)
    if reduced and M.is_connected:
        section = resolve_section(Loops(M), args.section, args.seed)
        iso = ThetaIso(P, M, section, star, args.max_degree, weight)
        rows = iso.dimension_table()
        fails = iso.check_round_trips()
        if fails:
            notes.append(f"round trip failures: {fails[:3]}")
        report = {"degrees": rows, "ok": all(r["match"] for r in rows) and not fails}
    else:
        notes.append(f"{M.name} is not reduced; comparing K_P(M) with S(P, Sigma Omega M) directly")
        report = verify_theorem_table(P, M, star, args.max_degree, weight)
    rows_txt = [[r["d"], r["quotient"], r["free"], "yes" if r["match"] else "NO"] for r in report["degrees"]]
    text = "\n".join(notes + [f"K_{P.name}({M.name}) vs S({P.name}, Sigma Omega {M.name})",
                              table(["d", "quotient", "free", "match"], rows_txt),
                              "all degrees match" if report["ok"] else "MISMATCH", CONVENTION_NOTE])
    emit(args, report, text)
    return 0 if report["ok"] else 1


def cmd_model_dims(args) -> int:
    w = None if args.weight is None else Fraction(args.weight)
    try:
        model = model_from_spec(args.model, args.max_degree, w)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dims = model.dims()
    emit(args, dims_report(dims), dims_text(model.name, dims))
    return 0


def cmd_compare(args) -> int:
    try:
        opspec, modspec = args.free.rsplit(":", 1)
    except ValueError:
        raise UsageError("--free expects <operad>:<module>") from None
    P = resolve_operad(opspec, args.max_degree)
    M = resolve_module(modspec, args.max_degree)
    notes: List[str] = []
    weight = resolve_weight(P, args.weight, notes)
    try:
        model = model_from_spec(args.model, args.max_degree, weight if weight is not None else (
            None if args.model.startswith("ms") or args.model.startswith("jtrunc") else Fraction(1)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if model.kind == "jtrunc" and weight is None:
        model = model_from_spec(args.model, args.max_degree, 2 ** model.param)
    K = build_quotient(FreeAlgebra(P, M, args.max_degree, weight), "unst", resolve_star(P, args.star))
    rep = compare_with_free(model, K)
    rows = [[r["d"], r["free"], r["model"], "yes" if r["ok"] else "NO"] for r in rep["degrees"]]
    text = "\n".join(notes + [f"K_{P.name}({M.name}) vs {model.name}", table(["d", "free", "model", "iso"], rows),
                              f"products checked: {rep['products']['checked']}",
                              "isomorphic within cap" if rep["ok"] else "MISMATCH"])
    report = {"degrees": rep["degrees"], "products": {k: v for k, v in rep["products"].items() if k != "failures"},
              "ok": rep["ok"]}
    emit(args, report, text)
    return 0 if rep["ok"] else 1


# parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starunstable", description="Star-unstable algebras over the Steenrod algebra.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--out", default=None, help="also write the report to this file")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("adem", parents=[common], help="admissible expansion of a word")
    s.add_argument("word", help='exponents, e.g. "2 2"')
    s.set_defaults(func=cmd_adem)

    s = sub.add_parser("fn-basis", parents=[common], help="basis of F(n)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-degree", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_fn_basis)

    s = sub.add_parser("module-dims", parents=[common], help="dimensions of an unstable module")
    s.add_argument("--module", required=True, help="F<n>, SigmaF<n>, PhiF<n>, SOF<n>")
    s.add_argument("--max-degree", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_module_dims)

    s = sub.add_parser("check-central", parents=[common], help="centrality of a binary operation")
    s.add_argument("--operad", required=True)
    s.add_argument("--op", default="gen", help="gen, dot or dot.dd")
    s.add_argument("--max-arity", type=int, default=8)
    s.set_defaults(func=cmd_check_central)

    s = sub.add_parser("operad-dims", parents=[common], help="arity-wise dimensions of an operad")
    s.add_argument("--operad", required=True)
    s.add_argument("--max-arity", type=int, default=5)
    s.set_defaults(func=cmd_operad_dims)

    for name, func, helptext in (("free-dims", cmd_free_dims, "dimensions of S(P, M)"),
                                 ("k-dims", cmd_k_dims, "dimensions of K_P(M)"),
                                 ("ideal-check", cmd_ideal_check, "compare the X, Unst and E ideals"),
                                 ("verify-theorem", cmd_verify_theorem, "K_P(M) against S(P, Sigma Omega M)")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--operad", required=True)
        s.add_argument("--module", required=True)
        s.add_argument("--max-degree", type=int, default=DEFAULT_CAP)
        s.add_argument("--weight", default=None, help="weight piece (needed for ucom.d and ucom.dpm; default 1)")
        if name != "free-dims":
            s.add_argument("--star", default="gen")
            s.add_argument("--section", default="classical", help="classical, random (uses --seed) or random:<seed>")
        if name == "k-dims":
            s.add_argument("--flavor", default="unst", choices=list(FLAVORS))
        if name == "ideal-check":
            s.add_argument("--flavor", default=None, help="comma separated subset of x,unst,e")
        s.set_defaults(func=func)

    s = sub.add_parser("model-dims", parents=[common], help="dimensions of a polynomial model")
    s.add_argument("--model", required=True, help="j, k, ms:<s> or jtrunc:<q>")
    s.add_argument("--weight", default=None)
    s.add_argument("--max-degree", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_model_dims)

    s = sub.add_parser("compare", parents=[common], help="compare a model with a free star-unstable algebra")
    s.add_argument("--model", required=True)
    s.add_argument("--free", required=True, help="<operad>:<module>, e.g. lev:F1")
    s.add_argument("--star", default="gen")
    s.add_argument("--weight", default=None)
    s.add_argument("--max-degree", type=int, default=10)
    s.set_defaults(func=cmd_compare)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "max_degree", 1) < 0:
        parser.error("--max-degree must be nonnegative")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotReducedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
