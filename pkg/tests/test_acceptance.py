"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import time
from fractions import Fraction
from itertools import product

import pytest

from starunstable.cli import main as cli_main
from starunstable.freealg import FreeAlgebra, dyadic_multiset_count
from starunstable.gf2core import F2Vector, rank
from starunstable.kfunctor import ThetaIso, build_quotient, ideal_equalities_check
from starunstable.models import (
    build_model,
    cofiltration_maps,
    compare_with_free,
    level_identity_check,
    model_from_spec,
    star_instability_check,
)
from starunstable.operads import (
    com_operad,
    compose_with_unary,
    is_central,
    lev_operad,
    magcom_operad,
    truncated_lev,
    unary_operad,
)
from starunstable.steenrod import (
    act_letterwise,
    adem_normalize,
    polynomial_action_oracle,
    steenrod_basis,
    words,
)
from starunstable.unstable import Loops, classical_section, free_module

RESULTS = {}
PROBES = [(1, 1, 1, 1, 1, 1), (1, 2, 3, 4, 5, 6), (3, 0, 1, 2, 0, 5), (7, 1, 1, 0, 2, 1),
          (2, 2, 2, 2, 2, 2), (1, 1, 1, 1, 1, 7)]
CARLSSON_WEIGHTS = [Fraction(1, 2), Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(7, 4), Fraction(2),
                    Fraction(3)]


def report(n, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}" + (f": {detail}" if detail else "")
    RESULTS[n] = line
    print(line)
    assert ok, line


def ucom_dpm(arity_cap=24):
    return compose_with_unary(com_operad(True, arity_cap), unary_operad("Dpm", 80))


# 1 ---------------------------------------------------------------------------------


def test_criterion_1_adem_kernel():
    t0 = time.perf_counter()
    spots = (adem_normalize((1, 1)) == F2Vector()
             and adem_normalize((1, 2)) == F2Vector({(3,)})
             and adem_normalize((2, 2)) == F2Vector({(3, 1)})
             and adem_normalize((3, 2)) == F2Vector())
    faithful = True
    for d in range(1, 13):
        rows = []
        for t in steenrod_basis(d):
            img = set()
            for i, m in enumerate(PROBES):
                img |= {(i, x) for x in polynomial_action_oracle(t, m)}
            rows.append(F2Vector(img))
        faithful &= rank(rows) == len(rows)
    bad, count = [], 0
    for w in words(12, 4):
        count += 1
        nf = adem_normalize(w)
        for m in PROBES:
            if act_letterwise(nf, m) != polynomial_action_oracle(w, m):
                bad.append(w)
                break
    elapsed = time.perf_counter() - t0
    ok = spots and faithful and not bad and elapsed < 60
    report(1, ok, f"{count} words, {len(bad)} disagreements, oracle faithful={faithful}, "
                  f"spot identities={spots}, {elapsed:.1f}s")


# 2 ---------------------------------------------------------------------------------


def brute_fn_dim(n, d):
    target = d - n
    if target < 0:
        return 0
    if target == 0:
        return 1
    count = 0
    for k in range(1, target.bit_length() + 1):
        for seq in product(range(1, target + 1), repeat=k):
            if sum(seq) == target and all(seq[h] >= 2 * seq[h + 1] for h in range(k - 1)) \
                    and seq[0] - sum(seq[1:]) <= n:
                count += 1
    return count


def test_criterion_2_fn_bases():
    F1 = free_module(1, 64)
    f1_ok = all(F1.dim(d) == (1 if d and d & (d - 1) == 0 else 0) for d in range(65))
    bad = [(n, d) for n in range(4) for d in range(17) if free_module(n, 16).dim(d) != brute_fn_dim(n, d)]
    report(2, f1_ok and not bad, f"F(1) powers of two up to 64: {f1_ok}; F(n) mismatches for n<=3, d<=16: {bad}")


# 3 ---------------------------------------------------------------------------------


def test_criterion_3_centrality():
    ucom = lambda kind: compose_with_unary(com_operad(True, 16), unary_operad(kind, 24))
    verdicts = {
        "(Com,.)": is_central(com_operad(False, 8))[0],
        "(Lev,*)": is_central(lev_operad(8))[0],
        "(uComoD,(.;d,d))": is_central(ucom("D"))[0],
        "(uComoD+-,(.;d,d))": is_central(ucom("Dpm"))[0],
    }
    for s in range(1, 5):
        verdicts[f"(uComoQ{s}D)"] = is_central(ucom(("QsD", s)))[0]
    for q in range(4):
        verdicts[f"(T{q}Lev,*)"] = is_central(truncated_lev(q, 8))[0]
    M = magcom_operad(6)
    mag_ok, mag_bad = is_central(M)
    ok = all(verdicts.values()) and not mag_ok and mag_bad == M.star_token
    failing = [k for k, v in verdicts.items() if not v]
    report(3, ok, f"central: {len(verdicts) - len(failing)}/{len(verdicts)}; MagCom fails at "
                  f"{M.fmt(mag_bad) if mag_bad is not None else None}")


# 4 ---------------------------------------------------------------------------------


def test_criterion_4_ideal_equalities():
    t0 = time.perf_counter()
    cases = [("uCom", com_operad(True, 32), 1, 12), ("Lev", lev_operad(32), 1, 12), ("uCom", com_operad(True, 32), 2, 10)]
    out = []
    for name, P, n, cap in cases:
        A = FreeAlgebra(P, free_module(n, cap), cap)
        rep = ideal_equalities_check(A, classical_section(n, cap), None)
        out.append((f"({name},F({n}))", rep["ok"]))
    elapsed = time.perf_counter() - t0
    ok = all(v for _, v in out) and elapsed < 300
    report(4, ok, ", ".join(f"{k}={v}" for k, v in out) + f", {elapsed:.1f}s")


# 5 and 6 -----------------------------------------------------------------------------


def theorem_cases():
    yield "(uCom,.,F(1))", com_operad(True, 32), 1, 16, None
    yield "(Lev,*,F(1))", lev_operad(24), 1, 12, None
    yield "(uCom,.,F(2))", com_operad(True, 24), 2, 10, None
    for w in CARLSSON_WEIGHTS:
        yield f"(uComoD+-,(.;d,d),F(1))[w={w}]", ucom_dpm(), 1, 10, w


_ISOS = {}


def theorem_iso(name, P, n, cap, w):
    if name not in _ISOS:
        M = free_module(n, cap)
        _ISOS[name] = ThetaIso(P, M, Loops(M).complement_section(), None, cap, w)
    return _ISOS[name]


def poly_dims(gen_degrees, cap):
    ways = [1] + [0] * cap
    for g in gen_degrees:
        for s in range(g, cap + 1):
            ways[s] += ways[s - g]
    return ways


def test_criterion_5_main_theorem_dims():
    bad = []
    for name, P, n, cap, w in theorem_cases():
        T = theorem_iso(name, P, n, cap, w)
        q, f = T.K.dims(), T.source.dims()
        if q != f:
            bad.append(f"{name}: quotient {q} free {f}")
            continue
        if name.startswith("(uCom,.,F(1))"):
            expected = [1] * (cap + 1)  # polynomial on one class, unit in degree 0
        elif name.startswith("(Lev"):
            expected = [0] + [dyadic_multiset_count(d) for d in range(1, cap + 1)]
            if expected[1:6] != [1, 1, 1, 2, 3]:
                bad.append("dyadic oracle")
        elif name.startswith("(uCom,.,F(2))"):
            expected = poly_dims([2, 3, 5, 9], cap)
        else:
            expected = build_model("k", cap, weight=w).dims()
            expected[0] = q[0]  # degree 0 carries no weight piece on either side
        if q != expected:
            bad.append(f"{name}: {q} vs {expected}")
    report(5, not bad, f"{len(list(theorem_cases()))} cases" + (f"; {bad}" if bad else ", all degrees match"))


def test_criterion_6_round_trips():
    bad = []
    for name, P, n, cap, w in theorem_cases():
        T = theorem_iso(name, P, n, cap, w)
        fails = T.check_round_trips()
        fails += T.check_psi_multiplicative(100, seed=2024)
        pairs = len(T.composition_pairs(100, seed=2024))
        if pairs < 100:
            fails.append(f"only {pairs} composable pairs")
        if fails:
            bad.append(f"{name}: {fails[:2]}")
    report(6, not bad, "round trips and psi multiplicativity on 100 seeded pairs per case" + (f"; {bad}" if bad else ""))


# 7 ---------------------------------------------------------------------------------


def test_criterion_7_negative_controls(capsys):
    code = cli_main(["verify-theorem", "--operad", "ucom", "--star", "dot", "--module", "SigmaF0",
                     "--max-degree", "4", "--format", "json"])
    import json

    rep = json.loads(capsys.readouterr().out)
    row2 = rep["degrees"][2]
    a_ok = code == 1 and row2["quotient"] == 0 and row2["free"] == 1
    M = free_module(2, 10)
    T = ThetaIso(com_operad(True, 24), M, Loops(M).complement_section(), None, 10)
    x = F2Vector({((0, (4, 2, 1)),)})
    got = T.transported_sq(1, x)
    b_ok = got == F2Vector({((0, (2, 1)), (0, (2, 1)))}) and T.source.sq(1, x) == F2Vector()
    with capsys.disabled():
        report(7, a_ok and b_ok, f"(a) exit {code}, degree 2: quotient {row2['quotient']} free {row2['free']}; "
                                 f"(b) Sq^1 . sigma(Sq^4Sq^2Sq^1 i1) = {T.source.fmt(got)}")


# 8 ---------------------------------------------------------------------------------


def _unst(P, cap, weight=None):
    return build_quotient(FreeAlgebra(P, free_module(1, cap), cap, weight), "unst")


def test_criterion_8_models():
    cap = 10
    checks = {}
    for w in CARLSSON_WEIGHTS:
        checks[f"K({w})"] = (build_model("k", cap, weight=w), _unst(ucom_dpm(), cap, w))
    for s in (1, 2, 3):
        P = compose_with_unary(com_operad(True, 24), unary_operad(("QsD", s)))
        checks[f"M{s}"] = (model_from_spec(f"ms:{s}", cap), _unst(P, cap))
    for q in (0, 1, 2):
        checks[f"J(2^{q})"] = (build_model("jtrunc", cap, param=q, weight=2 ** q), _unst(truncated_lev(q, 24), cap))
    checks["K(1) vs Lev"] = (build_model("k", cap, weight=1), _unst(lev_operad(24), cap))
    k_pieces = [m for name, (m, _) in checks.items() if name.startswith("K(")]
    bad = []
    if not level_identity_check(k_pieces[0], k_pieces)["ok"]:
        bad.append("K: level identity across weights")
    for name, (model, K) in checks.items():
        rep = compare_with_free(model, K)
        sq1 = all(r["commutes_sq"] for r in rep["degrees"])
        # T_0Lev has a zero star, so there is no product to compare there
        products_seen = rep["products"]["checked"] > 0 or not K.star
        if not (rep["ok"] and sq1 and products_seen):
            bad.append(f"{name}: comparison")
        module = model.as_module()
        if module.instability_failures() or module.adem_failures():
            bad.append(f"{name}: certification")
        if not star_instability_check(model)["ok"]:
            bad.append(f"{name}: star-instability")
        if not level_identity_check(model)["ok"]:
            bad.append(f"{name}: level identity")
    report(8, not bad, f"{len(checks)} identifications" + (f"; {bad}" if bad else ", all bijective and compatible"))


# 9 ---------------------------------------------------------------------------------


def test_criterion_9_cofiltration():
    cap = 10
    maps_ok = all(r["commutes_sq"] and r["commutes_star"] for r in cofiltration_maps(2, cap))
    K1 = build_model("k", cap, weight=1)
    bad = []
    for d in range(1, cap + 1):
        q = 0
        while 2 ** q < d:
            q += 1
        for qq in range(q, q + 3):
            j = build_model("j", cap, weight=2 ** qq).dim(d)
            if j != K1.dim(d):
                bad.append((qq, d, j, K1.dim(d)))
    detail = f"maps commute: {maps_ok}; stabilization once 2^q >= d"
    if bad:
        qq, d, j, k = bad[0]
        detail += f" fails in {len(bad)} cases, first (q={qq}, d={d}): dim J(2^q)^d = {j}, dim K(1)^d = {k}"
    report(9, maps_ok and not bad, detail)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
