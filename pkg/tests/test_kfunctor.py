import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starunstable.freealg import FreeAlgebra, dyadic_multiset_count
from starunstable.gf2core import F2Vector
from starunstable.kfunctor import (
    CentralityError,
    NotReducedError,
    ThetaIso,
    build_quotient,
    ideal_equalities_check,
    induced_morphism,
    verify_theorem_table,
)
from starunstable.operads import (
    OperadError,
    com_operad,
    compose_with_unary,
    lev_operad,
    magcom_operad,
    operad_morphism,
    truncated_lev,
    unary_operad,
)
from starunstable.unstable import Loops, classical_section, free_module, suspend


def poly_dims(gen_degrees, cap):
    ways = [1] + [0] * cap
    for g in gen_degrees:
        for s in range(g, cap + 1):
            ways[s] += ways[s - g]
    return ways


def iso(P, n, cap, section=None, weight=None):
    M = free_module(n, cap)
    s = Loops(M).complement_section() if section is None else section
    return ThetaIso(P, M, s, None, cap, weight)


def test_ucom_f1():
    T = iso(com_operad(True, 32), 1, 12)
    assert T.K.dims()[1:] == [1] * 12
    assert T.check_round_trips() == []


def test_lev_f1_matches_dyadic_counts():
    T = iso(lev_operad(24), 1, 10)
    assert T.K.dims()[1:] == [dyadic_multiset_count(d) for d in range(1, 11)]
    assert T.check_round_trips() == []
    assert T.check_psi_multiplicative(40, seed=1) == []


def test_ucom_f2_is_polynomial():
    T = iso(com_operad(True, 20), 2, 10)
    assert T.K.dims() == poly_dims([2, 3, 5, 9], 10)
    assert T.check_round_trips() == []


@settings(max_examples=8)
@given(st.integers(0, 10 ** 6))
def test_section_independence(seed):
    M = free_module(2, 9)
    L = Loops(M)
    a = ThetaIso(com_operad(True, 20), M, L.complement_section(), None, 9)
    b = ThetaIso(com_operad(True, 20), M, L.random_section(seed), None, 9)
    assert a.K.dims() == b.K.dims()
    assert b.check_round_trips() == []


def test_ideal_equalities():
    M = free_module(1, 10)
    A = FreeAlgebra(lev_operad(20), M, 10)
    rep = ideal_equalities_check(A, classical_section(1, 10), None)
    assert rep["ok"]


def test_ideal_is_stable_under_the_action():
    A = FreeAlgebra(com_operad(True, 20), free_module(2, 9), 9)
    K = build_quotient(A, "unst")
    assert K.check_action_well_defined() == []


def test_transported_action_example():
    T = iso(com_operad(True, 24), 2, 10)
    x = F2Vector({((0, (4, 2, 1)),)})
    assert T.source.sq(1, x) == F2Vector()
    assert T.transported_sq(1, x) == F2Vector({((0, (2, 1)), (0, (2, 1)))})


def test_sigma_f0_is_a_counterexample():
    M = suspend(free_module(0, 3))
    rep = verify_theorem_table(com_operad(True, 8), M, cap=4)
    assert not rep["ok"]
    bad = [r for r in rep["degrees"] if not r["match"]]
    assert bad[0]["d"] == 2 and bad[0]["quotient"] == 0 and bad[0]["free"] == 1
    with pytest.raises(NotReducedError):
        ThetaIso(com_operad(True, 8), M, Loops(M).complement_section(), None, 4)


def test_magcom_refused():
    M = free_module(1, 6)
    with pytest.raises(CentralityError):
        ThetaIso(magcom_operad(6), M, Loops(M).complement_section(), None, 6)


def test_magcom_flavors_differ():
    A = FreeAlgebra(magcom_operad(6), free_module(1, 6), 6)
    rep = ideal_equalities_check(A, None, None, ("x", "unst"))
    assert not rep["ok"]


def test_x_flavor_needs_finite_pieces():
    P = compose_with_unary(com_operad(True, 16), unary_operad("Dpm", 40))
    A = FreeAlgebra(P, free_module(1, 6), 6, weight=1)
    with pytest.raises(OperadError):
        build_quotient(A, "x")


def test_weighted_iso_round_trips():
    P = compose_with_unary(com_operad(True, 20), unary_operad("Dpm", 60))
    T = iso(P, 1, 8, weight=1)
    assert T.check_round_trips() == []
    assert T.K.dims() == T.source.dims()


def test_induced_morphism():
    f = operad_morphism(truncated_lev(2, 16), truncated_lev(1, 16), {(1, 1): (1, 1)}, max_arity=4)
    src = build_quotient(FreeAlgebra(truncated_lev(2, 16), free_module(1, 8), 8))
    tgt = build_quotient(FreeAlgebra(truncated_lev(1, 16), free_module(1, 8), 8))
    g = induced_morphism(f, src, tgt)
    assert g.commutes_with_sq()
    for d in range(1, 9):
        assert g.rank(d) == tgt.dim(d)
