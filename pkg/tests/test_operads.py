from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from starunstable.gf2core import F2Vector
from starunstable.operads import (
    DecoratedCom,
    RelationError,
    act_tuple,
    check_axioms,
    com_operad,
    compose_with_unary,
    generated_group_order,
    is_central,
    lev_operad,
    magcom_operad,
    operad_morphism,
    perm_compose,
    sigma_2n,
    star_power,
    star_power_generating_set,
    truncated_lev,
    unary_operad,
)


def ucom_with(kind, cap=16):
    return compose_with_unary(com_operad(True, cap), unary_operad(kind, 24))


ALL_OPERADS = {
    "Com": lambda: com_operad(False, 8),
    "uCom": lambda: com_operad(True, 8),
    "Lev": lambda: lev_operad(8),
    "T1Lev": lambda: truncated_lev(1, 8),
    "T2Lev": lambda: truncated_lev(2, 8),
    "MagCom": lambda: magcom_operad(6),
    "uComoD": lambda: ucom_with("D", 8),
    "uComoDpm": lambda: ucom_with("Dpm", 8),
    "uComoQ3D": lambda: ucom_with(("QsD", 3), 8),
    "uComoT2D": lambda: ucom_with(("TqD", 2), 8),
}


@pytest.mark.parametrize("name", sorted(ALL_OPERADS))
def test_axioms(name):
    P = ALL_OPERADS[name]()
    assert check_axioms(P, max_arity=3 if name == "MagCom" else 4, exponent_bound=1) == []


def test_lev_and_magcom_dims():
    assert [len(lev_operad(8).basis(n)) for n in range(5)] == [0, 1, 1, 3, 13]
    assert [len(magcom_operad(6).basis(n)) for n in range(5)] == [0, 1, 1, 3, 15]
    assert [len(truncated_lev(2, 8).basis(n)) for n in range(6)] == [0, 1, 1, 3, 1, 0]


def test_lev_is_generated_by_star():
    """Closure of {unit, star} under partial composition and Sigma_n matches the Kraft basis."""
    P = lev_operad(8)
    top = 5
    found = {(0,), (1, 1)}
    changed = True
    while changed:
        changed = False
        for mu in list(found):
            for nu in list(found):
                if len(mu) + len(nu) - 1 > top:
                    continue
                for i in range(len(mu)):
                    for t in P.compose(mu, i, nu):
                        for perm in permutations(range(len(t))):
                            u = P.act(t, perm)
                            if u not in found:
                                found.add(u)
                                changed = True
    for n in range(1, top + 1):
        assert {t for t in found if len(t) == n} == set(P.basis(n))
    for t in found:
        assert sum(Fraction(1, 2 ** a) for a in t) == 1


@given(st.lists(st.integers(0, 4), min_size=1, max_size=4).map(tuple),
       st.lists(st.integers(0, 4), min_size=1, max_size=3).map(tuple), st.data())
def test_kraft_sum_preserved(mu, nu, data):
    P = lev_operad(8)
    i = data.draw(st.integers(0, len(mu) - 1))
    (out,) = P.compose(mu, i, nu)
    kraft = lambda t: sum(Fraction(1, 2 ** a) for a in t)
    assert kraft(out) == kraft(mu) - Fraction(1, 2 ** mu[i]) * (1 - kraft(nu))


def test_centrality_verdicts():
    assert is_central(com_operad(False, 8))[0]
    assert is_central(lev_operad(8))[0]
    assert is_central(ucom_with("D"))[0]
    assert is_central(ucom_with("Dpm"))[0]
    for s in range(1, 5):
        assert is_central(ucom_with(("QsD", s)))[0]
    for q in range(0, 4):
        assert is_central(truncated_lev(q, 8))[0]
    M = magcom_operad(6)
    ok, bad = is_central(M)
    assert not ok and bad == M.star_token


@pytest.mark.parametrize("name", ["Com", "uCom", "Lev", "T2Lev", "uComoD", "uComoDpm", "uComoQ3D", "MagCom"])
def test_generators_agree_with_exhaustive(name):
    P = ALL_OPERADS[name]()
    gen = is_central(P)[0]
    full = is_central(P, exhaustive=True, max_arity=3, exponent_bound=1)[0]
    assert gen == full


def test_star_powers():
    P = lev_operad(16)
    assert star_power(P, P.default_star(), 2, check_invariance=True) == F2Vector({(2, 2, 2, 2)})
    assert star_power(P, P.default_star(), 3, check_invariance=True) == F2Vector({(3,) * 8})
    with pytest.raises(RelationError):
        star_power(magcom_operad(6), magcom_operad(6).default_star(), 2, check_invariance=True)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_star_power_generating_set_generates(k):
    n = 2 ** k
    order = 1
    for j in range(2, n + 1):
        order *= j
    assert generated_group_order(star_power_generating_set(k), n) == order


@given(st.integers(1, 5), st.data())
def test_sigma_2n_interleaves(n, data):
    xs = tuple(range(2 * n))
    out = act_tuple(xs, sigma_2n(n))
    assert sorted(out) == list(xs)
    assert out[:n] == tuple(range(0, 2 * n, 2))


@given(st.permutations(range(4)), st.permutations(range(4)))
def test_right_action(p, q):
    seq = tuple("abcd")
    assert act_tuple(act_tuple(seq, p), q) == act_tuple(seq, perm_compose(tuple(p), tuple(q)))


def test_lev_embeds_in_ucom_dpm():
    target = ucom_with("Dpm", 8)
    f = operad_morphism(lev_operad(8), target, {(1, 1): (1, 1)}, max_arity=4)
    assert f.is_injective_on_basis(4)


def test_truncation_map_kills_top_exponent():
    f = operad_morphism(truncated_lev(2, 8), truncated_lev(1, 8), {(1, 1): (1, 1)}, max_arity=4)
    assert f((2, 2, 1)) == F2Vector()
    assert f((1, 1)) == F2Vector({(1, 1)})


def test_com_does_not_map_to_magcom():
    M = magcom_operad(6)
    with pytest.raises(RelationError) as err:
        operad_morphism(com_operad(False, 6), M, {(0, 0): M.star_token})
    assert "associativity" in err.value.relation


def test_d_operads_are_weighted():
    assert ucom_with("D").supports_weight
    assert ucom_with("Dpm").supports_weight
    assert not ucom_with(("QsD", 2)).supports_weight
    assert isinstance(ucom_with("D"), DecoratedCom)


def test_default_stars():
    assert com_operad(True).default_star() == F2Vector({(0, 0)})
    assert ucom_with("Dpm").default_star() == F2Vector({(1, 1)})
    assert truncated_lev(0, 8).default_star() == F2Vector()
