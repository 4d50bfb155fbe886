from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from starunstable.freealg import FreeAlgebra, binary_partition_count, dyadic_multiset_count, orbit_count_oracle
from starunstable.gf2core import DegreeCapError, F2Vector
from starunstable.operads import OperadError, com_operad, compose_with_unary, lev_operad, magcom_operad, unary_operad
from starunstable.unstable import free_module, suspend


def brute_dyadic(n):
    return sum(1 for c in combinations_with_replacement(range(n), n) if sum(Fraction(1, 2 ** a) for a in c) == 1)


def test_dyadic_counts():
    assert [dyadic_multiset_count(n) for n in range(1, 9)] == [1, 1, 1, 2, 3, 5, 9, 16]
    for n in range(1, 9):
        assert dyadic_multiset_count(n) == brute_dyadic(n)


def test_ucom_on_f1_is_binary_partitions():
    A = FreeAlgebra(com_operad(True, 32), free_module(1, 16), 16)
    for d in range(1, 17):
        assert A.dim(d) == binary_partition_count(d)


def test_lev_on_sigma_f0():
    A = FreeAlgebra(lev_operad(16), suspend(free_module(0, 11)), 12)
    assert A.dims()[1:9] == [1, 1, 1, 2, 3, 5, 9, 16]


@pytest.mark.parametrize("make, cap", [(lambda: lev_operad(8), 6), (lambda: magcom_operad(6), 6),
                                       (lambda: com_operad(False, 8), 8)])
@pytest.mark.parametrize("n", [1, 2])
def test_dims_against_burnside(make, cap, n):
    P = make()
    M = free_module(n, cap)
    A = FreeAlgebra(P, M, cap)
    for d in range(1, cap + 1):
        assert A.dim(d) == orbit_count_oracle(P, M, d), d


def test_free_algebra_certifies():
    FreeAlgebra(lev_operad(12), free_module(1, 10), 10).as_module().certify()
    FreeAlgebra(com_operad(True, 12), free_module(2, 10), 10).as_module().certify()


def test_sq0_of_generator_is_star_square():
    A = FreeAlgebra(com_operad(True, 16), free_module(1, 8), 8)
    x = A.generator(())
    assert A.sq0(x) == F2Vector({((0, (1,)),)})
    assert A.alpha_star(x) == F2Vector({((0, ()), (0, ()))})


def test_weighted_pieces():
    P = compose_with_unary(com_operad(True, 16), unary_operad("Dpm", 40))
    A = FreeAlgebra(P, free_module(1, 6), 6, weight=1)
    assert A.dims()[:3] == [0, 1, 2]
    for d in range(1, 7):
        for m in A.basis(d):
            assert A.monomial_weight(m) == 1
    with pytest.raises(OperadError):
        FreeAlgebra(P, free_module(1, 6), 6)


def test_cap_errors():
    A = FreeAlgebra(com_operad(True, 16), free_module(1, 4), 4)
    with pytest.raises(DegreeCapError):
        A.basis(5)
    with pytest.raises(DegreeCapError):
        FreeAlgebra(com_operad(True, 16), free_module(1, 4), 5)
    with pytest.raises(OperadError):
        FreeAlgebra(com_operad(True, 16), free_module(0, 4), 4)
