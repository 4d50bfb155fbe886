from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from starunstable.gf2core import DegreeCapError, F2Vector
from starunstable.unstable import (
    Loops,
    classical_section,
    direct_sum,
    free_module,
    is_reduced,
    lambda_map,
    phi,
    sections_equal_dims,
    suspend,
    zero_module,
)


def brute_fn_dim(n, d):
    """Sequences (i_1, ..., i_k) of positive ints summing to d - n, admissible, excess <= n."""
    target = d - n
    if target < 0:
        return 0
    if target == 0:
        return 1
    count = 0
    for k in range(1, target.bit_length() + 1):
        for seq in product(range(1, target + 1), repeat=k):
            if sum(seq) != target:
                continue
            if any(seq[h] < 2 * seq[h + 1] for h in range(k - 1)):
                continue
            if seq[0] - sum(seq[1:]) <= n:
                count += 1
    return count


def test_f1_is_powers_of_two():
    F = free_module(1, 64)
    for d in range(65):
        assert F.dim(d) == (1 if d and d & (d - 1) == 0 else 0)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_fn_dims_against_brute_force(n):
    F = free_module(n, 16)
    for d in range(17):
        assert F.dim(d) == brute_fn_dim(n, d)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_free_modules_certify(n):
    free_module(n, 12).certify()


def test_cap_is_enforced():
    F = free_module(1, 4)
    with pytest.raises(DegreeCapError):
        F.basis(5)
    with pytest.raises(DegreeCapError):
        F.sq(4, F2Vector({(1,)}))


def test_instability_zero_above_degree():
    F = free_module(2, 12)
    for d in range(13):
        for t in F.basis(d):
            for i in range(d + 1, 12 - d + 1):
                assert not F.sq_token(i, t)


def test_suspension_phi_and_sums_certify():
    F = free_module(1, 10)
    for M in (suspend(F), phi(F), direct_sum(F, free_module(2, 10)), suspend(free_module(0, 9))):
        M.certify()
    assert suspend(F).dims()[1:] == F.dims()
    assert phi(F).dims() == [0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 0]


def test_lambda_is_sq0():
    F = free_module(2, 12)
    lam = lambda_map(F)
    for t in F.basis(3):
        assert lam(F2Vector({t})) == F.sq0(F2Vector({t}))


def test_reducedness():
    assert is_reduced(free_module(1, 16))[0]
    assert is_reduced(free_module(3, 12))[0]
    ok, witness = is_reduced(suspend(free_module(0, 8)))
    assert not ok and witness


def test_loops_of_free_modules():
    for n in (1, 2, 3):
        L = Loops(free_module(n, 12))
        ref = suspend(free_module(n - 1, 11))
        assert L.ssm.dims() == ref.dims()
        classical_section(n, 12).check()
    assert [d for d, k in enumerate(Loops(free_module(2, 12)).ssm.dims()) if k] == [2, 3, 5, 9]


def test_loops_module_certifies():
    Loops(free_module(2, 12)).ssm.certify()


def test_sq0_decomposition_dims():
    for n in (1, 2, 3):
        assert sections_equal_dims(free_module(n, 12))


@given(st.integers(0, 10 ** 6))
def test_random_sections_split_projection(seed):
    L = Loops(free_module(2, 12))
    s = L.random_section(seed)
    assert s.check()


def test_loops_rejects_unconnected():
    with pytest.raises(ValueError):
        Loops(free_module(0, 4))


def test_zero_module():
    Z = zero_module(5)
    assert Z.dims() == [0] * 6
    assert Z.is_connected
