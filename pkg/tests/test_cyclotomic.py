import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ssdefect.arith import small_primes
from ssdefect.cyclotomic import (
    multiplicative_order,
    oracle_stable_value,
    splitting_number,
    splitting_number_oracle,
)

ELLS = [q for q in small_primes(20000) if q > 5]


@given(st.sampled_from(ELLS), st.sampled_from([3, 5, 7]))
def test_k_is_valuation(ell, p):
    if ell == p:
        return
    sn = splitting_number(ell, p)
    assert sn.k == sympy.multiplicity(p, ell ** (p - 1) - 1)
    assert sn.s == p ** (sn.k - 1)


@settings(max_examples=100)
@given(st.sampled_from(ELLS), st.sampled_from([3, 5, 7]))
def test_oracle_stabilizes_at_s(ell, p):
    if ell == p:
        return
    sn = splitting_number(ell, p)
    trace = splitting_number_oracle(ell, p, min(12, sn.k + 2))
    value, first = oracle_stable_value(trace)
    assert value == sn.s
    assert first <= sn.k
    assert all(a <= b for a, b in zip(trace, trace[1:]))  # counts never drop


@given(st.integers(min_value=2, max_value=10**6), st.sampled_from([3, 5, 7]), st.integers(min_value=1, max_value=6))
def test_multiplicative_order_matches_sympy(a, p, e):
    if a % p == 0:
        return
    assert multiplicative_order(a, p, e) == sympy.n_order(a, p**e)


def test_discrepancy_prime():
    sn = splitting_number(2840183, 3)
    assert (sn.k, sn.s) == (6, 243)
    trace = splitting_number_oracle(2840183, 3, 12)
    assert trace[:5] == [1, 1, 1, 1, 1] or trace[4] == 243
    assert oracle_stable_value(trace) == (243, 5)


@pytest.mark.parametrize(
    "ell,p,s",
    [(587, 3, 1), (359, 3, 3), (37, 3, 3), (179, 3, 3), (2053, 3, 9), (29, 5, 1), (7, 5, 5)],
)
def test_known_values(ell, p, s):
    assert splitting_number(ell, p).s == s


def test_argument_checks():
    for args in ((3, 3), (9, 3), (7, 2), (7, 9)):
        with pytest.raises(ValueError):
            splitting_number(*args)
    with pytest.raises(ValueError):
        splitting_number_oracle(7, 3, 0)
    with pytest.raises(ValueError):
        splitting_number_oracle(7, 3, 13)
    with pytest.raises(ValueError):
        multiplicative_order(9, 3, 2)


def test_oracle_stable_value_plateau():
    assert oracle_stable_value([1, 3, 9, 9, 9]) == (9, 3)
    assert oracle_stable_value([1]) == (1, 1)


@settings(max_examples=60)
@given(st.sampled_from(ELLS), st.sampled_from([3, 5]), st.integers(min_value=1, max_value=400))
def test_k_depends_only_on_the_class_mod_p_to_the_k_plus_one(ell, p, start):
    if ell == p:
        return
    k = splitting_number(ell, p).k
    step = p ** (k + 1)
    m = start
    while not sympy.isprime(ell + step * m):
        m += 1
    assert splitting_number(ell + step * m, p).k == k


@given(st.sampled_from(ELLS), st.sampled_from([3, 5, 7]))
def test_generic_primes_are_inert(ell, p):
    if ell == p or pow(ell, p - 1, p * p) == 1:
        return
    assert splitting_number(ell, p).s == 1

