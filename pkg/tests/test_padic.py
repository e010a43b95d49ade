import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from ssdefect.ffpoly import random_irreducible
from ssdefect.padic import (
    PadicInt,
    PrecisionError,
    UnramifiedExtElement,
    UnramifiedRing,
    count_quadratic_solutions,
    is_square,
    lift_roots,
    solve_quadratic_in_y,
)

from oracles import peval, tree_search_roots

ELLS = [2, 3, 5, 7, 11, 13]
small = st.integers(min_value=-10**6, max_value=10**6)


@given(st.sampled_from(ELLS), small, small, st.integers(min_value=1, max_value=30))
def test_padic_int_ring_ops(ell, a, b, k):
    A, B = PadicInt.from_int(a, ell, k), PadicInt.from_int(b, ell, k)
    M = ell**k
    assert int(A + B) % M == (a + b) % M
    assert int(A - B) % M == (a - b) % M
    assert int(A * B) % M == (a * b) % M
    assert int(-A) % M == -a % M


@given(st.sampled_from(ELLS), small, st.integers(min_value=2, max_value=30))
def test_padic_inverse_and_valuation(ell, a, k):
    assume(a % ell)
    A = PadicInt.from_int(a, ell, k)
    assert int(A * A.inverse()) % ell**k == 1
    B = PadicInt.from_int(a * ell**3, ell, k + 3)
    assert B.valuation() == 3
    assert int(B.unit_part()) % ell**k == a % ell**k


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(ELLS), st.lists(st.integers(min_value=-200, max_value=200), min_size=1, max_size=5), st.data())
def test_lift_roots_matches_tree_search(ell, roots, data):
    # (x - r1)...(x - rn)(c x + e) with random content in the last factor
    c = data.draw(st.integers(min_value=1, max_value=3 * ell))
    e = data.draw(st.integers(min_value=-50, max_value=50))
    assume(len(set(roots)) == len(roots))
    f = [e, c]
    for r in roots:
        f = [(f[i - 1] if i else 0) - r * (f[i] if i < len(f) else 0) for i in range(len(f) + 1)]
    assume(all(e * 1 != -c * r for r in roots))  # keep f squarefree
    for k in (1, 3, 5):
        got = sorted(int(x) % ell**k for x, _ in lift_roots(f, ell, k=k))
        assert got == tree_search_roots(f, ell, k)


def test_lift_roots_certified_and_exact():
    f = [-2, 0, 1]  # x^2 - 2
    out = lift_roots(f, 7, k=30)
    assert len(out) == 2 and all(cert for _, cert in out)
    for r, _ in out:
        assert peval(f, int(r), 7**30) == 0
    assert lift_roots(f, 5, k=10) == []  # 2 is not a square mod 5


def test_lift_roots_in_unramified_extension():
    ell, d, k = 5, 3, 12
    g = list(random_irreducible(ell, d).coeffs)
    f = [g[0] + ell * 7] + g[1:]  # a lift with different higher digits
    roots = lift_roots(f, ell, d=d, k=k)
    assert len(roots) == 3 and all(cert for _, cert in roots)
    R = roots[0][0].ring
    M = ell**k
    for r, _ in roots:
        val = R.poly_eval([R.const(c, M) for c in f], r.coeffs, M)
        assert R.is_zero(val, M)
    assert lift_roots(f, ell, d=1, k=k) == []


def test_lift_roots_rejects_zero_polynomial():
    with pytest.raises(ValueError):
        lift_roots([0, 0], 3)


@given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(min_value=1, max_value=10**6), st.integers(min_value=0, max_value=4))
def test_is_square_odd(ell, u, v):
    assume(u % ell)
    n = u * ell**v
    expect = v % 2 == 0 and pow(u, (ell - 1) // 2, ell) == 1
    assert is_square(n, ell) == expect
    assert is_square(n * n, ell)


@given(st.integers(min_value=1, max_value=10**6), st.integers(min_value=0, max_value=5))
def test_is_square_two_adic(u, v):
    u = 2 * u + 1
    n = u * 2**v
    assert is_square(n, 2) == (v % 2 == 0 and u % 8 == 1)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(ELLS), small, small)
def test_quadratic_solutions(ell, A, B):
    disc = A * A + 4 * B
    assume(disc != 0)
    k = 30
    sols = solve_quadratic_in_y(A, B, ell, k)
    assert len(sols) == count_quadratic_solutions(A, B, ell, k)
    assert len(sols) == (2 if is_square(disc, ell, k) else 0)
    for y in sols:
        assert (int(y) ** 2 + A * int(y) - B) % ell ** (y.prec) == 0


def test_unramified_ring_arithmetic():
    R = UnramifiedRing.of_degree(3, 2)
    rng = random.Random(1)
    M = 3**10
    for _ in range(30):
        a = tuple(rng.randrange(M) for _ in range(2))
        if R.valuation(a, 10):
            continue
        inv = R.inverse(a, 10)
        assert R.mul(a, inv, M) == R.const(1, M)
    x = R.element((1, 2), 10)
    assert isinstance(x, UnramifiedExtElement)
    assert (x * x - x * x).is_zero()


def test_zero_has_no_square_class():
    with pytest.raises(ValueError):
        is_square(0, 5)
    with pytest.raises(PrecisionError):
        is_square(PadicInt.from_int(5**6, 5, 6))
