"""Finite-precision l-adic integers, plain and in unramified extensions.

Elements of the degree-d unramified extension are kept as integer
coefficient vectors modulo l**prec in the basis 1, a, ..., a**(d-1), where a
is a root of a monic integer lift of an irreducible polynomial over F_l.
For d = 1 the modulus is simply x.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ffpoly import ExtensionField, PrimeField, _roots_with_multiplicity, random_irreducible

import random

__all__ = [
    "PrecisionError",
    "PadicInt",
    "UnramifiedExtElement",
    "UnramifiedRing",
    "lift_roots",
    "is_square",
    "solve_quadratic_in_y",
    "count_quadratic_solutions",
    "DEFAULT_EXTRA_PRECISION",
    "MAX_DEPTH",
]

DEFAULT_EXTRA_PRECISION = 20
PRECISION_DOUBLINGS = 2
MAX_DEPTH = 40


class PrecisionError(ArithmeticError):
    """Raised when a result is not determined at the available precision."""


def _val_int(n: int, ell: int, cap: int) -> int:
    if n == 0:
        return cap
    v = 0
    while n % ell == 0 and v < cap:
        n //= ell
        v += 1
    return v


class UnramifiedRing:
    """Z_l[a]/(h(a)) truncated modulo l**prec, h monic with irreducible reduction."""

    def __init__(self, ell: int, modulus: tuple[int, ...] = (0, 1)):
        if modulus[-1] != 1:
            raise ValueError("modulus must be monic")
        self.ell = ell
        self.modulus = tuple(modulus)
        self.degree = len(modulus) - 1
        self.residue_field = ExtensionField(ell, list(modulus))

    @classmethod
    def of_degree(cls, ell: int, d: int) -> "UnramifiedRing":
        if d == 1:
            return cls(ell)
        h = random_irreducible(ell, d)
        return cls(ell, tuple(h.coeffs))

    def __eq__(self, other):
        return isinstance(other, UnramifiedRing) and (self.ell, self.modulus) == (other.ell, other.modulus)

    def __hash__(self):
        return hash((self.ell, self.modulus))

    # elements are tuples of ints; ``M`` is the current modulus l**prec
    def const(self, c: int, M: int):
        return (c % M,) + (0,) * (self.degree - 1)

    def add(self, a, b, M):
        return tuple((x + y) % M for x, y in zip(a, b))

    def sub(self, a, b, M):
        return tuple((x - y) % M for x, y in zip(a, b))

    def scale(self, a, c, M):
        return tuple(x * c % M for x in a)

    def mul(self, a, b, M):
        d, h = self.degree, self.modulus
        if d == 1:
            return (a[0] * b[0] % M,)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            if c:
                for j in range(d):
                    prod[k - d + j] -= c * h[j]
        return tuple(c % M for c in prod[:d])

    def is_zero(self, a, M):
        return all(x % M == 0 for x in a)

    def valuation(self, a, cap: int) -> int:
        return min(_val_int(x, self.ell, cap) for x in a)

    def divide_by_ell_power(self, a, m):
        q = self.ell**m
        return tuple(x // q for x in a)

    def reduce(self, a):
        return tuple(x % self.ell for x in a)

    def inverse(self, a, prec: int):
        """Inverse of a unit modulo l**prec by Newton iteration."""
        K = self.residue_field
        abar = K.coerce(self.reduce(a))
        if K.is_zero(abar):
            raise ZeroDivisionError("not a unit")
        u = tuple(K.inv(abar))
        k = 1
        while k < prec:
            k = min(2 * k, prec)
            M = self.ell**k
            au = self.mul(a, u, M)
            two_minus = self.sub(self.const(2, M), au, M)
            u = self.mul(u, two_minus, M)
        return u

    def poly_eval(self, f, x, M):
        acc = (0,) * self.degree
        for c in reversed(f):
            acc = self.add(self.mul(acc, x, M), c, M)
        return acc

    def element(self, coeffs, prec: int):
        if self.degree == 1:
            return PadicInt(self.ell, prec, coeffs[0] % self.ell**prec)
        return UnramifiedExtElement(self, prec, tuple(c % self.ell**prec for c in coeffs))


@dataclass(frozen=True)
class PadicInt:
    """An element of Z_l known modulo l**prec."""

    ell: int
    prec: int
    residue: int

    def __post_init__(self):
        if self.prec < 1:
            raise ValueError("precision must be positive")
        object.__setattr__(self, "residue", self.residue % self.ell**self.prec)

    @classmethod
    def from_int(cls, n: int, ell: int, prec: int) -> "PadicInt":
        return cls(ell, prec, n)

    def _coerce(self, other):
        if isinstance(other, PadicInt):
            if other.ell != self.ell:
                raise ValueError("mixed primes")
            return other.residue, other.prec
        return int(other), self.prec

    def __add__(self, other):
        r, k = self._coerce(other)
        return PadicInt(self.ell, min(k, self.prec), self.residue + r)

    __radd__ = __add__

    def __sub__(self, other):
        r, k = self._coerce(other)
        return PadicInt(self.ell, min(k, self.prec), self.residue - r)

    def __rsub__(self, other):
        r, k = self._coerce(other)
        return PadicInt(self.ell, min(k, self.prec), r - self.residue)

    def __neg__(self):
        return PadicInt(self.ell, self.prec, -self.residue)

    def __mul__(self, other):
        r, k = self._coerce(other)
        # absolute precision of a product: min(v(a) + k_b, v(b) + k_a)
        va = self.valuation()
        vb = _val_int(r, self.ell, k)
        prec = min(va + k, vb + self.prec)
        return PadicInt(self.ell, max(prec, 1), self.residue * r)

    __rmul__ = __mul__

    def valuation(self) -> int:
        """Valuation, capped at the precision (so 0 reports ``prec``)."""
        return _val_int(self.residue, self.ell, self.prec)

    def is_zero(self) -> bool:
        return self.residue == 0

    def unit_part(self) -> "PadicInt":
        v = self.valuation()
        if v >= self.prec:
            raise PrecisionError("unit part of an indistinguishable-from-zero element")
        return PadicInt(self.ell, self.prec - v, self.residue // self.ell**v)

    def inverse(self) -> "PadicInt":
        if self.residue % self.ell == 0:
            raise ZeroDivisionError("not a unit")
        return PadicInt(self.ell, self.prec, pow(self.residue, -1, self.ell**self.prec))

    def __int__(self):
        return self.residue

    def __eq__(self, other):
        if isinstance(other, PadicInt):
            k = min(self.prec, other.prec)
            return self.ell == other.ell and (self.residue - other.residue) % self.ell**k == 0
        if isinstance(other, int):
            return (self.residue - other) % self.ell**self.prec == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.ell, self.prec, self.residue))

    def __repr__(self):
        return f"{self.residue} + O({self.ell}^{self.prec})"


@dataclass(frozen=True)
class UnramifiedExtElement:
    """An element of the ring of integers of an unramified extension of Q_l, mod l**prec."""

    ring: UnramifiedRing
    prec: int
    coeffs: tuple

    @property
    def ell(self):
        return self.ring.ell

    @property
    def degree(self):
        return self.ring.degree

    def _coerce(self, other):
        if isinstance(other, UnramifiedExtElement):
            if other.ring != self.ring:
                raise ValueError("elements of different rings")
            return other.coeffs, other.prec
        if isinstance(other, PadicInt):
            return self.ring.const(other.residue, other.ell**other.prec), other.prec
        return self.ring.const(int(other), self.ell**self.prec), self.prec

    def _new(self, coeffs, prec):
        M = self.ell**prec
        return UnramifiedExtElement(self.ring, prec, tuple(c % M for c in coeffs))

    def __add__(self, other):
        c, k = self._coerce(other)
        k = min(k, self.prec)
        return self._new(self.ring.add(self.coeffs, c, self.ell**k), k)

    __radd__ = __add__

    def __sub__(self, other):
        c, k = self._coerce(other)
        k = min(k, self.prec)
        return self._new(self.ring.sub(self.coeffs, c, self.ell**k), k)

    def __rsub__(self, other):
        c, k = self._coerce(other)
        k = min(k, self.prec)
        return self._new(self.ring.sub(c, self.coeffs, self.ell**k), k)

    def __neg__(self):
        return self._new(tuple(-c for c in self.coeffs), self.prec)

    def __mul__(self, other):
        c, k = self._coerce(other)
        va = self.valuation()
        vb = self.ring.valuation(c, k)
        prec = max(min(va + k, vb + self.prec), 1)
        M = self.ell**prec
        return self._new(self.ring.mul(self.coeffs, c, M), prec)

    __rmul__ = __mul__

    def valuation(self) -> int:
        return self.ring.valuation(self.coeffs, self.prec)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def unit_part(self) -> "UnramifiedExtElement":
        v = self.valuation()
        if v >= self.prec:
            raise PrecisionError("unit part of an indistinguishable-from-zero element")
        q = self.ell**v
        return UnramifiedExtElement(self.ring, self.prec - v, tuple(c // q for c in self.coeffs))

    def residue_class(self):
        """Image in the residue field F_{l^d}."""
        return self.ring.residue_field.element(self.ring.reduce(self.coeffs))

    def in_base(self) -> bool:
        return not any(self.coeffs[1:])

    def __eq__(self, other):
        if isinstance(other, UnramifiedExtElement):
            k = min(self.prec, other.prec)
            M = self.ell**k
            return self.ring == other.ring and all((a - b) % M == 0 for a, b in zip(self.coeffs, other.coeffs))
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.prec, self.coeffs))

    def __repr__(self):
        terms = [f"{c}*a^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return f"({' + '.join(terms) or '0'}) + O({self.ell}^{self.prec})"


# -- root lifting -------------------------------------------------------------


def _shift_poly(R: UnramifiedRing, g, r, M):
    """g(r + l*x) as a coefficient list, computed modulo M."""
    ell = R.ell
    zero = (0,) * R.degree
    lin = [r, R.const(ell, M)]
    acc = []
    for c in reversed(g):
        # acc = acc * (r + l x) + c
        new = [zero] * (len(acc) + 1)
        for i, a in enumerate(acc):
            new[i] = R.add(new[i], R.mul(a, lin[0], M), M)
            new[i + 1] = R.add(new[i + 1], R.mul(a, lin[1], M), M)
        new[0] = R.add(new[0], c, M)
        acc = new
    return acc


def _newton(R: UnramifiedRing, g, a, need: int):
    """Lift a simple root a (mod l) of g to precision ``need``."""
    ell = R.ell
    if R.degree == 1:
        G = [c[0] for c in g]
        dG = [i * c for i, c in enumerate(G)][1:]
        x, k = a[0], 1
        while k < need:
            k = min(2 * k, need)
            M = ell**k
            num = den = 0
            for c in reversed(G):
                num = (num * x + c) % M
            for c in reversed(dG):
                den = (den * x + c) % M
            x = (x - num * pow(den, -1, M)) % M
        return (x,)
    dg = [R.scale(c, i, ell**need) for i, c in enumerate(g)][1:]
    k = 1
    while k < need:
        k = min(2 * k, need)
        M = ell**k
        num = R.poly_eval(g, a, M)
        den = R.poly_eval(dg, a, M)
        a = R.sub(a, R.mul(num, R.inverse(den, k), M), M)
    return a


def _roots_rec(R: UnramifiedRing, g, avail: int, need: int, depth: int, max_depth: int, rng):
    ell = R.ell
    M = ell**avail
    g = [tuple(x % M for x in c) for c in g]
    vals = [R.valuation(c, avail) for c in g]
    m = min(vals)
    if m >= avail:
        raise PrecisionError("polynomial vanishes at the working precision")
    if m:
        g = [R.divide_by_ell_power(c, m) for c in g]
        avail -= m
    if R.degree == 1:  # plain ints are much faster than 1-tuples
        K = PrimeField(ell)
        gbar = [c[0] % ell for c in g]
    else:
        K = R.residue_field
        gbar = [K.coerce(R.reduce(c)) for c in g]
    while gbar and K.is_zero(gbar[-1]):
        gbar.pop()
    if len(gbar) <= 1:
        return []
    roots = []
    for rbar, mult in sorted(_roots_with_multiplicity(K, gbar, rng).items()):
        r = (rbar,) if R.degree == 1 else tuple(rbar)
        if mult == 1:
            if avail < need:
                raise PrecisionError("not enough precision for Newton lifting")
            roots.append(_newton(R, g, r, need))
            continue
        if depth >= max_depth:
            raise PrecisionError(f"multiple-root recursion exceeded depth {max_depth}")
        shifted = _shift_poly(R, g, r, ell**avail)
        sub = _roots_rec(R, shifted, avail, max(need - 1, 1), depth + 1, max_depth, rng)
        Mn = ell**need
        for y in sub:
            roots.append(tuple((a + ell * b) % Mn for a, b in zip(r, y)))
    return roots


def _certify(R: UnramifiedRing, f, root, cap: int) -> bool:
    M = R.ell**cap
    fr = R.poly_eval([R.const(c, M) for c in f], root, M)
    df = [R.const(i * c, M) for i, c in enumerate(f)][1:]
    dfr = R.poly_eval(df, root, M)
    vf = R.valuation(fr, cap)
    vd = R.valuation(dfr, cap)
    return vd < cap and vf > 2 * vd


def lift_roots(
    f: list[int],
    ell: int,
    d: int = 1,
    k: int = 20,
    *,
    ring: UnramifiedRing | None = None,
    max_depth: int = MAX_DEPTH,
    extra: int = DEFAULT_EXTRA_PRECISION,
    seed: int = 0,
):
    """All roots of an integer polynomial in the unramified degree-d extension of Z_l.

    ``f`` holds integer coefficients, low degree first, and must be squarefree
    over Q.  Returns ``(root, certified)`` pairs with roots known modulo l**k:
    ``PadicInt`` when d == 1, ``UnramifiedExtElement`` otherwise.  Distinct
    l-adic roots congruent modulo l**k are listed separately.  The working
    precision starts ``extra`` digits above k and is doubled at most twice.
    """
    if ring is None:
        ring = UnramifiedRing.of_degree(ell, d)
    elif ring.degree != d:
        raise ValueError("ring degree does not match d")
    coeffs = list(f)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial")
    last_err = None
    for attempt in range(PRECISION_DOUBLINGS + 1):
        slack = extra * 2**attempt
        avail = k + 2 * slack
        need = k + slack
        M = ell**avail
        g = [ring.const(c, M) for c in coeffs]
        try:
            raw = _roots_rec(ring, g, avail, need, 0, max_depth, random.Random(seed))
        except PrecisionError as err:
            last_err = err
            continue
        out = []
        for r in raw:
            cert = _certify(ring, coeffs, r, 2 * avail)
            out.append((ring.element(r, k), cert))
        return out
    raise PrecisionError(f"root lifting failed after {PRECISION_DOUBLINGS} precision doublings: {last_err}")


# -- squares ------------------------------------------------------------------


def _as_padic(x, ell: int | None, prec: int | None):
    if isinstance(x, (PadicInt, UnramifiedExtElement)):
        return x
    if ell is None:
        raise ValueError("a prime is required for integer/rational input")
    from fractions import Fraction

    q = Fraction(x)
    if q == 0:
        raise ValueError("zero has no defined squareness test here")
    num, den = q.numerator, q.denominator
    vn = _val_int(num, ell, 10**9)
    vd = _val_int(den, ell, 10**9)
    # x = l^(vn - vd) * u with u a unit; squareness only depends on parity and u
    u_num = num // ell**vn
    u_den = den // ell**vd
    k = prec or 8
    unit = u_num * pow(u_den, -1, ell**k) % ell**k
    shift = vn - vd
    if shift % 2:
        return None
    return PadicInt(ell, k, unit)


def is_square(x, ell: int | None = None, prec: int | None = None) -> bool:
    """Whether x is a square in Q_l (or in the unramified extension holding x).

    ``x`` may be a ``PadicInt``, an ``UnramifiedExtElement``, or an exact
    int / Fraction together with ``ell``.
    """
    y = _as_padic(x, ell, prec)
    if y is None:
        return False
    v = y.valuation()
    if v >= y.prec:
        raise PrecisionError("element is zero to the available precision")
    if v % 2:
        return False
    u = y.unit_part()
    ell = u.ell
    if isinstance(u, PadicInt):
        if ell == 2:
            if u.prec < 3:
                raise PrecisionError("unit part needs precision 3 at l = 2")
            return u.residue % 8 == 1
        return pow(u.residue % ell, (ell - 1) // 2, ell) == 1
    K = u.ring.residue_field
    ubar = K.coerce(u.ring.reduce(u.coeffs))
    if ell != 2:
        return K.pow(ubar, (K.order - 1) // 2) == K.one
    if u.prec < 3:
        raise PrecisionError("unit part needs precision 3 at l = 2")
    # w^2 = u mod 8: w0 is forced mod 2 (Frobenius is bijective), scan w1
    R = u.ring
    w0 = K.pow(ubar, K.order // 2)
    target = tuple(c % 8 for c in u.coeffs)
    for w1 in K.elements():
        w = tuple(a + 2 * b for a, b in zip(w0, w1))
        if R.mul(w, w, 8) == target:
            return True
    return False


def _ring_of(x):
    if isinstance(x, PadicInt):
        return UnramifiedRing(x.ell), (x.residue,)
    return x.ring, x.coeffs


def _sqrt(u):
    """A square root of a square unit; precision drops by up to 2 digits at l = 2."""
    R, coeffs = _ring_of(u)
    ell = u.ell
    M = ell**u.prec
    g = [tuple(-c % M for c in coeffs), (0,) * R.degree, R.const(1, M)]
    need = u.prec if ell != 2 else u.prec - 2
    while need >= 1:
        try:
            roots = _roots_rec(R, g, u.prec, need, 0, MAX_DEPTH, random.Random(0))
        except PrecisionError:
            need -= 1
            continue
        if roots:
            return R.element(roots[0], need)
        break
    raise PrecisionError("square root not determined at this precision")


def _lift_input(x, like, ell, prec):
    if isinstance(x, (PadicInt, UnramifiedExtElement)):
        return x
    if like is not None:
        if isinstance(like, PadicInt):
            return PadicInt(like.ell, like.prec, int(x))
        return UnramifiedExtElement(like.ring, like.prec, like.ring.const(int(x), like.ell**like.prec))
    if ell is None:
        raise ValueError("a prime is required for integer input")
    return PadicInt(ell, prec or 20, int(x))


def solve_quadratic_in_y(A, B, ell: int | None = None, prec: int | None = None):
    """Solutions y of y**2 + A*y - B = 0 in Q_l (or the extension holding A, B).

    Completes the square: y = (-A +- sqrt(A**2 + 4B)) / 2, which is valid at
    every l since 2 is invertible in Q_l.  Returns 0 or 2 solutions.  A and B
    may be ``PadicInt`` / ``UnramifiedExtElement`` or integers together with
    ``ell`` and ``prec``.
    """
    like = A if isinstance(A, (PadicInt, UnramifiedExtElement)) else B if isinstance(B, (PadicInt, UnramifiedExtElement)) else None
    A = _lift_input(A, like, ell, prec)
    B = _lift_input(B, like, ell, prec)
    disc = A * A + 4 * B
    if disc.is_zero():
        raise PrecisionError("discriminant vanishes to working precision")
    if not is_square(disc):
        return []
    v = disc.valuation()
    s = _sqrt(disc.unit_part()) * disc.ell ** (v // 2)
    if disc.ell != 2:
        half = (disc.ell ** disc.prec + 1) // 2
        return [(s - A) * half, (-s - A) * half]
    out = []
    for root in (s, -s):
        num = root - A
        R, coeffs = _ring_of(num)
        if num.prec < 2 or any(c % 2 for c in coeffs):
            raise PrecisionError("cannot halve at the available 2-adic precision")
        out.append(R.element(tuple(c // 2 for c in coeffs), num.prec - 1))
    return out


def count_quadratic_solutions(A, B, ell: int | None = None, prec: int | None = None) -> int:
    """Number of y with y**2 + A*y - B = 0, without extracting the roots.

    A root in Q_l of a monic integral quadratic is automatically integral,
    so a nonzero discriminant that is a square gives two solutions.
    """
    like = A if isinstance(A, (PadicInt, UnramifiedExtElement)) else B if isinstance(B, (PadicInt, UnramifiedExtElement)) else None
    A = _lift_input(A, like, ell, prec)
    B = _lift_input(B, like, ell, prec)
    disc = A * A + 4 * B
    if disc.is_zero():
        raise PrecisionError("discriminant vanishes to working precision")
    return 2 if is_square(disc) else 0
