"""Polynomials over F_l and over F_{l^d}, and their roots.

Field elements are handled through small field objects (``PrimeField`` and
``ExtensionField``) so that the same gcd / powering / splitting routines serve
both the prime field and its extensions.  Polynomials are plain lists of
field elements, low degree first, with no trailing zeros.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

from .arith import is_prime

__all__ = [
    "PrimeField",
    "ExtensionField",
    "ExtFieldElement",
    "FpPoly",
    "roots_mod_prime",
    "roots_in_extension",
    "random_irreducible",
    "is_irreducible",
]


class PrimeField:
    """F_l with elements as ints in [0, l)."""

    degree = 1

    def __init__(self, ell: int):
        self.ell = ell
        self.order = ell
        self.zero = 0
        self.one = 1

    def __repr__(self):
        return f"PrimeField({self.ell})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.ell == self.ell

    def __hash__(self):
        return hash(("F", self.ell))

    def coerce(self, a):
        return a % self.ell

    def add(self, a, b):
        return (a + b) % self.ell

    def sub(self, a, b):
        return (a - b) % self.ell

    def neg(self, a):
        return -a % self.ell

    def mul(self, a, b):
        return a * b % self.ell

    def inv(self, a):
        return pow(a, -1, self.ell)

    def is_zero(self, a):
        return a == 0

    def random(self, rng: random.Random):
        return rng.randrange(self.ell)

    def elements(self):
        return range(self.ell)


class ExtensionField:
    """F_{l^d} = F_l[x]/(h) with elements as coefficient tuples of length d."""

    def __init__(self, ell: int, modulus: list[int]):
        h = [c % ell for c in modulus]
        if len(h) < 2 or h[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 1")
        self.ell = ell
        self.modulus = tuple(h)
        self.degree = len(h) - 1
        self.order = ell**self.degree
        self.zero = (0,) * self.degree
        self.one = (1,) + (0,) * (self.degree - 1)

    def __repr__(self):
        return f"ExtensionField({self.ell}, {list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and (other.ell, other.modulus) == (self.ell, self.modulus)

    def __hash__(self):
        return hash(("E", self.ell, self.modulus))

    def coerce(self, a):
        if isinstance(a, int):
            return ((a % self.ell),) + (0,) * (self.degree - 1)
        if isinstance(a, ExtFieldElement):
            return a.coeffs
        a = tuple(c % self.ell for c in a)
        return a + (0,) * (self.degree - len(a))

    def gen(self):
        if self.degree == 1:
            return ((-self.modulus[0]) % self.ell,)
        return (0, 1) + (0,) * (self.degree - 2)

    def add(self, a, b):
        p = self.ell
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.ell
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.ell
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        p, d, h = self.ell, self.degree, self.modulus
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k] % p
            if c:
                for j in range(d):
                    prod[k - d + j] -= c * h[j]
        return tuple(c % p for c in prod[:d])

    def pow(self, a, e):
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a):
        # extended Euclid in F_l[x] against the modulus
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero in extension field")
        p, d = self.ell, self.degree
        r0, r1 = list(self.modulus), _int_trim(list(a))
        s0, s1 = [], [1]
        while len(r1) > 1:
            inv_lead = pow(r1[-1], -1, p)
            q = [0] * (len(r0) - len(r1) + 1)
            r = r0[:]
            for k in range(len(r) - 1, len(r1) - 2, -1):
                c = r[k] * inv_lead % p
                if c:
                    q[k - len(r1) + 1] = c
                    for j, y in enumerate(r1):
                        r[k - len(r1) + 1 + j] = (r[k - len(r1) + 1 + j] - c * y) % p
            r0, r1 = r1, _int_trim(r[: len(r1) - 1])
            qs = [0] * (len(q) + len(s1))
            for i, x in enumerate(q):
                for j, y in enumerate(s1):
                    qs[i + j] += x * y
            s2 = s0 + [0] * (len(qs) - len(s0))
            for i, y in enumerate(qs):
                s2[i] = (s2[i] - y) % p
            s0, s1 = s1, _int_trim(s2)
        c = pow(r1[0], -1, p)
        out = [x * c % p for x in s1] + [0] * d
        return tuple(out[:d])

    def is_zero(self, a):
        return not any(a)

    def random(self, rng: random.Random):
        return tuple(rng.randrange(self.ell) for _ in range(self.degree))

    def elements(self):
        p, d = self.ell, self.degree
        for n in range(self.order):
            digits = []
            for _ in range(d):
                n, r = divmod(n, p)
                digits.append(r)
            yield tuple(digits)

    def element(self, a) -> "ExtFieldElement":
        return ExtFieldElement(self, self.coerce(a))


def _int_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


@dataclass(frozen=True)
class ExtFieldElement:
    """An element of F_{l^d}, stored as its residue modulo the defining polynomial."""

    field: ExtensionField
    coeffs: tuple

    @property
    def ell(self):
        return self.field.ell

    @property
    def degree(self):
        return self.field.degree

    def _other(self, o):
        return o.coeffs if isinstance(o, ExtFieldElement) else self.field.coerce(o)

    def __add__(self, o):
        return ExtFieldElement(self.field, self.field.add(self.coeffs, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return ExtFieldElement(self.field, self.field.sub(self.coeffs, self._other(o)))

    def __rsub__(self, o):
        return ExtFieldElement(self.field, self.field.sub(self._other(o), self.coeffs))

    def __neg__(self):
        return ExtFieldElement(self.field, self.field.neg(self.coeffs))

    def __mul__(self, o):
        return ExtFieldElement(self.field, self.field.mul(self.coeffs, self._other(o)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return ExtFieldElement(self.field, self.field.pow(self.field.inv(self.coeffs), -e))
        return ExtFieldElement(self.field, self.field.pow(self.coeffs, e))

    def inverse(self):
        return ExtFieldElement(self.field, self.field.inv(self.coeffs))

    def is_zero(self):
        return self.field.is_zero(self.coeffs)

    def in_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    def __repr__(self):
        terms = [f"{c}*a^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


# -- generic dense polynomial helpers over a field object ---------------------


def _trim(F, f):
    while f and F.is_zero(f[-1]):
        f.pop()
    return f


def padd(F, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else F.zero
        b = g[i] if i < len(g) else F.zero
        out.append(F.add(a, b))
    return _trim(F, out)


def psub(F, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else F.zero
        b = g[i] if i < len(g) else F.zero
        out.append(F.sub(a, b))
    return _trim(F, out)


def pmul(F, f, g):
    if not f or not g:
        return []
    if isinstance(F, PrimeField):
        p = F.ell
        out = [0] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            if a:
                for j, b in enumerate(g):
                    out[i + j] += a * b
        return _trim(F, [c % p for c in out])
    out = [F.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if F.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = F.add(out[i + j], F.mul(a, b))
    return _trim(F, out)


def pdivmod(F, f, g):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = len(g) - 1
    inv_lead = F.one if g[-1] == F.one else F.inv(g[-1])
    if len(f) <= dg:
        return [], _trim(F, f)
    q = [F.zero] * (len(f) - dg)
    if isinstance(F, PrimeField):
        p = F.ell
        for k in range(len(f) - 1, dg - 1, -1):
            c = f[k] % p * inv_lead % p
            if c:
                q[k - dg] = c
                base = k - dg
                for j in range(dg + 1):
                    f[base + j] -= c * g[j]
        return _trim(F, q), _trim(F, [x % p for x in f[:dg]])
    for k in range(len(f) - 1, dg - 1, -1):
        c = F.mul(f[k], inv_lead)
        if F.is_zero(c):
            continue
        q[k - dg] = c
        for j in range(dg + 1):
            f[k - dg + j] = F.sub(f[k - dg + j], F.mul(c, g[j]))
    return _trim(F, q), _trim(F, f[:dg])


def pmod(F, f, g):
    return pdivmod(F, f, g)[1]


def pmonic(F, f):
    if not f:
        return f
    inv = F.inv(f[-1])
    return [F.mul(c, inv) for c in f]


def pgcd(F, f, g):
    f, g = list(f), list(g)
    while g:
        f, g = g, pmod(F, f, g)
    return pmonic(F, f)


def ppowmod(F, f, e, m):
    """f**e mod m."""
    result = [F.one]
    base = pmod(F, f, m)
    while e:
        if e & 1:
            result = pmod(F, pmul(F, result, base), m)
        base = pmod(F, pmul(F, base, base), m)
        e >>= 1
    return pmod(F, result, m) if len(m) > 1 else []


def peval(F, f, x):
    acc = F.zero
    for c in reversed(f):
        acc = F.add(F.mul(acc, x), c)
    return acc


def pderiv(F, f):
    out = []
    for i in range(1, len(f)):
        out.append(F.mul(F.coerce(i), f[i]))
    return _trim(F, out)


def _frobenius_power(F, g, k):
    """x**(q**k) mod g, q = |F|, via k successive q-th powers."""
    x = [F.zero, F.one]
    r = pmod(F, x, g)
    for _ in range(k):
        r = ppowmod(F, r, F.order, g)
    return r


def _split_linear(F, g, rng):
    """Distinct roots of a monic g that splits into distinct linear factors over F."""
    if len(g) <= 1:
        return []
    if len(g) == 2:
        return [F.neg(g[0])]
    if F.order <= 64:
        return [a for a in F.elements() if F.is_zero(peval(F, g, a))]
    while True:
        delta = F.random(rng)
        if F.ell == 2:
            # additive trace map splits over characteristic 2
            k = F.degree
            t = pmod(F, [F.zero, delta], g)
            acc = list(t)
            for _ in range(k - 1):
                t = pmod(F, pmul(F, t, t), g)
                acc = padd(F, acc, t)
            h = pgcd(F, g, acc)
        else:
            r = ppowmod(F, [delta, F.one], (F.order - 1) // 2, g)
            h = pgcd(F, g, psub(F, r, [F.one]))
        if 1 < len(h) < len(g):
            q, _ = pdivmod(F, g, h)
            return _split_linear(F, h, rng) + _split_linear(F, pmonic(F, q), rng)


def _roots_with_multiplicity(F, f, rng):
    f = _trim(F, list(f))
    if not f:
        raise ValueError("zero polynomial has every element as a root")
    f = pmonic(F, f)
    if len(f) == 1:
        return {}
    xq = _frobenius_power(F, f, 1)
    g = pgcd(F, f, psub(F, xq, [F.zero, F.one]))
    roots = _split_linear(F, g, rng)
    out = {}
    for r in roots:
        m = 0
        rest = f
        lin = [F.neg(r), F.one]
        while True:
            q, rem = pdivmod(F, rest, lin)
            if rem:
                break
            rest = q
            m += 1
        out[r] = m
    return out


@dataclass(frozen=True)
class FpPoly:
    """Polynomial over F_l; ``coeffs`` low degree first, reduced, no trailing zeros."""

    ell: int
    coeffs: tuple

    def __post_init__(self):
        c = [x % self.ell for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_ints(cls, coeffs, ell: int) -> "FpPoly":
        return cls(ell, tuple(coeffs))

    @cached_property
    def field(self) -> PrimeField:
        return PrimeField(self.ell)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: int) -> int:
        return peval(self.field, list(self.coeffs), x % self.ell)

    def __mul__(self, other: "FpPoly") -> "FpPoly":
        return FpPoly(self.ell, tuple(pmul(self.field, list(self.coeffs), list(other.coeffs))))

    def __add__(self, other: "FpPoly") -> "FpPoly":
        return FpPoly(self.ell, tuple(padd(self.field, list(self.coeffs), list(other.coeffs))))

    def __sub__(self, other: "FpPoly") -> "FpPoly":
        return FpPoly(self.ell, tuple(psub(self.field, list(self.coeffs), list(other.coeffs))))

    def __divmod__(self, other: "FpPoly"):
        q, r = pdivmod(self.field, list(self.coeffs), list(other.coeffs))
        return FpPoly(self.ell, tuple(q)), FpPoly(self.ell, tuple(r))

    def gcd(self, other: "FpPoly") -> "FpPoly":
        return FpPoly(self.ell, tuple(pgcd(self.field, list(self.coeffs), list(other.coeffs))))

    def derivative(self) -> "FpPoly":
        return FpPoly(self.ell, tuple(pderiv(self.field, list(self.coeffs))))

    def __repr__(self):
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c:
                terms.append(str(c) if i == 0 else f"{c}*x^{i}" if i > 1 else f"{c}*x")
        return f"FpPoly[{self.ell}]({' + '.join(terms) or '0'})"


def roots_mod_prime(f: FpPoly, seed: int = 0) -> dict[int, int]:
    """Roots of f in F_l mapped to their multiplicities."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    rng = random.Random(seed)
    roots = _roots_with_multiplicity(f.field, list(f.coeffs), rng)
    return dict(sorted(roots.items()))


def is_irreducible(f: FpPoly) -> bool:
    """Ben-Or test: no factor of degree <= deg/2."""
    F = f.field
    g = pmonic(F, list(f.coeffs))
    n = len(g) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    x = [0, 1]
    r = pmod(F, x, g)
    for _ in range(n // 2):
        r = ppowmod(F, r, f.ell, g)
        if len(pgcd(F, g, psub(F, r, x))) > 1:
            return False
    return True


def random_irreducible(ell: int, d: int, seed: int | None = None) -> FpPoly:
    """Monic irreducible of degree d over F_l.

    Without a seed the smallest one is returned, ordering candidates by the
    base-l number formed from their lower coefficients (constant term least
    significant); with a seed the search starts from a random candidate.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    total = ell**d
    start = 0 if seed is None else random.Random(seed).randrange(total)
    if seed is None and d > 1 and is_prime(d) and (ell - 1) % d:
        # every element is a d-th power, so no binomial x^d + c is irreducible
        start = ell
    for k in range(total):
        n = (start + k) % total
        coeffs = []
        for _ in range(d):
            n, r = divmod(n, ell)
            coeffs.append(r)
        f = FpPoly(ell, tuple(coeffs) + (1,))
        if is_irreducible(f):
            return f
    raise RuntimeError("no irreducible polynomial found")  # unreachable for d >= 1


def _extension(ell: int, d: int, modulus: FpPoly | None = None) -> ExtensionField:
    if modulus is None:
        modulus = random_irreducible(ell, d)
    if modulus.degree != d:
        raise ValueError("modulus degree mismatch")
    return ExtensionField(ell, list(modulus.coeffs))


def roots_in_extension(f: FpPoly, d: int, modulus: FpPoly | None = None, seed: int = 0) -> dict[ExtFieldElement, int]:
    """Roots of f in F_{l^d} (mapped to multiplicities).

    The field is F_l[x]/(modulus); by default the canonical irreducible
    from :func:`random_irreducible`.
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    K = _extension(f.ell, d, modulus)
    coeffs = [K.coerce(c) for c in f.coeffs]
    rng = random.Random(seed)
    roots = _roots_with_multiplicity(K, coeffs, rng)
    return {K.element(r): m for r, m in sorted(roots.items())}
