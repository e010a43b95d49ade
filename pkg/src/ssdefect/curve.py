"""Weierstrass models over Q: invariants, minimal models, Tate's algorithm,
point counts over F_p and the supersingularity check used for families."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import Factorization, FactorizationIncomplete, factor, is_prime, jacobi, valuation
from .ffpoly import FpPoly, roots_mod_prime

__all__ = [
    "SingularCurveError",
    "BadReductionError",
    "WeierstrassCurve",
    "LocalReductionData",
    "HypOneVerdict",
    "parse_curve",
    "minimal_model",
    "tate_local",
    "local_data",
    "conductor",
    "count_points_mod_p",
    "ap",
    "check_hyp1",
]


class SingularCurveError(ValueError):
    pass


class BadReductionError(ValueError):
    pass


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integer coefficients."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    b2: int = field(init=False, repr=False)
    b4: int = field(init=False, repr=False)
    b6: int = field(init=False, repr=False)
    b8: int = field(init=False, repr=False)
    c4: int = field(init=False, repr=False)
    c6: int = field(init=False, repr=False)
    discriminant: int = field(init=False, repr=False)

    def __post_init__(self):
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = a1 * a3 + 2 * a4
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        c4 = b2 * b2 - 24 * b4
        c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
        disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        if disc == 0:
            raise SingularCurveError(f"singular Weierstrass equation {list(self.ainvs)}")
        for name, val in zip(("b2", "b4", "b6", "b8", "c4", "c6", "discriminant"), (b2, b4, b6, b8, c4, c6, disc)):
            object.__setattr__(self, name, val)

    @classmethod
    def from_ainvs(cls, ainvs) -> "WeierstrassCurve":
        ainvs = [int(a) for a in ainvs]
        if len(ainvs) == 2:
            ainvs = [0, 0, 0] + ainvs
        if len(ainvs) != 5:
            raise ValueError("expected [a4, a6] or [a1, a2, a3, a4, a6]")
        return cls(*ainvs)

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4**3, self.discriminant)

    def invariants(self) -> dict:
        return {
            "b2": self.b2,
            "b4": self.b4,
            "b6": self.b6,
            "b8": self.b8,
            "c4": self.c4,
            "c6": self.c6,
            "discriminant": self.discriminant,
            "j": str(self.j_invariant),
        }

    def transform(self, r=0, s=0, t=0, u=1) -> "WeierstrassCurve":
        """Model for x = u^2 x' + r, y = u^3 y' + s u^2 x' + t (must stay integral)."""
        a1, a2, a3, a4, a6 = (Fraction(a) for a in self.ainvs)
        r, s, t, u = Fraction(r), Fraction(s), Fraction(t), Fraction(u)
        n1 = a1 + 2 * s
        n2 = a2 - s * a1 + 3 * r - s * s
        n3 = a3 + r * a1 + 2 * t
        n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
        n6 = a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1
        new = [n1 / u, n2 / u**2, n3 / u**3, n4 / u**4, n6 / u**6]
        if any(x.denominator != 1 for x in new):
            raise ValueError("transformation does not give an integral model")
        return WeierstrassCurve(*(int(x) for x in new))

    def _rst(self, r: int, s: int, t: int) -> "WeierstrassCurve":
        a1, a2, a3, a4, a6 = self.ainvs
        return WeierstrassCurve(
            a1 + 2 * s,
            a2 - s * a1 + 3 * r - s * s,
            a3 + r * a1 + 2 * t,
            a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
        )

    def is_on_curve_mod(self, x: int, y: int, n: int) -> bool:
        a1, a2, a3, a4, a6 = self.ainvs
        return (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % n == 0

    def __str__(self):
        return "[" + ",".join(str(a) for a in self.ainvs) + "]"

    def to_list(self) -> list[int]:
        return list(self.ainvs)


def parse_curve(text: str) -> WeierstrassCurve:
    """Parse a curve literal ``[a1,a2,a3,a4,a6]`` or ``[a4,a6]``."""
    try:
        coeffs = json.loads(text)
    except json.JSONDecodeError as err:
        raise ValueError(f"not a curve literal: {text!r}") from err
    if not isinstance(coeffs, list) or not all(isinstance(c, int) for c in coeffs):
        raise ValueError(f"not a curve literal: {text!r}")
    return WeierstrassCurve.from_ainvs(coeffs)


# -- minimal models (Laska-Kraus-Connell) -------------------------------------


def _kraus_ok(c4: int, c6: int, p: int) -> bool:
    """Kraus's conditions at p for (c4, c6) to come from an integral model."""
    if p == 3:
        return c6 == 0 or valuation(c6, 3) != 2
    if p == 2:
        if c4 % 2:
            return c6 % 4 == 3
        return c4 % 16 == 0 and c6 % 32 in (0, 8)
    return True


def _model_from_c4c6(c4: int, c6: int) -> WeierstrassCurve:
    b2 = (-c6) % 12
    if b2 > 6:
        b2 -= 12
    b4 = (b2 * b2 - c4) // 24
    b6 = (-(b2**3) + 36 * b2 * b4 - c6) // 216
    a1 = b2 % 2
    a3 = b6 % 2
    a2 = (b2 - a1) // 4
    a4 = (b4 - a1 * a3) // 2
    a6 = (b6 - a3) // 4
    return WeierstrassCurve(a1, a2, a3, a4, a6)


def _val(n: int, p: int) -> int:
    return valuation(n, p) if n else 10**9


def minimal_model(curve: WeierstrassCurve) -> tuple[WeierstrassCurve, tuple]:
    """Global minimal model and the transformation (u, r, s, t) reaching it.

    The returned model is the reduced one (a1, a3 in {0, 1}, a2 in {-1, 0, 1}).
    """
    c4, c6, disc = curve.c4, curve.c6, curve.discriminant
    u = 1
    for p in _twelfth_power_candidates(disc, c4, c6):
        e = min(_val(c4, p) // 4, _val(c6, p) // 6, valuation(disc, p) // 12)
        while e > 0 and not _kraus_ok(c4 // p ** (4 * e), c6 // p ** (6 * e), p):
            e -= 1
        u *= p**e
    model = _model_from_c4c6(c4 // u**4, c6 // u**6)
    return model, _find_transformation(curve, model, u)


def _twelfth_power_candidates(disc, c4, c6):
    g = math.gcd(math.gcd(abs(c4), abs(c6)), abs(disc))
    out = []
    for p, _ in factor(g).primes.items():
        if valuation(disc, p) >= 12:
            out.append(p)
    return out


def _find_transformation(curve, model, u):
    a1, a2, a3, _, _ = curve.ainvs
    m1, m2, m3, _, _ = model.ainvs
    for uu in (u, -u):
        s = Fraction(uu * m1 - a1, 2)
        r = Fraction(uu * uu * m2 - a2 + s * a1 + s * s, 3)
        t = Fraction(uu**3 * m3 - a3 - r * a1, 2)
        try:
            if curve.transform(r, s, t, uu) == model:
                return (uu, r, s, t)
        except ValueError:
            continue
    raise AssertionError("minimal model is not isomorphic to the input")  # pragma: no cover


# -- Tate's algorithm ---------------------------------------------------------


@dataclass(frozen=True)
class LocalReductionData:
    prime: int
    reduction_type: str  # good, multiplicative-split, multiplicative-nonsplit, additive
    kodaira: str
    conductor_exponent: int
    tamagawa: int
    disc_valuation: int
    minimal_disc_valuation: int

    @property
    def is_good(self) -> bool:
        return self.conductor_exponent == 0

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "reduction_type": self.reduction_type,
            "kodaira": self.kodaira,
            "conductor_exponent": self.conductor_exponent,
            "tamagawa": self.tamagawa,
            "minimal_disc_valuation": self.minimal_disc_valuation,
        }


def _has_root_quadratic(a: int, b: int, c: int, p: int) -> bool:
    """Whether a X^2 + b X + c has a root in F_p."""
    a, b, c = a % p, b % p, c % p
    if p == 2:
        return c == 0 or (a + b + c) % 2 == 0
    if a == 0:
        return b != 0 or c == 0
    d = (b * b - 4 * a * c) % p
    return d == 0 or jacobi(d, p) == 1


def _count_cubic_roots(b: int, c: int, d: int, p: int) -> int:
    """Number of distinct roots of T^3 + bT^2 + cT + d in F_p."""
    if p < 50:
        return sum(1 for x in range(p) if (x**3 + b * x * x + c * x + d) % p == 0)
    return len(roots_mod_prime(FpPoly(p, (d, c, b, 1))))


def _root_mod(x: int, e: int, p: int) -> int:
    """A root of X^e = x mod p for (p, e) = (2, 2) or (3, 3): Frobenius is the identity."""
    return x % p


def tate_local(curve: WeierstrassCurve, p: int) -> LocalReductionData:
    """Local reduction data at p (Kodaira symbol, conductor exponent, Tamagawa number).

    Runs Tate's algorithm in full, including p = 2 and 3; a non-minimal
    equation is rescaled and the algorithm restarts.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    E = curve
    vdisc0 = valuation(E.discriminant, p)
    pdiv = lambda x: x % p == 0  # noqa: E731
    pval = lambda x: _val(x, p)  # noqa: E731
    pinv = lambda x: pow(x % p, -1, p)  # noqa: E731
    half = pow(2, -1, p) if p != 2 else None

    while True:
        a1, a2, a3, a4, a6 = E.ainvs
        b2, b4, b6, b8 = E.b2, E.b4, E.b6, E.b8
        c4, c6 = E.c4, E.c6
        n = valuation(E.discriminant, p)
        if n == 0:
            return LocalReductionData(p, "good", "I0", 0, 1, vdisc0, 0)

        # move the singular point to (0, 0)
        if p == 2:
            if pdiv(b2):
                r = _root_mod(a4, 2, 2)
                t = _root_mod(((r + a2) * r + a4) * r + a6, 2, 2)
            else:
                inv = pinv(a1)
                r = inv * a3
                t = inv * (a4 + r * r)
        elif p == 3:
            r = _root_mod(-b6, 3, 3) if pdiv(b2) else -pinv(b2) * b4
            t = a1 * r + a3
        else:
            r = -pinv(12) * b2 if pdiv(c4) else -pinv(12 * c4) * (c6 + b2 * c4)
            t = -half * (a1 * r + a3)
        E = E._rst(r % p, 0, t % p)
        a1, a2, a3, a4, a6 = E.ainvs
        b2, b4, b6, b8 = E.b2, E.b4, E.b6, E.b8

        if not pdiv(c4):
            if _has_root_quadratic(1, a1, -a2, p):
                return LocalReductionData(p, "multiplicative-split", f"I{n}", 1, n, vdisc0, n)
            return LocalReductionData(p, "multiplicative-nonsplit", f"I{n}", 1, 2 if n % 2 == 0 else 1, vdisc0, n)

        if pval(a6) < 2:
            return LocalReductionData(p, "additive", "II", n, 1, vdisc0, n)
        if pval(b8) < 3:
            return LocalReductionData(p, "additive", "III", n - 1, 2, vdisc0, n)
        if pval(b6) < 3:
            cp = 3 if _has_root_quadratic(1, a3 // p, -a6 // (p * p), p) else 1
            return LocalReductionData(p, "additive", "IV", n - 2, cp, vdisc0, n)

        # p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = _root_mod(a2, 2, 2)
            t = 2 * _root_mod(a6 // 4, 2, 2)
        elif p == 3:
            s, t = a1, a3
        else:
            s, t = -a1 * half, -a3 * half
        E = E._rst(0, s, t)
        a1, a2, a3, a4, a6 = E.ainvs

        b = a2 // p
        c = a4 // (p * p)
        d = a6 // p**3
        w = 27 * d * d - b * b * c * c + 4 * b**3 * d - 18 * b * c * d + 4 * c**3
        x = 3 * c - b * b
        if not pdiv(w):
            cp = 1 + _count_cubic_roots(b, c, d, p)
            return LocalReductionData(p, "additive", "I0*", n - 4, cp, vdisc0, n)

        if not pdiv(x):
            # double root: move it to 0, then peel off I_m^* layers
            if p == 2:
                r = _root_mod(c, 2, 2)
            elif p == 3:
                r = c * pinv(b)
            else:
                r = (b * c - 9 * d) * pinv(2 * x)
            E = E._rst(p * (r % p), 0, 0)
            a1, a2, a3, a4, a6 = E.ainvs
            m = 1
            mx = my = p * p
            cp = 0
            while cp == 0:
                xa2 = a2 // p
                xa3 = a3 // my
                xa4 = a4 // (p * mx)
                xa6 = a6 // (mx * my)
                if pdiv(xa3 * xa3 + 4 * xa6):
                    t = my * _root_mod(xa6, 2, 2) if p == 2 else my * ((-xa3 * half) % p)
                    E = E._rst(0, 0, t)
                    a1, a2, a3, a4, a6 = E.ainvs
                    my *= p
                    m += 1
                    xa2 = a2 // p
                    xa3 = a3 // my
                    xa4 = a4 // (p * mx)
                    xa6 = a6 // (mx * my)
                    if pdiv(xa4 * xa4 - 4 * xa2 * xa6):
                        if p == 2:
                            r = mx * _root_mod(xa6 * pinv(xa2), 2, 2)
                        else:
                            r = mx * ((-xa4 * pinv(2 * xa2)) % p)
                        E = E._rst(r, 0, 0)
                        a1, a2, a3, a4, a6 = E.ainvs
                        mx *= p
                        m += 1
                    else:
                        cp = 4 if _has_root_quadratic(xa2, xa4, xa6, p) else 2
                else:
                    cp = 4 if _has_root_quadratic(1, xa3, -xa6, p) else 2
            return LocalReductionData(p, "additive", f"I{m}*", n - m - 4, cp, vdisc0, n)

        # triple root: move it to 0
        if p == 2:
            r = b
        elif p == 3:
            r = _root_mod(-d, 3, 3)
        else:
            r = -b * pinv(3)
        E = E._rst(p * (r % p), 0, 0)
        a1, a2, a3, a4, a6 = E.ainvs
        x3 = a3 // (p * p)
        x6 = a6 // p**4
        if not pdiv(x3 * x3 + 4 * x6):
            cp = 3 if _has_root_quadratic(1, x3, -x6, p) else 1
            return LocalReductionData(p, "additive", "IV*", n - 6, cp, vdisc0, n)
        t = -(p * p) * _root_mod(x6, 2, 2) if p == 2 else p * p * ((-x3 * half) % p)
        E = E._rst(0, 0, t)
        a1, a2, a3, a4, a6 = E.ainvs
        if pval(a4) < 4:
            return LocalReductionData(p, "additive", "III*", n - 7, 2, vdisc0, n)
        if pval(a6) < 6:
            return LocalReductionData(p, "additive", "II*", n - 8, 1, vdisc0, n)
        # not minimal at p: scale by u = p and start over
        E = WeierstrassCurve(a1 // p, a2 // p**2, a3 // p**3, a4 // p**4, a6 // p**6)


def bad_primes(curve: WeierstrassCurve) -> list[int]:
    f = factor(abs(curve.discriminant))
    if not f.complete:
        raise FactorizationIncomplete(abs(curve.discriminant), f)
    return f.support()


def local_data(curve: WeierstrassCurve) -> list[LocalReductionData]:
    """Tate data at every prime dividing the discriminant, minimal ones dropped."""
    out = []
    for p in bad_primes(curve):
        ld = tate_local(curve, p)
        if not ld.is_good:
            out.append(ld)
    return out


def conductor(curve: WeierstrassCurve) -> Factorization:
    return Factorization({ld.prime: ld.conductor_exponent for ld in local_data(curve)})


# -- point counting -----------------------------------------------------------


def count_points_mod_p(curve: WeierstrassCurve, p: int) -> int:
    """|E~(F_p)| including the point at infinity, by enumeration over x."""
    if curve.discriminant % p == 0:
        raise BadReductionError(f"{p} divides the discriminant of {curve}")
    a1, a2, a3, a4, a6 = (a % p for a in curve.ainvs)
    if p == 2:
        count = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % 2 == 0:
                    count += 1
        return count
    count = 1
    for x in range(p):
        rhs = (4 * (x**3 + a2 * x * x + a4 * x + a6) + (a1 * x + a3) ** 2) % p
        if rhs == 0:
            count += 1
        else:
            count += 1 + jacobi(rhs, p)
    return count


def ap(curve: WeierstrassCurve, p: int) -> int:
    """Trace of Frobenius p + 1 - |E~(F_p)| on a model with good reduction at p."""
    model = curve
    if curve.discriminant % p == 0:
        model, _ = minimal_model(curve)
    return p + 1 - count_points_mod_p(model, p)


@dataclass
class HypOneVerdict:
    p: int
    good_at_p: bool
    supersingular: bool
    ap: int | None
    reasons: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.supersingular

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "good_at_p": self.good_at_p,
            "supersingular": self.supersingular,
            "a_p": self.ap,
            "passed": self.passed,
            "reasons": list(self.reasons),
            "notes": list(self.notes),
        }


def check_hyp1(curve: WeierstrassCurve, p: int) -> HypOneVerdict:
    """Good reduction at p and a_p = 0 exactly (|E~(F_p)| = p + 1).

    Over Q there is a single prime above p, so the conditions on the
    decomposition of p hold automatically.
    """
    if p < 3 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    model, _ = minimal_model(curve)
    notes = ["base field Q: one prime above p, conditions on its splitting hold vacuously"]
    if model.discriminant % p == 0:
        return HypOneVerdict(p, False, False, None, [f"bad reduction at {p}"], notes)
    a = ap(model, p)
    reasons = []
    if a != 0:
        if a % p == 0:
            reasons.append(f"a_{p} = {a} is divisible by {p} but nonzero; discarded")
        else:
            reasons.append(f"a_{p} = {a}: ordinary reduction")
    if p >= 5:
        notes.append("for p >= 5 the Hasse bound forces a_p = 0 once a_p = 0 mod p")
    return HypOneVerdict(p, True, a == 0, a, reasons, notes)
