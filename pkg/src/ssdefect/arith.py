"""Integer arithmetic: primality, factorization, valuations, modular helpers."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

__all__ = [
    "Factorization",
    "FactorizationIncomplete",
    "is_prime",
    "factor",
    "valuation",
    "mod_pow",
    "jacobi",
    "sqrt_mod",
    "crt",
    "small_primes",
]

# Miller-Rabin with the first 13 primes as witnesses is exact below this bound.
_DETERMINISTIC_BOUND = 3317044064679887385961981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_EXTRA_ROUNDS = 64  # 4**-64 = 2**-128

TRIAL_LIMIT = 10**6
RHO_STEP_CAP = 10**8


def small_primes(limit: int) -> list[int]:
    """Primes < limit by a plain sieve."""
    if limit < 3:
        return []
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit, i)))
    return [i for i, v in enumerate(sieve) if v]


_SMALL = small_primes(1000)


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL:
        if n % q == 0:
            return n == q
    if n < 1000 * 1000:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if not all(_mr_round(n, d, s, a) for a in _MR_BASES):
        return False
    if n < _DETERMINISTIC_BOUND:
        return True
    rng = random.Random(n)
    return all(_mr_round(n, d, s, rng.randrange(2, n - 1)) for _ in range(_EXTRA_ROUNDS))


@dataclass
class Factorization:
    """Prime factorization of a positive integer.

    ``cofactor`` is 1 when the factorization is complete; otherwise it holds
    the unfactored composite part and ``complete`` is False.
    """

    primes: dict[int, int] = field(default_factory=dict)
    cofactor: int = 1

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    def value(self) -> int:
        n = self.cofactor
        for q, e in self.primes.items():
            n *= q**e
        return n

    def support(self) -> list[int]:
        return sorted(self.primes)

    def __str__(self) -> str:
        parts = [f"{q}^{e}" if e > 1 else str(q) for q, e in sorted(self.primes.items())]
        if not self.complete:
            parts.append(f"[{self.cofactor}]")
        return " * ".join(parts) or "1"

    def to_dict(self) -> dict:
        return {
            "primes": {str(q): e for q, e in sorted(self.primes.items())},
            "cofactor": str(self.cofactor),
            "complete": self.complete,
        }


class FactorizationIncomplete(ArithmeticError):
    """A composite cofactor could not be split within the iteration budget."""

    def __init__(self, n: int, partial: Factorization):
        super().__init__(f"could not completely factor {n}; unsplit cofactor {partial.cofactor}")
        self.n = n
        self.partial = partial


def _brent(n: int, seed: int, step_cap: int) -> tuple[int | None, int]:
    """One Pollard-Brent attempt; returns (nontrivial factor or None, steps used)."""
    rng = random.Random(seed)
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    steps = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        steps += r
        r *= 2
        if steps > step_cap:
            return None, steps
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return (g if g != n else None), steps


def _split(n: int, out: dict[int, int], leftover: list[int], budget: list[int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, out, leftover, budget)
        _split(r, out, leftover, budget)
        return
    seed = 1
    while budget[0] > 0:
        d, used = _brent(n, seed, budget[0])
        budget[0] -= used
        if d is not None:
            _split(d, out, leftover, budget)
            _split(n // d, out, leftover, budget)
            return
        seed += 1
    leftover.append(n)


def factor(n: int, rho_steps: int = RHO_STEP_CAP) -> Factorization:
    """Factor ``n >= 1`` by trial division up to 10**6 and Pollard-Brent rho.

    An unsplit composite part is returned in ``cofactor`` rather than
    guessed at.
    """
    if n < 1:
        raise ValueError(f"factor() needs n >= 1, got {n}")
    hit = _FACTOR_CACHE.get((n, rho_steps))
    if hit is not None:
        return Factorization(dict(hit.primes), hit.cofactor)
    key = (n, rho_steps)
    primes: dict[int, int] = {}
    for q in _trial_primes():
        if q * q > n:
            break
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            primes[q] = e
    if n > 1:
        leftover: list[int] = []
        _split(n, primes, leftover, [rho_steps])
        cof = math.prod(leftover)
    else:
        cof = 1
    result = Factorization(dict(sorted(primes.items())), cof)
    if len(_FACTOR_CACHE) >= 256:
        _FACTOR_CACHE.clear()
    _FACTOR_CACHE[key] = Factorization(dict(result.primes), cof)
    return result


# rho on the same discriminant is requested repeatedly along a pipeline
_FACTOR_CACHE: dict[tuple[int, int], Factorization] = {}


_TRIAL_CACHE: list[int] = []


def _trial_primes() -> list[int]:
    if not _TRIAL_CACHE:
        _TRIAL_CACHE.extend(small_primes(TRIAL_LIMIT + 1))
    return _TRIAL_CACHE


def valuation(n: int, ell: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def mod_pow(base: int, exp: int, modulus: int) -> int:
    if modulus < 1:
        raise ValueError("modulus must be positive")
    return pow(base, exp, modulus)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod(a: int, ell: int) -> int | None:
    """Tonelli-Shanks square root mod an odd prime; None for non-residues."""
    a %= ell
    if a == 0:
        return 0
    if jacobi(a, ell) != 1:
        return None
    if ell % 4 == 3:
        return pow(a, (ell + 1) // 4, ell)
    q, s = ell - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while jacobi(z, ell) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, ell), pow(a, q, ell), pow(a, (q + 1) // 2, ell)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % ell
            i += 1
        b = pow(c, 1 << (m - i - 1), ell)
        m, c = i, b * b % ell
        t, r = t * c % ell, r * b % ell
    return r


def crt(residues: list[int], moduli: list[int]) -> int:
    """Chinese remainder for pairwise coprime moduli."""
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        inv = pow(m, -1, n)
        x = x + m * ((r - x) * inv % n)
        m *= n
    return x % m
