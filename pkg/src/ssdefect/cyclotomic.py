"""Number of primes above l in the cyclotomic Z_p-extension of Q."""

from __future__ import annotations

from dataclasses import dataclass

from .arith import factor, is_prime

__all__ = ["SplittingNumber", "splitting_number", "splitting_number_oracle", "multiplicative_order"]

MAX_ORACLE_LAYERS = 12


@dataclass(frozen=True)
class SplittingNumber:
    ell: int
    p: int
    k: int  # v_p(l^(p-1) - 1)
    s: int  # p^(k-1)
    oracle_layer: int | None = None  # first layer where the oracle reached s

    def to_dict(self) -> dict:
        return {"ell": self.ell, "p": self.p, "k": self.k, "s": self.s, "oracle_layer": self.oracle_layer}


def _check(ell, p):
    if not is_prime(p) or p == 2:
        raise ValueError("p must be an odd prime")
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    if ell == p:
        raise ValueError("l = p is ramified in the cyclotomic tower; need l != p")


def splitting_number(ell: int, p: int) -> SplittingNumber:
    """s(l) = p^(k-1) where k = v_p(l^(p-1) - 1).

    Frobenius at l generates 1 + p^k Z_p inside Gal(Q_cyc/Q) = 1 + p Z_p,
    a subgroup of index p^(k-1).  The valuation is read off from
    l^(p-1) mod p^K, doubling K until the residue differs from 1.
    """
    _check(ell, p)
    K = 4
    while True:
        r = pow(ell, p - 1, p**K)
        if r != 1:
            k = 0
            r -= 1
            while r % p == 0:
                r //= p
                k += 1
            return SplittingNumber(ell, p, k, p ** (k - 1))
        K *= 2


def multiplicative_order(a: int, p: int, e: int) -> int:
    """Order of a in (Z/p^e Z)^*, shrinking the group order (p-1) p^(e-1)."""
    n = p**e
    if a % p == 0:
        raise ValueError("not a unit")
    order = (p - 1) * p ** (e - 1)
    for q, _ in factor(order).primes.items():
        while order % q == 0 and pow(a, order // q, n) == 1:
            order //= q
    return order


def splitting_number_oracle(ell: int, p: int, layers: int) -> list[int]:
    """Prime counts above l in the layers Q_1 .. Q_n of the tower.

    Q_n is the degree-p^n subfield of Q(zeta_{p^(n+1)}); the decomposition
    group of l there is cyclic of order the p-part of ord(l mod p^(n+1)).
    """
    _check(ell, p)
    if not 1 <= layers <= MAX_ORACLE_LAYERS:
        raise ValueError(f"layers must be between 1 and {MAX_ORACLE_LAYERS}")
    counts = []
    for n in range(1, layers + 1):
        order = multiplicative_order(ell, p, n + 1)
        ppart = 1
        while order % p == 0:
            order //= p
            ppart *= p
        counts.append(p**n // ppart)
    return counts


def oracle_stable_value(counts: list[int]) -> tuple[int, int]:
    """(value, first layer index) of the final plateau of an oracle trace."""
    last = counts[-1]
    first = len(counts)
    while first > 1 and counts[first - 2] == last:
        first -= 1
    return last, first
