"""Families of curves over Q with a fixed mod-p representation (p = 3, 5).

For p = 3 the family through y^2 = x^3 + ax + b is the Hesse pencil spanned
by the curve and its Hessian; with parameter t the new bad primes divide

    27 a^2 t^4 + 108 b t^3 - 18 a t^2 - 1.

For p = 5 only bases with j = 0, y^2 = x^3 + 16 D, are supported.  The
family is cut out by an icosahedral binary form of degree 12 placed with a
3-fold axis at t = 0, g(-5 D t^3) where g(z) = z^4 + 55 z^3 - 165 z^2 -
275 z + 25; c4 and c6 of a member are the Hessian and the Jacobian
covariants of that form, scaled so that t = 0 returns the base curve.
For p = 3 the shipped fixtures use the bases y^2 = x^3 - D x.
"""

from __future__ import annotations

from .curve import WeierstrassCurve, minimal_model

__all__ = ["hesse_member", "icosahedral_member", "family_member", "family_base"]


def hesse_member(a: int, b: int, t: int) -> WeierstrassCurve:
    """Member t of the p = 3 family through y^2 = x^3 + ax + b (not minimalized)."""
    c = 27 * a * a * t**4 + 108 * b * t**3 - 18 * a * t * t - 1
    a2 = 9 * t * (3 * a * a * t * t + 9 * b * t - a)
    a4 = (9 * a * a * t * t + 18 * b * t - a) * c
    a6 = (a * a * t + b) * c * c
    return WeierstrassCurve(0, a2, 0, a4, a6)


def icosahedral_c4c6(D: int, t: int) -> tuple[int, int]:
    u = D * t**3
    c4 = (
        720 * D * t
        * (5 * u * u - 5 * u + 8)
        * (5 * u * u + 40 * u - 1)
        * (40 * u * u + 5 * u + 1)
    )
    c6 = (
        -1728 * D
        * (5 * u * u + 1)
        * (25 * u**4 + 1750 * u**3 - 2190 * u * u - 350 * u + 1)
        * (200 * u**4 + 500 * u**3 + 2055 * u * u - 100 * u + 8)
    )
    return c4, c6


def icosahedral_member(D: int, t: int) -> WeierstrassCurve:
    """Member t of the p = 5 family through y^2 = x^3 + 16 D (not minimalized)."""
    c4, c6 = icosahedral_c4c6(D, t)
    return WeierstrassCurve(0, 0, 0, -27 * c4, -54 * c6)


def family_base(p: int, D: int) -> WeierstrassCurve:
    if p == 3:
        return WeierstrassCurve(0, 0, 0, -D, 0)
    if p == 5:
        return WeierstrassCurve(0, 0, 0, 0, 16 * D)
    raise ValueError("families are available for p = 3 and p = 5")


def family_member(p: int, D: int, t: int) -> WeierstrassCurve:
    """Global minimal model of member t of the (p, D) family."""
    if p == 3:
        E = hesse_member(-D, 0, t)
    elif p == 5:
        E = icosahedral_member(D, t)
    else:
        raise ValueError("families are available for p = 3 and p = 5")
    return minimal_model(E)[0]
