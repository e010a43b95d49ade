"""Division polynomials and dim_{F_p} E(K)[p] for K = Q_l and its
unramified degree-p extension (the first layer of the local cyclotomic
Z_p-tower at l != p)."""

from __future__ import annotations

from dataclasses import dataclass

from .arith import is_prime, sqrt_mod
from .curve import BadReductionError, WeierstrassCurve, minimal_model
from .padic import PrecisionError, UnramifiedRing, count_quadratic_solutions, lift_roots

__all__ = [
    "DivisionPolynomial",
    "TorsionDimension",
    "InvalidTorsionCount",
    "division_polynomial",
    "torsion_dim_base",
    "torsion_dim_first_layer",
    "naive_torsion_count",
]

SUPPORTED_INDICES = (1, 3, 5, 7, 9, 11, 13)
PRECISION_LADDER = (8, 20, 40, 80)


class InvalidTorsionCount(ArithmeticError):
    pass


# integer polynomials as coefficient lists, low degree first


def _add(f, g):
    n = max(len(f), len(g))
    return [(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)]


def _sub(f, g):
    return _add(f, [-c for c in g])


def _mul(f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def _trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


@dataclass(frozen=True)
class DivisionPolynomial:
    curve: WeierstrassCurve
    n: int
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def _division_polys(curve: WeierstrassCurve, n: int) -> dict[int, list[int]]:
    """f_k for k <= n, with f_k = psi_k (k odd) and psi_k / psi_2 (k even)."""
    b2, b4, b6, b8 = curve.b2, curve.b4, curve.b6, curve.b8
    F = [b6, 2 * b4, b2, 4]  # psi_2^2
    F2 = _mul(F, F)
    f = {
        0: [],
        1: [1],
        2: [1],
        3: [b8, 3 * b6, 3 * b4, b2, 3],
        4: [b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, 10 * b8, 10 * b6, 5 * b4, b2, 2],
    }
    for k in range(5, n + 1):
        m = k // 2
        if k % 2:
            a = _mul(f[m + 2], _mul(f[m], _mul(f[m], f[m])))
            b = _mul(f[m - 1], _mul(f[m + 1], _mul(f[m + 1], f[m + 1])))
            if m % 2 == 0:
                f[k] = _trim(_sub(_mul(F2, a), b))
            else:
                f[k] = _trim(_sub(a, _mul(F2, b)))
        else:
            inner = _sub(_mul(f[m + 2], _mul(f[m - 1], f[m - 1])), _mul(f[m - 2], _mul(f[m + 1], f[m + 1])))
            f[k] = _trim(_mul(f[m], inner))
    return f


def division_polynomial(curve: WeierstrassCurve, n: int) -> DivisionPolynomial:
    """psi_n as a polynomial in x, for odd n <= 13."""
    if n not in SUPPORTED_INDICES:
        raise ValueError(f"unsupported division polynomial index {n}; odd n <= 13 only")
    coeffs = _division_polys(curve, max(n, 4))[n]
    return DivisionPolynomial(curve, n, tuple(coeffs))


@dataclass(frozen=True)
class TorsionDimension:
    ell: int
    p: int
    layer: str  # "base" or "first"
    dim: int
    count: int  # points of exact order p
    x_roots: int
    precision: int

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "p": self.p,
            "layer": self.layer,
            "dim": self.dim,
            "count": self.count,
            "x_roots": self.x_roots,
            "precision": self.precision,
        }


def _dim_from_count(count: int, p: int) -> int:
    for dim in (0, 1, 2):
        if count == p**dim - 1:
            return dim
    raise InvalidTorsionCount(f"{count} points of order {p} is not of the form {p}^d - 1")


def _check_args(curve, p, ell):
    if not is_prime(p) or p == 2:
        raise ValueError("p must be an odd prime")
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    if ell == p:
        raise ValueError("l must differ from p")
    model, _ = minimal_model(curve)
    return model


def _count_points(model: WeierstrassCurve, p: int, ell: int, ring: UnramifiedRing, k: int):
    psi = division_polynomial(model, p)
    # p is an l-adic unit, so every root of psi_p is integral: no points of
    # p-torsion reduce to the point at infinity on a model integral at l
    if psi.coeffs[-1] % ell == 0:
        raise AssertionError("leading coefficient of psi_p is not an l-adic unit")
    roots = lift_roots(list(psi.coeffs), ell, ring.degree, k, ring=ring)
    if not all(cert for _, cert in roots):
        raise PrecisionError("uncertified division polynomial root")
    a1, a2, a3, a4, a6 = model.ainvs
    count = 0
    for x, _ in roots:
        if x.valuation() < 0:  # pragma: no cover - PadicInt cannot hold one
            raise AssertionError("negative valuation root of psi_p")
        A = x * a1 + a3
        B = x * x * x + x * x * a2 + x * a4 + a6
        count += count_quadratic_solutions(A, B)
    return count, len(roots)


def _torsion(curve, p, ell, d, layer):
    model = _check_args(curve, p, ell)
    ring = UnramifiedRing.of_degree(ell, d)
    err = None
    for k in PRECISION_LADDER:
        try:
            count, nroots = _count_points(model, p, ell, ring, k)
        except PrecisionError as e:
            err = e
            continue
        return TorsionDimension(ell, p, layer, _dim_from_count(count, p), count, nroots, k)
    raise PrecisionError(f"torsion count at l={ell} undetermined at precision {PRECISION_LADDER[-1]}: {err}")


def torsion_dim_base(curve: WeierstrassCurve, p: int, ell: int) -> TorsionDimension:
    """dim_{F_p} E(Q_l)[p], counting l-adic points on the division polynomial."""
    return _torsion(curve, p, ell, 1, "base")


def torsion_dim_first_layer(
    curve: WeierstrassCurve, p: int, ell: int, base: TorsionDimension | None = None
) -> TorsionDimension:
    """dim_{F_p} E(L)[p] with L/Q_l unramified of degree p.

    Gal(L/Q_l) is a p-group, so it fixes a nonzero vector of any nonzero
    F_p-representation; the dimension can only grow from 1.  Dimensions 0 and
    2 over Q_l are therefore returned as they are, and only dimension 1 is
    recomputed over L.
    """
    if base is None:
        base = torsion_dim_base(curve, p, ell)
    if base.dim != 1:
        return TorsionDimension(ell, p, "first", base.dim, base.count, base.x_roots, base.precision)
    return _torsion(curve, p, ell, p, "first")


# -- naive oracle over F_l ----------------------------------------------------


def _ec_add(P, Q, a, n):
    """Chord-and-tangent addition on a long Weierstrass model mod prime n."""
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = a
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2 + a1 * x2 + a3) % n == 0:
            return None
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * pow(2 * y1 + a1 * x1 + a3, -1, n) % n
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, n) % n
    nu = (y1 - lam * x1) % n
    x3 = (lam * lam + a1 * lam - a2 - x1 - x2) % n
    y3 = (-(lam + a1) * x3 - nu - a3) % n
    return (x3, y3)


def _ec_mul(k, P, a, n):
    R = None
    while k:
        if k & 1:
            R = _ec_add(R, P, a, n)
        P = _ec_add(P, P, a, n)
        k >>= 1
    return R


def naive_torsion_count(curve: WeierstrassCurve, p: int, ell: int) -> int:
    """Points of exact order p in E~(F_l), by enumerating every affine point.

    For good reduction at l != p this equals the count in E(Q_l)[p].
    """
    model, _ = minimal_model(curve)
    if model.discriminant % ell == 0:
        raise BadReductionError(f"bad reduction at {ell}")
    a = tuple(c % ell for c in model.ainvs)
    a1, a2, a3, a4, a6 = a
    roots = {}
    for y in range(ell):
        roots.setdefault(y * y % ell, y)
    half = (ell + 1) // 2
    m = (p - 1) // 2
    count = 0
    for x in range(ell):
        rhs = (x**3 + a2 * x * x + a4 * x + a6) % ell
        lin = (a1 * x + a3) % ell
        if ell == 2:
            ys = [y for y in range(2) if (y * y + lin * y - rhs) % 2 == 0]
        else:
            s = roots.get((lin * lin + 4 * rhs) % ell)
            if s is None:
                continue
            ys = {(-lin + s) * half % ell, (-lin - s) * half % ell}
        for y in ys:
            # pP = O  iff  mP = -(m+1)P, i.e. the two share an x-coordinate
            P = (x, y)
            Q = P
            for _ in range(m - 1):
                Q = _ec_add(Q, P, a, ell)
            R = _ec_add(Q, P, a, ell)
            if Q is not None and R is not None and Q[0] == R[0] and Q != R:
                count += 1
    return count
