"""Exact Weierstrass-curve arithmetic over Q.

Curve invariants, the chord-tangent group law on exact rationals, reduction
types at odd primes, torsion triviality by point counting, and canonical
heights with certified error intervals (so a positive regulator is an
actual independence certificate, not a floating-point guess).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint, isprime, legendre_symbol

from .padics import ordp

__all__ = [
    "WeierstrassCurve",
    "RationalPoint",
    "ReductionInfo",
    "PrimeConductorReport",
    "HeightEstimate",
    "HeightData",
    "compute_invariants",
    "is_on_curve",
    "add_points",
    "negate_point",
    "double_point",
    "scalar_multiply",
    "reduction_type",
    "check_prime_conductor",
    "torsion_is_trivial",
    "count_points_mod",
    "canonical_height",
    "regulator",
    "weierstrass_add",
    "weierstrass_negate",
]

GOOD = "good"
MULT_SPLIT = "multiplicative-split"
MULT_NONSPLIT = "multiplicative-nonsplit"
ADDITIVE = "additive"


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integer coefficients."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError("singular curve")

    @property
    def b2(self) -> int:
        return self.a1**2 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3**2 + 4 * self.a6

    @property
    def b8(self) -> int:
        return (
            self.a1**2 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3**2
            - self.a4**2
        )

    @property
    def c4(self) -> int:
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4**3, self.discriminant)

    def coefficients(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)


def compute_invariants(a1: int, a2: int, a3: int, a4: int, a6: int) -> WeierstrassCurve:
    """Build a curve and its derived invariants; rejects singular models."""
    return WeierstrassCurve(a1, a2, a3, a4, a6)


@dataclass(frozen=True)
class RationalPoint:
    """An affine rational point, or the point at infinity (x = y = None)."""

    x: Fraction | None
    y: Fraction | None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", Fraction(self.x))
            object.__setattr__(self, "y", Fraction(self.y))

    @classmethod
    def infinity(cls) -> "RationalPoint":
        return cls(None, None)

    @classmethod
    def affine(cls, x, y) -> "RationalPoint":
        return cls(Fraction(x), Fraction(y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None


def is_on_curve(curve: WeierstrassCurve, point: RationalPoint) -> bool:
    if point.is_infinity:
        return True
    x, y = point.x, point.y
    lhs = y * y + curve.a1 * x * y + curve.a3 * y
    rhs = x**3 + curve.a2 * x * x + curve.a4 * x + curve.a6
    return lhs == rhs


def weierstrass_negate(coeffs, P):
    """-(x, y) = (x, -y - a1 x - a3); works over any field elements."""
    if P is None:
        return None
    a1, _, a3, _, _ = coeffs
    x, y = P
    return (x, -y - a1 * x - a3)


def weierstrass_add(coeffs, P, Q, same=None):
    """Chord-tangent addition for y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

    P and Q are (x, y) pairs or None for infinity; `same` is the equality
    predicate for the coefficient field (defaults to ==), so the formulas
    can run over exact rationals or p-adic elements alike.
    """
    a1, a2, a3, a4, a6 = coeffs
    eq = same or (lambda u, v: u == v)
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if eq(x1, x2):
        if eq(y2, -y1 - a1 * x1 - a3):
            return None
        denom = 2 * y1 + a1 * x1 + a3
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / denom
        nu = (-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) / denom
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def _as_pair(point: RationalPoint):
    return None if point.is_infinity else (point.x, point.y)


def _from_pair(pair) -> RationalPoint:
    return RationalPoint.infinity() if pair is None else RationalPoint(pair[0], pair[1])


def _require_on_curve(curve, *points):
    for P in points:
        if not is_on_curve(curve, P):
            raise ValueError(f"point {P} is not on the curve")


def add_points(curve: WeierstrassCurve, P: RationalPoint, Q: RationalPoint) -> RationalPoint:
    _require_on_curve(curve, P, Q)
    return _from_pair(weierstrass_add(curve.coefficients(), _as_pair(P), _as_pair(Q)))


def negate_point(curve: WeierstrassCurve, P: RationalPoint) -> RationalPoint:
    _require_on_curve(curve, P)
    return _from_pair(weierstrass_negate(curve.coefficients(), _as_pair(P)))


def double_point(curve: WeierstrassCurve, P: RationalPoint) -> RationalPoint:
    return add_points(curve, P, P)


def scalar_multiply(curve: WeierstrassCurve, k: int, P: RationalPoint) -> RationalPoint:
    _require_on_curve(curve, P)
    if k < 0:
        return scalar_multiply(curve, -k, negate_point(curve, P))
    result = RationalPoint.infinity()
    base = P
    while k:
        if k & 1:
            result = add_points(curve, result, base)
        base = add_points(curve, base, base)
        k >>= 1
    return result


@dataclass(frozen=True)
class ReductionInfo:
    prime: int
    kind: str
    discriminant_valuation: int

    @property
    def is_multiplicative(self) -> bool:
        return self.kind in (MULT_SPLIT, MULT_NONSPLIT)


def reduction_type(curve: WeierstrassCurve, ell: int) -> ReductionInfo:
    """Reduction kind at an odd prime; split means -c6 is a square mod ell.

    Primes 2 and 3 of bad reduction are rejected (never needed: the
    prime-conductor hypotheses force p >= 11).
    """
    if not isprime(ell):
        raise ValueError(f"{ell} is not prime")
    disc = curve.discriminant
    if disc % ell != 0:
        return ReductionInfo(ell, GOOD, 0)
    if ell in (2, 3):
        raise ValueError("not supported: bad reduction at 2 or 3")
    v = ordp(disc, ell)
    if curve.c4 % ell == 0:
        return ReductionInfo(ell, ADDITIVE, v)
    chi = legendre_symbol(-curve.c6 % ell, ell)
    return ReductionInfo(ell, MULT_SPLIT if chi == 1 else MULT_NONSPLIT, v)


@dataclass(frozen=True)
class ConductorCheckItem:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class PrimeConductorReport:
    prime: int | None
    exponent: int | None
    reduction_kind: str | None
    checks: tuple[ConductorCheckItem, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_names(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]


def check_prime_conductor(curve: WeierstrassCurve) -> PrimeConductorReport:
    """Verify the hypotheses that make the conductor the single prime p.

    Checks, in order: |disc| is p^k for one prime p; k <= 5; reduction at p
    is multiplicative; p >= 11; p != 13; the model is minimal (no prime
    allows the u = ell rescaling); and p does not divide k.
    """
    checks = []
    disc = curve.discriminant
    factors = factorint(abs(disc))
    if len(factors) == 1:
        p, k = next(iter(factors.items()))
        checks.append(
            ConductorCheckItem("discriminant_prime_power", True, f"|disc| = {p}^{k}")
        )
    else:
        p, k = None, None
        pretty = "*".join(f"{q}^{e}" for q, e in sorted(factors.items()))
        checks.append(
            ConductorCheckItem("discriminant_prime_power", False, f"|disc| = {pretty} has several prime factors")
        )

    checks.append(
        ConductorCheckItem(
            "discriminant_exponent_at_most_5",
            k is not None and k <= 5,
            f"exponent k = {k}",
        )
    )

    kind = None
    if p is not None and p >= 5:
        info = reduction_type(curve, p)
        kind = info.kind
        checks.append(
            ConductorCheckItem("multiplicative_at_p", info.is_multiplicative, f"reduction at {p} is {kind}")
        )
    else:
        checks.append(
            ConductorCheckItem("multiplicative_at_p", False, f"no single bad prime >= 5 (p = {p})")
        )

    checks.append(ConductorCheckItem("p_at_least_11", p is not None and p >= 11, f"p = {p}"))
    checks.append(ConductorCheckItem("p_not_13", p is not None and p != 13, f"p = {p}"))

    unscalable = []
    for ell, e in factorint(abs(disc)).items():
        if e >= 12 and curve.c4 % ell**4 == 0 and curve.c6 % ell**6 == 0:
            unscalable.append(ell)
    checks.append(
        ConductorCheckItem(
            "minimal_model",
            not unscalable,
            "no prime admits the u = ell rescaling" if not unscalable else f"rescaling possible at {unscalable}",
        )
    )

    checks.append(
        ConductorCheckItem(
            "valuation_coprime_to_p",
            p is not None and k is not None and k % p != 0,
            f"p = {p} does not divide ord_p(disc) = {k}" if p else "no prime p identified",
        )
    )
    return PrimeConductorReport(p, k, kind, tuple(checks))


def count_points_mod(curve: WeierstrassCurve, ell: int) -> int:
    """#E(F_ell) by summing quadratic characters of the completed square."""
    if ell == 2 or not isprime(ell):
        raise ValueError("odd prime required")
    if curve.discriminant % ell == 0:
        raise ValueError(f"{ell} divides the discriminant: not a good prime")
    a1, a2, a3, a4, a6 = curve.coefficients()
    total = 1  # infinity
    for x in range(ell):
        g = ((a1 * x + a3) ** 2 + 4 * (x**3 + a2 * x * x + a4 * x + a6)) % ell
        total += 1 + int(legendre_symbol(g, ell))  # 0, 1 or 2 points over x
    return total


def torsion_is_trivial(curve: WeierstrassCurve, good_primes) -> bool:
    """True when gcd of #E(F_ell) over the supplied primes is 1.

    Rational torsion injects into E(F_ell) for every odd prime ell of good
    reduction, so gcd 1 forces trivial torsion; gcd > 1 is inconclusive and
    reported as failure.
    """
    primes = list(good_primes)
    if len(primes) < 3:
        raise ValueError("at least 3 odd good primes required")
    counts = [count_points_mod(curve, ell) for ell in primes]
    return math.gcd(*counts) == 1


# ---------------------------------------------------------------------------
# Canonical heights with certified error bounds
# ---------------------------------------------------------------------------


def naive_height(x: Fraction) -> float:
    return float(math.log(max(abs(x.numerator), x.denominator)))


def _poly_divmod(f, g):
    f = list(f)
    g = list(g)
    while g and g[-1] == 0:
        g.pop()
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(f) - len(g) + 1)
    inv = 1 / g[-1]
    while len(f) >= len(g) and any(f):
        if f[-1] == 0:
            f.pop()
            continue
        shift = len(f) - len(g)
        c = f[-1] * inv
        q[shift] = c
        for i, gc in enumerate(g):
            f[shift + i] -= c * gc
        f.pop()
    return q, f or [Fraction(0)]


def _poly_extended_gcd(f, g):
    """(u, v) with u*f + v*g = 1 for coprime f, g over the rationals."""
    r0, r1 = [Fraction(c) for c in f], [Fraction(c) for c in g]
    u0, u1 = [Fraction(1)], [Fraction(0)]
    v0, v1 = [Fraction(0)], [Fraction(1)]
    while any(r1):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, _poly_sub(u0, _poly_mul(q, u1))
        v0, v1 = v1, _poly_sub(v0, _poly_mul(q, v1))
    if len([c for c in r0 if c]) != 1 or r0[1:] != [Fraction(0)] * (len(r0) - 1):
        raise ArithmeticError("polynomials are not coprime")
    c = r0[0]
    return [x / c for x in u0], [x / c for x in v0]


def _poly_mul(f, g):
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return out


def _poly_sub(f, g):
    n = max(len(f), len(g))
    f = list(f) + [Fraction(0)] * (n - len(f))
    g = list(g) + [Fraction(0)] * (n - len(g))
    return [a - b for a, b in zip(f, g)]


def _integral_identity(f, g):
    """Integer cofactors (U, V, D) with U*f + V*g = D, D a positive integer."""
    u, v = _poly_extended_gcd(f, g)
    denom = 1
    for c in u + v:
        denom = denom * c.denominator // math.gcd(denom, c.denominator)
    U = [int(c * denom) for c in u]
    V = [int(c * denom) for c in v]
    return U, V, denom


@functools.lru_cache(maxsize=None)
def _height_difference_constant(coeffs: tuple[int, int, int, int, int]) -> float:
    """A constant C with |h(x(2P)) - 4 h(x(P))| <= C for all rational points.

    Uses the duplication quotient x(2P) = F/G of homogeneous quartics and
    integer cofactor identities U F + V G = D a^7 (resp. D' b^7) obtained by
    the extended Euclidean algorithm: the cofactors bound both the possible
    cancellation (gcd | D D') and the size of max(|F|, |G|) from below.
    """
    curve = WeierstrassCurve(*coeffs)
    b2, b4, b6, b8 = curve.b2, curve.b4, curve.b6, curve.b8
    f = [-b8, -2 * b6, -b4, 0, 1]  # x(2P) numerator, ascending degree
    g = [b6, 2 * b4, b2, 4]  # denominator (degree 3)

    sum_f = sum(abs(c) for c in f)
    sum_g = sum(abs(c) for c in g)
    upper = math.log(max(sum_f, sum_g))

    # identity in t = x: multiplied by b^7 it bounds the b-direction
    U1, V1, D1 = _integral_identity(f, g + [0])
    s1 = sum(abs(c) for c in U1) + sum(abs(c) for c in V1)
    # reversed coefficients swap the roles of a and b
    U2, V2, D2 = _integral_identity(f[::-1], (g + [0])[::-1])
    s2 = sum(abs(c) for c in U2) + sum(abs(c) for c in V2)

    lower = math.log(max(s1, s2)) + math.log(max(D1, D2))
    return max(upper, lower) * (1 + 1e-12) + 1e-9


@dataclass(frozen=True)
class HeightEstimate:
    value: float
    error: float
    is_torsion: bool = False

    def interval(self) -> tuple[float, float]:
        return (self.value - self.error, self.value + self.error)


def canonical_height(curve: WeierstrassCurve, P: RationalPoint, doublings: int = 6) -> HeightEstimate:
    """4^-k h_x(2^k P) with the certified error C / (3 * 4^k).

    Doubling cycles (torsion points) short-circuit to value 0 with the
    torsion flag set.
    """
    if not 4 <= doublings <= 8:
        raise ValueError("doublings must be between 4 and 8 (coordinate growth is 4^k)")
    _require_on_curve(curve, P)
    if P.is_infinity:
        return HeightEstimate(0.0, 0.0, False)
    Q = P
    seen = {P}
    for _ in range(doublings):
        Q = double_point(curve, Q)
        if Q.is_infinity or Q in seen:
            return HeightEstimate(0.0, 0.0, True)
        seen.add(Q)
    C = _height_difference_constant(curve.coefficients())
    value = naive_height(Q.x) / 4**doublings
    return HeightEstimate(value, C / (3 * 4**doublings), False)


def _iv_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _iv_sub(a, b):
    return (a[0] - b[1], a[1] - b[0])


def _iv_mul(a, b):
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(products), max(products))


def _iv_det(matrix):
    n = len(matrix)
    if n == 0:
        return (1.0, 1.0)
    if n == 1:
        return matrix[0][0]
    total = (0.0, 0.0)
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        term = _iv_mul(matrix[0][j], _iv_det(minor))
        if j % 2:
            term = (-term[1], -term[0])
        total = _iv_add(total, term)
    return total


@dataclass(frozen=True)
class HeightData:
    heights: tuple[HeightEstimate, ...]
    pairing: tuple[tuple[float, ...], ...]
    pairing_errors: tuple[tuple[float, ...], ...]
    regulator_value: float
    regulator_error: float

    def regulator_interval(self) -> tuple[float, float]:
        return (self.regulator_value - self.regulator_error, self.regulator_value + self.regulator_error)


def regulator(curve: WeierstrassCurve, points, doublings: int = 7) -> HeightData:
    """Interval determinant of the height pairing matrix.

    A strictly positive interval certifies linear independence; an interval
    touching 0 raises (the data cannot distinguish dependence at this
    precision).
    """
    points = list(points)
    _require_on_curve(curve, *points)
    heights = [canonical_height(curve, P, doublings) for P in points]
    r = len(points)
    sums = {}
    for i in range(r):
        for j in range(i + 1, r):
            sums[(i, j)] = canonical_height(curve, add_points(curve, points[i], points[j]), doublings)

    values = [[0.0] * r for _ in range(r)]
    errors = [[0.0] * r for _ in range(r)]
    for i in range(r):
        values[i][i] = heights[i].value
        errors[i][i] = heights[i].error
        for j in range(i + 1, r):
            s = sums[(i, j)]
            values[i][j] = values[j][i] = (s.value - heights[i].value - heights[j].value) / 2
            errors[i][j] = errors[j][i] = (s.error + heights[i].error + heights[j].error) / 2

    matrix = [
        [(values[i][j] - errors[i][j], values[i][j] + errors[i][j]) for j in range(r)] for i in range(r)
    ]
    lo, hi = _iv_det(matrix)
    data = HeightData(
        tuple(heights),
        tuple(tuple(row) for row in values),
        tuple(tuple(row) for row in errors),
        (lo + hi) / 2,
        (hi - lo) / 2,
    )
    if lo <= 0:
        raise ValueError(
            f"independence unverified at this precision: regulator in [{lo:.6g}, {hi:.6g}]"
        )
    return data
