"""Local Kummer classes at a prime of multiplicative reduction.

For split reduction, classes live in the rank-2 group generated by q and
1+p modulo p^n-th powers of Q_p^*; for non-split reduction they live in
the group H of elements of the unramified quadratic extension whose norm
is an integer power of q, with basis (q, u) for a fixed norm-one one-unit
u.  Rational points are transported onto the uniformized model and pulled
back through the covering map to produce their classes; the degree of the
local Kummer extension is the order of the subgroup the classes generate
in the quotient by the q-line.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .elliptic import MULT_NONSPLIT, MULT_SPLIT, RationalPoint, WeierstrassCurve, reduction_type
from .errors import PrecisionError
from .padics import (
    PadicNumber,
    QuadExtElement,
    _teichmuller_quad,
    padic_log,
    padic_sqrt,
    quad_norm,
    smallest_nonresidue,
    unit_decompose,
)
from .tate import TateParameter, on_tate_curve, tate_curve_coefficients, tate_map, tate_map_inverse, tate_parameter_from_j

__all__ = [
    "BasisTag",
    "KummerClass",
    "NormKernelBasis",
    "LocalDegreeResult",
    "ModelTransport",
    "split_kummer_class",
    "rebase_to_q",
    "local_degree_split",
    "nonsplit_membership",
    "nonsplit_basis",
    "nonsplit_class",
    "local_degree_nonsplit",
    "curve_to_tate_model",
    "transport_point",
    "LocalKummerContext",
    "point_to_local_class",
    "local_kummer_degree",
    "solve_unit_norm",
]


class BasisTag(enum.Enum):
    SPLIT_PQ = "split:p,1+p"
    SPLIT_Q = "split:q,1+p"
    NONSPLIT = "nonsplit:q,u"


@dataclass(frozen=True)
class KummerClass:
    """Coordinates (alpha, beta) in (Z/p^n)^2 with respect to a tagged basis."""

    prime: int
    n: int
    alpha: int
    beta: int
    basis: BasisTag

    def __post_init__(self):
        mod = self.prime**self.n
        object.__setattr__(self, "alpha", self.alpha % mod)
        object.__setattr__(self, "beta", self.beta % mod)

    def _check_compatible(self, other: "KummerClass"):
        if (self.prime, self.n, self.basis) != (other.prime, other.n, other.basis):
            raise ValueError("basis mismatch")

    def __add__(self, other: "KummerClass") -> "KummerClass":
        self._check_compatible(other)
        return KummerClass(self.prime, self.n, self.alpha + other.alpha, self.beta + other.beta, self.basis)

    def scale(self, k: int) -> "KummerClass":
        return KummerClass(self.prime, self.n, k * self.alpha, k * self.beta, self.basis)

    @property
    def is_trivial(self) -> bool:
        return self.alpha == 0 and self.beta == 0


def split_kummer_class(x: PadicNumber, n: int) -> KummerClass:
    """Class of x in the (p, 1+p) basis of Q_p^* mod p^n-th powers.

    The prime-to-p root-of-unity part is itself a p^n-th power and drops
    out; the coordinates are the valuation and the one-unit exponent.
    """
    if x.is_zero:
        raise ValueError("zero has no Kummer class")
    if x.precision < n + 1:
        raise PrecisionError(f"precision {x.precision} too small for level {n}")
    dec = unit_decompose(x)
    return KummerClass(x.prime, n, dec.valuation, dec.one_unit_exponent, BasisTag.SPLIT_PQ)


def rebase_to_q(classes, q, n: int) -> list[KummerClass]:
    """Change basis from (p, 1+p) to (q, 1+p).

    Valid because ord(q) is invertible mod p^n; the class of q itself
    becomes (1, 0).
    """
    qv = q.q if isinstance(q, TateParameter) else q
    p = qv.prime
    nu = qv.valuation
    if nu % p == 0:
        raise ValueError("q does not generate: p | ord_p(q)")
    mod = p**n
    beta_q = unit_decompose(qv).one_unit_exponent % mod
    nu_inv = pow(nu % mod, -1, mod)
    out = []
    for cls in classes:
        if cls.basis is not BasisTag.SPLIT_PQ:
            raise ValueError("basis mismatch: expected the (p, 1+p) basis")
        if (cls.prime, cls.n) != (p, n):
            raise ValueError("basis mismatch: wrong prime or level")
        alpha = cls.alpha * nu_inv % mod
        beta = (cls.beta - beta_q * alpha) % mod
        out.append(KummerClass(p, n, alpha, beta, BasisTag.SPLIT_Q))
    return out


@dataclass(frozen=True)
class LocalDegreeResult:
    """Order of the local Kummer extension: a p-power dividing p^n, cyclic."""

    degree: int
    cyclic: bool
    generator: KummerClass


def _degree_in_quotient(classes, n: int, expected_basis: BasisTag) -> LocalDegreeResult:
    if not classes:
        raise ValueError("no classes supplied")
    p = classes[0].prime
    for cls in classes:
        if cls.basis is not expected_basis or (cls.prime, cls.n) != (p, n):
            raise ValueError("basis mismatch")
    mod = p**n
    g = math.gcd(mod, *(cls.beta for cls in classes))
    degree = mod // g
    generator = min(classes, key=lambda c: mod if c.beta == 0 else math.gcd(c.beta, mod))
    return LocalDegreeResult(degree, True, generator)


def local_degree_split(classes, n: int) -> LocalDegreeResult:
    """Degree contributed by the classes modulo the q-line, split case.

    The quotient of (Z/p^n)^2 by the span of (1, 0) is cyclic of order p^n;
    the degree is the order of the subgroup the beta-coordinates generate.
    """
    return _degree_in_quotient(classes, n, BasisTag.SPLIT_Q)


def local_degree_nonsplit(classes, n: int) -> LocalDegreeResult:
    return _degree_in_quotient(classes, n, BasisTag.NONSPLIT)


# ---------------------------------------------------------------------------
# Non-split machinery: the norm-kernel group H
# ---------------------------------------------------------------------------


def nonsplit_membership(x: QuadExtElement, q) -> bool:
    """Whether the norm of x is an integer power of q, at working precision."""
    qv = q.q if isinstance(q, TateParameter) else q
    if x.is_zero:
        raise ValueError("zero is not in the multiplicative group")
    nx = quad_norm(x)
    nu = qv.valuation
    if nx.valuation % nu != 0:
        return False
    m = nx.valuation // nu
    ratio = nx / qv**m
    if ratio.precision < 1:
        raise PrecisionError("precision insufficient to decide membership")
    return ratio.agrees(ratio.one_like())


@dataclass(frozen=True)
class NormKernelBasis:
    """Basis (q, u) of H mod p^n-th powers: u = (1+p sqrt(d))/(1-p sqrt(d)).

    u has norm exactly 1 and generates the norm-one units modulo p^n-th
    powers (its logarithm has valuation 1 on the sqrt(d)-coordinate).  The
    index of the subgroup generated by q and the norm-one units inside H is
    1 or 2 according to the parity of ord(q).
    """

    q: TateParameter
    d: int
    n: int
    u: QuadExtElement
    index_h_h0: int

    @property
    def prime(self) -> int:
        return self.q.prime


def nonsplit_basis(q: TateParameter, d: int, n: int) -> NormKernelBasis:
    p = q.prime
    precision = q.precision
    if precision < n + 2:
        raise PrecisionError(f"precision {precision} too small for level {n}")
    sqrt_d = QuadExtElement.sqrt_d(p, d, precision)
    one = QuadExtElement.one(p, d, precision)
    u = (one + p * sqrt_d) / (one - p * sqrt_d)
    if not quad_norm(u).agrees(PadicNumber.one(p, precision)):
        raise AssertionError("norm-one construction failed")
    log_a, log_b = padic_log(u).components()
    if not log_a.is_zero or log_b.is_zero or log_b.valuation != 1:
        raise PrecisionError("one-unit generator degenerated at this precision")
    return NormKernelBasis(q, d, n, u, 1 if q.valuation % 2 else 2)


def _norm_one_exponent(w: QuadExtElement, basis: NormKernelBasis) -> int:
    """Exponent of w against the basis one-unit u, through p-adic logarithms.

    The prime-to-p torsion part of the norm-one group is a p^n-th power and
    is stripped off first; the remaining one-unit has a trace-zero
    logarithm, and its sqrt(d)-coordinate divided by that of log(u) is the
    exponent.
    """
    omega = _teichmuller_quad(w)
    w1 = w / omega
    if (w1 - w1.one_like()).is_zero:
        return 0
    log_a, log_b = padic_log(w1).components()
    if not log_a.is_zero:
        raise PrecisionError("norm-one logarithm has a rational component; raise precision")
    ub = padic_log(basis.u).components()[1]
    ratio = log_b / ub
    if ratio.is_zero:
        return 0
    mod = basis.prime**basis.n
    if ratio.valuation + ratio.precision < basis.n:
        raise PrecisionError("insufficient precision for the one-unit exponent")
    return ratio.unit * basis.prime**ratio.valuation % mod


def nonsplit_class(x: QuadExtElement, basis: NormKernelBasis) -> KummerClass:
    """Coordinates of x in the (q, u) basis of H mod p^n-th powers.

    The q-exponent is half the norm valuation (2 is invertible), and the
    u-exponent is read off x^2 q^-m, which always has norm one.
    """
    if not nonsplit_membership(x, basis.q):
        raise ValueError("element is not in the norm-kernel group H")
    p, n = basis.prime, basis.n
    mod = p**n
    nu = basis.q.valuation
    m = quad_norm(x).valuation // nu
    inv2 = pow(2, -1, mod)
    alpha = m * inv2 % mod
    w = x * x * QuadExtElement.from_padic(basis.q.q, basis.d) ** (-m)
    beta = _norm_one_exponent(w, basis) * inv2 % mod
    return KummerClass(p, n, alpha, beta, BasisTag.NONSPLIT)


def solve_unit_norm(target: PadicNumber, d: int) -> QuadExtElement:
    """Some x with norm(x) = target, for a unit target (norm surjectivity)."""
    if target.is_zero or target.valuation != 0:
        raise ValueError("unit target required")
    p, precision = target.prime, target.precision
    for b in range(4 * p):
        candidate = target + d * b * b
        if candidate.is_zero or candidate.valuation != 0:
            continue
        try:
            a = padic_sqrt(candidate)
        except ValueError:
            continue
        return QuadExtElement(p, d, 0, a.unit, b, precision)
    raise AssertionError("norm equation unexpectedly unsolvable")


# ---------------------------------------------------------------------------
# Transport of rational points onto the uniformized model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelTransport:
    """Coordinate change (u, r, s, t) from a rational model onto the q-model.

    Over Q_p for split reduction; over the unramified quadratic extension
    (u a sqrt(d)-multiple) for non-split reduction.
    """

    curve: WeierstrassCurve
    q: TateParameter
    split: bool
    d: int | None
    u: object
    r: object
    s: object
    t: object
    a4: object
    a6: object


def curve_to_tate_model(curve: WeierstrassCurve, q: TateParameter, split: bool, d: int | None = None) -> ModelTransport:
    """Solve for the isomorphism onto y^2 + xy = x^3 + a4(q) x + a6(q).

    u^2 = (c6 c4') / (c4 c6') is a unit square in Q_p exactly in the split
    case; otherwise u is a sqrt(d)-multiple.  The shifts r, s, t are then
    forced by the target coefficients (1, 0, 0), and the last two
    coefficient identities are verified explicitly.
    """
    p = q.prime
    if p < 5:
        raise ValueError("transport requires p >= 5")
    precision = q.precision
    a4q, a6q = tate_curve_coefficients(q)
    c4_target = 1 - 48 * a4q
    c6_target = -1 + 72 * a4q - 864 * a6q
    c4_source = PadicNumber.from_rational(curve.c4, p, precision)
    c6_source = PadicNumber.from_rational(curve.c6, p, precision)
    u_squared = (c6_source * c4_target) / (c4_source * c6_target)
    if u_squared.valuation != 0:
        raise PrecisionError("transport degenerated: u^2 is not a unit")

    is_square = pow(u_squared.residue(), (p - 1) // 2, p) == 1
    if is_square != split:
        raise AssertionError("reduction type inconsistent with the coordinate change")
    if split:
        u = padic_sqrt(u_squared)

        def lift(value):
            return PadicNumber.from_rational(value, p, precision)

    else:
        if d is None:
            d = smallest_nonresidue(p)
        root = padic_sqrt(u_squared / d)
        u = QuadExtElement(p, d, root.valuation, 0, root.unit, root.precision)

        def lift(value):
            return QuadExtElement.from_padic(PadicNumber.from_rational(value, p, precision), d)

    a1, a2, a3, a4, a6 = (lift(c) for c in curve.coefficients())
    s = (u - a1) / 2
    r = (s * s + s * a1 - a2) / 3
    t = -(a3 + r * a1) / 2
    if split:
        a4_model, a6_model = a4q, a6q
    else:
        a4_model, a6_model = QuadExtElement.from_padic(a4q, d), QuadExtElement.from_padic(a6q, d)

    lhs4 = u**4 * a4_model
    rhs4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
    lhs6 = u**6 * a6_model
    rhs6 = a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1
    if not ((lhs4 - rhs4).is_zero and (lhs6 - rhs6).is_zero):
        raise PrecisionError("transport inconsistent at working precision")
    return ModelTransport(curve, q, split, d, u, r, s, t, a4_model, a6_model)


def transport_point(transport: ModelTransport, point: RationalPoint):
    """Image of a rational point on the uniformized model, or None for infinity."""
    if point.is_infinity:
        return None
    p = transport.q.prime
    precision = transport.q.precision
    x = PadicNumber.from_rational(point.x, p, precision)
    y = PadicNumber.from_rational(point.y, p, precision)
    if not transport.split:
        x = QuadExtElement.from_padic(x, transport.d)
        y = QuadExtElement.from_padic(y, transport.d)
    u = transport.u
    xs = (x - transport.r) / (u * u)
    ys = (y - transport.s * (x - transport.r) - transport.t) / u**3
    if not on_tate_curve((xs, ys), transport.a4, transport.a6):
        raise PrecisionError("transported point misses the model at working precision")
    return (xs, ys)


# ---------------------------------------------------------------------------
# Points to classes, and the local degree
# ---------------------------------------------------------------------------


class LocalKummerContext:
    """Shared state for classifying several points on one curve: the Tate
    parameter, the model transport and (non-split) the norm-kernel basis."""

    def __init__(self, curve: WeierstrassCurve, p: int, n: int, precision: int | None = None):
        info = reduction_type(curve, p)
        if info.kind not in (MULT_SPLIT, MULT_NONSPLIT):
            raise ValueError(f"reduction at {p} is {info.kind}, not multiplicative")
        self.curve = curve
        self.prime = p
        self.n = n
        self.precision = precision if precision is not None else n + 4
        if self.precision < n + 2:
            raise PrecisionError(f"precision {self.precision} too small for level {n}")
        self.split = info.kind == MULT_SPLIT
        j = PadicNumber.from_rational(curve.j_invariant, p, self.precision)
        self.q = tate_parameter_from_j(j)
        self.d = None if self.split else smallest_nonresidue(p)
        self.transport = curve_to_tate_model(curve, self.q, self.split, self.d)
        self.basis = None if self.split else nonsplit_basis(self.q, self.d, n)

    @property
    def basis_tag(self) -> BasisTag:
        return BasisTag.SPLIT_Q if self.split else BasisTag.NONSPLIT

    def class_of_point(self, point: RationalPoint) -> KummerClass:
        if point.is_infinity:
            return KummerClass(self.prime, self.n, 0, 0, self.basis_tag)
        image = transport_point(self.transport, point)
        unit_class = tate_map_inverse(image, self.q)
        if unit_class.is_identity:
            return KummerClass(self.prime, self.n, 0, 0, self.basis_tag)
        rep = unit_class.u
        if self.split:
            return rebase_to_q([split_kummer_class(rep, self.n)], self.q, self.n)[0]
        if not nonsplit_membership(rep, self.q):
            raise PrecisionError("pulled-back unit escapes the norm-kernel group; raise precision")
        return nonsplit_class(rep, self.basis)

    def degree_of_points(self, points) -> LocalDegreeResult:
        classes = [self.class_of_point(P) for P in points]
        if not classes:
            classes = [KummerClass(self.prime, self.n, 0, 0, self.basis_tag)]
        if self.split:
            return local_degree_split(classes, self.n)
        return local_degree_nonsplit(classes, self.n)


def point_to_local_class(
    curve: WeierstrassCurve, point: RationalPoint, p: int, n: int, precision: int | None = None
) -> KummerClass:
    """Class of a rational point in the local Kummer quotient at p."""
    return LocalKummerContext(curve, p, n, precision).class_of_point(point)


def local_kummer_degree(
    curve: WeierstrassCurve, p: int, points, n: int, precision: int | None = None
) -> LocalDegreeResult:
    """Degree of the local Kummer extension generated by the points at p."""
    return LocalKummerContext(curve, p, n, precision).degree_of_points(points)
