"""p-adic Tate curve uniformization.

Computes the multiplicative parameter q with modular invariant j(q) equal
to a given j of negative valuation, the coefficients of the uniformized
model y^2 + xy = x^3 + a4(q) x + a6(q), and the covering map from the
multiplicative group (with kernel the cyclic group generated by q) together
with its inverse.

All q-expansions are exact integer series evaluated p-adically; truncation
orders are chosen so the discarded tails sit below the working precision.
"""
from __future__ import annotations

from dataclasses import dataclass

from .elliptic import weierstrass_add, weierstrass_negate
from .errors import PrecisionError
from .padics import PadicNumber, QuadExtElement

__all__ = [
    "TateParameter",
    "TatePoint",
    "tate_parameter_from_j",
    "evaluate_j_from_parameter",
    "tate_curve_coefficients",
    "tate_map",
    "tate_map_inverse",
    "tate_curve_add",
    "tate_curve_negate",
    "on_tate_curve",
    "j_series_coefficients",
    "parameter_series_coefficients",
]


# ---------------------------------------------------------------------------
# Integer q-expansion machinery
# ---------------------------------------------------------------------------


def _sigma(k: int, n: int) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def _series_mul(a: list[int], b: list[int], terms: int) -> list[int]:
    out = [0] * terms
    for i, ai in enumerate(a[:terms]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: terms - i]):
            out[i + j] += ai * bj
    return out


def _series_inv(a: list[int], terms: int) -> list[int]:
    if a[0] != 1:
        raise ValueError("inversion requires constant term 1")
    out = [0] * terms
    out[0] = 1
    for n in range(1, terms):
        out[n] = -sum(a[k] * out[n - k] for k in range(1, min(n, len(a) - 1) + 1))
    return out


def _eta24(terms: int) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - q^n)^24."""
    out = [0] * terms
    out[0] = 1
    for n in range(1, terms):
        factor = [0] * terms
        factor[0] = 1
        if n < terms:
            factor[n] = -1
        for _ in range(24):
            out = _series_mul(out, factor, terms)
    return out


def _eisenstein4(terms: int) -> list[int]:
    return [1] + [240 * _sigma(3, n) for n in range(1, terms)]


def j_series_coefficients(terms: int) -> list[int]:
    """Coefficients of q * j(q) = 1 + 744 q + 196884 q^2 + ...

    Derived from the weight-4 Eisenstein series cubed over the discriminant
    product, so the table is computed rather than transcribed.
    """
    e4 = _eisenstein4(terms)
    num = _series_mul(_series_mul(e4, e4, terms), e4, terms)
    return _series_mul(num, _series_inv(_eta24(terms), terms), terms)


def _inverse_j_coefficients(terms: int) -> list[int]:
    """Coefficients of 1/j(q) = q/psi(q) as a power series in q (index = power)."""
    return [0] + _series_inv(j_series_coefficients(terms), terms)[: terms - 1]


def parameter_series_coefficients(terms: int) -> list[int]:
    """Coefficients of the reversed series q(w) where w = 1/j.

    Solves phi(q) = w for phi = q/psi(q) by coefficient recursion; the
    leading terms are w + 744 w^2 + 750420 w^3 + ...
    """
    phi = _inverse_j_coefficients(terms + 1)
    r = [0] * (terms + 1)
    r[1] = 1
    for _ in range(terms):
        # substitute: q = w - sum_{j>=2} phi_j q^j, refining one order per pass
        powers = [None, list(r)]
        for j in range(2, terms + 1):
            powers.append(_series_mul(powers[-1], r, terms + 1))
        new = [0] * (terms + 1)
        new[1] = 1
        for j in range(2, terms + 1):
            for i, c in enumerate(powers[j]):
                if i <= terms:
                    new[i] -= phi[j] * c
        if new == r:
            break
        r = new
    return r[: terms + 1]


_COEFF_CACHE: dict[tuple[str, int], list[int]] = {}


def _cached(kind: str, terms: int, builder) -> list[int]:
    key = (kind, terms)
    if key not in _COEFF_CACHE:
        _COEFF_CACHE[key] = builder(terms)
    return _COEFF_CACHE[key]


def _sigma_list(k: int, terms: int) -> list[int]:
    return _cached(f"sigma{k}", terms, lambda t: [0] + [_sigma(k, n) for n in range(1, t)])


# ---------------------------------------------------------------------------
# Tate parameter from j
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TateParameter:
    """The multiplicative period q, an element of positive valuation."""

    q: PadicNumber

    def __post_init__(self):
        if self.q.is_zero or self.q.valuation < 1:
            raise ValueError("Tate parameter must have positive valuation")

    @property
    def prime(self) -> int:
        return self.q.prime

    @property
    def valuation(self) -> int:
        return self.q.valuation

    @property
    def precision(self) -> int:
        return self.q.precision


def _eval_int_series(coeffs: list[int], x, start: int = 0):
    """sum coeffs[k] * x^k for k >= start, in the field of x."""
    total = None
    power = x.one_like() if start == 0 else x**start
    for k in range(start, len(coeffs)):
        if coeffs[k]:
            term = power * coeffs[k]
            total = term if total is None else total + term
        power = power * x
    if total is None:
        return type(x).zero(*_field_args(x))
    return total


def _field_args(x):
    if isinstance(x, QuadExtElement):
        return (x.prime, x.d, x.precision)
    return (x.prime, x.precision)


def tate_parameter_from_j(j: PadicNumber) -> TateParameter:
    """Solve j(q) = j for q, for j of negative valuation.

    Seeds with the first eight coefficients of the reverted series q(1/j)
    and polishes by Newton iteration on phi(q) = 1/j where phi = q/psi(q);
    the result satisfies ord(q) = -ord(j).
    """
    if j.is_zero or j.valuation >= 0:
        raise ValueError("not multiplicative: |j| <= 1")
    e = -j.valuation
    n_rel = j.precision
    terms = (e + n_rel) // e + 2
    w = j.inverse()

    seed_coeffs = _cached("reversion", 9, parameter_series_coefficients)
    q = _eval_int_series(seed_coeffs, w, start=1)

    phi = _cached("invj", terms + 1, _inverse_j_coefficients)
    dphi = [k * c for k, c in enumerate(phi)][1:]
    for _ in range(64):
        residual = _eval_int_series(phi, q, start=1) - w
        if residual.is_zero:
            break
        q = q - residual / _eval_int_series(dphi, q)
    else:
        raise PrecisionError("inversion failed: raise precision")
    if q.valuation != e:
        raise PrecisionError("inversion failed: wrong leading valuation")
    return TateParameter(q.reduce_precision(min(q.precision, n_rel)))


def evaluate_j_from_parameter(q: PadicNumber) -> PadicNumber:
    """j(q) = psi(q)/q, re-evaluated from the integer series."""
    terms = (q.valuation + q.precision) // q.valuation + 2
    psi = _cached("jq", terms + 1, j_series_coefficients)
    return _eval_int_series(psi, q) / q


def tate_curve_coefficients(q: TateParameter):
    """(a4, a6) of y^2 + xy = x^3 + a4 x + a6 from the sigma-series.

    a4 = -5 s3(q) and 12 a6 = -(5 s3(q) + 7 s5(q)); the a6 coefficients are
    exact integers (the classical divisibility by 12), asserted on the fly.
    """
    qq = q.q
    terms = (qq.valuation + qq.precision) // qq.valuation + 2
    s3 = _sigma_list(3, terms + 1)
    s5 = _sigma_list(5, terms + 1)
    a4_coeffs = [-5 * c for c in s3]
    a6_coeffs = []
    for c3, c5 in zip(s3, s5):
        num = -(5 * c3 + 7 * c5)
        if num % 12:
            raise AssertionError("a6 q-expansion coefficient not integral")
        a6_coeffs.append(num // 12)
    return _eval_int_series(a4_coeffs, qq, start=1), _eval_int_series(a6_coeffs, qq, start=1)


# ---------------------------------------------------------------------------
# The covering map and its inverse
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TatePoint:
    """A class in the multiplicative group modulo integer powers of q.

    u is the normalized representative (0 <= ord(u) < ord(q)); None encodes
    the identity class (u a power of q).
    """

    u: PadicNumber | QuadExtElement | None

    @classmethod
    def identity(cls) -> "TatePoint":
        return cls(None)

    @property
    def is_identity(self) -> bool:
        return self.u is None


def _coerce_to_field(value, like):
    if isinstance(like, QuadExtElement) and isinstance(value, PadicNumber):
        return QuadExtElement.from_padic(value, like.d)
    return value


def _normalize_rep(u, q: PadicNumber):
    shift = u.valuation // q.valuation
    if shift:
        u = u * _coerce_to_field(q, u) ** (-shift)
    return u


def _f(v):
    one = v.one_like()
    return v / ((one - v) * (one - v))


def _fp(v):
    one = v.one_like()
    return (one + v) / (one - v) ** 3


def _g(v):
    one = v.one_like()
    return v * v / (one - v) ** 3


def _gp(v):
    one = v.one_like()
    return v * (2 + v) / (one - v) ** 4


def _g_inv(w):
    one = w.one_like()
    return -w / (one - w) ** 3


def _gp_inv(w):
    one = w.one_like()
    return -(1 + 2 * w) / (one - w) ** 4


def _series_sums(u, q: PadicNumber, with_derivatives: bool):
    """X(u), Y(u) and optionally their u-derivatives, summed to precision."""
    qf = _coerce_to_field(q, u)
    nu = q.valuation
    target = max(u.abs_precision, q.valuation + q.precision) + nu + 2

    x_total = _f(u)
    y_total = _g(u)
    dx_total = _fp(u) if with_derivatives else None
    dy_total = _gp(u) if with_derivatives else None

    m = 1
    while m * nu - abs(u.valuation) < target:
        qm = qf**m
        v = qm * u
        w = qm / u
        x_total = x_total + _f(v) + _f(w)
        y_total = y_total + _g(v) + _g_inv(w)
        if with_derivatives:
            dx_total = dx_total + _fp(v) * qm + _fp(w) * (-w / u)
            dy_total = dy_total + _gp(v) * qm + _gp_inv(w) * (-w / u)
        m += 1

    s1 = _eval_int_series(_sigma_list(1, (target // nu) + 2), qf, start=1)
    x_total = x_total - 2 * s1
    y_total = y_total + s1
    return x_total, y_total, dx_total, dy_total


def tate_map(point, q: TateParameter):
    """The covering map: a unit class u maps to (X(u), Y(u)) on the q-model.

    Classes of q-powers map to the identity (returned as None).  Arguments
    may be given as TatePoint or as raw field elements; representatives are
    normalized into 0 <= ord(u) < ord(q) first.
    """
    u = point.u if isinstance(point, TatePoint) else point
    if u is None:
        return None
    if u.is_zero:
        raise ValueError("zero is not in the multiplicative group")
    u = _normalize_rep(u, q.q)
    if (u - u.one_like()).is_zero:
        return None
    x, y, _, _ = _series_sums(u, q.q, with_derivatives=False)
    return (x, y)


def tate_map_inverse(point, q: TateParameter, max_iterations: int = 64) -> TatePoint:
    """Recover the unit class from a point on the q-model.

    Newton iteration on the ratio Y/X = u/(1-u) + O(q), whose u-derivative
    is a unit whenever u is not congruent to 1; the Y-coordinate pins down
    the representative among u and q/u.  The recovered class is verified by
    re-applying the forward map.
    """
    if point is None or (isinstance(point, TatePoint) and point.is_identity):
        return TatePoint.identity()
    x, y = point
    if x.is_zero:
        raise PrecisionError("inversion failed: raise precision")
    ratio = y / x
    u = ratio / (ratio.one_like() + ratio)
    converged = False
    for _ in range(max_iterations):
        xs, ys, dxs, dys = _series_sums(u, q.q, with_derivatives=True)
        residual = ys / xs - ratio
        if residual.is_zero:
            converged = True
            break
        slope = (dys * xs - dxs * ys) / (xs * xs)
        u = u - residual / slope
    if not converged:
        raise PrecisionError("inversion failed: raise precision")
    u = _normalize_rep(u, q.q)
    check = tate_map(u, q)
    if check is None or not (check[0].agrees(x) and check[1].agrees(y)):
        raise PrecisionError("inversion failed: raise precision")
    return TatePoint(u)


# ---------------------------------------------------------------------------
# Group structure on the q-model
# ---------------------------------------------------------------------------


def _padic_same(a, b) -> bool:
    try:
        return (a - b).is_zero
    except PrecisionError:
        return False


def tate_curve_add(P, Q, a4, a6):
    """Chord-tangent addition on y^2 + xy = x^3 + a4 x + a6."""
    return weierstrass_add((1, 0, 0, a4, a6), P, Q, same=_padic_same)


def tate_curve_negate(P):
    return weierstrass_negate((1, 0, 0, None, None), P)


def on_tate_curve(P, a4, a6) -> bool:
    """Whether the equation holds to the shared working precision."""
    if P is None:
        return True
    x, y = P
    lhs = y * y + x * y
    rhs = x**3 + a4 * x + a6
    return _padic_same(lhs, rhs)
