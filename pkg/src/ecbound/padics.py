"""Exact arithmetic in Q_p and its unramified quadratic extension.

Nonzero values are stored multiplicatively, as p^v * u with the unit u kept
modulo p^N (relative precision N).  Multiplicative structure is therefore
exact; addition tracks cancellation explicitly and raises PrecisionError
rather than silently truncating.  A dedicated zero element (unit == 0)
records "indistinguishable from zero at this precision".
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from sympy import isprime, legendre_symbol, primitive_root
from sympy.ntheory.residue_ntheory import discrete_log, sqrt_mod

from .errors import PrecisionError

__all__ = [
    "PadicNumber",
    "QuadExtElement",
    "UnitDecomposition",
    "ordp",
    "ordp_factorial",
    "teichmuller",
    "unit_decompose",
    "padic_log",
    "padic_sqrt",
    "quad_norm",
    "smallest_nonresidue",
]


@functools.lru_cache(maxsize=None)
def _check_odd_prime(p: int) -> None:
    if p == 2 or not isprime(p):
        raise ValueError(f"{p} is not an odd prime")


@functools.lru_cache(maxsize=None)
def _check_nonresidue(p: int, d: int) -> None:
    _check_odd_prime(p)
    if legendre_symbol(d % p, p) != -1:
        raise ValueError(f"{d} is a square mod {p}; not a valid extension generator")


@functools.lru_cache(maxsize=None)
def smallest_nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue mod p."""
    _check_odd_prime(p)
    for d in range(2, p):
        if legendre_symbol(d, p) == -1:
            return d
    raise AssertionError("unreachable for p > 2")


def ordp(x, p: int) -> int:
    """p-adic valuation of a nonzero integer or Fraction."""
    _check_odd_prime(p)
    if isinstance(x, Fraction):
        return ordp(x.numerator, p) - ordp(x.denominator, p)
    x = int(x)
    if x == 0:
        raise ValueError("valuation of zero undefined")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def ordp_factorial(j: int, p: int) -> int:
    """Valuation of j! via Legendre's formula, sum of floor(j / p^i)."""
    _check_odd_prime(p)
    if j < 0:
        raise ValueError("factorial of a negative integer")
    total = 0
    q = p
    while q <= j:
        total += j // q
        q *= p
    return total


@dataclass(frozen=True)
class PadicNumber:
    """p^valuation * unit with the unit known mod p^precision.

    unit == 0 encodes a value indistinguishable from zero; such values have
    no valuation and most operations on them fail loudly.
    """

    prime: int
    valuation: int
    unit: int
    precision: int

    def __post_init__(self):
        _check_odd_prime(self.prime)
        if self.unit == 0:
            if self.valuation != 0:
                raise ValueError("zero element must carry valuation 0")
            return
        if self.precision < 1:
            raise PrecisionError("no significant p-adic digits left")
        mod = self.prime**self.precision
        if not (0 < self.unit < mod):
            object.__setattr__(self, "unit", self.unit % mod)
        if self.unit % self.prime == 0:
            raise ValueError("unit part is divisible by p")

    # -- constructors ------------------------------------------------
    @classmethod
    def zero(cls, p: int, precision: int = 1) -> "PadicNumber":
        return cls(p, 0, 0, precision)

    @classmethod
    def one(cls, p: int, precision: int) -> "PadicNumber":
        return cls(p, 0, 1, precision)

    @classmethod
    def from_rational(cls, x, p: int, precision: int) -> "PadicNumber":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, precision)
        num = x.numerator
        den = x.denominator
        vn = ordp(num, p)
        num //= p**vn
        vd = ordp(den, p)
        den //= p**vd
        mod = p**precision
        unit = num * pow(den, -1, mod) % mod
        return cls(p, vn - vd, unit, precision)

    # -- basic queries -----------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def abs_precision(self) -> int:
        """The value is pinned down modulo p^abs_precision."""
        return self.valuation + self.precision if not self.is_zero else self.precision

    def residue(self) -> int:
        """Unit residue mod p (error on zero)."""
        self._require_nonzero()
        return self.unit % self.prime

    def unit_mod(self, digits: int) -> int:
        self._require_nonzero()
        if digits > self.precision:
            raise PrecisionError(f"only {self.precision} digits known, {digits} requested")
        return self.unit % self.prime**digits

    def _require_nonzero(self):
        if self.is_zero:
            raise ValueError("valuation of zero undefined")

    def one_like(self) -> "PadicNumber":
        return PadicNumber.one(self.prime, self.precision)

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise ValueError("prime mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicNumber.from_rational(other, self.prime, self.precision)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------
    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return PadicNumber.zero(self.prime, min(self.precision, other.precision))
        n = min(self.precision, other.precision)
        return PadicNumber(
            self.prime,
            self.valuation + other.valuation,
            self.unit * other.unit % self.prime**n,
            n,
        )

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        self._require_nonzero()
        mod = self.prime**self.precision
        return PadicNumber(self.prime, -self.valuation, pow(self.unit, -1, mod), self.precision)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise PrecisionError("division by a value indistinguishable from zero")
        if self.is_zero:
            return PadicNumber.zero(self.prime, min(self.precision, other.precision))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return self.one_like()
        self._require_nonzero()
        mod = self.prime**self.precision
        return PadicNumber(self.prime, self.valuation * k, pow(self.unit, k, mod), self.precision)

    def __neg__(self):
        if self.is_zero:
            return self
        mod = self.prime**self.precision
        return PadicNumber(self.prime, self.valuation, (-self.unit) % mod, self.precision)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        v = min(self.valuation, other.valuation)
        abs_prec = min(self.abs_precision, other.abs_precision)
        rel = abs_prec - v
        if rel <= 0:
            raise PrecisionError("operands share no significant digits")
        mod = self.prime**rel
        total = (
            self.unit * self.prime ** (self.valuation - v)
            + other.unit * self.prime ** (other.valuation - v)
        ) % mod
        if total == 0:
            return PadicNumber.zero(self.prime, rel)
        shift = ordp(total, self.prime)
        return PadicNumber(self.prime, v + shift, total // self.prime**shift, rel - shift)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    # -- comparisons ---------------------------------------------------
    def agrees(self, other, digits: int | None = None) -> bool:
        """True if both values coincide modulo p^min(shared precision).

        With `digits` given, the comparison is made on that many unit digits
        instead (an error if either operand does not know them).
        """
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.valuation != other.valuation:
            return False
        n = digits if digits is not None else min(self.precision, other.precision)
        return self.unit_mod(n) == other.unit_mod(n)

    def reduce_precision(self, n: int) -> "PadicNumber":
        if self.is_zero:
            return PadicNumber.zero(self.prime, min(n, self.precision))
        if n > self.precision:
            raise PrecisionError("cannot gain precision")
        return PadicNumber(self.prime, self.valuation, self.unit % self.prime**n, n)

    def __str__(self):
        if self.is_zero:
            return f"O({self.prime}^{self.precision})"
        return f"{self.prime}^{self.valuation}*{self.unit} (mod {self.prime}^{self.precision})"


@dataclass(frozen=True)
class QuadExtElement:
    """p^valuation * (a + b*sqrt(d)) in the unramified quadratic extension.

    d is a fixed quadratic non-residue mod p, and (a, b) are residues mod
    p^precision, not both divisible by p (so a + b*sqrt(d) is a ring unit).
    a == b == 0 encodes zero.  The valuation field extends the plain
    component representation to the whole multiplicative group, which the
    Tate-curve computations need.
    """

    prime: int
    d: int
    valuation: int
    a: int
    b: int
    precision: int

    def __post_init__(self):
        _check_nonresidue(self.prime, self.d)
        if self.a == 0 and self.b == 0:
            if self.valuation != 0:
                raise ValueError("zero element must carry valuation 0")
            return
        if self.precision < 1:
            raise PrecisionError("no significant p-adic digits left")
        mod = self.prime**self.precision
        if not (0 <= self.a < mod and 0 <= self.b < mod):
            object.__setattr__(self, "a", self.a % mod)
            object.__setattr__(self, "b", self.b % mod)
        if self.a % self.prime == 0 and self.b % self.prime == 0:
            raise ValueError("component pair is divisible by p; not a ring unit")

    # -- constructors ------------------------------------------------
    @classmethod
    def zero(cls, p: int, d: int, precision: int = 1) -> "QuadExtElement":
        return cls(p, d, 0, 0, 0, precision)

    @classmethod
    def one(cls, p: int, d: int, precision: int) -> "QuadExtElement":
        return cls(p, d, 0, 1, 0, precision)

    @classmethod
    def from_padic(cls, x: PadicNumber, d: int) -> "QuadExtElement":
        if x.is_zero:
            return cls.zero(x.prime, d, x.precision)
        return cls(x.prime, d, x.valuation, x.unit, 0, x.precision)

    @classmethod
    def sqrt_d(cls, p: int, d: int, precision: int) -> "QuadExtElement":
        return cls(p, d, 0, 0, 1, precision)

    # -- queries -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def abs_precision(self) -> int:
        return self.valuation + self.precision if not self.is_zero else self.precision

    def one_like(self) -> "QuadExtElement":
        return QuadExtElement.one(self.prime, self.d, self.precision)

    def components(self) -> tuple[PadicNumber, PadicNumber]:
        """The two Q_p coordinates p^v*a and p^v*b (either may be zero)."""
        out = []
        for c in (self.a, self.b):
            if c == 0:
                out.append(PadicNumber.zero(self.prime, self.precision))
            else:
                s = ordp(c, self.prime)
                out.append(
                    PadicNumber(self.prime, self.valuation + s, c // self.prime**s, self.precision - s)
                )
        return tuple(out)

    def conjugate(self) -> "QuadExtElement":
        if self.is_zero:
            return self
        mod = self.prime**self.precision
        return QuadExtElement(self.prime, self.d, self.valuation, self.a, (-self.b) % mod, self.precision)

    def _coerce(self, other) -> "QuadExtElement":
        if isinstance(other, QuadExtElement):
            if (other.prime, other.d) != (self.prime, self.d):
                raise ValueError("extension mismatch")
            return other
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise ValueError("prime mismatch")
            return QuadExtElement.from_padic(other, self.d)
        if isinstance(other, (int, Fraction)):
            return QuadExtElement.from_padic(
                PadicNumber.from_rational(other, self.prime, self.precision), self.d
            )
        return NotImplemented

    # -- arithmetic ------------------------------------------------------
    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return QuadExtElement.zero(self.prime, self.d, min(self.precision, other.precision))
        n = min(self.precision, other.precision)
        mod = self.prime**n
        a = (self.a * other.a + self.d * self.b * other.b) % mod
        b = (self.a * other.b + self.b * other.a) % mod
        return QuadExtElement(self.prime, self.d, self.valuation + other.valuation, a, b, n)

    __rmul__ = __mul__

    def norm(self) -> PadicNumber:
        """a^2 - d*b^2 as an element of Q_p; always of even valuation."""
        if self.is_zero:
            raise ValueError("norm of zero undefined")
        mod = self.prime**self.precision
        n = (self.a * self.a - self.d * self.b * self.b) % mod
        return PadicNumber(self.prime, 2 * self.valuation, n, self.precision)

    def inverse(self) -> "QuadExtElement":
        if self.is_zero:
            raise PrecisionError("division by a value indistinguishable from zero")
        mod = self.prime**self.precision
        ninv = pow((self.a * self.a - self.d * self.b * self.b) % mod, -1, mod)
        return QuadExtElement(
            self.prime,
            self.d,
            -self.valuation,
            self.a * ninv % mod,
            -self.b * ninv % mod,
            self.precision,
        )

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise PrecisionError("division by a value indistinguishable from zero")
        if self.is_zero:
            return QuadExtElement.zero(self.prime, self.d, min(self.precision, other.precision))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self.one_like()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __neg__(self):
        if self.is_zero:
            return self
        mod = self.prime**self.precision
        return QuadExtElement(
            self.prime, self.d, self.valuation, (-self.a) % mod, (-self.b) % mod, self.precision
        )

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        v = min(self.valuation, other.valuation)
        abs_prec = min(self.abs_precision, other.abs_precision)
        rel = abs_prec - v
        if rel <= 0:
            raise PrecisionError("operands share no significant digits")
        mod = self.prime**rel
        sa = (self.a * self.prime ** (self.valuation - v) + other.a * self.prime ** (other.valuation - v)) % mod
        sb = (self.b * self.prime ** (self.valuation - v) + other.b * self.prime ** (other.valuation - v)) % mod
        if sa == 0 and sb == 0:
            return QuadExtElement.zero(self.prime, self.d, rel)
        shift = min(ordp(c, self.prime) if c else rel for c in (sa, sb))
        if shift >= rel:
            return QuadExtElement.zero(self.prime, self.d, rel)
        q = self.prime**shift
        return QuadExtElement(self.prime, self.d, v + shift, sa // q, sb // q, rel - shift)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def agrees(self, other, digits: int | None = None) -> bool:
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.valuation != other.valuation:
            return False
        n = digits if digits is not None else min(self.precision, other.precision)
        if n > min(self.precision, other.precision):
            raise PrecisionError("comparison requests unknown digits")
        mod = self.prime**n
        return (self.a - other.a) % mod == 0 and (self.b - other.b) % mod == 0

    def __str__(self):
        if self.is_zero:
            return f"O({self.prime}^{self.precision})"
        return (
            f"{self.prime}^{self.valuation}*({self.a}+{self.b}*sqrt({self.d}))"
            f" (mod {self.prime}^{self.precision})"
        )


def quad_norm(x: QuadExtElement) -> PadicNumber:
    """Field norm to Q_p; multiplicative, and its valuation is always even."""
    return x.norm()


def teichmuller(a: int, p: int, precision: int) -> PadicNumber:
    """The (p-1)-st root of unity congruent to a mod p, by iterating x -> x^p."""
    _check_odd_prime(p)
    if a % p == 0:
        raise ValueError("no Teichmuller lift for a residue divisible by p")
    mod = p**precision
    x = a % mod
    for _ in range(precision + 1):
        y = pow(x, p, mod)
        if y == x:
            break
        x = y
    return PadicNumber(p, 0, x, precision)


def _teichmuller_quad(x: QuadExtElement) -> QuadExtElement:
    """The mu_{p^2-1} part of a ring unit, by iterating x -> x^(p^2)."""
    if x.valuation != 0:
        raise ValueError("Teichmuller part requires a unit")
    y = x
    for _ in range(x.precision + 1):
        z = y ** (x.prime**2)
        if z.agrees(y):
            break
        y = z
    return y


@dataclass(frozen=True)
class UnitDecomposition:
    """x = p^valuation * w^teich_index * (1+p)^one_unit_exponent mod p^precision,

    where w is the Teichmuller lift of the smallest primitive root mod p.
    teich_index is a residue mod p-1 and one_unit_exponent mod p^(precision-1).
    """

    prime: int
    precision: int
    valuation: int
    teich_index: int
    one_unit_exponent: int

    def reassemble(self) -> PadicNumber:
        p, n = self.prime, self.precision
        g = primitive_root(p)
        w = teichmuller(g, p, n)
        one_unit = PadicNumber(p, 0, 1 + p, n) ** self.one_unit_exponent
        return PadicNumber(p, self.valuation, 1, n) * w**self.teich_index * one_unit


def padic_log(u):
    """Logarithm of a one-unit (u = 1 mod p), exact mod p^(abs precision of u-1).

    Works for PadicNumber and QuadExtElement alike; log(1) is the zero
    element.  The alternating series sum((-1)^(k+1) (u-1)^k / k) converges
    because p is odd.
    """
    t = u - u.one_like()
    if t.is_zero:
        return type(u).zero(*_zero_args(u))
    if t.valuation < 1:
        raise ValueError("logarithm requires an argument congruent to 1 mod p")
    p = u.prime
    target = t.abs_precision
    total = t
    power = t
    k = 1
    while True:
        k += 1
        # terms beyond k have valuation >= k*val(t) - log_p(k), eventually > target
        if k * t.valuation - _ilog(k, p) >= target:
            break
        power = power * t
        term = power / k
        if k % 2 == 0:
            term = -term
        total = total + term
    return total


def _zero_args(u):
    if isinstance(u, QuadExtElement):
        return (u.prime, u.d, u.precision)
    return (u.prime, u.precision)


def _ilog(k: int, p: int) -> int:
    out = 0
    while k >= p:
        k //= p
        out += 1
    return out


def unit_decompose(x: PadicNumber) -> UnitDecomposition:
    """Split x into p-power, Teichmuller and one-unit coordinates.

    The one-unit exponent is the ratio of p-adic logarithms
    log(u1)/log(1+p), a unit division since ord(log(1+p)) = 1.
    """
    x._require_nonzero()
    p, n = x.prime, x.precision
    if n < 2:
        raise PrecisionError("insufficient precision for one-unit logarithm")
    g = primitive_root(p)
    t = 0 if x.residue() == 1 else int(discrete_log(p, x.residue(), g))
    theta = teichmuller(x.residue(), p, n)
    u1 = PadicNumber(p, 0, x.unit, n) * theta.inverse()
    if u1.unit == 1:
        a = 0
    else:
        ratio = padic_log(u1) / padic_log(PadicNumber(p, 0, 1 + p, n))
        # the ratio is a p-adic integer determined mod p^(n-1)
        a = ratio.unit * p**ratio.valuation % p ** (n - 1)
    return UnitDecomposition(p, n, x.valuation, t, a)


def padic_sqrt(x: PadicNumber) -> PadicNumber:
    """Square root by Hensel lifting; requires even valuation and a QR unit.

    Deterministic: the root whose residue lies in [1, (p-1)/2] is returned.
    """
    x._require_nonzero()
    p = x.prime
    if x.valuation % 2 != 0:
        raise ValueError("no square root: odd valuation")
    if legendre_symbol(x.residue(), p) != 1:
        raise ValueError("no square root: unit part is a non-residue")
    r = int(sqrt_mod(x.residue(), p))
    r = min(r, p - r)
    inv2 = pow(2, -1, p**x.precision)
    known = 1
    while known < x.precision:
        known = min(2 * known, x.precision)
        mod = p**known
        r = (r + x.unit_mod(known) * pow(r, -1, mod)) * inv2 % mod
    return PadicNumber(p, x.valuation // 2, r, x.precision)
