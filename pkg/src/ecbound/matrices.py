"""2x2 matrix groups modulo prime powers.

Covers the congruence filtration H_n = 1 + p^n M_2(Z_p) truncated mod p^m:
membership, p^n-th roots by a binomial series, exhaustive verification that
the p^n-th power map carries H_n onto H_{2n}, commutator subgroups of
SL_2(Z/p^n Z), and the conjugation-stable subspaces of M_2(F_p).

Exhaustive checks are proofs by enumeration: when a budget is exceeded they
raise BudgetError instead of sampling.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetError
from .padics import _check_odd_prime, ordp, ordp_factorial

__all__ = [
    "Mat2ModPn",
    "SubspaceModP",
    "in_filtration",
    "matrix_pn_root",
    "verify_filtration_power_identity",
    "commutator_subgroup_order",
    "sl2_order",
    "conjugation_stable_subspaces",
]

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class Mat2ModPn:
    """A 2x2 matrix over Z/p^m Z, entries row-major and reduced to [0, p^m)."""

    prime: int
    exponent: int
    entries: tuple[int, int, int, int]

    def __post_init__(self):
        _check_odd_prime(self.prime)
        if self.exponent < 1:
            raise ValueError("modulus exponent must be positive")
        mod = self.modulus
        object.__setattr__(self, "entries", tuple(e % mod for e in self.entries))

    @property
    def modulus(self) -> int:
        return self.prime**self.exponent

    @classmethod
    def identity(cls, p: int, m: int) -> "Mat2ModPn":
        return cls(p, m, (1, 0, 0, 1))

    @classmethod
    def scalar(cls, c: int, p: int, m: int) -> "Mat2ModPn":
        return cls(p, m, (c, 0, 0, c))

    def __mul__(self, other: "Mat2ModPn") -> "Mat2ModPn":
        if (self.prime, self.exponent) != (other.prime, other.exponent):
            raise ValueError("modulus mismatch")
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        mod = self.modulus
        return Mat2ModPn(
            self.prime,
            self.exponent,
            ((a * e + b * g) % mod, (a * f + b * h) % mod, (c * e + d * g) % mod, (c * f + d * h) % mod),
        )

    def __add__(self, other: "Mat2ModPn") -> "Mat2ModPn":
        if (self.prime, self.exponent) != (other.prime, other.exponent):
            raise ValueError("modulus mismatch")
        mod = self.modulus
        return Mat2ModPn(
            self.prime, self.exponent, tuple((x + y) % mod for x, y in zip(self.entries, other.entries))
        )

    def scale(self, c: int) -> "Mat2ModPn":
        mod = self.modulus
        return Mat2ModPn(self.prime, self.exponent, tuple(c * x % mod for x in self.entries))

    def __pow__(self, k: int) -> "Mat2ModPn":
        if k < 0:
            raise ValueError("negative matrix powers not supported")
        result = Mat2ModPn.identity(self.prime, self.exponent)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def det(self) -> int:
        a, b, c, d = self.entries
        return (a * d - b * c) % self.modulus

    def trace(self) -> int:
        a, _, _, d = self.entries
        return (a + d) % self.modulus

    def reduce(self, m: int) -> "Mat2ModPn":
        if m > self.exponent:
            raise ValueError("cannot gain modulus")
        return Mat2ModPn(self.prime, m, self.entries)


def in_filtration(x: Mat2ModPn, n: int) -> bool:
    """Whether x = 1 mod p^n, i.e. x lies in the n-th congruence subgroup."""
    if n < 1:
        raise ValueError("filtration level must be positive")
    if n > x.exponent:
        raise ValueError("filtration level exceeds working modulus")
    q = x.prime**n
    a, b, c, d = x.entries
    return (a - 1) % q == 0 and b % q == 0 and c % q == 0 and (d - 1) % q == 0


def _reduce_coeff_mod(c: Fraction, p: int, m: int) -> tuple[int, int]:
    """(valuation, residue of unit part mod p^m) for a p-integral rational."""
    num, den = c.numerator, c.denominator
    if num == 0:
        return m, 0
    v = ordp(num, p) - ordp(den, p)
    if v < 0:
        raise ArithmeticError("series coefficient is not p-integral")
    num //= p ** ordp(num, p)
    den //= p ** ordp(den, p)
    mod = p**m
    return v, num * pow(den, -1, mod) % mod


def matrix_pn_root(x: Mat2ModPn, n: int) -> Mat2ModPn:
    """A p^n-th root of x in H_n, for x in H_{2n}, via the binomial series
    (1 + p^{2n} M)^(1/p^n) = sum_j binom(1/p^n, j) (p^{2n} M)^j.

    The coefficient of M^j has valuation at least nj - j/(p-1), so the series
    is finite mod p^m; coefficients are computed as exact rationals and
    checked to be p-integral before reduction.  The returned root satisfies
    root^(p^n) = x mod p^m and is canonical mod p^(m-n).
    """
    p, m = x.prime, x.exponent
    if m < 2 * n:
        raise ValueError("working modulus too small: need exponent >= 2n")
    if not in_filtration(x, 2 * n):
        raise ValueError("series diverges outside H_2n")
    shift = p ** (2 * n)
    a, b, c, d = x.entries
    msmall = Mat2ModPn(p, m, ((a - 1) // shift, b // shift, c // shift, (d - 1) // shift))

    result = Mat2ModPn.identity(p, m)
    power = Mat2ModPn.identity(p, m)
    # smallest j0 with j*(n - 1/(p-1)) >= m for every j >= j0
    j_max = 1
    while j_max * (n - Fraction(1, p - 1)) < m:
        j_max += 1
    for j in range(1, j_max):
        power = power * msmall
        # binom(1/p^n, j) * p^{2nj} = p^{nj} * prod_{i<j}(1 - i p^n) / j!
        exact = Fraction(p ** (n * j)) * _falling_product(j, p, n) / _factorial(j)
        v, unit = _reduce_coeff_mod(exact, p, m)
        assert ordp_factorial(j, p) <= n * j, "denominator valuation exceeds p-power"
        if v >= m or unit == 0:
            continue
        result = result + power.scale(p**v * unit)
    return result


def _factorial(j: int) -> int:
    out = 1
    for i in range(2, j + 1):
        out *= i
    return out


def _falling_product(j: int, p: int, n: int) -> int:
    out = 1
    for i in range(j):
        out *= 1 - i * p**n
    return out


def _enumerate_residue_matrices(p: int, m: int) -> np.ndarray:
    """All of M_2(Z/p^m) as an int64 array of shape (p^{4m}, 2, 2)."""
    q = p**m
    grids = np.indices((q, q, q, q), dtype=np.int64)
    flat = grids.reshape(4, -1).T
    return flat.reshape(-1, 2, 2)


def _batched_pow(mats: np.ndarray, k: int, mod: int) -> np.ndarray:
    result = np.broadcast_to(np.eye(2, dtype=np.int64), mats.shape).copy()
    base = mats % mod
    while k:
        if k & 1:
            result = np.matmul(result, base) % mod
        base = np.matmul(base, base) % mod
        k >>= 1
    return result


def verify_filtration_power_identity(p: int, n: int, m: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Exhaustively check that p^n-th powers of H_n mod p^m are exactly H_{2n}.

    Enumerates all p^{4(m-n)} elements of H_n mod p^m; errors if that exceeds
    the budget (enumeration, never sampling).
    """
    _check_odd_prime(p)
    if n < 1 or m < 2 * n:
        raise ValueError("need n >= 1 and m >= 2n")
    count = p ** (4 * (m - n))
    if count > budget:
        raise BudgetError(f"enumeration needs {count} elements, budget is {budget}")
    if p ** (2 * m) > 2**62:
        raise BudgetError("modulus too large for batched integer arithmetic")
    mod = p**m
    mats = _enumerate_residue_matrices(p, m - n)
    xs = (p**n * mats + np.eye(2, dtype=np.int64)) % mod
    powers = _batched_pow(xs, p**n, mod)
    got = np.unique(powers.reshape(-1, 4), axis=0)
    if m <= 2 * n:
        expected = np.array([[1, 0, 0, 1]], dtype=np.int64)
    else:
        high = _enumerate_residue_matrices(p, m - 2 * n)
        expected = ((p ** (2 * n) * high + np.eye(2, dtype=np.int64)) % mod).reshape(-1, 4)
        expected = np.unique(expected, axis=0)
    return got.shape == expected.shape and bool(np.array_equal(got, expected))


def sl2_order(p: int, n: int) -> int:
    """|SL_2(Z/p^n Z)| = p^(3n-2) (p^2 - 1)."""
    return p ** (3 * n - 2) * (p * p - 1)


def _sl2_elements(p: int, n: int, budget: int) -> np.ndarray:
    q = p**n
    if q**4 > 4 * 10**7:
        raise BudgetError(f"scanning {q**4} candidate tuples exceeds the enumeration cap")
    mats = _enumerate_residue_matrices(p, n)
    det = (mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]) % q
    group = mats[det == 1]
    if len(group) > budget:
        raise BudgetError(f"group has {len(group)} elements, budget is {budget}")
    return group


def commutator_subgroup_order(p: int, n: int, budget: int = 10**6) -> int:
    """Order of the subgroup generated by all commutators of SL_2(Z/p^n Z).

    Brute force: enumerate the group, form every commutator x y x^-1 y^-1
    (inverses are adjugates since det = 1), then close the commutator set
    under multiplication.
    """
    _check_odd_prime(p)
    q = p**n
    group = _sl2_elements(p, n, budget)
    order = len(group)
    if order != sl2_order(p, n):
        raise AssertionError("enumeration does not match the group order formula")
    inv = np.empty_like(group)
    inv[:, 0, 0] = group[:, 1, 1]
    inv[:, 0, 1] = (-group[:, 0, 1]) % q
    inv[:, 1, 0] = (-group[:, 1, 0]) % q
    inv[:, 1, 1] = group[:, 0, 0]

    commutators: set[tuple[int, ...]] = set()
    for i in range(order):
        xy = np.matmul(group[i], group) % q
        xyxi = np.matmul(xy, inv[i]) % q
        comm = np.matmul(xyxi, inv) % q
        commutators.update(map(tuple, comm.reshape(-1, 4)))
    if len(commutators) == order:
        # the commutator set is already the whole group
        return order
    return _closure_order(commutators, q)


def _closure_order(generators: set[tuple[int, ...]], q: int) -> int:
    def mul(x, y):
        return (
            (x[0] * y[0] + x[1] * y[2]) % q,
            (x[0] * y[1] + x[1] * y[3]) % q,
            (x[2] * y[0] + x[3] * y[2]) % q,
            (x[2] * y[1] + x[3] * y[3]) % q,
        )

    gens = list(generators)
    known = {(1, 0, 0, 1)} | generators
    frontier = list(known)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in known:
                    known.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(known)


@dataclass(frozen=True)
class SubspaceModP:
    """An F_p-subspace of M_2(F_p), basis in row-reduced echelon form."""

    prime: int
    basis: tuple[tuple[int, int, int, int], ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def contains(self, mat: tuple[int, int, int, int]) -> bool:
        return _rref(self.basis + (mat,), self.prime) == self.basis


def _rref(rows, p: int) -> tuple[tuple[int, ...], ...]:
    rows = [list(r) for r in rows]
    out = []
    pivot = 0
    for col in range(4):
        hit = next((r for r in rows if r[col] % p != 0), None)
        if hit is None:
            continue
        rows.remove(hit)
        inv = pow(hit[col], -1, p)
        hit = [x * inv % p for x in hit]
        rows = [[(x - r[col] * h) % p for x, h in zip(r, hit)] for r in rows]
        out = [[(x - r[col] * h) % p for x, h in zip(r, hit)] for r in out]
        out.append(hit)
        pivot += 1
    return tuple(tuple(r) for r in out)


def _gl2_generators(p: int):
    from sympy import primitive_root

    g = primitive_root(p)
    return (
        (1, 1, 0, 1),
        (1, 0, 1, 1),
        (g % p, 0, 0, 1),
    )


def _conjugate(g, a, p):
    # g a g^-1 with det(g) inverted explicitly
    det = (g[0] * g[3] - g[1] * g[2]) % p
    dinv = pow(det, -1, p)
    gi = (g[3] * dinv % p, -g[1] * dinv % p, -g[2] * dinv % p, g[0] * dinv % p)
    x = (
        g[0] * a[0] + g[1] * a[2],
        g[0] * a[1] + g[1] * a[3],
        g[2] * a[0] + g[3] * a[2],
        g[2] * a[1] + g[3] * a[3],
    )
    return (
        (x[0] * gi[0] + x[1] * gi[2]) % p,
        (x[0] * gi[1] + x[1] * gi[3]) % p,
        (x[2] * gi[0] + x[3] * gi[2]) % p,
        (x[2] * gi[1] + x[3] * gi[3]) % p,
    )


def _orbit_span(seed, p: int) -> tuple[tuple[int, ...], ...]:
    """Smallest conjugation-stable subspace containing the seed matrix."""
    gens = _gl2_generators(p)
    basis = _rref((seed,), p)
    while True:
        grown = basis
        for mat in basis:
            for g in gens:
                grown = _rref(grown + (_conjugate(g, mat, p),), p)
        if grown == basis:
            return basis
        basis = grown


def conjugation_stable_subspaces(p: int) -> list[SubspaceModP]:
    """Every GL_2(F_p)-stable subspace of M_2(F_p) under conjugation.

    Strategy: close each nonzero seed (one per projective class) into the
    cyclic stable subspace it generates, then close the collection under
    pairwise span sums.  Complete because every stable subspace is a sum of
    cyclic ones.
    """
    _check_odd_prime(p)
    if p > 13:
        raise ValueError("subspace enumeration supported for p <= 13 only")
    cyclic: set[tuple] = set()
    seen_seeds: set[tuple] = set()
    for flat in range(1, p**4):
        seed = (flat // p**3 % p, flat // p**2 % p, flat // p % p, flat % p)
        first = next(x for x in seed if x)
        canonical = tuple(x * pow(first, -1, p) % p for x in seed)
        if canonical in seen_seeds:
            continue
        seen_seeds.add(canonical)
        cyclic.add(_orbit_span(canonical, p))
    subspaces = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        nxt = set()
        for a in frontier:
            for b in cyclic:
                s = _rref(a + b, p)
                if s not in subspaces:
                    subspaces.add(s)
                    nxt.add(s)
        frontier = nxt
    subspaces.add(())
    return [SubspaceModP(p, b) for b in sorted(subspaces, key=lambda b: (len(b), b))]


def is_conjugation_stable(sub: SubspaceModP) -> bool:
    """Full-sweep check over all of GL_2(F_p)."""
    p = sub.prime
    for flat in range(p**4):
        g = (flat // p**3 % p, flat // p**2 % p, flat // p % p, flat % p)
        if (g[0] * g[3] - g[1] * g[2]) % p == 0:
            continue
        for mat in sub.basis:
            if not sub.contains(_conjugate(g, mat, p)):
                return False
    return True
