"""Hypothesis verification and the class-number divisibility certificate.

Given a curve record (coefficients, claimed rank, generators), every
hypothesis is checked with exact arithmetic; when all of them hold, the
certificate is pure arithmetic: the global Kummer degree p^(2nr) divided
by the p^(4n) inertia bound shows that p^((2r-4)n) divides the class
number of the p^n-torsion field.  The exponent is clamped at 0 (for rank
at most 2 the statement is vacuous and the report says so).

The lemma suites re-run the supporting verifications (filtration powers,
commutator subgroups, unit-group structure, covering-map round trips) as
proofs by enumeration.
"""
from __future__ import annotations

import importlib.resources
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from sympy import primerange

from . import elliptic, kummer, matrices, padics, tate
from .elliptic import RationalPoint, WeierstrassCurve
from .errors import HypothesisFailure, ParseError
from .padics import PadicNumber, QuadExtElement

__all__ = [
    "CurveRecord",
    "CheckItem",
    "HypothesisResult",
    "BoundReport",
    "SuiteItem",
    "SuiteReport",
    "parse_curve_file",
    "parse_curve_lines",
    "render_curve_record",
    "builtin_records",
    "find_record",
    "verify_hypotheses",
    "compute_bound",
    "render_report",
    "run_lemma_suite",
    "local_degree_report",
    "working_precision",
]


# ---------------------------------------------------------------------------
# Curve records and the flat-file format
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurveRecord:
    """One input curve: label, coefficients, claimed rank and generators."""

    label: str
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    claimed_rank: int
    generators: tuple[RationalPoint, ...]

    def __post_init__(self):
        if len(self.generators) != self.claimed_rank:
            raise ValueError("number of generators must equal the claimed rank")

    def curve(self) -> WeierstrassCurve:
        return WeierstrassCurve(self.a1, self.a2, self.a3, self.a4, self.a6)


def _parse_rational(token: str) -> Fraction:
    if "/" in token:
        num, den = token.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(token))


def parse_curve_lines(lines) -> list[CurveRecord]:
    """One record per non-comment line: label a1 a2 a3 a4 a6 rank x1 y1 ...

    Coordinates are exact rationals (num/den or plain integers); '#' starts
    a comment.  Malformed lines and duplicate labels raise ParseError with
    the offending line number.
    """
    records = []
    seen = {}
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        tokens = text.split()
        if len(tokens) < 7:
            raise ParseError(f"expected at least 7 fields, found {len(tokens)}", line=lineno)
        label = tokens[0]
        if label in seen:
            raise ParseError(f"duplicate label {label!r} (first seen on line {seen[label]})", line=lineno)
        try:
            a1, a2, a3, a4, a6 = (int(t) for t in tokens[1:6])
            rank = int(tokens[6])
        except ValueError as exc:
            raise ParseError(f"bad integer field: {exc}", line=lineno) from None
        if rank < 0:
            raise ParseError("rank must be non-negative", line=lineno)
        coords = tokens[7:]
        if len(coords) != 2 * rank:
            raise ParseError(
                f"rank {rank} needs {2 * rank} coordinates, found {len(coords)}", line=lineno
            )
        try:
            points = tuple(
                RationalPoint(_parse_rational(coords[2 * i]), _parse_rational(coords[2 * i + 1]))
                for i in range(rank)
            )
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational coordinate: {exc}", line=lineno) from None
        seen[label] = lineno
        records.append(CurveRecord(label, a1, a2, a3, a4, a6, rank, points))
    return records


def parse_curve_file(path) -> list[CurveRecord]:
    with open(path, encoding="utf-8") as handle:
        return parse_curve_lines(handle)


def _format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def render_curve_record(record: CurveRecord) -> str:
    tokens = [record.label]
    tokens += [str(c) for c in (record.a1, record.a2, record.a3, record.a4, record.a6)]
    tokens.append(str(record.claimed_rank))
    for point in record.generators:
        tokens.append(_format_rational(point.x))
        tokens.append(_format_rational(point.y))
    return " ".join(tokens)


def builtin_records() -> list[CurveRecord]:
    data = importlib.resources.files("ecbound.data").joinpath("builtin.curves").read_text()
    return parse_curve_lines(data.splitlines())


def find_record(records, label: str) -> CurveRecord:
    for record in records:
        if record.label == label:
            return record
    raise ParseError(f"no record with label {label!r}")


def working_precision(n: int, override: int | None = None) -> int:
    """Default relative precision: n + 4 digits beyond the p^n level."""
    if override is not None:
        return override
    return n + 4


# ---------------------------------------------------------------------------
# Hypothesis checklist
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    required: bool
    detail: str

    def render(self) -> str:
        status = "ok" if self.passed else "FAIL"
        return f"[{status:>4}] {self.name}: {self.detail}"


@dataclass(frozen=True)
class HypothesisResult:
    record: CurveRecord
    items: tuple[CheckItem, ...]
    prime: int | None
    reduction_kind: str | None

    @property
    def all_required_pass(self) -> bool:
        return all(item.passed for item in self.items if item.required)

    def failed_required(self) -> list[CheckItem]:
        return [item for item in self.items if item.required and not item.passed]

    def item(self, name: str) -> CheckItem:
        for entry in self.items:
            if entry.name == name:
                return entry
        raise KeyError(name)


def _torsion_primes(curve: WeierstrassCurve, count: int = 3) -> list[int]:
    primes = []
    for ell in primerange(3, 1000):
        if curve.discriminant % ell:
            primes.append(ell)
        if len(primes) == count:
            return primes
    raise AssertionError("could not find enough good primes")


def verify_hypotheses(record: CurveRecord, doublings: int = 7) -> HypothesisResult:
    """Run the full hypothesis checklist; failures are data, not exceptions.

    Order: model invariants, prime-conductor checks, generator checks,
    torsion triviality, independence (positive regulator interval), the
    recorded full-image consequence, and the advisory nontrivial-exponent
    item (rank at least 3).
    """
    items: list[CheckItem] = []
    try:
        curve = record.curve()
    except ValueError as exc:
        items.append(CheckItem("model_invariants", False, True, str(exc)))
        return HypothesisResult(record, tuple(items), None, None)

    identities = (
        4 * curve.b8 == curve.b2 * curve.b6 - curve.b4**2
        and 1728 * curve.discriminant == curve.c4**3 - curve.c6**2
    )
    items.append(
        CheckItem(
            "model_invariants",
            identities,
            True,
            f"disc = {curve.discriminant}, c4 = {curve.c4}, c6 = {curve.c6}, j = {curve.j_invariant}",
        )
    )

    conductor = elliptic.check_prime_conductor(curve)
    for check in conductor.checks:
        items.append(CheckItem(check.name, check.passed, True, check.detail))

    items.append(
        CheckItem(
            "generator_count",
            len(record.generators) == record.claimed_rank,
            True,
            f"{len(record.generators)} generators for claimed rank {record.claimed_rank}",
        )
    )

    off_curve = [P for P in record.generators if not elliptic.is_on_curve(curve, P)]
    items.append(
        CheckItem(
            "generators_on_curve",
            not off_curve,
            True,
            "all generators satisfy the equation" if not off_curve else f"off-curve points: {off_curve}",
        )
    )

    torsion_primes = _torsion_primes(curve)
    counts = [elliptic.count_points_mod(curve, ell) for ell in torsion_primes]
    torsion_ok = math.gcd(*counts) == 1
    items.append(
        CheckItem(
            "torsion_trivial",
            torsion_ok,
            True,
            f"point counts {counts} at {torsion_primes} have gcd {math.gcd(*counts)}",
        )
    )

    if off_curve:
        items.append(CheckItem("generators_independent", False, True, "skipped: off-curve generators"))
    elif record.claimed_rank == 0:
        items.append(CheckItem("generators_independent", True, True, "vacuous: no generators"))
    else:
        try:
            data = elliptic.regulator(curve, record.generators, doublings)
            lo, hi = data.regulator_interval()
            items.append(
                CheckItem(
                    "generators_independent",
                    True,
                    True,
                    f"regulator in [{lo:.6f}, {hi:.6f}], positive",
                )
            )
        except ValueError as exc:
            items.append(CheckItem("generators_independent", False, True, str(exc)))

    items.append(
        CheckItem(
            "galois_image_full",
            conductor.passed,
            True,
            "full 2x2 mod-p^n image recorded as a consequence of prime conductor (not recomputed)"
            if conductor.passed
            else "unavailable: prime-conductor checks failed",
        )
    )

    items.append(
        CheckItem(
            "nontrivial_exponent",
            record.claimed_rank >= 3,
            False,
            f"rank {record.claimed_rank} gives exponent (2r-4)n"
            + ("" if record.claimed_rank >= 3 else " clamped to 0: the certificate is vacuous"),
        )
    )

    return HypothesisResult(record, tuple(items), conductor.prime, conductor.reduction_kind)


# ---------------------------------------------------------------------------
# The bound certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """The certified divisibility: p^exponent divides the class number of
    the field generated by the p^n-torsion, with the full checklist."""

    label: str
    p: int
    rank: int
    n: int
    exponent: int
    class_divisor: int
    global_kummer_exponent: int
    inertia_exponent: int
    reduction_kind: str
    checklist: tuple[CheckItem, ...]

    PROVENANCE = (
        "rank and generators are trusted input, validated on-curve, torsion-free "
        "and independent (positive regulator interval); they are not re-derived"
    )

    @property
    def global_kummer_degree(self) -> int:
        return self.p**self.global_kummer_exponent

    @property
    def inertia_bound(self) -> int:
        return self.p**self.inertia_exponent


def compute_bound(record: CurveRecord, n: int, doublings: int = 7) -> BoundReport:
    """Certificate for level n: exponent max(0, (2r-4)n).

    Raises HypothesisFailure naming the first failed required check; no
    report is produced in that case.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    result = verify_hypotheses(record, doublings)
    failed = result.failed_required()
    if failed:
        raise HypothesisFailure(failed[0].name, failed[0].detail)
    r = record.claimed_rank
    exponent = max(0, (2 * r - 4) * n)
    return BoundReport(
        label=record.label,
        p=result.prime,
        rank=r,
        n=n,
        exponent=exponent,
        class_divisor=result.prime**exponent,
        global_kummer_exponent=2 * n * r,
        inertia_exponent=4 * n,
        reduction_kind=result.reduction_kind,
        checklist=result.items,
    )


def _power_string(base: int, exponent: int) -> str:
    return "1" if exponent == 0 else f"{base}^{exponent}"


def render_report(report: BoundReport, format: str = "text") -> str:
    """Deterministic rendering; the machine format is line-oriented key=value."""
    if format == "machine":
        lines = [
            f"label={report.label}",
            f"p={report.p}",
            f"rank={report.rank}",
            f"n={report.n}",
            f"exponent={report.exponent}",
            f"class_divisor={_power_string(report.p, report.exponent)}",
            f"global_kummer_degree={_power_string(report.p, report.global_kummer_exponent)}",
            f"inertia_bound={_power_string(report.p, report.inertia_exponent)}",
            f"reduction={report.reduction_kind}",
        ]
        for item in report.checklist:
            lines.append(f"check.{item.name}={'pass' if item.passed else 'fail'}")
        lines.append(f"provenance={report.PROVENANCE}")
        return "\n".join(lines)
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    lines = [
        f"curve {report.label}: prime conductor p = {report.p}, rank r = {report.rank}, "
        f"{report.reduction_kind} reduction",
        "hypothesis checklist:",
    ]
    for item in report.checklist:
        lines.append("  " + item.render())
    lines += [
        f"global Kummer degree: p^(2nr) = {_power_string(report.p, report.global_kummer_exponent)}",
        f"inertia bound:        p^(4n)  = {_power_string(report.p, report.inertia_exponent)}",
        f"certified divisor of the class number of the p^{report.n}-torsion field: "
        f"{_power_string(report.p, report.exponent)}"
        + (" (trivial bound)" if report.exponent == 0 else ""),
        f"note: {report.PROVENANCE}",
    ]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Lemma suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteItem:
    name: str
    passed: bool
    seconds: float
    detail: str

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name} ({self.seconds:.2f}s) {self.detail}"


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    items: tuple[SuiteItem, ...]

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)


def _timed(items: list, name: str, func):
    start = time.perf_counter()
    passed, detail = func()
    items.append(SuiteItem(name, passed, time.perf_counter() - start, detail))


def _suite_padic(p_override, n_override, budget, rng) -> list[SuiteItem]:
    items: list[SuiteItem] = []
    primes = [p_override] if p_override else [3, 5, 11]

    def factorial_bound():
        for p in primes:
            for j in range(1, 10**4 + 1):
                if not padics.ordp_factorial(j, p) < j / (p - 1):
                    return False, f"bound fails at j={j}, p={p}"
        return True, f"valuation of j! stays below j/(p-1) for j <= 10^4, p in {primes}"

    _timed(items, "factorial_valuation_bound", factorial_bound)

    def teich():
        for p in [p_override] if p_override else [5, 11]:
            mod = p**6
            for a in range(1, p):
                w = padics.teichmuller(a, p, 6)
                if pow(w.unit, p - 1, mod) != 1 or w.unit % p != a:
                    return False, f"failed at a={a}, p={p}"
        return True, "full residue sweep of (p-1)-st roots of unity at precision 6"

    _timed(items, "teichmuller_power_identity", teich)

    def reassembly():
        p = p_override or 5
        for _ in range(500):
            unit = rng.randrange(1, p**6)
            if unit % p == 0:
                continue
            x = PadicNumber(p, rng.randrange(-3, 4), unit, 6)
            if not padics.unit_decompose(x).reassemble().agrees(x):
                return False, f"reassembly failed for {x}"
        return True, "500 pseudorandom units decompose and reassemble exactly"

    _timed(items, "unit_decomposition_reassembly", reassembly)

    def norms():
        p, d = 5, 2
        for _ in range(500):
            xs = []
            while len(xs) < 2:
                a, b = rng.randrange(p**5), rng.randrange(p**5)
                if a % p or b % p:
                    xs.append(QuadExtElement(p, d, rng.randrange(-2, 3), a, b, 5))
            x, y = xs
            if not padics.quad_norm(x * y).agrees(padics.quad_norm(x) * padics.quad_norm(y)):
                return False, "norm not multiplicative"
            if padics.quad_norm(x).valuation % 2:
                return False, "odd norm valuation"
        return True, "norm multiplicative with even valuation on 500 pseudorandom pairs"

    _timed(items, "quadratic_norm_multiplicative", norms)

    def cyclic():
        for p in (3, 5):
            for n in (1, 2):
                mod = p ** (n + 1)
                powers = {pow(1 + p, k, mod) for k in range(p**n)}
                if powers != {1 + p * t for t in range(p**n)}:
                    return False, f"1+{p} does not generate mod {mod}"
        return True, "1+p generates the one-units mod p^(n+1) for p in (3,5), n in (1,2)"

    _timed(items, "one_unit_cyclicity", cyclic)
    return items


def _suite_matrix(p_override, n_override, budget, rng) -> list[SuiteItem]:
    items: list[SuiteItem] = []
    budget = budget or matrices.DEFAULT_BUDGET

    def filtration():
        cases = [(3, 1, 2), (3, 1, 3), (5, 1, 3)]
        if p_override:
            n = n_override or 1
            cases = [(p_override, n, 2 * n + 1)]
        for p, n, m in cases:
            if not matrices.verify_filtration_power_identity(p, n, m, budget=budget):
                return False, f"power map misses the deeper level at (p,n,m)=({p},{n},{m})"
        return True, f"p^n-th powers of level n fill level 2n exactly for {cases}"

    _timed(items, "filtration_power_identity", filtration)

    def roots():
        for p, n, m in ((5, 1, 4), (7, 1, 3)):
            shift = p ** (2 * n)
            for _ in range(200):
                bump = matrices.Mat2ModPn(p, m, tuple(rng.randrange(p**m) for _ in range(4)))
                x = matrices.Mat2ModPn.identity(p, m) + bump.scale(shift)
                y = matrices.matrix_pn_root(x, n)
                if (y ** p**n).entries != x.entries:
                    return False, f"root round trip failed at ({p},{n},{m})"
        return True, "200 pseudorandom roots re-power exactly at (5,1,4) and (7,1,3)"

    _timed(items, "matrix_root_round_trip", roots)

    def commutators():
        for p in (5, 7, 11):
            if matrices.commutator_subgroup_order(p, 1, budget=budget) != matrices.sl2_order(p, 1):
                return False, f"SL2(F_{p}) not perfect"
        small = matrices.commutator_subgroup_order(3, 1, budget=budget)
        if small >= matrices.sl2_order(3, 1):
            return False, "SL2(F_3) unexpectedly perfect"
        return True, f"perfect for p = 5, 7, 11; proper (order {small} < 24) at p = 3"

    _timed(items, "commutator_perfectness", commutators)

    def subspaces():
        p = p_override if p_override and p_override <= 13 else 5
        subs = matrices.conjugation_stable_subspaces(p)
        dims = [s.dimension for s in subs]
        if dims != [0, 1, 3, 4]:
            return False, f"unexpected dimensions {dims}"
        if subs[1].basis != ((1, 0, 0, 1),):
            return False, "1-dimensional piece is not the scalar line"
        if any((m[0] + m[3]) % p for m in subs[2].basis):
            return False, "3-dimensional piece is not trace-zero"
        if not all(matrices.is_conjugation_stable(s) for s in subs):
            return False, "a returned subspace is not stable"
        return True, f"exactly four stable subspaces at p = {p}: 0, scalars, trace-zero, everything"

    _timed(items, "conjugation_stable_subspaces", subspaces)

    def linearization():
        p, m = 3, 2
        one = matrices.Mat2ModPn.identity(p, m)
        mats = [
            matrices.Mat2ModPn(p, m, (a, b, c, d))
            for a in range(p)
            for b in range(p)
            for c in range(p)
            for d in range(p)
        ]
        images = {(one + x.scale(p)).entries for x in mats}
        if len(images) != p**4:
            return False, "map M -> 1+pM is not injective on residues"
        for x in mats:
            for y in mats:
                if ((one + x.scale(p)) * (one + y.scale(p))).entries != (one + (x + y).scale(p)).entries:
                    return False, "group law does not linearize mod p^2"
        return True, "level-1 quotient is the additive 2x2 matrix algebra mod 3, exhaustively"

    _timed(items, "filtration_quotient_linearization", linearization)
    return items


def _suite_kummer(p_override, n_override, budget, rng) -> list[SuiteItem]:
    items: list[SuiteItem] = []

    def split_cosets():
        p, mod = 3, 27
        cubes = {pow(y, 3, mod) for y in range(1, mod) if y % p}
        values = [PadicNumber(p, v, u, 3) for v in (0, 1) for u in range(1, mod) if u % p]
        for x in values:
            for y in values:
                same = kummer.split_kummer_class(x, 1) == kummer.split_kummer_class(y, 1)
                ratio = x / y
                brute = ratio.valuation % 3 == 0 and ratio.unit % mod in cubes
                if same != brute:
                    return False, f"coset mismatch at {x}, {y}"
        return True, "class map refines the exhaustive cube-coset table mod 27"

    _timed(items, "split_class_cosets_exhaustive", split_cosets)

    def norm_one_quotient():
        for p, d, expected in ((3, 2, 36), (5, 2, 150)):
            mod = p**3
            units = [
                (a, b)
                for a in range(mod)
                for b in range(mod)
                if (a % p or b % p) and (a * a - d * b * b) % mod == 1
            ]
            if len(units) != expected:
                return False, f"wrong norm-one count at p={p}: {len(units)}"
            powers = set()
            for a, b in units:
                x = QuadExtElement(p, d, 0, a, b, 3) ** p
                powers.add((x.a, x.b))
            if len(powers) != expected // p:
                return False, f"p-th powers are not index p at p={p}"
        return True, "norm-one units mod p^3 have index-p p-th powers (p = 3: 36, p = 5: 150)"

    _timed(items, "norm_one_quotient_exhaustive", norm_one_quotient)

    def basis_table():
        p, d = 3, 2
        q = tate.TateParameter(PadicNumber(p, 1, 1, 6))
        basis = kummer.nonsplit_basis(q, d, 1)
        qf = QuadExtElement.from_padic(q.q, d)
        mod = 27
        units = [
            (a, b)
            for a in range(mod)
            for b in range(mod)
            if (a % p or b % p) and (a * a - d * b * b) % mod == 1
        ]
        seen = set()
        for exp in range(3):
            for a, b in units:
                x = qf**exp * QuadExtElement(p, d, 0, a, b, 3)
                cls = kummer.nonsplit_class(x, basis)
                if cls.alpha != exp:
                    return False, "q-coordinate wrong"
                seen.add((cls.alpha, cls.beta))
        if seen != {(i, j) for i in range(3) for j in range(3)}:
            return False, "classes do not fill the rank-2 group"
        return True, "norm-kernel classes mod cubes form (Z/3)^2 with basis (q, u), exhaustively"

    _timed(items, "norm_kernel_basis_table", basis_table)

    def surjectivity():
        p, d = 5, 2
        for _ in range(50):
            unit = rng.randrange(1, p**6)
            if unit % p == 0:
                continue
            target = PadicNumber(p, 0, unit, 6)
            if not padics.quad_norm(kummer.solve_unit_norm(target, d)).agrees(target):
                return False, f"norm equation failed for {target}"
        return True, "norm surjective onto 50 pseudorandom unit targets"

    _timed(items, "norm_surjectivity", surjectivity)
    return items


def _suite_tate(p_override, n_override, budget, rng) -> list[SuiteItem]:
    items: list[SuiteItem] = []
    primes = [p_override] if p_override else [5, 11]

    def round_trip():
        for p in primes:
            for _ in range(20):
                e = rng.choice([1, 2, 3])
                j = PadicNumber(p, -e, 1 + p * rng.randrange(p**6), 8)
                q = tate.tate_parameter_from_j(j)
                if q.valuation != e:
                    return False, f"wrong valuation at p={p}"
                if not tate.evaluate_j_from_parameter(q.q).agrees(j, digits=8):
                    return False, f"round trip failed at p={p}"
        return True, f"20 parameter round trips to 8 digits at each p in {primes}"

    _timed(items, "parameter_round_trip", round_trip)

    def coefficient_identity():
        from ecbound.tate import _eval_int_series, _sigma_list

        q = tate.TateParameter(PadicNumber(5, 1, 2, 8))
        a4, a6 = tate.tate_curve_coefficients(q)
        terms = 12
        s3 = _eval_int_series(_sigma_list(3, terms), q.q, start=1)
        s5 = _eval_int_series(_sigma_list(5, terms), q.q, start=1)
        ok = (12 * a6 + 5 * s3 + 7 * s5).is_zero and (a4 + 5 * s3).is_zero
        return ok, "12 a6 = -(5 s3 + 7 s5) and a4 = -5 s3 hold exactly at working precision"

    _timed(items, "coefficient_identity", coefficient_identity)

    def homomorphism():
        q = tate.tate_parameter_from_j(PadicNumber(5, -1, 2, 8))
        a4, a6 = tate.tate_curve_coefficients(q)
        done = 0
        while done < 50:
            v1 = rng.randrange(1, 5**8)
            v2 = rng.randrange(1, 5**8)
            if v1 % 5 in (0, 1) or v2 % 5 in (0, 1):
                continue
            if (v1 * v2 - 1) % 25 == 0 or (v1 - v2) % 5 == 0:
                continue
            u1 = PadicNumber(5, 0, v1, 8)
            u2 = PadicNumber(5, 0, v2, 8)
            product = tate.tate_map(u1 * u2, q)
            total = tate.tate_curve_add(tate.tate_map(u1, q), tate.tate_map(u2, q), a4, a6)
            shared = min(product[0].precision, total[0].precision)
            if not (product[0].agrees(total[0], digits=shared) and product[1].agrees(total[1], digits=min(product[1].precision, total[1].precision))):
                return False, "covering map is not a homomorphism"
            done += 1
        return True, "50 pseudorandom pairs agree with the chord-tangent law"

    _timed(items, "covering_map_homomorphism", homomorphism)

    def inversion():
        q = tate.tate_parameter_from_j(PadicNumber(5, -1, 2, 8))
        done = 0
        while done < 100:
            v = rng.randrange(1, 5**8)
            if v % 5 == 0 or (v - 1) % 25 == 0:
                continue
            u = PadicNumber(5, 0, v, 8)
            back = tate.tate_map_inverse(tate.tate_map(u, q), q)
            if not back.u.agrees(u, digits=min(back.u.precision, u.precision)):
                return False, "inversion round trip failed"
            done += 1
        return True, "100 pseudorandom unit classes invert exactly at working precision"

    _timed(items, "covering_map_inversion", inversion)
    return items


_SUITES = {
    "padic": _suite_padic,
    "matrix": _suite_matrix,
    "kummer": _suite_kummer,
    "tate": _suite_tate,
}


def run_lemma_suite(
    suite: str = "all",
    p: int | None = None,
    n: int | None = None,
    budget: int | None = None,
    seed: int = 271828,
) -> SuiteReport:
    """Run one verification suite (or all of them) with a deterministic seed."""
    if suite != "all" and suite not in _SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(_SUITES)}")
    rng = random.Random(seed)
    names = list(_SUITES) if suite == "all" else [suite]
    items: list[SuiteItem] = []
    for name in names:
        items.extend(_SUITES[name](p, n, budget, rng))
    return SuiteReport(suite, tuple(items))


# ---------------------------------------------------------------------------
# Local degree reporting
# ---------------------------------------------------------------------------


def local_degree_report(record: CurveRecord, n: int, precision: int | None = None) -> str:
    """Deterministic key=value rendering of the local Kummer degree at p."""
    result = verify_hypotheses(record)
    failed = result.failed_required()
    if failed:
        raise HypothesisFailure(failed[0].name, failed[0].detail)
    context = kummer.LocalKummerContext(
        record.curve(), result.prime, n, working_precision(n, precision)
    )
    classes = [context.class_of_point(P) for P in record.generators]
    degree = context.degree_of_points(record.generators)
    lines = [
        f"label={record.label}",
        f"p={result.prime}",
        f"n={n}",
        f"reduction={result.reduction_kind}",
        f"basis={context.basis_tag.value}",
    ]
    for point, cls in zip(record.generators, classes):
        lines.append(f"class[{_format_rational(point.x)},{_format_rational(point.y)}]=({cls.alpha},{cls.beta})")
    lines += [
        f"local_degree={_power_string(result.prime, _exponent_of(degree.degree, result.prime))}",
        f"cyclic={'true' if degree.cyclic else 'false'}",
        f"divides=p^{n}",
    ]
    return "\n".join(lines)


def _exponent_of(value: int, p: int) -> int:
    e = 0
    while value > 1:
        value //= p
        e += 1
    return e
