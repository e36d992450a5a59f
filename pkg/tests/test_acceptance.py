"""Acceptance suite: one test per criterion, each printing a PASS line with
its runtime and asserting the stated tolerance (exact arithmetic checks are
zero-tolerance) and time budget."""

import random
import time

import pytest

from ecbound import engine
from ecbound.cli import main
from ecbound.elliptic import (
    RationalPoint,
    canonical_height,
    compute_invariants,
    double_point,
    regulator,
)
from ecbound.kummer import nonsplit_basis, nonsplit_class, split_kummer_class
from ecbound.matrices import (
    Mat2ModPn,
    commutator_subgroup_order,
    conjugation_stable_subspaces,
    is_conjugation_stable,
    matrix_pn_root,
    sl2_order,
    verify_filtration_power_identity,
)
from ecbound.padics import PadicNumber, QuadExtElement, ordp
from ecbound.tate import (
    TateParameter,
    evaluate_j_from_parameter,
    tate_curve_add,
    tate_curve_coefficients,
    tate_map,
    tate_map_inverse,
    tate_parameter_from_j,
)

CURVE_5077 = compute_invariants(0, 0, 1, -7, 6)
GENS_5077 = (
    RationalPoint.affine(0, 2),
    RationalPoint.affine(1, 0),
    RationalPoint.affine(2, 0),
)


class _Budget:
    def __init__(self, name, limit_seconds):
        self.name = name
        self.limit = limit_seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is None:
            assert elapsed < self.limit, f"{self.name} took {elapsed:.1f}s, budget {self.limit}s"
            print(f"ACCEPTANCE {self.name}: PASS ({elapsed:.2f}s)")
        return False


def test_criterion_01_end_to_end_bound(capsys):
    with _Budget("1 end-to-end certificate for the rank-3 conductor-5077 curve", 5):
        for n in (1, 2, 3, 4):
            code = main(["bound", "--label", "5077a1", "--n", str(n), "--format", "machine"])
            out = capsys.readouterr().out
            assert code == 0
            assert f"exponent={2 * n}" in out
            assert f"class_divisor=5077^{2 * n}" in out
            assert "reduction=multiplicative-nonsplit" in out
            assert "=fail" not in out


def test_criterion_02_filtration_power_identity_by_exhaustion():
    with _Budget("2 filtration power identity by exhaustion", 60):
        assert verify_filtration_power_identity(3, 1, 2)
        assert verify_filtration_power_identity(3, 1, 3)
        assert verify_filtration_power_identity(5, 1, 3)  # 5^8 = 390625 matrices


def test_criterion_03_matrix_root_exact_round_trip():
    with _Budget("3 matrix p^n-th root round trip, exact", 10):
        for p, n, m in ((5, 1, 4), (7, 1, 3)):
            rng = random.Random(97 * p + m)
            shift = p ** (2 * n)
            for _ in range(200):
                bump = Mat2ModPn(p, m, tuple(rng.randrange(p**m) for _ in range(4)))
                x = Mat2ModPn.identity(p, m) + bump.scale(shift)
                y = matrix_pn_root(x, n)
                assert (y ** p**n).entries == x.entries  # zero tolerance


def test_criterion_04_commutator_subgroup_boundary():
    with _Budget("4 commutator subgroups: perfect for p >= 5, proper at p = 3", 60):
        for p in (5, 7, 11):
            assert commutator_subgroup_order(p, 1) == sl2_order(p, 1)
        assert commutator_subgroup_order(3, 1) < sl2_order(3, 1)


def test_criterion_05_conjugation_stable_subspaces():
    with _Budget("5 conjugation-stable subspaces of 2x2 matrices mod 5", 30):
        subs = conjugation_stable_subspaces(5)
        assert [s.dimension for s in subs] == [0, 1, 3, 4]
        assert subs[1].basis == ((1, 0, 0, 1),)  # the scalar line, not the diagonal plane
        assert all((m[0] + m[3]) % 5 == 0 for m in subs[2].basis)  # trace zero
        assert all(is_conjugation_stable(s) for s in subs)


def test_criterion_06_local_unit_groups_by_exhaustion():
    with _Budget("6 local unit-group structure mod 27, zero tolerance", 30):
        p, d = 3, 2
        # rational classes mod cubes against the brute-force coset table
        cubes = {pow(y, 3, 27) for y in range(1, 27) if y % 3}
        values = [PadicNumber(p, v, u, 3) for v in (0, 1) for u in range(1, 27) if u % 3]
        for x in values:
            for y in values:
                same = split_kummer_class(x, 1) == split_kummer_class(y, 1)
                ratio = x / y
                assert same == (ratio.valuation % 3 == 0 and ratio.unit % 27 in cubes)

        # norm-one units mod 27 against their cube cosets
        q = TateParameter(PadicNumber(p, 1, 1, 6))
        basis = nonsplit_basis(q, d, 1)
        units = [
            (a, b)
            for a in range(27)
            for b in range(27)
            if (a % 3 or b % 3) and (a * a - d * b * b) % 27 == 1
        ]
        assert len(units) == 36
        cube_set = set()
        for a, b in units:
            c = QuadExtElement(p, d, 0, a, b, 3) ** 3
            cube_set.add((c.a, c.b))
        beta = {
            (a, b): nonsplit_class(QuadExtElement(p, d, 0, a, b, 3), basis).beta for a, b in units
        }
        for xa, xb in units:
            for ya, yb in units:
                ratio = QuadExtElement(p, d, 0, xa, xb, 3) / QuadExtElement(p, d, 0, ya, yb, 3)
                assert ((ratio.a, ratio.b) in cube_set) == (beta[(xa, xb)] == beta[(ya, yb)])

        # H mod cubes is (Z/3)^2 with basis (q, u)
        qf = QuadExtElement.from_padic(q.q, d)
        seen = set()
        for exp in range(3):
            for a, b in units:
                cls = nonsplit_class(qf**exp * QuadExtElement(p, d, 0, a, b, 3), basis)
                assert cls.alpha == exp
                seen.add((cls.alpha, cls.beta))
        assert seen == {(i, j) for i in range(3) for j in range(3)}


def test_criterion_07_tate_parameter_round_trip():
    with _Budget("7 Tate parameter round trips to 8 digits", 30):
        for p in (5, 11):
            rng = random.Random(p)
            for _ in range(20):
                e = rng.choice([1, 2, 3])
                j = PadicNumber(p, -e, 1 + p * rng.randrange(p**6), 8)
                q = tate_parameter_from_j(j)
                assert q.valuation == e
                assert evaluate_j_from_parameter(q.q).agrees(j, digits=8)
        # the conductor-5077 curve: ord(q) = 1 = ord(disc)
        j = PadicNumber.from_rational(CURVE_5077.j_invariant, 5077, 5)
        q = tate_parameter_from_j(j)
        assert q.valuation == 1 == ordp(CURVE_5077.discriminant, 5077)


def test_criterion_08_covering_map_homomorphism_and_inversion():
    with _Budget("8 covering map: homomorphism and inversion, 100 units", 30):
        q = tate_parameter_from_j(PadicNumber(5, -1, 2, 8))
        a4, a6 = tate_curve_coefficients(q)
        rng = random.Random(41)
        units = []
        while len(units) < 100:
            v = rng.randrange(1, 5**8)
            if v % 5 in (0, 1):
                continue
            units.append(PadicNumber(5, 0, v, 8))
        for u in units:
            back = tate_map_inverse(tate_map(u, q), q)
            assert back.u.agrees(u, digits=min(back.u.precision, u.precision))
        for u1, u2 in zip(units[:50], units[50:]):
            if (u1.unit * u2.unit - 1) % 25 == 0 or (u1.unit - u2.unit) % 5 == 0:
                continue
            product = tate_map(u1 * u2, q)
            total = tate_curve_add(tate_map(u1, q), tate_map(u2, q), a4, a6)
            assert product[0].agrees(total[0], digits=min(product[0].precision, total[0].precision))
            assert product[1].agrees(total[1], digits=min(product[1].precision, total[1].precision))


def test_criterion_09_heights_and_regulator():
    with _Budget("9 height quadraticity and positive regulator interval", 60):
        for P in GENS_5077:
            h = canonical_height(CURVE_5077, P, 6)
            h2 = canonical_height(CURVE_5077, double_point(CURVE_5077, P), 6)
            assert abs(h2.value - 4 * h.value) <= h2.error + 4 * h.error
        data = regulator(CURVE_5077, GENS_5077)
        lo, hi = data.regulator_interval()
        assert lo > 0


def test_criterion_10_negative_controls(capsys, tmp_path):
    with _Budget("10 negative controls with exit code 1 and named checks", 60):
        code = main(["bound", "--label", "11a1", "--n", "1"])
        captured = capsys.readouterr()
        assert code == 1
        assert "torsion_trivial" in captured.err

        path = tmp_path / "controls.curves"
        path.write_text("x432 0 0 0 0 1 0\n")
        code = main(["bound", "--curves", str(path), "--label", "x432", "--n", "1"])
        captured = capsys.readouterr()
        assert code == 1
        assert "discriminant_prime_power" in captured.err

        code = main(["bound", "--label", "389a1", "--n", "1"])
        captured = capsys.readouterr()
        assert code == 1
        assert "exponent=0" in captured.out or "0" in captured.out
        assert "nontrivial_exponent" in captured.err
