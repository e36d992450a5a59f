import random
from fractions import Fraction

import pytest
from sympy import legendre_symbol

from ecbound.elliptic import (
    RationalPoint,
    add_points,
    canonical_height,
    check_prime_conductor,
    compute_invariants,
    count_points_mod,
    double_point,
    is_on_curve,
    negate_point,
    reduction_type,
    regulator,
    scalar_multiply,
    torsion_is_trivial,
)

CURVE_5077 = compute_invariants(0, 0, 1, -7, 6)
CURVE_37 = compute_invariants(0, 0, 1, -1, 0)
CURVE_389 = compute_invariants(0, 1, 1, -2, 0)
CURVE_11 = compute_invariants(0, -1, 1, -10, -20)
CURVE_D432 = compute_invariants(0, 0, 0, 0, 1)

GENS_5077 = (
    RationalPoint.affine(0, 2),
    RationalPoint.affine(1, 0),
    RationalPoint.affine(2, 0),
)


class TestInvariants:
    def test_rank_three_conductor(self):
        c = CURVE_5077
        assert c.discriminant == 5077
        assert c.c4 == 336
        assert abs(c.j_invariant) == Fraction(2**12 * 3**3 * 7**3, 5077)
        # the standard formulas give the positive sign here
        assert c.j_invariant > 0

    def test_small_conductors(self):
        assert CURVE_37.discriminant == 37
        assert CURVE_389.discriminant == 389
        assert CURVE_11.discriminant == -(11**5)
        assert CURVE_D432.discriminant == -432

    def test_consistency_identities(self):
        for c in (CURVE_5077, CURVE_37, CURVE_389, CURVE_11, CURVE_D432):
            assert 4 * c.b8 == c.b2 * c.b6 - c.b4**2
            assert 1728 * c.discriminant == c.c4**3 - c.c6**2

    def test_singular_rejected(self):
        with pytest.raises(ValueError, match="singular"):
            compute_invariants(0, 0, 0, 0, 0)


class TestPoints:
    def test_known_generators_on_curve(self):
        for P in GENS_5077:
            assert is_on_curve(CURVE_5077, P)

    def test_off_curve(self):
        assert not is_on_curve(CURVE_5077, RationalPoint.affine(0, 0))

    def test_identity_laws(self):
        inf = RationalPoint.infinity()
        P = GENS_5077[0]
        assert add_points(CURVE_5077, P, inf) == P
        assert add_points(CURVE_5077, inf, P) == P
        assert add_points(CURVE_5077, P, negate_point(CURVE_5077, P)).is_infinity

    def test_double_against_tangent_oracle(self):
        # single tangent-line computation done by hand for y^2 + y = x^3 - 7x + 6:
        # at (0,2) the slope is (3*0 - 7)/(2*2 + 1) = -7/5, the intercept 2,
        # so x3 = (-7/5)^2 = 49/25 and y3 = (7/5)(49/25) - 2 - 1 = -32/125
        D = double_point(CURVE_5077, GENS_5077[0])
        assert (D.x, D.y) == (Fraction(49, 25), Fraction(-32, 125))
        assert is_on_curve(CURVE_5077, D)

    def test_group_axioms_on_pseudorandom_combinations(self):
        rng = random.Random(97)
        pool = [
            scalar_multiply(CURVE_5077, rng.randrange(-2, 3), GENS_5077[rng.randrange(3)])
            for _ in range(12)
        ]
        for _ in range(200):
            P, Q, R = (pool[rng.randrange(len(pool))] for _ in range(3))
            assert add_points(CURVE_5077, P, Q) == add_points(CURVE_5077, Q, P)
            lhs = add_points(CURVE_5077, add_points(CURVE_5077, P, Q), R)
            rhs = add_points(CURVE_5077, P, add_points(CURVE_5077, Q, R))
            assert lhs == rhs

    def test_scalar_multiples_stay_on_curve(self):
        for k in range(-4, 5):
            assert is_on_curve(CURVE_5077, scalar_multiply(CURVE_5077, k, GENS_5077[1]))

    def test_rejects_off_curve_input(self):
        with pytest.raises(ValueError, match="not on the curve"):
            add_points(CURVE_5077, RationalPoint.affine(0, 0), GENS_5077[0])


class TestReduction:
    def test_nonsplit_at_5077(self):
        info = reduction_type(CURVE_5077, 5077)
        assert info.kind == "multiplicative-nonsplit"
        assert info.discriminant_valuation == 1

    def test_good_away_from_conductor(self):
        assert reduction_type(CURVE_5077, 11).kind == "good"

    def test_37_by_euler_criterion_oracle(self):
        info = reduction_type(CURVE_37, 37)
        chi = pow(-CURVE_37.c6 % 37, 18, 37)
        expected = "multiplicative-split" if chi == 1 else "multiplicative-nonsplit"
        assert info.kind == expected == "multiplicative-nonsplit"

    def test_389_split(self):
        assert reduction_type(CURVE_389, 389).kind == "multiplicative-split"
        assert legendre_symbol(-CURVE_389.c6 % 389, 389) == 1

    def test_additive_at_5(self):
        # y^2 = x^3 + 5x: disc = -8000, c4 = -240, both divisible by 5
        curve = compute_invariants(0, 0, 0, 5, 0)
        assert reduction_type(curve, 5).kind == "additive"

    def test_bad_reduction_at_three_rejected(self):
        with pytest.raises(ValueError, match="not supported"):
            reduction_type(CURVE_D432, 3)

    def test_partition_among_kinds(self):
        from sympy import primerange

        for curve in (CURVE_5077, CURVE_37, CURVE_389, CURVE_11):
            for ell in primerange(5, 100):
                info = reduction_type(curve, ell)
                assert (info.kind == "good") == (curve.discriminant % ell != 0)

    def test_bad_reduction_at_two_rejected(self):
        with pytest.raises(ValueError, match="not supported"):
            reduction_type(CURVE_D432, 2)


class TestPrimeConductor:
    def test_rank_three_curve_passes(self):
        rep = check_prime_conductor(CURVE_5077)
        assert rep.passed
        assert (rep.prime, rep.exponent) == (5077, 1)
        assert rep.reduction_kind == "multiplicative-nonsplit"

    def test_37_passes(self):
        rep = check_prime_conductor(CURVE_37)
        assert rep.passed and rep.prime == 37

    def test_non_prime_power_fails(self):
        rep = check_prime_conductor(CURVE_D432)
        assert not rep.passed
        assert "discriminant_prime_power" in rep.failed_names()

    def test_small_prime_fails_size(self):
        # y^2 + y = x^3 has discriminant -27
        rep = check_prime_conductor(compute_invariants(0, 0, 1, 0, 0))
        assert not rep.passed
        assert "p_at_least_11" in rep.failed_names()


class TestTorsion:
    def test_counts_match_hand_enumeration(self):
        assert count_points_mod(CURVE_5077, 3) == 7
        assert count_points_mod(CURVE_5077, 5) == 10
        assert count_points_mod(CURVE_5077, 7) == 12

    def test_hasse_bound(self):
        from sympy import primerange

        for curve in (CURVE_5077, CURVE_37, CURVE_389):
            for ell in primerange(3, 60):
                if curve.discriminant % ell == 0:
                    continue
                count = count_points_mod(curve, ell)
                assert abs(count - ell - 1) <= 2 * ell**0.5

    def test_trivial_for_rank_three_curve(self):
        assert torsion_is_trivial(CURVE_5077, [3, 5, 7])

    def test_five_torsion_detected(self):
        assert not torsion_is_trivial(CURVE_11, [3, 7, 13])

    def test_too_few_primes(self):
        with pytest.raises(ValueError, match="at least 3"):
            torsion_is_trivial(CURVE_5077, [3, 5])

    def test_bad_prime_rejected(self):
        with pytest.raises(ValueError, match="divides the discriminant"):
            torsion_is_trivial(CURVE_37, [3, 5, 37])


class TestHeights:
    def test_infinity_has_height_zero(self):
        h = canonical_height(CURVE_5077, RationalPoint.infinity())
        assert h.value == 0 and not h.is_torsion

    def test_quadraticity_within_certified_bounds(self):
        for P in GENS_5077:
            hP = canonical_height(CURVE_5077, P, 6)
            h2P = canonical_height(CURVE_5077, double_point(CURVE_5077, P), 6)
            assert abs(h2P.value - 4 * hP.value) <= h2P.error + 4 * hP.error

    def test_triple_multiple_quadraticity(self):
        P = GENS_5077[0]
        h = canonical_height(CURVE_5077, P, 7)
        h3 = canonical_height(CURVE_5077, scalar_multiply(CURVE_5077, 3, P), 7)
        assert abs(h3.value - 9 * h.value) <= h3.error + 9 * h.error

    def test_convergence_between_levels(self):
        P = GENS_5077[0]
        h6 = canonical_height(CURVE_5077, P, 6)
        h7 = canonical_height(CURVE_5077, P, 7)
        assert abs(h6.value - h7.value) < 1e-3
        assert h7.error < h6.error

    def test_torsion_flagged(self):
        h = canonical_height(CURVE_11, RationalPoint.affine(5, 5), 6)
        assert h.is_torsion and h.value == 0

    def test_positive_for_generator(self):
        h = canonical_height(CURVE_5077, GENS_5077[0], 6)
        assert h.value - h.error > 0


class TestRegulator:
    def test_single_point_is_its_height(self):
        data = regulator(CURVE_5077, [GENS_5077[0]])
        h = canonical_height(CURVE_5077, GENS_5077[0], 7)
        assert data.regulator_value == pytest.approx(h.value, abs=1e-9)

    def test_dependent_points_rejected(self):
        P = GENS_5077[0]
        with pytest.raises(ValueError, match="independence unverified"):
            regulator(CURVE_5077, [P, double_point(CURVE_5077, P)])

    def test_rank_three_generators_independent(self):
        data = regulator(CURVE_5077, GENS_5077)
        lo, hi = data.regulator_interval()
        assert lo > 0
        # interval brackets the catalogued regulator of this curve
        assert lo < 0.417143558758384 < hi

    def test_pairing_matrix_symmetric(self):
        data = regulator(CURVE_5077, GENS_5077)
        for i in range(3):
            assert data.pairing[i][i] >= 0
            for j in range(3):
                assert data.pairing[i][j] == data.pairing[j][i]

    def test_rank_two_curve_generators(self):
        data = regulator(CURVE_389, [RationalPoint.affine(0, 0), RationalPoint.affine(1, 0)])
        assert data.regulator_value - data.regulator_error > 0
