import random

import pytest

from ecbound.elliptic import RationalPoint, compute_invariants
from ecbound.errors import PrecisionError
from ecbound.kummer import (
    BasisTag,
    KummerClass,
    LocalKummerContext,
    curve_to_tate_model,
    local_degree_nonsplit,
    local_degree_split,
    local_kummer_degree,
    nonsplit_basis,
    nonsplit_class,
    nonsplit_membership,
    point_to_local_class,
    rebase_to_q,
    solve_unit_norm,
    split_kummer_class,
    transport_point,
)
from ecbound.padics import PadicNumber, QuadExtElement, quad_norm, unit_decompose
from ecbound.tate import TateParameter, tate_map, tate_map_inverse

CURVE_5077 = compute_invariants(0, 0, 1, -7, 6)
CURVE_389 = compute_invariants(0, 1, 1, -2, 0)
GENS_5077 = [RationalPoint.affine(0, 2), RationalPoint.affine(1, 0), RationalPoint.affine(2, 0)]
GENS_389 = [RationalPoint.affine(0, 0), RationalPoint.affine(1, 0)]


def norm_one_units(p, d, digits):
    """All residue pairs (a, b) mod p^digits with a^2 - d b^2 = 1."""
    mod = p**digits
    return [
        (a, b)
        for a in range(mod)
        for b in range(mod)
        if (a % p or b % p) and (a * a - d * b * b) % mod == 1
    ]


class TestSplitClasses:
    def test_basis_elements(self):
        p, n = 5, 2
        assert split_kummer_class(PadicNumber(p, 1, 1, 6), n) == KummerClass(p, n, 1, 0, BasisTag.SPLIT_PQ)
        cube = PadicNumber(p, 0, pow(1 + p, 3, p**6), 6)
        assert split_kummer_class(cube, n) == KummerClass(p, n, 0, 3, BasisTag.SPLIT_PQ)

    def test_two_against_exhaustive_power_oracle(self):
        # beta is pinned by 2 = (1+5)^beta * (25th power) mod 5^4
        p, n = 5, 2
        mod = p ** (n + 2)
        powers = {pow(y, 25, mod) for y in range(1, mod) if y % p}
        oracle = [
            b for b in range(p**n) if any(pow(1 + p, b, mod) * s % mod == 2 for s in powers)
        ]
        cls = split_kummer_class(PadicNumber.from_rational(2, p, 6), n)
        assert oracle == [cls.beta]
        assert cls.alpha == 0

    @pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (5, 2)])
    def test_homomorphism(self, p, n):
        rng = random.Random(100 * p + n)
        digits = n + 3
        for _ in range(75):
            x = PadicNumber(p, rng.randrange(-2, 3), _unit(rng, p, digits), digits)
            y = PadicNumber(p, rng.randrange(-2, 3), _unit(rng, p, digits), digits)
            lhs = split_kummer_class(x * y, n)
            rhs = split_kummer_class(x, n) + split_kummer_class(y, n)
            assert lhs == rhs

    def test_exhaustive_coset_agreement_mod_27(self):
        # cubes of Z_3^* computed by enumeration; classes must refine exactly
        p, n = 3, 1
        mod = 27
        cubes = {pow(y, 3, mod) for y in range(1, mod) if y % p}
        values = [PadicNumber(p, v, u, 3) for v in (0, 1) for u in range(1, mod) if u % p]
        for x in values:
            for y in values:
                same_class = split_kummer_class(x, n) == split_kummer_class(y, n)
                # brute force: x/y is a cube iff valuation = 0 mod 3 and unit a cube mod 27
                ratio = x / y
                brute = ratio.valuation % 3 == 0 and ratio.unit % mod in cubes
                assert same_class == brute

    def test_precision_requirement(self):
        with pytest.raises(PrecisionError):
            split_kummer_class(PadicNumber(5, 0, 2, 2), 2)


def _unit(rng, p, digits):
    while True:
        u = rng.randrange(1, p**digits)
        if u % p:
            return u


def _norm_one(rng, p, d, digits):
    """A random element of exact norm 1, as s / conj(s)."""
    while True:
        a, b = rng.randrange(p**digits), rng.randrange(p**digits)
        if a % p or b % p:
            s = QuadExtElement(p, d, 0, a, b, digits)
            return s / s.conjugate()


class TestRebase:
    def test_q_becomes_first_basis_vector(self):
        q = TateParameter(PadicNumber(5, 1, 7, 6))
        [cls] = rebase_to_q([split_kummer_class(q.q, 2)], q, 2)
        assert (cls.alpha, cls.beta, cls.basis) == (1, 0, BasisTag.SPLIT_Q)

    def test_class_of_p_picks_up_unit_correction(self):
        # q = p*w: the class of p becomes (1, -beta_w)
        p, n = 5, 2
        w_unit = 7
        q = TateParameter(PadicNumber(p, 1, w_unit, 6))
        beta_w = unit_decompose(PadicNumber(p, 0, w_unit, 6)).one_unit_exponent % p**n
        [cls] = rebase_to_q([split_kummer_class(PadicNumber(p, 1, 1, 6), n)], q, n)
        assert (cls.alpha, cls.beta) == (1, (-beta_w) % p**n)

    def test_rejects_p_dividing_valuation(self):
        p = 3
        q = PadicNumber(p, p, 1, 6)  # ord = 3 = p
        with pytest.raises(ValueError, match="does not generate"):
            rebase_to_q([split_kummer_class(PadicNumber(p, 0, 2, 6), 1)], q, 1)

    def test_homomorphism_preserved(self):
        p, n = 5, 2
        q = TateParameter(PadicNumber(p, 1, 11, 6))
        rng = random.Random(7)
        for _ in range(50):
            x = PadicNumber(p, rng.randrange(0, 3), _unit(rng, p, 6), 6)
            y = PadicNumber(p, rng.randrange(0, 3), _unit(rng, p, 6), 6)
            cx, cy, cxy = rebase_to_q(
                [split_kummer_class(x, n), split_kummer_class(y, n), split_kummer_class(x * y, n)],
                q,
                n,
            )
            assert cx + cy == cxy


class TestLocalDegrees:
    def test_trivial_classes(self):
        cls = KummerClass(5, 2, 0, 0, BasisTag.SPLIT_Q)
        assert local_degree_split([cls], 2).degree == 1

    def test_full_generator(self):
        cls = KummerClass(5, 2, 0, 1, BasisTag.SPLIT_Q)
        assert local_degree_split([cls], 2).degree == 25

    def test_intermediate_degree_against_subgroup_oracle(self):
        p, n = 5, 3
        classes = [
            KummerClass(p, n, 0, 5, BasisTag.SPLIT_Q),
            KummerClass(p, n, 0, 25, BasisTag.SPLIT_Q),
        ]
        # brute-force subgroup of Z/125 generated by {5, 25}
        subgroup = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for g in (5, 25):
                y = (x + g) % 125
                if y not in subgroup:
                    subgroup.add(y)
                    frontier.append(y)
        result = local_degree_split(classes, n)
        assert result.degree == len(subgroup) == 25
        assert result.cyclic

    def test_mixed_nonsplit_degrees_against_oracle(self):
        p, n = 3, 2
        rng = random.Random(17)
        for _ in range(25):
            betas = [rng.randrange(9) for _ in range(3)]
            classes = [KummerClass(p, n, rng.randrange(9), b, BasisTag.NONSPLIT) for b in betas]
            subgroup = {0}
            frontier = [0]
            while frontier:
                x = frontier.pop()
                for g in betas:
                    y = (x + g) % 9
                    if y not in subgroup:
                        subgroup.add(y)
                        frontier.append(y)
            assert local_degree_nonsplit(classes, n).degree == len(subgroup)

    def test_nonsplit_q_line_only_gives_degree_one(self):
        cls = KummerClass(3, 2, 5, 0, BasisTag.NONSPLIT)
        assert local_degree_nonsplit([cls], 2).degree == 1

    def test_nonsplit_full_generator(self):
        cls = KummerClass(3, 2, 0, 1, BasisTag.NONSPLIT)
        assert local_degree_nonsplit([cls], 2).degree == 9

    def test_basis_mismatch_rejected(self):
        a = KummerClass(5, 2, 0, 1, BasisTag.SPLIT_Q)
        b = KummerClass(5, 2, 0, 1, BasisTag.NONSPLIT)
        with pytest.raises(ValueError, match="basis mismatch"):
            local_degree_split([a, b], 2)

    def test_degree_always_divides_pn(self):
        rng = random.Random(23)
        for _ in range(50):
            p, n = rng.choice([(3, 1), (3, 2), (5, 1), (5, 2)])
            classes = [
                KummerClass(p, n, rng.randrange(p**n), rng.randrange(p**n), BasisTag.NONSPLIT)
                for _ in range(rng.randrange(1, 4))
            ]
            result = local_degree_nonsplit(classes, n)
            assert p**n % result.degree == 0
            assert result.cyclic


class TestNormKernel:
    def test_membership_of_q(self):
        q = TateParameter(PadicNumber(3, 1, 1, 6))
        assert nonsplit_membership(QuadExtElement.from_padic(q.q, 2), q)

    def test_membership_of_norm_one_unit(self):
        q = TateParameter(PadicNumber(3, 1, 1, 6))
        basis = nonsplit_basis(q, 2, 1)
        assert nonsplit_membership(basis.u, q)

    def test_sqrt_d_not_member(self):
        q = TateParameter(PadicNumber(5, 1, 1, 6))
        assert not nonsplit_membership(QuadExtElement.sqrt_d(5, 2, 6), q)

    def test_basis_norm_exactly_one(self):
        q = TateParameter(PadicNumber(3, 1, 1, 6))
        basis = nonsplit_basis(q, 2, 1)
        assert quad_norm(basis.u).agrees(PadicNumber.one(3, 6))

    def test_generator_not_a_cube_mod_9_by_enumeration(self):
        q = TateParameter(PadicNumber(3, 1, 1, 6))
        u = nonsplit_basis(q, 2, 1).u
        cubes = set()
        for a, b in norm_one_units(3, 2, 2):
            x = QuadExtElement(3, 2, 0, a, b, 2)
            c = x**3
            cubes.add((c.a, c.b))
        assert (u.a % 9, u.b % 9) not in cubes

    def test_index_parity_bookkeeping(self):
        odd = TateParameter(PadicNumber(3, 1, 1, 6))
        even = TateParameter(PadicNumber(3, 2, 1, 6))
        assert nonsplit_basis(odd, 2, 1).index_h_h0 == 1
        assert nonsplit_basis(even, 2, 1).index_h_h0 == 2

    def test_basis_class_coordinates(self):
        q = TateParameter(PadicNumber(3, 1, 1, 6))
        basis = nonsplit_basis(q, 2, 1)
        cq = nonsplit_class(QuadExtElement.from_padic(q.q, 2), basis)
        assert (cq.alpha, cq.beta) == (1, 0)
        cu2 = nonsplit_class(basis.u * basis.u, basis)
        assert (cu2.alpha, cu2.beta) == (0, 2 % 3)

    def test_nonmember_rejected(self):
        q = TateParameter(PadicNumber(3, 1, 1, 6))
        basis = nonsplit_basis(q, 2, 1)
        with pytest.raises(ValueError, match="norm-kernel"):
            nonsplit_class(QuadExtElement.sqrt_d(3, 2, 6), basis)

    def test_exhaustive_norm_one_coset_table_mod_27(self):
        # brute-force cube cosets of the 36 norm-one residues mod 27 must
        # agree with the beta coordinate from the logarithm route
        p, d, digits = 3, 2, 3
        q = TateParameter(PadicNumber(p, 1, 1, 6))
        basis = nonsplit_basis(q, d, 1)
        units = norm_one_units(p, d, digits)
        assert len(units) == 36
        elements = [QuadExtElement(p, d, 0, a, b, digits) for a, b in units]
        cube_set = set()
        for x in elements:
            c = x**3
            cube_set.add((c.a, c.b))
        betas = {}
        for x in elements:
            betas[(x.a, x.b)] = nonsplit_class(x, basis).beta
        for x in elements:
            for y in elements:
                ratio = x / y
                brute_same = (ratio.a, ratio.b) in cube_set
                assert brute_same == (betas[(x.a, x.b)] == betas[(y.a, y.b)])
        assert set(betas.values()) == {0, 1, 2}

    def test_h_mod_cubes_is_rank_two_with_basis_q_u(self):
        # enumerate q^a * w over the 36 norm-one residues mod 27: classes
        # must be exactly (a mod 3, beta) and fill out (Z/3)^2
        p, d, digits = 3, 2, 3
        q = TateParameter(PadicNumber(p, 1, 1, 6))
        basis = nonsplit_basis(q, d, 1)
        qf = QuadExtElement.from_padic(q.q, d)
        seen = set()
        for a in range(3):
            for aa, bb in norm_one_units(p, d, digits):
                x = qf**a * QuadExtElement(p, d, 0, aa, bb, digits)
                cls = nonsplit_class(x, basis)
                assert cls.alpha == a
                seen.add((cls.alpha, cls.beta))
        assert seen == {(a, b) for a in range(3) for b in range(3)}

    def test_pn_powers_die(self):
        p, d, n = 3, 2, 2
        q = TateParameter(PadicNumber(p, 1, 1, 8))
        basis = nonsplit_basis(q, d, n)
        rng = random.Random(29)
        for _ in range(20):
            x = QuadExtElement.from_padic(q.q, d) ** rng.randrange(3) * _norm_one(rng, p, d, 8)
            cls = nonsplit_class(x ** p**n, basis)
            assert cls.is_trivial

    def test_class_map_homomorphism(self):
        p, d, n = 3, 2, 1
        q = TateParameter(PadicNumber(p, 1, 1, 7))
        basis = nonsplit_basis(q, d, n)
        qf = QuadExtElement.from_padic(q.q, d)
        rng = random.Random(31)
        for _ in range(40):
            x = qf ** rng.randrange(3) * _norm_one(rng, p, d, 7)
            y = qf ** rng.randrange(3) * _norm_one(rng, p, d, 7)
            assert nonsplit_class(x * y, basis) == nonsplit_class(x, basis) + nonsplit_class(y, basis)


class TestNormOneQuotients:
    @pytest.mark.parametrize("p,d,count", [(3, 2, 36), (5, 2, 150)])
    def test_norm_one_mod_p3_quotient_cyclic_of_order_p(self, p, d, count):
        # the pit-th power classes of norm-one units form an index-p subgroup
        units = norm_one_units(p, d, 3)
        assert len(units) == count
        mod = p**3
        powers = set()
        for a, b in units:
            x = QuadExtElement(p, d, 0, a, b, 3)
            c = x**p
            powers.add((c.a, c.b))
        assert len(powers) == count // p

    def test_norm_surjective_on_units(self):
        p, d = 5, 2
        rng = random.Random(37)
        for _ in range(50):
            target = PadicNumber(p, 0, _unit(rng, p, 6), 6)
            x = solve_unit_norm(target, d)
            assert quad_norm(x).agrees(target)


class TestPointClasses:
    def test_infinity_is_trivial(self):
        cls = point_to_local_class(CURVE_389, RationalPoint.infinity(), 389, 1)
        assert cls.is_trivial

    def test_split_route_end_to_end(self):
        ctx = LocalKummerContext(CURVE_389, 389, 1)
        assert ctx.split
        classes = [ctx.class_of_point(P) for P in GENS_389]
        assert any(not c.is_trivial for c in classes)
        result = ctx.degree_of_points(GENS_389)
        assert result.degree == 389  # nonzero beta forces the full cyclic quotient
        # forward oracle: the recovered unit reproduces the transported point
        image = transport_point(ctx.transport, GENS_389[0])
        unit = tate_map_inverse(image, ctx.q).u
        forward = tate_map(unit, ctx.q)
        assert forward[0].agrees(image[0]) and forward[1].agrees(image[1])

    def test_nonsplit_route_end_to_end(self):
        ctx = LocalKummerContext(CURVE_5077, 5077, 1)
        assert not ctx.split
        classes = [ctx.class_of_point(P) for P in GENS_5077]
        assert all(not c.is_trivial for c in classes)
        result = ctx.degree_of_points(GENS_5077)
        assert result.degree == 5077
        assert result.cyclic

    def test_nonsplit_forward_oracle(self):
        ctx = LocalKummerContext(CURVE_5077, 5077, 1)
        image = transport_point(ctx.transport, GENS_5077[0])
        unit = tate_map_inverse(image, ctx.q).u
        forward = tate_map(unit, ctx.q)
        assert forward[0].agrees(image[0]) and forward[1].agrees(image[1])
        assert nonsplit_membership(unit, ctx.q)

    def test_degree_divides_pn_at_level_two(self):
        result = local_kummer_degree(CURVE_5077, 5077, GENS_5077, 2)
        assert 5077**2 % result.degree == 0
        assert result.degree == 5077**2

    def test_point_class_kills_pn_multiples(self):
        # the class of a point times p^n is p^n times the class: trivial
        ctx = LocalKummerContext(CURVE_389, 389, 1)
        cls = ctx.class_of_point(GENS_389[0])
        assert cls.scale(389).is_trivial

    def test_transport_consistency_checks_run(self):
        ctx = LocalKummerContext(CURVE_5077, 5077, 1)
        image = transport_point(ctx.transport, GENS_5077[1])
        assert image is not None
