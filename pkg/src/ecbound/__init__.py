"""Certified class-number divisibility bounds for elliptic curves of
prime conductor, with the supporting p-adic, matrix-group, Tate-curve and
local Kummer computations verified by enumeration."""

from .elliptic import (
    RationalPoint,
    WeierstrassCurve,
    add_points,
    canonical_height,
    check_prime_conductor,
    compute_invariants,
    is_on_curve,
    reduction_type,
    regulator,
    scalar_multiply,
    torsion_is_trivial,
)
from .engine import (
    BoundReport,
    CurveRecord,
    builtin_records,
    compute_bound,
    parse_curve_file,
    render_report,
    run_lemma_suite,
    verify_hypotheses,
)
from .errors import BudgetError, HypothesisFailure, ParseError, PrecisionError
from .kummer import (
    BasisTag,
    KummerClass,
    LocalDegreeResult,
    local_degree_nonsplit,
    local_degree_split,
    local_kummer_degree,
    nonsplit_basis,
    nonsplit_class,
    nonsplit_membership,
    point_to_local_class,
    rebase_to_q,
    split_kummer_class,
)
from .matrices import (
    Mat2ModPn,
    SubspaceModP,
    commutator_subgroup_order,
    conjugation_stable_subspaces,
    in_filtration,
    matrix_pn_root,
    verify_filtration_power_identity,
)
from .padics import (
    PadicNumber,
    QuadExtElement,
    UnitDecomposition,
    ordp,
    ordp_factorial,
    padic_log,
    quad_norm,
    teichmuller,
    unit_decompose,
)
from .tate import (
    TateParameter,
    TatePoint,
    tate_curve_coefficients,
    tate_map,
    tate_map_inverse,
    tate_parameter_from_j,
)

__version__ = "0.1.0"
