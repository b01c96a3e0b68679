"""Exact checks of the determinant identities behind Frobenius splittings of
the coordinate ideals b[S] of the Borel subalgebra of gl_n."""

from .claims import verify_all, verify_base_case, verify_chain, verify_step
from .errors import CapacityError, DomainError, EvaluationError, NotDivisible
from .matrices import (
    PolyMatrix,
    conjugate,
    delta_matrix,
    determinant,
    generic_borel_element,
    generic_unitriangular_lower,
    invert_unitriangular,
    minor_factor,
    symbolic_rank,
)
from .poly import GF, QQ, ZZ, PolyRing, Polynomial, VarId, chart_ring
from .poset import (
    Position,
    PosetIdeal,
    check_b_invariance,
    enumerate_ideals,
    free_positions,
    is_coordinate_lie_ideal,
    is_ideal,
    leq,
    maximal_elements,
    parabolic_to_ideal,
    peel_sequence,
)
from .splitting import (
    CandidateExpr,
    Literal,
    MinorFactor,
    Var,
    build_candidate,
    compatible_with_coordinate,
    is_splitting,
    search_candidates,
    simultaneous_report,
    trace_map,
)

__version__ = "0.1.0"
