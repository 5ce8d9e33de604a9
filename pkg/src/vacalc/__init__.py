"""Exact formal calculus for vertex algebras, their modules and duality."""

from .algebra import VertexAlgebra, check_all, check_axioms, check_jacobi_triple, check_strong_grading, vertex_op, weight_shift_check
from .dsl import evaluate_text, parse_expr, unparse
from .duality import (
    RationalFn,
    Region,
    check_duality,
    check_Pz_from_module,
    check_roundtrip,
    iota_expand,
    partial_sums,
    reconstruct_rational,
)
from .errors import VacalcError
from .examples import build_comm_alg_va, build_poly_minus_d, build_poly_mobius_lb, build_two_dim, prove_no_sl2
from .grading import BasisVector, CompletionElement, Space, Vector, pair, project
from .identities import verify_delta_identity
from .modules import (
    Module,
    check_contragredient,
    check_module,
    check_module_axioms,
    check_opposite_identities,
    contragredient,
    dual_hom,
    opposite_op,
    semisimple_part_check,
    weight_formula_check,
)
from .report import CheckReport
from .scalar import Gauss, scalar
from .series import FormalSeries, Window, binom_expand, delta, delta3, derivative, formal_taylor, multiply, residue
from .tables import dumps, ingest_table

__version__ = "0.1.0"
