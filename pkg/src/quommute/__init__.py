"""Exact verification of quommutator deformations of spl(N,1) and osp(2,2)."""

from .algebra import (
    E,
    V,
    Vb,
    Expression,
    Generator,
    Relation,
    StructureTable,
    TableError,
    bosonic_truncation,
    build_classical,
    build_osp22_q,
    build_spl21,
    build_spl_n1,
    classical_limit,
    effective_parameter_rank,
    in_q,
)
from .normal_order import ConsistencyReport, NonTerminationError, check_overlaps, normalize, quommutator
from .parser import parse, parse_expression, render
from .qes import QesOperator, certify_qes, enveloping_monomials, random_qes_operator
from .representation import (
    build_osp12_rep,
    build_osp22_rep,
    casimir_value,
    evaluate_in_rep,
    invariance_check,
    jackson_matrix,
    verify_relations,
)
from .scalar import PoleError, Scalar, q_number, substitute
from .table_io import load_custom_table, serialize

__version__ = "0.1.0"
