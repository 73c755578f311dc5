"""Propositional formulas, clause form, parity constraints and SAT oracles."""

from .cnf import (
    CnfBuilder,
    CnfFormula,
    add_xor_constraints,
    from_dimacs,
    random_xor,
    to_cnf,
    to_dimacs,
    xor_clauses,
)
from .formula import (
    FALSE,
    TRUE,
    And,
    Const,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Var,
    Xor,
    and_,
    bits_equal,
    conj,
    disj,
    iff,
    implies,
    not_,
    or_,
    var,
    xor,
)
from .solver import (
    CdclSolver,
    ExternalSolver,
    InternalSolver,
    SolveResult,
    SolverOracle,
    Status,
    enumerate_projected_models,
    make_oracle,
    parse_solver_output,
    solve,
)
