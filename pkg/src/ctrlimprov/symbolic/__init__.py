"""Symbolic automata over bit vectors and the SAT-based schemes that use them."""

from .automaton import (
    SymbolicAutomaton,
    encode_dfa,
    format_expr,
    load_symbolic,
    parse_expr,
    symbolic_from_json,
    symbolic_product,
    symbolic_to_json,
)
from .sampling import (
    AlmostUniformSampler,
    CountEstimate,
    almost_uniform_sampler,
    approx_count,
    approx_count_unrolled,
    pivot_for,
    repetitions_for,
    symbolic_pump_sampler,
)
from .scheme import headline_bound, synthesize_symbolic
from .unroll import (
    DiameterResult,
    UnrolledFormula,
    diameter,
    enumerate_words_symbolic,
    find_lasso,
    is_deterministic,
    symbolic_accepts,
    symbolic_is_infinite,
    unroll,
    user_diameter,
)
