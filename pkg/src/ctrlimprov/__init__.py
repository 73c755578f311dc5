"""Control improvisation: synthesize random generators whose outputs meet hard
constraints, are admissible with a chosen probability, and never repeat any
single word too often.
"""

from .automata import (
    Alphabet,
    Dfa,
    Nfa,
    complement,
    determinize,
    is_language_infinite,
    product,
    trim,
    universal_dfa,
)
from .counting import (
    INFINITE,
    count_words,
    enumerate_words,
    find_pump_witness,
    path_counts,
    pump_sampler,
    pump_sampler_longer_than,
    uniform_sampler,
)
from .factor_oracle import build_factor_oracle, oracle_as_nfa, window_admissibility_dfa
from .improvise import (
    CIInstance,
    ComputablePredicate,
    Improviser,
    feasibility,
    synthesize,
    synthesize_dfa,
    synthesize_enumerative,
    synthesize_nfa_special,
    verify_improviser,
)

__version__ = "0.1.0"
