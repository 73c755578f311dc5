"""
Counting and sampling with a SAT solver
=======================================

Symbolic automata describe states and symbols as bit-vectors. Words of
bounded length are counted approximately with random XOR constraints and
drawn almost uniformly, without building the explicit automaton.
"""

import random
from fractions import Fraction

from ctrlimprov.sat import InternalSolver, and_, not_, var
from ctrlimprov.symbolic import (
    SymbolicAutomaton,
    approx_count,
    diameter,
    headline_bound,
    parse_expr,
    synthesize_symbolic,
)
from ctrlimprov.symbolic.sampling import almost_uniform_sampler

oracle = InternalSolver()

# one step from state 0 to state 1 reading any 8-bit symbol: 256 words
x0 = var("x0")
block = SymbolicAutomaton(1, 8, not_(x0), x0, and_(not_(x0), var("y0")))
D = diameter(block, oracle)
print("diameter", D.D)
for seed in range(3):
    est = approx_count(block, oracle, 0.5, 0.1, D, random.Random(seed))
    print("estimate", est.value, "exact" if est.exact else "hashed")

# the JSON format writes formulas as prefix expressions
print(parse_expr("(and (not x0) (xor y0 y3))"))

sampler = almost_uniform_sampler(block, oracle, 7, D, random.Random(1))
rng = random.Random(2)
print([" ".join(sampler.draw(rng)) for _ in range(3)])

print("headline bound at tau=7, eps=rho=1/4:", headline_bound(7, Fraction(1, 4), Fraction(1, 4)))
