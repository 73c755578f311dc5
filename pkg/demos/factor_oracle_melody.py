"""
Melodies near a reference phrase
================================

A factor oracle built from a short reference melody accepts its factors
and some recombinations of them. Bounding how many non-direct jumps a
melody takes inside a sliding window keeps it close to the reference.
"""

import random
from fractions import Fraction

from ctrlimprov.automata import Alphabet, Dfa, determinize, product
from ctrlimprov.counting import count_words
from ctrlimprov.factor_oracle import WindowSpec, build_factor_oracle, oracle_as_nfa, window_admissibility_dfa
from ctrlimprov.improvise import CIInstance, synthesize_dfa

reference = "C D E C E G E D C".split()
notes = Alphabet(sorted(set(reference)))
oracle = build_factor_oracle(reference, notes)
print("external edges:", oracle.external_edges)
print("suffix links:", dict(oracle.suffix_link))

# suffix links taken as silent moves let the melody jump back and recombine
# material; with them every 6-note word over these notes is an improvisation
oracle_dfa = determinize(oracle_as_nfa(oracle, include_eps_links=True))
exactly6 = Dfa(notes, 7, 0, {6}, {(i, s): i + 1 for i in range(6) for s in notes})
improv = product(oracle_dfa, exactly6)
print("6-note improvisations:", count_words(improv))

# admissible melodies follow the forward oracle with at most one
# non-direct step in any 3 consecutive notes
admiss = window_admissibility_dfa(oracle, WindowSpec(3, 0, 1))
print("admissible:", count_words(product(improv, admiss)))

inst = CIInstance(improv, admiss, Fraction(1, 2), Fraction(1, 8))
imp = synthesize_dfa(inst)
print(imp.certificate_line())
rng = random.Random(3)
for _ in range(5):
    print(" ".join(imp.draw(rng)))
