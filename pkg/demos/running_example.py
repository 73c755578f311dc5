"""
Improvising three-bit words
===========================

The improvisation language is every length-3 binary word without two
adjacent 1s. A word is admissible when it is within Hamming distance 1
of ``001``. We ask for at least 3/4 admissible mass and no word drawn with
probability above 1/4.
"""

import random
from collections import Counter
from fractions import Fraction

from ctrlimprov.automata import Alphabet, Dfa, product
from ctrlimprov.counting import count_words, enumerate_words
from ctrlimprov.improvise import CIInstance, feasibility, synthesize_dfa, verify_improviser
from ctrlimprov.predicates import hamming_dfa

binary = Alphabet(["0", "1"])
improv = Dfa(binary, 6, 0, {5}, {
    (0, "0"): 1, (0, "1"): 2,
    (1, "0"): 3, (1, "1"): 4,
    (2, "0"): 3,
    (3, "0"): 5, (3, "1"): 5,
    (4, "0"): 5,
})
admiss = hamming_dfa("001", 1, binary)

# the five improvisations and the three admissible ones
print("I =", ["".join(x) for x in enumerate_words(improv, 3)])
print("A =", ["".join(x) for x in enumerate_words(product(improv, admiss), 3)])

# with eps = 0 every word must be admissible, and three words cannot share mass 1 under rho = 1/4
size_i, size_a = count_words(improv), count_words(product(improv, admiss))
print(feasibility(size_i, size_a, 0, Fraction(1, 4)).line())
print(feasibility(size_i, size_a, Fraction(1, 4), Fraction(1, 4)).line())

inst = CIInstance(improv, admiss, Fraction(1, 4), Fraction(1, 4))
imp = synthesize_dfa(inst)
print(imp.certificate_line())
for word, p in sorted(imp.exact_distribution().items()):
    print("".join(word), p)

rng = random.Random(0)
freq = Counter("".join(imp.draw(rng)) for _ in range(20000))
print(sorted(freq.items()))

report = verify_improviser(imp, inst, 20000, rng)
print("verified:", report.ok, "admissible fraction", round(report.empirical_admissible, 3))
