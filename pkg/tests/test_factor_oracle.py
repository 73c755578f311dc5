import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_words, nfa_accepts

from ctrlimprov.automata import Alphabet
from ctrlimprov.errors import ConfigurationError
from ctrlimprov.factor_oracle import (
    TransitionKind,
    WindowSpec,
    build_factor_oracle,
    classify_transition,
    oracle_as_nfa,
    window_admissibility_dfa,
)

seeds = st.integers(0, 2**32 - 1)


def factors(word):
    return {tuple(word[i:j]) for i in range(len(word) + 1) for j in range(i, len(word) + 1)}


def random_word(rng, n, alphabet="ab"):
    return tuple(rng.choice(alphabet) for _ in range(n))


def test_bbac_oracle_edges():
    f = build_factor_oracle("bbac")
    assert f.direct_edges == [(0, "b", 1), (1, "b", 2), (2, "a", 3), (3, "c", 4)]
    assert f.external_edges == [(0, "a", 3), (0, "c", 4), (1, "a", 3)]
    assert dict(f.suffix_link) == {1: 0, 2: 1, 3: 0, 4: 0}
    assert f.state_count == 5


def test_single_symbol_oracle():
    f = build_factor_oracle("a")
    assert f.state_count == 2
    assert dict(f.forward) == {(0, "a"): 1}
    assert dict(f.suffix_link) == {1: 0}


def test_empty_reference_rejected():
    with pytest.raises(ConfigurationError):
        build_factor_oracle("")


def test_classify_bbac():
    f = build_factor_oracle("bbac", Alphabet("abcx"))
    assert classify_transition(f, 0, "b") is TransitionKind.DIRECT
    assert classify_transition(f, 0, "a") is TransitionKind.NONDIRECT
    assert classify_transition(f, 0, "x") is TransitionKind.NONE
    assert classify_transition(f, 3, "c") is TransitionKind.DIRECT
    assert classify_transition(build_factor_oracle("a"), 0, "a") is TransitionKind.DIRECT


def test_oracle_nfa_examples():
    f = build_factor_oracle("bbac")
    n = oracle_as_nfa(f, include_eps_links=False)
    assert n.accepts(tuple("ba"))
    assert all(n.accepts(x) for x in factors("bbac"))
    assert n.accepting == frozenset(range(5))
    assert n.initial_set == frozenset({0})


def test_eps_links_accept_superset():
    f = build_factor_oracle("abbaab")
    plain, linked = oracle_as_nfa(f, False), oracle_as_nfa(f, True)
    rng = random.Random(2)
    for _ in range(100):
        x = random_word(rng, rng.randint(0, 8))
        if nfa_accepts(plain, x):
            assert nfa_accepts(linked, x)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 12))
def test_every_factor_accepted(seed, n):
    ref = random_word(random.Random(seed), n)
    f = build_factor_oracle(ref)
    assert all(f.accepts(x) for x in factors(ref))
    for i, s in enumerate(ref):
        assert f.forward[(i, s)] == i + 1


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(2, 64))
def test_transition_count_bounds(seed, n):
    ref = random_word(random.Random(seed), n, "abc")
    f = build_factor_oracle(ref)
    assert f.state_count == n + 1
    assert n <= len(f.forward) <= 2 * n - 1


def test_every_factor_accepted_long_reference():
    ref = random_word(random.Random(9), 64, "abc")
    f = build_factor_oracle(ref)
    assert all(f.accepts(x) for x in factors(ref))


def test_window_examples():
    f = build_factor_oracle("bbac")
    strict = window_admissibility_dfa(f, WindowSpec(1, 0, 0))
    assert strict.accepts(tuple("bb"))
    assert not strict.accepts(tuple("a"))
    loose = window_admissibility_dfa(f, WindowSpec(1, 0, 1))
    for x in all_words("abc", 6):
        assert loose.accepts(x) == f.accepts(x)


def test_window_spec_validation():
    for k, low, high in ((0, 0, 0), (2, 2, 1), (2, 0, 3), (2, -1, 1)):
        with pytest.raises(ConfigurationError):
            WindowSpec(k, low, high)


def window_oracle(f, word, k, low, high):
    """Recount non-direct steps in each trailing window after every step."""
    q, kinds = 0, []
    for s in word:
        kind = classify_transition(f, q, s)
        if kind is TransitionKind.NONE:
            return False
        kinds.append(kind is TransitionKind.NONDIRECT)
        q = f.forward[(q, s)]
        ones = sum(kinds[-k:])
        if ones > high or (len(kinds) >= k and ones < low):
            return False
    return True


def test_window_popcount_agreement():
    rng = random.Random(13)
    for _ in range(10**4):
        ref = random_word(rng, rng.randint(1, 8), "abc")
        f = build_factor_oracle(ref, Alphabet("abc"))
        k = rng.randint(1, 3)
        high = rng.randint(0, k)
        low = rng.randint(0, high)
        d = window_admissibility_dfa(f, WindowSpec(k, low, high))
        x = random_word(rng, rng.randint(0, 8), "abc")
        assert d.accepts(x) == window_oracle(f, x, k, low, high)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_window_language_within_oracle(seed):
    rng = random.Random(seed)
    f = build_factor_oracle(random_word(rng, rng.randint(1, 6)))
    k = rng.randint(1, 3)
    high = rng.randint(0, k)
    d = window_admissibility_dfa(f, WindowSpec(k, rng.randint(0, high), high))
    for x in all_words("ab", 8):
        if d.accepts(x):
            assert f.accepts(x)
    seen = set()
    for (q, s) in d.delta:
        assert (q, s) not in seen
        seen.add((q, s))


def test_window_state_bound():
    rng = random.Random(21)
    for _ in range(50):
        n = rng.randint(1, 10)
        f = build_factor_oracle(random_word(rng, n))
        k = rng.randint(1, 4)
        high = rng.randint(0, k)
        d = window_admissibility_dfa(f, WindowSpec(k, 0, high))
        assert d.state_count <= (n + 1) * 2**k
        low = rng.randint(0, high)
        d = window_admissibility_dfa(f, WindowSpec(k, low, high))
        assert d.state_count <= (n + 1) * 2**k * (k + 1)
