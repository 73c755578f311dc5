import json
import random
import warnings
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import AB, BINARY, a_star_b, chain_dfa, running_admiss, running_improv
from oracles import (
    all_words,
    brute_language,
    dfa_accepts,
    free_block,
    longest_simple_accepting_path,
    nfa_accepts,
    random_dfa,
)

from ctrlimprov.automata import (
    Dfa,
    complete,
    empty_dfa,
    is_language_infinite,
    product,
    universal_dfa,
)
from ctrlimprov.counting import INFINITE, count_words
from ctrlimprov.errors import ConfigurationError, PreconditionError, ResourceLimitError
from ctrlimprov.improvise import CIInstance, FeasibilityVerdict, Improviser
from ctrlimprov.sat import InternalSolver, and_, not_, or_, var, xor
from ctrlimprov.symbolic import (
    AlmostUniformSampler,
    CountEstimate,
    SymbolicAutomaton,
    almost_uniform_sampler,
    approx_count,
    diameter,
    encode_dfa,
    enumerate_words_symbolic,
    find_lasso,
    format_expr,
    headline_bound,
    is_deterministic,
    parse_expr,
    pivot_for,
    repetitions_for,
    symbolic_accepts,
    symbolic_from_json,
    symbolic_is_infinite,
    symbolic_product,
    symbolic_pump_sampler,
    symbolic_to_json,
    synthesize_symbolic,
    unroll,
    user_diameter,
)

seeds = st.integers(0, 2**32 - 1)
ORACLE = InternalSolver()


def w(s):
    return tuple(s)


def projected_words(s, n):
    u = unroll(s, n)
    return [u.decode_projection(b) for b in ORACLE.enumerate_projected(u.cnf, 10**5)]


def eps_only():
    x0 = var("x0")
    return SymbolicAutomaton(1, 1, not_(x0), not_(x0), and_(not_(x0), x0))


# -- constants ------------------------------------------------------------


def test_counting_constants():
    assert pivot_for(0.5) == 67
    assert pivot_for(7) == 10
    assert repetitions_for(0.1) == 120


# -- encoding and unrolling ----------------------------------------------


def test_encode_running_improv():
    s = encode_dfa(running_improv())
    assert s.state_bits == 3 and s.input_bits == 1
    assert enumerate_words_symbolic(s, ORACLE, 3, 100) == [w(x) for x in ("000", "001", "010", "100", "101")]


def test_encode_empty_dfa_unsat():
    s = encode_dfa(empty_dfa(BINARY))
    for n in range(5):
        assert not ORACLE.solve(unroll(s, n).cnf).is_sat


def test_epsilon_only_unrolling():
    for n in range(4):
        assert projected_words(eps_only(), n) == [()]


def test_running_admissible_three_models():
    s = encode_dfa(product(running_improv(), running_admiss()))
    assert sorted(projected_words(s, 3)) == [w("000"), w("001"), w("101")]


def test_membership_agreement():
    rng = random.Random(41)
    pairs = 0
    while pairs < 10**4:
        d = random_dfa(rng, max_states=5)
        s = encode_dfa(d)
        for _ in range(100):
            x = tuple(rng.choice("01") for _ in range(rng.randint(0, 6)))
            assert symbolic_accepts(s, x, ORACLE) == dfa_accepts(d, x)
            pairs += 1


def test_membership_rejects_unknown_symbol():
    assert not symbolic_accepts(encode_dfa(running_improv()), ("2",), ORACLE)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_unroll_count_matches_enumeration(seed):
    d = random_dfa(random.Random(seed), max_states=5)
    words = projected_words(encode_dfa(d), 4)
    assert len(words) == len(set(words))
    assert set(words) == brute_language(d, 4)


def test_unrolling_bijection_ten_thousand_models():
    rng = random.Random(8)
    decoded = 0
    while decoded < 10**4:
        d = random_dfa(rng, max_states=5, density=0.9)
        u = unroll(encode_dfa(d), 7)
        models = ORACLE.enumerate_projected(u.cnf, 10**5)
        words = [u.decode_projection(b) for b in models]
        assert len(set(words)) == len(words)
        assert all(dfa_accepts(d, x) for x in words)
        assert all(u.encode_word(x) == b for x, b in zip(words, models))
        decoded += len(words)


def test_to_nfa_twin():
    rng = random.Random(6)
    for _ in range(20):
        d = random_dfa(rng, max_states=4)
        n = encode_dfa(d).to_nfa()
        for x in all_words("01", 6):
            assert nfa_accepts(n, x) == dfa_accepts(d, x)


# -- diameter and lassos --------------------------------------------------


def test_diameter_examples():
    assert diameter(encode_dfa(running_improv()), ORACLE).D == 3
    assert longest_simple_accepting_path(running_improv()) == 3
    single = Dfa(BINARY, 1, 0, {0}, {})
    assert diameter(encode_dfa(single), ORACLE).D == 0
    r = diameter(encode_dfa(chain_dfa(5)), ORACLE)
    assert r.D == 5 and r.method == "exhausted-search" and r.unsat_at == 6


def test_diameter_cap():
    with pytest.raises(ResourceLimitError):
        diameter(encode_dfa(chain_dfa(5)), ORACLE, cap=3)
    with pytest.raises(ConfigurationError):
        diameter(encode_dfa(chain_dfa(5)), ORACLE, cap=0)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_diameter_matches_explicit_search(seed):
    d = random_dfa(random.Random(seed), max_states=5)
    expected = longest_simple_accepting_path(d)
    assert diameter(encode_dfa(d), ORACLE).D == max(expected, 0)


def test_infinite_examples():
    s = encode_dfa(universal_dfa(BINARY))
    assert symbolic_is_infinite(s, ORACLE, diameter(s, ORACLE))
    s = encode_dfa(running_improv())
    assert not symbolic_is_infinite(s, ORACLE, diameter(s, ORACLE))


def test_lasso_examples():
    s = encode_dfa(a_star_b())
    assert find_lasso(s, ORACLE, diameter(s, ORACLE)) == ((), w("a"), w("b"))
    s = encode_dfa(universal_dfa(BINARY))
    assert find_lasso(s, ORACLE, diameter(s, ORACLE)) == ((), w("0"), ())


def test_infinite_agreement_on_fifty_dfas():
    rng = random.Random(19)
    for _ in range(50):
        d = random_dfa(rng, max_states=5)
        s = encode_dfa(d)
        D = diameter(s, ORACLE)
        lasso = find_lasso(s, ORACLE, D)
        assert (lasso is not None) == is_language_infinite(d)
        if lasso is not None:
            x, y, z = lasso
            assert len(y) >= 1 and len(x) <= D.D and len(z) <= D.D
            assert all(dfa_accepts(d, x + y * i + z) for i in range(5))


def test_user_diameter():
    r = user_diameter(4)
    assert (r.D, r.method, r.cycle_bound) == (4, "user-supplied", 5)
    with pytest.raises(ConfigurationError):
        user_diameter(-1)


def test_is_deterministic():
    assert is_deterministic(encode_dfa(running_admiss()), ORACLE)
    x0, y0 = var("x0"), var("y0")
    two_starts = SymbolicAutomaton(1, 1, parse_expr("true"), x0, xor(x0, y0))
    assert not is_deterministic(two_starts, ORACLE)
    branching = SymbolicAutomaton(1, 1, not_(x0), x0, parse_expr("true"))
    assert not is_deterministic(branching, ORACLE)


def test_symbolic_product_languages():
    i, a = encode_dfa(running_improv()), encode_dfa(running_admiss())
    assert sorted(projected_words(symbolic_product(i, a), 3)) == [w("000"), w("001"), w("101")]
    # negating acceptance of a partial DFA leaves out words where it got stuck
    assert projected_words(symbolic_product(i, a, negate_b_acc=True), 3) == []
    b = symbolic_product(i, encode_dfa(complete(running_admiss())), negate_b_acc=True)
    assert sorted(projected_words(b, 3)) == [w("010"), w("100")]


def test_product_needs_shared_encoding():
    with pytest.raises(ConfigurationError):
        symbolic_product(encode_dfa(running_improv()), encode_dfa(a_star_b()))


# -- counting -------------------------------------------------------------


def test_approx_count_small_cases():
    rng = random.Random(0)
    e = approx_count(encode_dfa(empty_dfa(BINARY)), ORACLE, 0.5, 0.1, 3, rng)
    assert e.value == 0 and e.exact
    e = approx_count(free_block(6), ORACLE, 0.5, 0.1, 1, rng)
    assert 64 / 1.5 <= e.value <= 64 * 1.5
    a = encode_dfa(product(running_improv(), running_admiss()))
    hits = sum(2 <= approx_count(a, ORACLE, 0.5, 0.1, 3, random.Random(k)).value <= 4.5 for k in range(20))
    assert hits >= 17
    s = encode_dfa(universal_dfa(BINARY))
    assert approx_count(s, ORACLE, 0.5, 0.1, diameter(s, ORACLE), rng).value == INFINITE


def test_approx_count_validates_parameters():
    s = free_block(2)
    with pytest.raises(ConfigurationError):
        approx_count(s, ORACLE, 0, 0.1, 1, random.Random(0))
    with pytest.raises(ConfigurationError):
        approx_count(s, ORACLE, 0.5, 1.0, 1, random.Random(0))


def fixture_automata():
    a_run = encode_dfa(product(running_improv(), running_admiss()))
    return [
        (1, encode_dfa(chain_dfa(3))),
        (3, a_run),
        (5, encode_dfa(running_improv())),
        (40, free_block(6, 40)),
        (64, free_block(6)),
        (100, free_block(7, 100)),
        (250, free_block(8, 250)),
        (700, free_block(10, 700)),
        (1024, free_block(10)),
        (4096, free_block(12)),
    ]


@pytest.mark.slow
def test_approx_count_contract_ten_fixtures():
    """At tau = 0.5, delta = 0.1 at least 17 of 20 runs land within a factor 1.5."""
    for truth, s in fixture_automata():
        D = diameter(s, ORACLE)
        hits = 0
        for run in range(20):
            est = approx_count(s, ORACLE, 0.5, 0.1, D, random.Random(1000 * truth + run)).value
            hits += truth / 1.5 <= est <= truth * 1.5
        assert hits >= 17, (truth, hits)


# -- sampling -------------------------------------------------------------


def test_sampler_singleton():
    s = encode_dfa(chain_dfa(2))
    rng = random.Random(0)
    samp = almost_uniform_sampler(s, ORACLE, 7, 2, rng)
    assert {samp.draw(rng) for _ in range(30)} == {w("00")}


def test_sampler_running_admissible_frequencies():
    a = encode_dfa(product(running_improv(), running_admiss()))
    rng = random.Random(3)
    samp = almost_uniform_sampler(a, ORACLE, 7, 3, rng)
    n = 10**5
    freq = Counter(samp.draw(rng) for _ in range(n))
    assert set(freq) == {w("000"), w("001"), w("101")}
    for count in freq.values():
        assert 1 / (3 * 8) <= count / n <= 8 / 3
        assert 0.30 <= count / n <= 0.37


def test_sampler_warns_below_generator_tau():
    with pytest.warns(UserWarning):
        almost_uniform_sampler(free_block(2), ORACLE, 0.5, 1, random.Random(0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        almost_uniform_sampler(free_block(2), ORACLE, 7, 1, random.Random(0))


def hashed_sampler(bits=6, tau=7):
    u = unroll(free_block(bits), 1)
    return AlmostUniformSampler(u, ORACLE, tau, CountEstimate(2**bits, False)), u


def test_hashed_sampler_envelope():
    samp, _ = hashed_sampler()
    assert samp.hash_count == 4 and not samp.has_exact_support
    assert samp.prob_bound == Fraction(8, 64)
    rng = random.Random(12)
    n = 3000
    freq = Counter(samp.draw(rng) for _ in range(n))
    assert len(freq) == 64
    assert all(len(x) == 1 and len(x[0]) == 6 for x in freq)
    assert max(freq.values()) / n <= float(samp.prob_bound)


def test_sampler_retries_on_empty_cells():
    samp, u = hashed_sampler()
    real = samp.draw_hashes
    calls = []

    def flaky(rng):
        calls.append(1)
        if len(calls) <= 3:
            return [((), True)]
        return real(rng)

    samp.draw_hashes = flaky
    word = samp.draw(random.Random(0))
    assert samp.retries >= 3
    assert free_block(6).encode_symbol(word[0]) is not None


def test_sampler_gives_up_after_max_retries():
    samp, _ = hashed_sampler()
    samp.max_retries = 5
    samp.draw_hashes = lambda rng: [((), True)]
    with pytest.raises(ResourceLimitError):
        samp.draw(random.Random(0))


def test_sampler_preconditions():
    u = unroll(free_block(2), 1)
    with pytest.raises(PreconditionError):
        AlmostUniformSampler(u, ORACLE, 7, CountEstimate(0, True))
    with pytest.raises(PreconditionError):
        AlmostUniformSampler(u, ORACLE, 7, CountEstimate(INFINITE, True))


def test_symbolic_pump_sampler():
    s = encode_dfa(a_star_b())
    D = diameter(s, ORACLE)
    samp = symbolic_pump_sampler(s, ORACLE, 4, D)
    support = list(samp.support())
    assert len(set(support)) == 4
    assert all(a_star_b().accepts(x) for x in support)
    one = symbolic_pump_sampler(s, ORACLE, 1, D)
    rng = random.Random(0)
    assert len({one.draw(rng) for _ in range(10)}) == 1
    with pytest.raises(PreconditionError):
        symbolic_pump_sampler(encode_dfa(running_improv()), ORACLE, 2, 3)


# -- expression syntax and JSON ------------------------------------------


def test_parse_and_format():
    f = parse_expr("(and x0 (not a1) (or y0 (xor x1 a0)) true)")
    assert parse_expr(format_expr(f)) == f
    assert format_expr(parse_expr("false")) == "false"
    for bad in ("(and x0", "(nand x0 x1)", "x0 x1", "(not x0 x1)", "z3", ")", "(and x0))"):
        with pytest.raises(ConfigurationError):
            parse_expr(bad)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_format_round_trip_preserves_semantics(seed):
    rng = random.Random(seed)
    names = ["x0", "x1", "a0", "y0"]

    def gen(depth):
        if depth == 0 or rng.random() < 0.25:
            return var(rng.choice(names))
        op = rng.randrange(4)
        if op == 0:
            return not_(gen(depth - 1))
        return [and_, or_, xor][op - 1](gen(depth - 1), gen(depth - 1))

    f = gen(4)
    g = parse_expr(format_expr(f))
    for bits in range(16):
        env = {n: bool(bits >> i & 1) for i, n in enumerate(names)}
        assert f.evaluate(env) == g.evaluate(env)


def test_json_round_trip():
    s = encode_dfa(running_improv())
    data = json.loads(json.dumps(symbolic_to_json(s)))
    back = symbolic_from_json(data)
    assert enumerate_words_symbolic(back, ORACLE, 3, 100) == enumerate_words_symbolic(s, ORACLE, 3, 100)


def test_json_validation():
    base = {"kind": "symbolic", "state_bits": 1, "input_bits": 1, "init": "(not x0)", "acc": "x0", "delta": "y0"}
    symbolic_from_json(base)
    for patch in (
        {"extra": 1},
        {"state_bits": "1"},
        {"acc": "x1"},
        {"delta": "a1"},
        {"symbol_decode": [["0", "a"], ["1", "a"]]},
        {"symbol_decode": [["00", "a"]]},
        {"symbol_decode": [["0", "a"], ["0", "b"]]},
    ):
        with pytest.raises(ConfigurationError):
            symbolic_from_json({**base, **patch})
    missing = dict(base)
    del missing["init"]
    with pytest.raises(ConfigurationError):
        symbolic_from_json(missing)


# -- the approximate scheme ----------------------------------------------


def running_instance(eps="1/4", rho="1/4"):
    return CIInstance(
        encode_dfa(running_improv()), encode_dfa(running_admiss()), Fraction(eps), Fraction(rho)
    )


def test_headline_bound():
    assert headline_bound(7, Fraction(1, 4), Fraction(1, 4)) == 20


def test_symbolic_running_example():
    imp = synthesize_symbolic(running_instance(), 7, 0.2, random.Random(1))
    assert isinstance(imp, Improviser)
    assert imp.case_tag == "symbolic-D"
    assert imp.rho == 20 and imp.epsilon == Fraction(1, 4)
    dist = imp.exact_distribution()
    # both components enumerate exactly here, so the mixture is known
    expected = {w("000"): Fraction(3, 12) + Fraction(1, 20), w("001"): Fraction(3, 12) + Fraction(1, 20),
                w("101"): Fraction(3, 12) + Fraction(1, 20), w("010"): Fraction(1, 20), w("100"): Fraction(1, 20)}
    assert dist == expected
    rng = random.Random(2)
    n = 10**5
    admissible = sum(running_admiss().accepts(imp.draw(rng)) for _ in range(n))
    assert admissible / n >= 0.74


def test_case_d_bound_with_exact_counts():
    # (1-eps)/|A| + eps/|I| against (1+tau)^2 (1+eps) rho for the running example
    for eps, rho in ((Fraction(1, 4), Fraction(1, 4)), (Fraction(1, 2), Fraction(1, 3))):
        worst = (1 - eps) / 3 + eps / 5
        assert worst <= headline_bound(7, eps, rho)
        assert worst <= headline_bound(Fraction(1, 10), eps, rho)


def test_symbolic_case_a():
    u = encode_dfa(universal_dfa(BINARY))
    inst = CIInstance(u, u, Fraction(0), Fraction(1, 5))
    imp = synthesize_symbolic(inst, 7, 0.2, random.Random(0))
    assert imp.case_tag == "symbolic-A" and imp.rho == Fraction(1, 5) and imp.epsilon == 0
    assert imp.exact_distribution() is not None
    assert len(imp.exact_distribution()) == 5
    assert imp.max_probability() == Fraction(1, 5)


def test_symbolic_case_b():
    u = encode_dfa(running_improv())
    inst = CIInstance(u, u, Fraction(0), Fraction(1, 5))
    imp = synthesize_symbolic(inst, 7, 0.2, random.Random(0))
    assert imp.case_tag == "symbolic-B" and imp.rho == 64 * Fraction(1, 5)
    assert imp.max_probability() == Fraction(1, 5)


def test_symbolic_infeasible_consistency():
    verdicts = 0
    for k in range(20):
        r = synthesize_symbolic(running_instance("0", "1/8"), 7, 0.2, random.Random(k))
        verdicts += isinstance(r, FeasibilityVerdict) and not r.feasible
    assert verdicts >= 16


def a_star_b_instance(admiss):
    return CIInstance(encode_dfa(a_star_b()), encode_dfa(admiss), Fraction(1, 2), Fraction(1, 4))


def b_or_ab():
    return Dfa(AB, 3, 0, {2}, {(0, "a"): 1, (0, "b"): 2, (1, "b"): 2})


def test_symbolic_case_c_pumps_difference():
    imp = synthesize_symbolic(a_star_b_instance(complete(b_or_ab())), 7, 0.2, random.Random(0))
    assert imp.case_tag == "symbolic-C"
    assert [c.role for c in imp.components] == ["almost-uniform(A)", "pump(B)"]
    assert imp.rho == 64 * Fraction(1, 4) and "fallback" not in imp.notes
    for x in imp.components[1].sampler.support():
        assert a_star_b().accepts(x) and not b_or_ab().accepts(x)
    dist = imp.exact_distribution()
    assert sum(p for x, p in dist.items() if b_or_ab().accepts(x)) == imp.admissible_mass == Fraction(1, 2)


def test_symbolic_case_c_falls_back_for_partial_admissibility():
    imp = synthesize_symbolic(a_star_b_instance(b_or_ab()), 7, 0.2, random.Random(0))
    assert imp.case_tag == "symbolic-C" and imp.notes["fallback"] == "pump(I)"
    assert imp.rho == headline_bound(7, Fraction(1, 2), Fraction(1, 4))
    assert imp.admissible_mass == Fraction(1, 2)
    for x in imp.components[1].sampler.support():
        assert a_star_b().accepts(x)


def test_symbolic_parameter_validation():
    with pytest.raises(ConfigurationError):
        synthesize_symbolic(running_instance(), 0, 0.2, random.Random(0))
    with pytest.raises(ConfigurationError):
        synthesize_symbolic(running_instance(), 7, 1.5, random.Random(0))


def test_symbolic_draws_pass_membership():
    imp = synthesize_symbolic(running_instance(), 7, 0.2, random.Random(4))
    rng = random.Random(5)
    for _ in range(2000):
        assert running_improv().accepts(imp.draw(rng))
