"""Exact language counting and exact sampling for explicit automata.

Counts are Python integers (``INFINITE`` for infinite languages) and every
probability is a :class:`fractions.Fraction`. Random choices draw integers
with ``rng.randrange`` and compare them against exact integer thresholds, so
no floating point enters a sampler.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence, Union

from .automata import (
    Automaton,
    Dfa,
    Word,
    is_language_infinite,
    topological_order,
    trim,
    useful_states,
)
from .errors import PreconditionError

INFINITE = math.inf
CountValue = Union[int, float]


def is_infinite(count: CountValue) -> bool:
    return count == INFINITE


def pick_index(rng: random.Random, weights: Sequence[int]) -> int:
    """Index ``i`` with probability ``weights[i] / sum(weights)``, exactly."""
    r = rng.randrange(sum(weights))
    for i, w in enumerate(weights):
        if r < w:
            return i
        r -= w
    raise AssertionError("unreachable")


def pick_fraction(rng: random.Random, weights: Sequence[Fraction]) -> int:
    """Exact weighted choice among rational weights summing to one."""
    denom = math.lcm(*(Fraction(w).denominator for w in weights))
    return pick_index(rng, [int(Fraction(w) * denom) for w in weights])


# -- counting ---------------------------------------------------------------


@dataclass(frozen=True)
class PathCountTable:
    """Accepting-path counts over a trimmed acyclic DFA.

    ``counts[v]`` is the number of accepted suffixes readable from ``v``,
    i.e. paths to the per-accepting-state sink in the augmented DAG.
    """

    dfa: Dfa
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return self.counts[self.dfa.initial]

    def check_recurrence(self) -> bool:
        for v in range(self.dfa.state_count):
            expected = sum(self.counts[u] for _, u in self.dfa.successors(v))
            expected += v in self.dfa.accepting
            if self.counts[v] != expected:
                return False
        return True


def path_counts(a: Dfa) -> PathCountTable:
    """Reverse-topological path counting on the trimmed DFA.

    Raises :class:`PreconditionError` when the language is infinite.
    """
    t, report = trim(a)
    if not report.kept_states:
        return PathCountTable(t, (0,))
    if is_language_infinite(t):
        raise PreconditionError("path counts need a finite language")
    counts = [0] * t.state_count
    for v in reversed(topological_order(t)):
        counts[v] = (v in t.accepting) + sum(counts[u] for _, u in t.successors(v))
    return PathCountTable(t, tuple(counts))


def count_words(a: Dfa) -> CountValue:
    """``|L(a)|`` exactly, or ``INFINITE``."""
    if not isinstance(a, Dfa):
        raise TypeError("count_words needs a DFA; determinize NFAs first")
    if is_language_infinite(a):
        return INFINITE
    return path_counts(a).total


# -- samplers ---------------------------------------------------------------


class Sampler:
    """A fixed output distribution over words.

    Subclasses draw with an injected ``random.Random``; they hold no random
    state of their own, so one sampler may serve many independent streams.
    """

    kind: str = "abstract"
    support_size: CountValue

    def draw(self, rng: random.Random) -> Word:
        raise NotImplementedError

    def exact_prob(self, word: Sequence[str]) -> Fraction | None:
        """Exact probability of ``word``, or ``None`` if not known analytically."""
        return None

    def support(self) -> Iterator[Word]:
        raise NotImplementedError

    @property
    def has_exact_support(self) -> bool:
        return False


class UniformSampler(Sampler):
    """Random walk on the trimmed DAG with edge weights ``p_target / p_source``.

    At an accepting state the walk stops with weight ``1 / p_state`` (the
    edge into the added sink).
    """

    kind = "uniform"

    def __init__(self, table: PathCountTable):
        if table.total == 0:
            raise PreconditionError("cannot sample from an empty language")
        self.table = table
        self.support_size = table.total
        self._succ = [table.dfa.successors(v) for v in range(table.dfa.state_count)]

    @property
    def has_exact_support(self) -> bool:
        return True

    def draw(self, rng: random.Random) -> Word:
        dfa, counts = self.table.dfa, self.table.counts
        state, out = dfa.initial, []
        while True:
            r = rng.randrange(counts[state])
            if state in dfa.accepting:
                if r == 0:
                    return tuple(out)
                r -= 1
            for sym, nxt in self._succ[state]:
                if r < counts[nxt]:
                    out.append(sym)
                    state = nxt
                    break
                r -= counts[nxt]

    def walk_probability(self, word: Sequence[str]) -> Fraction:
        """Product of the walk's edge weights along ``word`` (0 if rejected)."""
        dfa, counts = self.table.dfa, self.table.counts
        prob, state = Fraction(1), dfa.initial
        for sym in word:
            nxt = dfa.delta.get((state, sym))
            if nxt is None:
                return Fraction(0)
            prob *= Fraction(counts[nxt], counts[state])
            state = nxt
        if state not in dfa.accepting:
            return Fraction(0)
        return prob * Fraction(1, counts[state])

    def exact_prob(self, word: Sequence[str]) -> Fraction:
        if self.table.dfa.accepts(word):
            return Fraction(1, self.support_size)
        return Fraction(0)

    def support(self) -> Iterator[Word]:
        """Every word of the language, depth-first in alphabet order."""
        dfa = self.table.dfa
        stack: list[tuple[int, Word]] = [(dfa.initial, ())]
        while stack:
            state, prefix = stack.pop()
            if state in dfa.accepting:
                yield prefix
            for sym, nxt in reversed(self._succ[state]):
                stack.append((nxt, prefix + (sym,)))


class ListSampler(Sampler):
    """Uniform choice from an explicit list of distinct words."""

    kind = "list"

    def __init__(self, words: Iterable[Sequence[str]]):
        self.words = [tuple(w) for w in words]
        if not self.words:
            raise PreconditionError("cannot sample from an empty list")
        if len(set(self.words)) != len(self.words):
            raise ValueError("words must be distinct")
        self._members = frozenset(self.words)
        self.support_size = len(self.words)

    @property
    def has_exact_support(self) -> bool:
        return True

    def draw(self, rng: random.Random) -> Word:
        return self.words[rng.randrange(len(self.words))]

    def exact_prob(self, word: Sequence[str]) -> Fraction:
        return Fraction(1, len(self.words)) if tuple(word) in self._members else Fraction(0)

    def support(self) -> Iterator[Word]:
        return iter(self.words)


@dataclass(frozen=True)
class PumpWitness:
    x: Word
    y: Word
    z: Word

    def word(self, i: int) -> Word:
        return self.x + self.y * i + self.z

    def validate(self, a: Automaton, repeats: Iterable[int] = (0, 1, 2, 7)) -> bool:
        return len(self.y) >= 1 and all(a.accepts(self.word(i)) for i in repeats)


class PumpSampler(Sampler):
    """Uniform over ``{x y^(i+offset) z : 0 <= i < n}``."""

    kind = "pumped"

    def __init__(self, witness: PumpWitness, n: int, offset: int = 0):
        if n < 1:
            raise PreconditionError("pump size must be at least 1")
        if not witness.y:
            raise PreconditionError("pump witness needs a non-empty loop word")
        self.witness = witness
        self.n = n
        self.offset = offset
        self.support_size = n

    @property
    def has_exact_support(self) -> bool:
        return True

    def draw(self, rng: random.Random) -> Word:
        return self.witness.word(self.offset + rng.randrange(self.n))

    def _repeat_count(self, word: Sequence[str]) -> int | None:
        x, y, z = self.witness.x, self.witness.y, self.witness.z
        extra = len(word) - len(x) - len(z)
        if extra < 0 or extra % len(y):
            return None
        i = extra // len(y)
        if self.offset <= i < self.offset + self.n and tuple(word) == self.witness.word(i):
            return i
        return None

    def exact_prob(self, word: Sequence[str]) -> Fraction:
        return Fraction(1, self.n) if self._repeat_count(word) is not None else Fraction(0)

    def support(self) -> Iterator[Word]:
        return (self.witness.word(self.offset + i) for i in range(self.n))


def uniform_sampler(a: Dfa) -> UniformSampler:
    """Exactly uniform sampler over a finite, non-empty DFA language."""
    if is_language_infinite(a):
        raise PreconditionError("uniform sampling needs a finite language")
    return UniformSampler(path_counts(a))


# -- pumping ----------------------------------------------------------------


def _sym_key(alphabet, word: Word) -> tuple[int, tuple[int, ...]]:
    return len(word), tuple(alphabet.index(s) for s in word)


def _least_words(
    successors: Callable[[int], list[tuple[str, int]]],
    sources: list[tuple[Word, int]],
) -> dict[int, Word]:
    """Length-lexicographically least word reaching each state.

    ``sources`` must already be sorted by length then alphabet order; BFS
    then discovers every state first through its least word.
    """
    best: dict[int, Word] = {}
    queue: deque[tuple[Word, int]] = deque()
    for word, q in sources:
        if q not in best:
            best[q] = word
            queue.append((word, q))
    while queue:
        word, q = queue.popleft()
        for sym, r in successors(q):
            if r not in best:
                best[r] = word + (sym,)
                queue.append((best[r], r))
    return best


def _epsilon_free(a: Automaton) -> Automaton:
    return a if isinstance(a, Dfa) else a.without_epsilon()


def find_pump_witness(a: Automaton) -> PumpWitness:
    """Least ``(x, y, z)`` with ``x y^i z`` accepted for all ``i``.

    Ties break on ``(|x|, x, |y|, y, |z|, z)`` with words ordered by the
    alphabet. NFAs are handled through their epsilon-free form.
    """
    if not is_language_infinite(a):
        raise PreconditionError("pumping needs an infinite language")
    e = _epsilon_free(a)
    inits = [e.initial] if isinstance(e, Dfa) else sorted(e.initial_set)
    reachable, coreachable = useful_states(e)
    useful = reachable & coreachable

    def succ(q: int) -> list[tuple[str, int]]:
        return [(s, r) for s, r in e.successors(q) if r in useful]

    reverse: dict[int, list[tuple[str, int]]] = {q: [] for q in useful}
    for q in sorted(useful):
        for s, r in succ(q):
            reverse[r].append((s, q))

    to_state = _least_words(succ, [((), q) for q in inits if q in useful])
    best_key, best = None, None
    for s in sorted(useful):
        starts = [((sym,), r) for sym, r in succ(s)]
        loop = _least_words(succ, starts).get(s)
        if loop is None:
            continue
        z = _least_to_accepting(e, succ, s)
        x = to_state[s]
        key = (_sym_key(e.alphabet, x), _sym_key(e.alphabet, loop), _sym_key(e.alphabet, z))
        if best_key is None or key < best_key:
            best_key, best = key, PumpWitness(x, loop, z)
    assert best is not None, "infinite language must have a useful cycle"
    return best


def _least_to_accepting(e: Automaton, succ, s: int) -> Word:
    reach = _least_words(succ, [((), s)])
    words = [w for q, w in reach.items() if q in e.accepting]
    return min(words, key=lambda w: _sym_key(e.alphabet, w))


def pump_sampler(a: Automaton, n: int) -> PumpSampler:
    """Uniform over ``n`` distinct words ``x y^i z``, ``0 <= i < n``."""
    return PumpSampler(find_pump_witness(a), n)


def pump_sampler_longer_than(a: Automaton, n: int, min_len: int) -> PumpSampler:
    """Like :func:`pump_sampler` but every support word is longer than ``min_len``."""
    w = find_pump_witness(a)
    base = len(w.x) + len(w.z)
    offset = 0 if base > min_len else (min_len - base) // len(w.y) + 1
    return PumpSampler(w, n, offset)


# -- enumeration ------------------------------------------------------------


def iter_words(a: Automaton, max_len: int | None = None) -> Iterator[Word]:
    """Accepted words in length-then-alphabet order, lazily.

    Without ``max_len`` the stream ends only when no longer word can be
    accepted, so it is endless for infinite languages.
    """
    _, coreachable = useful_states(a)
    if isinstance(a, Dfa):
        frontier: list[tuple[Word, object]] = (
            [((), a.initial)] if a.initial in coreachable else []
        )
        accepted = lambda q: q in a.accepting  # noqa: E731
    else:
        start = a.start() & coreachable
        frontier = [((), start)] if start else []
        accepted = lambda qs: not qs.isdisjoint(a.accepting)  # noqa: E731
    length = 0
    while frontier:
        for w, q in frontier:
            if accepted(q):
                yield w
        if length == max_len:
            return
        nxt = []
        for w, q in frontier:
            for sym in a.alphabet:
                if isinstance(a, Dfa):
                    r = a.delta.get((q, sym))
                    if r is not None and r in coreachable:
                        nxt.append((w + (sym,), r))
                else:
                    r = a.step(q, sym) & coreachable
                    if r:
                        nxt.append((w + (sym,), r))
        frontier = nxt
        length += 1


def enumerate_words(a: Automaton, max_len: int) -> list[Word]:
    """All accepted words of length <= ``max_len`` in length-then-alphabet order."""
    return list(iter_words(a, max_len))
