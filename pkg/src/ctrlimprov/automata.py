"""Explicit finite automata and the regular-language constructions built on them.

States are dense integers ``0..state_count-1``. Words are tuples of symbol
labels. DFAs use partial transition maps: a missing ``(state, symbol)`` entry
rejects the word.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import ConfigurationError, DeterminizationLimitError

Word = tuple[str, ...]

#: Default upper bound on the number of subsets built by :func:`determinize`.
DETERMINIZE_CAP = 2**20


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __init__(self, symbols: Iterable[str]):
        symbols = tuple(symbols)
        if any(not isinstance(s, str) or not s for s in symbols):
            raise ConfigurationError("alphabet labels must be non-empty strings")
        if len(set(symbols)) != len(symbols):
            raise ConfigurationError(f"duplicate alphabet labels in {symbols!r}")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    def index(self, symbol: str) -> int:
        return self._index[symbol]

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._index

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)


def _check_state(state: int, count: int, what: str) -> None:
    if not (isinstance(state, int) and 0 <= state < count):
        raise ConfigurationError(f"{what} {state!r} out of range 0..{count - 1}")


@dataclass(frozen=True)
class Dfa:
    """Deterministic automaton with a partial transition map."""

    alphabet: Alphabet
    state_count: int
    initial: int
    accepting: frozenset[int]
    delta: Mapping[tuple[int, str], int]

    def __post_init__(self):
        if self.state_count < 1:
            raise ConfigurationError("a DFA needs at least one state")
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "delta", dict(self.delta))
        _check_state(self.initial, self.state_count, "initial state")
        for q in self.accepting:
            _check_state(q, self.state_count, "accepting state")
        for (q, sym), r in self.delta.items():
            _check_state(q, self.state_count, "transition source")
            _check_state(r, self.state_count, "transition target")
            if sym not in self.alphabet:
                raise ConfigurationError(f"symbol {sym!r} not in alphabet")

    def step(self, state: int | None, symbol: str) -> int | None:
        if state is None:
            return None
        return self.delta.get((state, symbol))

    def run(self, word: Sequence[str]) -> int | None:
        state: int | None = self.initial
        for sym in word:
            state = self.delta.get((state, sym))
            if state is None:
                return None
        return state

    def accepts(self, word: Sequence[str]) -> bool:
        return self.run(word) in self.accepting

    def successors(self, state: int) -> list[tuple[str, int]]:
        """Outgoing edges of ``state`` in alphabet order."""
        out = []
        for sym in self.alphabet:
            r = self.delta.get((state, sym))
            if r is not None:
                out.append((sym, r))
        return out

    def is_complete(self) -> bool:
        return len(self.delta) == self.state_count * len(self.alphabet)

    def as_nfa(self) -> "Nfa":
        return Nfa(
            self.alphabet,
            self.state_count,
            frozenset({self.initial}),
            self.accepting,
            {k: frozenset({v}) for k, v in self.delta.items()},
        )


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic automaton with optional epsilon moves."""

    alphabet: Alphabet
    state_count: int
    initial_set: frozenset[int]
    accepting: frozenset[int]
    delta: Mapping[tuple[int, str], frozenset[int]]
    eps: Mapping[int, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.state_count < 1:
            raise ConfigurationError("an NFA needs at least one state")
        object.__setattr__(self, "initial_set", frozenset(self.initial_set))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        delta = {k: frozenset(v) for k, v in self.delta.items() if v}
        eps = {k: frozenset(v) for k, v in self.eps.items() if v}
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "eps", eps)
        for q in self.initial_set | self.accepting:
            _check_state(q, self.state_count, "state")
        for (q, sym), targets in delta.items():
            _check_state(q, self.state_count, "transition source")
            if sym not in self.alphabet:
                raise ConfigurationError(f"symbol {sym!r} not in alphabet")
            for r in targets:
                _check_state(r, self.state_count, "transition target")
        for q, targets in eps.items():
            _check_state(q, self.state_count, "epsilon source")
            for r in targets:
                _check_state(r, self.state_count, "epsilon target")

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(seen)
        while stack:
            q = stack.pop()
            for r in self.eps.get(q, ()):
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return frozenset(seen)

    def start(self) -> frozenset[int]:
        return self.closure(self.initial_set)

    def step(self, states: Iterable[int], symbol: str) -> frozenset[int]:
        nxt: set[int] = set()
        for q in states:
            nxt |= self.delta.get((q, symbol), frozenset())
        return self.closure(nxt)

    def run(self, word: Sequence[str]) -> frozenset[int]:
        current = self.start()
        for sym in word:
            if not current:
                break
            current = self.step(current, sym)
        return current

    def accepts(self, word: Sequence[str]) -> bool:
        return not self.run(word).isdisjoint(self.accepting)

    def successors(self, state: int) -> list[tuple[str, int]]:
        out = []
        for sym in self.alphabet:
            out.extend((sym, r) for r in sorted(self.delta.get((state, sym), ())))
        return out

    def without_epsilon(self) -> "Nfa":
        """Equivalent NFA over the same states with no epsilon moves."""
        if not self.eps:
            return self
        closures = [self.closure({q}) for q in range(self.state_count)]
        delta = {}
        for q in range(self.state_count):
            for sym in self.alphabet:
                targets: set[int] = set()
                for p in closures[q]:
                    targets |= self.delta.get((p, sym), frozenset())
                if targets:
                    delta[(q, sym)] = self.closure(targets)
        accepting = {q for q in range(self.state_count) if not closures[q].isdisjoint(self.accepting)}
        return Nfa(self.alphabet, self.state_count, self.start(), accepting, delta)

    def is_deterministic(self) -> bool:
        return (
            not self.eps
            and len(self.initial_set) == 1
            and all(len(v) == 1 for v in self.delta.values())
        )

    def as_dfa(self) -> Dfa:
        """Reinterpret a structurally deterministic NFA as a DFA (no subset construction)."""
        if not self.is_deterministic():
            raise ConfigurationError("NFA is not structurally deterministic")
        (init,) = self.initial_set
        delta = {k: next(iter(v)) for k, v in self.delta.items()}
        return Dfa(self.alphabet, self.state_count, init, self.accepting, delta)


Automaton = Union[Dfa, Nfa]


@dataclass(frozen=True)
class TrimReport:
    kept_states: frozenset[int]
    removed_unreachable: frozenset[int]
    removed_dead: frozenset[int]


def universal_dfa(alphabet: Alphabet) -> Dfa:
    """One accepting state looping on every symbol: the language of all words."""
    return Dfa(alphabet, 1, 0, {0}, {(0, s): 0 for s in alphabet})


def empty_dfa(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet, 1, 0, frozenset(), {})


def _edges(a: Automaton) -> dict[int, set[int]]:
    graph: dict[int, set[int]] = {q: set() for q in range(a.state_count)}
    if isinstance(a, Dfa):
        for (q, _), r in a.delta.items():
            graph[q].add(r)
    else:
        for (q, _), targets in a.delta.items():
            graph[q] |= targets
        for q, targets in a.eps.items():
            graph[q] |= targets
    return graph


def _reach(graph: Mapping[int, Iterable[int]], sources: Iterable[int]) -> set[int]:
    seen = set(sources)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for r in graph[q]:
            if r not in seen:
                seen.add(r)
                stack.append(r)
    return seen


def _reverse(graph: Mapping[int, Iterable[int]]) -> dict[int, set[int]]:
    rev: dict[int, set[int]] = {q: set() for q in graph}
    for q, targets in graph.items():
        for r in targets:
            rev[r].add(q)
    return rev


def useful_states(a: Automaton) -> tuple[set[int], set[int]]:
    """Return ``(reachable, coreachable)`` state sets."""
    graph = _edges(a)
    init = {a.initial} if isinstance(a, Dfa) else set(a.initial_set)
    return _reach(graph, init), _reach(_reverse(graph), a.accepting)


def trim(a: Automaton) -> tuple[Automaton, TrimReport]:
    """Drop states not on any initial-to-accepting path, renumbering the rest.

    If no state survives, the result is a one-state automaton with the empty
    language and ``kept_states`` is empty.
    """
    reachable, coreachable = useful_states(a)
    kept = reachable & coreachable
    everything = set(range(a.state_count))
    report = TrimReport(
        frozenset(kept),
        frozenset(everything - reachable),
        frozenset(reachable - kept),
    )
    if not kept:
        empty = empty_dfa(a.alphabet)
        return (empty if isinstance(a, Dfa) else empty.as_nfa()), report
    order = sorted(kept)
    renum = {q: i for i, q in enumerate(order)}
    accepting = {renum[q] for q in a.accepting if q in kept}
    if isinstance(a, Dfa):
        delta = {
            (renum[q], s): renum[r]
            for (q, s), r in a.delta.items()
            if q in kept and r in kept
        }
        return Dfa(a.alphabet, len(order), renum[a.initial], accepting, delta), report
    delta = {}
    for (q, s), targets in a.delta.items():
        if q in kept:
            t = frozenset(renum[r] for r in targets if r in kept)
            if t:
                delta[(renum[q], s)] = t
    eps = {}
    for q, targets in a.eps.items():
        if q in kept:
            t = frozenset(renum[r] for r in targets if r in kept)
            if t:
                eps[renum[q]] = t
    init = {renum[q] for q in a.initial_set if q in kept}
    return Nfa(a.alphabet, len(order), init, accepting, delta, eps), report


def _require_same_alphabet(a: Automaton, b: Automaton) -> None:
    if a.alphabet != b.alphabet:
        raise ConfigurationError(
            f"alphabet mismatch: {a.alphabet.symbols!r} vs {b.alphabet.symbols!r}"
        )


def product(a: Automaton, b: Automaton) -> Automaton:
    """Synchronous product accepting ``L(a) & L(b)``; reachable pairs only.

    Two DFAs give a DFA; if either side is an NFA the result is an
    epsilon-free NFA.
    """
    _require_same_alphabet(a, b)
    if isinstance(a, Dfa) and isinstance(b, Dfa):
        start = (a.initial, b.initial)
        ids = {start: 0}
        queue = deque([start])
        delta = {}
        while queue:
            pa, pb = pair = queue.popleft()
            for sym in a.alphabet:
                ra, rb = a.delta.get((pa, sym)), b.delta.get((pb, sym))
                if ra is None or rb is None:
                    continue
                nxt = (ra, rb)
                if nxt not in ids:
                    ids[nxt] = len(ids)
                    queue.append(nxt)
                delta[(ids[pair], sym)] = ids[nxt]
        accepting = {i for (pa, pb), i in ids.items() if pa in a.accepting and pb in b.accepting}
        return Dfa(a.alphabet, len(ids), 0, accepting, delta)

    na = (a.as_nfa() if isinstance(a, Dfa) else a).without_epsilon()
    nb = (b.as_nfa() if isinstance(b, Dfa) else b).without_epsilon()
    ids: dict[tuple[int, int], int] = {}
    queue = deque()
    for p in sorted(na.initial_set):
        for q in sorted(nb.initial_set):
            ids[(p, q)] = len(ids)
            queue.append((p, q))
    if not ids:
        return empty_dfa(a.alphabet).as_nfa()
    delta: dict[tuple[int, str], set[int]] = {}
    while queue:
        pa, pb = pair = queue.popleft()
        for sym in na.alphabet:
            for ra in sorted(na.delta.get((pa, sym), ())):
                for rb in sorted(nb.delta.get((pb, sym), ())):
                    nxt = (ra, rb)
                    if nxt not in ids:
                        ids[nxt] = len(ids)
                        queue.append(nxt)
                    delta.setdefault((ids[pair], sym), set()).add(ids[nxt])
    accepting = {i for (pa, pb), i in ids.items() if pa in na.accepting and pb in nb.accepting}
    init = {ids[(p, q)] for p in na.initial_set for q in nb.initial_set}
    return Nfa(a.alphabet, len(ids), init, accepting, delta)


def complete(a: Dfa) -> Dfa:
    """Total version of ``a``; adds a rejecting sink only when needed."""
    if a.is_complete():
        return a
    sink = a.state_count
    delta = dict(a.delta)
    for q in range(a.state_count + 1):
        for sym in a.alphabet:
            delta.setdefault((q, sym), sink)
    return Dfa(a.alphabet, a.state_count + 1, a.initial, a.accepting, delta)


def complement(a: Dfa) -> Dfa:
    """Complete DFA for all words over the alphabet not accepted by ``a``."""
    c = complete(a)
    accepting = set(range(c.state_count)) - c.accepting
    return Dfa(c.alphabet, c.state_count, c.initial, accepting, c.delta)


def determinize(n: Automaton, cap: int = DETERMINIZE_CAP) -> Dfa:
    """Subset construction over reachable subsets; the empty subset is left implicit.

    Raises :class:`DeterminizationLimitError` once more than ``cap`` subsets
    would be needed.
    """
    if isinstance(n, Dfa):
        return n
    start = n.start()
    ids = {start: 0}
    queue = deque([start])
    delta = {}
    while queue:
        subset = queue.popleft()
        for sym in n.alphabet:
            nxt = n.step(subset, sym)
            if not nxt:
                continue
            if nxt not in ids:
                if len(ids) >= cap:
                    raise DeterminizationLimitError(
                        f"subset construction exceeded cap of {cap} states"
                    )
                ids[nxt] = len(ids)
                queue.append(nxt)
            delta[(ids[subset], sym)] = ids[nxt]
    accepting = {i for s, i in ids.items() if not s.isdisjoint(n.accepting)}
    return Dfa(n.alphabet, len(ids), 0, accepting, delta)


def _has_cycle(graph: Mapping[int, Iterable[int]]) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(graph, WHITE)
    for root in graph:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(graph[root]))]
        color[root] = GREY
        while stack:
            node, children = stack[-1]
            for child in children:
                if color[child] == GREY:
                    return True
                if color[child] == WHITE:
                    color[child] = GREY
                    stack.append((child, iter(graph[child])))
                    break
            else:
                color[node] = BLACK
                stack.pop()
    return False


def is_language_infinite(a: Automaton) -> bool:
    """True iff some useful cycle consumes at least one symbol.

    Epsilon moves are folded away first, so a cycle made only of epsilon
    edges does not count.
    """
    if isinstance(a, Nfa):
        a = a.without_epsilon()
    trimmed, _ = trim(a)
    return _has_cycle(_edges(trimmed))


def topological_order(a: Automaton) -> list[int]:
    """States of an acyclic automaton in topological order (sources first)."""
    graph = _edges(a)
    indeg = dict.fromkeys(graph, 0)
    for targets in graph.values():
        for r in targets:
            indeg[r] += 1
    ready = deque(sorted(q for q, d in indeg.items() if d == 0))
    order = []
    while ready:
        q = ready.popleft()
        order.append(q)
        for r in sorted(graph[q]):
            indeg[r] -= 1
            if indeg[r] == 0:
                ready.append(r)
    if len(order) != len(graph):
        raise ValueError("automaton graph has a cycle")
    return order


def longest_word_length(a: Automaton) -> int:
    """Length of the longest accepted word of a finite, non-empty language."""
    if isinstance(a, Nfa):
        a = a.without_epsilon()
    t, report = trim(a)
    if not report.kept_states:
        raise ValueError("language is empty")
    order = topological_order(t)
    best: dict[int, int] = {}
    for q in reversed(order):
        cands = [best[r] + 1 for _, r in t.successors(q) if r in best]
        if q in t.accepting:
            cands.append(0)
        if cands:
            best[q] = max(cands)
    inits = [t.initial] if isinstance(t, Dfa) else list(t.initial_set)
    return max(best[q] for q in inits if q in best)
