"""Factor oracles and the sliding-window divergence predicate over them."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .automata import Alphabet, Dfa, Nfa, Word
from .errors import ConfigurationError


class TransitionKind(str, enum.Enum):
    DIRECT = "direct"
    NONDIRECT = "nondirect"
    NONE = "none"


@dataclass(frozen=True)
class FactorOracle:
    """Oracle over ``ref_word``: states ``0..N``, all accepting.

    ``forward`` holds the chain edges ``i -> i+1`` plus the external forward
    edges added during construction; ``suffix_link`` maps each state ``>= 1``
    to its suffix-link target.
    """

    ref_word: Word
    alphabet: Alphabet
    forward: Mapping[tuple[int, str], int]
    suffix_link: Mapping[int, int]

    @property
    def state_count(self) -> int:
        return len(self.ref_word) + 1

    @property
    def direct_edges(self) -> list[tuple[int, str, int]]:
        return [(i, s, i + 1) for i, s in enumerate(self.ref_word)]

    @property
    def external_edges(self) -> list[tuple[int, str, int]]:
        return sorted(
            (q, s, r) for (q, s), r in self.forward.items() if r != q + 1
        )

    def step(self, state: int, symbol: str) -> int | None:
        return self.forward.get((state, symbol))

    def accepts(self, word: Sequence[str]) -> bool:
        state: int | None = 0
        for sym in word:
            state = self.forward.get((state, sym))
            if state is None:
                return False
        return True


def build_factor_oracle(ref_word: Sequence[str], alphabet: Alphabet | None = None) -> FactorOracle:
    """Online construction: append states one symbol at a time.

    For each new symbol, walk suffix links back from the previous last state,
    adding an external edge wherever the symbol has no transition yet; the
    new state's link is the target found where the walk stops (0 if it falls
    off the initial state).
    """
    ref_word = tuple(ref_word)
    if not ref_word:
        raise ConfigurationError("reference word must be non-empty")
    if alphabet is None:
        alphabet = Alphabet(sorted(set(ref_word)))
    for sym in ref_word:
        if sym not in alphabet:
            raise ConfigurationError(f"symbol {sym!r} not in alphabet")
    forward: dict[tuple[int, str], int] = {}
    link: dict[int, int] = {0: -1}
    for i, sym in enumerate(ref_word):
        new = i + 1
        forward[(i, sym)] = new
        k = link[i]
        while k > -1 and (k, sym) not in forward:
            forward[(k, sym)] = new
            k = link[k]
        link[new] = 0 if k == -1 else forward[(k, sym)]
    del link[0]
    return FactorOracle(ref_word, alphabet, forward, link)


def oracle_as_nfa(f: FactorOracle, include_eps_links: bool = False) -> Nfa:
    """Every state accepting, initial state 0; suffix links become epsilon moves on request."""
    delta = {k: frozenset({v}) for k, v in f.forward.items()}
    eps = {q: frozenset({r}) for q, r in f.suffix_link.items()} if include_eps_links else {}
    states = range(f.state_count)
    return Nfa(f.alphabet, f.state_count, {0}, set(states), delta, eps)


def classify_transition(f: FactorOracle, state: int, symbol: str) -> TransitionKind:
    target = f.forward.get((state, symbol))
    if target is None:
        return TransitionKind.NONE
    return TransitionKind.DIRECT if target == state + 1 else TransitionKind.NONDIRECT


@dataclass(frozen=True)
class WindowSpec:
    """Bounds ``[low, high]`` on non-direct steps among the last ``k`` transitions."""

    k: int
    low: int
    high: int

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError("window length k must be at least 1")
        if not (0 <= self.low <= self.high <= self.k):
            raise ConfigurationError(
                f"need 0 <= l <= h <= k, got l={self.low} h={self.high} k={self.k}"
            )


def window_admissibility_dfa(f: FactorOracle, window: WindowSpec) -> Dfa:
    """DFA over (oracle state, last-k history bits) enforcing the window bound throughout.

    Each step follows the unique forward transition, shifts a 1 into the
    history for a non-direct step and a 0 for a direct one. The upper bound
    is checked after every step; the lower bound only once ``k`` transitions
    have been taken, which needs a fill counter when ``low > 0``. A step that
    breaks a bound has no transition, so acceptance at the end means the
    bound held at every point. Missing forward transitions reject.
    """
    k, low, high = window.k, window.low, window.high
    mask = (1 << k) - 1
    track_fill = low > 0

    start = (0, 0, 0)
    ids = {start: 0}
    queue = deque([start])
    delta = {}
    while queue:
        state = queue.popleft()
        q, hist, filled = state
        for sym in f.alphabet:
            r = f.forward.get((q, sym))
            if r is None:
                continue
            bit = 0 if r == q + 1 else 1
            new_hist = ((hist << 1) | bit) & mask
            new_filled = min(filled + 1, k) if track_fill else 0
            ones = bin(new_hist).count("1")
            if ones > high:
                continue
            if track_fill and new_filled == k and ones < low:
                continue
            nxt = (r, new_hist, new_filled)
            if nxt not in ids:
                ids[nxt] = len(ids)
                queue.append(nxt)
            delta[(ids[state], sym)] = ids[nxt]
    return Dfa(f.alphabet, len(ids), 0, set(ids.values()), delta)
