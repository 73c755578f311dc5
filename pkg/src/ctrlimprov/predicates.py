"""Builtin admissibility predicates, each available as a DFA and as a black box."""

from __future__ import annotations

import re
from typing import Callable, Sequence

from .automata import Alphabet, Dfa
from .errors import ConfigurationError
from .factor_oracle import WindowSpec, build_factor_oracle, window_admissibility_dfa
from .improvise import ComputablePredicate


def hamming_dfa(reference: Sequence[str], d: int, alphabet: Alphabet) -> Dfa:
    """Words of the same length as ``reference`` differing in at most ``d`` positions.

    State ``pos * (d + 1) + dist`` has read ``pos`` symbols with ``dist``
    mismatches so far.
    """
    ref = tuple(reference)
    if d < 0:
        raise ConfigurationError("distance bound must be non-negative")
    for s in ref:
        if s not in alphabet:
            raise ConfigurationError(f"reference symbol {s!r} not in alphabet")
    width = d + 1
    delta = {}
    for pos, want in enumerate(ref):
        for dist in range(width):
            for sym in alphabet:
                nd = dist + (sym != want)
                if nd <= d:
                    delta[(pos * width + dist, sym)] = (pos + 1) * width + nd
    n = len(ref)
    accepting = {n * width + k for k in range(width)}
    return Dfa(alphabet, (n + 1) * width, 0, accepting, delta)


def hamming_predicate(reference: Sequence[str], d: int) -> ComputablePredicate:
    ref = tuple(reference)

    def fn(w):
        return len(w) == len(ref) and sum(a != b for a, b in zip(w, ref)) <= d

    return ComputablePredicate(f"hamming_leq({' '.join(ref)}, {d})", fn)


def factor_window_dfa(reference: Sequence[str], k: int, low: int, high: int, alphabet: Alphabet) -> Dfa:
    oracle = build_factor_oracle(reference, alphabet)
    return window_admissibility_dfa(oracle, WindowSpec(k, low, high))


def factor_window_predicate(reference: Sequence[str], k: int, low: int, high: int, alphabet: Alphabet) -> ComputablePredicate:
    d = factor_window_dfa(reference, k, low, high, alphabet)
    return ComputablePredicate(f"factor_window({' '.join(reference)}, {k}, {low}, {high})", d.accepts)


def _word_arg(text: str) -> tuple[str, ...]:
    text = text.strip()
    return tuple(text.split()) if " " in text else tuple(text)


def _int_arg(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigurationError(f"expected an integer argument, got {text!r}") from None


_BUILDERS: dict[str, tuple[int, Callable]] = {
    "hamming_leq": (2, lambda args, alpha: hamming_dfa(_word_arg(args[0]), _int_arg(args[1]), alpha)),
    "factor_window": (
        4,
        lambda args, alpha: factor_window_dfa(
            _word_arg(args[0]), _int_arg(args[1]), _int_arg(args[2]), _int_arg(args[3]), alpha
        ),
    ),
}

_CALL = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$", re.S)


def builtin_names() -> list[str]:
    return sorted(_BUILDERS)


def build_predicate_dfa(spec: str, alphabet: Alphabet) -> Dfa:
    """Parse ``name(arg, ...)`` and build the DFA; words may be space-separated labels or a compact string."""
    m = _CALL.match(spec)
    if not m:
        raise ConfigurationError(f"cannot parse builtin predicate {spec!r}")
    name, raw = m.group(1), m.group(2)
    if name not in _BUILDERS:
        raise ConfigurationError(f"unknown builtin predicate {name!r}; known: {builtin_names()}")
    arity, build = _BUILDERS[name]
    args = [a.strip() for a in raw.split(",")]
    if len(args) != arity:
        raise ConfigurationError(f"{name} takes {arity} arguments, got {len(args)}")
    return build(args, alphabet)
