"""JSON interchange for automata and instances, and the text formats for words."""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .automata import Alphabet, Dfa, Nfa, Word
from .errors import ConfigurationError, UnsupportedAutomatonError
from .improvise import CIInstance, parse_rational
from .predicates import build_predicate_dfa

EMPTY_WORD = "<eps>"

_AUTOMATON_FIELDS = {"kind", "alphabet", "states", "initial", "accepting", "transitions", "epsilon"}
_INSTANCE_FIELDS = {"improv", "admiss", "epsilon", "rho"}


def format_word(word: Sequence[str]) -> str:
    return " ".join(word) if word else EMPTY_WORD


def parse_word(text: str) -> Word:
    text = text.strip()
    if text == EMPTY_WORD:
        return ()
    return tuple(text.split())


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def _int(value: Any, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigurationError(f"{what} must be an integer, got {value!r}")
    return value


def automaton_from_json(data: Mapping[str, Any]):
    """Build a Dfa, Nfa or symbolic automaton from its JSON object."""
    if not isinstance(data, Mapping):
        raise ConfigurationError("automaton must be a JSON object")
    kind = data.get("kind")
    if kind == "pfa":
        raise UnsupportedAutomatonError(
            "probabilistic automata are not supported: improvisation with a PFA "
            "improvisation automaton is undecidable in general"
        )
    if kind == "symbolic":
        from .symbolic.automaton import symbolic_from_json

        return symbolic_from_json(data)
    if kind not in ("dfa", "nfa"):
        raise ConfigurationError(f"unknown automaton kind {kind!r}")
    unknown = set(data) - _AUTOMATON_FIELDS
    if unknown:
        raise ConfigurationError(f"unknown automaton fields: {sorted(unknown)}")
    for key in ("alphabet", "states", "initial", "accepting", "transitions"):
        if key not in data:
            raise ConfigurationError(f"automaton is missing field {key!r}")
    if not isinstance(data["alphabet"], list):
        raise ConfigurationError("alphabet must be an array of strings")
    alphabet = Alphabet(data["alphabet"])
    states = _int(data["states"], "states")
    accepting = {_int(q, "accepting state") for q in data["accepting"]}
    edges = []
    for t in data["transitions"]:
        if not isinstance(t, Mapping) or set(t) != {"from", "symbol", "to"}:
            raise ConfigurationError(f"transition must have exactly from/symbol/to: {t!r}")
        edges.append((_int(t["from"], "from"), t["symbol"], _int(t["to"], "to")))
    eps_edges = []
    for t in data.get("epsilon", []):
        if not isinstance(t, Mapping) or set(t) != {"from", "to"}:
            raise ConfigurationError(f"epsilon edge must have exactly from/to: {t!r}")
        eps_edges.append((_int(t["from"], "from"), _int(t["to"], "to")))
    if kind == "dfa":
        if eps_edges:
            raise ConfigurationError("a DFA cannot have epsilon edges")
        delta: dict[tuple[int, str], int] = {}
        for q, s, r in edges:
            if (q, s) in delta and delta[(q, s)] != r:
                raise ConfigurationError(f"DFA has two transitions from {q} on {s!r}")
            delta[(q, s)] = r
        return Dfa(alphabet, states, _int(data["initial"], "initial"), accepting, delta)
    if not isinstance(data["initial"], list):
        raise ConfigurationError("NFA initial must be an array of states")
    ndelta: dict[tuple[int, str], set[int]] = {}
    for q, s, r in edges:
        ndelta.setdefault((q, s), set()).add(r)
    eps: dict[int, set[int]] = {}
    for q, r in eps_edges:
        eps.setdefault(q, set()).add(r)
    initial = {_int(q, "initial state") for q in data["initial"]}
    return Nfa(alphabet, states, initial, accepting, ndelta, eps)


def automaton_to_json(a) -> dict:
    from .symbolic.automaton import SymbolicAutomaton, symbolic_to_json

    if isinstance(a, SymbolicAutomaton):
        return symbolic_to_json(a)
    order = {s: i for i, s in enumerate(a.alphabet)}
    if isinstance(a, Dfa):
        trans = sorted(a.delta.items(), key=lambda kv: (kv[0][0], order[kv[0][1]]))
        return {
            "kind": "dfa",
            "alphabet": list(a.alphabet),
            "states": a.state_count,
            "initial": a.initial,
            "accepting": sorted(a.accepting),
            "transitions": [{"from": q, "symbol": s, "to": r} for (q, s), r in trans],
        }
    trans = sorted(
        ((q, s, r) for (q, s), rs in a.delta.items() for r in rs),
        key=lambda t: (t[0], order[t[1]], t[2]),
    )
    out = {
        "kind": "nfa",
        "alphabet": list(a.alphabet),
        "states": a.state_count,
        "initial": sorted(a.initial_set),
        "accepting": sorted(a.accepting),
        "transitions": [{"from": q, "symbol": s, "to": r} for q, s, r in trans],
    }
    if a.eps:
        out["epsilon"] = [{"from": q, "to": r} for q in sorted(a.eps) for r in sorted(a.eps[q])]
    return out


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON: {exc}") from None
    except OSError as exc:
        raise ConfigurationError(f"{path}: {exc.strerror}") from None


def load_automaton(path: str):
    return automaton_from_json(read_json(path))


def _resolve(value: Any, base_dir: str):
    if isinstance(value, str):
        return load_automaton(os.path.join(base_dir, value))
    return automaton_from_json(value)


def instance_from_json(data: Mapping[str, Any], base_dir: str = ".") -> CIInstance:
    """``improv`` and ``admiss`` may be inline objects or paths relative to ``base_dir``.

    ``admiss`` may also be a builtin predicate call such as
    ``"hamming_leq(0 0 1, 1)"``, built as a DFA over the improvisation alphabet.
    """
    if not isinstance(data, Mapping):
        raise ConfigurationError("instance must be a JSON object")
    unknown = set(data) - _INSTANCE_FIELDS
    if unknown:
        raise ConfigurationError(f"unknown instance fields: {sorted(unknown)}")
    missing = _INSTANCE_FIELDS - set(data)
    if missing:
        raise ConfigurationError(f"instance is missing fields: {sorted(missing)}")
    for key in ("epsilon", "rho"):
        if not isinstance(data[key], str):
            raise ConfigurationError(f"{key} must be a 'p/q' string")
    improv = _resolve(data["improv"], base_dir)
    admiss_raw = data["admiss"]
    if isinstance(admiss_raw, str) and "(" in admiss_raw:
        if not isinstance(improv, (Dfa, Nfa)):
            raise ConfigurationError("builtin predicates need an explicit improvisation automaton")
        admiss = build_predicate_dfa(admiss_raw, improv.alphabet)
    else:
        admiss = _resolve(admiss_raw, base_dir)
    return CIInstance(improv, admiss, parse_rational(data["epsilon"]), parse_rational(data["rho"]))


def load_instance(path: str) -> CIInstance:
    return instance_from_json(read_json(path), os.path.dirname(os.path.abspath(path)))


def instance_to_json(inst: CIInstance) -> dict:
    return {
        "improv": automaton_to_json(inst.improv),
        "admiss": automaton_to_json(inst.admiss),
        "epsilon": format_rational(inst.epsilon),
        "rho": format_rational(inst.rho),
    }
