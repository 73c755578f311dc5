"""Bit-vector automata given by ``init``, ``acc`` and ``delta`` formulas.

States are vectors over ``x0..x{n-1}``, inputs over ``a0..a{m-1}`` and
successor states over ``y0..y{n-1}``. An input pattern is written as a
string of ``0``/``1`` characters where character ``i`` is the value of
``a{i}``. Acceptance follows NFA semantics: a word is accepted if some run
from a state satisfying ``init`` reaches one satisfying ``acc``.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Sequence

from ..automata import Alphabet, Dfa, Nfa
from ..errors import ConfigurationError
from ..sat.formula import (
    FALSE,
    TRUE,
    And,
    Const,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Var,
    Xor,
    and_,
    bits_equal,
    not_,
    or_,
    xor,
)

_VAR_RE = re.compile(r"^([xay])(\d+)$")


def _bits_of(value: int, width: int) -> tuple[bool, ...]:
    return tuple(bool((value >> i) & 1) for i in range(width))


def _pattern(bits: Sequence[bool]) -> str:
    return "".join("1" if b else "0" for b in bits)


def _names(prefix: str, width: int) -> list[str]:
    return [f"{prefix}{i}" for i in range(width)]


@dataclass(frozen=True)
class SymbolicAutomaton:
    """``symbol_decode`` maps input patterns to labels; unlisted patterns are invalid.

    With ``symbol_decode=None`` every pattern is a valid input and is its own
    label.
    """

    state_bits: int
    input_bits: int
    init: Formula
    acc: Formula
    delta: Formula
    symbol_decode: Mapping[str, str] | None = None
    _encode: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n, m = self.state_bits, self.input_bits
        if n < 0 or m < 0:
            raise ConfigurationError("bit widths must be non-negative")
        _check_vars(self.init, {"x": n}, "init")
        _check_vars(self.acc, {"x": n}, "acc")
        _check_vars(self.delta, {"x": n, "a": m, "y": n}, "delta")
        enc: dict[str, tuple[bool, ...]] = {}
        if self.symbol_decode is not None:
            for pat, label in self.symbol_decode.items():
                if len(pat) != m or set(pat) - {"0", "1"}:
                    raise ConfigurationError(f"bad input pattern {pat!r} for {m} input bits")
                if not label:
                    raise ConfigurationError("symbol labels must be non-empty")
                if label in enc:
                    raise ConfigurationError(f"label {label!r} decoded from two patterns")
                enc[label] = tuple(c == "1" for c in pat)
        object.__setattr__(self, "_encode", enc)

    # -- inputs -------------------------------------------------------------

    @property
    def all_inputs_valid(self) -> bool:
        return self.symbol_decode is None or len(self.symbol_decode) == 2**self.input_bits

    def labels(self) -> Iterator[str]:
        if self.symbol_decode is not None:
            yield from self.symbol_decode.values()
        else:
            for v in range(2**self.input_bits):
                yield _pattern(_bits_of(v, self.input_bits))

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(list(self.labels()))

    def encode_symbol(self, label: str) -> tuple[bool, ...] | None:
        if self.symbol_decode is None:
            if len(label) == self.input_bits and not set(label) - {"0", "1"}:
                return tuple(c == "1" for c in label)
            return None
        return self._encode.get(label)

    def decode_bits(self, bits: Sequence[bool]) -> str | None:
        pat = _pattern(bits)
        if self.symbol_decode is None:
            return pat
        return self.symbol_decode.get(pat)

    def valid_input(self) -> Formula:
        """Formula over ``a0..`` true exactly on valid input patterns."""
        if self.all_inputs_valid:
            return TRUE
        names = _names("a", self.input_bits)
        return or_(*(bits_equal(names, [c == "1" for c in pat]) for pat in self.symbol_decode))

    # -- explicit view ------------------------------------------------------

    def to_nfa(self, max_bits: int = 12) -> Nfa:
        """Explicit NFA by truth-table evaluation; only for small bit widths."""
        n, m = self.state_bits, self.input_bits
        if 2 * n + m > max_bits:
            raise ConfigurationError(f"{2 * n + m} bits exceed the explicit limit {max_bits}")
        xs, as_, ys = _names("x", n), _names("a", m), _names("y", n)
        alphabet = self.alphabet
        states = range(2**n)
        init = {q for q in states if self.init.evaluate(dict(zip(xs, _bits_of(q, n))))}
        acc = {q for q in states if self.acc.evaluate(dict(zip(xs, _bits_of(q, n))))}
        delta: dict[tuple[int, str], set[int]] = {}
        for sym in alphabet:
            abits = self.encode_symbol(sym)
            for q, r in itertools.product(states, states):
                env = dict(zip(xs, _bits_of(q, n)))
                env.update(zip(as_, abits))
                env.update(zip(ys, _bits_of(r, n)))
                if self.delta.evaluate(env):
                    delta.setdefault((q, sym), set()).add(r)
        return Nfa(alphabet, 2**n, init, acc, {k: frozenset(v) for k, v in delta.items()})


def _check_vars(f: Formula, widths: Mapping[str, int], what: str) -> None:
    for name in f.variables():
        m = _VAR_RE.match(name)
        if not m or m.group(1) not in widths or int(m.group(2)) >= widths[m.group(1)]:
            raise ConfigurationError(f"{what} refers to undeclared variable {name!r}")


def encode_dfa(d: Dfa) -> SymbolicAutomaton:
    """Binary encoding of an explicit DFA: state ``q`` and symbol index ``k`` in little-endian bits."""
    n = max(0, (d.state_count - 1).bit_length())
    m = max(0, (len(d.alphabet) - 1).bit_length())
    xs, as_, ys = _names("x", n), _names("a", m), _names("y", n)
    sym_bits = {s: _bits_of(k, m) for k, s in enumerate(d.alphabet)}
    init = bits_equal(xs, _bits_of(d.initial, n))
    acc = or_(*(bits_equal(xs, _bits_of(q, n)) for q in sorted(d.accepting)))
    cubes = [
        and_(bits_equal(xs, _bits_of(q, n)), bits_equal(as_, sym_bits[s]), bits_equal(ys, _bits_of(r, n)))
        for (q, s), r in sorted(d.delta.items(), key=lambda kv: (kv[0][0], d.alphabet.index(kv[0][1])))
    ]
    decode = {_pattern(b): s for s, b in sym_bits.items()}
    return SymbolicAutomaton(n, m, init, acc, or_(*cubes), decode)


def _shift_states(f: Formula, offset: int) -> Formula:
    def lookup(name: str) -> Formula:
        m = _VAR_RE.match(name)
        if m and m.group(1) in "xy":
            return Var(f"{m.group(1)}{int(m.group(2)) + offset}")
        return Var(name)

    return f.substitute(lookup)


def _require_same_inputs(a: SymbolicAutomaton, b: SymbolicAutomaton) -> None:
    if a.input_bits != b.input_bits or dict(a.symbol_decode or {}) != dict(b.symbol_decode or {}) or (
        (a.symbol_decode is None) != (b.symbol_decode is None)
    ):
        raise ConfigurationError("symbolic automata must share one input encoding")


def symbolic_product(a: SymbolicAutomaton, b: SymbolicAutomaton, negate_b_acc: bool = False) -> SymbolicAutomaton:
    """Synchronous product on the concatenated state vector.

    With ``negate_b_acc`` the product accepts when ``a`` accepts and ``b``'s
    component does not. Its language is then a subset of ``L(a) \\ L(b)``
    provided ``b`` is deterministic; callers check that separately.
    """
    _require_same_inputs(a, b)
    k = a.state_bits
    b_acc = _shift_states(b.acc, k)
    return SymbolicAutomaton(
        a.state_bits + b.state_bits,
        a.input_bits,
        and_(a.init, _shift_states(b.init, k)),
        and_(a.acc, not_(b_acc) if negate_b_acc else b_acc),
        and_(a.delta, _shift_states(b.delta, k)),
        a.symbol_decode,
    )


# -- prefix expression syntax ------------------------------------------------

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")
_OPS = {"not": 1, "and": None, "or": None, "xor": None}


def parse_expr(text: str) -> Formula:
    """Parse ``true``, ``false``, a variable, or ``(op arg ...)`` with op in not/and/or/xor."""
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != re.sub(r"\s+", "", text):
        raise ConfigurationError(f"cannot tokenize expression {text!r}")
    pos = 0

    def parse() -> Formula:
        nonlocal pos
        if pos >= len(tokens):
            raise ConfigurationError("unexpected end of expression")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens):
                raise ConfigurationError("unexpected end of expression")
            op = tokens[pos]
            pos += 1
            if op not in _OPS:
                raise ConfigurationError(f"unknown operator {op!r}")
            args = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(parse())
            if pos >= len(tokens):
                raise ConfigurationError("missing ')'")
            pos += 1
            if op == "not":
                if len(args) != 1:
                    raise ConfigurationError("'not' takes exactly one argument")
                return not_(args[0])
            return {"and": and_, "or": or_, "xor": xor}[op](*args)
        if tok == ")":
            raise ConfigurationError("unexpected ')'")
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if not _VAR_RE.match(tok):
            raise ConfigurationError(f"bad variable name {tok!r}")
        return Var(tok)

    f = parse()
    if pos != len(tokens):
        raise ConfigurationError("trailing tokens after expression")
    return f


def format_expr(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return f"(not {format_expr(f.arg)})"
    if isinstance(f, (And, Or, Xor)):
        op = {And: "and", Or: "or", Xor: "xor"}[type(f)]
        return f"({op} " + " ".join(format_expr(a) for a in f.args) + ")"
    if isinstance(f, Implies):
        return format_expr(or_(not_(f.lhs), f.rhs))
    if isinstance(f, Iff):
        return format_expr(not_(xor(f.lhs, f.rhs)))
    raise TypeError(f"not a formula: {f!r}")


_FIELDS = {"kind", "state_bits", "input_bits", "init", "acc", "delta", "symbol_decode"}


def symbolic_from_json(data: Mapping[str, Any]) -> SymbolicAutomaton:
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigurationError(f"unknown fields in symbolic automaton: {sorted(unknown)}")
    if data.get("kind", "symbolic") != "symbolic":
        raise ConfigurationError("symbolic automaton must have kind 'symbolic'")
    try:
        n = data["state_bits"]
        m = data["input_bits"]
        exprs = {k: data[k] for k in ("init", "acc", "delta")}
    except KeyError as exc:
        raise ConfigurationError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(n, int) or not isinstance(m, int) or isinstance(n, bool) or isinstance(m, bool):
        raise ConfigurationError("state_bits and input_bits must be integers")
    decode = None
    if data.get("symbol_decode") is not None:
        raw = data["symbol_decode"]
        if isinstance(raw, list):
            decode = {}
            for item in raw:
                if not isinstance(item, list) or len(item) != 2:
                    raise ConfigurationError("symbol_decode entries must be [pattern, label]")
                if item[0] in decode:
                    raise ConfigurationError(f"pattern {item[0]!r} listed twice")
                decode[item[0]] = item[1]
        elif isinstance(raw, dict):
            decode = dict(raw)
        else:
            raise ConfigurationError("symbol_decode must be a list of [pattern, label] pairs")
    return SymbolicAutomaton(
        n, m, parse_expr(exprs["init"]), parse_expr(exprs["acc"]), parse_expr(exprs["delta"]), decode
    )


def symbolic_to_json(s: SymbolicAutomaton) -> dict:
    out: dict[str, Any] = {
        "kind": "symbolic",
        "state_bits": s.state_bits,
        "input_bits": s.input_bits,
        "init": format_expr(s.init),
        "acc": format_expr(s.acc),
        "delta": format_expr(s.delta),
    }
    if s.symbol_decode is not None:
        out["symbol_decode"] = [[p, l] for p, l in s.symbol_decode.items()]
    return out


def load_symbolic(path: str) -> SymbolicAutomaton:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON: {exc}") from None
    return symbolic_from_json(data)
