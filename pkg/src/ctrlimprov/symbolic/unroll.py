"""Bounded unrolling of symbolic automata and the queries built on it.

Every query here is a CNF handed to a :class:`SolverOracle`: bounded word
enumeration, membership, simple-path search for the diameter, lasso search
for infinite languages, and a determinism check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..automata import Word
from ..errors import ConfigurationError, ResourceLimitError
from ..sat.cnf import CnfBuilder, CnfFormula
from ..sat.formula import Formula
from ..sat.solver import SolverOracle, Status
from .automaton import SymbolicAutomaton


class _Encoder:
    """Allocates variable blocks and asserts the automaton's formulas over them."""

    def __init__(self, s: SymbolicAutomaton):
        self.s = s
        self.b = CnfBuilder()
        self.valid = s.valid_input()

    def block(self, width: int) -> list[int]:
        return [self.b.new_var() for _ in range(width)]

    def states(self) -> list[int]:
        return self.block(self.s.state_bits)

    def inputs(self) -> list[int]:
        return self.block(self.s.input_bits)

    @staticmethod
    def env(x: Sequence[int] = (), a: Sequence[int] = (), y: Sequence[int] = ()) -> dict[str, int]:
        out = {f"x{i}": v for i, v in enumerate(x)}
        out.update((f"a{i}", v) for i, v in enumerate(a))
        out.update((f"y{i}", v) for i, v in enumerate(y))
        return out

    def require(self, f: Formula, env: dict[str, int], cond: int | None = None) -> None:
        if cond is None:
            self.b.assert_formula(f, env)
        else:
            self.b.add_clause((-cond, self.b.literal(f, env)))

    def init(self, x: Sequence[int]) -> None:
        self.require(self.s.init, self.env(x=x))

    def accepting(self, x: Sequence[int], cond: int | None = None) -> None:
        self.require(self.s.acc, self.env(x=x), cond)

    def step(self, x: Sequence[int], a: Sequence[int], y: Sequence[int], cond: int | None = None) -> None:
        self.require(self.s.delta, self.env(x, a, y), cond)
        self.require(self.valid, self.env(a=a), cond)

    def equal(self, p: Sequence[int], q: Sequence[int], cond: int | None = None) -> None:
        guard = () if cond is None else (-cond,)
        for u, v in zip(p, q):
            self.b.add_clause((*guard, -u, v))
            self.b.add_clause((*guard, u, -v))

    def zero(self, a: Sequence[int], cond: int | None = None) -> None:
        guard = () if cond is None else (-cond,)
        for v in a:
            self.b.add_clause((*guard, -v))

    def fix(self, a: Sequence[int], bits: Sequence[bool]) -> None:
        for v, bit in zip(a, bits):
            self.b.add_clause((v if bit else -v,))

    def distinct(self, p: Sequence[int], q: Sequence[int]) -> None:
        self.b.add_clause(tuple(self.b.gate_xor(u, v) for u, v in zip(p, q)))

    def flex_path(self, start: list[int], length: int) -> tuple[list[int], list[list[int]], list[int]]:
        """Up to ``length`` steps; step ``i`` is taken iff ``act[i]``, and taken steps come first.

        Idle steps copy the state and zero their inputs. Returns the end
        block, the input blocks and the activity literals.
        """
        cur = start
        blocks, acts = [], []
        for i in range(length):
            act = self.b.new_var()
            if acts:
                self.b.add_clause((-act, acts[-1]))
            a, nxt = self.inputs(), self.states()
            self.step(cur, a, nxt, act)
            self.equal(cur, nxt, -act)
            self.zero(a, -act)
            blocks.append(a)
            acts.append(act)
            cur = nxt
        return cur, blocks, acts

    def decode(self, model: Sequence[bool], blocks: Sequence[Sequence[int]]) -> Word:
        out = []
        for a in blocks:
            sym = self.s.decode_bits([model[v] for v in a])
            if sym is None:
                raise AssertionError("model decodes an invalid input pattern")
            out.append(sym)
        return tuple(out)


@dataclass(frozen=True)
class UnrolledFormula:
    """Projected models are the accepted words of length at most ``length``.

    Projection order: all input bits step by step, then the one-hot length
    selectors ``l_0..l_length``.
    """

    automaton: SymbolicAutomaton
    length: int
    cnf: CnfFormula
    input_blocks: tuple[tuple[int, ...], ...]
    selectors: tuple[int, ...]

    def decode_projection(self, bits: Sequence[bool]) -> Word:
        m = self.automaton.input_bits
        sel = bits[m * self.length:]
        ell = list(sel).index(True)
        out = []
        for i in range(ell):
            sym = self.automaton.decode_bits(bits[i * m:(i + 1) * m])
            if sym is None:
                raise AssertionError("projected model decodes an invalid input pattern")
            out.append(sym)
        return tuple(out)

    def decode_model(self, model: Sequence[bool]) -> Word:
        return self.decode_projection(self.cnf.project(model))

    def encode_word(self, word: Sequence[str]) -> tuple[bool, ...]:
        """Projection bits of ``word``; inverse of :meth:`decode_projection`."""
        if len(word) > self.length:
            raise ValueError("word longer than the unrolling")
        m = self.automaton.input_bits
        bits: list[bool] = []
        for sym in word:
            enc = self.automaton.encode_symbol(sym)
            if enc is None:
                raise ValueError(f"symbol {sym!r} has no input encoding")
            bits.extend(enc)
        bits.extend([False] * (m * (self.length - len(word))))
        bits.extend(i == len(word) for i in range(self.length + 1))
        return tuple(bits)


def unroll(s: SymbolicAutomaton, n: int) -> UnrolledFormula:
    """init(x_0), one-hot l, step i constrained when i < l, acc(x_l), zero inputs past l."""
    if n < 0:
        raise ConfigurationError("unrolling depth must be non-negative")
    e = _Encoder(s)
    xs = [e.states() for _ in range(n + 1)]
    inputs = [e.inputs() for _ in range(n)]
    sel = e.block(n + 1)
    e.init(xs[0])
    e.b.exactly_one(sel)
    # active[i] <-> some l_j with j > i
    active = [None] * n
    for i in range(n - 1, -1, -1):
        if i == n - 1:
            active[i] = sel[n]
        else:
            active[i] = -e.b.gate_and([-active[i + 1], -sel[i + 1]])
    for i in range(n):
        e.step(xs[i], inputs[i], xs[i + 1], active[i])
        e.zero(inputs[i], -active[i])
    for j in range(n + 1):
        e.accepting(xs[j], sel[j])
    projection = [v for a in inputs for v in a] + sel
    return UnrolledFormula(
        s, n, e.b.build(projection), tuple(tuple(a) for a in inputs), tuple(sel)
    )


def _sat(oracle: SolverOracle, cnf: CnfFormula, what: str):
    result = oracle.solve(cnf)
    if result.status is Status.UNKNOWN:
        raise ResourceLimitError(f"solver gave up on the {what} query")
    return result


def symbolic_accepts(s: SymbolicAutomaton, word: Sequence[str], oracle: SolverOracle) -> bool:
    """Membership by one query with the input bits fixed to the word's encoding."""
    encoded = [s.encode_symbol(sym) for sym in word]
    if any(bits is None for bits in encoded):
        return False
    e = _Encoder(s)
    cur = e.states()
    e.init(cur)
    for bits in encoded:
        a, nxt = e.inputs(), e.states()
        e.fix(a, bits)
        e.step(cur, a, nxt)
        cur = nxt
    e.accepting(cur)
    return _sat(oracle, e.b.build(()), "membership").is_sat


def enumerate_words_symbolic(
    s: SymbolicAutomaton, oracle: SolverOracle, max_len: int, cap: int
) -> list[Word]:
    """Accepted words of length at most ``max_len`` (at most ``cap`` of them), in length-lex order."""
    u = unroll(s, max_len)
    models = oracle.enumerate_projected(u.cnf, cap)
    alphabet = s.alphabet
    words = [u.decode_projection(m) for m in models]
    return sorted(words, key=lambda w: (len(w), [alphabet.index(c) for c in w]))


# -- diameter ---------------------------------------------------------------


@dataclass(frozen=True)
class DiameterResult:
    """``D`` is the longest simple accepting path.

    ``reach`` is the longest simple path from an initial state, accepting or
    not, and bounds the cycle length needed by the lasso query. For a
    user-supplied bound both fields hold the supplied value.
    """

    D: int
    method: str
    reach: int
    unsat_at: int | None = None

    @property
    def cycle_bound(self) -> int:
        return max(self.D, self.reach + 1)


def _simple_path_query(s: SymbolicAutomaton, n: int, accepting: bool) -> CnfFormula:
    e = _Encoder(s)
    xs = [e.states() for _ in range(n + 1)]
    e.init(xs[0])
    for i in range(n):
        e.step(xs[i], e.inputs(), xs[i + 1])
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            e.distinct(xs[i], xs[j])
    if accepting:
        e.accepting(xs[n])
    return e.b.build(())


def diameter(s: SymbolicAutomaton, oracle: SolverOracle, cap: int = 64) -> DiameterResult:
    """Search n = 0, 1, ... for simple paths of exactly n steps from an initial state.

    Existence of any simple path of length n is monotone in n, so the search
    stops at the first n with none; ``D`` is the largest n seen with a simple
    accepting path. Exceeding ``cap`` raises :class:`ResourceLimitError`.
    """
    if cap < 1:
        raise ConfigurationError("diameter cap must be at least 1")
    best = 0
    n = 0
    while True:
        if n > cap:
            raise ResourceLimitError(f"simple paths longer than the diameter cap {cap}")
        if _sat(oracle, _simple_path_query(s, n, True), "diameter").is_sat:
            best = n
        elif not _sat(oracle, _simple_path_query(s, n, False), "diameter").is_sat:
            return DiameterResult(best, "exhausted-search", max(n - 1, 0), n)
        n += 1


def user_diameter(bound: int) -> DiameterResult:
    """A caller-supplied bound on every simple path from the initial states."""
    if bound < 0:
        raise ConfigurationError("diameter bound must be non-negative")
    return DiameterResult(bound, "user-supplied", bound)


def _as_diameter(D: DiameterResult | int) -> DiameterResult:
    return D if isinstance(D, DiameterResult) else user_diameter(D)


# -- lassos -----------------------------------------------------------------


def find_lasso(
    s: SymbolicAutomaton, oracle: SolverOracle, D: DiameterResult | int
) -> tuple[Word, Word, Word] | None:
    """Words x, y, z with |y| >= 1 and x y^i z accepted for every i, or None.

    Bounds: |x|, |z| <= D and |y| <= ``cycle_bound``. Take a state s on an
    accepting cycle that is nearest to the initial states; the shortest x
    reaching it and shortest z leaving it form a simple accepting path, and
    a simple cycle through s extends x to a simple path from an initial
    state, so these bounds always suffice.
    """
    d = _as_diameter(D)
    if d.cycle_bound < 1:
        return None
    e = _Encoder(s)
    x0 = e.states()
    e.init(x0)
    mid, xb, xact = e.flex_path(x0, d.D)
    back, yb, yact = e.flex_path(mid, d.cycle_bound)
    e.b.add_clause((yact[0],))
    e.equal(back, mid)
    end, zb, zact = e.flex_path(mid, d.D)
    e.accepting(end)
    result = _sat(oracle, e.b.build(()), "lasso")
    if not result.is_sat:
        return None
    model = result.model

    def taken(blocks, acts):
        return e.decode(model, [a for a, act in zip(blocks, acts) if model[act]])

    return taken(xb, xact), taken(yb, yact), taken(zb, zact)


def symbolic_is_infinite(s: SymbolicAutomaton, oracle: SolverOracle, D: DiameterResult | int) -> bool:
    """One lasso query at the diameter bounds."""
    return find_lasso(s, oracle, D) is not None


def is_deterministic(s: SymbolicAutomaton, oracle: SolverOracle) -> bool:
    """No two initial states and no state/input pair with two successors.

    Checked over all state vectors, reachable or not, so the answer may be
    conservatively False.
    """
    e = _Encoder(s)
    p, q = e.states(), e.states()
    if not p:
        return True
    e.init(p)
    e.init(q)
    e.distinct(p, q)
    if _sat(oracle, e.b.build(()), "determinism").is_sat:
        return False
    e = _Encoder(s)
    x, a, y1, y2 = e.states(), e.inputs(), e.states(), e.states()
    e.step(x, a, y1)
    e.step(x, a, y2)
    e.distinct(y1, y2)
    return not _sat(oracle, e.b.build(()), "determinism").is_sat
