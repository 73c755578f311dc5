"""Clause-form formulas: Tseitin conversion, parity constraints, DIMACS."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .formula import And, Const, Formula, Iff, Implies, Not, Or, Var, Xor

Clause = tuple[int, ...]


@dataclass(frozen=True)
class CnfFormula:
    """Clauses over variables ``1..num_vars`` with a designated projection set.

    ``names`` optionally maps formula variable names to their CNF variables.
    """

    num_vars: int
    clauses: tuple[Clause, ...]
    projection: tuple[int, ...]
    names: Mapping[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")
        for v in self.projection:
            if not 1 <= v <= self.num_vars:
                raise ValueError(f"projection variable {v} out of range")

    @property
    def is_trivially_false(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)

    def satisfied_by(self, model: Sequence[bool]) -> bool:
        """``model[v]`` is the value of variable ``v`` (index 0 unused)."""
        true = {v if model[v] else -v for v in range(1, self.num_vars + 1)}
        return not any(map(true.isdisjoint, self.clauses))

    def project(self, model: Sequence[bool]) -> tuple[bool, ...]:
        return tuple(bool(model[v]) for v in self.projection)

    def with_clauses(self, extra: Iterable[Clause], num_vars: int | None = None) -> "CnfFormula":
        return CnfFormula(
            self.num_vars if num_vars is None else num_vars,
            self.clauses + tuple(tuple(c) for c in extra),
            self.projection,
            self.names,
        )


class CnfBuilder:
    """Incremental Tseitin encoder.

    ``literal(f)`` returns a literal equivalent to ``f``; definition variables
    are constrained in both directions, so every model of the original
    variables extends to exactly one model of the clauses.
    """

    def __init__(self):
        self.num_vars = 0
        self.clauses: list[Clause] = []
        self.names: dict[str, int] = {}
        self._cache: dict[Formula, int] = {}
        self._true: int | None = None

    def new_var(self, name: str | None = None) -> int:
        self.num_vars += 1
        if name is not None:
            if name in self.names:
                raise ValueError(f"variable {name!r} already defined")
            self.names[name] = self.num_vars
        return self.num_vars

    def named(self, name: str) -> int:
        v = self.names.get(name)
        return self.new_var(name) if v is None else v

    def add_clause(self, lits: Iterable[int]) -> None:
        self.clauses.append(tuple(lits))

    def true_lit(self) -> int:
        if self._true is None:
            self._true = self.new_var()
            self.add_clause((self._true,))
        return self._true

    def literal(self, f: Formula, env: Mapping[str, int] | None = None) -> int:
        """Literal for ``f``; variables resolve through ``env`` then by name.

        Without an ``env``, gates are shared across calls; with one, sharing
        is limited to the current call.
        """
        if env:
            return self._lit(f, env, {})
        return self._lit(f, {}, self._cache)

    def _lit(self, f: Formula, env: Mapping[str, int], memo: dict) -> int:
        if isinstance(f, Var):
            lit = env.get(f.name)
            return lit if lit is not None else self.named(f.name)
        if isinstance(f, Const):
            t = self.true_lit()
            return t if f.value else -t
        if isinstance(f, Not):
            return -self._lit(f.arg, env, memo)
        cached = memo.get(f)
        if cached is not None:
            return cached
        if isinstance(f, And):
            out = self.gate_and([self._lit(a, env, memo) for a in f.args])
        elif isinstance(f, Or):
            out = -self.gate_and([-self._lit(a, env, memo) for a in f.args])
        elif isinstance(f, Xor):
            lits = [self._lit(a, env, memo) for a in f.args]
            out = lits[0]
            for l in lits[1:]:
                out = self.gate_xor(out, l)
        elif isinstance(f, Implies):
            out = -self.gate_and([self._lit(f.lhs, env, memo), -self._lit(f.rhs, env, memo)])
        elif isinstance(f, Iff):
            out = -self.gate_xor(self._lit(f.lhs, env, memo), self._lit(f.rhs, env, memo))
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[f] = out
        return out

    def gate_and(self, lits: Sequence[int]) -> int:
        if len(lits) == 1:
            return lits[0]
        g = self.new_var()
        for l in lits:
            self.add_clause((-g, l))
        self.add_clause((g, *(-l for l in lits)))
        return g

    def gate_xor(self, a: int, b: int) -> int:
        g = self.new_var()
        self.add_clause((-g, a, b))
        self.add_clause((-g, -a, -b))
        self.add_clause((g, -a, b))
        self.add_clause((g, a, -b))
        return g

    def assert_formula(self, f: Formula, env: Mapping[str, int] | None = None) -> None:
        """Add ``f`` as a hard constraint, splitting top-level conjunctions."""
        if isinstance(f, And):
            for a in f.args:
                self.assert_formula(a, env)
        elif isinstance(f, Or):
            self.add_clause(self.literal(a, env) for a in f.args)
        elif isinstance(f, Const):
            if not f.value:
                self.add_clause(())
        else:
            self.add_clause((self.literal(f, env),))

    def assert_equal(self, a: int, b: int) -> None:
        self.add_clause((-a, b))
        self.add_clause((a, -b))

    def exactly_one(self, lits: Sequence[int]) -> None:
        self.add_clause(lits)
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                self.add_clause((-lits[i], -lits[j]))

    def build(self, projection: Iterable[int]) -> CnfFormula:
        if any(len(c) == 0 for c in self.clauses):
            return CnfFormula(self.num_vars, ((),), tuple(projection), dict(self.names))
        return CnfFormula(self.num_vars, tuple(self.clauses), tuple(projection), dict(self.names))


def to_cnf(f: Formula, projection_vars: Iterable[str] | None = None) -> CnfFormula:
    """Equisatisfiable CNF whose models, restricted to ``f``'s variables, are exactly ``f``'s models.

    Projection variables (default: all variables of ``f``, sorted) are
    numbered first, densely, in the given order.
    """
    names = sorted(f.variables()) if projection_vars is None else list(projection_vars)
    b = CnfBuilder()
    for n in names:
        b.named(n)
    for n in sorted(f.variables()):
        b.named(n)
    b.assert_formula(f)
    return b.build(b.names[n] for n in names)


def xor_clauses(vars_: Sequence[int], parity: bool, next_var: int) -> tuple[list[Clause], int]:
    """CNF for ``XOR(vars_) == parity`` via a chain of 3-literal definitions.

    Returns the clauses and the new variable count.
    """
    if not vars_:
        return ([()] if parity else []), next_var
    if len(vars_) == 1:
        return [(vars_[0] if parity else -vars_[0],)], next_var
    clauses: list[Clause] = []
    acc = vars_[0]
    for v in vars_[1:]:
        next_var += 1
        g = next_var
        clauses += [(-g, acc, v), (-g, -acc, -v), (g, -acc, v), (g, acc, -v)]
        acc = g
    clauses.append((acc,) if parity else (-acc,))
    return clauses, next_var


def add_xor_constraints(
    cnf: CnfFormula, constraints: Iterable[tuple[Sequence[int], bool]]
) -> CnfFormula:
    """Restrict ``cnf`` to assignments meeting every ``(variables, parity)`` constraint."""
    allowed = set(cnf.projection)
    extra: list[Clause] = []
    n = cnf.num_vars
    for vars_, parity in constraints:
        if not set(vars_) <= allowed:
            raise ValueError("parity constraints must range over projection variables")
        cl, n = xor_clauses(list(vars_), bool(parity), n)
        extra.extend(cl)
    if any(len(c) == 0 for c in extra):
        return CnfFormula(n, ((),), cnf.projection, cnf.names)
    return cnf.with_clauses(extra, num_vars=n)


def random_xor(rng: random.Random, variables: Sequence[int]) -> tuple[tuple[int, ...], bool]:
    """One member of the pairwise-independent hash family: a random subset and a random bit."""
    subset = tuple(v for v in variables if rng.getrandbits(1))
    return subset, bool(rng.getrandbits(1))


# -- DIMACS ---------------------------------------------------------------


def to_dimacs(cnf: CnfFormula) -> str:
    lines = []
    if cnf.projection:
        lines.append("c ind " + " ".join(map(str, cnf.projection)) + " 0")
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for c in cnf.clauses:
        lines.append(" ".join(map(str, c)) + (" 0" if c else "0"))
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> CnfFormula:
    num_vars = None
    clauses: list[Clause] = []
    projection: list[int] = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) >= 2 and parts[0] == "c" and parts[1] == "ind":
                projection.extend(int(x) for x in parts[2:] if x != "0")
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if pending:
        clauses.append(tuple(pending))
    if num_vars is None:
        raise ValueError("DIMACS input has no header")
    return CnfFormula(num_vars, tuple(clauses), tuple(projection))
