"""Propositional formula AST.

Formulas are immutable trees over named variables. ``&``, ``|``, ``^`` and
``~`` build conjunctions, disjunctions, parities and negations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return and_(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return or_(self, other)

    def __xor__(self, other: "Formula") -> "Formula":
        return xor(self, other)

    def __invert__(self) -> "Formula":
        return not_(self)

    def evaluate(self, env: Mapping[str, bool]) -> bool:
        raise NotImplementedError

    def variables(self) -> set[str]:
        out: set[str] = set()
        _collect(self, out)
        return out

    def substitute(self, mapping: Mapping[str, "Formula"] | Callable[[str], "Formula"]) -> "Formula":
        lookup = mapping if callable(mapping) else (lambda name: mapping.get(name, Var(name)))
        return _subst(self, lookup)


@dataclass(frozen=True)
class Var(Formula):
    name: str

    def evaluate(self, env):
        return bool(env[self.name])


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def evaluate(self, env):
        return self.value


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def evaluate(self, env):
        return not self.arg.evaluate(env)


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def evaluate(self, env):
        return all(a.evaluate(env) for a in self.args)


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def evaluate(self, env):
        return any(a.evaluate(env) for a in self.args)


@dataclass(frozen=True)
class Xor(Formula):
    args: tuple[Formula, ...]

    def evaluate(self, env):
        return sum(a.evaluate(env) for a in self.args) % 2 == 1


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula

    def evaluate(self, env):
        return (not self.lhs.evaluate(env)) or self.rhs.evaluate(env)


@dataclass(frozen=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula

    def evaluate(self, env):
        return self.lhs.evaluate(env) == self.rhs.evaluate(env)


TRUE = Const(True)
FALSE = Const(False)


def var(name: str) -> Var:
    return Var(name)


def not_(f: Formula) -> Formula:
    if isinstance(f, Const):
        return Const(not f.value)
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def and_(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, And):
            flat.extend(a.args)
        elif a == FALSE:
            return FALSE
        elif a != TRUE:
            flat.append(a)
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def or_(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, Or):
            flat.extend(a.args)
        elif a == TRUE:
            return TRUE
        elif a != FALSE:
            flat.append(a)
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def xor(*args: Formula) -> Formula:
    flat: list[Formula] = []
    parity = False
    for a in args:
        if isinstance(a, Const):
            parity ^= a.value
        elif isinstance(a, Xor):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return Const(parity)
    body = flat[0] if len(flat) == 1 else Xor(tuple(flat))
    return not_(body) if parity else body


def implies(lhs: Formula, rhs: Formula) -> Formula:
    return Implies(lhs, rhs)


def iff(lhs: Formula, rhs: Formula) -> Formula:
    return Iff(lhs, rhs)


def conj(items: Iterable[Formula]) -> Formula:
    return and_(*items)


def disj(items: Iterable[Formula]) -> Formula:
    return or_(*items)


def bits_equal(names: Iterable[str], values: Iterable[bool]) -> Formula:
    """Cube fixing each named variable to the matching bit."""
    return and_(*(Var(n) if v else Not(Var(n)) for n, v in zip(names, values)))


def _collect(f: Formula, out: set[str]) -> None:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g.name)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or, Xor)):
            stack.extend(g.args)
        elif isinstance(g, (Implies, Iff)):
            stack.extend((g.lhs, g.rhs))


def _subst(f: Formula, lookup: Callable[[str], Formula]) -> Formula:
    if isinstance(f, Var):
        return lookup(f.name)
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return not_(_subst(f.arg, lookup))
    if isinstance(f, And):
        return and_(*(_subst(a, lookup) for a in f.args))
    if isinstance(f, Or):
        return or_(*(_subst(a, lookup) for a in f.args))
    if isinstance(f, Xor):
        return xor(*(_subst(a, lookup) for a in f.args))
    if isinstance(f, Implies):
        return Implies(_subst(f.lhs, lookup), _subst(f.rhs, lookup))
    if isinstance(f, Iff):
        return Iff(_subst(f.lhs, lookup), _subst(f.rhs, lookup))
    raise TypeError(f"not a formula: {f!r}")
