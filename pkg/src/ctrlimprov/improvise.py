"""Control improvisation: instances, feasibility, and improviser synthesis.

An improviser is a finite mixture of samplers with exact rational weights.
Its metadata (weights, per-component exact probabilities) lets the
distribution be audited analytically instead of only by sampling.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Callable, Iterable, Sequence, Union

from .automata import (
    DETERMINIZE_CAP,
    Dfa,
    Nfa,
    Word,
    complement,
    determinize,
    is_language_infinite,
    longest_word_length,
    product,
)
from .counting import (
    INFINITE,
    CountValue,
    ListSampler,
    Sampler,
    count_words,
    is_infinite,
    iter_words,
    pick_fraction,
    pump_sampler,
    pump_sampler_longer_than,
    uniform_sampler,
)
from .errors import (
    ConfigurationError,
    DeterminizationLimitError,
    InconsistentInputError,
    PreconditionError,
)

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """``p/q`` or an integer; decimals and floats are refused so no rounding sneaks in."""
    if isinstance(value, bool):
        raise ConfigurationError("expected a rational, got a boolean")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if m:
            den = int(m.group(2)) if m.group(2) is not None else 1
            if den == 0:
                raise ConfigurationError(f"zero denominator in {value!r}")
            return Fraction(int(m.group(1)), den)
    raise ConfigurationError(f"expected an exact rational 'p/q', got {value!r}")


@dataclass(frozen=True)
class ComputablePredicate:
    """A total word predicate with a name for reports."""

    name: str
    fn: Callable[[Word], bool]

    def __call__(self, word: Sequence[str]) -> bool:
        return bool(self.fn(tuple(word)))


def _symbolic_type():
    from .symbolic.automaton import SymbolicAutomaton

    return SymbolicAutomaton


@dataclass(frozen=True)
class CIInstance:
    improv: object
    admiss: object
    epsilon: Fraction
    rho: Fraction

    def __post_init__(self):
        eps = parse_rational(self.epsilon)
        rho = parse_rational(self.rho)
        if not 0 <= eps <= 1:
            raise ConfigurationError(f"epsilon must lie in [0, 1], got {eps}")
        if not 0 < rho <= 1:
            raise ConfigurationError(f"rho must lie in (0, 1], got {rho}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "rho", rho)
        sym = _symbolic_type()
        if not isinstance(self.improv, (Dfa, Nfa, sym)):
            raise ConfigurationError("improv must be a DFA, NFA or symbolic automaton")
        if not isinstance(self.admiss, (Dfa, Nfa, sym, ComputablePredicate)):
            raise ConfigurationError("admiss must be an automaton or a ComputablePredicate")
        if isinstance(self.improv, (Dfa, Nfa)) and isinstance(self.admiss, (Dfa, Nfa)):
            if self.improv.alphabet != self.admiss.alphabet:
                raise ConfigurationError("improv and admiss use different alphabets")

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.improv, _symbolic_type())


class Membership:
    """Memoized membership in ``I`` and admissibility, for audits.

    Symbolic automata are queried through a SAT oracle, which is costly, so
    each distinct word is checked once.
    """

    def __init__(self, instance: CIInstance, oracle=None):
        self.instance = instance
        self.oracle = oracle
        self._improv: dict[Word, bool] = {}
        self._admiss: dict[Word, bool] = {}

    def _check(self, target, word: Word) -> bool:
        if isinstance(target, ComputablePredicate):
            return target(word)
        if isinstance(target, (Dfa, Nfa)):
            return all(s in target.alphabet for s in word) and target.accepts(word)
        from .sat.solver import InternalSolver
        from .symbolic.unroll import symbolic_accepts

        if self.oracle is None:
            self.oracle = InternalSolver()
        return symbolic_accepts(target, word, self.oracle)

    def in_improv(self, word: Sequence[str]) -> bool:
        w = tuple(word)
        if w not in self._improv:
            self._improv[w] = self._check(self.instance.improv, w)
        return self._improv[w]

    def admissible(self, word: Sequence[str]) -> bool:
        w = tuple(word)
        if w not in self._admiss:
            self._admiss[w] = self.in_improv(w) and self._check(self.instance.admiss, w)
        return self._admiss[w]


# -- feasibility ------------------------------------------------------------


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    size_I: CountValue
    size_A: CountValue
    thresholds: tuple[Fraction, Fraction]

    def line(self) -> str:
        word = "feasible" if self.feasible else "infeasible"
        parts = [word, format_count(self.size_I), format_count(self.size_A)]
        parts += [str(t) for t in self.thresholds]
        return " ".join(parts)


def format_count(c: CountValue) -> str:
    return "inf" if is_infinite(c) else str(c)


def feasibility(size_I: CountValue, size_A: CountValue, epsilon, rho) -> FeasibilityVerdict:
    """Feasible iff ``|I| >= 1/rho`` and ``|A| >= (1-eps)/rho``."""
    eps, rho = parse_rational(epsilon), parse_rational(rho)
    if not 0 <= eps <= 1 or not 0 < rho <= 1:
        raise ConfigurationError("epsilon must lie in [0,1] and rho in (0,1]")
    if size_A > size_I:
        raise InconsistentInputError(f"|A| = {size_A} exceeds |I| = {size_I}")
    inv, need = 1 / rho, (1 - eps) / rho
    return FeasibilityVerdict(size_I >= inv and size_A >= need, size_I, size_A, (inv, need))


# -- improvisers ------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    weight: Fraction
    sampler: Sampler
    role: str


@dataclass
class Improviser:
    """A weighted mixture of samplers plus the guarantee it certifies.

    ``admissible_mass`` is exact for explicit schemes and a nominal lower
    bound (valid when the count estimates are accurate) for symbolic ones.
    """

    components: tuple[Component, ...]
    epsilon: Fraction
    rho: Fraction
    case_tag: str
    admissible_mass: Fraction
    exact: bool = True
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.components = tuple(c for c in self.components if c.weight != 0)
        if sum(c.weight for c in self.components) != 1:
            raise AssertionError("component weights must sum to 1")
        if any(c.weight < 0 for c in self.components):
            raise AssertionError("negative component weight")

    @property
    def guarantee(self) -> tuple[Fraction, Fraction]:
        return self.epsilon, self.rho

    @property
    def weights(self) -> list[Fraction]:
        return [c.weight for c in self.components]

    def draw(self, rng: random.Random) -> Word:
        if len(self.components) == 1:
            return self.components[0].sampler.draw(rng)
        k = pick_fraction(rng, self.weights)
        return self.components[k].sampler.draw(rng)

    @property
    def has_exact_distribution(self) -> bool:
        return all(c.sampler.has_exact_support for c in self.components)

    def exact_distribution(self, limit: int = 10**4) -> dict[Word, Fraction] | None:
        """Word probabilities summed over components; None if unknown or too large."""
        if not self.has_exact_distribution:
            return None
        if sum(c.sampler.support_size for c in self.components) > limit:
            return None
        dist: dict[Word, Fraction] = {}
        for c in self.components:
            for w in c.sampler.support():
                dist[w] = dist.get(w, Fraction(0)) + c.weight * c.sampler.exact_prob(w)
        return dist

    def max_probability(self) -> Fraction | None:
        dist = self.exact_distribution()
        if dist is not None:
            return max(dist.values())
        bounds = [getattr(c.sampler, "prob_bound", None) for c in self.components]
        if any(b is None for b in bounds):
            return None
        return sum(c.weight * b for c, b in zip(self.components, bounds))

    def certificate(self) -> dict:
        out = {
            "case": self.case_tag,
            "eps": str(self.epsilon),
            "rho": str(self.rho),
            "weights": [str(w) for w in self.weights],
            "components": [c.role for c in self.components],
            "admissible_mass": str(self.admissible_mass),
            "exact": self.exact,
        }
        out.update({k: str(v) for k, v in self.notes.items()})
        return out

    def certificate_line(self) -> str:
        c = self.certificate()
        parts = [
            f"case={c['case']}",
            f"eps={c['eps']}",
            f"rho={c['rho']}",
            "weights=" + ",".join(c["weights"]),
            "components=" + ",".join(c["components"]),
            f"admissible_mass={c['admissible_mass']}",
        ]
        parts += [f"{k}={v}" for k, v in self.notes.items()]
        return " ".join(parts)


def improviser_draw(imp: Improviser, rng: random.Random) -> Word:
    return imp.draw(rng)


@dataclass(frozen=True)
class BudgetExhausted:
    reason: str
    enumerated: int
    admissible_found: int
    other_found: int


@dataclass(frozen=True)
class NotApplicable:
    reason: str


def _require_dfa(a, what: str) -> Dfa:
    if not isinstance(a, Dfa):
        raise ConfigurationError(f"{what} must be an explicit DFA")
    return a


def synthesize_dfa(instance: CIInstance) -> Improviser | FeasibilityVerdict:
    """Exact scheme for explicit DFAs, dispatching on |A| and |I|.

    A: |A| infinite, pump A. B: |A| >= 1/rho, uniform on A.
    C/D: (1-eps)/rho <= |A| < 1/rho <= |I|, weight rho|A| uniform on A and
    the rest on I \\ A (pumped if infinite, uniform if finite).
    Anything else is infeasible and returns the verdict.
    """
    improv = _require_dfa(instance.improv, "improv")
    admiss = _require_dfa(instance.admiss, "admiss")
    eps, rho = instance.epsilon, instance.rho
    a = product(improv, admiss)
    b = product(improv, complement(a))
    size_i, size_a = count_words(improv), count_words(a)
    verdict = feasibility(size_i, size_a, eps, rho)
    inv = 1 / rho
    if is_infinite(size_a):
        return Improviser(
            (Component(Fraction(1), pump_sampler(a, math.ceil(inv)), "pump(A)"),),
            Fraction(0), rho, "A", Fraction(1),
        )
    if size_a >= inv:
        return Improviser(
            (Component(Fraction(1), uniform_sampler(a), "uniform(A)"),),
            Fraction(0), rho, "B", Fraction(1),
        )
    if not verdict.feasible:
        return verdict
    w_a = rho * size_a
    comps = [Component(w_a, uniform_sampler(a), "uniform(A)")] if size_a else []
    if is_infinite(size_i):
        m = math.ceil(inv) - size_a
        comps.append(Component(1 - w_a, pump_sampler(b, m), "pump(B)"))
        tag = "C"
    else:
        comps.append(Component(1 - w_a, uniform_sampler(b), "uniform(B)"))
        tag = "D"
    return Improviser(tuple(comps), eps, rho, tag, w_a)


def synthesize_enumerative(instance: CIInstance, budget: int) -> Improviser | BudgetExhausted:
    """Walk I in length-lex order filling S (admissible) and T (the rest).

    ``N = ceil((1-eps)/rho)`` admissible words get probability rho each, and
    ``M = ceil(1/rho) - N`` further words share the remaining mass. When
    ``N >= 1/rho`` the result is uniform on ``ceil(1/rho)`` admissible words.
    """
    if budget < 1:
        raise ConfigurationError("budget must be at least 1")
    improv = instance.improv
    if not isinstance(improv, (Dfa, Nfa)):
        raise ConfigurationError("enumeration needs an explicit improvisation automaton")
    eps, rho = instance.epsilon, instance.rho
    member = Membership(instance)
    total = math.ceil(1 / rho)
    n = math.ceil((1 - eps) / rho)
    if n >= 1 / rho:
        n, m = total, 0
    else:
        m = total - n
    s_list: list[Word] = []
    t_list: list[Word] = []
    seen = 0
    for w in iter_words(improv):
        if len(s_list) >= n and len(t_list) >= m:
            break
        if seen >= budget:
            return BudgetExhausted("budget", seen, len(s_list), len(t_list))
        seen += 1
        if member.admissible(w):
            if len(s_list) < n:
                s_list.append(w)
            elif len(t_list) < m:
                t_list.append(w)
        elif len(t_list) < m:
            t_list.append(w)
    else:
        if len(s_list) < n or len(t_list) < m:
            return BudgetExhausted("language exhausted", seen, len(s_list), len(t_list))
    if m == 0:
        return Improviser(
            (Component(Fraction(1), ListSampler(s_list), "list(S)"),),
            Fraction(0), rho, "E-enumerative", Fraction(1),
        )
    w_s = rho * n
    comps = []
    if s_list:
        comps.append(Component(w_s, ListSampler(s_list), "list(S)"))
    comps.append(Component(1 - w_s, ListSampler(t_list), "list(T)"))
    admissible_mass = w_s + (1 - w_s) * Fraction(sum(map(member.admissible, t_list)), m)
    return Improviser(tuple(comps), eps, rho, "E-enumerative", admissible_mass)


def _determinize_or_none(a, cap: int) -> Dfa | None:
    if isinstance(a, Dfa):
        return a
    try:
        return determinize(a, cap)
    except DeterminizationLimitError:
        return None


def synthesize_nfa_special(
    instance: CIInstance, cap: int = DETERMINIZE_CAP
) -> Improviser | FeasibilityVerdict | NotApplicable:
    """The tractable NFA cases.

    An infinite product language is pumped directly. A finite product is
    determinized and counted; if I is infinite, the inadmissible component
    pumps I past the longest word of A so the supports cannot meet. If I is
    finite too, both sides are determinized and the DFA scheme takes over.
    """
    improv, admiss = instance.improv, instance.admiss
    if not isinstance(improv, (Dfa, Nfa)) or not isinstance(admiss, (Dfa, Nfa)):
        raise ConfigurationError("NFA special cases need explicit automata")
    eps, rho = instance.epsilon, instance.rho
    inv = 1 / rho
    a = product(improv, admiss)
    if is_language_infinite(a):
        return Improviser(
            (Component(Fraction(1), pump_sampler(a, math.ceil(inv)), "pump(A)"),),
            Fraction(0), rho, "NFA-special", Fraction(1), notes={"subcase": "A"},
        )
    a_dfa = _determinize_or_none(a, cap)
    if a_dfa is None:
        return NotApplicable("determinizing the admissible product exceeds the cap")
    if is_language_infinite(improv):
        size_a = count_words(a_dfa)
        verdict = feasibility(INFINITE, size_a, eps, rho)
        if size_a >= inv:
            return Improviser(
                (Component(Fraction(1), uniform_sampler(a_dfa), "uniform(A)"),),
                Fraction(0), rho, "NFA-special", Fraction(1), notes={"subcase": "B"},
            )
        if not verdict.feasible:
            return verdict
        w_a = rho * size_a
        m = math.ceil(inv) - size_a
        longest = longest_word_length(a_dfa) if size_a else -1
        comps = [Component(w_a, uniform_sampler(a_dfa), "uniform(A)")] if size_a else []
        comps.append(
            Component(1 - w_a, pump_sampler_longer_than(improv, m, longest), "pump_longer(I)")
        )
        return Improviser(tuple(comps), eps, rho, "NFA-special", w_a, notes={"subcase": "C"})
    i_dfa = _determinize_or_none(improv, cap)
    d_dfa = _determinize_or_none(admiss, cap)
    if i_dfa is None or d_dfa is None:
        return NotApplicable("determinization exceeds the cap")
    result = synthesize_dfa(CIInstance(i_dfa, d_dfa, eps, rho))
    if isinstance(result, Improviser):
        result.notes["subcase"] = result.case_tag
        result.case_tag = "NFA-special"
    return result


def synthesize(instance: CIInstance, cap: int = DETERMINIZE_CAP):
    """Explicit dispatch: the DFA scheme when both sides are DFAs, else the NFA cases."""
    if isinstance(instance.improv, Dfa) and isinstance(instance.admiss, Dfa):
        return synthesize_dfa(instance)
    return synthesize_nfa_special(instance, cap)


# -- verification -----------------------------------------------------------


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class VerificationReport:
    draws: int
    analytic_max_prob: Fraction | None
    analytic_admissible_mass: Fraction | None
    support_violations: int
    empirical_admissible: float
    wilson: tuple[float, float]
    membership_violations: int
    flags: list[str]

    @property
    def ok(self) -> bool:
        return not self.flags

    def as_dict(self) -> dict:
        return {
            "draws": self.draws,
            "analytic_max_prob": None if self.analytic_max_prob is None else str(self.analytic_max_prob),
            "analytic_admissible_mass": (
                None if self.analytic_admissible_mass is None else str(self.analytic_admissible_mass)
            ),
            "support_violations": self.support_violations,
            "empirical_admissible": self.empirical_admissible,
            "wilson_low": self.wilson[0],
            "wilson_high": self.wilson[1],
            "membership_violations": self.membership_violations,
            "flags": list(self.flags),
            "ok": self.ok,
        }


def verify_improviser(
    imp: Improviser,
    instance: CIInstance,
    draws: int,
    rng: random.Random,
    oracle=None,
    support_limit: int = 10**4,
) -> VerificationReport:
    """Analytic audit from metadata where possible, plus a Monte-Carlo check.

    Flags: ``max-prob-exceeds-rho`` and ``admissible-mass-below-1-eps``
    compare the analytic values with the improviser's certified guarantee;
    ``support-outside-I`` and ``membership-violation`` catch words outside
    I; ``empirical-admissible-below-1-eps`` fires when the Wilson interval
    lies wholly below ``1 - eps``.
    """
    if draws < 1:
        raise ConfigurationError("draws must be at least 1")
    member = Membership(instance, oracle)
    eps, rho = imp.guarantee
    flags: list[str] = []
    dist = imp.exact_distribution(support_limit)
    max_prob = imp.max_probability()
    mass = None
    support_bad = 0
    if dist is not None:
        support_bad = sum(1 for w in dist if not member.in_improv(w))
        mass = sum((p for w, p in dist.items() if member.admissible(w)), Fraction(0))
    if max_prob is not None and max_prob > rho:
        flags.append("max-prob-exceeds-rho")
    if mass is not None and mass < 1 - eps:
        flags.append("admissible-mass-below-1-eps")
    if support_bad:
        flags.append("support-outside-I")
    hits = 0
    outside = 0
    for _ in range(draws):
        w = imp.draw(rng)
        if member.admissible(w):
            hits += 1
        elif not member.in_improv(w):
            outside += 1
    if outside:
        flags.append("membership-violation")
    low, high = wilson_interval(hits, draws)
    if high < 1 - eps:
        flags.append("empirical-admissible-below-1-eps")
    return VerificationReport(
        draws, max_prob, mass, support_bad, hits / draws, (low, high), outside, flags
    )


def broken_improviser(word: Sequence[str], rho=Fraction(1)) -> Improviser:
    """Negative control: all mass on one word, claiming the (0, rho) guarantee."""
    return Improviser(
        (Component(Fraction(1), ListSampler([tuple(word)]), "list(control)"),),
        Fraction(0), parse_rational(rho), "control", Fraction(1), exact=False,
    )
