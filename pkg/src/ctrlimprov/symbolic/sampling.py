"""Hash-based approximate counting and almost-uniform sampling over unrollings.

Cells are carved out with random parity constraints over the projection
variables and enumerated with blocking clauses. When the whole language fits
under the pivot it is enumerated outright and the results are exact.
"""

from __future__ import annotations

import math
import random
import statistics
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from ..automata import Word
from ..counting import INFINITE, CountValue, PumpSampler, PumpWitness, Sampler
from ..errors import ConfigurationError, PreconditionError, ResourceLimitError
from ..sat.cnf import add_xor_constraints, random_xor
from ..sat.solver import SolverOracle
from .automaton import SymbolicAutomaton
from .unroll import DiameterResult, UnrolledFormula, _as_diameter, find_lasso, unroll

# Below this the generator's guarantee is not claimed by its authors.
UNIGEN_TAU = 6.84
REPETITION_FACTOR = 35
MAX_SAMPLER_RETRIES = 1000


def pivot_for(tau: float) -> int:
    return math.ceil(math.e**2 * (1 + 1 / tau) ** 2)


def repetitions_for(delta: float) -> int:
    return math.ceil(REPETITION_FACTOR * math.log(3 / delta))


def _check_tau(tau: float) -> None:
    if not tau > 0:
        raise ConfigurationError("tau must be positive")


def _check_delta(delta: float) -> None:
    if not 0 < delta < 1:
        raise ConfigurationError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class CountEstimate:
    """``exact`` is set when the count came from full enumeration (or is infinite)."""

    value: CountValue
    exact: bool
    repetitions: int = 0

    def __float__(self) -> float:
        return float(self.value)


def _cell_size(oracle: SolverOracle, u: UnrolledFormula, hashes, m: int, cap: int) -> int:
    cnf = add_xor_constraints(u.cnf, hashes[:m]) if m else u.cnf
    if cnf.is_trivially_false:
        return 0
    return len(oracle.enumerate_projected(cnf, cap))


def approx_count_unrolled(
    u: UnrolledFormula,
    oracle: SolverOracle,
    tau: float,
    delta: float,
    rng: random.Random,
) -> CountEstimate:
    """Projected model count of ``u`` within a factor ``1+tau`` with probability ``1-delta``.

    Each repetition draws one list of parity constraints and uses its first
    ``m`` entries, so cells shrink monotonically in ``m``; ``m`` is the least
    value whose cell fits under the pivot, searched starting from the
    previous repetition's value.
    """
    _check_tau(tau)
    _check_delta(delta)
    pivot = pivot_for(tau)
    base = len(oracle.enumerate_projected(u.cnf, pivot + 1))
    if base <= pivot:
        return CountEstimate(base, True)
    proj = u.cnf.projection
    reps = repetitions_for(delta)
    estimates = []
    m = 1
    for _ in range(reps):
        hashes = [random_xor(rng, proj) for _ in proj]
        sizes: dict[int, int] = {}

        def size(k: int) -> int:
            if k not in sizes:
                sizes[k] = _cell_size(oracle, u, hashes, k, pivot + 1)
            return sizes[k]

        m = min(max(m, 1), len(proj))
        if size(m) <= pivot:
            while m > 1 and size(m - 1) <= pivot:
                m -= 1
        else:
            while m < len(proj) and size(m) > pivot:
                m += 1
        estimates.append(size(m) * 2**m)
    return CountEstimate(statistics.median_low(estimates), False, reps)


def approx_count(
    s: SymbolicAutomaton,
    oracle: SolverOracle,
    tau: float,
    delta: float,
    D: DiameterResult | int,
    rng: random.Random,
) -> CountEstimate:
    """Estimate ``|L(s)|``; infinite languages are detected first and reported exactly."""
    d = _as_diameter(D)
    if find_lasso(s, oracle, d) is not None:
        return CountEstimate(INFINITE, True)
    return approx_count_unrolled(unroll(s, d.D), oracle, tau, delta, rng)


class AlmostUniformSampler(Sampler):
    """Draws from a finite ``L(s)`` uniformly up to a factor ``1+tau``.

    If the pilot count is exact the language is enumerated once and drawn
    from exactly uniformly. Otherwise each draw picks ``m`` parity
    constraints sized so the expected cell holds between a quarter and a
    half of the pivot, enumerates the cell, and retries on an empty or
    oversized cell.
    """

    kind = "almost-uniform"

    def __init__(
        self,
        u: UnrolledFormula,
        oracle: SolverOracle,
        tau: float,
        pilot: CountEstimate,
        max_retries: int = MAX_SAMPLER_RETRIES,
    ):
        _check_tau(tau)
        if pilot.value == INFINITE:
            raise PreconditionError("almost-uniform sampling needs a finite language")
        if pilot.value == 0:
            raise PreconditionError("almost-uniform sampling needs a non-empty language")
        self.unrolled = u
        self.oracle = oracle
        self.tau = Fraction(tau).limit_denominator(10**6)
        self.pilot = pilot
        self.pivot = pivot_for(tau)
        self.max_retries = max_retries
        self.retries = 0
        self.support_size = pilot.value
        self._words: list[Word] | None = None
        if pilot.exact:
            models = oracle.enumerate_projected(u.cnf, pilot.value + 1)
            words = sorted(u.decode_projection(b) for b in models)
            if len(words) != pilot.value:
                raise AssertionError("pilot count disagrees with enumeration")
            self._words = words
            self._members = frozenset(words)
            self.hash_count = 0
        else:
            self.hash_count = max(1, math.ceil(math.log2(2 * pilot.value / self.pivot)))

    @property
    def has_exact_support(self) -> bool:
        return self._words is not None

    @property
    def prob_bound(self) -> Fraction:
        """Upper bound on any single word's probability, valid when the pilot is accurate."""
        if self._words is not None:
            return Fraction(1, len(self._words))
        return (1 + self.tau) / self.pilot.value

    def draw_hashes(self, rng: random.Random):
        return [random_xor(rng, self.unrolled.cnf.projection) for _ in range(self.hash_count)]

    def draw(self, rng: random.Random) -> Word:
        if self._words is not None:
            return self._words[rng.randrange(len(self._words))]
        for _ in range(self.max_retries):
            hashes = self.draw_hashes(rng)
            cnf = add_xor_constraints(self.unrolled.cnf, hashes)
            cell = [] if cnf.is_trivially_false else self.oracle.enumerate_projected(cnf, self.pivot + 1)
            if 1 <= len(cell) <= self.pivot:
                cell.sort()
                return self.unrolled.decode_projection(cell[rng.randrange(len(cell))])
            self.retries += 1
        raise ResourceLimitError(f"no usable hash cell after {self.max_retries} attempts")

    def exact_prob(self, word: Sequence[str]) -> Fraction | None:
        if self._words is None:
            return None
        return Fraction(1, len(self._words)) if tuple(word) in self._members else Fraction(0)

    def support(self) -> Iterator[Word]:
        if self._words is None:
            raise PreconditionError("support is only known for exactly enumerated languages")
        return iter(self._words)


def almost_uniform_sampler(
    s: SymbolicAutomaton,
    oracle: SolverOracle,
    tau: float,
    D: DiameterResult | int,
    rng: random.Random,
    delta: float = 0.1,
    pilot: CountEstimate | None = None,
) -> AlmostUniformSampler:
    if tau < UNIGEN_TAU:
        warnings.warn(
            f"tau={tau} is below {UNIGEN_TAU}; the almost-uniform bound is not guaranteed",
            stacklevel=2,
        )
    d = _as_diameter(D)
    if pilot is None:
        pilot = approx_count(s, oracle, tau, delta, d, rng)
    return AlmostUniformSampler(unroll(s, d.D), oracle, tau, pilot)


def symbolic_pump_sampler(
    s: SymbolicAutomaton, oracle: SolverOracle, n: int, D: DiameterResult | int
) -> PumpSampler:
    """Uniform over ``x y^i z`` for ``i < n``, with x, y, z decoded from a lasso model."""
    if n < 1:
        raise ConfigurationError("pump size must be at least 1")
    lasso = find_lasso(s, oracle, D)
    if lasso is None:
        raise PreconditionError("language is finite; nothing to pump")
    return PumpSampler(PumpWitness(*lasso), n)
