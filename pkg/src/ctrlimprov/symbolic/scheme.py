"""Approximate improviser synthesis for symbolic automata.

Counts of A and I are estimated, each at confidence ``sqrt(1-delta)``, and
the estimates pick one of four cases. Each case certifies its own bound on
word probability; the headline bound ``(1+tau)^2 (1+eps) rho`` is the worst
over the cases and is recorded alongside.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from ..automata import Dfa
from ..counting import INFINITE, is_infinite
from ..errors import ConfigurationError
from ..improvise import CIInstance, Component, FeasibilityVerdict, Improviser, feasibility
from ..sat.solver import InternalSolver, SolverOracle
from .automaton import SymbolicAutomaton, encode_dfa, symbolic_product
from .sampling import CountEstimate, almost_uniform_sampler, approx_count, symbolic_pump_sampler
from .unroll import (
    DiameterResult,
    diameter,
    find_lasso,
    is_deterministic,
    symbolic_accepts,
    user_diameter,
)


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x).limit_denominator(10**6)


def headline_bound(tau, epsilon, rho) -> Fraction:
    t = _as_fraction(tau)
    return (1 + t) ** 2 * (1 + Fraction(epsilon)) * Fraction(rho)


def _as_symbolic(a) -> SymbolicAutomaton:
    if isinstance(a, SymbolicAutomaton):
        return a
    if isinstance(a, Dfa):
        return encode_dfa(a)
    raise ConfigurationError("symbolic synthesis needs symbolic automata or DFAs")


def synthesize_symbolic(
    instance: CIInstance,
    tau,
    delta: float,
    rng: random.Random,
    oracle: SolverOracle | None = None,
    D_bound: int | None = None,
    diameter_cap: int = 64,
) -> Improviser | FeasibilityVerdict:
    """Cases by the estimates ``E_A``, ``E_I``.

    A: ``E_A`` infinite, pump A with ``ceil(1/rho)`` words; certifies (0, rho).
    B: ``E_A >= 1/rho``, almost-uniform on A; certifies (0, (1+tau)^2 rho).
    C: ``E_I`` infinite, weight ``rho E_A`` almost-uniform on A and the rest
    pumped from B = I with A's acceptance negated, ``M = ceil((1/rho - E_A)/(1+tau))``
    words; certifies (eps, (1+tau)^2 rho). B is only sound when the admissibility
    automaton is deterministic; otherwise, or if B turns out finite, the
    rest is pumped from I with weight eps and the headline bound is certified.
    D: ``E_I`` finite, weight ``1-eps`` almost-uniform on A and ``eps``
    almost-uniform on I; certifies (eps, (1+tau)^2 (1+eps) rho).
    Otherwise the verdict built from the estimates is returned.
    """
    t = _as_fraction(tau)
    if t <= 0:
        raise ConfigurationError("tau must be positive")
    if not 0 < delta < 1:
        raise ConfigurationError("delta must lie in (0, 1)")
    oracle = oracle or InternalSolver()
    improv = _as_symbolic(instance.improv)
    admiss = _as_symbolic(instance.admiss)
    eps, rho = instance.epsilon, instance.rho
    a = symbolic_product(improv, admiss)
    each = 1 - math.sqrt(1 - delta)

    def diam(s: SymbolicAutomaton) -> DiameterResult:
        return user_diameter(D_bound) if D_bound is not None else diameter(s, oracle, diameter_cap)

    d_a, d_i = diam(a), diam(improv)
    e_a = approx_count(a, oracle, float(t), each, d_a, rng)
    e_i = approx_count(improv, oracle, float(t), each, d_i, rng)
    notes = {
        "tau": t,
        "delta": _as_fraction(delta),
        "E_A": _fmt(e_a),
        "E_I": _fmt(e_i),
        "headline_rho": headline_bound(t, eps, rho),
    }
    inv, need = 1 / rho, (1 - eps) / rho
    square = (1 + t) ** 2

    def au(s, d, pilot):
        return almost_uniform_sampler(s, oracle, float(t), d, rng, pilot=pilot)

    if is_infinite(e_a.value):
        pump = symbolic_pump_sampler(a, oracle, math.ceil(inv), d_a)
        return Improviser(
            (Component(Fraction(1), pump, "pump(A)"),),
            Fraction(0), rho, "symbolic-A", Fraction(1), exact=False, notes=notes,
        )
    if e_a.value >= inv:
        return Improviser(
            (Component(Fraction(1), au(a, d_a, e_a), "almost-uniform(A)"),),
            Fraction(0), square * rho, "symbolic-B", Fraction(1), exact=False, notes=notes,
        )
    if not (e_a.value >= need and e_i.value >= inv):
        size_i = INFINITE if is_infinite(e_i.value) else e_i.value
        return feasibility(size_i, min(e_a.value, size_i), eps, rho)
    if is_infinite(e_i.value):
        w_a = rho * e_a.value
        pumped = _pump_difference(improv, admiss, oracle, diam, t, rho, e_a.value)
        if pumped is not None:
            comps = [Component(1 - w_a, pumped, "pump(B)")]
            if e_a.value:
                comps.insert(0, Component(w_a, au(a, d_a, e_a), "almost-uniform(A)"))
            return Improviser(tuple(comps), eps, square * rho, "symbolic-C", w_a, exact=False, notes=notes)
        notes["fallback"] = "pump(I)"
        comps = [Component(eps, symbolic_pump_sampler(improv, oracle, math.ceil(inv), d_i), "pump(I)")]
        if e_a.value:
            comps.insert(0, Component(1 - eps, au(a, d_a, e_a), "almost-uniform(A)"))
        return Improviser(
            tuple(comps), eps, square * (1 + eps) * rho, "symbolic-C", 1 - eps, exact=False, notes=notes
        )
    comps = [Component(eps, au(improv, d_i, e_i), "almost-uniform(I)")]
    if e_a.value:
        comps.insert(0, Component(1 - eps, au(a, d_a, e_a), "almost-uniform(A)"))
    return Improviser(
        tuple(comps), eps, square * (1 + eps) * rho, "symbolic-D", 1 - eps, exact=False, notes=notes
    )


def _fmt(e: CountEstimate) -> str:
    v = "inf" if is_infinite(e.value) else str(e.value)
    return v if e.exact else f"~{v}"


def _pump_difference(improv, admiss, oracle, diam, tau, rho, e_a):
    """Pump sampler over ``I \\ A`` built on the negated-acceptance product, or None."""
    if not is_deterministic(admiss, oracle):
        return None
    b = symbolic_product(improv, admiss, negate_b_acc=True)
    d_b = diam(b)
    if find_lasso(b, oracle, d_b) is None:
        return None
    m = max(1, math.ceil((1 / rho - e_a) / (1 + tau)))
    sampler = symbolic_pump_sampler(b, oracle, m, d_b)
    for w in sampler.support():
        if symbolic_accepts(admiss, w, oracle) or not symbolic_accepts(improv, w, oracle):
            return None
    return sampler
