"""SAT oracles: a built-in CDCL solver and an external DIMACS subprocess backend.

Every oracle checks returned models against the clauses it was given. A run
that hits its budget reports :attr:`Status.UNKNOWN`; it is never turned into
an UNSAT answer.
"""

from __future__ import annotations

import enum
import heapq
import os
import subprocess
import tempfile
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import ResourceLimitError, SolverError
from .cnf import CnfFormula, to_dimacs


class Status(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolveResult:
    status: Status
    model: tuple[bool, ...] | None = None  # index 0 unused

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT


def _luby(i: int) -> int:
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class CdclSolver:
    """Conflict-driven clause learning with two watched literals.

    Literal ``v`` is stored as index ``2v`` and ``-v`` as ``2v+1``. Clauses
    can be added between calls to :meth:`solve`, which is how blocking
    clauses are fed during model enumeration.
    """

    RESTART_UNIT = 64
    DECAY = 1 / 0.95

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]] = ()):
        self.num_vars = num_vars
        size = 2 * num_vars + 2
        self.val = [0] * size
        self.level = [0] * (num_vars + 1)
        self.reason: list[int] = [-1] * (num_vars + 1)
        self.phase = [False] * (num_vars + 1)
        self.activity = [0.0] * (num_vars + 1)
        self.bump = 1.0
        self.heap = [(0.0, v) for v in range(1, num_vars + 1)]
        self.watches: list[list[int]] = [[] for _ in range(size)]
        self.clauses: list[list[int]] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.ok = True
        self.conflicts = 0
        for c in clauses:
            self.add_clause(c)

    @staticmethod
    def _index(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _assign(self, li: int, reason: int) -> None:
        self.val[li] = 1
        self.val[li ^ 1] = -1
        v = li >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(li)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        val, phase, heap, act = self.val, self.phase, self.heap, self.activity
        for li in self.trail[start:]:
            val[li] = 0
            val[li ^ 1] = 0
            v = li >> 1
            phase[v] = not (li & 1)
            heapq.heappush(heap, (-act[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, start)

    def add_clause(self, lits: Sequence[int]) -> bool:
        """Add a clause at decision level 0. Returns False once the formula is UNSAT."""
        if not self.ok:
            return False
        self._cancel_until(0)
        seen: set[int] = set()
        out: list[int] = []
        for lit in lits:
            li = self._index(lit)
            if li ^ 1 in seen or self.val[li] == 1:
                return True
            if li in seen or self.val[li] == -1:
                continue
            seen.add(li)
            out.append(li)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._assign(out[0], -1)
            if self._propagate() != -1:
                self.ok = False
            return self.ok
        ci = len(self.clauses)
        self.clauses.append(out)
        self.watches[out[0]].append(ci)
        self.watches[out[1]].append(ci)
        return True

    def add_blocking_clause(self, lits: Sequence[int]) -> bool:
        """Add a clause the current full assignment falsifies, backtracking only as far as needed.

        The clause is asserted at its second-highest decision level, so the
        next :meth:`solve` with ``resume=True`` keeps the decisions below it.
        """
        if not self.ok:
            return False
        out = [self._index(lit) for lit in lits]
        if len({li >> 1 for li in out}) != len(out) or any(self.val[li] != -1 for li in out):
            return self.add_clause(lits)
        level = self.level
        out.sort(key=lambda li: level[li >> 1], reverse=True)
        if not out or level[out[0] >> 1] == 0:
            self.ok = False
            return False
        if len(out) == 1:
            self._cancel_until(0)
            self._assign(out[0], -1)
            return True
        top, second = level[out[0] >> 1], level[out[1] >> 1]
        ci = len(self.clauses)
        self.clauses.append(out)
        if second == top:
            self._cancel_until(top - 1)
        else:
            self._cancel_until(second)
        self.watches[out[0]].append(ci)
        self.watches[out[1]].append(ci)
        if second != top:
            self._assign(out[0], ci)
        return True

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        val, clauses, watches, trail = self.val, self.clauses, self.watches, self.trail
        while self.qhead < len(trail):
            false_lit = trail[self.qhead] ^ 1
            self.qhead += 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return ci
                    self._assign(first, ci)
            del ws[j:]
        return -1

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = bytearray(self.num_vars + 1)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        level, reason, act = self.level, self.reason, self.activity
        while True:
            c = self.clauses[confl]
            for q in (c if p == -1 else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    act[v] += self.bump
                    if act[v] > 1e100:
                        self._rescale()
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen[p >> 1] = 0
            counter -= 1
            if counter == 0:
                break
            confl = reason[p >> 1]
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _rescale(self) -> None:
        self.activity = [a * 1e-100 for a in self.activity]
        self.bump *= 1e-100
        self.heap = [(-self.activity[v], v) for v in range(1, self.num_vars + 1)]
        heapq.heapify(self.heap)

    def _decide(self) -> int:
        heap, val = self.heap, self.val
        while heap:
            _, v = heapq.heappop(heap)
            if val[2 * v] == 0:
                return 2 * v if self.phase[v] else 2 * v + 1
        for v in range(1, self.num_vars + 1):
            if val[2 * v] == 0:
                return 2 * v if self.phase[v] else 2 * v + 1
        return -1

    def solve(self, max_conflicts: int | None = None, resume: bool = False) -> Status:
        """With ``resume`` the current partial assignment is kept as a starting point."""
        if not self.ok:
            return Status.UNSAT
        if not resume:
            self._cancel_until(0)
            if self._propagate() != -1:
                self.ok = False
                return Status.UNSAT
        budget_start = self.conflicts
        restart_no = 1
        limit = self.RESTART_UNIT * _luby(restart_no)
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl != -1:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return Status.UNSAT
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], -1)
                else:
                    ci = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches[learnt[0]].append(ci)
                    self.watches[learnt[1]].append(ci)
                    self._assign(learnt[0], ci)
                self.bump *= self.DECAY
                if max_conflicts is not None and self.conflicts - budget_start >= max_conflicts:
                    self._cancel_until(0)
                    return Status.UNKNOWN
                continue
            if since_restart >= limit:
                since_restart = 0
                restart_no += 1
                limit = self.RESTART_UNIT * _luby(restart_no)
                self._cancel_until(0)
                continue
            li = self._decide()
            if li == -1:
                return Status.SAT
            self.trail_lim.append(len(self.trail))
            self._assign(li, -1)

    def model(self) -> tuple[bool, ...]:
        return (False,) + tuple(self.val[2 * v] == 1 for v in range(1, self.num_vars + 1))


class SolverOracle:
    """A procedure from CNF to sat(model) / unsat / unknown."""

    backend = "abstract"

    def __init__(self, check_models: bool = True):
        self.check_models = check_models
        self.calls = 0

    def _solve(self, cnf: CnfFormula) -> SolveResult:
        raise NotImplementedError

    def solve(self, cnf: CnfFormula) -> SolveResult:
        self.calls += 1
        result = self._solve(cnf)
        if result.is_sat and self.check_models and not cnf.satisfied_by(result.model):
            raise SolverError(f"{self.backend} solver returned a non-model")
        return result

    def enumerate_projected(self, cnf: CnfFormula, cap: int) -> list[tuple[bool, ...]]:
        """Distinct projected models, up to ``cap``, via blocking clauses."""
        found: list[tuple[bool, ...]] = []
        current = cnf
        while len(found) < cap:
            result = self.solve(current)
            if result.status is Status.UNKNOWN:
                raise ResourceLimitError(f"{self.backend} solver gave up during enumeration")
            if not result.is_sat:
                break
            proj = cnf.project(result.model)
            found.append(proj)
            if not cnf.projection:
                break
            block = tuple(-v if b else v for v, b in zip(cnf.projection, proj))
            current = current.with_clauses([block])
        return found


class InternalSolver(SolverOracle):
    """In-process CDCL backend."""

    backend = "internal"

    def __init__(self, max_conflicts: int | None = None, check_models: bool = True):
        super().__init__(check_models)
        self.max_conflicts = max_conflicts

    def _solve(self, cnf: CnfFormula) -> SolveResult:
        s = CdclSolver(cnf.num_vars, cnf.clauses)
        status = s.solve(self.max_conflicts)
        return SolveResult(status, s.model() if status is Status.SAT else None)

    def enumerate_projected(self, cnf: CnfFormula, cap: int) -> list[tuple[bool, ...]]:
        # One incremental solver; learned clauses survive between models.
        s = CdclSolver(cnf.num_vars, cnf.clauses)
        found: list[tuple[bool, ...]] = []
        proj = cnf.projection
        while len(found) < cap:
            self.calls += 1
            status = s.solve(self.max_conflicts, resume=bool(found))
            if status is Status.UNKNOWN:
                raise ResourceLimitError("internal solver gave up during enumeration")
            if status is Status.UNSAT:
                break
            model = s.model()
            if self.check_models and not cnf.satisfied_by(model):
                raise SolverError("internal solver returned a non-model")
            bits = tuple(model[v] for v in proj)
            found.append(bits)
            if not proj:
                break
            s.add_blocking_clause([-v if b else v for v, b in zip(proj, bits)])
        return found


class ExternalSolver(SolverOracle):
    """Runs a DIMACS solver executable that prints ``s ...`` and ``v ...`` lines.

    With ``cross_check`` set, UNSAT answers on formulas of at most
    ``cross_check_vars`` variables are confirmed with the internal solver.
    """

    backend = "external"

    def __init__(
        self,
        executable: str,
        args: Sequence[str] = (),
        timeout: float | None = None,
        cross_check: bool = False,
        cross_check_vars: int = 20,
        check_models: bool = True,
    ):
        super().__init__(check_models)
        self.executable = executable
        self.args = list(args)
        self.timeout = timeout
        self.cross_check = cross_check
        self.cross_check_vars = cross_check_vars

    def _solve(self, cnf: CnfFormula) -> SolveResult:
        fd, path = tempfile.mkstemp(suffix=".cnf")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(to_dimacs(cnf))
            try:
                proc = subprocess.run(
                    [self.executable, *self.args, path],
                    capture_output=True,
                    text=True,
                    timeout=self.timeout,
                )
            except subprocess.TimeoutExpired:
                return SolveResult(Status.UNKNOWN)
        finally:
            os.unlink(path)
        result = parse_solver_output(proc.stdout, cnf.num_vars)
        if (
            result.status is Status.UNSAT
            and self.cross_check
            and cnf.num_vars <= self.cross_check_vars
            and InternalSolver().solve(cnf).is_sat
        ):
            raise SolverError("external solver reported UNSAT on a satisfiable formula")
        return result


def parse_solver_output(text: str, num_vars: int) -> SolveResult:
    status = None
    values: dict[int, bool] = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "s":
            word = " ".join(parts[1:]).upper()
            if word == "SATISFIABLE":
                status = Status.SAT
            elif word == "UNSATISFIABLE":
                status = Status.UNSAT
            else:
                status = Status.UNKNOWN
        elif parts[0] == "v":
            for tok in parts[1:]:
                lit = int(tok)
                if lit:
                    values[abs(lit)] = lit > 0
    if status is None:
        raise SolverError("solver output has no status line")
    if status is not Status.SAT:
        return SolveResult(status)
    model = (False,) + tuple(values.get(v, False) for v in range(1, num_vars + 1))
    return SolveResult(Status.SAT, model)


def solve(oracle: SolverOracle, cnf: CnfFormula) -> SolveResult:
    return oracle.solve(cnf)


def enumerate_projected_models(
    oracle: SolverOracle, cnf: CnfFormula, cap: int
) -> list[tuple[bool, ...]]:
    if cap < 1:
        raise ValueError("cap must be at least 1")
    return oracle.enumerate_projected(cnf, cap)


def make_oracle(spec: str | None = None, **kwargs) -> SolverOracle:
    """``"internal"`` or ``"external:<path>"``."""
    if spec in (None, "", "internal"):
        return InternalSolver(**kwargs)
    if spec.startswith("external:"):
        return ExternalSolver(spec.split(":", 1)[1], **kwargs)
    raise ValueError(f"unknown solver backend {spec!r}")
