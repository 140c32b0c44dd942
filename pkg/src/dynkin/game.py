"""Nested forward algorithm for the zero-sum stopping game.

The sup-player collects ``psi`` when stopping (ties go to the sup-player),
the inf-player pays ``phi`` when stopping first, both discounted at rate
``beta``.  The solver

1. computes the one-player value ``V0`` (no opponent);
2. if ``V0 <= phi`` everywhere, ``V0`` is already the game value;
3. otherwise starts the inf-player's set at ``S_1`` (``{V0 > phi} | {phi = psi}``
   or, in weak mode, ``{V0 >= phi}``), computes ``V_k`` as the best reply of
   the sup-player against ``h(S_k)`` and shrinks

       S_{k+1} = (S_k & {Q V_k - beta V_k >= 0}) | {phi = psi}

   until it stops changing.  The last ``V_k`` is the value.
"""
import enum
from dataclasses import dataclass

import numpy as np

from .errors import IterationOverflow, PreconditionViolated
from .resolvent import GameSpec, defect, stopping_set
from .stopping import OnePlayerResult, forward_optimal_stopping

__all__ = [
    "InitMode",
    "OuterRecord",
    "GameTrace",
    "Solution",
    "StateCheck",
    "NEReport",
    "ModeComparison",
    "classify_sets",
    "solve_game",
    "verify_equilibrium",
    "compare_modes",
]


class InitMode(enum.Enum):
    STRICT = "strict"
    WEAK = "weak"


@dataclass(frozen=True, eq=False)
class OuterRecord:
    k: int
    inf_set: frozenset  # S_k
    result: OnePlayerResult  # best reply against h(S_k)

    @property
    def sup_set(self):  # D_k
        return self.result.stop_set

    @property
    def value(self):  # V_k
        return self.result.value


@dataclass(frozen=True, eq=False)
class GameTrace:
    v0_result: OnePlayerResult
    outer: tuple
    mode: InitMode

    @property
    def total_inner_steps(self):
        return sum(rec.result.iterations for rec in self.outer)

    @property
    def values(self):
        """``[V0, V1, ..., VN]``."""
        return [self.v0_result.value] + [rec.value for rec in self.outer]


@dataclass(frozen=True, eq=False)
class Solution:
    value: np.ndarray
    sup_stop: frozenset  # D_inf | {phi = psi}, equal to {V = psi}
    inf_stop: frozenset  # S_inf
    shortcut_used: bool
    trace: GameTrace

    @property
    def mode(self):
        return self.trace.mode

    @property
    def outer_iterations(self):
        return len(self.trace.outer)

    def equilibrium_sets(self, spec):
        """``(A, B)`` with the common ``{phi = psi}`` part removed, as checked by
        :func:`verify_equilibrium`."""
        eq = spec.equal_set()
        return self.sup_stop - eq, self.inf_stop - eq


def classify_sets(spec, v0, mode=InitMode.STRICT):
    """Initial inf-player set from the one-player value ``v0``."""
    tol = spec.tol
    mode = InitMode(mode)
    if mode is InitMode.STRICT:
        above = {x for x in range(spec.n) if v0[x] > spec.phi[x] + tol}
        return frozenset(above) | spec.equal_set()
    return frozenset(x for x in range(spec.n) if v0[x] >= spec.phi[x] - tol)


def solve_game(spec: GameSpec, mode=InitMode.STRICT):
    """Value, critical sets and equilibrium hitting sets of the game."""
    mode = InitMode(mode)
    tol = spec.tol
    n = spec.n
    v0r = forward_optimal_stopping(spec.Q, spec.beta, spec.psi, (), spec.phi, tol)
    v0 = v0r.value

    if not any(v0[x] > spec.phi[x] + tol for x in range(n)):
        inf_stop = frozenset(x for x in range(n) if abs(v0[x] - spec.phi[x]) <= tol)
        return Solution(
            value=v0,
            sup_stop=v0r.stop_set,
            inf_stop=inf_stop,
            shortcut_used=True,
            trace=GameTrace(v0_result=v0r, outer=(), mode=mode),
        )

    eq = spec.equal_set()
    S = classify_sets(spec, v0, mode)
    records = []
    while True:
        k = len(records) + 1
        if k >= n:
            raise IterationOverflow(
                f"outer iteration count reached |E| = {n}; the set sequence did not settle"
            )
        res = forward_optimal_stopping(spec.Q, spec.beta, spec.psi, S, spec.phi, tol)
        records.append(OuterRecord(k=k, inf_set=S, result=res))
        d = defect(spec.Q, spec.beta, res.value)
        S_next = frozenset(x for x in S if d[x] >= -tol) | eq
        if S_next == S:
            break
        S = S_next

    last = records[-1]
    return Solution(
        value=last.value,
        sup_stop=last.sup_set | eq,
        inf_stop=last.inf_set,
        shortcut_used=False,
        trace=GameTrace(v0_result=v0r, outer=tuple(records), mode=mode),
    )


@dataclass(frozen=True)
class StateCheck:
    state: int
    region: str  # "A", "B", "equal" or "free"
    defect: float
    above_psi: float  # V - psi
    below_phi: float  # phi - V
    ok: bool
    reason: str = ""


@dataclass(frozen=True)
class NEReport:
    checks: tuple
    tol: float

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    @property
    def failing_states(self):
        return [c.state for c in self.checks if not c.ok]


def verify_equilibrium(spec, A, B, V, tol=None):
    """Check the sufficient conditions for ``(h(A | E0), h(B | E0))`` to be an
    equilibrium with value ``V``, where ``E0 = {phi = psi}``.

    On ``A``: ``V = psi`` and ``Q V - beta V <= 0``.  On ``B``: ``V = phi`` and
    ``Q V - beta V >= 0``.  Off ``A | B | E0``: ``Q V - beta V = 0``.
    Everywhere: ``psi <= V <= phi``.
    """
    n = spec.n
    tol = spec.tol if tol is None else tol
    A = stopping_set(A, n)
    B = stopping_set(B, n)
    eq = spec.equal_set()
    problems = []
    if A & B:
        problems.append(f"A and B overlap on {sorted(A & B)}")
    if A & eq:
        problems.append(f"A meets {{phi = psi}} on {sorted(A & eq)}")
    if B & eq:
        problems.append(f"B meets {{phi = psi}} on {sorted(B & eq)}")
    if problems:
        raise PreconditionViolated("; ".join(problems))

    V = np.asarray(V)
    d = defect(spec.Q, spec.beta, V)
    checks = []
    for x in range(n):
        lo = V[x] - spec.psi[x]
        hi = spec.phi[x] - V[x]
        why = []
        if lo < -tol:
            why.append("V < psi")
        if hi < -tol:
            why.append("V > phi")
        if x in A:
            region = "A"
            if abs(lo) > tol:
                why.append("V != psi on A")
            if d[x] > tol:
                why.append("defect > 0 on A")
        elif x in B:
            region = "B"
            if abs(hi) > tol:
                why.append("V != phi on B")
            if d[x] < -tol:
                why.append("defect < 0 on B")
        elif x in eq:
            region = "equal"
        else:
            region = "free"
            if abs(d[x]) > tol:
                why.append("defect != 0 off A, B")
        checks.append(
            StateCheck(x, region, float(d[x]), float(lo), float(hi), not why, "; ".join(why))
        )
    return NEReport(checks=tuple(checks), tol=float(tol))


@dataclass(frozen=True, eq=False)
class ModeComparison:
    strict: Solution
    weak: Solution
    violations: tuple
    value_gap: float

    @property
    def limits_equal(self):
        return self.strict.inf_stop == self.weak.inf_stop

    @property
    def ok(self):
        return not self.violations


def _padded(records, upto):
    out = list(records)
    while out and len(out) < upto:
        out.append(out[-1])
    return out


def compare_modes(spec, value_tol=1e-8):
    """Run both initializations and check that the strict sequence is nested
    inside the weak one step by step and that both reach the same value."""
    strict = solve_game(spec, InitMode.STRICT)
    weak = solve_game(spec, InitMode.WEAK)
    tol = spec.tol
    violations = []
    # both sequences are stationary after they settle, so pad the shorter one
    m = max(strict.outer_iterations, weak.outer_iterations)
    for rs, rw in zip(_padded(strict.trace.outer, m), _padded(weak.trace.outer, m)):
        k = max(rs.k, rw.k)
        if not rs.inf_set <= rw.inf_set:
            violations.append(f"k={k}: S_k not contained in weak S_k")
        if not rw.sup_set <= rs.sup_set:
            violations.append(f"k={k}: weak D_k not contained in D_k")
        if any(rs.value[x] > rw.value[x] + tol for x in range(spec.n)):
            violations.append(f"k={k}: V_k exceeds weak V_k")
    gap = float(np.max(np.abs(np.asarray(strict.value, dtype=float)
                              - np.asarray(weak.value, dtype=float))))
    if gap > value_tol:
        violations.append(f"final values differ by {gap:.3e}")
    return ModeComparison(strict=strict, weak=weak, violations=tuple(violations), value_gap=gap)
