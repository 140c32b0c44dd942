"""Forward algorithm for one-player optimal stopping.

Starting from the states where stopping immediately is locally optimal,
``C_1 = {Q psi - beta psi <= 0}``, the candidate stop set is shrunk one
sweep at a time: solve for the value of stopping on ``C_n``, then keep only
the states of ``C_n`` where that value is still beta-excessive.  The loop
ends when a sweep removes nothing.

With a nonempty ``forbidden`` set the opponent is assumed to stop (paying
``phi``) the moment the chain enters it.  That is the inner loop of the
game solver.
"""
from dataclasses import dataclass

import numpy as np

from . import numeric
from .errors import NonNegativityViolation
from .resolvent import GameSpec, classification_tol, defect, masked_resolvent_solve, stopping_set

__all__ = ["InnerStep", "OnePlayerResult", "forward_optimal_stopping"]


@dataclass(frozen=True, eq=False)
class InnerStep:
    stop_set: frozenset
    value: np.ndarray


@dataclass(frozen=True, eq=False)
class OnePlayerResult:
    value: np.ndarray
    stop_set: frozenset
    trace: tuple  # InnerStep per sweep
    forbidden: frozenset = frozenset()

    @property
    def iterations(self):
        return len(self.trace)


def forward_optimal_stopping(Q, beta, psi, forbidden=(), phi=None, tol=None):
    """Value of ``sup_tau R_x(tau, h(forbidden))`` and its optimal stop set.

    Parameters
    ----------
    Q : GeneratorMatrix
    beta : positive scalar
    psi : array_like
        Reward for stopping; must be nonnegative.
    forbidden : iterable of int
        States where the opponent stops.  Empty for the plain problem.
    phi : array_like, optional
        Payment collected on ``forbidden``; required when it is nonempty.
    tol : float, optional
        Slack for the sign tests ``Q f - beta f <= 0``.

    Returns
    -------
    OnePlayerResult
        ``stop_set`` is the final candidate set, reported as is rather than
        recomputed by comparing value and ``psi``.
    """
    exact = Q.exact
    psi = numeric.as_array(psi, exact=exact)
    n = Q.size
    forbidden = stopping_set(forbidden, n)
    if forbidden and phi is None:
        raise ValueError("phi is required when forbidden is nonempty")
    phi = psi if phi is None else numeric.as_array(phi, exact=exact)
    if tol is None:
        tol = classification_tol(beta, psi, phi)
    if any(v < -tol for v in psi):
        raise NonNegativityViolation("psi has negative entries")

    boundary = psi.copy()
    if forbidden:
        boundary[sorted(forbidden)] = phi[sorted(forbidden)]

    d = defect(Q, beta, psi)
    current = frozenset(x for x in range(n) if d[x] <= tol) - forbidden
    trace = []
    while True:
        value = masked_resolvent_solve(Q, beta, current | forbidden, boundary)
        trace.append(InnerStep(current, value))
        d = defect(Q, beta, value)
        nxt = frozenset(x for x in current if d[x] <= tol)
        if nxt == current:
            break
        current = nxt
    return OnePlayerResult(value=value, stop_set=current, trace=tuple(trace), forbidden=forbidden)


def solve_one_player(spec: GameSpec, forbidden=()):
    """Convenience wrapper taking payoffs and tolerance from ``spec``."""
    return forward_optimal_stopping(spec.Q, spec.beta, spec.psi, forbidden, spec.phi, spec.tol)

