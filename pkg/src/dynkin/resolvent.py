"""Discounted hitting values via masked resolvent systems.

For a stop set ``A`` and boundary data ``b`` the function

    g(x) = E_x[exp(-beta * h(A)) b(X_h(A)); h(A) < inf]

is the unique solution of ``g = b`` on ``A`` and ``Q g - beta g = 0`` off
``A``.  The game payoff ``R_x(h(B), h(C))`` for disjoint ``B, C`` is the
special case ``A = B | C`` with ``b = psi`` on ``B`` and ``b = phi`` on ``C``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import numeric
from .ctmc import GeneratorMatrix, StateSpace, apply_generator, validate_generator
from .errors import DimensionMismatch, InvalidGame, NonNegativityViolation, OverlappingSets

__all__ = [
    "GameSpec",
    "classification_tol",
    "stopping_set",
    "masked_resolvent_solve",
    "hitting_payoff",
    "defect",
]


def stopping_set(members, n=None):
    """Canonical stopping set: a frozenset of state indices."""
    s = frozenset(int(i) for i in members)
    if n is not None and any(i < 0 or i >= n for i in s):
        raise ValueError(f"state index out of range [0, {n}): {sorted(s)}")
    return s


@dataclass(frozen=True, eq=False)
class GameSpec:
    """One game instance ``(Q, beta, psi, phi)`` on a labeled state space."""

    states: StateSpace
    Q: GeneratorMatrix
    beta: object
    psi: np.ndarray
    phi: np.ndarray
    tol: float = field(init=False)

    def __post_init__(self):
        n = len(self.states)
        if self.Q.size != n:
            raise DimensionMismatch(f"generator has {self.Q.size} states, expected {n}")
        exact = self.Q.exact
        psi = numeric.as_array(self.psi, exact=exact)
        phi = numeric.as_array(self.phi, exact=exact)
        beta = numeric.scalar(self.beta, exact=exact)
        for name, vec in (("psi", psi), ("phi", phi)):
            if vec.shape != (n,):
                raise DimensionMismatch(f"{name} has shape {vec.shape}, expected ({n},)")
            if not exact and not np.all(np.isfinite(vec)):
                raise InvalidGame(f"{name} has non-finite entries")
        if not beta > 0:
            raise InvalidGame(f"beta must be positive, got {beta}")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "tol", classification_tol(beta, psi, phi))

        neg = [x for x in range(n) if psi[x] < -self.tol]
        if neg:
            raise NonNegativityViolation(f"psi is negative at states {neg}")
        bad = [x for x in range(n) if psi[x] > phi[x] + self.tol]
        if bad:
            raise InvalidGame(f"psi > phi at states {bad}")

    @classmethod
    def build(cls, Q, beta, psi, phi, states=None, exact=False):
        """Validate raw arrays and assemble a spec (float or exact)."""
        gen = Q if isinstance(Q, GeneratorMatrix) else validate_generator(Q)
        if exact and not gen.exact:
            gen = gen.as_exact()
        if states is None:
            states = StateSpace.range(gen.size)
        elif not isinstance(states, StateSpace):
            states = StateSpace(tuple(states))
        return cls(states=states, Q=gen, beta=beta, psi=psi, phi=phi)

    @property
    def n(self):
        return len(self.states)

    @property
    def exact(self):
        return self.Q.exact

    def with_phi(self, phi):
        return GameSpec(states=self.states, Q=self.Q, beta=self.beta, psi=self.psi, phi=phi)

    def with_tol(self, tol):
        """Copy with the classification slack overridden."""
        out = GameSpec(states=self.states, Q=self.Q, beta=self.beta, psi=self.psi, phi=self.phi)
        object.__setattr__(out, "tol", tol)
        return out

    def to_float(self):
        if not self.exact:
            return self
        return GameSpec(
            states=self.states,
            Q=self.Q.as_float(),
            beta=float(self.beta),
            psi=numeric.as_array(self.psi),
            phi=numeric.as_array(self.phi),
        )

    def equal_set(self):
        """States where the two payoffs coincide, ``{phi = psi}``."""
        return frozenset(x for x in range(self.n) if abs(self.phi[x] - self.psi[x]) <= self.tol)


def classification_tol(beta, psi, phi=None):
    """Slack used by every set-membership test (zero in exact mode)."""
    phi = psi if phi is None else phi
    if numeric.is_exact(psi):
        return 0
    scale = max(numeric.sup_norm(psi), numeric.sup_norm(phi), beta * numeric.sup_norm(phi))
    return 1e-9 * (1.0 + scale)


def masked_resolvent_solve(Q, beta, stop_set, boundary):
    """Discounted value of ``boundary`` collected at the first hit of ``stop_set``.

    Returns ``g`` with ``g = boundary`` on ``stop_set`` (exactly) and
    ``Q g - beta g = 0`` elsewhere.  Rows of ``Q`` on the stop set are
    dropped and the remaining block is solved directly.
    """
    n = Q.size
    exact = Q.exact
    boundary = numeric.as_array(boundary, exact=exact)
    if boundary.shape != (n,):
        raise DimensionMismatch(f"boundary has shape {boundary.shape}, expected ({n},)")
    beta = numeric.scalar(beta, exact=exact)
    stop = sorted(stopping_set(stop_set, n))
    g = numeric.zeros(n, exact=exact)
    if not stop:
        return g
    free = [x for x in range(n) if x not in set(stop)]
    g[stop] = boundary[stop]
    if free:
        A = Q.entries[np.ix_(free, free)].copy()
        for i in range(len(free)):
            A[i, i] = A[i, i] - beta
        rhs = -numeric.matvec(Q.entries[np.ix_(free, stop)], boundary[stop])
        g[free] = numeric.solve_linear(A, rhs)
    return g


def hitting_payoff(spec, B, C):
    """``R_x(h(B), h(C))`` for every start state ``x``; ``B`` and ``C`` disjoint."""
    B = stopping_set(B, spec.n)
    C = stopping_set(C, spec.n)
    if B & C:
        raise OverlappingSets(B & C)
    boundary = numeric.zeros(spec.n, exact=spec.exact)
    if B:
        boundary[sorted(B)] = spec.psi[sorted(B)]
    if C:
        boundary[sorted(C)] = spec.phi[sorted(C)]
    return masked_resolvent_solve(spec.Q, spec.beta, B | C, boundary)


def defect(Q, beta, f):
    """The vector ``Q f - beta f``; nonpositive everywhere iff ``f`` is beta-excessive."""
    f = np.asarray(f)
    return apply_generator(Q, f) - numeric.scalar(beta, exact=numeric.is_exact(f) or Q.exact) * f
