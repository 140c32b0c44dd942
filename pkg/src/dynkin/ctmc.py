"""Finite-state continuous-time Markov chains.

A chain is given by its generator ``Q``: nonnegative off-diagonal rates,
rows summing to zero.  This module validates generators, applies them to
functions on the state space, uniformizes them into a discrete-time chain
and splits the state space into recurrent (closed) and transient classes.
"""
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import numeric
from .errors import DimensionMismatch, InvalidGenerator

__all__ = [
    "StateSpace",
    "GeneratorMatrix",
    "UniformizedChain",
    "ClassDecomposition",
    "validate_generator",
    "apply_generator",
    "uniformize",
    "recurrent_classes",
]


@dataclass(frozen=True)
class StateSpace:
    labels: tuple

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        if not labels:
            raise ValueError("state space must contain at least one state")
        if len(set(labels)) != len(labels):
            dupes = sorted({s for s in labels if labels.count(s) > 1})
            raise ValueError(f"duplicate state labels: {dupes}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def range(cls, n):
        return cls(tuple(str(i) for i in range(n)))

    def __len__(self):
        return len(self.labels)

    def index(self, label):
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"unknown state label {label!r}") from None


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """A validated generator.  Build through :func:`validate_generator`."""

    entries: np.ndarray

    @property
    def size(self):
        return self.entries.shape[0]

    @property
    def exact(self):
        return numeric.is_exact(self.entries)

    def as_float(self):
        return GeneratorMatrix(numeric.as_array(self.entries))

    def as_exact(self):
        """Rational copy.  The diagonal is recomputed from the off-diagonal
        rates so rows sum to exactly zero despite float rounding."""
        if self.exact:
            return self
        Q = numeric.as_array(self.entries, exact=True)
        for x in range(Q.shape[0]):
            Q[x, x] = -sum(Q[x, y] for y in range(Q.shape[0]) if y != x)
        return GeneratorMatrix(Q)


@dataclass(frozen=True, eq=False)
class UniformizedChain:
    P: np.ndarray
    L: float


@dataclass(frozen=True)
class ClassDecomposition:
    classes: tuple  # tuple of frozensets
    recurrent: tuple  # bool per class

    @property
    def recurrent_classes(self):
        return tuple(c for c, r in zip(self.classes, self.recurrent) if r)

    @property
    def transient_states(self):
        return frozenset().union(*(c for c, r in zip(self.classes, self.recurrent) if not r))


def validate_generator(entries, tol=None, size=None, exact=None):
    """Check that ``entries`` is a Markov generator and wrap it.

    Parameters
    ----------
    entries : array_like
        Square matrix of rates.
    tol : float, optional
        Row-sum tolerance.  Defaults to ``1e-9 * max(1, max|Q(x,x)|)``;
        exact (rational) input is always checked exactly.
    size : int, optional
        Expected number of states.
    exact : bool, optional
        Force rational (True) or float (False) storage.  By default the
        storage follows the input.

    Raises
    ------
    InvalidGenerator
        With every violated constraint listed in ``violations``.
    """
    raw = np.asarray(entries, dtype=object)
    if exact is None:
        exact = numeric.is_exact(entries) and any(
            not isinstance(v, float) for v in raw.ravel()
        )
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1] or raw.shape[0] == 0:
        raise InvalidGenerator([("NonSquare",)])
    if size is not None and raw.shape[0] != size:
        raise InvalidGenerator([("NonSquare",)])
    Q = numeric.as_array(raw, exact=exact)
    n = Q.shape[0]
    if not exact and not np.all(np.isfinite(Q)):
        raise InvalidGenerator([("NonFinite",)])

    violations = []
    for x in range(n):
        for y in range(n):
            if x != y and Q[x, y] < 0:
                violations.append(("NegativeOffDiagonal", x, y))
    if exact:
        row_tol = 0
    elif tol is None:
        row_tol = 1e-9 * max(1.0, float(np.max(np.abs(np.diag(Q)))))
    else:
        row_tol = tol
    for x in range(n):
        resid = sum(Q[x, :]) if exact else float(np.sum(Q[x, :]))
        if abs(resid) > row_tol:
            violations.append(("RowSumNonzero", x, resid))
    if violations:
        raise InvalidGenerator(violations)
    return GeneratorMatrix(Q)


def apply_generator(Q, f):
    """Return the vector ``(Q f)(x) = sum_y Q(x, y) f(y)``."""
    f = np.asarray(f)
    if f.shape != (Q.size,):
        raise DimensionMismatch(f"expected vector of length {Q.size}, got shape {f.shape}")
    return numeric.matvec(Q.entries, f)


def uniformize(Q, slack=0.0):
    """Uniformize at rate ``L = (1 + slack) * max|Q(x,x)|`` (``L = 1`` when Q is zero).

    Returns the row-stochastic matrix ``P = I + Q / L`` together with ``L``.
    """
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    Qf = numeric.as_array(Q.entries)
    top = float(np.max(np.abs(np.diag(Qf))))
    L = (1.0 + slack) * top if top > 0 else 1.0
    P = np.eye(Q.size) + Qf / L
    # clip round-off so entries stay in [0, 1]
    P = np.clip(P, 0.0, 1.0)
    return UniformizedChain(P=P, L=L)


def recurrent_classes(Q):
    """Split the states into communicating classes of the jump graph.

    A class is recurrent iff no positive rate leaves it.
    """
    n = Q.size
    rows, cols = [], []
    for x in range(n):
        for y in range(n):
            if x != y and Q.entries[x, y] > 0:
                rows.append(x)
                cols.append(y)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    ncomp, labels = connected_components(graph, directed=True, connection="strong")
    leaves = np.zeros(ncomp, dtype=bool)
    for x, y in zip(rows, cols):
        if labels[x] != labels[y]:
            leaves[labels[x]] = True
    # order classes by their smallest state so output is canonical
    members = [frozenset(np.flatnonzero(labels == c).tolist()) for c in range(ncomp)]
    order = sorted(range(ncomp), key=lambda c: min(members[c]))
    return ClassDecomposition(
        classes=tuple(members[c] for c in order),
        recurrent=tuple(not leaves[c] for c in order),
    )
