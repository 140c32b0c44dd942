"""Scalar-field helpers shared by the solver modules.

Vectors and matrices are numpy arrays.  Float arithmetic uses ``float64``;
exact arithmetic uses ``object`` arrays holding :class:`fractions.Fraction`.
Every routine below dispatches on the dtype so the algorithms themselves are
written once.
"""
from fractions import Fraction

import numpy as np

from .errors import SolverFailure


def is_exact(a):
    return np.asarray(a).dtype == object


def to_fraction(x):
    """Exact rational for ``x``.  Floats go through their decimal repr so
    ``0.2`` becomes ``1/5`` rather than the binary expansion."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(repr(float(x)))


def as_array(values, exact=False):
    if exact:
        arr = np.asarray(values, dtype=object)
        flat = [to_fraction(v) for v in arr.ravel()]
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = flat
        return out
    if is_exact(values):
        return np.asarray(values, dtype=object).astype(float)
    return np.array(values, dtype=float)


def zeros(n, exact=False):
    if exact:
        out = np.empty(n, dtype=object)
        out[:] = Fraction(0)
        return out
    return np.zeros(n)


def scalar(x, exact=False):
    return to_fraction(x) if exact else float(x)


def matvec(A, f):
    if is_exact(A) or is_exact(f):
        return np.dot(np.asarray(A, dtype=object), np.asarray(f, dtype=object))
    return A @ f


def sup_norm(a):
    a = np.asarray(a)
    if a.size == 0:
        return 0.0 if not is_exact(a) else Fraction(0)
    return max(abs(v) for v in a.ravel()) if is_exact(a) else float(np.max(np.abs(a)))


def _fraction_solve(A, b):
    n = len(b)
    M = [[Fraction(A[i, j]) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SolverFailure("singular system in exact solve")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        row = [v / p for v in M[col]]
        M[col] = row
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], row)]
    out = np.empty(n, dtype=object)
    out[:] = [M[i][n] for i in range(n)]
    return out


def solve_linear(A, b, rtol=1e-9):
    """Solve ``A x = b``.

    Float systems use LU (LAPACK) plus one step of iterative refinement and
    raise :class:`SolverFailure` if the scaled residual is still above
    ``rtol``.  Exact systems use Gauss-Jordan elimination over the rationals.
    """
    if len(b) == 0:
        return zeros(0, exact=is_exact(A) or is_exact(b))
    if is_exact(A) or is_exact(b):
        return _fraction_solve(A, b)
    x = np.linalg.solve(A, b)
    x = x + np.linalg.solve(A, b - A @ x)
    resid = np.max(np.abs(A @ x - b)) if len(b) else 0.0
    scale = 1.0 + np.max(np.abs(b)) + np.max(np.abs(A)) * np.max(np.abs(x))
    if not np.isfinite(resid) or resid > rtol * scale:
        raise SolverFailure(f"residual {resid:.3e} exceeds tolerance")
    return x
