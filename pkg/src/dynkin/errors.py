"""Exception hierarchy for the solver and its command line front end."""


class DynkinError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(DynkinError, ValueError):
    pass


class InvalidGenerator(DynkinError, ValueError):
    """Raised when a rate matrix is not a Markov generator.

    ``violations`` holds tuples such as ``("NonSquare",)``,
    ``("NegativeOffDiagonal", x, y)`` or ``("RowSumNonzero", x, residual)``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        shown = ", ".join(_fmt(v) for v in self.violations[:5])
        more = len(self.violations) - 5
        if more > 0:
            shown += f", ... ({more} more)"
        super().__init__(f"invalid generator: {shown}")


def _fmt(violation):
    kind, *args = violation
    return f"{kind}({', '.join(str(a) for a in args)})" if args else kind


class InvalidGame(DynkinError, ValueError):
    """Raised when (beta, psi, phi) do not define an admissible game."""


class NonNegativityViolation(InvalidGame):
    pass


class OverlappingSets(DynkinError, ValueError):
    def __init__(self, overlap):
        self.overlap = frozenset(overlap)
        super().__init__(f"sets overlap on states {sorted(self.overlap)}")


class SolverFailure(DynkinError, ArithmeticError):
    pass


class IterationOverflow(DynkinError, RuntimeError):
    pass


class PreconditionViolated(DynkinError, ValueError):
    pass


class MaxIterExceeded(DynkinError, RuntimeError):
    pass


class TooManyStates(DynkinError, ValueError):
    pass


class SubsetViolation(DynkinError, ValueError):
    pass


class BadParameter(DynkinError, ValueError):
    pass


class SpecFileError(DynkinError, ValueError):
    """Problem reading a spec file: malformed JSON or a bad field."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{' '.join(where)}: " if where else ""
        super().__init__(prefix + message)
