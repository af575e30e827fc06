"""Exception types shared across the package."""


class PbmError(Exception):
    """Base class for every error raised by this package."""


# --- expression language -----------------------------------------------


class ExprError(PbmError):
    pass


class ExprSyntaxError(ExprError):
    """Malformed expression text.

    Carries the character offset of the failure and the set of token
    descriptions that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: tuple = ()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} (offset {offset})"
        if expected:
            detail += " — expected " + ", ".join(sorted(self.expected))
        super().__init__(detail)


class ArityError(ExprError):
    """Expression uses variables beyond its declared arity."""


class EvaluationError(ExprError):
    """Expression cannot be evaluated at the given point."""


class DomainError(EvaluationError):
    """Argument outside a function's domain (log/sqrt of a negative, ...)."""


class DivisionByZero(EvaluationError):
    pass


# --- scenario files -----------------------------------------------------


class ScenarioError(PbmError):
    pass


class MissingSection(ScenarioError):
    def __init__(self, section: str):
        self.section = section
        super().__init__(f"scenario file is missing the [{section}] section")


class MissingKey(ScenarioError):
    def __init__(self, section: str, key: str):
        self.section = section
        self.key = key
        super().__init__(f"scenario file is missing '{key}' in [{section}]")


class UnknownPreset(ScenarioError):
    pass


# --- spaces, sampling, grids --------------------------------------------


class EmptySampleSet(PbmError):
    pass


class UnsortedSamples(PbmError):
    pass


class SequenceTooShort(PbmError):
    pass


class DistanceEvaluationError(PbmError):
    """The distance expression was undefined at a sampled pair."""


class EmptyGrid(PbmError):
    pass


class EmptyIntersection(PbmError):
    pass


# --- solver ---------------------------------------------------------------


class SolverError(PbmError):
    pass


class PreimageSolverUnavailable(SolverError):
    """No way to produce a preimage: no inverse and no usable bracket."""


class NoBracketFound(PreimageSolverUnavailable):
    pass


class InverseInconsistent(PreimageSolverUnavailable):
    """A supplied inverse expression failed forward validation."""


class NotConverged(SolverError):
    pass
