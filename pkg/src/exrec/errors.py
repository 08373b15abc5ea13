"""Exception hierarchy shared by every module."""


class ExrecError(Exception):
    """Base class for all errors raised by exrec."""


class GraphError(ExrecError):
    pass


class MalformedLine(GraphError):
    def __init__(self, lineno: int, detail: str):
        super().__init__(f"line {lineno}: {detail}")
        self.lineno = lineno


class LayerViolation(GraphError):
    pass


class EmptyGraph(GraphError):
    pass


class UnknownNode(GraphError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class WrongKind(GraphError):
    pass


class WalkError(ExrecError, ValueError):
    pass


class InvalidAlpha(WalkError):
    pass


class EmptyQuery(WalkError):
    pass


class InvalidConfig(ExrecError, ValueError):
    pass


class EmbeddingError(ExrecError, ValueError):
    pass


class EmptyTokenList(EmbeddingError):
    pass


class ZeroVector(EmbeddingError):
    pass


class DimensionMismatch(EmbeddingError):
    pass


class NoBigrams(ExrecError, ValueError):
    pass


class SyllabusError(ExrecError):
    pass


class DuplicateKc(SyllabusError):
    pass


class EmptyFile(SyllabusError):
    pass


class UnknownCutoff(SyllabusError):
    pass


class EvalError(ExrecError):
    pass


class EmptyGroundTruth(EvalError):
    pass


class EmptyCaseList(EvalError):
    pass


class GraphTooLarge(EvalError):
    pass


class NoMass(EvalError):
    pass


class InfeasibleConfig(EvalError, ValueError):
    pass


class CaseError(EvalError):
    """Wraps an error raised while evaluating or serving one request."""

    def __init__(self, case_id: str, cause: Exception):
        super().__init__(f"{case_id}: {type(cause).__name__}: {cause}")
        self.case_id = case_id
        self.cause = cause


class MalformedRecord(ExrecError, ValueError):
    pass
