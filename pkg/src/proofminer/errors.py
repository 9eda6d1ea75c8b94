"""Exception hierarchy shared by every stage of the pipeline."""


class ProofMinerError(Exception):
    pass


class ParseError(ProofMinerError):
    def __init__(self, message, line=None, column=None, path=None):
        self.line = line
        self.column = column
        self.path = path
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path:
            where.append(f"at {path}")
        if where:
            message = f"{message} ({'; '.join(where)})"
        super().__init__(message)


class ArityError(ParseError):
    pass


class DuplicateName(ParseError):
    pass


class ForwardReference(ParseError):
    pass


class TypeResolutionError(ProofMinerError):
    pass


class UnboundVariable(TypeResolutionError):
    pass


class UnknownName(TypeResolutionError):
    pass


class ValuationMiss(ProofMinerError):
    pass


class UnknownComponent(ProofMinerError):
    pass


class ProximityRange(ProofMinerError, ValueError):
    pass


class GranularityRange(ProofMinerError, ValueError):
    pass


class KTooLarge(ProofMinerError, ValueError):
    pass


class DimensionMismatch(ProofMinerError, ValueError):
    pass


class EmptyModel(ProofMinerError):
    pass


class TargetNotClustered(ProofMinerError, KeyError):
    pass


class UnknownLemma(ProofMinerError, KeyError):
    pass


class CheckerFailure(ProofMinerError):
    """The checker command crashed or reported an infrastructure error."""

    def __init__(self, message, returncode=None):
        self.returncode = returncode
        super().__init__(message)
