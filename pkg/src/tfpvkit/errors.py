"""Exception hierarchy.

Input problems (bad files, bad flags, malformed networks) derive from
:class:`InputError`; the CLI maps them to exit code 2. Analyses that run but
cannot reach a positive conclusion raise :class:`AnalysisError` subclasses.
"""


class CrnError(Exception):
    """Base class for every error raised by tfpvkit."""


class InputError(CrnError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            where = f"line {line}" if col is None else f"line {line}, column {col}"
            message = f"{where}: {message}"
        super().__init__(message)


class CrnSyntaxError(InputError):
    pass


class DuplicateReaction(InputError):
    pass


class SelfLoop(InputError):
    pass


class UnboundCoefficient(InputError):
    pass


class UnboundRate(InputError):
    pass


class DuplicateLabel(InputError):
    pass


class InvalidNetwork(InputError):
    pass


class AnalysisError(CrnError):
    pass


class NotWeaklyReversible(AnalysisError):
    pass


class NotFirstOrder(AnalysisError):
    pass


class NotLtc(AnalysisError):
    pass


class BadSupport(AnalysisError):
    pass


class SingularSelection(AnalysisError):
    pass


class NothingFound(AnalysisError):
    """An enumeration finished without producing any result."""


class SizeLimit(AnalysisError):
    pass


class DegenerateConstantTerm(AnalysisError):
    """The polynomial handed to the Hurwitz test has a zero constant term."""


class NumericalError(CrnError):
    pass


class NonNegativityBreach(NumericalError):
    pass


class NonFinite(NumericalError):
    pass
