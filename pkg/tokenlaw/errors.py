"""Exception hierarchy for Tokenlaw."""


class TokenlawError(Exception):
    """Base class for all Tokenlaw errors."""


class InputError(TokenlawError):
    """An input file or value could not be read or is malformed."""


class LanguageSpecError(InputError, ValueError):
    """A language specification violates the file grammar or its invariants."""


class RecordFormatError(InputError, ValueError):
    """A component record file could not be parsed."""


class GeneDataError(InputError, ValueError):
    """A gene-length table could not be parsed or failed validation."""


class ConfigError(InputError, ValueError):
    """An experiment or scan configuration is invalid."""


class AnalysisError(TokenlawError):
    """A numeric operation was called outside its preconditions."""


class EmptyInputError(AnalysisError, ValueError):
    """An operation that needs at least one item received none."""


class InsufficientDataError(AnalysisError, ValueError):
    """Fewer items than an operation needs, e.g. regression points or species."""


class FitRangeError(InsufficientDataError):
    """Too few points fall inside the requested fit range."""

    def __init__(self, message: str, s_min: float, s_max: float, found: int):
        super().__init__(message)
        self.s_min = s_min
        self.s_max = s_max
        self.found = found


class DegenerateFitError(AnalysisError, ValueError):
    """A regression has zero variance in its predictor or its response."""

    def __init__(self, message: str, zero_variance: str):
        super().__init__(message)
        # "x" or "y"
        self.zero_variance = zero_variance


class StateSpaceTooLargeError(AnalysisError, ValueError):
    """Exact enumeration would exceed the configured state budget."""
