"""Exception hierarchy shared by every stage of the pipeline."""


class LtlMdpError(Exception):
    """Base class for all errors raised by ltlmdp."""


class ParseError(LtlMdpError, ValueError):
    """Malformed input text (model document, formula, HOA file)."""

    def __init__(self, message, line=None, field=None, position=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if position is not None:
            where.append(f"position {position}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field
        self.position = position


class ValidationError(LtlMdpError, ValueError):
    """A model violates one of its invariants."""


class CapacityError(LtlMdpError, RuntimeError):
    """A configured size cap was exceeded."""


class SolverError(LtlMdpError, RuntimeError):
    """Value iteration failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InputError(LtlMdpError, ValueError):
    """An argument is outside the domain an operation accepts."""


class UnsupportedFeatureError(LtlMdpError, ValueError):
    """Input uses a feature outside the supported subset."""


class ObservationError(LtlMdpError, RuntimeError):
    """A runtime observation is impossible under the model."""
