"""Exception hierarchy shared by the whole pipeline.

Every error that can surface through the service or the CLI carries a stable
``kind`` string; the CLI maps kinds to exit codes and the service puts them in
the error envelope.
"""


class LogsingError(Exception):
    kind = "internal"


class EquationSyntaxError(LogsingError):
    """Raised by the tokenizer/parser; carries a 1-based line and column."""

    kind = "parse"

    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class ConfigurationError(LogsingError):
    """Mismatched dimensions or truncation settings between operands."""

    kind = "config"


class AssumptionError(LogsingError):
    """The equation falls outside the log-leading regime handled here."""

    kind = "assumptions"


class BalanceError(AssumptionError):
    """Prescribed leading term does not kill the dominant balance."""

    kind = "assumptions"


class LeadingRootError(LogsingError):
    """No usable root of the leading-coefficient equation (absent, repeated,
    or not representable in exact mode)."""

    kind = "degenerate-root"


class ResonanceError(LogsingError):
    """The linear solve hit a root of the indicial polynomial."""

    kind = "resonance"

    def __init__(self, exponent, message=None):
        super().__init__(message or f"resonance at exponent {exponent}")
        self.exponent = exponent


class MissingResonanceDataError(ResonanceError):
    def __init__(self, exponent):
        super().__init__(exponent, f"no free coefficient supplied for resonant exponent {exponent}")


class CompatibilityError(ResonanceError):
    def __init__(self, exponent, message=None):
        super().__init__(exponent, message or f"resonance at exponent {exponent} is incompatible with the data")


class CertificationError(LogsingError):
    """A residual or majorant certificate could not be established."""

    kind = "certification"
