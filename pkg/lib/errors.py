from typing import Any, Optional


class SfdcError(Exception):
    """Base class for every error raised by the layered encoders."""

    kind = "error"


class RangeError(SfdcError, IndexError):
    kind = "range"


class ParameterError(SfdcError, ValueError):
    kind = "parameter"


class MissingSymbolError(SfdcError, KeyError):
    kind = "missing-symbol"

    def __init__(self, symbol: Any):
        self.symbol = symbol
        super().__init__(f"Symbol {symbol!r} is not in the code table.")

    def __str__(self) -> str:
        # KeyError would repr() the message
        return str(self.args[0])


class PrefixError(SfdcError, ValueError):
    kind = "prefix"


class DecodeError(SfdcError, ValueError):
    kind = "decode"


class FormatError(SfdcError, ValueError):
    kind = "format"

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class VariantError(SfdcError, TypeError):
    kind = "variant"


class ParseError(SfdcError, ValueError):
    kind = "parse"

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"Line {line}: {message}"
        super().__init__(message)


class MismatchError(SfdcError, RuntimeError):
    """Encoded search and plain-text search disagree."""

    kind = "mismatch"
