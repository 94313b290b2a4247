"""Exception hierarchy shared by the library and the CLI.

Each class carries a machine-readable ``category`` and the CLI exit code
associated with it.
"""

from __future__ import annotations


class NneigError(Exception):
    category = "error"
    exit_code = 1


class InputError(NneigError):
    """Invalid input: bad matrix, bad parameter, unsupported configuration."""

    category = "input"
    exit_code = 2


class ParseError(InputError):
    """Malformed matrix file; records where parsing stopped."""

    def __init__(self, message: str, path: str | None = None,
                 line: int | None = None, column: int | None = None):
        loc = ""
        if path is not None:
            loc += f" in {path}"
        if line is not None:
            loc += f" at line {line}"
            if column is not None:
                loc += f", column {column}"
        super().__init__(message + loc)
        self.path = path
        self.line = line
        self.column = column


class BoundViolationError(NneigError):
    """A search level found no acceptable point: the supplied (kappa, m)
    underestimate the true conditioning/block structure."""

    category = "bound-violation"
    exit_code = 3

    def __init__(self, message: str, level: int | None = None, trace=None):
        super().__init__(message)
        self.level = level
        self.trace = trace


class ProbabilisticFailureError(NneigError):
    """A noisy-oracle run exhausted its failure budget (a level produced no
    acceptance under noise)."""

    category = "probabilistic-failure"
    exit_code = 4

    def __init__(self, message: str, level: int | None = None, trace=None):
        super().__init__(message)
        self.level = level
        self.trace = trace


class ApproximationError(NneigError):
    """A polynomial construction could not reach the requested tolerance
    below its degree cap."""

    category = "approximation"
    exit_code = 5
