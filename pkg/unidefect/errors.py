"""Define package exceptions."""
from __future__ import annotations

import json
from typing import NoReturn


class UnidefectError(Exception):
    """Define a base exception."""

    pass


class ConsistencyError(UnidefectError):
    """Define an error related to a violated internal invariant."""

    pass


class InvalidParameterError(UnidefectError, ValueError):
    """Define an error related to an out-of-range argument."""

    pass


class MatrixSourceError(UnidefectError):
    """Define an error related to an unreadable or unknown matrix source."""

    pass


class NotUnitaryError(UnidefectError):
    """Define an error related to a matrix that fails the unitarity check."""

    pass


class NumericGuardError(InvalidParameterError):
    """Define an error related to a numeric computation beyond its size guard."""

    pass


SOURCE_ERROR_TO_MESSAGE_MAP = {
    FileNotFoundError: "No such file",
    IsADirectoryError: "Is a directory",
    json.JSONDecodeError: "Malformed JSON",
    PermissionError: "Permission denied",
}


def raise_source_error(source: str, err: Exception) -> NoReturn:
    """Wrap a low-level parsing or I/O error in a MatrixSourceError."""
    try:
        [reason] = [
            v for k, v in SOURCE_ERROR_TO_MESSAGE_MAP.items() if isinstance(err, k)
        ]
    except ValueError:
        reason = str(err) or type(err).__name__

    raise MatrixSourceError(f"Error while reading {source}: {reason}") from err
