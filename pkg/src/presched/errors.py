"""Shared error type.

Every operation that rejects its input raises SchedError with a stable
``code`` string so callers (and the HTTP layer) can branch without parsing
messages.
"""

from __future__ import annotations


class SchedError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.detail = message


def bad_params(message: str) -> SchedError:
    return SchedError("BAD_PARAMS", message)
