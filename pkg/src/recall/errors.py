"""Error type shared by every module."""

from __future__ import annotations


class RecallError(Exception):
    """An error carrying a stable machine-readable code."""

    def __init__(self, code: str, message: str = "", details: object = None):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.message = message
        self.details = details


def fail(code: str, message: str = "", details: object = None) -> None:
    raise RecallError(code, message, details)
