"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ModalError(Exception):
    pass


class ParseError(ModalError, ValueError):
    """Syntax error in formula text.

    ``offset`` is a byte offset into the UTF-8 encoded input and
    ``expected`` the set of token kinds that would have been accepted.
    """

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        exp = ", ".join(sorted(self.expected))
        detail = f" (expected one of: {exp})" if exp else ""
        super().__init__(f"{message} at byte {offset}{detail}")


class PreconditionError(ModalError, ValueError):
    pass


class NotValidError(ModalError, ValueError):
    """Raised when an interpolant is requested for an implication that is not valid."""


class ResourceGuardError(ModalError):
    """A configured size or time limit was exceeded."""


class SizeGuardError(ResourceGuardError):
    pass


class TimeoutGuardError(ResourceGuardError):
    pass
