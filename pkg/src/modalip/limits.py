"""Cooperative deadlines for the exponential procedures.

Long-running loops call :func:`check_deadline`; callers install a deadline with
``with deadline(ms): ...``.  Deadlines are per context, so worker threads do not
interfere with each other.
"""

from __future__ import annotations

import contextvars
import time
from contextlib import contextmanager
from typing import Iterator, Optional

from .errors import SizeGuardError, TimeoutGuardError

_DEADLINE: contextvars.ContextVar[Optional[float]] = contextvars.ContextVar("modalip_deadline", default=None)


@contextmanager
def deadline(timeout_ms: Optional[float]) -> Iterator[None]:
    if timeout_ms is None:
        yield
        return
    token = _DEADLINE.set(time.monotonic() + timeout_ms / 1000.0)
    try:
        yield
    finally:
        _DEADLINE.reset(token)


def check_deadline() -> None:
    limit = _DEADLINE.get()
    if limit is not None and time.monotonic() > limit:
        raise TimeoutGuardError("time limit exceeded")


_TYPE_LIMIT: contextvars.ContextVar[Optional[int]] = contextvars.ContextVar("modalip_type_limit", default=None)


@contextmanager
def type_limit(max_types: Optional[int]) -> Iterator[None]:
    """Cap the number of combined types an exact elimination may enumerate."""
    token = _TYPE_LIMIT.set(max_types)
    try:
        yield
    finally:
        _TYPE_LIMIT.reset(token)


def check_type_count(count: int) -> None:
    limit = _TYPE_LIMIT.get()
    if limit is not None and count > limit:
        raise SizeGuardError(f"{count} combined types exceed the limit of {limit}")
