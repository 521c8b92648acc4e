"""Process-wide defaults: working precision and worker thread count."""

import contextlib
import os

DEFAULT_PRECISION = 192
MIN_PRECISION = 64
GUARD_BITS = 32

_threads = 1


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class ResourceError(RuntimeError):
    """A table or buffer could not be allocated."""


def default_precision() -> int:
    env = os.environ.get("THETALAB_PRECISION")
    if env:
        return check_precision(int(env))
    return DEFAULT_PRECISION


def check_precision(precision: int) -> int:
    if precision < MIN_PRECISION:
        raise PreconditionError(f"precision must be at least {MIN_PRECISION} bits, got {precision}")
    return int(precision)


def thread_count() -> int:
    return _threads


def set_thread_count(n) -> None:
    """Set worker threads for chunked sums; ``"auto"`` or 0 uses every CPU."""
    global _threads
    if n in (None, "auto", 0):
        n = os.cpu_count() or 1
    n = int(n)
    if n < 1:
        raise PreconditionError("thread count must be positive")
    _threads = n


@contextlib.contextmanager
def threads(n):
    old = _threads
    set_thread_count(n)
    try:
        yield
    finally:
        set_thread_count(old)
