"""Process-wide size bounds."""

from contextlib import contextmanager

DEFAULT_MAX_UNIVERSE = 4096

_max_universe = DEFAULT_MAX_UNIVERSE


def max_universe() -> int:
    return _max_universe


def set_max_universe(value: int) -> None:
    global _max_universe
    if value < 1:
        raise ValueError("max universe must be positive")
    _max_universe = int(value)


@contextmanager
def universe_bound(value: int):
    old = _max_universe
    set_max_universe(value)
    try:
        yield
    finally:
        set_max_universe(old)


def check_bound(size: int, what: str, bound: int | None = None) -> None:
    from .errors import BoundExceeded

    limit = _max_universe if bound is None else bound
    if size > limit:
        raise BoundExceeded(f"{what} has size {size}, above the bound {limit}")
