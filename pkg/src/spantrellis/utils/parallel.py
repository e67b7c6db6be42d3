"""Order-preserving parallel map.

Results come back in input order whatever the worker count, so any
reduction done over them afterwards is bitwise reproducible.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply ``fn`` to every item, optionally on a thread pool.

    Args:
        fn (Callable): Pure function of one item.
        items (Iterable): Inputs.
        workers (int): Thread count; 1 runs inline.

    Returns:
        list: ``[fn(x) for x in items]`` in input order.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
