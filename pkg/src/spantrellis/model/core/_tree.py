"""Walk parameter containers as trees of named arrays.

Parameters are nested frozen dataclasses (and tuples of them) whose leaf
fields are numpy arrays; any other field (ints, strings) is structure
and is carried over unchanged. Gradients, optimizer moments and
checkpoints all use the same tree shape as the parameters they belong to.
"""

import dataclasses
from typing import Any, Callable, Iterator

import numpy as np


def named_arrays(tree: Any, prefix: str = "") -> Iterator[tuple[str, np.ndarray]]:
    """Yield (dotted name, array) for every array leaf in a fixed order."""
    if isinstance(tree, np.ndarray):
        yield prefix, tree
    elif dataclasses.is_dataclass(tree) and not isinstance(tree, type):
        for f in dataclasses.fields(tree):
            name = f"{prefix}.{f.name}" if prefix else f.name
            yield from named_arrays(getattr(tree, f.name), name)
    elif isinstance(tree, tuple):
        for i, item in enumerate(tree):
            yield from named_arrays(item, f"{prefix}.{i}" if prefix else str(i))


def map_arrays(fn: Callable[..., np.ndarray], tree: Any, *others: Any) -> Any:
    """Build a tree of the same shape with ``fn`` applied leaf-wise.

    Args:
        fn (Callable): Called with the matching leaves of ``tree`` and
            every tree in ``others``.
        tree (Any): Reference tree; non-array leaves are copied from it.
    """
    if isinstance(tree, np.ndarray):
        return fn(tree, *others)
    if dataclasses.is_dataclass(tree) and not isinstance(tree, type):
        changes = {
            f.name: map_arrays(fn, getattr(tree, f.name), *(getattr(o, f.name) for o in others))
            for f in dataclasses.fields(tree)
        }
        return dataclasses.replace(tree, **changes)
    if isinstance(tree, tuple):
        return tuple(map_arrays(fn, item, *(o[i] for o in others)) for i, item in enumerate(tree))
    return tree


def zeros_like(tree: Any) -> Any:
    return map_arrays(np.zeros_like, tree)


def add(tree: Any, other: Any) -> Any:
    return map_arrays(lambda a, b: a + b, tree, other)


def scale(tree: Any, factor: float) -> Any:
    return map_arrays(lambda a: a * factor, tree)


def global_norm(tree: Any) -> float:
    return float(np.sqrt(sum(float(np.sum(a * a)) for _, a in named_arrays(tree))))


def replace_arrays(tree: Any, arrays: dict[str, np.ndarray]) -> Any:
    """Return ``tree`` with every leaf replaced by ``arrays[name]``.

    Raises:
        KeyError: If a leaf name is missing from ``arrays``.
        ValueError: If a replacement has the wrong shape.
    """
    names = iter([name for name, _ in named_arrays(tree)])

    def take(leaf: np.ndarray) -> np.ndarray:
        name = next(names)
        value = np.asarray(arrays[name], dtype=np.float64)
        if value.shape != leaf.shape:
            raise ValueError(f"{name}: shape {value.shape}, expected {leaf.shape}")
        return value.copy()

    return map_arrays(take, tree)
