from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def set_logging_handler(
    name: str = "catclust",
    level: int = logging.INFO,
    format_string: str = "%(asctime)s | %(levelname)s | %(message)s",
) -> None:
    logger = logging.getLogger(name)
    logger.setLevel(level)

    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(format_string))
    logger.addHandler(handler)


def subsets_up_to(items: Sequence[T], size: int) -> Iterator[tuple[T, ...]]:
    """All subsets of ``items`` with at most ``size`` elements, smallest first."""
    for width in range(0, min(size, len(items)) + 1):
        yield from combinations(items, width)


def count_subsets_up_to(universe: int, size: int) -> int:
    return sum(math.comb(universe, width) for width in range(0, min(size, universe) + 1))


def set_partitions(
    items: Sequence[T], max_parts: int, min_part_size: int = 1
) -> Iterator[tuple[tuple[T, ...], ...]]:
    """Partitions of ``items`` into at most ``max_parts`` blocks.

    Blocks keep the order of ``items`` and are listed by their first element,
    so every partition is produced exactly once.
    """
    items = list(items)
    if not items:
        yield ()
        return
    if max_parts < 1:
        return

    blocks: list[list[T]] = []

    def place(index: int) -> Iterator[tuple[tuple[T, ...], ...]]:
        if index == len(items):
            if all(len(block) >= min_part_size for block in blocks):
                yield tuple(tuple(block) for block in blocks)
            return
        # Not enough items left to bring every block up to the minimum size.
        missing = sum(max(0, min_part_size - len(block)) for block in blocks)
        if missing > len(items) - index:
            return
        for block in blocks:
            block.append(items[index])
            yield from place(index + 1)
            block.pop()
        if len(blocks) < max_parts:
            blocks.append([items[index]])
            yield from place(index + 1)
            blocks.pop()

    yield from place(0)


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered ways to write ``total`` as ``parts`` positive integers."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for head in range(1, total - parts + 2):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def ordered_map(
    function: Callable[[T], R], tasks: Iterable[T], threads: int = 1
) -> list[R]:
    """Map ``function`` over ``tasks``; results keep the task order."""
    tasks = list(tasks)
    if threads <= 1 or len(tasks) <= 1:
        return [function(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(function, tasks))
