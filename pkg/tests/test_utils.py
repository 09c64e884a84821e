from __future__ import annotations

import pytest

from catclust.utils import (
    compositions,
    count_subsets_up_to,
    ordered_map,
    set_partitions,
    subsets_up_to,
)


@pytest.mark.parametrize("size, bell", [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52)])
def test_set_partitions_count_bell_numbers(size, bell):
    partitions = list(set_partitions(range(size), size))
    assert len(partitions) == bell
    assert len(set(partitions)) == bell


def test_set_partitions_limits():
    assert list(set_partitions([], 0)) == [()]
    assert list(set_partitions([1], 0)) == []
    assert len(list(set_partitions("abc", 2))) == 4
    paired = list(set_partitions("abcd", 4, min_part_size=2))
    assert len(paired) == 4
    assert (("a", "b"), ("c", "d")) in paired


def test_compositions():
    assert list(compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
    assert list(compositions(0, 0)) == [()]
    assert list(compositions(1, 2)) == []
    assert len(list(compositions(6, 3))) == 10


def test_subsets_up_to():
    assert list(subsets_up_to([1, 2, 3], 1)) == [(), (1,), (2,), (3,)]
    assert len(list(subsets_up_to(range(5), 4))) == count_subsets_up_to(5, 4) == 31
    assert count_subsets_up_to(3, 7) == 8


def test_ordered_map_keeps_task_order():
    def record(value):
        return value * value

    assert ordered_map(record, range(20), threads=4) == [v * v for v in range(20)]
    assert ordered_map(record, [], threads=4) == []
    assert ordered_map(record, [3], threads=1) == [9]
