"""
Difference hypergraphs over row positions, small pattern hypergraphs, and
the search for places where a pattern appears in a host.

Pattern vertices are ``0 .. vertex_count - 1``. Host vertices are whatever
labels the caller uses (row indices for the solvers).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, permutations
from typing import Iterable, Iterator, Sequence

from .constant import TRACE
from .exceptions import ContractViolation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HostEdge:
    vertices: frozenset[int]
    weight: int = 1
    payload: object = None


class Hypergraph:
    """A host hypergraph; edges form a multiset (repeats and weights allowed)."""

    def __init__(
        self, edges: Iterable[HostEdge], vertex_labels: Iterable[int] | None = None
    ) -> None:
        self._edges: tuple[HostEdge, ...] = tuple(edges)
        for edge in self._edges:
            if edge.weight < 1:
                raise ContractViolation(f"edge weight must be at least 1, got {edge.weight}")
        union = frozenset().union(*(edge.vertices for edge in self._edges))
        if vertex_labels is None:
            self._vertices = union
        else:
            self._vertices = frozenset(vertex_labels)
            if not union <= self._vertices:
                raise ContractViolation("an edge leaves the vertex set")

    @property
    def edges(self) -> tuple[HostEdge, ...]:
        return self._edges

    @property
    def vertex_labels(self) -> frozenset[int]:
        return self._vertices

    @property
    def total_weight(self) -> int:
        return sum(edge.weight for edge in self._edges)

    def supports(self) -> frozenset[frozenset[int]]:
        """Distinct non-empty edges; appearance of a pattern depends on nothing else."""
        return frozenset(edge.vertices for edge in self._edges if edge.vertices)

    def __len__(self) -> int:
        return len(self._edges)

    def __repr__(self) -> str:
        return f"<Hypergraph |V|={len(self._vertices)} |E|={len(self._edges)}>"


@dataclass(frozen=True)
class PatternHypergraph:
    vertex_count: int
    edges: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.vertex_count < 1:
            raise ContractViolation("a pattern needs at least one vertex")
        for edge in self.edges:
            if not edge or not all(0 <= v < self.vertex_count for v in edge):
                raise ContractViolation(f"pattern edge {set(edge)} is not a non-empty vertex subset")

    def degree(self, vertex: int) -> int:
        return sum(1 for edge in self.edges if vertex in edge)

    @classmethod
    def from_masks(cls, vertex_count: int, masks: Sequence[int]) -> PatternHypergraph:
        return cls(
            vertex_count,
            tuple(
                frozenset(v for v in range(vertex_count) if mask >> v & 1) for mask in masks
            ),
        )


def quarter_cover(pattern: PatternHypergraph) -> bool:
    """Every vertex lies in at least a quarter of the edges.

    This certifies a fractional edge cover of weight at most 4 (each edge
    weighted 4/|E|).
    """
    if not pattern.edges:
        return False
    need = math.ceil(len(pattern.edges) / 4)
    return all(pattern.degree(v) >= need for v in range(pattern.vertex_count))


def pattern_edge_cap(budget: int) -> int:
    """Hard bound on pattern edges, ``⌈200 ln B⌉`` (at least 1)."""
    if budget <= 1:
        return 1
    return max(1, math.ceil(200 * math.log(budget)))


def default_edge_limit(budget: int) -> int:
    """Pattern edges tried in hypergraph mode unless the caller sets a limit.

    A deviation set of at most four rows is the occurrence of the pattern
    made of one covering trace per row: at most four distinct edges, every
    vertex of degree one or more, so it passes the quarter check. The limit
    ``B`` is therefore exact for ``B <= 4``. From five rows on an admissible
    pattern can need more than ``B`` edges (up to :func:`pattern_edge_cap`),
    so there the limit is a cap on the enumeration and direct mode is the
    exact search.
    """
    return max(1, min(pattern_edge_cap(budget), budget))


def _relabel(mask: int, order: Sequence[int]) -> int:
    out = 0
    for new, old in enumerate(order):
        if mask >> old & 1:
            out |= 1 << new
    return out


def _canonical(vertex_count: int, masks: Sequence[int]) -> tuple[int, ...]:
    return min(
        tuple(sorted(_relabel(mask, order) for mask in masks))
        for order in permutations(range(vertex_count))
    )


@lru_cache(maxsize=None)
def _shape(vertex_count: int, edge_count: int) -> tuple[PatternHypergraph, ...]:
    full = (1 << vertex_count) - 1
    found: list[PatternHypergraph] = []
    for masks in combinations_with_replacement(range(1, full + 1), edge_count):
        covered = 0
        for mask in masks:
            covered |= mask
        if covered != full:
            continue
        pattern = PatternHypergraph.from_masks(vertex_count, masks)
        if not quarter_cover(pattern):
            continue
        # masks arrive sorted, so a class is emitted once: by its canonical member
        if _canonical(vertex_count, masks) == masks:
            found.append(pattern)
    return tuple(found)


def patterns_of_shape(vertex_count: int, edge_count: int) -> tuple[PatternHypergraph, ...]:
    """Canonical representatives with exactly this many vertices and edges."""
    if vertex_count < 1 or edge_count < 1:
        raise ContractViolation("vertex and edge counts must be positive")
    return _shape(vertex_count, edge_count)


def enumerate_patterns(max_vertices: int, edge_budget: int) -> Iterator[PatternHypergraph]:
    """Every admissible pattern up to the given size, fewest edges first."""
    if max_vertices < 1 or edge_budget < 1:
        raise ContractViolation("pattern budgets must be positive")
    for edge_count in range(1, edge_budget + 1):
        for vertex_count in range(1, max_vertices + 1):
            yield from patterns_of_shape(vertex_count, edge_count)


def build_difference_hypergraph(
    x: Sequence[Sequence[int]],
    tuples: Iterable[Sequence[Sequence[int]]],
    size_cap: int,
    weights: Iterable[int] | None = None,
) -> Hypergraph:
    """One edge per tuple: the rows where it disagrees with ``x``.

    ``x`` and every tuple are sequences of columns of equal length. Empty
    edges and edges with more than ``size_cap`` rows are dropped.
    """
    rows = len(x[0]) if x else 0
    weight_iter = iter(weights) if weights is not None else None
    edges: list[HostEdge] = []
    for index, y in enumerate(tuples):
        weight = next(weight_iter) if weight_iter is not None else 1
        if len(y) != len(x):
            raise ContractViolation(f"tuple of arity {len(y)} against arity {len(x)}")
        differing = frozenset(
            h for h in range(rows) if any(xs[h] != ys[h] for xs, ys in zip(x, y))
        )
        if not differing or len(differing) > size_cap:
            continue
        edges.append(HostEdge(differing, weight, index))
    return Hypergraph(edges)


def find_occurrences(pattern: PatternHypergraph, host: Hypergraph) -> Iterator[frozenset[int]]:
    """Every vertex set ``V'`` of ``host`` at which ``pattern`` appears.

    The search maps pattern vertices one at a time to host vertices and
    backtracks as soon as some pattern edge, cut down to the vertices placed
    so far, is not the trace of any host edge on the partial image.
    """
    labels = sorted(host.vertex_labels)
    if pattern.vertex_count > len(labels):
        return
    bit = {label: 1 << i for i, label in enumerate(labels)}
    host_masks = sorted(
        {sum(bit[v] for v in support) for support in host.supports()}
    )
    pattern_edges = sorted({sum(1 << v for v in edge) for edge in pattern.edges})
    if not host_masks or not pattern_edges:
        return

    count = pattern.vertex_count
    image = [0] * count
    seen: set[int] = set()

    def consistent(placed: int, image_mask: int) -> bool:
        placed_mask = (1 << placed) - 1
        for edge in pattern_edges:
            target = 0
            restricted = edge & placed_mask
            for v in range(placed):
                if restricted >> v & 1:
                    target |= image[v]
            if not any(h & image_mask == target for h in host_masks):
                return False
        return True

    def extend(placed: int, image_mask: int) -> Iterator[int]:
        if placed == count:
            yield image_mask
            return
        for label in labels:
            b = bit[label]
            if image_mask & b:
                continue
            image[placed] = b
            if consistent(placed + 1, image_mask | b):
                yield from extend(placed + 1, image_mask | b)

    for mask in extend(0, 0):
        if mask in seen:
            continue
        seen.add(mask)
        yield frozenset(label for label in labels if mask & bit[label])


def deviation_candidates(
    host: Hypergraph, max_vertices: int, edge_limit: int
) -> list[frozenset[int]]:
    """Distinct occurrence sets of all admissible patterns, fewest pattern edges first."""
    found: list[frozenset[int]] = []
    seen: set[frozenset[int]] = set()
    if not host.supports() or max_vertices < 1:
        return found
    patterns = 0
    for pattern in enumerate_patterns(max_vertices, edge_limit):
        patterns += 1
        for occurrence in find_occurrences(pattern, host):
            if occurrence not in seen:
                seen.add(occurrence)
                found.append(occurrence)
    logger.log(
        TRACE,
        "%i patterns tried against %r, %i distinct occurrence sets",
        patterns,
        host,
        len(found),
    )
    return found
