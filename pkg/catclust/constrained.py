"""
Exact solver for Constrained Clustering with Outliers.

For every set S of non-empty cluster slots the solver guesses a k-tuple of
columns, refines it against the relations, picks the rows where it may
deviate from the optimal centers (all small row subsets in direct mode,
pattern occurrences in the difference hypergraph in hypergraph mode), edits
those rows to every other allowed tuple and assigns columns greedily.

Between solutions of equal positive cost the smallest
``ClusteringSolution.sort_key`` wins. A cost-0 solution ends the search
early: each slot set stops at the first deviation set that yields one, the
narrowest width that reaches cost 0 returns the smallest key among its slot
sets, and wider slot sets are not tried. The answer is fixed for an instance
and does not depend on the thread count, but it need not be the smallest key
over all cost-0 solutions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import partial
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from .config import SolverSettings
from .constant import MODE_DIRECT, MODE_HYPERGRAPH, SOLVER_MODES, TRACE
from .exceptions import ContractViolation, WorkCeilingExceeded
from .geometry import distance_table
from .hypergraph import build_difference_hypergraph, default_edge_limit, deviation_candidates
from .models import (
    CategoricalMatrix,
    ClusteringSolution,
    ConstrainedInstance,
    RelationSet,
    Symbols,
)
from .utils import count_subsets_up_to, ordered_map, subsets_up_to

logger = logging.getLogger(__name__)

__all__ = [
    "CandidateTuple",
    "ConstrainedInstance",
    "refine_tuple",
    "greedy_assign",
    "estimate_work",
    "solve_constrained",
]


@dataclass(frozen=True)
class CandidateTuple:
    """A k-tuple of columns after refinement and the rows refinement rewrote."""

    columns: tuple[Symbols, ...]
    deviated_positions: frozenset[int]

    def row(self, h: int) -> Symbols:
        return tuple(column[h] for column in self.columns)


def refine_tuple(
    x: Sequence[Sequence[int]], relations: RelationSet, budget: int
) -> CandidateTuple | None:
    """Rewrite every row of ``x`` that breaks its relation, or reject ``x``.

    Rewritten rows take the lexicographically smallest tuple of the relation.
    ``None`` when more than ``budget`` rows need a rewrite.
    """
    if len(x) != relations.arity:
        raise ContractViolation(f"tuple of arity {len(x)}, relations have {relations.arity}")
    rows = len(relations)
    violated = [
        h for h in range(rows) if not relations.allows(h, tuple(col[h] for col in x))
    ]
    if len(violated) > budget:
        return None
    if not violated:
        return CandidateTuple(tuple(tuple(col) for col in x), frozenset())
    columns = [list(col) for col in x]
    for h in violated:
        for t, value in enumerate(relations.smallest(h)):
            columns[t][h] = value
    return CandidateTuple(tuple(tuple(col) for col in columns), frozenset(violated))


def greedy_assign(
    matrix: CategoricalMatrix, centers: Sequence[Sequence[int]], outlier_cap: int
) -> ClusteringSolution:
    """Best clustering for fixed centers: drop the ``outlier_cap`` farthest columns."""
    table = distance_table(matrix, centers)
    best = table.min(axis=0)
    nearest = table.argmin(axis=0)
    drop = min(outlier_cap, matrix.cols)
    # largest distance first, larger index first among equals
    order = np.lexsort((-np.arange(matrix.cols), -best))
    outliers = frozenset(int(j) for j in order[:drop])
    keep = np.ones(matrix.cols, dtype=bool)
    keep[list(outliers)] = False
    clusters = tuple(
        frozenset(int(j) for j in np.flatnonzero(keep & (nearest == t)))
        for t in range(len(centers))
    )
    cost = int(best[keep].sum())
    return ClusteringSolution(
        outliers, clusters, tuple(tuple(int(v) for v in c) for c in centers), cost
    )


def estimate_work(instance: ConstrainedInstance) -> int:
    matrix = instance.matrix
    return (
        matrix.cols**instance.k
        * count_subsets_up_to(matrix.rows, instance.budget)
        * instance.relations.max_size**instance.budget
    )


def _better(candidate: ClusteringSolution | None, incumbent: ClusteringSolution | None) -> bool:
    if candidate is None:
        return False
    return incumbent is None or candidate.sort_key() < incumbent.sort_key()


class _SlotSearch:
    """Search restricted to one set of active cluster slots."""

    def __init__(
        self,
        instance: ConstrainedInstance,
        slots: tuple[int, ...],
        mode: str,
        distinct: list[Symbols],
        edge_limit: int,
    ) -> None:
        self.instance = instance
        self.slots = slots
        self.mode = mode
        self.distinct = distinct
        self.edge_limit = edge_limit
        self.budget = instance.budget
        self.rows = instance.matrix.rows
        self.projected = instance.relations.project(slots)
        self.prefixes = [
            [frozenset(z[:depth] for z in self.projected[h]) for h in range(self.rows)]
            for depth in range(1, len(slots) + 1)
        ]
        self._lifted: dict[tuple[int, Symbols], Symbols] = {}
        self._occurrences: dict[frozenset[frozenset[int]], list[frozenset[int]]] = {}

    def guesses(self) -> Iterator[tuple[Symbols, ...]]:
        """k-tuples of distinct columns whose relation violations stay within budget."""
        width = len(self.slots)
        chosen: list[Symbols] = []

        def grow(depth: int) -> Iterator[tuple[Symbols, ...]]:
            if depth == width:
                yield tuple(chosen)
                return
            allowed = self.prefixes[depth]
            for column in self.distinct:
                chosen.append(column)
                violations = sum(
                    1
                    for h in range(self.rows)
                    if tuple(col[h] for col in chosen) not in allowed[h]
                )
                if violations <= self.budget:
                    yield from grow(depth + 1)
                chosen.pop()

        yield from grow(0)

    def nearby(self, x: CandidateTuple) -> Iterator[tuple[Symbols, ...]]:
        """Tuples of columns differing from ``x`` in at most ``2B`` rows."""
        cap = 2 * self.budget
        width = len(self.slots)
        chosen: list[Symbols] = []

        def grow(depth: int, differing: frozenset[int]) -> Iterator[tuple[Symbols, ...]]:
            if depth == width:
                yield tuple(chosen)
                return
            reference = x.columns[depth]
            for column in self.distinct:
                here = differing | {h for h in range(self.rows) if column[h] != reference[h]}
                if len(here) <= cap:
                    chosen.append(column)
                    yield from grow(depth + 1, frozenset(here))
                    chosen.pop()

        yield from grow(0, frozenset())

    def deviation_sets(self, x: CandidateTuple) -> list[frozenset[int]]:
        if self.mode == MODE_DIRECT:
            return [frozenset(s) for s in subsets_up_to(range(self.rows), self.budget)]
        if self.budget == 0:
            return [frozenset()]
        host = build_difference_hypergraph(x.columns, self.nearby(x), 2 * self.budget)
        key = host.supports()
        if key not in self._occurrences:
            self._occurrences[key] = deviation_candidates(host, self.budget, self.edge_limit)
        return [frozenset()] + self._occurrences[key]

    def lift(self, h: int, partial_row: Symbols) -> Symbols:
        key = (h, partial_row)
        if key not in self._lifted:
            self._lifted[key] = self.instance.relations.lift(h, self.slots, partial_row)
        return self._lifted[key]

    def centers(self, x: CandidateTuple, positions: frozenset[int]) -> Iterator[tuple[Symbols, ...]]:
        """Full k centers that deviate from ``x`` at exactly ``positions``."""
        ordered = sorted(positions)
        choices = [[z for z in self.projected[h] if z != x.row(h)] for h in ordered]
        base = [x.row(h) for h in range(self.rows)]
        for picks in product(*choices):
            rows = list(base)
            for h, z in zip(ordered, picks):
                rows[h] = z
            full = [self.lift(h, rows[h]) for h in range(self.rows)]
            yield tuple(
                tuple(full[h][t] for h in range(self.rows)) for t in range(self.instance.k)
            )

    def run(self) -> ClusteringSolution | None:
        best: ClusteringSolution | None = None
        refined_seen: set[tuple[Symbols, ...]] = set()
        centers_seen: set[tuple[Symbols, ...]] = set()
        matrix = self.instance.matrix
        guesses = 0
        for guess in self.guesses():
            x = refine_tuple(guess, self.projected, self.budget)
            if x is None or x.columns in refined_seen:
                continue
            refined_seen.add(x.columns)
            guesses += 1
            for positions in self.deviation_sets(x):
                for centers in self.centers(x, positions):
                    if centers in centers_seen:
                        continue
                    centers_seen.add(centers)
                    solution = greedy_assign(matrix, centers, self.instance.outlier_cap)
                    if solution.cost <= self.budget and _better(solution, best):
                        best = solution
                if best is not None and best.cost == 0:
                    break
            if best is not None and best.cost == 0:
                break
        logger.log(
            TRACE,
            "slots %s: %i refined guesses, %i center candidates, best cost %s",
            self.slots,
            guesses,
            len(centers_seen),
            None if best is None else best.cost,
        )
        return best


def solve_constrained(
    instance: ConstrainedInstance,
    mode: str = MODE_DIRECT,
    settings: SolverSettings | None = None,
) -> ClusteringSolution | None:
    """Minimum-cost solution of cost at most ``instance.budget``, or ``None``."""
    if mode not in SOLVER_MODES:
        raise ContractViolation(f"unknown mode {mode!r}, expected one of {SOLVER_MODES}")
    settings = settings or SolverSettings()

    estimate = estimate_work(instance)
    logger.debug("constrained clustering: work estimate %i (ceiling %i)", estimate, settings.work_ceiling)
    if estimate > settings.work_ceiling:
        raise WorkCeilingExceeded("constrained clustering", estimate, settings.work_ceiling)

    distinct = list(dict.fromkeys(instance.matrix.columns()))
    edge_limit = settings.pattern_edge_limit or default_edge_limit(instance.budget)
    if mode == MODE_HYPERGRAPH:
        logger.debug("hypergraph mode: patterns with at most %i edges", edge_limit)
        if instance.budget > 4 and settings.pattern_edge_limit is None:
            logger.warning(
                "budget %i > 4: the default pattern edge limit is not exact, use direct mode to be sure",
                instance.budget,
            )

    best: ClusteringSolution | None = None
    # Greedy assignment sends identical columns to one cluster, so no optimum
    # needs more non-empty clusters than there are distinct columns.
    for width in range(1, min(instance.k, len(distinct)) + 1):
        tasks = list(combinations(range(instance.k), width))
        search = partial(_run_slots, instance, mode=mode, distinct=distinct, edge_limit=edge_limit)
        for result in ordered_map(search, tasks, settings.threads):
            if _better(result, best):
                best = result
        logger.debug(
            "%i active slots: best cost so far %s", width, None if best is None else best.cost
        )
        if best is not None and best.cost == 0:
            break

    if best is None:
        logger.debug("no clustering within budget %i", instance.budget)
    return best


def _run_slots(
    instance: ConstrainedInstance,
    slots: tuple[int, ...],
    *,
    mode: str,
    distinct: list[Symbols],
    edge_limit: int,
) -> ClusteringSolution | None:
    return _SlotSearch(instance, slots, mode, distinct, edge_limit).run()
