"""
k-Clustering with Column Outliers, parameterized by the cost bound.

Identical columns are grouped into initial clusters. A normalized optimum
splits at most one initial cluster between a cluster and the outliers; every
other initial cluster is a cluster of its own, part of the outliers, or
merged into one of at most B composite clusters. Composite clusters are
found by Restricted Clustering, either over random colorings of the initial
clusters or, in exhaustive mode, over every small subset of them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .config import SolverSettings
from .constant import (
    COLOR_CODING_DELTA,
    MODE_DIRECT,
    REASON_BAD_SELECTION,
    REASON_CENTER_SHAPE,
    REASON_COST_MISMATCH,
    REASON_NOT_NORMALIZED,
    REASON_OVER_BUDGET,
    SOLVER_MODES,
    TRACE,
    TYPE_OUTLIER,
    TYPE_SCATTERED,
    TYPE_SPLIT,
    TYPE_SPREAD,
    TYPE_WHOLE,
)
from .exceptions import ContractViolation, WorkCeilingExceeded
from .hypergraph import build_difference_hypergraph, default_edge_limit, deviation_candidates
from .models import CategoricalMatrix, ClusteringSolution, Symbols, Verdict
from .utils import compositions, count_subsets_up_to, ordered_map, set_partitions, subsets_up_to

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ColumnOutliersInstance:
    matrix: CategoricalMatrix
    k: int
    budget: int
    outlier_cap: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ContractViolation(f"k must be positive, got {self.k}")
        if self.budget < 0 or self.outlier_cap < 0:
            raise ContractViolation("budget and outlier cap must be non-negative")
        if self.outlier_cap >= self.matrix.cols:
            raise ContractViolation(
                f"outlier cap {self.outlier_cap} must be smaller than n={self.matrix.cols}"
            )


@dataclass(frozen=True)
class InitialClusters:
    """Groups of identical columns, ordered by first occurrence."""

    distinct_columns: tuple[Symbols, ...]
    weights: tuple[int, ...]
    member_map: tuple[tuple[int, ...], ...]

    @property
    def beta(self) -> int:
        return len(self.distinct_columns)

    def group_of(self, column_index: int) -> int:
        for g, members in enumerate(self.member_map):
            if column_index in members:
                return g
        raise ContractViolation(f"column {column_index + 1} belongs to no initial cluster")


def group_columns(matrix: CategoricalMatrix) -> InitialClusters:
    members: dict[Symbols, list[int]] = {}
    for j, column in enumerate(matrix.columns()):
        members.setdefault(column, []).append(j)
    return InitialClusters(
        distinct_columns=tuple(members),
        weights=tuple(len(m) for m in members.values()),
        member_map=tuple(tuple(m) for m in members.values()),
    )


@dataclass(frozen=True)
class WeightedColumn:
    column: Symbols
    weight: int
    label: int = 0


@dataclass(frozen=True)
class RestrictedResult:
    """One chosen position per set, the shared center and the weighted cost."""

    chosen: tuple[int, ...]
    center: Symbols
    cost: int


def restricted_cost(
    sets: Sequence[Sequence[WeightedColumn]], center: Sequence[int]
) -> tuple[int, tuple[int, ...]]:
    """Weighted cost of ``center`` and the cheapest member of every set (first on ties)."""
    target = np.array(center, dtype=np.int64)
    total = 0
    chosen = []
    for members in sets:
        columns = np.array([w.column for w in members], dtype=np.int64)
        weights = np.array([w.weight for w in members], dtype=np.int64)
        costs = weights * (columns != target[None, :]).sum(axis=1)
        pick = int(costs.argmin())
        chosen.append(pick)
        total += int(costs[pick])
    return total, tuple(chosen)


def _edits(x: Symbols, positions: Sequence[int], alphabet_size: int) -> Iterator[Symbols]:
    """Every vector that differs from ``x`` at exactly ``positions``."""
    choices = [[s for s in range(alphabet_size) if s != x[h]] for h in positions]
    for symbols in product(*choices):
        edited = list(x)
        for h, s in zip(positions, symbols):
            edited[h] = s
        yield tuple(edited)


def solve_restricted(
    sets: Sequence[Sequence[WeightedColumn]],
    budget: int,
    mode: str = MODE_DIRECT,
    alphabet_size: int | None = None,
    edge_limit: int | None = None,
) -> RestrictedResult | None:
    """Pick one column per set and a center of least weighted cost, if within ``budget``.

    Direct mode guesses the column chosen from the first set and edits it at
    every row subset of size at most ``budget``. Hypergraph mode guesses any
    column and edits it only at occurrences of small patterns in its
    weighted difference hypergraph.
    """
    if not sets or any(not members for members in sets):
        raise ContractViolation("restricted clustering needs non-empty sets")
    if mode not in SOLVER_MODES:
        raise ContractViolation(f"unknown mode {mode!r}")
    rows = len(sets[0][0].column)
    if alphabet_size is None:
        alphabet_size = 1 + max(max(w.column) for members in sets for w in members)
    edge_limit = edge_limit or default_edge_limit(budget)

    everything = [w for members in sets for w in members]
    if mode == MODE_DIRECT:
        guesses = list(dict.fromkeys(w.column for w in sets[0]))
    else:
        guesses = list(dict.fromkeys(w.column for w in everything))

    occurrences: dict[frozenset[frozenset[int]], list[frozenset[int]]] = {}

    def deviation_sets(x: Symbols) -> list[frozenset[int]]:
        if mode == MODE_DIRECT:
            return [frozenset(s) for s in subsets_up_to(range(rows), budget)]
        if budget == 0:
            return [frozenset()]
        host = build_difference_hypergraph(
            (x,), ((w.column,) for w in everything), 2 * budget, (w.weight for w in everything)
        )
        key = host.supports()
        if key not in occurrences:
            occurrences[key] = deviation_candidates(host, budget, edge_limit)
        return [frozenset()] + occurrences[key]

    best: RestrictedResult | None = None
    seen: set[Symbols] = set()
    for x in guesses:
        for positions in deviation_sets(x):
            for center in _edits(x, sorted(positions), alphabet_size):
                if center in seen:
                    continue
                seen.add(center)
                cost, chosen = restricted_cost(sets, center)
                if cost > budget:
                    continue
                if best is None or (cost, center) < (best.cost, best.center):
                    best = RestrictedResult(chosen, center, cost)
    return best


@dataclass(frozen=True)
class CompositePlan:
    """One branch of the search.

    In exhaustive mode ``parts`` hold initial-cluster indices and
    ``coloring`` is ``None``; with color coding they hold colors.
    """

    split_cluster: int | None
    split_count: int
    coloring: tuple[int, ...] | None
    parts: tuple[tuple[int, ...], ...]
    cost_guesses: tuple[int, ...] = field(default=())

    @property
    def tau(self) -> int:
        return len(self.parts)


def admissible_guess(minima: Sequence[int], budget: int) -> tuple[int, ...] | None:
    """First cost guess ``B_1..B_τ`` (total at most ``budget``) that every part meets."""
    parts = len(minima)
    for total in range(parts, budget + 1):
        for guess in compositions(total, parts):
            if all(low <= bound for low, bound in zip(minima, guess)):
                return guess
    return None


def default_trials(budget: int, delta: float = COLOR_CODING_DELTA) -> int:
    return max(1, math.ceil(math.exp(2 * budget) * math.log(1 / delta)))


def estimate_work(instance: ColumnOutliersInstance, groups: InitialClusters, trials: int | None) -> int:
    b = instance.budget
    splits = 1 + groups.beta * min(instance.outlier_cap, instance.matrix.cols)
    if trials is None:
        branches = count_subsets_up_to(groups.beta, 2 * b)
    else:
        branches = trials * 2 ** (2 * b)
    restricted = count_subsets_up_to(instance.matrix.rows, b) * instance.matrix.alphabet.size**b
    return splits * branches * restricted


class _Search:
    def __init__(
        self,
        instance: ColumnOutliersInstance,
        groups: InitialClusters,
        mode: str,
        colorings: list[tuple[int, ...]] | None,
        edge_limit: int,
    ) -> None:
        self.instance = instance
        self.groups = groups
        self.mode = mode
        self.colorings = colorings
        self.edge_limit = edge_limit
        self.budget = instance.budget
        self._restricted: dict[tuple, RestrictedResult | None] = {}

    def restricted(
        self, sets: list[list[WeightedColumn]]
    ) -> RestrictedResult | None:
        key = tuple(tuple((w.label, w.weight) for w in members) for members in sets)
        if key not in self._restricted:
            self._restricted[key] = solve_restricted(
                sets,
                self.budget,
                self.mode,
                self.instance.matrix.alphabet.size,
                self.edge_limit,
            )
        return self._restricted[key]

    def plans(self, split: int | None, count: int, weights: list[int]) -> Iterator[CompositePlan]:
        active = [g for g in range(self.groups.beta) if weights[g] > 0]
        b = self.budget
        if self.colorings is None:
            for chosen in subsets_up_to(active, 2 * b):
                if len(chosen) == 1:
                    continue
                for parts in set_partitions(chosen, b, min_part_size=2):
                    yield CompositePlan(split, count, None, parts)
            return
        for coloring in self.colorings:
            used = sorted({coloring[g] for g in active})
            for chosen in subsets_up_to(used, 2 * b):
                if len(chosen) == 1:
                    continue
                for parts in set_partitions(chosen, b, min_part_size=2):
                    yield CompositePlan(split, count, coloring, parts)

    def part_sets(self, plan: CompositePlan, part: tuple[int, ...], weights: list[int]) -> list[list[WeightedColumn]]:
        columns = self.groups.distinct_columns
        if plan.coloring is None:
            return [[WeightedColumn(columns[g], weights[g], g)] for g in part]
        return [
            [
                WeightedColumn(columns[g], weights[g], g)
                for g in range(self.groups.beta)
                if weights[g] > 0 and plan.coloring[g] == color
            ]
            for color in part
        ]

    def realize(self, plan: CompositePlan, weights: list[int]) -> tuple[ClusteringSolution, CompositePlan] | None:
        instance = self.instance
        if plan.tau > instance.k:
            return None
        composites: list[tuple[list[int], Symbols, int]] = []
        for part in plan.parts:
            sets = self.part_sets(plan, part, weights)
            result = self.restricted(sets)
            if result is None:
                return None
            picked = [sets[t][i].label for t, i in enumerate(result.chosen)]
            composites.append((picked, result.center, result.cost))
        guess = admissible_guess([c for _, _, c in composites], self.budget)
        if guess is None:
            return None

        selected = {g for picked, _, _ in composites for g in picked}
        leftover = [
            g for g in range(self.groups.beta) if weights[g] > 0 and g not in selected
        ]
        free = instance.k - plan.tau
        capacity = instance.outlier_cap - plan.split_count
        packed: list[int] = []
        if len(leftover) > free:
            order = sorted(leftover, key=lambda g: (weights[g], g))
            packed = order[: len(leftover) - free]
            if sum(weights[g] for g in packed) > capacity:
                return None
        singles = [g for g in leftover if g not in packed]

        def members(g: int) -> list[int]:
            return list(self.groups.member_map[g][: weights[g]])

        outliers: list[int] = []
        if plan.split_cluster is not None:
            outliers.extend(self.groups.member_map[plan.split_cluster][weights[plan.split_cluster]:])
        for g in packed:
            outliers.extend(members(g))

        clusters: list[list[int]] = []
        centers: list[Symbols] = []
        cost = 0
        for picked, center, part_cost in composites:
            clusters.append([j for g in picked for j in members(g)])
            centers.append(center)
            cost += part_cost
        for g in singles:
            clusters.append(members(g))
            centers.append(self.groups.distinct_columns[g])
        solution = ClusteringSolution.build(outliers, clusters, centers, cost)
        return solution, replace(plan, cost_guesses=guess)

    def run(self, split: tuple[int | None, int]) -> tuple[ClusteringSolution, CompositePlan] | None:
        group, count = split
        weights = list(self.groups.weights)
        if group is not None:
            weights[group] -= count
        best: tuple[ClusteringSolution, CompositePlan] | None = None
        branches = 0
        for plan in self.plans(group, count, weights):
            branches += 1
            found = self.realize(plan, weights)
            if found is None:
                continue
            if best is None or found[0].sort_key() < best[0].sort_key():
                best = found
                if best[0].cost == 0:
                    break
        logger.log(
            TRACE,
            "split guess %s: %i branches, best cost %s",
            split,
            branches,
            None if best is None else best[0].cost,
        )
        return best


def solve_column_outliers(
    instance: ColumnOutliersInstance,
    exhaustive: bool = True,
    trials: int | None = None,
    seed: int = 0,
    mode: str = MODE_DIRECT,
    settings: SolverSettings | None = None,
) -> ClusteringSolution | None:
    """Least-cost normalized clustering with at most ``outlier_cap`` column outliers.

    Exhaustive mode is exact. Color coding (``exhaustive=False``) is
    one-sided: it can miss the optimum, never report an infeasible answer.
    """
    if mode not in SOLVER_MODES:
        raise ContractViolation(f"unknown mode {mode!r}")
    settings = settings or SolverSettings()
    groups = group_columns(instance.matrix)
    b = instance.budget

    colorings: list[tuple[int, ...]] | None = None
    if not exhaustive:
        trials = trials if trials is not None else default_trials(b)
        if trials < 1:
            raise ContractViolation("at least one color-coding trial is needed")
        rng = np.random.default_rng(seed)
        colors = max(1, 2 * b)
        colorings = [
            tuple(int(c) for c in row) for row in rng.integers(0, colors, size=(trials, groups.beta))
        ]

    estimate = estimate_work(instance, groups, None if exhaustive else len(colorings or ()))
    logger.debug(
        "column outliers: %i initial clusters, work estimate %i (ceiling %i)",
        groups.beta,
        estimate,
        settings.work_ceiling,
    )
    if estimate > settings.work_ceiling:
        raise WorkCeilingExceeded("column outliers", estimate, settings.work_ceiling)

    edge_limit = settings.pattern_edge_limit or default_edge_limit(b)
    search = _Search(instance, groups, mode, colorings, edge_limit)
    splits: list[tuple[int | None, int]] = [(None, 0)]
    for g in range(groups.beta):
        for count in range(1, min(instance.outlier_cap, groups.weights[g]) + 1):
            splits.append((g, count))

    best: tuple[ClusteringSolution, CompositePlan] | None = None
    for found in ordered_map(search.run, splits, settings.threads):
        if found is not None and (best is None or found[0].sort_key() < best[0].sort_key()):
            best = found
    if best is None:
        logger.debug("no normalized clustering within budget %i", b)
        return None
    logger.debug("best plan %s with cost %i", best[1], best[0].cost)
    return best[0]


def classify_initial_clusters(
    matrix: CategoricalMatrix, solution: ClusteringSolution
) -> list[str]:
    """Type of every initial cluster with respect to ``solution``."""
    groups = group_columns(matrix)
    home = {j: t for t, cluster in enumerate(solution.clusters) for j in cluster}
    types = []
    for members in groups.member_map:
        outside = sum(1 for j in members if j in solution.outliers)
        touched = {home[j] for j in members if j in home}
        if outside == 0:
            types.append(TYPE_WHOLE if len(touched) == 1 else TYPE_SPREAD)
        elif outside == len(members):
            types.append(TYPE_OUTLIER)
        else:
            types.append(TYPE_SPLIT if len(touched) == 1 else TYPE_SCATTERED)
    return types


def normalize_witness(matrix: CategoricalMatrix, solution: ClusteringSolution) -> Verdict:
    types = classify_initial_clusters(matrix, solution)
    for g, kind in enumerate(types):
        if kind in (TYPE_SPREAD, TYPE_SCATTERED):
            return Verdict.failed(
                REASON_NOT_NORMALIZED, f"initial cluster {g + 1} is of type ({kind})"
            )
    splits = types.count(TYPE_SPLIT)
    if splits > 1:
        return Verdict.failed(REASON_NOT_NORMALIZED, f"{splits} initial clusters of type (iv)")
    return Verdict.passed()


@dataclass(frozen=True)
class RestrictedInstance:
    """Sets of weighted columns sharing one center, with a cost bound."""

    sets: tuple[tuple[WeightedColumn, ...], ...]
    budget: int
    alphabet_size: int

    def __post_init__(self) -> None:
        if not self.sets or any(not members for members in self.sets):
            raise ContractViolation("restricted clustering needs non-empty sets")
        if self.budget < 0:
            raise ContractViolation("budget must be non-negative")
        lengths = {len(w.column) for members in self.sets for w in members}
        if len(lengths) != 1:
            raise ContractViolation("all columns must have the same length")
        if any(w.weight < 1 for members in self.sets for w in members):
            raise ContractViolation("weights must be positive")

    @classmethod
    def from_groups(
        cls,
        matrix: CategoricalMatrix,
        groups: Sequence[Sequence[tuple[int, int]]],
        budget: int,
    ) -> RestrictedInstance:
        """Sets built from ``(column index, weight)`` pairs of ``matrix``."""
        sets = []
        for members in groups:
            for j, _ in members:
                if not 0 <= j < matrix.cols:
                    raise ContractViolation(f"column {j + 1} out of range 1..{matrix.cols}")
            sets.append(tuple(WeightedColumn(matrix.column(j), w, j) for j, w in members))
        return cls(tuple(sets), budget, matrix.alphabet.size)

    def solve(self, mode: str = MODE_DIRECT, edge_limit: int | None = None) -> RestrictedResult | None:
        return solve_restricted(self.sets, self.budget, mode, self.alphabet_size, edge_limit)


def verify_restricted(
    instance: RestrictedInstance, chosen: Sequence[int], center: Sequence[int], cost: int
) -> Verdict:
    """Check one chosen column label per set against the shared ``center``."""
    if len(chosen) != len(instance.sets):
        return Verdict.failed(
            REASON_BAD_SELECTION, f"{len(chosen)} choices for {len(instance.sets)} sets"
        )
    rows = len(instance.sets[0][0].column)
    if len(center) != rows or any(not 0 <= v < instance.alphabet_size for v in center):
        return Verdict.failed(REASON_CENTER_SHAPE, "the shared center is malformed")
    total = 0
    for s, (members, label) in enumerate(zip(instance.sets, chosen)):
        picked = next((w for w in members if w.label == label), None)
        if picked is None:
            return Verdict.failed(REASON_BAD_SELECTION, f"column {label + 1} is not in set {s + 1}")
        total += picked.weight * sum(1 for a, b in zip(picked.column, center) if a != b)
    if total != cost:
        return Verdict.failed(REASON_COST_MISMATCH, f"reported cost {cost}, recomputed {total}")
    if total > instance.budget:
        return Verdict.failed(REASON_OVER_BUDGET, f"cost {total} exceeds budget {instance.budget}")
    return Verdict.passed()
