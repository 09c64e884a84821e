from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product

from .config import SolverSettings
from .constant import MODE_DIRECT
from .constrained import solve_constrained
from .exceptions import InvalidSolutionError, WorkCeilingExceeded
from .geometry import transpose, verify_feature_selection
from .models import (
    ClusteringSolution,
    ConstrainedInstance,
    FeatureSelectionInstance,
    FeatureSelectionSolution,
    RelationSet,
    Symbols,
)

logger = logging.getLogger(__name__)

__all__ = [
    "FeatureSelectionInstance",
    "PatternTable",
    "SweepPoint",
    "build_reduction",
    "map_back",
    "solve_feature_selection",
    "sweep_outlier_caps",
]


@dataclass(frozen=True)
class PatternTable:
    """All length-k strings over the alphabet, in lexicographic order.

    ``columns_z[j][p]`` is the j-th symbol of the p-th string.
    """

    alphabet_size: int
    k: int

    @cached_property
    def strings(self) -> tuple[Symbols, ...]:
        return tuple(product(range(self.alphabet_size), repeat=self.k))

    @cached_property
    def columns_z(self) -> tuple[Symbols, ...]:
        return tuple(tuple(s[j] for s in self.strings) for j in range(self.k))

    def __len__(self) -> int:
        return self.alphabet_size**self.k

    def cluster_of(self, coordinates: Symbols) -> int | None:
        """Smallest t with ``z_t`` equal to ``coordinates``."""
        for t, z in enumerate(self.columns_z):
            if z == coordinates:
                return t
        return None


def build_reduction(
    instance: FeatureSelectionInstance, settings: SolverSettings | None = None
) -> ConstrainedInstance:
    """Constrained instance on the transposed matrix with ``|Σ|^k`` clusters.

    Every row carries the same relation ``{z_1, .., z_k}``: a feature's
    cluster fixes one string, and each data point reads one position of it.
    """
    settings = settings or SolverSettings()
    table = PatternTable(instance.matrix.alphabet.size, instance.k)
    if len(table) > settings.work_ceiling:
        raise WorkCeilingExceeded("feature selection reduction", len(table), settings.work_ceiling)

    reduced = transpose(instance.matrix)
    relations = RelationSet.uniform(len(table), table.columns_z, reduced.rows)
    logger.debug(
        "feature selection reduced to %i clusters over a %ix%i matrix",
        len(table),
        reduced.rows,
        reduced.cols,
    )
    return ConstrainedInstance(
        matrix=reduced,
        k=len(table),
        budget=instance.budget,
        outlier_cap=instance.outlier_cap,
        relations=relations,
    )


def map_back(
    instance: FeatureSelectionInstance,
    reduced: ConstrainedInstance,
    solution: ClusteringSolution,
) -> FeatureSelectionSolution:
    table = PatternTable(instance.matrix.alphabet.size, instance.k)
    points = instance.matrix.cols

    point_clusters: list[set[int]] = [set() for _ in range(instance.k)]
    for j in range(points):
        coordinates = tuple(center[j] for center in solution.centers)
        t = table.cluster_of(coordinates)
        if t is None:
            raise InvalidSolutionError(
                f"centers read {coordinates} at data point {j + 1}, which is no pattern column"
            )
        point_clusters[t].add(j)

    feature_cluster: dict[int, int] = {}
    for p, members in enumerate(solution.clusters):
        for f in members:
            feature_cluster[f] = p

    kept = [f for f in range(instance.matrix.rows) if f not in solution.outliers]
    centers = tuple(
        tuple(table.strings[feature_cluster[f]][t] for f in kept) for t in range(instance.k)
    )
    return FeatureSelectionSolution(
        removed_features=frozenset(solution.outliers),
        point_clusters=tuple(frozenset(c) for c in point_clusters),
        centers=centers,
        cost=solution.cost,
    )


def solve_feature_selection(
    instance: FeatureSelectionInstance,
    mode: str = MODE_DIRECT,
    settings: SolverSettings | None = None,
) -> FeatureSelectionSolution | None:
    reduced = build_reduction(instance, settings)
    solution = solve_constrained(reduced, mode, settings)
    if solution is None:
        return None
    mapped = map_back(instance, reduced, solution)
    verdict = verify_feature_selection(instance, mapped)
    if not verdict:
        raise InvalidSolutionError(f"mapped solution fails verification: {verdict.reason} {verdict.detail}")
    return mapped


@dataclass(frozen=True)
class SweepPoint:
    outlier_cap: int
    solution: FeatureSelectionSolution | None

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def sweep_outlier_caps(
    instance: FeatureSelectionInstance,
    mode: str = MODE_DIRECT,
    settings: SolverSettings | None = None,
) -> list[SweepPoint]:
    """Solve for every row-removal cap from 0 up to the instance's own."""
    points = []
    for cap in range(instance.outlier_cap + 1):
        capped = FeatureSelectionInstance(instance.matrix, instance.k, instance.budget, cap)
        points.append(SweepPoint(cap, solve_feature_selection(capped, mode, settings)))
    return points


def smallest_feasible_cap(points: list[SweepPoint]) -> int | None:
    for point in points:
        if point.feasible:
            return point.outlier_cap
    return None
