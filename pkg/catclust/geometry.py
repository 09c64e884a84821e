"""
Hamming geometry, cost accounting and the decision predicates every solver
answers to.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .constant import (
    REASON_CENTER_SHAPE,
    REASON_CLUSTER_COUNT,
    REASON_COST_MISMATCH,
    REASON_NOT_A_PARTITION,
    REASON_OVER_BUDGET,
    REASON_RELATION_VIOLATED,
    REASON_TOO_MANY_CLUSTERS,
    REASON_TOO_MANY_OUTLIERS,
)
from .exceptions import ContractViolation
from .models import (
    CategoricalMatrix,
    ClusteringSolution,
    ConstrainedInstance,
    FeatureSelectionInstance,
    FeatureSelectionSolution,
    RelationSet,
    Verdict,
)


def hamming(x: Sequence[int], y: Sequence[int]) -> int:
    if len(x) != len(y):
        raise ContractViolation(f"hamming on vectors of length {len(x)} and {len(y)}")
    return sum(1 for a, b in zip(x, y) if a != b)


def transpose(matrix: CategoricalMatrix) -> CategoricalMatrix:
    return matrix.transpose()


def distance_table(matrix: CategoricalMatrix, centers: Sequence[Sequence[int]]) -> np.ndarray:
    """``table[t, j]`` is the Hamming distance between column ``j`` and center ``t``."""
    stacked = np.array(centers, dtype=np.int64).reshape(len(centers), -1)
    if stacked.shape[1] != matrix.rows:
        raise ContractViolation(
            f"centers have length {stacked.shape[1]}, the matrix has {matrix.rows} rows"
        )
    return (matrix.cells[None, :, :] != stacked[:, :, None]).sum(axis=1)


def _check_indices(matrix: CategoricalMatrix, indices: Sequence[int]) -> None:
    for j in indices:
        if not 0 <= j < matrix.cols:
            raise ContractViolation(f"column index {j + 1} out of range 1..{matrix.cols}")


def solution_cost(matrix: CategoricalMatrix, solution: ClusteringSolution) -> int:
    """Sum of member-to-center distances; outlier columns are ignored."""
    total = 0
    for cluster, center in zip(solution.clusters, solution.centers):
        if len(center) != matrix.rows:
            raise ContractViolation(
                f"center has length {len(center)}, the matrix has {matrix.rows} rows"
            )
        if not cluster:
            continue
        members = sorted(cluster)
        _check_indices(matrix, members)
        block = matrix.cells[:, members]
        total += int((block != np.array(center, dtype=np.int64)[:, None]).sum())
    return total


def _partition_problem(
    universe: int, outliers: frozenset[int], clusters: Sequence[frozenset[int]]
) -> str | None:
    seen: set[int] = set(outliers)
    for index in outliers:
        if not 0 <= index < universe:
            return f"index {index + 1} out of range 1..{universe}"
    for cluster in clusters:
        for index in cluster:
            if not 0 <= index < universe:
                return f"index {index + 1} out of range 1..{universe}"
            if index in seen:
                return f"index {index + 1} appears twice"
            seen.add(index)
    if len(seen) != universe:
        missing = sorted(set(range(universe)) - seen)
        return f"indices {[j + 1 for j in missing]} are not covered"
    return None


def verify_clustering(
    matrix: CategoricalMatrix,
    k: int,
    budget: int,
    outlier_cap: int,
    solution: ClusteringSolution,
    relations: RelationSet | None = None,
) -> Verdict:
    """Check a column clustering with column outliers.

    With ``relations`` the solution must carry exactly ``k`` center slots and
    every row of the centers must realise its relation; without, any number
    of slots up to ``k`` is accepted.
    """
    if len(solution.outliers) > outlier_cap:
        return Verdict.failed(
            REASON_TOO_MANY_OUTLIERS,
            f"{len(solution.outliers)} outliers, at most {outlier_cap} allowed",
        )
    problem = _partition_problem(matrix.cols, solution.outliers, solution.clusters)
    if problem is not None:
        return Verdict.failed(REASON_NOT_A_PARTITION, problem)
    if relations is not None and len(solution.clusters) != k:
        return Verdict.failed(
            REASON_CLUSTER_COUNT, f"{len(solution.clusters)} center slots, expected {k}"
        )
    if len(solution.clusters) > k:
        return Verdict.failed(
            REASON_TOO_MANY_CLUSTERS, f"{len(solution.clusters)} clusters, at most {k}"
        )
    for t, center in enumerate(solution.centers):
        if len(center) != matrix.rows or any(v not in matrix.alphabet for v in center):
            return Verdict.failed(REASON_CENTER_SHAPE, f"center {t + 1} is malformed")
    if relations is not None:
        for h in range(matrix.rows):
            row_tuple = tuple(center[h] for center in solution.centers)
            if not relations.allows(h, row_tuple):
                return Verdict.failed(
                    REASON_RELATION_VIOLATED, f"row {h + 1} carries {row_tuple}"
                )
    cost = solution_cost(matrix, solution)
    if cost != solution.cost:
        return Verdict.failed(
            REASON_COST_MISMATCH, f"reported cost {solution.cost}, recomputed {cost}"
        )
    if cost > budget:
        return Verdict.failed(REASON_OVER_BUDGET, f"cost {cost} exceeds budget {budget}")
    return Verdict.passed()


def verify_constrained(instance: ConstrainedInstance, solution: ClusteringSolution) -> Verdict:
    return verify_clustering(
        instance.matrix,
        instance.k,
        instance.budget,
        instance.outlier_cap,
        solution,
        relations=instance.relations,
    )


def feature_selection_cost(
    matrix: CategoricalMatrix, solution: FeatureSelectionSolution
) -> int:
    reduced = matrix.without_rows(solution.removed_features)
    view = ClusteringSolution(
        frozenset(), solution.point_clusters, solution.centers, solution.cost
    )
    return solution_cost(reduced, view)


def verify_feature_selection(
    instance: FeatureSelectionInstance, solution: FeatureSelectionSolution
) -> Verdict:
    matrix = instance.matrix
    removed = solution.removed_features
    if len(removed) > instance.outlier_cap:
        return Verdict.failed(
            REASON_TOO_MANY_OUTLIERS,
            f"{len(removed)} removed rows, at most {instance.outlier_cap} allowed",
        )
    if any(not 0 <= i < matrix.rows for i in removed):
        return Verdict.failed(REASON_NOT_A_PARTITION, "removed row out of range")
    if len(removed) == matrix.rows:
        return Verdict.failed(REASON_NOT_A_PARTITION, "every row removed")
    view = ClusteringSolution(
        frozenset(), solution.point_clusters, solution.centers, solution.cost
    )
    return verify_clustering(
        matrix.without_rows(removed), instance.k, instance.budget, 0, view
    )
