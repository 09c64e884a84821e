"""
Robust low-rank approximation over GF(p) and over the Boolean semiring,
solved as Constrained Clustering with Outliers.

A rank-r matrix is U·V with U of size m x r. Its columns are U·λ for
coefficient vectors λ, so clustering the columns by λ gives one cluster per
coefficient vector, and row h of the centers must read the values
``(λ · u_h)`` for one common generator row ``u_h``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product

import numpy as np

from .config import SolverSettings
from .constant import MAX_FIELD_PRIME, MODE_DIRECT, SEMANTICS_BOOLEAN, SEMANTICS_FIELD
from .constrained import solve_constrained
from .exceptions import ContractViolation, InvalidSolutionError, WorkCeilingExceeded
from .models import CategoricalMatrix, ClusteringSolution, ConstrainedInstance, RelationSet, Symbols

logger = logging.getLogger(__name__)

_PRIMES = tuple(p for p in range(2, MAX_FIELD_PRIME + 1) if all(p % q for q in range(2, p)))


@dataclass(frozen=True)
class LowRankInstance:
    matrix: CategoricalMatrix
    rank: int
    budget: int
    outlier_cap: int
    semantics: str = SEMANTICS_FIELD
    prime: int = 2

    def __post_init__(self) -> None:
        if self.semantics not in (SEMANTICS_FIELD, SEMANTICS_BOOLEAN):
            raise ContractViolation(f"unknown semantics {self.semantics!r}")
        if self.semantics == SEMANTICS_BOOLEAN and self.prime != 2:
            raise ContractViolation("Boolean semantics needs a binary matrix (p = 2)")
        if self.prime not in _PRIMES:
            raise ContractViolation(f"p must be a prime up to {MAX_FIELD_PRIME}, got {self.prime}")
        if self.rank < 1:
            raise ContractViolation(f"rank must be at least 1, got {self.rank}")
        if self.matrix.alphabet.size > self.prime:
            raise ContractViolation(
                f"alphabet of size {self.matrix.alphabet.size} does not fit GF({self.prime})"
            )
        if self.budget < 0 or self.outlier_cap < 0:
            raise ContractViolation("budget and outlier cap must be non-negative")
        if self.outlier_cap >= self.matrix.cols:
            raise ContractViolation(
                f"outlier cap {self.outlier_cap} must be smaller than n={self.matrix.cols}"
            )

    @property
    def boolean(self) -> bool:
        return self.semantics == SEMANTICS_BOOLEAN


def coefficient_vectors(instance: LowRankInstance) -> list[Symbols]:
    """λ in lexicographic order; for Boolean rank, the indicator vectors of subsets."""
    return list(product(range(instance.prime), repeat=instance.rank))


def combine(instance: LowRankInstance, coefficients: Symbols, generator: Symbols) -> int:
    if instance.boolean:
        return int(any(c and u for c, u in zip(coefficients, generator)))
    return sum(c * u for c, u in zip(coefficients, generator)) % instance.prime


def value_table(instance: LowRankInstance) -> dict[Symbols, Symbols]:
    """Row of center values produced by each generator row ``u``, keyed by the values."""
    lambdas = coefficient_vectors(instance)
    table: dict[Symbols, Symbols] = {}
    for u in product(range(instance.prime), repeat=instance.rank):
        values = tuple(combine(instance, lam, u) for lam in lambdas)
        table.setdefault(values, u)
    return table


def build_lowrank_relations(
    instance: LowRankInstance, settings: SolverSettings | None = None
) -> ConstrainedInstance:
    settings = settings or SolverSettings()
    k = instance.prime**instance.rank
    if k > settings.work_ceiling:
        raise WorkCeilingExceeded("low-rank reduction", k, settings.work_ceiling)
    matrix = CategoricalMatrix(instance.matrix.cells, instance.prime)
    relations = RelationSet.uniform(k, value_table(instance), matrix.rows)
    logger.debug(
        "%s rank-%i instance reduced to %i clusters, %i allowed tuples per row",
        instance.semantics,
        instance.rank,
        k,
        relations.max_size,
    )
    return ConstrainedInstance(
        matrix=matrix,
        k=k,
        budget=instance.budget,
        outlier_cap=instance.outlier_cap,
        relations=relations,
    )


def gf_rank(matrix: np.ndarray, prime: int) -> int:
    """Rank over GF(prime) by Gaussian elimination."""
    work = np.array(matrix, dtype=np.int64) % prime
    rows, cols = work.shape
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if work[r, col] != 0), None)
        if pivot is None:
            continue
        work[[rank, pivot]] = work[[pivot, rank]]
        inverse = pow(int(work[rank, col]), prime - 2, prime)
        work[rank] = (work[rank] * inverse) % prime
        for r in range(rows):
            if r != rank and work[r, col] != 0:
                work[r] = (work[r] - work[r, col] * work[rank]) % prime
        rank += 1
        if rank == rows:
            break
    return rank


def boolean_product(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return (np.asarray(left, dtype=np.int64) @ np.asarray(right, dtype=np.int64) > 0).astype(np.int64)


@dataclass(frozen=True)
class LowRankFactors:
    """``A ≈ approximation + outlier_part`` with ``approximation = generators · coefficients``."""

    approximation: np.ndarray
    outlier_part: np.ndarray
    generators: np.ndarray
    coefficients: np.ndarray
    solution: ClusteringSolution


def residual(instance: LowRankInstance, approximation: np.ndarray, outlier_part: np.ndarray) -> int:
    """``‖A − B − C‖₀`` under the instance's arithmetic."""
    a = instance.matrix.cells
    if instance.boolean:
        return int(np.count_nonzero(a ^ approximation ^ outlier_part))
    return int(np.count_nonzero((a - approximation - outlier_part) % instance.prime))


def reconstruct_factors(instance: LowRankInstance, solution: ClusteringSolution) -> LowRankFactors:
    matrix = instance.matrix
    m, n = matrix.shape
    lambdas = coefficient_vectors(instance)
    if len(solution.centers) != len(lambdas):
        raise InvalidSolutionError(
            f"{len(solution.centers)} centers, expected one per coefficient vector ({len(lambdas)})"
        )
    table = value_table(instance)

    generators = np.zeros((m, instance.rank), dtype=np.int64)
    for h in range(m):
        values = tuple(center[h] for center in solution.centers)
        if values not in table:
            raise InvalidSolutionError(f"row {h + 1} of the centers is not generated by any u")
        generators[h] = table[values]

    approximation = np.zeros((m, n), dtype=np.int64)
    outlier_part = np.zeros((m, n), dtype=np.int64)
    coefficients = np.zeros((instance.rank, n), dtype=np.int64)
    for t, cluster in enumerate(solution.clusters):
        for j in cluster:
            approximation[:, j] = solution.centers[t]
            coefficients[:, j] = lambdas[t]
    for j in solution.outliers:
        outlier_part[:, j] = matrix.cells[:, j]

    if instance.boolean:
        reproduced = boolean_product(generators, coefficients)
    else:
        reproduced = (generators @ coefficients) % instance.prime
    if not np.array_equal(reproduced, approximation):
        raise InvalidSolutionError("approximation is not the product of the recovered factors")
    if not instance.boolean and gf_rank(approximation, instance.prime) > instance.rank:
        raise InvalidSolutionError("approximation exceeds the requested rank")
    return LowRankFactors(approximation, outlier_part, generators, coefficients, solution)


def solve_lowrank(
    instance: LowRankInstance,
    mode: str = MODE_DIRECT,
    settings: SolverSettings | None = None,
) -> LowRankFactors | None:
    reduced = build_lowrank_relations(instance, settings)
    solution = solve_constrained(reduced, mode, settings)
    if solution is None:
        return None
    factors = reconstruct_factors(instance, solution)
    cost = residual(instance, factors.approximation, factors.outlier_part)
    if cost != solution.cost:
        raise InvalidSolutionError(f"residual {cost} differs from clustering cost {solution.cost}")
    return factors
