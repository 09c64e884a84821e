from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .exceptions import ContractViolation

Symbols = tuple[int, ...]


@dataclass(frozen=True)
class Alphabet:
    """Dense alphabet: the symbols are the integers ``0 .. size - 1``."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ContractViolation(f"alphabet size must be positive, got {self.size}")

    def __contains__(self, symbol: object) -> bool:
        return isinstance(symbol, (int, np.integer)) and 0 <= symbol < self.size

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.size))

    def __len__(self) -> int:
        return self.size


class CategoricalMatrix:
    """An immutable m x n grid of symbols; columns are the data points."""

    def __init__(self, cells: object, alphabet: Alphabet | int | None = None) -> None:
        array = np.array(cells, dtype=np.int64)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ContractViolation(
                f"a matrix needs at least one row and one column, got shape {array.shape}"
            )
        if (array < 0).any():
            raise ContractViolation("symbols must be non-negative integers")

        if alphabet is None:
            alphabet = Alphabet(int(array.max()) + 1)
        elif not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(int(alphabet))
        if int(array.max()) >= alphabet.size:
            raise ContractViolation(
                f"symbol {int(array.max())} is outside an alphabet of size {alphabet.size}"
            )

        array.setflags(write=False)
        self._cells: np.ndarray = array
        self._alphabet: Alphabet = alphabet

    @classmethod
    def from_columns(
        cls, columns: Sequence[Sequence[int]], alphabet: Alphabet | int | None = None
    ) -> CategoricalMatrix:
        return cls(np.array(columns, dtype=np.int64).T, alphabet)

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def cells(self) -> np.ndarray:
        return self._cells

    @property
    def rows(self) -> int:
        return int(self._cells.shape[0])

    @property
    def cols(self) -> int:
        return int(self._cells.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def column(self, j: int) -> Symbols:
        return tuple(int(v) for v in self._cells[:, j])

    def columns(self) -> list[Symbols]:
        return [self.column(j) for j in range(self.cols)]

    def row(self, i: int) -> Symbols:
        return tuple(int(v) for v in self._cells[i, :])

    def to_rows(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self._cells]

    def transpose(self) -> CategoricalMatrix:
        return CategoricalMatrix(self._cells.T, self._alphabet)

    def without_rows(self, removed: Iterable[int]) -> CategoricalMatrix:
        removed = set(removed)
        kept = [i for i in range(self.rows) if i not in removed]
        if not kept:
            raise ContractViolation("cannot remove every row of a matrix")
        return CategoricalMatrix(self._cells[kept, :], self._alphabet)

    def select_columns(self, indices: Sequence[int]) -> CategoricalMatrix:
        return CategoricalMatrix(self._cells[:, list(indices)], self._alphabet)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CategoricalMatrix):
            return NotImplemented
        return self._alphabet == other._alphabet and np.array_equal(
            self._cells, other._cells
        )

    def __hash__(self) -> int:
        return hash((self._alphabet.size, self._cells.shape, self._cells.tobytes()))

    def __repr__(self) -> str:
        return f"<CategoricalMatrix {self.rows}x{self.cols} |Σ|={self._alphabet.size}>"


class RelationSet:
    """Per-row sets of allowed k-tuples for the cluster centers.

    Tuples of each row are kept sorted, so ``self[h][0]`` is the
    lexicographically smallest element of ``R_h``.
    """

    def __init__(self, arity: int, relations: Sequence[Iterable[Sequence[int]]]) -> None:
        if arity < 1:
            raise ContractViolation(f"relation arity must be positive, got {arity}")
        rows: list[tuple[Symbols, ...]] = []
        for h, relation in enumerate(relations):
            tuples = {tuple(int(v) for v in z) for z in relation}
            if not tuples:
                raise ContractViolation(f"relation of row {h + 1} is empty")
            for z in tuples:
                if len(z) != arity:
                    raise ContractViolation(
                        f"relation of row {h + 1} holds a tuple of arity {len(z)}, expected {arity}"
                    )
            rows.append(tuple(sorted(tuples)))
        if not rows:
            raise ContractViolation("a relation set needs at least one row")
        self._arity = arity
        self._rows: tuple[tuple[Symbols, ...], ...] = tuple(rows)
        self._members: tuple[frozenset[Symbols], ...] = tuple(frozenset(r) for r in rows)

    @classmethod
    def full(cls, arity: int, alphabet_size: int, rows: int) -> RelationSet:
        everything = list(product(range(alphabet_size), repeat=arity))
        return cls(arity, [everything] * rows)

    @classmethod
    def uniform(cls, arity: int, tuples: Iterable[Sequence[int]], rows: int) -> RelationSet:
        tuples = list(tuples)
        return cls(arity, [tuples] * rows)

    @property
    def arity(self) -> int:
        return self._arity

    @property
    def max_size(self) -> int:
        return max(len(r) for r in self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def __getitem__(self, h: int) -> tuple[Symbols, ...]:
        return self._rows[h]

    def __iter__(self) -> Iterator[tuple[Symbols, ...]]:
        return iter(self._rows)

    def allows(self, h: int, z: Sequence[int]) -> bool:
        return tuple(z) in self._members[h]

    def smallest(self, h: int) -> Symbols:
        return self._rows[h][0]

    def max_symbol(self) -> int:
        return max(max(z) for r in self._rows for z in r)

    def project(self, slots: Sequence[int]) -> RelationSet:
        """Relations seen by the clusters in ``slots`` only."""
        return RelationSet(
            len(slots), [{tuple(z[s] for s in slots) for z in r} for r in self._rows]
        )

    def lift(self, h: int, slots: Sequence[int], partial: Sequence[int]) -> Symbols:
        """Smallest tuple of ``R_h`` that agrees with ``partial`` on ``slots``."""
        for z in self._rows[h]:
            if all(z[s] == v for s, v in zip(slots, partial)):
                return z
        raise ContractViolation(f"no tuple of row {h + 1} extends {tuple(partial)}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RelationSet):
            return NotImplemented
        return self._arity == other._arity and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._arity, self._rows))

    def __repr__(self) -> str:
        return f"<RelationSet arity={self._arity} rows={len(self._rows)} max|R|={self.max_size}>"


@dataclass(frozen=True)
class ConstrainedInstance:
    """Constrained Clustering with Outliers: cluster the columns of ``matrix``
    into ``k`` clusters, dropping at most ``outlier_cap`` columns, with centers
    that row-wise realise ``relations`` and total cost at most ``budget``."""

    matrix: CategoricalMatrix
    k: int
    budget: int
    outlier_cap: int
    relations: RelationSet

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ContractViolation(f"k must be positive, got {self.k}")
        if self.budget < 0 or self.outlier_cap < 0:
            raise ContractViolation("budget and outlier cap must be non-negative")
        if self.relations.arity != self.k:
            raise ContractViolation(
                f"relations have arity {self.relations.arity}, expected k={self.k}"
            )
        if len(self.relations) != self.matrix.rows:
            raise ContractViolation(
                f"{len(self.relations)} relations for a matrix with {self.matrix.rows} rows"
            )
        if self.outlier_cap >= self.matrix.cols:
            raise ContractViolation(
                f"outlier cap {self.outlier_cap} must be smaller than n={self.matrix.cols}"
            )


@dataclass(frozen=True)
class ClusteringSolution:
    """Outlier columns, clusters and one center per cluster (0-based indices)."""

    outliers: frozenset[int]
    clusters: tuple[frozenset[int], ...]
    centers: tuple[Symbols, ...]
    cost: int

    def __post_init__(self) -> None:
        if len(self.clusters) != len(self.centers):
            raise ContractViolation(
                f"{len(self.clusters)} clusters but {len(self.centers)} centers"
            )
        if self.cost < 0:
            raise ContractViolation("cost must be non-negative")

    @classmethod
    def build(
        cls,
        outliers: Iterable[int],
        clusters: Iterable[Iterable[int]],
        centers: Iterable[Sequence[int]],
        cost: int,
    ) -> ClusteringSolution:
        return cls(
            frozenset(int(j) for j in outliers),
            tuple(frozenset(int(j) for j in c) for c in clusters),
            tuple(tuple(int(v) for v in c) for c in centers),
            int(cost),
        )

    def sort_key(self) -> tuple:
        """Total order used for deterministic tie-breaking between equal costs."""
        return (
            self.cost,
            tuple(sorted(self.outliers)),
            tuple(tuple(sorted(c)) for c in self.clusters),
            self.centers,
        )


@dataclass(frozen=True)
class FeatureSelectionSolution:
    """Removed rows, clusters of columns and centers over the kept rows."""

    removed_features: frozenset[int]
    point_clusters: tuple[frozenset[int], ...]
    centers: tuple[Symbols, ...]
    cost: int

    def __post_init__(self) -> None:
        if len(self.point_clusters) != len(self.centers):
            raise ContractViolation(
                f"{len(self.point_clusters)} clusters but {len(self.centers)} centers"
            )
        if self.cost < 0:
            raise ContractViolation("cost must be non-negative")


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verification: failures are values, not exceptions."""

    ok: bool
    reason: str | None = None
    detail: str = field(default="", compare=False)

    @classmethod
    def passed(cls) -> Verdict:
        return cls(True)

    @classmethod
    def failed(cls, reason: str, detail: str = "") -> Verdict:
        return cls(False, reason, detail)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class FeatureSelectionInstance:
    """Feature Selection: remove at most ``outlier_cap`` rows of ``matrix`` so
    that its columns split into ``k`` clusters of total cost at most ``budget``."""

    matrix: CategoricalMatrix
    k: int
    budget: int
    outlier_cap: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ContractViolation(f"k must be positive, got {self.k}")
        if self.budget < 0 or self.outlier_cap < 0:
            raise ContractViolation("budget and outlier cap must be non-negative")
        if self.outlier_cap >= self.matrix.rows:
            raise ContractViolation(
                f"outlier cap {self.outlier_cap} must be smaller than m={self.matrix.rows}"
            )
