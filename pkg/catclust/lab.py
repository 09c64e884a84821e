"""
Instance generators and exhaustive oracles.

Planted instances are built from random centers with a known number of
cell edits. Hardness gadgets turn graph questions into Feature Selection
instances over the incidence matrix. The oracles enumerate everything and
are the ground truth the solvers are tested against.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Sequence

import networkx as nx
import numpy as np

from .config import SolverSettings
from .constant import (
    GADGET_INDEPENDENT_SET,
    GADGET_PARTIAL_VERTEX_COVER,
    PROBLEM_COLUMN_OUTLIERS,
    PROBLEM_CONSTRAINED,
    PROBLEM_FEATURE_SELECTION,
    PROBLEM_RESTRICTED,
    PROBLEMS,
)
from .column_outliers import ColumnOutliersInstance, RestrictedInstance, RestrictedResult, restricted_cost
from .exceptions import ContractViolation, OracleSizeError
from .lowrank import LowRankInstance, coefficient_vectors, combine
from .models import (
    CategoricalMatrix,
    ClusteringSolution,
    ConstrainedInstance,
    FeatureSelectionInstance,
    FeatureSelectionSolution,
    RelationSet,
    Symbols,
)

logger = logging.getLogger(__name__)

TARGET_COLUMN_OUTLIERS = "column-outliers"
TARGET_FEATURE_SELECTION = "feature-selection"


@dataclass(frozen=True)
class PlantedSpec:
    rows: int
    cols: int
    k: int
    alphabet_size: int
    noise_edits: int = 0
    outlier_count: int = 0
    seed: int = 0
    target: str = TARGET_COLUMN_OUTLIERS

    def __post_init__(self) -> None:
        if self.target not in (TARGET_COLUMN_OUTLIERS, TARGET_FEATURE_SELECTION):
            raise ContractViolation(f"unknown planted target {self.target!r}")
        if min(self.rows, self.cols, self.k, self.alphabet_size) < 1:
            raise ContractViolation("dimensions, k and alphabet size must be positive")
        if self.noise_edits < 0 or self.outlier_count < 0:
            raise ContractViolation("noise edits and outlier count must be non-negative")
        removable = self.cols if self.target == TARGET_COLUMN_OUTLIERS else self.rows
        if self.outlier_count >= removable:
            raise ContractViolation(
                f"outlier count {self.outlier_count} must be smaller than {removable}"
            )
        if self.noise_edits and self.alphabet_size < 2:
            raise ContractViolation("noise edits need at least two symbols")
        inlier_cells = (
            self.rows * (self.cols - self.outlier_count)
            if self.target == TARGET_COLUMN_OUTLIERS
            else (self.rows - self.outlier_count) * self.cols
        )
        if self.noise_edits > inlier_cells:
            raise ContractViolation(f"{self.noise_edits} edits but only {inlier_cells} cells")


@dataclass(frozen=True)
class PlantedInstance:
    instance: ColumnOutliersInstance | FeatureSelectionInstance
    planted: ClusteringSolution | FeatureSelectionSolution


def _plant(
    rng: np.random.Generator, spec: PlantedSpec, rows: int, cols: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Noisy copies of k random centers: (cells, centers, assignment)."""
    centers = rng.integers(0, spec.alphabet_size, size=(spec.k, rows))
    assignment = rng.integers(0, spec.k, size=cols)
    assignment[: min(spec.k, cols)] = np.arange(min(spec.k, cols))
    cells = centers[assignment].T.copy()
    for cell in rng.choice(rows * cols, size=spec.noise_edits, replace=False):
        h, j = divmod(int(cell), cols)
        shift = int(rng.integers(1, spec.alphabet_size))
        cells[h, j] = (cells[h, j] + shift) % spec.alphabet_size
    return cells, centers, assignment


def generate_planted(spec: PlantedSpec) -> PlantedInstance:
    rng = np.random.default_rng(spec.seed)
    if spec.target == TARGET_COLUMN_OUTLIERS:
        inliers = spec.cols - spec.outlier_count
        cells, centers, assignment = _plant(rng, spec, spec.rows, inliers)
        noise = rng.integers(0, spec.alphabet_size, size=(spec.rows, spec.outlier_count))
        matrix = CategoricalMatrix(np.hstack([cells, noise]), spec.alphabet_size)
        planted = ClusteringSolution.build(
            range(inliers, spec.cols),
            [np.flatnonzero(assignment == t) for t in range(spec.k)],
            centers,
            spec.noise_edits,
        )
        instance = ColumnOutliersInstance(matrix, spec.k, spec.noise_edits, spec.outlier_count)
    else:
        informative = spec.rows - spec.outlier_count
        cells, centers, assignment = _plant(rng, spec, informative, spec.cols)
        noise = rng.integers(0, spec.alphabet_size, size=(spec.outlier_count, spec.cols))
        matrix = CategoricalMatrix(np.vstack([cells, noise]), spec.alphabet_size)
        planted = FeatureSelectionSolution(
            removed_features=frozenset(range(informative, spec.rows)),
            point_clusters=tuple(
                frozenset(int(j) for j in np.flatnonzero(assignment == t)) for t in range(spec.k)
            ),
            centers=tuple(tuple(int(v) for v in c) for c in centers),
            cost=spec.noise_edits,
        )
        instance = FeatureSelectionInstance(matrix, spec.k, spec.noise_edits, spec.outlier_count)
    logger.debug("planted %s instance %r from seed %i", spec.target, instance.matrix, spec.seed)
    return PlantedInstance(instance, planted)


@dataclass(frozen=True)
class GraphGadget:
    """A graph question, the graph actually encoded, and the resulting instance."""

    kind: str
    graph: nx.Graph
    encoded: nx.Graph
    t: int
    q: int | None
    instance: FeatureSelectionInstance


def incidence_matrix(graph: nx.Graph) -> CategoricalMatrix:
    """Vertices (sorted) by edges (sorted by endpoints)."""
    nodes = sorted(graph.nodes)
    edges = sorted(tuple(sorted(e)) for e in graph.edges)
    if not edges:
        raise ContractViolation("the incidence matrix of an edgeless graph has no columns")
    row = {v: i for i, v in enumerate(nodes)}
    cells = np.zeros((len(nodes), len(edges)), dtype=np.int64)
    for j, (u, v) in enumerate(edges):
        cells[row[u], j] = 1
        cells[row[v], j] = 1
    return CategoricalMatrix(cells, 2)


def _check_simple(graph: nx.Graph) -> None:
    if graph.is_directed() or graph.is_multigraph():
        raise ContractViolation("gadgets need a simple undirected graph")
    if nx.number_of_selfloops(graph):
        raise ContractViolation("gadgets need a graph without self-loops")


def _fresh_labels(graph: nx.Graph, count: int) -> list[int]:
    start = max((v for v in graph.nodes if isinstance(v, int)), default=-1) + 1
    return list(range(start, start + count))


def independent_set_graph(graph: nx.Graph, t: int) -> nx.Graph:
    """``graph`` joined to a fresh (t+2)-clique."""
    encoded = nx.Graph(graph)
    clique = _fresh_labels(graph, t + 2)
    encoded.add_nodes_from(clique)
    encoded.add_edges_from(combinations(clique, 2))
    encoded.add_edges_from((v, c) for v in graph.nodes for c in clique)
    return encoded


def build_independent_set_gadget(graph: nx.Graph, t: int, augment: bool = True) -> GraphGadget:
    _check_simple(graph)
    if t < 1:
        raise ContractViolation(f"t must be positive, got {t}")
    encoded = independent_set_graph(graph, t) if augment else nx.Graph(graph)
    if t >= encoded.number_of_nodes():
        raise ContractViolation(f"t = {t} leaves no vertex to remove")
    matrix = incidence_matrix(encoded)
    instance = FeatureSelectionInstance(matrix, k=t + 1, budget=0, outlier_cap=matrix.rows - t)
    return GraphGadget(GADGET_INDEPENDENT_SET, graph, encoded, t, None, instance)


def gadget_independent_set(graph: nx.Graph, t: int, augment: bool = True) -> FeatureSelectionInstance:
    """Yes-instance iff ``graph`` has an independent set of size ``t``."""
    return build_independent_set_gadget(graph, t, augment).instance


def partial_vertex_cover_graph(graph: nx.Graph, t: int, q: int) -> nx.Graph:
    """``graph`` plus d = 5 + t + |E| − q isolated vertices and two universal vertices."""
    d = 5 + t + graph.number_of_edges() - q
    encoded = nx.Graph(graph)
    fresh = _fresh_labels(graph, 2 + d)
    universal, padding = fresh[:2], fresh[2:]
    encoded.add_nodes_from(padding)
    encoded.add_nodes_from(universal)
    for p in universal:
        encoded.add_edges_from((p, v) for v in list(encoded.nodes) if v != p)
    return encoded


def build_partial_vertex_cover_gadget(graph: nx.Graph, t: int, q: int) -> GraphGadget:
    _check_simple(graph)
    if q > graph.number_of_edges():
        raise ContractViolation(f"q = {q} exceeds the {graph.number_of_edges()} edges of the graph")
    if t < 0 or q < 0:
        raise ContractViolation("t and q must be non-negative")
    encoded = partial_vertex_cover_graph(graph, t, q)
    t_prime = t + 2
    q_prime = q + 2 * encoded.number_of_nodes() - 3
    k = 1 + encoded.number_of_nodes() - t_prime + encoded.number_of_edges() - q_prime
    matrix = incidence_matrix(encoded)
    instance = FeatureSelectionInstance(matrix, k=k, budget=0, outlier_cap=t_prime)
    return GraphGadget(GADGET_PARTIAL_VERTEX_COVER, graph, encoded, t, q, instance)


def gadget_partial_vertex_cover(graph: nx.Graph, t: int, q: int) -> FeatureSelectionInstance:
    """Yes-instance iff some ``t`` vertices of ``graph`` cover ``q`` edges."""
    return build_partial_vertex_cover_gadget(graph, t, q).instance


def independent_set_exists(graph: nx.Graph, t: int) -> bool:
    return any(
        not graph.subgraph(chosen).number_of_edges()
        for chosen in combinations(sorted(graph.nodes), t)
    )


def partial_vertex_cover_exists(graph: nx.Graph, t: int, q: int) -> bool:
    size = min(t, graph.number_of_nodes())
    for chosen in combinations(sorted(graph.nodes), size):
        chosen = set(chosen)
        covered = sum(1 for u, v in graph.edges if u in chosen or v in chosen)
        if covered >= q:
            return True
    return False


@dataclass(frozen=True)
class OracleResult:
    cost: int
    witness: object


class _Partitioner:
    """Branch and bound over assignments of weighted distinct columns to clusters.

    Unlabeled mode numbers clusters by first use and charges plurality
    centers. With relations, slots are labeled and each row charges the
    cheapest allowed tuple.
    """

    def __init__(
        self,
        items: Sequence[Symbols],
        weights: Sequence[int],
        k: int,
        alphabet_size: int,
        relations: RelationSet | None = None,
    ) -> None:
        self.items = np.array(items, dtype=np.int64)
        self.weights = list(weights)
        self.k = k
        self.rows = self.items.shape[1]
        self.relations = relations
        self.counts = np.zeros((k, self.rows, alphabet_size), dtype=np.int64)
        self.totals = np.zeros(k, dtype=np.int64)
        self._row_index = np.arange(self.rows)
        self._slot_index = np.arange(k)[None, :]
        self.allowed = (
            [np.array(relations[h], dtype=np.int64) for h in range(self.rows)]
            if relations is not None
            else None
        )

    def _row_costs(self, h: int) -> np.ndarray:
        agree = self.counts[self._slot_index, h, self.allowed[h]]
        return (self.totals[None, :] - agree).sum(axis=1)

    def cost(self) -> int:
        if self.allowed is None:
            return int((self.totals[:, None] - self.counts.max(axis=2)).sum())
        return sum(int(self._row_costs(h).min()) for h in range(self.rows))

    def centers(self, used: int) -> list[Symbols]:
        if self.allowed is None:
            plural = self.counts[:used].argmax(axis=2)
            return [tuple(int(v) for v in row) for row in plural]
        picks = [self.allowed[h][int(self._row_costs(h).argmin())] for h in range(self.rows)]
        return [tuple(int(picks[h][t]) for h in range(self.rows)) for t in range(self.k)]

    def _move(self, i: int, t: int, sign: int) -> None:
        w = sign * self.weights[i]
        self.counts[t, self._row_index, self.items[i]] += w
        self.totals[t] += w

    def search(self, bound: int) -> tuple[int, list[int], list[Symbols]] | None:
        labeled = self.allowed is not None
        count = len(self.weights)
        assignment = [-1] * count
        best: list = [None]

        def place(i: int, used: int) -> bool:
            cost = self.cost()
            limit = bound if best[0] is None else best[0][0] - 1
            if cost > limit:
                return False
            if i == count:
                width = self.k if labeled else used
                best[0] = (cost, list(assignment), self.centers(width))
                return cost == 0
            slots = range(self.k) if labeled else range(min(used + 1, self.k))
            for t in slots:
                self._move(i, t, 1)
                assignment[i] = t
                done = place(i + 1, max(used, t + 1))
                self._move(i, t, -1)
                if done:
                    return True
            return False

        place(0, 0)
        return best[0]


def _guard(what: str, states: int, settings: SolverSettings) -> None:
    if states > settings.oracle_state_limit:
        raise OracleSizeError(what, states, settings.oracle_state_limit)


def _groups(columns: Sequence[Symbols]) -> tuple[list[Symbols], list[list[int]]]:
    members: dict[Symbols, list[int]] = {}
    for j, column in enumerate(columns):
        members.setdefault(column, []).append(j)
    return list(members), list(members.values())


def _removal_vectors(weights: Sequence[int], total: int) -> Iterator[tuple[int, ...]]:
    """Per-group outlier counts summing to ``total``, each within its group's weight."""
    if not weights:
        if total == 0:
            yield ()
        return
    head, rest = weights[0], weights[1:]
    room = sum(rest)
    for taken in range(max(0, total - room), min(head, total) + 1):
        for tail in _removal_vectors(rest, total - taken):
            yield (taken,) + tail


def _cluster_with_outliers(
    matrix: CategoricalMatrix,
    k: int,
    budget: int,
    outlier_cap: int,
    relations: RelationSet | None,
    settings: SolverSettings,
    what: str,
) -> OracleResult | None:
    distinct, members = _groups(matrix.columns())
    weights = [len(m) for m in members]
    removed = min(outlier_cap, matrix.cols - 1)
    vectors = math.comb(len(distinct) + removed, removed)
    _guard(what, vectors * k ** len(distinct), settings)

    best: tuple[int, tuple, ClusteringSolution] | None = None
    for vector in _removal_vectors(weights, removed):
        kept = [g for g in range(len(distinct)) if weights[g] - vector[g] > 0]
        partitioner = _Partitioner(
            [distinct[g] for g in kept],
            [weights[g] - vector[g] for g in kept],
            k,
            matrix.alphabet.size,
            relations,
        )
        bound = budget if best is None else best[0] - 1
        found = partitioner.search(bound)
        if found is None:
            continue
        cost, assignment, centers = found
        outliers = [j for g in range(len(distinct)) for j in members[g][weights[g] - vector[g]:]]
        clusters: list[list[int]] = [[] for _ in centers]
        for position, g in enumerate(kept):
            clusters[assignment[position]].extend(members[g][: weights[g] - vector[g]])
        solution = ClusteringSolution.build(outliers, clusters, centers, cost)
        best = (cost, vector, solution)
        if cost == 0:
            break
    if best is None:
        return None
    return OracleResult(best[0], best[2])


def oracle_constrained(
    instance: ConstrainedInstance, settings: SolverSettings | None = None
) -> OracleResult | None:
    return _cluster_with_outliers(
        instance.matrix,
        instance.k,
        instance.budget,
        instance.outlier_cap,
        instance.relations,
        settings or SolverSettings(),
        "constrained clustering oracle",
    )


def oracle_column_outliers(
    instance: ColumnOutliersInstance, settings: SolverSettings | None = None
) -> OracleResult | None:
    return _cluster_with_outliers(
        instance.matrix,
        instance.k,
        instance.budget,
        instance.outlier_cap,
        None,
        settings or SolverSettings(),
        "column outliers oracle",
    )


def oracle_feature_selection(
    instance: FeatureSelectionInstance, settings: SolverSettings | None = None
) -> OracleResult | None:
    """Removing a row never raises the cost, so only maximal removal sets are tried."""
    settings = settings or SolverSettings()
    matrix = instance.matrix
    removed = min(instance.outlier_cap, matrix.rows - 1)
    subsets = math.comb(matrix.rows, removed)
    per_subset = 1 if instance.budget == 0 else instance.k**matrix.cols
    _guard("feature selection oracle", subsets * per_subset, settings)

    best: tuple[int, FeatureSelectionSolution] | None = None
    for dropped in combinations(range(matrix.rows), removed):
        kept_rows = [i for i in range(matrix.rows) if i not in dropped]
        if instance.budget == 0:
            if np.unique(matrix.cells[kept_rows], axis=1).shape[1] > instance.k:
                continue
        reduced = matrix.without_rows(dropped)
        distinct, members = _groups(reduced.columns())
        if len(distinct) <= instance.k:
            found = (0, list(range(len(distinct))), list(distinct))
        elif instance.budget == 0:
            continue
        else:
            bound = instance.budget if best is None else best[0] - 1
            found = _Partitioner(
                distinct, [len(m) for m in members], instance.k, matrix.alphabet.size
            ).search(bound)
            if found is None:
                continue
        cost, assignment, centers = found
        clusters: list[set[int]] = [set() for _ in centers]
        for g, t in enumerate(assignment):
            clusters[t].update(members[g])
        solution = FeatureSelectionSolution(
            frozenset(dropped), tuple(frozenset(c) for c in clusters), tuple(centers), cost
        )
        if best is None or cost < best[0]:
            best = (cost, solution)
        if cost == 0:
            break
    if best is None:
        return None
    return OracleResult(best[0], best[1])


def oracle_restricted(
    instance: RestrictedInstance, settings: SolverSettings | None = None
) -> OracleResult | None:
    settings = settings or SolverSettings()
    rows = len(instance.sets[0][0].column)
    selections = math.prod(len(members) for members in instance.sets)
    _guard("restricted clustering oracle", selections * instance.alphabet_size**rows, settings)

    best: RestrictedResult | None = None
    for center in product(range(instance.alphabet_size), repeat=rows):
        cost, chosen = restricted_cost(instance.sets, center)
        if cost <= instance.budget and (best is None or cost < best.cost):
            best = RestrictedResult(chosen, tuple(center), cost)
    if best is None:
        return None
    return OracleResult(best.cost, best)


def oracle(problem: str, instance: object, settings: SolverSettings | None = None) -> OracleResult | None:
    """Exact optimum of ``instance`` (``None`` when it exceeds the budget)."""
    if problem == PROBLEM_FEATURE_SELECTION:
        return oracle_feature_selection(instance, settings)
    if problem == PROBLEM_CONSTRAINED:
        return oracle_constrained(instance, settings)
    if problem == PROBLEM_COLUMN_OUTLIERS:
        return oracle_column_outliers(instance, settings)
    if problem == PROBLEM_RESTRICTED:
        return oracle_restricted(instance, settings)
    raise ContractViolation(f"unknown problem {problem!r}, expected one of {PROBLEMS}")


def lowrank_oracle(
    instance: LowRankInstance, settings: SolverSettings | None = None
) -> OracleResult | None:
    """Try every generator matrix U; each column takes its best coefficient vector.

    The witness is a clustering with one slot per coefficient vector, in the
    order of ``coefficient_vectors``, which ``reconstruct_factors`` accepts.
    """
    settings = settings or SolverSettings()
    matrix = instance.matrix
    m, n = matrix.shape
    p, r = instance.prime, instance.rank
    _guard("low-rank oracle", p ** (m * r) * p**r * n, settings)
    lambdas = coefficient_vectors(instance)
    kept = n - instance.outlier_cap

    best: tuple[int, np.ndarray, np.ndarray] | None = None
    for flat in product(range(p), repeat=m * r):
        generators = np.array(flat, dtype=np.int64).reshape(m, r)
        spans = np.array(
            [[combine(instance, lam, tuple(generators[h])) for h in range(m)] for lam in lambdas],
            dtype=np.int64,
        )
        distances = (matrix.cells.T[:, None, :] != spans[None, :, :]).sum(axis=2)
        cost = int(np.sort(distances.min(axis=1))[:kept].sum())
        if cost <= instance.budget and (best is None or cost < best[0]):
            best = (cost, spans, distances)
    if best is None:
        return None

    cost, spans, distances = best
    order = np.argsort(distances.min(axis=1), kind="stable")
    nearest = distances.argmin(axis=1)
    clusters: list[list[int]] = [[] for _ in lambdas]
    for j in order[:kept]:
        clusters[int(nearest[j])].append(int(j))
    solution = ClusteringSolution.build(order[kept:], clusters, spans, cost)
    return OracleResult(cost, solution)
