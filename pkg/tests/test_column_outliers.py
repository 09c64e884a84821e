from __future__ import annotations

import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catclust.config import SolverSettings
from catclust.constant import (
    MODE_DIRECT,
    MODE_HYPERGRAPH,
    REASON_NOT_NORMALIZED,
    TYPE_OUTLIER,
    TYPE_SCATTERED,
    TYPE_SPLIT,
    TYPE_SPREAD,
    TYPE_WHOLE,
)
from catclust.column_outliers import (
    ColumnOutliersInstance,
    RestrictedInstance,
    WeightedColumn,
    admissible_guess,
    classify_initial_clusters,
    default_trials,
    group_columns,
    normalize_witness,
    restricted_cost,
    solve_column_outliers,
    solve_restricted,
    verify_restricted,
)
from catclust.exceptions import ContractViolation, WorkCeilingExceeded
from catclust.geometry import verify_clustering
from catclust.lab import PlantedSpec, generate_planted, oracle_column_outliers, oracle_restricted
from catclust.models import CategoricalMatrix, ClusteringSolution

from .conftest import TOY_COLUMNS, matrices, seeded_matrix


def test_group_identical_columns():
    groups = group_columns(CategoricalMatrix([[1, 1, 1], [0, 0, 0]], 2))
    assert groups.beta == 1 and groups.weights == (3,)


def test_group_distinct_columns(toy_matrix):
    groups = group_columns(toy_matrix)
    assert groups.beta == 5
    assert groups.weights == (1,) * 5


def test_group_with_duplicate():
    columns = list(TOY_COLUMNS)
    columns.insert(2, TOY_COLUMNS[1])
    groups = group_columns(CategoricalMatrix.from_columns(columns, 2))
    assert groups.beta == 5
    assert groups.weights == (1, 2, 1, 1, 1)
    assert groups.member_map[1] == (1, 2)
    assert groups.group_of(2) == 1


def test_restricted_single_set():
    column = WeightedColumn((0, 1, 1), 1)
    result = solve_restricted([[column]], 0)
    assert result.center == (0, 1, 1)
    assert result.cost == 0


@pytest.mark.parametrize("mode", [MODE_DIRECT, MODE_HYPERGRAPH])
def test_restricted_weighted_pair(mode):
    sets = [[WeightedColumn((0, 0), 3)], [WeightedColumn((1, 1), 1)]]
    result = solve_restricted(sets, 2, mode, alphabet_size=2)
    assert result.center == (0, 0)
    assert result.cost == 2
    assert solve_restricted(sets, 1, mode, alphabet_size=2) is None


def test_restricted_cost_picks_cheapest_member():
    sets = [[WeightedColumn((1, 1), 1), WeightedColumn((0, 1), 1)]]
    assert restricted_cost(sets, (0, 0)) == (1, (1,))


@st.composite
def restricted_instances(draw):
    rows = draw(st.integers(1, 4))
    column = st.tuples(*[st.integers(0, 1)] * rows)
    member = st.builds(WeightedColumn, column, st.integers(1, 3))
    sets = draw(st.lists(st.lists(member, min_size=1, max_size=3), min_size=1, max_size=3))
    budget = draw(st.integers(0, 2))
    return RestrictedInstance(tuple(tuple(s) for s in sets), budget, 2)


@given(restricted_instances(), st.sampled_from([MODE_DIRECT, MODE_HYPERGRAPH]))
def test_restricted_matches_oracle(instance, mode):
    result = instance.solve(mode)
    best = oracle_restricted(instance)
    assert (result is None) == (best is None)
    if result is not None:
        assert result.cost == best.cost
        assert restricted_cost(instance.sets, result.center)[0] == result.cost


def test_restricted_instance_from_groups(toy_matrix):
    instance = RestrictedInstance.from_groups(toy_matrix, [[(0, 3)], [(2, 1)]], 2)
    result = instance.solve()
    assert result.center == (0, 0, 0, 0)
    assert result.cost == 2
    with pytest.raises(ContractViolation):
        RestrictedInstance.from_groups(toy_matrix, [[(7, 1)]], 2)


@pytest.mark.parametrize(
    "chosen, center, cost, reason",
    [
        ((0, 2), (0, 0, 0, 0), 2, None),
        ((0, 2), (0, 0, 0, 0), 3, "cost-mismatch"),
        ((0,), (0, 0, 0, 0), 2, "bad-selection"),
        ((1, 2), (0, 0, 0, 0), 2, "bad-selection"),
        ((0, 2), (0, 0, 2, 0), 3, "bad-center"),
        ((0, 2), (1, 1, 0, 0), 6, "over-budget"),
    ],
)
def test_verify_restricted(toy_matrix, chosen, center, cost, reason):
    instance = RestrictedInstance.from_groups(toy_matrix, [[(0, 3)], [(2, 1)]], 2)
    verdict = verify_restricted(instance, chosen, center, cost)
    assert bool(verdict) is (reason is None)
    assert verdict.reason == reason


def test_admissible_guess():
    assert admissible_guess([], 0) == ()
    assert admissible_guess([1, 2], 3) == (1, 2)
    assert admissible_guess([2, 2], 3) is None


def test_default_trials():
    assert default_trials(0) == 5
    assert default_trials(1) == math.ceil(math.exp(2) * math.log(100))


@pytest.mark.parametrize("mode", [MODE_DIRECT, MODE_HYPERGRAPH])
def test_toy_instance(toy_matrix, mode):
    instance = ColumnOutliersInstance(toy_matrix, 2, 2, 1)
    solution = solve_column_outliers(instance, mode=mode)
    assert solution.cost == 2
    assert solution.outliers == frozenset({4})
    assert verify_clustering(toy_matrix, 2, 2, 1, solution)
    assert oracle_column_outliers(instance).cost == 2
    assert solve_column_outliers(ColumnOutliersInstance(toy_matrix, 2, 1, 1), mode=mode) is None


def test_every_column_its_own_cluster(toy_matrix):
    solution = solve_column_outliers(ColumnOutliersInstance(toy_matrix, 5, 0, 0))
    assert solution.cost == 0
    assert sorted(sorted(c) for c in solution.clusters) == [[0], [1], [2], [3], [4]]


def test_groups_become_clusters():
    matrix = CategoricalMatrix.from_columns([(0, 0), (1, 1), (0, 0), (0, 1), (1, 1)], 2)
    solution = solve_column_outliers(ColumnOutliersInstance(matrix, 3, 0, 0))
    assert solution.cost == 0
    assert sorted(sorted(c) for c in solution.clusters) == [[0, 2], [1, 4], [3]]


def test_work_ceiling(toy_matrix):
    with pytest.raises(WorkCeilingExceeded):
        solve_column_outliers(
            ColumnOutliersInstance(toy_matrix, 2, 2, 1), settings=SolverSettings(work_ceiling=10)
        )


@pytest.fixture
def doubled_toy() -> CategoricalMatrix:
    # every toy column twice: groups {0,1}, {2,3}, ..., {8,9}
    return CategoricalMatrix.from_columns([c for c in TOY_COLUMNS for _ in range(2)], 2)


def test_classify_whole_groups(doubled_toy):
    solution = ClusteringSolution.build(
        [], [[0, 1, 2, 3], [4, 5, 6, 7, 8, 9]], [TOY_COLUMNS[0], TOY_COLUMNS[2]], 0
    )
    assert classify_initial_clusters(doubled_toy, solution) == [TYPE_WHOLE] * 5
    assert normalize_witness(doubled_toy, solution)


def test_classify_one_split(doubled_toy):
    solution = ClusteringSolution.build(
        [9, 6, 7], [[0, 1, 2, 3], [4, 5, 8]], [TOY_COLUMNS[0], TOY_COLUMNS[2]], 0
    )
    types = classify_initial_clusters(doubled_toy, solution)
    assert types == [TYPE_WHOLE, TYPE_WHOLE, TYPE_WHOLE, TYPE_OUTLIER, TYPE_SPLIT]
    assert normalize_witness(doubled_toy, solution)


def test_classify_spread_and_scattered(doubled_toy):
    spread = ClusteringSolution.build(
        [], [[0, 2, 3], [1, 4, 5, 6, 7, 8, 9]], [TOY_COLUMNS[0], TOY_COLUMNS[2]], 0
    )
    assert classify_initial_clusters(doubled_toy, spread)[0] == TYPE_SPREAD
    assert normalize_witness(doubled_toy, spread).reason == REASON_NOT_NORMALIZED

    tripled = CategoricalMatrix.from_columns([(0, 0), (0, 0), (0, 0), (1, 1)], 2)
    scattered = ClusteringSolution.build([2], [[0], [1, 3]], [(0, 0), (1, 1)], 0)
    assert classify_initial_clusters(tripled, scattered) == [TYPE_SCATTERED, TYPE_WHOLE]
    assert normalize_witness(tripled, scattered).reason == REASON_NOT_NORMALIZED


def test_two_splits_are_not_normalized(doubled_toy):
    solution = ClusteringSolution.build(
        [1, 3], [[0, 2], [4, 5, 6, 7, 8, 9]], [TOY_COLUMNS[0], TOY_COLUMNS[2]], 0
    )
    assert normalize_witness(doubled_toy, solution).reason == REASON_NOT_NORMALIZED


@st.composite
def column_outlier_instances(draw):
    matrix = draw(matrices(st.integers(1, 3), st.integers(2, 6)))
    k = draw(st.integers(1, 3))
    budget = draw(st.integers(0, 2))
    outlier_cap = draw(st.integers(0, 1))
    return ColumnOutliersInstance(matrix, k, budget, outlier_cap)


@given(column_outlier_instances())
def test_exhaustive_matches_oracle(instance):
    solution = solve_column_outliers(instance)
    best = oracle_column_outliers(instance)
    assert (solution is None) == (best is None)
    if solution is not None:
        assert solution.cost == best.cost
        assert verify_clustering(
            instance.matrix, instance.k, instance.budget, instance.outlier_cap, solution
        )
        assert normalize_witness(instance.matrix, solution)


@given(column_outlier_instances())
def test_hypergraph_mode_agrees(instance):
    direct = solve_column_outliers(instance, mode=MODE_DIRECT)
    hypergraph = solve_column_outliers(instance, mode=MODE_HYPERGRAPH)
    assert (direct is None) == (hypergraph is None)
    if direct is not None:
        assert direct.cost == hypergraph.cost


@given(column_outlier_instances(), st.integers(0, 3))
def test_color_coding_is_one_sided(instance, seed):
    found = solve_column_outliers(instance, exhaustive=False, trials=8, seed=seed)
    if found is None:
        return
    assert verify_clustering(
        instance.matrix, instance.k, instance.budget, instance.outlier_cap, found
    )
    assert found.cost >= oracle_column_outliers(instance).cost


@pytest.mark.parametrize("seed", range(4))
def test_color_coding_on_planted_instances(seed):
    exact_fit = generate_planted(
        PlantedSpec(rows=4, cols=6, k=2, alphabet_size=2, outlier_count=1, seed=seed)
    ).instance
    found = solve_column_outliers(exact_fit, exhaustive=False, seed=seed)
    assert found is not None and found.cost == 0

    noisy = generate_planted(
        PlantedSpec(rows=4, cols=6, k=2, alphabet_size=2, noise_edits=1, outlier_count=1, seed=seed)
    ).instance
    exact = solve_column_outliers(noisy)
    assert exact is not None and exact.cost <= noisy.budget
    found = solve_column_outliers(noisy, exhaustive=False, seed=seed)
    if found is not None:
        assert found.cost >= exact.cost
        assert verify_clustering(noisy.matrix, noisy.k, noisy.budget, noisy.outlier_cap, found)


def test_color_coding_is_deterministic(toy_matrix):
    instance = ColumnOutliersInstance(toy_matrix, 2, 2, 1)
    first = solve_column_outliers(instance, exhaustive=False, trials=5, seed=3)
    second = solve_column_outliers(instance, exhaustive=False, trials=5, seed=3)
    assert first == second


def vanilla_optimum(matrix: CategoricalMatrix, k: int) -> int:
    """Cheapest split of all columns into at most k clusters, no outliers."""
    cells = matrix.cells
    symbols = np.arange(matrix.alphabet.size)
    best = None
    for labels in product(range(k), repeat=matrix.cols):
        assignment = np.array(labels)
        cost = 0
        for t in range(k):
            block = cells[:, assignment == t]
            if block.shape[1]:
                agree = (block[:, :, None] == symbols).sum(axis=1).max(axis=1)
                cost += block.size - int(agree.sum())
        best = cost if best is None else min(best, cost)
    return best


def seeded_instance(seed: int) -> ColumnOutliersInstance:
    rng = np.random.default_rng(seed)
    rows, cols = int(rng.integers(1, 7)), int(rng.integers(1, 9))
    matrix = seeded_matrix(rng, rows, cols, 2)
    k = int(rng.integers(1, 4))
    budget = int(rng.integers(0, 4))
    outlier_cap = int(rng.integers(0, min(2, cols - 1) + 1))
    return ColumnOutliersInstance(matrix, k, budget, outlier_cap)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(200))
def test_seeded_corpus_matches_oracle(seed):
    instance = seeded_instance(seed)
    solution = solve_column_outliers(instance)
    best = oracle_column_outliers(instance)
    assert (solution is None) == (best is None)
    if instance.outlier_cap == 0:
        vanilla = vanilla_optimum(instance.matrix, instance.k)
        assert (solution is None) == (vanilla > instance.budget)
        if solution is not None:
            assert solution.cost == vanilla
    if solution is not None:
        assert solution.cost == best.cost
        assert verify_clustering(
            instance.matrix, instance.k, instance.budget, instance.outlier_cap, solution
        )
        assert normalize_witness(instance.matrix, solution)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_without_outliers_matches_vanilla_clustering(toy_matrix, k):
    vanilla = vanilla_optimum(toy_matrix, k)
    solution = solve_column_outliers(ColumnOutliersInstance(toy_matrix, k, vanilla, 0))
    assert solution.cost == vanilla
    assert solve_column_outliers(ColumnOutliersInstance(toy_matrix, k, vanilla - 1, 0)) is None


@pytest.mark.slow
def test_color_coding_hits_the_optimum_on_planted_instances():
    hits = 0
    for seed in range(100):
        instance = generate_planted(
            PlantedSpec(rows=4, cols=6, k=2, alphabet_size=2, noise_edits=1, outlier_count=1, seed=seed)
        ).instance
        exact = solve_column_outliers(instance)
        found = solve_column_outliers(instance, exhaustive=False, seed=seed)
        if found is not None and found.cost == exact.cost:
            hits += 1
    assert hits >= 95
