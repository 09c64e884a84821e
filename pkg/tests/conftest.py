from __future__ import annotations

from itertools import product

import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from catclust.models import CategoricalMatrix, RelationSet

settings.register_profile(
    "catclust",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("catclust")

CYCLE_VERTICES = ("a", "b", "c", "d", "e")
CYCLE_EDGES = (("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("a", "e"))

TOY_COLUMNS = (
    (0, 0, 0, 0),
    (0, 0, 0, 1),
    (1, 1, 0, 0),
    (1, 1, 0, 1),
    (1, 0, 1, 0),
)


@pytest.fixture
def cycle_graph() -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(CYCLE_VERTICES)
    graph.add_edges_from(CYCLE_EDGES)
    return graph


@pytest.fixture
def cycle_incidence() -> CategoricalMatrix:
    """Rows a..e, columns ab, bc, cd, de, ae."""
    cells = [[int(v in edge) for edge in CYCLE_EDGES] for v in CYCLE_VERTICES]
    return CategoricalMatrix(cells, 2)


@pytest.fixture
def toy_matrix() -> CategoricalMatrix:
    return CategoricalMatrix.from_columns(TOY_COLUMNS, 2)


def matrices(rows: st.SearchStrategy[int], cols: st.SearchStrategy[int], alphabet: int = 2):
    @st.composite
    def build(draw) -> CategoricalMatrix:
        m, n = draw(rows), draw(cols)
        cells = draw(
            st.lists(
                st.lists(st.integers(0, alphabet - 1), min_size=n, max_size=n),
                min_size=m,
                max_size=m,
            )
        )
        return CategoricalMatrix(cells, alphabet)

    return build()


def relation_sets(k: int, alphabet: int, rows: int):
    everything = list(product(range(alphabet), repeat=k))
    return st.lists(
        st.lists(st.sampled_from(everything), min_size=1, max_size=len(everything), unique=True),
        min_size=rows,
        max_size=rows,
    ).map(lambda relations: RelationSet(k, relations))


def seeded_matrix(rng: np.random.Generator, rows: int, cols: int, alphabet: int) -> CategoricalMatrix:
    return CategoricalMatrix(rng.integers(0, alphabet, size=(rows, cols)), alphabet)


def seeded_relations(
    rng: np.random.Generator, k: int, alphabet: int, rows: int, max_size: int = 4
) -> RelationSet:
    everything = list(product(range(alphabet), repeat=k))
    relations = []
    for _ in range(rows):
        size = int(rng.integers(1, min(max_size, len(everything)) + 1))
        picks = rng.choice(len(everything), size=size, replace=False)
        relations.append([everything[int(i)] for i in picks])
    return RelationSet(k, relations)
