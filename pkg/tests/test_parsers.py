from __future__ import annotations

import networkx as nx
import pytest

from catclust.exceptions import AlphabetError, ParseError, RelationArityError
from catclust.models import CategoricalMatrix
from catclust.parsers import (
    parse_graph,
    parse_groups,
    parse_matrix,
    parse_relations,
    read_matrix,
    write_graph,
    write_matrix,
)


def test_matrix_with_comments_and_blank_lines():
    matrix, labels = parse_matrix("# header\n0, 1, 1\n\n1,2,0\n")
    assert matrix.to_rows() == [[0, 1, 1], [1, 2, 0]]
    assert matrix.alphabet.size == 3
    assert labels is None


def test_matrix_with_declared_alphabet():
    matrix, _ = parse_matrix("0,1\n1,0\n", alphabet_size=4)
    assert matrix.alphabet.size == 4


def test_categorical_matrix():
    matrix, labels = parse_matrix("red,blue\nblue,green\n", categorical=True)
    assert matrix.to_rows() == [[0, 1], [1, 2]]
    assert labels == ["red", "blue", "green"]


@pytest.mark.parametrize(
    "text, line",
    [
        ("0,1\n0\n", 2),
        ("0,x\n", 1),
        ("# comment\n0,-1\n", 2),
    ],
)
def test_matrix_errors_name_the_line(text, line):
    with pytest.raises(ParseError) as caught:
        parse_matrix(text)
    assert caught.value.line == line
    assert str(caught.value).startswith(f"line {line}:")


def test_matrix_symbol_outside_alphabet():
    with pytest.raises(AlphabetError):
        parse_matrix("0,1\n2,0\n", alphabet_size=2)


def test_empty_matrix():
    with pytest.raises(ParseError):
        parse_matrix("# nothing here\n\n")


def test_matrix_file_round_trip(tmp_path, toy_matrix):
    path = tmp_path / "toy.csv"
    path.write_text(write_matrix(toy_matrix), encoding="utf-8")
    matrix, _ = read_matrix(path)
    assert matrix == toy_matrix


def test_write_matrix():
    assert write_matrix(CategoricalMatrix([[0, 1], [1, 2]], 3)) == "0,1\n1,2\n"


def test_relations():
    relations = parse_relations("*\n0,1; 1,0\n\n", 2, 2, 2)
    assert relations.arity == 2
    assert len(relations[0]) == 4
    assert relations[1] == ((0, 1), (1, 0))


def test_relations_reject_empty_line():
    with pytest.raises(ParseError) as caught:
        parse_relations("0,0\n\n0,0\n", 2, 2, 3)
    assert caught.value.line == 2
    assert "empty relation" in str(caught.value)


def test_relations_reject_wrong_arity():
    with pytest.raises(RelationArityError):
        parse_relations("0,0,1\n", 2, 2, 1)


def test_relations_reject_unknown_symbol():
    with pytest.raises(AlphabetError):
        parse_relations("0,2\n", 2, 2, 1)


def test_relations_must_cover_every_row():
    with pytest.raises(ParseError):
        parse_relations("*\n", 2, 2, 2)


def test_groups():
    groups = parse_groups("1:3 2\n# second set\n3,4:2\n")
    assert groups == [[(0, 3), (1, 1)], [(2, 1), (3, 2)]]


@pytest.mark.parametrize("text", ["0\n", "1:0\n", "1:x\n", "# none\n"])
def test_groups_errors(text):
    with pytest.raises(ParseError):
        parse_groups(text)


def test_graph():
    graph = parse_graph("# a path\np 3\n1 2\n2 3\n")
    assert sorted(graph.nodes) == [0, 1, 2]
    assert sorted(graph.edges) == [(0, 1), (1, 2)]


def test_graph_keeps_isolated_vertices():
    graph = parse_graph("p 4\n1 2\n")
    assert graph.number_of_nodes() == 4
    assert graph.number_of_edges() == 1


@pytest.mark.parametrize("text", ["1 2\n", "p 2\n1 3\n", "p 2\n1 1\n", "p 2\n1\n", ""])
def test_graph_errors(text):
    with pytest.raises(ParseError):
        parse_graph(text)


def test_write_graph(cycle_graph):
    text = write_graph(cycle_graph)
    assert text == "p 5\n1 2\n1 5\n2 3\n3 4\n4 5\n"
    assert nx.is_isomorphic(parse_graph(text), cycle_graph)
