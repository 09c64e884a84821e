"""
Text formats read and written by the command line.

* matrix: one row per line, comma-separated integers, ``#`` comments.
* relations: one line per matrix row, tuples separated by ``;``, symbols
  by ``,``; ``*`` stands for every k-tuple.
* groups: one set per line, entries ``col`` or ``col:weight`` (1-based).
* graph: header ``p <vertices>``, then one ``u v`` edge per line (1-based).
"""

from __future__ import annotations

import logging
from itertools import product
from pathlib import Path
from typing import Iterator

import networkx as nx

from .exceptions import AlphabetError, ParseError, RelationArityError
from .models import CategoricalMatrix, RelationSet

logger = logging.getLogger(__name__)

COMMENT = "#"


def _content_lines(text: str, keep_blank: bool = False) -> Iterator[tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith(COMMENT):
            continue
        if not line and not keep_blank:
            continue
        yield number, line


def _integer(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{token!r} is not an integer", line)


def parse_matrix(
    text: str, alphabet_size: int | None = None, categorical: bool = False
) -> tuple[CategoricalMatrix, list[str] | None]:
    """Matrix and, for categorical input, the label of every symbol."""
    rows: list[list[int]] = []
    labels: dict[str, int] | None = {} if categorical else None
    width: int | None = None
    for number, line in _content_lines(text):
        tokens = [token.strip() for token in line.split(",")]
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise ParseError(f"row has {len(tokens)} cells, expected {width}", number)
        if labels is not None:
            row = [labels.setdefault(token, len(labels)) for token in tokens]
        else:
            row = [_integer(token, number) for token in tokens]
            for value in row:
                if value < 0:
                    raise ParseError(f"negative symbol {value}", number)
        if alphabet_size is not None:
            for value in row:
                if value >= alphabet_size:
                    raise AlphabetError(
                        f"symbol {value} is outside an alphabet of size {alphabet_size}", number
                    )
        rows.append(row)
    if not rows:
        raise ParseError("the matrix has no rows")
    size = alphabet_size
    if size is None:
        size = max(max(row) for row in rows) + 1
    logger.debug("read a %ix%i matrix over %i symbols", len(rows), width, size)
    return CategoricalMatrix(rows, size), (list(labels) if labels is not None else None)


def read_matrix(
    path: str | Path, alphabet_size: int | None = None, categorical: bool = False
) -> tuple[CategoricalMatrix, list[str] | None]:
    return parse_matrix(Path(path).read_text(encoding="utf-8"), alphabet_size, categorical)


def write_matrix(matrix: CategoricalMatrix) -> str:
    return "".join(",".join(str(v) for v in row) + "\n" for row in matrix.to_rows())


def parse_relations(text: str, k: int, alphabet_size: int, rows: int) -> RelationSet:
    everything = list(product(range(alphabet_size), repeat=k))
    relations: list[list[tuple[int, ...]]] = []
    lines = list(_content_lines(text, keep_blank=True))
    # trailing blank lines are only end-of-file padding
    while lines and not lines[-1][1]:
        lines.pop()
    for number, line in lines:
        if not line:
            raise ParseError("empty relation", number)
        if line == "*":
            relations.append(everything)
            continue
        tuples = []
        for chunk in line.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            symbols = tuple(_integer(token.strip(), number) for token in chunk.split(","))
            if len(symbols) != k:
                raise RelationArityError(
                    f"tuple {chunk!r} has arity {len(symbols)}, expected {k}", number
                )
            for value in symbols:
                if not 0 <= value < alphabet_size:
                    raise AlphabetError(
                        f"symbol {value} is outside an alphabet of size {alphabet_size}", number
                    )
            tuples.append(symbols)
        if not tuples:
            raise ParseError("empty relation", number)
        relations.append(tuples)
    if len(relations) != rows:
        raise ParseError(f"{len(relations)} relation lines for a matrix with {rows} rows")
    logger.debug("read %i relations of arity %i", rows, k)
    return RelationSet(k, relations)


def read_relations(path: str | Path, k: int, alphabet_size: int, rows: int) -> RelationSet:
    return parse_relations(Path(path).read_text(encoding="utf-8"), k, alphabet_size, rows)


def parse_groups(text: str) -> list[list[tuple[int, int]]]:
    groups = []
    for number, line in _content_lines(text):
        members = []
        for entry in line.replace(",", " ").split():
            column, _, weight = entry.partition(":")
            index = _integer(column, number)
            count = _integer(weight, number) if weight else 1
            if index < 1:
                raise ParseError(f"column {index} is not 1-based", number)
            if count < 1:
                raise ParseError(f"weight {count} must be positive", number)
            members.append((index - 1, count))
        if not members:
            raise ParseError("empty group", number)
        groups.append(members)
    if not groups:
        raise ParseError("no groups given")
    return groups


def read_groups(path: str | Path) -> list[list[tuple[int, int]]]:
    return parse_groups(Path(path).read_text(encoding="utf-8"))


def parse_graph(text: str) -> nx.Graph:
    graph: nx.Graph | None = None
    for number, line in _content_lines(text):
        tokens = line.split()
        if graph is None:
            if len(tokens) != 2 or tokens[0] != "p":
                raise ParseError("expected a 'p <vertices>' header", number)
            count = _integer(tokens[1], number)
            if count < 1:
                raise ParseError("a graph needs at least one vertex", number)
            graph = nx.Graph()
            graph.add_nodes_from(range(count))
            continue
        if len(tokens) != 2:
            raise ParseError(f"expected 'u v', got {line!r}", number)
        u, v = (_integer(token, number) for token in tokens)
        for vertex in (u, v):
            if not 1 <= vertex <= graph.number_of_nodes():
                raise ParseError(f"vertex {vertex} out of range 1..{graph.number_of_nodes()}", number)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", number)
        graph.add_edge(u - 1, v - 1)
    if graph is None:
        raise ParseError("missing 'p <vertices>' header")
    logger.debug("read a graph with %i vertices and %i edges", graph.number_of_nodes(), graph.number_of_edges())
    return graph


def read_graph(path: str | Path) -> nx.Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def write_graph(graph: nx.Graph) -> str:
    nodes = sorted(graph.nodes)
    index = {v: i + 1 for i, v in enumerate(nodes)}
    lines = [f"p {len(nodes)}"]
    lines.extend(f"{index[u]} {index[v]}" for u, v in sorted(tuple(sorted(e)) for e in graph.edges))
    return "\n".join(lines) + "\n"
