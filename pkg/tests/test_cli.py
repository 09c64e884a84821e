from __future__ import annotations

import json

import pytest

from catclust.cli import RunConfig, render, run
from catclust.cli.__main__ import cli_run

from .conftest import CYCLE_EDGES, CYCLE_VERTICES, TOY_COLUMNS

CYCLE_CSV = "\n".join(
    ",".join(str(int(v in edge)) for edge in CYCLE_EDGES) for v in CYCLE_VERTICES
) + "\n"
TOY_CSV = "\n".join(",".join(str(c[h]) for c in TOY_COLUMNS) for h in range(4)) + "\n"


def invoke(capsys, *argv: str) -> tuple[int, dict]:
    code = cli_run(list(argv))
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture
def cycle_file(tmp_path):
    path = tmp_path / "cycle.csv"
    path.write_text(CYCLE_CSV, encoding="utf-8")
    return str(path)


@pytest.fixture
def toy_file(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text(TOY_CSV, encoding="utf-8")
    return str(path)


def test_feature_select_on_cycle(capsys, cycle_file):
    code, report = invoke(capsys, "feature-select", cycle_file, "-k", "3", "-B", "0", "-l", "3", "--threads", "1")
    assert code == 0
    assert report["decision"] == "feasible"
    assert report["cost"] == 0
    assert report["schema"] == 1
    assert report["problem"] == "fs"
    removed = set(report["outliers"])
    assert len(removed) == 3
    kept = {CYCLE_VERTICES[i - 1] for i in range(1, 6) if i not in removed}
    assert not any(set(edge) == kept for edge in CYCLE_EDGES)
    assert len(report["clusters"]) == 3


def test_answer_does_not_depend_on_threads(capsys, cycle_file):
    reports = []
    for threads in ("1", "3"):
        code, report = invoke(
            capsys, "feature-select", cycle_file, "-k", "3", "-B", "0", "-l", "3", "--threads", threads
        )
        assert code == 0
        report.pop("elapsed_ms")
        reports.append(report)
    assert reports[0] == reports[1]


def test_column_outliers_on_toy(capsys, toy_file):
    code, report = invoke(capsys, "column-outliers", toy_file, "-k", "2", "-B", "2", "-l", "1")
    assert code == 0
    assert report["cost"] == 2
    assert report["outliers"] == [5]
    assert report["exhaustive"] is True
    assert sorted(report["clusters"]) == [[1, 2], [3, 4]]
    assert report["initial_cluster_types"] == ["i", "i", "i", "i", "iii"]


def test_infeasible_exit_code(capsys, toy_file):
    code, report = invoke(capsys, "column-outliers", toy_file, "-k", "2", "-B", "1", "-l", "1")
    assert code == 2
    assert report["decision"] == "infeasible"
    assert report["cost"] is None
    assert report["clusters"] == []


def test_verify_round_trip(capsys, tmp_path, toy_file):
    code, report = invoke(capsys, "column-outliers", toy_file, "-k", "2", "-B", "2", "-l", "1")
    assert code == 0
    saved = tmp_path / "report.json"
    saved.write_text(json.dumps(report), encoding="utf-8")
    code, verdict = invoke(capsys, "verify", toy_file, str(saved))
    assert code == 0
    assert verdict["decision"] == "verified"

    report["cost"] = 1
    saved.write_text(json.dumps(report), encoding="utf-8")
    code, verdict = invoke(capsys, "verify", toy_file, str(saved))
    assert code == 2
    assert verdict["decision"] == "rejected"
    assert verdict["reason"] == "cost-mismatch"


def test_verify_rejects_garbage_report(capsys, tmp_path, toy_file):
    saved = tmp_path / "report.json"
    saved.write_text("{not json", encoding="utf-8")
    code, report = invoke(capsys, "verify", toy_file, str(saved))
    assert code == 1
    assert report["error_type"] == "ParseError"


def test_empty_relation_line_is_an_error(capsys, tmp_path, toy_file):
    relations = tmp_path / "relations.txt"
    relations.write_text("*\n\n*\n*\n", encoding="utf-8")
    code, report = invoke(
        capsys, "constrained-cluster", toy_file, "-k", "2", "-B", "2", "-l", "1", "--relations", str(relations)
    )
    assert code == 1
    assert report["error_type"] == "ParseError"
    assert "line 2" in report["error"]


def test_constrained_cluster(capsys, tmp_path, toy_file):
    relations = tmp_path / "relations.txt"
    relations.write_text("0,1;0,0\n0,1\n0,0\n0,0;1,0\n", encoding="utf-8")
    code, report = invoke(
        capsys, "constrained-cluster", toy_file, "-k", "2", "-B", "2", "-l", "1", "--relations", str(relations)
    )
    assert code == 0
    assert report["cost"] == 2


def test_lowrank_and_verify(capsys, tmp_path):
    matrix = tmp_path / "rank.csv"
    matrix.write_text("1,1,1,1\n0,0,0,1\n1,1,1,1\n", encoding="utf-8")
    code, report = invoke(capsys, "lowrank", str(matrix), "-B", "1", "-l", "0", "--rank", "1")
    assert code == 0
    assert report["cost"] == 1
    assert report["semantics"] == "field"
    assert report["generators"] == [[1], [0], [1]]
    assert report["approximation"] == [[1, 1, 1, 1], [0, 0, 0, 0], [1, 1, 1, 1]]

    saved = tmp_path / "report.json"
    saved.write_text(json.dumps(report), encoding="utf-8")
    code, verdict = invoke(capsys, "verify", str(matrix), str(saved))
    assert code == 0
    assert verdict["decision"] == "verified"


def test_restricted(capsys, tmp_path, toy_file):
    groups = tmp_path / "groups.txt"
    groups.write_text("1:3\n3\n", encoding="utf-8")
    code, report = invoke(capsys, "restricted", toy_file, "-B", "2", "--groups", str(groups))
    assert code == 0
    assert report["cost"] == 2
    assert report["chosen"] == [1, 3]
    assert report["centers"] == [[0, 0, 0, 0]]


def test_generate_then_solve(capsys, tmp_path):
    matrix = tmp_path / "planted.csv"
    code, report = invoke(
        capsys,
        "gen-planted",
        "--rows", "4",
        "--cols", "6",
        "-k", "2",
        "--alphabet", "2",
        "--noise", "1",
        "--outlier-count", "1",
        "--seed", "5",
        "-o", str(matrix),
    )
    assert code == 0
    assert report["decision"] == "generated"
    assert report["matrix_file"] == str(matrix)
    assert (report["k"], report["budget"], report["outlier_cap"]) == (2, 1, 1)

    code, solved = invoke(capsys, "column-outliers", str(matrix), "-k", "2", "-B", "1", "-l", "1")
    assert code == 0
    assert solved["cost"] <= 1


@pytest.mark.parametrize("seed", range(3))
def test_oracle_agrees_with_hypergraph_mode(capsys, tmp_path, seed):
    matrix = tmp_path / "planted.csv"
    code, _ = invoke(
        capsys,
        "gen-planted",
        "--target", "feature-selection",
        "--rows", "4",
        "--cols", "4",
        "-k", "2",
        "--alphabet", "2",
        "--noise", "1",
        "--outlier-count", "1",
        "--seed", str(seed),
        "-o", str(matrix),
    )
    assert code == 0
    flags = ["-k", "2", "-B", "1", "-l", "1", "--alphabet", "2"]
    code, best = invoke(capsys, "oracle", str(matrix), "--problem", "fs", *flags)
    assert code == 0
    code, found = invoke(capsys, "feature-select", str(matrix), "--mode", "hypergraph", *flags)
    assert code == 0
    assert found["cost"] == best["cost"]


def test_gadget_generation(capsys, tmp_path):
    graph = tmp_path / "cycle.graph"
    graph.write_text("p 5\n1 2\n2 3\n3 4\n4 5\n1 5\n", encoding="utf-8")
    code, report = invoke(capsys, "gen-gadget-is", str(graph), "-t", "2", "--no-augment")
    assert code == 0
    assert report["gadget"] == "independent-set"
    assert (report["k"], report["budget"], report["outlier_cap"]) == (3, 0, 3)
    assert (report["vertices"], report["edges"]) == (5, 5)
    assert len(report["matrix"]) == 5

    code, report = invoke(capsys, "gen-gadget-pvc", str(graph), "-t", "1", "-q", "2")
    assert code == 0
    assert report["gadget"] == "partial-vertex-cover"
    assert report["outlier_cap"] == 3


def test_usage_errors(capsys, toy_file):
    code, report = invoke(capsys, "feature-select")
    assert code == 1
    assert report["error_type"] == "ConfigError"

    code, report = invoke(capsys, "feature-select", toy_file, "-k", "2")
    assert code == 1
    assert report["error_type"] == "ConfigError"


def test_missing_input_file(capsys, tmp_path):
    code, report = invoke(
        capsys, "column-outliers", str(tmp_path / "absent.csv"), "-k", "1", "-B", "0", "-l", "0"
    )
    assert code == 1
    assert report["error_type"] == "FileNotFoundError"


def test_work_ceiling_from_environment(capsys, monkeypatch, toy_file):
    monkeypatch.setenv("CATCLUST_WORK_CEILING", "10")
    code, report = invoke(capsys, "column-outliers", toy_file, "-k", "2", "-B", "2", "-l", "1")
    assert code == 1
    assert report["error_type"] == "WorkCeilingExceeded"


def test_tsv_output(capsys, toy_file):
    code = cli_run(["column-outliers", toy_file, "-k", "2", "-B", "2", "-l", "1", "--format", "tsv"])
    assert code == 0
    lines = dict(line.split("\t", 1) for line in capsys.readouterr().out.splitlines())
    assert lines["decision"] == "feasible"
    assert lines["cost"] == "2"
    assert lines["outliers"] == "[5]"


def test_run_without_argparse(toy_file):
    config = RunConfig("column-outliers", input=toy_file, k=2, budget=2, outlier_cap=1)
    code, report = run(config)
    assert code == 0
    assert report["command"] == "column-outliers"
    assert json.loads(render(report)) == report
    assert "cost\t2" in render(report, "tsv").splitlines()


TOY_RELATIONS = "0,1;0,0\n0,1\n0,0\n0,0;1,0\n"
TOY_GROUPS = "1:3\n3\n"
RANK_CSV = "1,1,1,1\n0,0,0,1\n1,1,1,1\n"

TOY_SOLVE = ("-k", "2", "-B", "2", "-l", "1")
RANK_SOLVE = ("-B", "1", "-l", "0", "--rank", "1")

ROUND_TRIPS = [
    ("feature-select", "toy", TOY_SOLVE),
    ("feature-select", "toy", TOY_SOLVE + ("--mode", "hypergraph")),
    ("feature-select", "toy", TOY_SOLVE + ("--mode", "oracle")),
    ("feature-select", "toy", TOY_SOLVE + ("--sweep",)),
    ("constrained-cluster", "toy", TOY_SOLVE + ("--relations", "{relations}")),
    ("constrained-cluster", "toy", TOY_SOLVE + ("--relations", "{relations}", "--mode", "hypergraph")),
    ("constrained-cluster", "toy", TOY_SOLVE + ("--relations", "{relations}", "--mode", "oracle")),
    ("column-outliers", "toy", TOY_SOLVE),
    ("column-outliers", "toy", TOY_SOLVE + ("--mode", "hypergraph")),
    ("column-outliers", "toy", TOY_SOLVE + ("--mode", "oracle")),
    ("column-outliers", "toy", TOY_SOLVE + ("--color-coding",)),
    ("lowrank", "rank", RANK_SOLVE),
    ("lowrank", "rank", RANK_SOLVE + ("--mode", "hypergraph")),
    ("lowrank", "rank", RANK_SOLVE + ("--mode", "oracle")),
    ("lowrank", "rank", RANK_SOLVE + ("--semantics", "bool")),
    ("lowrank", "rank", RANK_SOLVE + ("--semantics", "bool", "--mode", "oracle")),
    ("lowrank", "rank", RANK_SOLVE + ("--prime", "3")),
    ("lowrank", "rank", RANK_SOLVE + ("--prime", "3", "--mode", "oracle")),
    ("restricted", "toy", ("-B", "2", "--groups", "{groups}")),
    ("restricted", "toy", ("-B", "2", "--groups", "{groups}", "--mode", "hypergraph")),
    ("restricted", "toy", ("-B", "2", "--groups", "{groups}", "--mode", "oracle")),
    ("oracle", "toy", TOY_SOLVE + ("--problem", "fs")),
    ("oracle", "toy", TOY_SOLVE + ("--problem", "kcco")),
    ("oracle", "toy", TOY_SOLVE + ("--problem", "cc", "--relations", "{relations}")),
    ("oracle", "toy", ("-B", "2", "--problem", "restricted", "--groups", "{groups}")),
]


@pytest.fixture
def side_files(tmp_path, toy_file) -> dict[str, str]:
    files = {"toy": toy_file}
    for name, text in (("relations", TOY_RELATIONS), ("groups", TOY_GROUPS), ("rank", RANK_CSV)):
        path = tmp_path / f"{name}.txt"
        path.write_text(text, encoding="utf-8")
        files[name] = str(path)
    return files


@pytest.mark.parametrize("command, matrix, flags", ROUND_TRIPS)
def test_every_feasible_report_verifies(capsys, tmp_path, side_files, command, matrix, flags):
    flags = [flag.format(**side_files) for flag in flags]
    code, report = invoke(capsys, command, side_files[matrix], *flags)
    assert code == 0, report
    saved = tmp_path / "report.json"
    saved.write_text(json.dumps(report), encoding="utf-8")

    extra = []
    if report["problem"] == "cc":
        extra = ["--relations", side_files["relations"]]
    elif report["problem"] == "restricted":
        extra = ["--groups", side_files["groups"]]
    code, verdict = invoke(capsys, "verify", side_files[matrix], str(saved), *extra)
    assert code == 0, verdict
    assert verdict["decision"] == "verified"
    assert verdict["cost"] == report["cost"]


def test_lowrank_oracle_reports_factors(capsys, side_files):
    code, found = invoke(capsys, "lowrank", side_files["rank"], *RANK_SOLVE)
    assert code == 0
    code, best = invoke(capsys, "lowrank", side_files["rank"], *RANK_SOLVE, "--mode", "oracle")
    assert code == 0
    assert best["cost"] == found["cost"] == 1
    assert best["approximation"] == [[1, 1, 1, 1], [0, 0, 0, 0], [1, 1, 1, 1]]
    assert best["clusters"] == [[], [1, 2, 3, 4]]


@pytest.mark.parametrize(
    "chosen, reason",
    [
        ([1], "bad-selection"),
        ([2, 3], "bad-selection"),
        ([1, 3], "cost-mismatch"),
    ],
)
def test_verify_rejects_tampered_restricted_report(capsys, tmp_path, side_files, chosen, reason):
    code, report = invoke(capsys, "restricted", side_files["toy"], "-B", "2", "--groups", side_files["groups"])
    assert code == 0
    report["chosen"] = chosen
    if reason == "cost-mismatch":
        report["cost"] += 1
    saved = tmp_path / "report.json"
    saved.write_text(json.dumps(report), encoding="utf-8")
    code, verdict = invoke(capsys, "verify", side_files["toy"], str(saved), "--groups", side_files["groups"])
    assert code == 2
    assert verdict["reason"] == reason


@pytest.mark.parametrize(
    "argv",
    [
        ("feature-select", "{cycle}", "-k", "3", "-B", "0", "-l", "3"),
        ("column-outliers", "{toy}", "-k", "2", "-B", "2", "-l", "1"),
        ("constrained-cluster", "{toy}", "-k", "2", "-B", "2", "-l", "1", "--relations", "{relations}"),
    ],
)
def test_reports_are_identical_across_threads_and_runs(capsys, cycle_file, side_files, argv):
    argv = [arg.format(cycle=cycle_file, **side_files) for arg in argv]
    rendered = set()
    for threads in ("1", "2", "8"):
        for _ in range(3):
            code, report = invoke(capsys, *argv, "--threads", threads)
            assert code == 0
            report.pop("elapsed_ms")
            rendered.add(render(report))
    assert len(rendered) == 1
