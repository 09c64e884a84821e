from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass, fields
from json import JSONDecodeError, dumps, loads
from pathlib import Path
from typing import Any, Callable

from catclust.column_outliers import (
    ColumnOutliersInstance,
    RestrictedInstance,
    RestrictedResult,
    classify_initial_clusters,
    solve_column_outliers,
    verify_restricted,
)
from catclust.config import SolverSettings, settings_from_env
from catclust.constant import (
    EXIT_ERROR,
    EXIT_FEASIBLE,
    EXIT_INFEASIBLE,
    MODE_DIRECT,
    MODE_HYPERGRAPH,
    MODE_ORACLE,
    PROBLEM_COLUMN_OUTLIERS,
    PROBLEM_CONSTRAINED,
    PROBLEM_FEATURE_SELECTION,
    PROBLEM_RESTRICTED,
    PROBLEMS,
    SCHEMA_VERSION,
    SEMANTICS_BOOLEAN,
    SEMANTICS_FIELD,
)
from catclust.constrained import solve_constrained
from catclust.exceptions import CatclustError, ConfigError, ParseError
from catclust.feature_selection import (
    smallest_feasible_cap,
    solve_feature_selection,
    sweep_outlier_caps,
)
from catclust.geometry import verify_clustering, verify_constrained, verify_feature_selection
from catclust.lab import (
    TARGET_COLUMN_OUTLIERS,
    TARGET_FEATURE_SELECTION,
    GraphGadget,
    PlantedSpec,
    build_independent_set_gadget,
    build_partial_vertex_cover_gadget,
    generate_planted,
    lowrank_oracle,
    oracle_column_outliers,
    oracle_constrained,
    oracle_feature_selection,
    oracle_restricted,
)
from catclust.lowrank import LowRankInstance, build_lowrank_relations, reconstruct_factors, solve_lowrank
from catclust.models import (
    CategoricalMatrix,
    ClusteringSolution,
    ConstrainedInstance,
    FeatureSelectionInstance,
    FeatureSelectionSolution,
)
from catclust.parsers import read_graph, read_groups, read_matrix, read_relations, write_matrix
from catclust.utils import set_logging_handler
from catclust.version import __version__

logger = logging.getLogger("catclust")

DECISION_FEASIBLE = "feasible"
DECISION_INFEASIBLE = "infeasible"
DECISION_GENERATED = "generated"
DECISION_VERIFIED = "verified"
DECISION_REJECTED = "rejected"

_EXIT_CODES = {
    DECISION_FEASIBLE: EXIT_FEASIBLE,
    DECISION_GENERATED: EXIT_FEASIBLE,
    DECISION_VERIFIED: EXIT_FEASIBLE,
    DECISION_INFEASIBLE: EXIT_INFEASIBLE,
    DECISION_REJECTED: EXIT_INFEASIBLE,
}

_SEMANTICS = {"gf": SEMANTICS_FIELD, "bool": SEMANTICS_BOOLEAN}


@dataclass
class RunConfig:
    """Everything one invocation needs, independent of argparse."""

    command: str
    input: str | None = None
    k: int | None = None
    budget: int | None = None
    outlier_cap: int | None = None
    alphabet_size: int | None = None
    categorical: bool = False
    mode: str = MODE_DIRECT
    trials: int | None = None
    exhaustive: bool = True
    seed: int = 0
    work_ceiling: int | None = None
    pattern_edges: int | None = None
    threads: int = 1
    output_format: str = "json"
    relations: str | None = None
    groups: str | None = None
    rank: int = 1
    semantics: str = "gf"
    prime: int = 2
    sweep: bool = False
    problem: str | None = None
    report: str | None = None
    rows: int | None = None
    cols: int | None = None
    noise: int = 0
    outlier_count: int = 0
    target: str = TARGET_COLUMN_OUTLIERS
    t: int | None = None
    q: int | None = None
    augment: bool = True
    output: str | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in vars(args).items() if key in known})


def build_report(command: str, decision: str, config: RunConfig, elapsed_ms: int, **extra: Any) -> dict:
    report = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "decision": decision,
        "cost": None,
        "outliers": [],
        "clusters": [],
        "centers": [],
        "elapsed_ms": elapsed_ms,
        "mode": config.mode,
        "seed": config.seed,
    }
    report.update(extra)
    return report


def error_report(error: BaseException) -> dict:
    return {"schema": SCHEMA_VERSION, "error": str(error), "error_type": type(error).__name__}


def _one_based(indices: Any) -> list[int]:
    return sorted(int(i) + 1 for i in indices)


def clustering_fields(solution: ClusteringSolution) -> dict:
    return {
        "cost": solution.cost,
        "outliers": _one_based(solution.outliers),
        "clusters": [_one_based(cluster) for cluster in solution.clusters],
        "centers": [list(center) for center in solution.centers],
    }


def feature_selection_fields(solution: FeatureSelectionSolution) -> dict:
    return {
        "cost": solution.cost,
        "outliers": _one_based(solution.removed_features),
        "clusters": [_one_based(cluster) for cluster in solution.point_clusters],
        "centers": [list(center) for center in solution.centers],
    }


def _require(config: RunConfig, *names: str) -> None:
    missing = [name for name in names if getattr(config, name) is None]
    if missing:
        raise ConfigError(f"{config.command} needs {', '.join(missing)}")


def _load_matrix(config: RunConfig, alphabet_size: int | None = None) -> tuple[CategoricalMatrix, dict]:
    _require(config, "input")
    matrix, labels = read_matrix(config.input, alphabet_size or config.alphabet_size, config.categorical)
    return matrix, ({"labels": labels} if labels is not None else {})


def _parameters(problem: str, k: int, budget: int, outlier_cap: int) -> dict:
    return {"problem": problem, "k": k, "budget": budget, "outlier_cap": outlier_cap}


def _feature_select(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    _require(config, "k", "budget", "outlier_cap")
    matrix, extra = _load_matrix(config)
    instance = FeatureSelectionInstance(matrix, config.k, config.budget, config.outlier_cap)
    extra.update(_parameters(PROBLEM_FEATURE_SELECTION, config.k, config.budget, config.outlier_cap))
    if config.mode == MODE_ORACLE:
        if config.sweep:
            raise ConfigError("--sweep runs the solver, pick --mode direct or hypergraph")
        found = oracle_feature_selection(instance, settings)
        solution = found.witness if found is not None else None
    elif config.sweep:
        points = sweep_outlier_caps(instance, config.mode, settings)
        extra["sweep"] = [
            {
                "outlier_cap": point.outlier_cap,
                "decision": DECISION_FEASIBLE if point.feasible else DECISION_INFEASIBLE,
                "cost": point.solution.cost if point.feasible else None,
            }
            for point in points
        ]
        extra["smallest_feasible_cap"] = smallest_feasible_cap(points)
        solution = points[-1].solution
    else:
        solution = solve_feature_selection(instance, config.mode, settings)
    if solution is None:
        return DECISION_INFEASIBLE, extra
    extra.update(feature_selection_fields(solution))
    return DECISION_FEASIBLE, extra


def _constrained_instance(config: RunConfig) -> tuple[ConstrainedInstance, dict]:
    _require(config, "k", "budget", "outlier_cap", "relations")
    matrix, extra = _load_matrix(config)
    relations = read_relations(config.relations, config.k, matrix.alphabet.size, matrix.rows)
    instance = ConstrainedInstance(matrix, config.k, config.budget, config.outlier_cap, relations)
    extra.update(_parameters(PROBLEM_CONSTRAINED, config.k, config.budget, config.outlier_cap))
    return instance, extra


def _constrained_cluster(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    instance, extra = _constrained_instance(config)
    if config.mode == MODE_ORACLE:
        found = oracle_constrained(instance, settings)
        solution = found.witness if found is not None else None
    else:
        solution = solve_constrained(instance, config.mode, settings)
    if solution is None:
        return DECISION_INFEASIBLE, extra
    extra.update(clustering_fields(solution))
    return DECISION_FEASIBLE, extra


def _column_outliers(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    _require(config, "k", "budget", "outlier_cap")
    matrix, extra = _load_matrix(config)
    instance = ColumnOutliersInstance(matrix, config.k, config.budget, config.outlier_cap)
    extra.update(_parameters(PROBLEM_COLUMN_OUTLIERS, config.k, config.budget, config.outlier_cap))
    if config.mode == MODE_ORACLE:
        found = oracle_column_outliers(instance, settings)
        solution = found.witness if found is not None else None
    else:
        exhaustive = config.exhaustive and config.trials is None
        extra["exhaustive"] = exhaustive
        solution = solve_column_outliers(
            instance, exhaustive, config.trials, config.seed, config.mode, settings
        )
    if solution is None:
        return DECISION_INFEASIBLE, extra
    extra.update(clustering_fields(solution))
    extra["initial_cluster_types"] = classify_initial_clusters(matrix, solution)
    return DECISION_FEASIBLE, extra


def _lowrank_instance(config: RunConfig, rank: int, semantics: str, prime: int) -> LowRankInstance:
    semantics = _SEMANTICS.get(semantics, semantics)
    if semantics == SEMANTICS_BOOLEAN:
        prime = 2
    matrix, _ = read_matrix(config.input, prime)
    return LowRankInstance(matrix, rank, config.budget, config.outlier_cap, semantics, prime)


def _lowrank(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    _require(config, "input", "budget", "outlier_cap")
    instance = _lowrank_instance(config, config.rank, config.semantics, config.prime)
    extra = _parameters("lowrank", instance.prime**instance.rank, config.budget, config.outlier_cap)
    extra.update(rank=instance.rank, semantics=instance.semantics, prime=instance.prime)
    if config.mode == MODE_ORACLE:
        found = lowrank_oracle(instance, settings)
        factors = reconstruct_factors(instance, found.witness) if found is not None else None
    else:
        factors = solve_lowrank(instance, config.mode, settings)
    if factors is None:
        return DECISION_INFEASIBLE, extra
    extra.update(clustering_fields(factors.solution))
    extra.update(
        approximation=factors.approximation.tolist(),
        outlier_part=factors.outlier_part.tolist(),
        generators=factors.generators.tolist(),
        coefficients=factors.coefficients.tolist(),
    )
    return DECISION_FEASIBLE, extra


def _restricted_instance(config: RunConfig) -> tuple[RestrictedInstance, dict]:
    _require(config, "budget", "groups")
    matrix, extra = _load_matrix(config)
    instance = RestrictedInstance.from_groups(matrix, read_groups(config.groups), config.budget)
    extra.update(problem=PROBLEM_RESTRICTED, budget=config.budget)
    return instance, extra


def _restricted(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    instance, extra = _restricted_instance(config)
    result: RestrictedResult | None
    if config.mode == MODE_ORACLE:
        found = oracle_restricted(instance, settings)
        result = found.witness if found is not None else None
    else:
        result = instance.solve(config.mode, settings.pattern_edge_limit)
    if result is None:
        return DECISION_INFEASIBLE, extra
    chosen = [instance.sets[s][pick].label for s, pick in enumerate(result.chosen)]
    extra.update(
        cost=result.cost,
        clusters=[_one_based(set(chosen))],
        centers=[list(result.center)],
        chosen=[j + 1 for j in chosen],
    )
    return DECISION_FEASIBLE, extra


def _emit_matrix(config: RunConfig, matrix: CategoricalMatrix, extra: dict) -> None:
    text = write_matrix(matrix)
    if config.output is None:
        extra["matrix"] = matrix.to_rows()
        return
    Path(config.output).write_text(text, encoding="utf-8")
    extra["matrix_file"] = config.output
    logger.info("wrote a %ix%i matrix to %s", matrix.rows, matrix.cols, config.output)


def _gen_planted(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    _require(config, "rows", "cols", "k", "alphabet_size")
    spec = PlantedSpec(
        rows=config.rows,
        cols=config.cols,
        k=config.k,
        alphabet_size=config.alphabet_size,
        noise_edits=config.noise,
        outlier_count=config.outlier_count,
        seed=config.seed,
        target=config.target,
    )
    planted = generate_planted(spec)
    instance = planted.instance
    problem = (
        PROBLEM_COLUMN_OUTLIERS if config.target == TARGET_COLUMN_OUTLIERS else PROBLEM_FEATURE_SELECTION
    )
    extra = _parameters(problem, instance.k, instance.budget, instance.outlier_cap)
    if isinstance(planted.planted, FeatureSelectionSolution):
        extra.update(feature_selection_fields(planted.planted))
    else:
        extra.update(clustering_fields(planted.planted))
    _emit_matrix(config, instance.matrix, extra)
    return DECISION_GENERATED, extra


def _gadget_fields(config: RunConfig, gadget: GraphGadget) -> dict:
    instance = gadget.instance
    extra = _parameters(PROBLEM_FEATURE_SELECTION, instance.k, instance.budget, instance.outlier_cap)
    extra.update(
        gadget=gadget.kind,
        vertices=gadget.encoded.number_of_nodes(),
        edges=gadget.encoded.number_of_edges(),
    )
    _emit_matrix(config, instance.matrix, extra)
    return extra


def _gen_gadget_is(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    _require(config, "input", "t")
    gadget = build_independent_set_gadget(read_graph(config.input), config.t, config.augment)
    return DECISION_GENERATED, _gadget_fields(config, gadget)


def _gen_gadget_pvc(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    _require(config, "input", "t", "q")
    gadget = build_partial_vertex_cover_gadget(read_graph(config.input), config.t, config.q)
    return DECISION_GENERATED, _gadget_fields(config, gadget)


def _oracle(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    _require(config, "problem")
    config.mode = MODE_ORACLE
    return _SOLVERS[config.problem](config, settings)


def _solution_from_report(report: dict) -> tuple[frozenset[int], list[frozenset[int]], list[tuple[int, ...]], int]:
    if report.get("cost") is None:
        raise ConfigError("the report carries no solution to verify")
    try:
        outliers = frozenset(int(i) - 1 for i in report["outliers"])
        clusters = [frozenset(int(j) - 1 for j in cluster) for cluster in report["clusters"]]
        centers = [tuple(int(v) for v in center) for center in report["centers"]]
        return outliers, clusters, centers, int(report["cost"])
    except (KeyError, TypeError, ValueError) as error:
        raise ParseError(f"malformed report: {error}")


def _verify(config: RunConfig, settings: SolverSettings) -> tuple[str, dict]:
    _require(config, "input", "report")
    try:
        report = loads(Path(config.report).read_text(encoding="utf-8"))
    except JSONDecodeError as error:
        raise ParseError(f"report is not JSON: {error.msg}", error.lineno)
    if not isinstance(report, dict):
        raise ParseError("report must be a JSON object")
    problem = config.problem or report.get("problem")
    for name in ("k", "budget", "outlier_cap"):
        if getattr(config, name) is None and name in report:
            setattr(config, name, report[name])
    outliers, clusters, centers, cost = _solution_from_report(report)

    if problem == PROBLEM_FEATURE_SELECTION:
        _require(config, "k", "budget", "outlier_cap")
        matrix, _ = _load_matrix(config)
        instance = FeatureSelectionInstance(matrix, config.k, config.budget, config.outlier_cap)
        verdict = verify_feature_selection(
            instance, FeatureSelectionSolution(outliers, tuple(clusters), tuple(centers), cost)
        )
    elif problem == PROBLEM_COLUMN_OUTLIERS:
        _require(config, "k", "budget", "outlier_cap")
        matrix, _ = _load_matrix(config)
        solution = ClusteringSolution.build(outliers, clusters, centers, cost)
        verdict = verify_clustering(matrix, config.k, config.budget, config.outlier_cap, solution)
    elif problem == PROBLEM_CONSTRAINED:
        instance, _ = _constrained_instance(config)
        verdict = verify_constrained(instance, ClusteringSolution.build(outliers, clusters, centers, cost))
    elif problem == "lowrank":
        _require(config, "input", "budget", "outlier_cap")
        lowrank = _lowrank_instance(
            config,
            int(report.get("rank", config.rank)),
            report.get("semantics", config.semantics),
            int(report.get("prime", config.prime)),
        )
        reduced = build_lowrank_relations(lowrank, settings)
        verdict = verify_constrained(reduced, ClusteringSolution.build(outliers, clusters, centers, cost))
    elif problem == PROBLEM_RESTRICTED:
        instance, _ = _restricted_instance(config)
        try:
            chosen = [int(j) - 1 for j in report["chosen"]]
        except (KeyError, TypeError, ValueError) as error:
            raise ParseError(f"malformed report: {error}")
        if len(centers) != 1:
            raise ParseError(f"restricted report carries {len(centers)} centers, expected one")
        verdict = verify_restricted(instance, chosen, centers[0], cost)
    else:
        raise ConfigError(f"cannot verify problem {problem!r}")

    extra = {"problem": problem, "cost": cost, "reason": verdict.reason, "detail": verdict.detail}
    logger.debug("verification of %s: %s", problem, verdict)
    return (DECISION_VERIFIED if verdict else DECISION_REJECTED), extra


_SOLVERS: dict[str, Callable[[RunConfig, SolverSettings], tuple[str, dict]]] = {
    PROBLEM_FEATURE_SELECTION: _feature_select,
    PROBLEM_CONSTRAINED: _constrained_cluster,
    PROBLEM_COLUMN_OUTLIERS: _column_outliers,
    PROBLEM_RESTRICTED: _restricted,
}

COMMANDS: dict[str, Callable[[RunConfig, SolverSettings], tuple[str, dict]]] = {
    "feature-select": _feature_select,
    "constrained-cluster": _constrained_cluster,
    "column-outliers": _column_outliers,
    "lowrank": _lowrank,
    "restricted": _restricted,
    "gen-planted": _gen_planted,
    "gen-gadget-is": _gen_gadget_is,
    "gen-gadget-pvc": _gen_gadget_pvc,
    "oracle": _oracle,
    "verify": _verify,
}


def run(config: RunConfig) -> tuple[int, dict]:
    """Execute one command; returns the exit code and the report."""
    if config.command not in COMMANDS:
        raise ConfigError(f"unknown command {config.command!r}")
    settings = settings_from_env(
        work_ceiling=config.work_ceiling,
        threads=config.threads,
        pattern_edge_limit=config.pattern_edges,
    )
    started = time.perf_counter()
    decision, extra = COMMANDS[config.command](config, settings)
    elapsed_ms = int(round((time.perf_counter() - started) * 1000))
    report = build_report(config.command, decision, config, elapsed_ms, **extra)
    return _EXIT_CODES[decision], report


def render(report: dict, output_format: str = "json") -> str:
    if output_format == "tsv":
        lines = []
        for key in sorted(report):
            value = report[key]
            if value is None:
                text = ""
            elif isinstance(value, (list, dict)):
                text = dumps(value, separators=(",", ":"), sort_keys=True)
            else:
                text = str(value)
            lines.append(f"{key}\t{text}")
        return "\n".join(lines)
    return dumps(report, ensure_ascii=True, indent=4, sort_keys=True)


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors become ConfigError so they exit with the error code, not 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        dest="threads",
        help="Worker threads for the guess loops. Results do not depend on it.",
    )
    common.add_argument(
        "--work-ceiling",
        type=int,
        default=None,
        dest="work_ceiling",
        help="Refuse to start when the estimated work exceeds this. "
        "Defaults to $CATCLUST_WORK_CEILING, then 10^8.",
    )
    common.add_argument(
        "--pattern-edges",
        type=int,
        default=None,
        dest="pattern_edges",
        help="Largest pattern hypergraph tried in hypergraph mode.",
    )
    common.add_argument(
        "--format",
        choices=("json", "tsv"),
        default="json",
        dest="output_format",
        help="Report format written to STDOUT.",
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=False,
        dest="verbose",
        help="Log the search to STDERR.",
    )
    common.add_argument("--seed", type=int, default=0, dest="seed", help="Random seed.")

    matrix_input = _ArgumentParser(add_help=False)
    matrix_input.add_argument("input", help="Matrix file, one comma-separated row per line.")
    matrix_input.add_argument(
        "--alphabet",
        type=int,
        default=None,
        dest="alphabet_size",
        help="Alphabet size. Defaults to the largest symbol plus one.",
    )
    matrix_input.add_argument(
        "--categorical",
        action="store_true",
        default=False,
        dest="categorical",
        help="Cells are arbitrary labels, encoded in order of first appearance.",
    )

    solver = _ArgumentParser(add_help=False)
    solver.add_argument("-k", "--clusters", type=int, default=None, dest="k", help="Number of clusters.")
    solver.add_argument("-B", "--budget", type=int, default=None, dest="budget", help="Cost bound.")
    solver.add_argument(
        "-l", "--outliers", type=int, default=None, dest="outlier_cap", help="Largest number of outliers."
    )
    solver.add_argument(
        "--mode",
        choices=(MODE_DIRECT, MODE_HYPERGRAPH, MODE_ORACLE),
        default=MODE_DIRECT,
        dest="mode",
        help="Center search: direct enumeration, hypergraph patterns, or the exhaustive oracle.",
    )

    parser = _ArgumentParser(
        prog="catclust",
        description="Clustering of categorical data with outliers.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version="catclust {}".format(__version__),
        help="Show version information and exit.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    shared = [common, matrix_input, solver]
    fs = commands.add_parser("feature-select", parents=shared, help="Remove rows, then cluster the columns.")
    fs.add_argument(
        "--sweep",
        action="store_true",
        default=False,
        dest="sweep",
        help="Solve for every outlier cap from 0 to -l.",
    )

    cc = commands.add_parser("constrained-cluster", parents=shared, help="Cluster columns under row relations.")
    cc.add_argument("--relations", required=True, dest="relations", help="Relation file, one line per row.")

    co = commands.add_parser("column-outliers", parents=shared, help="k-clustering with column outliers.")
    co.add_argument(
        "--trials",
        type=int,
        default=None,
        dest="trials",
        help="Use color coding with this many random colorings.",
    )
    co.add_argument(
        "--color-coding",
        action="store_false",
        default=True,
        dest="exhaustive",
        help="Use color coding with the default number of colorings.",
    )

    lr = commands.add_parser("lowrank", parents=shared, help="Robust low-rank approximation.")
    lr.add_argument("--rank", type=int, default=1, dest="rank", help="Target rank r.")
    lr.add_argument("--semantics", choices=tuple(_SEMANTICS), default="gf", dest="semantics")
    lr.add_argument("--prime", type=int, default=2, dest="prime", help="Field size p for --semantics gf.")

    rc = commands.add_parser("restricted", parents=shared, help="One center shared by sets of columns.")
    rc.add_argument("--groups", required=True, dest="groups", help="Group file, one set per line.")

    gp = commands.add_parser("gen-planted", parents=[common], help="Generate a planted instance.")
    gp.add_argument("--rows", type=int, required=True, dest="rows")
    gp.add_argument("--cols", type=int, required=True, dest="cols")
    gp.add_argument("-k", "--clusters", type=int, required=True, dest="k")
    gp.add_argument("--alphabet", type=int, required=True, dest="alphabet_size")
    gp.add_argument("--noise", type=int, default=0, dest="noise", help="Cell edits, the planted cost.")
    gp.add_argument("--outlier-count", type=int, default=0, dest="outlier_count")
    gp.add_argument(
        "--target",
        choices=(TARGET_COLUMN_OUTLIERS, TARGET_FEATURE_SELECTION),
        default=TARGET_COLUMN_OUTLIERS,
        dest="target",
    )
    gp.add_argument("-o", "--output", default=None, dest="output", help="Write the matrix here.")

    gi = commands.add_parser("gen-gadget-is", parents=[common], help="Independent set as feature selection.")
    gi.add_argument("input", help="Graph file.")
    gi.add_argument("-t", type=int, required=True, dest="t")
    gi.add_argument(
        "--no-augment",
        action="store_false",
        default=True,
        dest="augment",
        help="Encode the graph itself, without the added clique.",
    )
    gi.add_argument("-o", "--output", default=None, dest="output")

    gv = commands.add_parser("gen-gadget-pvc", parents=[common], help="Partial vertex cover as feature selection.")
    gv.add_argument("input", help="Graph file.")
    gv.add_argument("-t", type=int, required=True, dest="t")
    gv.add_argument("-q", type=int, required=True, dest="q")
    gv.add_argument("-o", "--output", default=None, dest="output")

    oc = commands.add_parser("oracle", parents=shared, help="Exhaustive optimum of a small instance.")
    oc.add_argument("--problem", choices=PROBLEMS, required=True, dest="problem")
    oc.add_argument("--relations", default=None, dest="relations")
    oc.add_argument("--groups", default=None, dest="groups")

    vf = commands.add_parser("verify", parents=shared, help="Check a report against its instance.")
    vf.add_argument("report", help="JSON report written by a solver command.")
    vf.add_argument("--problem", choices=PROBLEMS + ("lowrank",), default=None, dest="problem")
    vf.add_argument("--relations", default=None, dest="relations")
    vf.add_argument("--groups", default=None, dest="groups")
    vf.add_argument("--rank", type=int, default=1, dest="rank")
    vf.add_argument("--semantics", choices=tuple(_SEMANTICS), default="gf", dest="semantics")
    vf.add_argument("--prime", type=int, default=2, dest="prime")
    return parser


def cli_run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run one subcommand and print its report to STDOUT.

    Returns the process exit code: 0 when a solution, instance or verdict was
    produced, 2 when the instance is infeasible or the report was rejected,
    and 1 for usage, input and resource errors.
    """
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as error:
        print(render(error_report(error)))
        return EXIT_ERROR

    if args.verbose:
        set_logging_handler(level=logging.DEBUG)

    config = RunConfig.from_args(args)
    try:
        code, report = run(config)
    except (CatclustError, OSError) as error:
        logger.error("%s failed: %s", config.command, error)
        code, report = EXIT_ERROR, error_report(error)
    print(render(report, config.output_format))
    return code


if __name__ == "__main__":
    sys.exit(cli_run())
