"""
catclust
~~~~~~~~
Clustering of categorical data with outliers, exact in the cost bound.

Basic usage:
   >>> from catclust import CategoricalMatrix, FeatureSelectionInstance, solve_feature_selection
   >>> matrix = CategoricalMatrix([[0, 0, 1, 1], [0, 1, 0, 1]], 2)
   >>> solution = solve_feature_selection(FeatureSelectionInstance(matrix, 2, 0, 1))
   >>> solution.cost
   0

Every solver is deterministic; ``python -m catclust --help`` lists the
command-line surface.
"""

from __future__ import annotations

import logging

from .column_outliers import (
    ColumnOutliersInstance,
    RestrictedInstance,
    classify_initial_clusters,
    normalize_witness,
    solve_column_outliers,
    solve_restricted,
    verify_restricted,
)
from .config import SolverSettings, settings_from_env
from .constrained import solve_constrained
from .exceptions import (
    AlphabetError,
    CatclustError,
    ConfigError,
    ContractViolation,
    InvalidSolutionError,
    OracleSizeError,
    ParseError,
    RelationArityError,
    WorkCeilingExceeded,
)
from .feature_selection import solve_feature_selection, sweep_outlier_caps
from .geometry import (
    hamming,
    solution_cost,
    verify_clustering,
    verify_constrained,
    verify_feature_selection,
)
from .hypergraph import Hypergraph, PatternHypergraph, find_occurrences
from .lowrank import LowRankInstance, solve_lowrank
from .models import (
    Alphabet,
    CategoricalMatrix,
    ClusteringSolution,
    ConstrainedInstance,
    FeatureSelectionInstance,
    FeatureSelectionSolution,
    RelationSet,
    Verdict,
)
from .utils import set_logging_handler
from .version import VERSION, __version__

__all__ = (
    "Alphabet",
    "AlphabetError",
    "CatclustError",
    "CategoricalMatrix",
    "ClusteringSolution",
    "ColumnOutliersInstance",
    "ConfigError",
    "ConstrainedInstance",
    "ContractViolation",
    "FeatureSelectionInstance",
    "FeatureSelectionSolution",
    "Hypergraph",
    "InvalidSolutionError",
    "LowRankInstance",
    "OracleSizeError",
    "ParseError",
    "PatternHypergraph",
    "RelationArityError",
    "RelationSet",
    "RestrictedInstance",
    "SolverSettings",
    "VERSION",
    "Verdict",
    "WorkCeilingExceeded",
    "__version__",
    "classify_initial_clusters",
    "find_occurrences",
    "hamming",
    "normalize_witness",
    "set_logging_handler",
    "settings_from_env",
    "solution_cost",
    "solve_column_outliers",
    "solve_constrained",
    "solve_feature_selection",
    "solve_lowrank",
    "solve_restricted",
    "sweep_outlier_caps",
    "verify_clustering",
    "verify_constrained",
    "verify_feature_selection",
    "verify_restricted",
)

logging.getLogger("catclust").addHandler(logging.NullHandler())
