from __future__ import annotations

from typing import Final

# Chattier than DEBUG: per-candidate and per-pattern logging.
TRACE: Final[int] = 5

DEFAULT_WORK_CEILING: Final[int] = 10**8
DEFAULT_ORACLE_STATE_LIMIT: Final[int] = 10**8

WORK_CEILING_ENV: Final[str] = "CATCLUST_WORK_CEILING"

SCHEMA_VERSION: Final[int] = 1

EXIT_FEASIBLE: Final[int] = 0
EXIT_ERROR: Final[int] = 1
EXIT_INFEASIBLE: Final[int] = 2

# Failure probability the default color-coding trial count is sized for.
COLOR_CODING_DELTA: Final[float] = 0.01

# Largest prime accepted for GF(p) low-rank instances.
MAX_FIELD_PRIME: Final[int] = 7

MODE_DIRECT: Final[str] = "direct"
MODE_HYPERGRAPH: Final[str] = "hypergraph"
MODE_ORACLE: Final[str] = "oracle"
SOLVER_MODES: Final[tuple[str, ...]] = (MODE_DIRECT, MODE_HYPERGRAPH)

SEMANTICS_FIELD: Final[str] = "field"
SEMANTICS_BOOLEAN: Final[str] = "boolean"

# Verdict reasons, shared by every verifier.
REASON_TOO_MANY_OUTLIERS: Final[str] = "too-many-outliers"
REASON_NOT_A_PARTITION: Final[str] = "not-a-partition"
REASON_TOO_MANY_CLUSTERS: Final[str] = "too-many-clusters"
REASON_CLUSTER_COUNT: Final[str] = "wrong-cluster-count"
REASON_CENTER_SHAPE: Final[str] = "bad-center"
REASON_BAD_SELECTION: Final[str] = "bad-selection"
REASON_RELATION_VIOLATED: Final[str] = "relation-violated"
REASON_COST_MISMATCH: Final[str] = "cost-mismatch"
REASON_OVER_BUDGET: Final[str] = "over-budget"

# Initial cluster types with respect to a clustering.
TYPE_WHOLE: Final[str] = "i"
TYPE_SPREAD: Final[str] = "ii"
TYPE_OUTLIER: Final[str] = "iii"
TYPE_SPLIT: Final[str] = "iv"
TYPE_SCATTERED: Final[str] = "v"

REASON_NOT_NORMALIZED: Final[str] = "not-normalized"

PROBLEM_FEATURE_SELECTION: Final[str] = "fs"
PROBLEM_CONSTRAINED: Final[str] = "cc"
PROBLEM_COLUMN_OUTLIERS: Final[str] = "kcco"
PROBLEM_RESTRICTED: Final[str] = "restricted"
PROBLEMS: Final[tuple[str, ...]] = (
    PROBLEM_FEATURE_SELECTION,
    PROBLEM_CONSTRAINED,
    PROBLEM_COLUMN_OUTLIERS,
    PROBLEM_RESTRICTED,
)

GADGET_INDEPENDENT_SET: Final[str] = "independent-set"
GADGET_PARTIAL_VERTEX_COVER: Final[str] = "partial-vertex-cover"
