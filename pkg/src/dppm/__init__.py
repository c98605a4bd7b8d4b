"""Differentially private k-approximate pattern matching under Hamming distance.

The library answers existence, counting, and reporting queries about the
k-mismatch occurrences of a public pattern in a private text while satisfying
epsilon-differential privacy with respect to single text positions. It ships
the exact (non-private) oracles, the pattern preprocessing that selects the
algorithmic regime, seeded Laplace noise, a per-position privacy-budget
ledger, and an audit harness for empirical utility and privacy checks.
"""

__version__ = "0.1.0"

from .matchers import (
    BudgetLedger,
    CountOutcome,
    ExistenceOutcome,
    MatchQuery,
    MatchResult,
    ReportOutcome,
    below_thresh,
    count_nonperiodic,
    count_smallk,
    existence,
    match_auto,
    report_periodic,
    trivial_all,
)
from .noise import LaplaceScale, NoiseSource, derive_seed, laplace_tail, sample_laplace
from .periodicity import (
    DispatchDecision,
    PeriodicCandidate,
    Regime,
    dispatch,
    is_primitive,
    min_period_distance,
    shortest_close_period,
)
from .text import (
    WindowFamily,
    counting_cover,
    exact_count,
    exact_report,
    hamming_distance,
    periodic_cover,
    reverse,
    sliding_distances,
    tile,
)
from .audit import (
    DpAuditReport,
    PackingFamily,
    TrialConfig,
    UtilityReport,
    dp_audit,
    packing_family_mismatch,
    packing_family_planted,
    run_utility_experiment,
    witness_error,
)

__all__ = [
    "BudgetLedger",
    "CountOutcome",
    "DispatchDecision",
    "DpAuditReport",
    "ExistenceOutcome",
    "LaplaceScale",
    "MatchQuery",
    "MatchResult",
    "NoiseSource",
    "PackingFamily",
    "PeriodicCandidate",
    "Regime",
    "ReportOutcome",
    "TrialConfig",
    "UtilityReport",
    "WindowFamily",
    "below_thresh",
    "count_nonperiodic",
    "count_smallk",
    "counting_cover",
    "derive_seed",
    "dispatch",
    "dp_audit",
    "exact_count",
    "exact_report",
    "existence",
    "hamming_distance",
    "is_primitive",
    "laplace_tail",
    "match_auto",
    "min_period_distance",
    "packing_family_mismatch",
    "packing_family_planted",
    "periodic_cover",
    "report_periodic",
    "reverse",
    "run_utility_experiment",
    "sample_laplace",
    "shortest_close_period",
    "sliding_distances",
    "tile",
    "trivial_all",
    "witness_error",
]
