"""Empirical verification rig for the private matchers.

Three instruments:

* utility experiments — run a matcher over generated instances with known
  exact answers and record how often the advertised error bounds are met;
* frequency-ratio privacy audits — run a matcher many times on a pair of
  close strings and look for an outcome category whose frequencies certify a
  ratio above ``e^(d*epsilon)`` (such a certificate refutes the privacy claim;
  its absence proves nothing and is reported as "not refuted");
* packing families — the pairwise-distant string constructions showing that
  witness-returning private matchers need additive error that grows with the
  log of the number of plantable positions.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import beta as _beta_dist

from .matchers import (
    BudgetLedger,
    CountOutcome,
    ExistenceOutcome,
    MatchQuery,
    Outcome,
    ReportOutcome,
    count_nonperiodic,
    count_smallk,
    existence,
    existence_additive_bound,
    match_auto,
    nonperiodic_multiplicative_error,
    periodic_additive_bound,
    report_periodic,
    trivial_all,
    PERIODIC_MULTIPLICATIVE_ERROR,
)
from .noise import NoiseSource, derive_seed
from .periodicity import Regime, dispatch, is_primitive, shortest_close_period
from .text import hamming_distance, iter_sliding_distances, tile

TEXT_ALPHABET = b"acgt"
DISJOINT_ALPHABET = b"0123"


def witness_error(text: bytes, pattern: bytes, position: int) -> int:
    """Hamming distance of the window starting at ``position`` to the pattern."""
    m = len(pattern)
    if not 0 <= position <= len(text) - m:
        raise ValueError(
            f"position {position} outside [0, {len(text) - m}] for m={m}"
        )
    return hamming_distance(text[position : position + m], pattern)


# --- instance generators ------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """A generated (text, pattern) pair plus whatever ground truth the
    generator knows (planted position, periodic root)."""

    text: bytes
    pattern: bytes
    planted_position: Optional[int] = None
    root: Optional[bytes] = None


def _random_string(rng: np.random.Generator, alphabet: bytes, length: int) -> bytearray:
    symbols = np.frombuffer(alphabet, np.uint8)
    return bytearray(symbols[rng.integers(0, len(symbols), size=length)].tobytes())


def _corrupt(
    buf: bytearray, rng: np.random.Generator, alphabet: bytes, positions: np.ndarray
) -> None:
    # Replacement symbols are drawn from the alphabet excluding the current
    # one, so each corruption changes the string.
    for pos in positions:
        current = alphabet.index(buf[pos]) if buf[pos] in alphabet else -1
        shift = int(rng.integers(1, len(alphabet)))
        buf[pos] = alphabet[(current + shift) % len(alphabet)]


def gen_uniform(cfg: "TrialConfig", rng: np.random.Generator) -> Instance:
    """Uniform random text and pattern over a 4-symbol alphabet."""
    text = _random_string(rng, TEXT_ALPHABET, cfg.n)
    pattern = _random_string(rng, TEXT_ALPHABET, cfg.m)
    return Instance(bytes(text), bytes(pattern))


def gen_planted(cfg: "TrialConfig", rng: np.random.Generator) -> Instance:
    """Random text with the pattern planted at a random position and corrupted
    in exactly k places, so the planted window has distance exactly k."""
    text = _random_string(rng, TEXT_ALPHABET, cfg.n)
    pattern = bytes(_random_string(rng, TEXT_ALPHABET, cfg.m))
    pos = int(rng.integers(0, cfg.n - cfg.m + 1))
    text[pos : pos + cfg.m] = pattern
    offsets = rng.choice(cfg.m, size=cfg.k, replace=False) if cfg.k else np.empty(0, int)
    _corrupt(text, rng, TEXT_ALPHABET, pos + np.asarray(offsets, dtype=int))
    return Instance(bytes(text), pattern, planted_position=pos)


def gen_periodic(cfg: "TrialConfig", rng: np.random.Generator) -> Instance:
    """Text equal to a short primitive root tiled to length n, then corrupted
    in k random places; the pattern is the uncorrupted tiling to length m."""
    while True:
        root = bytes(_random_string(rng, TEXT_ALPHABET, cfg.period_length))
        if is_primitive(root):
            break
    text = bytearray(tile(root, cfg.n))
    positions = rng.choice(cfg.n, size=cfg.k, replace=False) if cfg.k else np.empty(0, int)
    _corrupt(text, rng, TEXT_ALPHABET, np.asarray(positions, dtype=int))
    return Instance(bytes(text), tile(root, cfg.m), root=root)


def gen_disjoint(cfg: "TrialConfig", rng: np.random.Generator) -> Instance:
    """Text and pattern over disjoint alphabets: every distance equals m."""
    text = _random_string(rng, TEXT_ALPHABET, cfg.n)
    pattern = _random_string(rng, DISJOINT_ALPHABET, cfg.m)
    return Instance(bytes(text), bytes(pattern))


GENERATORS: dict[str, Callable[["TrialConfig", np.random.Generator], Instance]] = {
    "uniform-random": gen_uniform,
    "planted-occurrence": gen_planted,
    "periodic-with-corruptions": gen_periodic,
    "disjoint-alphabet": gen_disjoint,
}


@dataclass(frozen=True)
class TrialConfig:
    """Parameters for one utility experiment."""

    n: int
    m: int
    k: int
    epsilon: float
    beta: float
    trials: int
    seed: int
    generator: str
    period_length: int = 2
    noise: str = "standard"
    # Target success probability for the pass/fail summary; defaults to
    # 1 - beta (the matchers' own guarantee level).
    target: Optional[float] = None

    def __post_init__(self) -> None:
        if not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if not 0 <= self.k <= self.m:
            raise ValueError(f"k={self.k} outside [0, m={self.m}]")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.generator not in GENERATORS:
            raise ValueError(
                f"unknown generator {self.generator!r}; known: {sorted(GENERATORS)}"
            )
        if self.period_length < 1:
            raise ValueError("period_length must be at least 1")
        if self.noise not in ("standard", "zero"):
            raise ValueError(f"noise must be 'standard' or 'zero', got {self.noise!r}")
        if self.target is not None and not 0 < self.target < 1:
            raise ValueError(f"target must lie in (0, 1), got {self.target}")

    @property
    def target_probability(self) -> float:
        return self.target if self.target is not None else 1.0 - self.beta

    _INT_KEYS = ("n", "m", "k", "trials", "seed", "period_length")
    _FLOAT_KEYS = ("epsilon", "beta", "target")

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "TrialConfig":
        """Build from a flat string mapping (the bench config file format)."""
        kwargs: dict = {}
        for key, raw in mapping.items():
            if key in cls._INT_KEYS:
                kwargs[key] = int(raw)
            elif key in cls._FLOAT_KEYS:
                kwargs[key] = float(raw)
            elif key in ("generator", "noise"):
                kwargs[key] = raw
            else:
                raise ValueError(f"unknown config key {key!r}")
        missing = {"n", "m", "k", "epsilon", "beta", "trials", "seed", "generator"} - set(
            kwargs
        )
        if missing:
            raise ValueError(f"config missing required keys: {sorted(missing)}")
        return cls(**kwargs)


# --- utility experiments ------------------------------------------------------

VARIANTS = ("existence", "count", "report")

_COLUMNS = (
    "trial",
    "algorithm",
    "found",
    "count",
    "reported",
    "witness",
    "witness_distance",
    "bound",
    "completeness_ok",
    "soundness_ok",
    "violated",
    "error",
)


@dataclass(frozen=True)
class TrialRecord:
    """One trial's outcome versus the exact oracle."""

    trial: int
    algorithm: str = ""
    found: Optional[bool] = None
    count: Optional[int] = None
    reported: Optional[int] = None
    witness: Optional[int] = None
    witness_distance: Optional[int] = None
    bound: Optional[float] = None
    completeness_ok: Optional[bool] = None
    soundness_ok: Optional[bool] = None
    violated: bool = False
    error: str = ""

    def row(self) -> list:
        def cell(v):
            return "" if v is None else v

        return [cell(getattr(self, c)) for c in _COLUMNS]


@dataclass
class UtilityReport:
    """Aggregate of a utility experiment.

    ``runtime_seconds`` is informational and deliberately excluded from the
    serialized rows so that equal seeds produce byte-identical output.
    """

    config: TrialConfig
    variant: str
    records: list[TrialRecord] = field(default_factory=list)
    runtime_seconds: float = 0.0

    @property
    def violation_count(self) -> int:
        return sum(1 for r in self.records if r.violated)

    @property
    def violation_rate(self) -> float:
        return self.violation_count / len(self.records)

    @property
    def allowed_violation_rate(self) -> float:
        """Guarantee level plus three-sigma binomial slack."""
        miss = 1.0 - self.config.target_probability
        sigma = math.sqrt(miss * (1.0 - miss) / len(self.records))
        return miss + 3.0 * sigma

    @property
    def max_additive_error(self) -> int:
        worst = 0
        for r in self.records:
            if r.witness_distance is not None:
                worst = max(worst, r.witness_distance - self.config.k)
        return max(worst, 0)

    @property
    def passed(self) -> bool:
        return self.violation_rate <= self.allowed_violation_rate

    def to_rows(self) -> list[list]:
        """Header, one row per trial, and a summary row (CSV shape)."""
        rows = [list(_COLUMNS)]
        rows.extend(r.row() for r in self.records)
        rows.append(
            [
                "summary",
                self.variant,
                sum(1 for r in self.records if r.found),
                len(self.records),
                sum(1 for r in self.records if r.error),
                "",
                self.max_additive_error,
                self.allowed_violation_rate,
                sum(1 for r in self.records if r.completeness_ok),
                sum(1 for r in self.records if r.soundness_ok),
                self.violation_rate,
                "pass" if self.passed else "fail",
            ]
        )
        return rows

    def to_records(self) -> list[dict]:
        """Line-delimited record shape (one dict per trial plus a summary)."""
        out = [dict(zip(_COLUMNS, r.row())) for r in self.records]
        out.append(
            {
                "summary": True,
                "variant": self.variant,
                "trials": len(self.records),
                "violations": self.violation_count,
                "violation_rate": self.violation_rate,
                "allowed_violation_rate": self.allowed_violation_rate,
                "max_additive_error": self.max_additive_error,
                "result": "pass" if self.passed else "fail",
            }
        )
        return out


def _distances(text: bytes, pattern: bytes) -> np.ndarray:
    return np.fromiter(iter_sliding_distances(text, pattern), dtype=np.int64)


def _count_at_most(distances: np.ndarray, x: float) -> int:
    return int((distances <= x).sum())


def _run_existence_trial(
    inst: Instance, cfg: TrialConfig, src: NoiseSource, trial: int
) -> TrialRecord:
    query = MatchQuery(inst.pattern, cfg.k, cfg.epsilon, cfg.beta)
    outcome = existence(inst.text, query, src)
    d = _distances(inst.text, inst.pattern)
    oracle_exists = _count_at_most(d, cfg.k) > 0
    bound = cfg.k + existence_additive_bound(cfg.n, cfg.m, cfg.epsilon, cfg.beta)
    completeness = outcome.found or not oracle_exists
    wd = int(d[outcome.witness]) if outcome.found else None
    soundness = wd is None or wd <= bound
    return TrialRecord(
        trial=trial,
        algorithm="existence",
        found=outcome.found,
        witness=outcome.witness,
        witness_distance=wd,
        bound=bound,
        completeness_ok=completeness,
        soundness_ok=soundness,
        violated=not (completeness and soundness),
    )


def _run_count_trial(
    inst: Instance, cfg: TrialConfig, src: NoiseSource, trial: int
) -> TrialRecord:
    query = MatchQuery(inst.pattern, cfg.k, cfg.epsilon, cfg.beta)
    n, m, k = cfg.n, cfg.m, cfg.k
    decision = dispatch(inst.pattern, k, n, cfg.epsilon, cfg.beta)
    if decision.regime is Regime.PERIODIC_REPORTING:
        report = report_periodic(inst.text, query, decision.candidate, src)
        count = len(report.positions)
        witness = report.positions[0] if report.positions else None
        x_hi = (1 + PERIODIC_MULTIPLICATIVE_ERROR) * k + periodic_additive_bound(
            n, cfg.epsilon, cfg.beta
        )
    elif decision.regime is Regime.NON_PERIODIC_COUNTING:
        outcome = count_nonperiodic(inst.text, query, src)
        count, witness = outcome.count, outcome.witness
        gamma = nonperiodic_multiplicative_error(n, m, k, cfg.epsilon, cfg.beta)
        x_hi = (1 + gamma) * k
    elif decision.regime is Regime.SMALL_K_COUNTING:
        cutoff = decision.effective_k
        outcome = count_smallk(inst.text, query, cutoff, src)
        count, witness = outcome.count, outcome.witness
        gamma = nonperiodic_multiplicative_error(n, m, cutoff, cfg.epsilon, cfg.beta)
        x_hi = (1 + gamma) * cutoff
    else:
        report = trivial_all(inst.text, query)
        count = len(report.positions)
        witness = report.positions[0] if report.positions else None
        x_hi = float(m)
    d = _distances(inst.text, inst.pattern)
    c_lo = _count_at_most(d, k)
    c_hi = _count_at_most(d, min(math.floor(x_hi), m))
    wd = int(d[witness]) if witness is not None else None
    completeness = count >= c_lo
    soundness = count <= c_hi and (wd is None or wd <= x_hi)
    return TrialRecord(
        trial=trial,
        algorithm=decision.regime.value,
        count=count,
        witness=witness,
        witness_distance=wd,
        bound=x_hi,
        completeness_ok=completeness,
        soundness_ok=soundness,
        violated=not (completeness and soundness),
    )


def _run_report_trial(
    inst: Instance, cfg: TrialConfig, src: NoiseSource, trial: int
) -> TrialRecord:
    query = MatchQuery(inst.pattern, cfg.k, cfg.epsilon, cfg.beta)
    n, m, k = cfg.n, cfg.m, cfg.k
    # Widest period search the block-vote preprocessing supports; the matcher's
    # guarantee is then checked empirically at whatever candidate this yields.
    candidate = shortest_close_period(inst.pattern, k, m // (4 * k + 1))
    if candidate is not None and m >= 2:
        outcome = report_periodic(inst.text, query, candidate, src)
        algorithm = Regime.PERIODIC_REPORTING.value
        bound = (1 + PERIODIC_MULTIPLICATIVE_ERROR) * k + periodic_additive_bound(
            n, cfg.epsilon, cfg.beta
        )
    else:
        outcome = trivial_all(inst.text, query)
        algorithm = Regime.TRIVIAL_FALLBACK.value
        bound = float(m)
    d = _distances(inst.text, inst.pattern)
    oracle = {int(i) for i in np.flatnonzero(d <= k)}
    positions = set(outcome.positions)
    completeness = oracle <= positions
    worst = max((int(d[p]) for p in outcome.positions), default=None)
    soundness = worst is None or worst <= bound
    return TrialRecord(
        trial=trial,
        algorithm=algorithm,
        reported=len(outcome.positions),
        witness=outcome.positions[0] if outcome.positions else None,
        witness_distance=worst,
        bound=bound,
        completeness_ok=completeness,
        soundness_ok=soundness,
        violated=not (completeness and soundness),
    )


_TRIAL_RUNNERS = {
    "existence": _run_existence_trial,
    "count": _run_count_trial,
    "report": _run_report_trial,
}


def run_utility_experiment(cfg: TrialConfig, variant: str) -> UtilityReport:
    """Run ``cfg.trials`` seeded trials of the given variant and compare each
    against the exact oracle. Generator or matcher failures are recorded on
    the trial (as violated) rather than aborting the experiment."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    runner = _TRIAL_RUNNERS[variant]
    generate = GENERATORS[cfg.generator]
    report = UtilityReport(config=cfg, variant=variant)
    started = time.perf_counter()
    mode = "zero" if cfg.noise == "zero" else "standard"
    for trial in range(cfg.trials):
        instance_rng = np.random.Generator(
            np.random.PCG64(derive_seed(cfg.seed, 1, trial))
        )
        src = NoiseSource(derive_seed(cfg.seed, 2, trial), mode=mode)
        try:
            inst = generate(cfg, instance_rng)
            record = runner(inst, cfg, src, trial)
        except (ValueError, RuntimeError) as exc:
            record = TrialRecord(trial=trial, violated=True, error=str(exc))
        report.records.append(record)
    report.runtime_seconds = time.perf_counter() - started
    return report


# --- differential privacy audit ----------------------------------------------

def clopper_pearson(successes: int, trials: int, confidence: float = 0.999) -> tuple[float, float]:
    """Exact (Clopper-Pearson) two-sided binomial confidence interval."""
    if not 0 <= successes <= trials or trials < 1:
        raise ValueError(f"need 0 <= successes <= trials, got {successes}/{trials}")
    if not 0 < confidence < 1:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    tail = (1.0 - confidence) / 2.0
    lo = 0.0 if successes == 0 else float(_beta_dist.ppf(tail, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(_beta_dist.ppf(1.0 - tail, successes + 1, trials - successes))
    return lo, hi


def coarsen_existence(outcome: Outcome) -> str:
    """NO, or the witness bucketed by value (capped at 16 categories)."""
    assert isinstance(outcome, ExistenceOutcome)
    if not outcome.found:
        return "NO"
    return f"w{min(outcome.witness, 14)}"


def coarsen_count(outcome: Outcome) -> str:
    """Count value, clamped into 15 buckets."""
    assert isinstance(outcome, CountOutcome)
    return f"c{min(outcome.count, 14)}"


def coarsen_report(outcome: Outcome) -> str:
    """Stable hash of the reported position set into 16 buckets."""
    assert isinstance(outcome, ReportOutcome)
    payload = ",".join(map(str, outcome.positions)).encode()
    return f"h{hashlib.blake2b(payload, digest_size=8).digest()[0] & 15}"


def coarsen_by_type(outcome: Outcome) -> str:
    if isinstance(outcome, ExistenceOutcome):
        return coarsen_existence(outcome)
    if isinstance(outcome, CountOutcome):
        return coarsen_count(outcome)
    return coarsen_report(outcome)


COARSENINGS: dict[str, Callable[[Outcome], str]] = {
    "existence-witness": coarsen_existence,
    "count-bucket": coarsen_count,
    "report-hash": coarsen_report,
    "by-type": coarsen_by_type,
}


def _audit_existence(text: bytes, query: MatchQuery, src: NoiseSource) -> Outcome:
    return existence(text, query, src, BudgetLedger(query.epsilon))


def _audit_count(text: bytes, query: MatchQuery, src: NoiseSource) -> Outcome:
    return match_auto(text, query, src, variant="count").outcome


def _audit_report(text: bytes, query: MatchQuery, src: NoiseSource) -> Outcome:
    return match_auto(text, query, src, variant="report").outcome


def _audit_auto(text: bytes, query: MatchQuery, src: NoiseSource) -> Outcome:
    return match_auto(text, query, src).outcome


def _audit_canary(text: bytes, query: MatchQuery, src: NoiseSource) -> Outcome:
    """Deliberately broken matcher: the exact first k-mismatch position with
    no noise. Exists so the audit's power can be demonstrated; it must fail."""
    for i, d in enumerate(iter_sliding_distances(text, query.pattern)):
        if d <= query.k:
            return ExistenceOutcome(found=True, witness=i)
    return ExistenceOutcome(found=False, witness=None)


AUDIT_MATCHERS: dict[str, tuple[Callable[[bytes, MatchQuery, NoiseSource], Outcome], str]] = {
    "existence": (_audit_existence, "existence-witness"),
    "count": (_audit_count, "count-bucket"),
    "report": (_audit_report, "report-hash"),
    "auto": (_audit_auto, "by-type"),
    "canary": (_audit_canary, "existence-witness"),
}


@dataclass(frozen=True)
class CategoryAudit:
    """Frequency comparison for one outcome category."""

    label: str
    count_a: int
    count_b: int
    freq_a: float
    freq_b: float
    ci_a: tuple[float, float]
    ci_b: tuple[float, float]
    refuted: bool

    def record(self) -> dict:
        return {
            "category": self.label,
            "count_a": self.count_a,
            "count_b": self.count_b,
            "freq_a": self.freq_a,
            "freq_b": self.freq_b,
            "ci_a_low": self.ci_a[0],
            "ci_a_high": self.ci_a[1],
            "ci_b_low": self.ci_b[0],
            "ci_b_high": self.ci_b[1],
            "refuted": self.refuted,
        }


@dataclass(frozen=True)
class DpAuditReport:
    """Result of a frequency-ratio audit.

    ``refuted`` means some category's confidence intervals certify a frequency
    ratio above ``ratio_bound`` at the audit's confidence level. The converse
    never holds: a passing audit says "not refuted", not "private".
    """

    matcher: str
    trials: int
    seed: int
    distance: int
    epsilon: float
    ratio_bound: float
    confidence: float
    categories: tuple[CategoryAudit, ...]
    refuted: bool

    def to_records(self) -> list[dict]:
        rows = [c.record() for c in self.categories]
        rows.append(
            {
                "summary": True,
                "matcher": self.matcher,
                "trials": self.trials,
                "seed": self.seed,
                "distance": self.distance,
                "epsilon": self.epsilon,
                "ratio_bound": self.ratio_bound,
                "confidence": self.confidence,
                "result": "refuted" if self.refuted else "not-refuted",
            }
        )
        return rows


def dp_audit(
    matcher: str,
    text_a: bytes,
    text_b: bytes,
    query: MatchQuery,
    trials: int,
    coarsening: Optional[str] = None,
    *,
    seed: int = 0,
    group: bool = False,
    confidence: float = 0.999,
) -> DpAuditReport:
    """Frequency-ratio audit of ``matcher`` on a pair of close strings.

    Runs the matcher ``trials`` times per string with independently derived
    seeds, coarsens outcomes into at most 16 categories, and checks both
    directions per category: the audit refutes privacy only when the lower
    confidence bound of one string's frequency exceeds ``e^(d*epsilon)`` times
    the upper confidence bound of the other's (Clopper-Pearson intervals at
    ``confidence``). The test is symmetric in the two strings and
    seed-reproducible.

    In strict mode the strings must be neighboring (Hamming distance 1;
    identical strings are also accepted as a degenerate sanity case). With
    ``group=True`` any distance d >= 1 is allowed and the ratio bound scales
    to ``e^(d*epsilon)``.
    """
    if matcher not in AUDIT_MATCHERS:
        raise ValueError(f"unknown matcher {matcher!r}; known: {sorted(AUDIT_MATCHERS)}")
    if len(text_a) != len(text_b):
        raise ValueError("audited strings must have equal length")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    distance = hamming_distance(text_a, text_b)
    if not group and distance > 1:
        raise ValueError(
            f"strings at Hamming distance {distance} are not neighboring; "
            "pass group=True to audit at the group-privacy bound"
        )
    run, default_coarsening = AUDIT_MATCHERS[matcher]
    coarsen = COARSENINGS[coarsening if coarsening is not None else default_coarsening]
    ratio_bound = math.exp(distance * query.epsilon)

    counts: list[dict[str, int]] = [{}, {}]
    for lane, text in enumerate((text_a, text_b)):
        lane_counts = counts[lane]
        for trial in range(trials):
            src = NoiseSource(derive_seed(seed, lane, trial))
            label = coarsen(run(text, query, src))
            lane_counts[label] = lane_counts.get(label, 0) + 1

    categories = []
    refuted_any = False
    for label in sorted(set(counts[0]) | set(counts[1])):
        ca, cb = counts[0].get(label, 0), counts[1].get(label, 0)
        lo_a, hi_a = clopper_pearson(ca, trials, confidence)
        lo_b, hi_b = clopper_pearson(cb, trials, confidence)
        refuted = lo_a > ratio_bound * hi_b or lo_b > ratio_bound * hi_a
        refuted_any = refuted_any or refuted
        categories.append(
            CategoryAudit(
                label=label,
                count_a=ca,
                count_b=cb,
                freq_a=ca / trials,
                freq_b=cb / trials,
                ci_a=(lo_a, hi_a),
                ci_b=(lo_b, hi_b),
                refuted=refuted,
            )
        )
    return DpAuditReport(
        matcher=matcher,
        trials=trials,
        seed=seed,
        distance=distance,
        epsilon=query.epsilon,
        ratio_bound=ratio_bound,
        confidence=confidence,
        categories=tuple(categories),
        refuted=refuted_any,
    )


# --- packing families ---------------------------------------------------------

@dataclass(frozen=True)
class PackingFamily:
    """Pairwise-equidistant strings, each with one planted window."""

    members: tuple[bytes, ...]
    pairwise_distance: int
    planted_positions: tuple[int, ...]


def _filler_symbol(pattern: bytes) -> int:
    used = set(pattern)
    for symbol in range(256):
        if symbol not in used:
            return symbol
    raise ValueError("pattern uses all 256 byte values; no filler symbol available")


def _block_count(pattern: bytes, n: int) -> int:
    m = len(pattern)
    if m < 1:
        raise ValueError("pattern must be non-empty")
    if n < m:
        raise ValueError(f"n={n} is too short for pattern length {m}")
    # A trailing remainder (when m does not divide n) is filled with the
    # filler symbol and excluded from block indexing.
    return n // m


def packing_family_planted(pattern: bytes, n: int) -> PackingFamily:
    """One member per even block: the pattern planted in that block, filler
    elsewhere. Distinct members differ in exactly two blocks, so all pairwise
    distances equal 2m."""
    m = len(pattern)
    filler = _filler_symbol(pattern)
    blocks = _block_count(pattern, n)
    members = []
    positions = []
    for j in range(0, blocks, 2):
        member = bytearray([filler]) * n
        member[j * m : (j + 1) * m] = pattern
        members.append(bytes(member))
        positions.append(j * m)
    return PackingFamily(tuple(members), 2 * m, tuple(positions))


def packing_family_mismatch(
    pattern: bytes, n: int, k: int, alpha: int
) -> PackingFamily:
    """One member per even block: a k-mismatch variant of the pattern planted
    in that block and a (k + alpha + 1)-mismatch variant in every other even
    block. Distinct members differ in alpha + 1 positions of two blocks, so
    all pairwise distances equal 2*alpha + 2."""
    m = len(pattern)
    if k < 0 or alpha < 0:
        raise ValueError("k and alpha must be non-negative")
    if k + alpha + 1 > m:
        raise ValueError(
            f"need k + alpha + 1 <= m, got k={k}, alpha={alpha}, m={m}"
        )
    filler = _filler_symbol(pattern)
    blocks = _block_count(pattern, n)
    near = bytes([filler]) * k + pattern[k:]
    far = bytes([filler]) * (k + alpha + 1) + pattern[k + alpha + 1 :]
    members = []
    positions = []
    for j in range(0, blocks, 2):
        member = bytearray([filler]) * n
        for i in range(0, blocks, 2):
            member[i * m : (i + 1) * m] = far
        member[j * m : (j + 1) * m] = near
        members.append(bytes(member))
        positions.append(j * m)
    return PackingFamily(tuple(members), 2 * (alpha + 1), tuple(positions))
