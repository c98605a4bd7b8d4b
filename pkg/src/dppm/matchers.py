"""Private approximate pattern matchers.

The primitive is a noisy threshold scan (`below_thresh`): a sparse-vector-style
pass that pays privacy once for the first window whose noisy distance falls
below a noisy threshold. On top of it sit the matchers:

* `existence` — one scan over the whole text; no multiplicative error.
* `report_periodic` — for patterns close to a short primitive period, forward
  and backward scans per window locate the arithmetic progression of
  occurrences.
* `count_nonperiodic` — when no short close period exists, occurrences per
  window are few, so repeated scans count them.
* `count_smallk` — the non-periodic counter with a larger mismatch budget
  substituted for small ``k``.
* `trivial_all` — emits every position; private for free, additive error m.

Every scan charges its epsilon slice to every position of its input in a
`BudgetLedger`; the ledger's cap check is the executable form of the
composition argument (each position is covered by few windows, so slices sum
to at most the query epsilon).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .noise import NoiseSource
from .periodicity import (
    DispatchDecision,
    PeriodicCandidate,
    Regime,
    dispatch,
)
from .text import counting_cover, iter_sliding_distances, periodic_cover, reverse

# Occurrence cap per window and unit of budget splitting in the non-periodic
# counter: a window shorter than 2m holds at most this many occurrences per
# unit of k when no short close period exists.
WINDOW_OCCURRENCE_CAP = 1152

# Multiplicative error of the periodic-case reporter.
PERIODIC_MULTIPLICATIVE_ERROR = 7


@dataclass(frozen=True)
class MatchQuery:
    """One private query: public pattern plus privacy/accuracy parameters."""

    pattern: bytes
    k: int
    epsilon: float
    beta: float

    def __post_init__(self) -> None:
        if len(self.pattern) < 1:
            raise ValueError("pattern must be non-empty")
        if not 0 <= self.k <= len(self.pattern):
            raise ValueError(f"k={self.k} outside [0, m={len(self.pattern)}]")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")

    @property
    def m(self) -> int:
        return len(self.pattern)


@dataclass(frozen=True)
class ExistenceOutcome:
    """YES/NO answer with a witness position present iff YES."""

    found: bool
    witness: Optional[int]

    def __post_init__(self) -> None:
        if self.found != (self.witness is not None):
            raise ValueError("witness must be present exactly when the answer is YES")

    @property
    def answer(self) -> str:
        return "YES" if self.found else "NO"


@dataclass(frozen=True)
class CountOutcome:
    """Noisy occurrence count, clamped to the feasible range.

    ``raw_count`` preserves the pre-clamp sum of per-window counts for
    diagnostics; ``witness`` is present whenever the count is positive.
    """

    count: int
    witness: Optional[int]
    raw_count: int

    def __post_init__(self) -> None:
        if self.count > 0 and self.witness is None:
            raise ValueError("positive count requires a witness")


@dataclass(frozen=True)
class ReportOutcome:
    """Sorted, duplicate-free start positions."""

    positions: tuple[int, ...]

    def __post_init__(self) -> None:
        if list(self.positions) != sorted(set(self.positions)):
            raise ValueError("positions must be sorted and duplicate-free")


Outcome = Union[ExistenceOutcome, CountOutcome, ReportOutcome]


class BudgetLedger:
    """Per-position record of privacy budget consumed by threshold scans.

    Charges are stored exactly (as ``Fraction``), so the cap comparison is not
    subject to float rounding. Spans are half-open ``[start, stop)``.
    """

    def __init__(self, cap: Union[float, Fraction]):
        self.cap = Fraction(cap)
        self._spans: list[tuple[int, int, Fraction]] = []

    def charge_span(self, start: int, stop: int, epsilon: Union[float, Fraction]) -> None:
        if stop <= start:
            raise ValueError(f"empty charge span [{start}, {stop})")
        eps = Fraction(epsilon)
        if eps < 0:
            raise ValueError("cannot charge negative budget")
        if eps > 0:
            self._spans.append((start, stop, eps))

    @property
    def max_spent(self) -> Fraction:
        """Largest accumulated charge over all positions (boundary sweep)."""
        if not self._spans:
            return Fraction(0)
        deltas: dict[int, Fraction] = {}
        for start, stop, eps in self._spans:
            deltas[start] = deltas.get(start, Fraction(0)) + eps
            deltas[stop] = deltas.get(stop, Fraction(0)) - eps
        level = Fraction(0)
        peak = Fraction(0)
        for pos in sorted(deltas):
            level += deltas[pos]
            if level > peak:
                peak = level
        return peak

    def spent_at(self, position: int) -> Fraction:
        return sum(
            (eps for start, stop, eps in self._spans if start <= position < stop),
            Fraction(0),
        )

    @property
    def per_position(self) -> dict[int, Fraction]:
        """Materialized position -> accumulated epsilon map (test-facing)."""
        out: dict[int, Fraction] = {}
        for start, stop, eps in self._spans:
            for p in range(start, stop):
                out[p] = out.get(p, Fraction(0)) + eps
        return out

    def assert_within_cap(self) -> None:
        spent = self.max_spent
        if spent > self.cap:
            raise RuntimeError(
                f"privacy budget exceeded: max per-position spend {spent} > cap {self.cap}"
            )


def below_thresh(
    text: bytes,
    pattern: bytes,
    thresh: float,
    epsilon: Union[float, Fraction],
    src: NoiseSource,
    ledger: BudgetLedger,
    *,
    base: int = 0,
) -> Optional[int]:
    """Noisy threshold scan: first position whose noisy distance is at most
    the noisy threshold, or None if no position qualifies.

    The threshold receives Lap(2/epsilon) noise once; each examined distance
    receives fresh Lap(4/epsilon) noise, and the comparison is a plain ``<=``.
    The scan charges ``epsilon`` to every position of ``text`` in the ledger
    (``base`` translates local positions when ``text`` is a window of a larger
    string). In zero-noise mode this returns exactly ``min{i : d_i <= thresh}``.
    """
    n, m = len(text), len(pattern)
    if m < 1:
        raise ValueError("pattern must be non-empty")
    if m > n:
        raise ValueError(f"pattern length {m} exceeds text length {n}")
    eps = float(epsilon)
    if not (eps > 0 and math.isfinite(eps)):
        raise ValueError(f"epsilon must be positive and finite, got {epsilon}")
    ledger.charge_span(base, base + n, epsilon)
    noisy_thresh = thresh + src.laplace(2.0 / eps)
    for i, d in enumerate(iter_sliding_distances(text, pattern)):
        if d + src.laplace(4.0 / eps) <= noisy_thresh:
            return i
    return None


# --- thresholds and error bounds ------------------------------------------

def existence_threshold(n: int, m: int, k: int, epsilon: float, beta: float) -> float:
    """Scan threshold for the existence matcher."""
    return k + 8.0 / epsilon * (math.log(n - m + 1) + math.log(2.0 / beta))


def existence_additive_bound(n: int, m: int, epsilon: float, beta: float) -> float:
    """One-sided additive error of the existence matcher, with probability
    at least 1 - beta."""
    return 16.0 / epsilon * (math.log(n - m + 1) + math.log(2.0 / beta))


def periodic_threshold(n: int, m: int, k: int, epsilon: float, beta: float) -> float:
    """Per-window scan threshold for the periodic-case reporter."""
    return k + 48.0 / epsilon * (math.log(m / 2.0) + math.log(12.0 * (n / m) / beta))


def periodic_additive_bound(n: int, epsilon: float, beta: float) -> float:
    """Additive error of the periodic-case reporter (multiplicative error is
    ``PERIODIC_MULTIPLICATIVE_ERROR``), with probability at least 1 - beta."""
    return 576.0 / epsilon * math.log(6.0 * n / beta)


def nonperiodic_threshold(n: int, m: int, k: int, epsilon: float, beta: float) -> float:
    """Per-scan threshold for the non-periodic counter."""
    cap = WINDOW_OCCURRENCE_CAP * k
    return k + 16.0 * cap / epsilon * (math.log(m) + math.log(2.0 * (n / m) * cap / beta))


def nonperiodic_multiplicative_error(
    n: int, m: int, k: int, epsilon: float, beta: float
) -> float:
    """Multiplicative error gamma of the non-periodic counter: the count is
    sandwiched between the true counts at distances k and (1+gamma)k."""
    cap = WINDOW_OCCURRENCE_CAP * k
    return (
        32.0 * WINDOW_OCCURRENCE_CAP / epsilon
        * (math.log(m) + math.log(2.0 * (n / m) * cap / beta))
    )


# --- matchers ---------------------------------------------------------------

def _require_text(text: bytes, m: int) -> None:
    if len(text) < 1:
        raise ValueError("private input text must be non-empty")
    if m > len(text):
        raise ValueError(f"pattern length {m} exceeds text length {len(text)}")


def existence(
    text: bytes,
    query: MatchQuery,
    src: NoiseSource,
    ledger: Optional[BudgetLedger] = None,
) -> ExistenceOutcome:
    """Existence variant: one threshold scan over the whole text.

    With probability at least 1 - beta the answer is one-sided within additive
    error :func:`existence_additive_bound`: a true k-mismatch occurrence forces
    YES, and any returned witness is within ``k`` plus the bound.
    """
    _require_text(text, query.m)
    if ledger is None:
        ledger = BudgetLedger(query.epsilon)
    n, m = len(text), query.m
    thresh = existence_threshold(n, m, query.k, query.epsilon, query.beta)
    hit = below_thresh(
        text, query.pattern, thresh, Fraction(query.epsilon), src, ledger
    )
    ledger.assert_within_cap()
    return ExistenceOutcome(found=hit is not None, witness=hit)


def report_periodic(
    text: bytes,
    query: MatchQuery,
    candidate: PeriodicCandidate,
    src: NoiseSource,
    ledger: Optional[BudgetLedger] = None,
    *,
    thresh_override: Optional[float] = None,
) -> ReportOutcome:
    """Reporting variant for patterns close to a short primitive period.

    Each window of the stride-``floor(m/2)`` cover is scanned forward and
    backward at epsilon/6; when both scans hit, the window contributes the
    arithmetic progression from the first hit to the translated last hit with
    step ``candidate.length``. Positions lie in the window's exclusive start
    range, so the union is duplicate-free by construction (a set is used
    anyway). The dispatcher is responsible for certifying the period-length
    hypothesis; this function checks only structural validity
    (``m >= 2`` and ``candidate.dist <= 2k``).

    ``thresh_override`` replaces the calibrated threshold and exists for
    zero-noise oracle tests only.
    """
    _require_text(text, query.m)
    n, m = len(text), query.m
    if m < 2:
        raise ValueError("periodic reporting needs m >= 2")
    if candidate.dist > 2 * query.k:
        raise ValueError(
            f"candidate distance {candidate.dist} exceeds 2k = {2 * query.k}"
        )
    if ledger is None:
        ledger = BudgetLedger(query.epsilon)
    thresh = (
        thresh_override
        if thresh_override is not None
        else periodic_threshold(n, m, query.k, query.epsilon, query.beta)
    )
    eps_slice = Fraction(query.epsilon) / 6
    rev_pattern = reverse(query.pattern)
    step = candidate.length
    found: set[int] = set()
    for a, b in periodic_cover(n, m).windows:
        window = text[a : b + 1]
        first = below_thresh(
            window, query.pattern, thresh, eps_slice, src, ledger, base=a
        )
        rev_hit = below_thresh(
            reverse(window), rev_pattern, thresh, eps_slice, src, ledger, base=a
        )
        if first is None or rev_hit is None:
            continue
        last = (len(window) - 1) - rev_hit - (m - 1)
        if last < first:
            continue
        found.update(
            a + first + step * offset for offset in range((last - first) // step + 1)
        )
    ledger.assert_within_cap()
    return ReportOutcome(tuple(sorted(found)))


def count_nonperiodic(
    text: bytes,
    query: MatchQuery,
    src: NoiseSource,
    ledger: Optional[BudgetLedger] = None,
    *,
    effective_k: Optional[int] = None,
    thresh_override: Optional[float] = None,
) -> CountOutcome:
    """Counting variant for patterns with no short close period.

    Each window of the stride-``m`` cover is scanned repeatedly, restarting
    one past the previous hit, until the scan misses, the suffix runs out of
    room, or the per-window cap of ``1152 * k`` is reached. Hit positions are
    translated to absolute positions as previous-hit + 1 + local index. The
    witness is the first hit encountered. The final count is the clamped sum
    of per-window counts.

    ``effective_k`` substitutes a larger mismatch budget for ``k`` (small-k
    regime); ``thresh_override`` exists for zero-noise oracle tests only.
    """
    _require_text(text, query.m)
    k_eff = query.k if effective_k is None else effective_k
    if k_eff < 1:
        raise ValueError(
            "non-periodic counting needs k >= 1 (its budget split divides by k); "
            "k = 0 queries belong to the existence or trivial paths"
        )
    if ledger is None:
        ledger = BudgetLedger(query.epsilon)
    n, m = len(text), query.m
    cap = WINDOW_OCCURRENCE_CAP * k_eff
    eps_slice = Fraction(query.epsilon) / (2 * cap)
    thresh = (
        thresh_override
        if thresh_override is not None
        else nonperiodic_threshold(n, m, k_eff, query.epsilon, query.beta)
    )
    total = 0
    witness: Optional[int] = None
    for a, b in counting_cover(n, m).windows:
        window = text[a : b + 1]
        last_hit = -1
        hits = 0
        while last_hit < len(window) - m and hits < cap:
            local = below_thresh(
                window[last_hit + 1 :],
                query.pattern,
                thresh,
                eps_slice,
                src,
                ledger,
                base=a + last_hit + 1,
            )
            if local is None:
                break
            last_hit = last_hit + 1 + local
            hits += 1
            if witness is None:
                witness = a + last_hit
        total += hits
    count = min(max(total, 0), n - m + 1)
    ledger.assert_within_cap()
    return CountOutcome(count=count, witness=witness, raw_count=total)


def count_smallk(
    text: bytes,
    query: MatchQuery,
    cutoff: int,
    src: NoiseSource,
    ledger: Optional[BudgetLedger] = None,
    *,
    thresh_override: Optional[float] = None,
) -> CountOutcome:
    """Counting variant for small ``k``: delegates to the non-periodic counter
    with ``cutoff`` taking the role of ``k``. Requires ``query.k < cutoff``."""
    if query.k >= cutoff:
        raise ValueError(
            f"small-k counting needs k < cutoff, got k={query.k}, cutoff={cutoff}"
        )
    return count_nonperiodic(
        text,
        query,
        src,
        ledger,
        effective_k=cutoff,
        thresh_override=thresh_override,
    )


def trivial_all(text: bytes, query: MatchQuery) -> ReportOutcome:
    """Report every start position. Reads nothing but the lengths, so it is
    private for any epsilon, consumes no randomness, and charges no budget;
    every reported distance is trivially at most m."""
    _require_text(text, query.m)
    return ReportOutcome(tuple(range(len(text) - query.m + 1)))


# --- auto-dispatching front door --------------------------------------------

VARIANTS = ("auto", "existence", "count", "report")


@dataclass(frozen=True)
class MatchResult:
    """Outcome of an auto-dispatched query, tagged with the regime that ran."""

    regime: Regime
    decision: DispatchDecision
    outcome: Outcome
    ledger: BudgetLedger

    def to_record(self, query: MatchQuery, seed: Optional[int] = None) -> dict:
        """Flat serializable record; the field set is the CLI wire contract."""
        record: dict = {"regime": self.regime.value}
        outcome = self.outcome
        if isinstance(outcome, ExistenceOutcome):
            record["answer"] = outcome.answer
            record["witness"] = outcome.witness
        elif isinstance(outcome, CountOutcome):
            record["count"] = outcome.count
            record["witness"] = outcome.witness
        else:
            record["positions"] = list(outcome.positions)
            record["witness"] = outcome.positions[0] if outcome.positions else None
        record.update(
            epsilon=query.epsilon,
            beta=query.beta,
            k=query.k,
            seed=seed,
            budget_max=float(self.ledger.max_spent),
        )
        return record


def _count_from_report(outcome: ReportOutcome) -> CountOutcome:
    positions = outcome.positions
    witness = positions[0] if positions else None
    return CountOutcome(count=len(positions), witness=witness, raw_count=len(positions))


def match_auto(
    text: bytes,
    query: MatchQuery,
    src: NoiseSource,
    variant: str = "auto",
) -> MatchResult:
    """Dispatch on the public pattern, run the selected matcher, and return
    the outcome together with the regime tag and the final budget ledger.

    ``variant`` narrows the output type: ``existence`` always runs the
    existence scan; ``count`` converts a periodic report into its size;
    ``report`` falls back to the trivial reporter when the counting regimes
    were selected (they provide no reporting guarantee). With a fixed seed the
    result is a deterministic function of the inputs.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    _require_text(text, query.m)
    n = len(text)
    decision = dispatch(query.pattern, query.k, n, query.epsilon, query.beta)
    ledger = BudgetLedger(query.epsilon)
    regime = decision.regime

    if variant == "existence":
        outcome: Outcome = existence(text, query, src, ledger)
    elif regime is Regime.PERIODIC_REPORTING:
        assert decision.candidate is not None
        report = report_periodic(text, query, decision.candidate, src, ledger)
        outcome = _count_from_report(report) if variant == "count" else report
    elif regime in (Regime.NON_PERIODIC_COUNTING, Regime.SMALL_K_COUNTING):
        if variant == "report":
            regime = Regime.TRIVIAL_FALLBACK
            outcome = trivial_all(text, query)
        elif regime is Regime.SMALL_K_COUNTING:
            outcome = count_smallk(text, query, decision.effective_k, src, ledger)
        else:
            outcome = count_nonperiodic(text, query, src, ledger)
    else:
        report = trivial_all(text, query)
        outcome = _count_from_report(report) if variant == "count" else report

    ledger.assert_within_cap()
    return MatchResult(regime=regime, decision=decision, outcome=outcome, ledger=ledger)
