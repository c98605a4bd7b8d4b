"""Byte-string primitives: Hamming distances, exact matching oracles, and the
overlapping window decompositions used by the private matchers.

Texts and patterns are plain ``bytes``; the alphabet is the full byte range.
All functions here are pure and deterministic, so they double as the
non-private reference oracles for the randomized matchers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# Below this many byte comparisons the pure-Python path beats numpy call
# overhead (relevant for the audit harness, which runs millions of tiny scans).
_NUMPY_CUTOFF = 4096

# Rows of the sliding-window matrix materialized per chunk; bounds peak memory
# at roughly 64 KiB of comparisons regardless of text length.
_CHUNK_COMPARISONS = 65536


def hamming_distance(a: bytes, b: bytes) -> int:
    """Number of positions where ``a`` and ``b`` differ.

    Raises:
        ValueError: if the inputs have different lengths.
    """
    if len(a) != len(b):
        raise ValueError(
            f"hamming_distance requires equal lengths, got {len(a)} and {len(b)}"
        )
    if len(a) >= _NUMPY_CUTOFF:
        return int(
            np.count_nonzero(np.frombuffer(a, np.uint8) != np.frombuffer(b, np.uint8))
        )
    return sum(x != y for x, y in zip(a, b))


def iter_sliding_distances(text: bytes, pattern: bytes) -> Iterator[int]:
    """Lazily yield the Hamming distance of ``pattern`` at every start position.

    Equivalent to iterating :func:`sliding_distances` but computes distances in
    bounded chunks, so consumers that stop early (noisy threshold scans) do not
    pay for the rest of the text.
    """
    n, m = len(text), len(pattern)
    if m < 1:
        raise ValueError("pattern must be non-empty")
    if m > n:
        raise ValueError(f"pattern length {m} exceeds text length {n}")
    count = n - m + 1
    if count * m <= _NUMPY_CUTOFF:
        for i in range(count):
            window = text[i : i + m]
            yield sum(x != y for x, y in zip(window, pattern))
        return
    tv = np.frombuffer(text, np.uint8)
    pv = np.frombuffer(pattern, np.uint8)
    chunk = max(1, _CHUNK_COMPARISONS // m)
    for start in range(0, count, chunk):
        stop = min(start + chunk, count)
        windows = sliding_window_view(tv[start : stop + m - 1], m)
        yield from (windows != pv).sum(axis=1).tolist()


def sliding_distances(text: bytes, pattern: bytes) -> list[int]:
    """Hamming distance of ``pattern`` against every length-m window of ``text``.

    Entry ``i`` equals ``hamming_distance(text[i:i+m], pattern)``; the result
    has ``n - m + 1`` entries.

    Raises:
        ValueError: if the pattern is empty or longer than the text.
    """
    return list(iter_sliding_distances(text, pattern))


def exact_count(text: bytes, pattern: bytes, x: int) -> int:
    """Number of start positions whose window is within distance ``x``."""
    if not 0 <= x <= len(pattern):
        raise ValueError(f"distance threshold {x} outside [0, {len(pattern)}]")
    return sum(1 for d in iter_sliding_distances(text, pattern) if d <= x)


def exact_report(text: bytes, pattern: bytes, x: int) -> set[int]:
    """Set of start positions whose window is within distance ``x``."""
    if not 0 <= x <= len(pattern):
        raise ValueError(f"distance threshold {x} outside [0, {len(pattern)}]")
    return {i for i, d in enumerate(iter_sliding_distances(text, pattern)) if d <= x}


def reverse(text: bytes) -> bytes:
    """The byte-wise reversal of ``text``."""
    return text[::-1]


def tile(unit: bytes, length: int) -> bytes:
    """``unit`` repeated and clipped to exactly ``length`` bytes."""
    if len(unit) < 1:
        raise ValueError("unit must be non-empty")
    if length < 0:
        raise ValueError("length must be non-negative")
    reps = -(-length // len(unit))
    return (unit * reps)[:length]


@dataclass(frozen=True)
class WindowFamily:
    """An ordered cover of ``[0, n-1]`` by closed index intervals.

    Two kinds are produced:

    * ``periodic-cover``: stride ``floor(m/2)`` windows of length
      ``floor(3m/2) - 1``; every position lies in at most 3 windows.
    * ``counting-cover``: stride ``m`` windows of length ``2m - 1``; every
      position lies in at most 2 windows.

    Both kinds guarantee that every length-m interval is contained in exactly
    one window, which is what lets per-window privacy losses compose to the
    query budget.
    """

    windows: tuple[tuple[int, int], ...]
    kind: str

    MULTIPLICITY = {"periodic-cover": 3, "counting-cover": 2}

    def validate(self, n: int, m: int) -> None:
        """Check every structural invariant; raises ValueError on violation."""
        if self.kind not in self.MULTIPLICITY:
            raise ValueError(f"unknown window family kind {self.kind!r}")
        if not self.windows:
            raise ValueError("window family is empty")
        covered = [0] * n
        for a, b in self.windows:
            if not (0 <= a <= b <= n - 1):
                raise ValueError(f"window [{a}, {b}] outside [0, {n - 1}]")
            for p in range(a, b + 1):
                covered[p] += 1
        if any(c == 0 for c in covered):
            raise ValueError("windows do not cover [0, n-1]")
        bound = self.MULTIPLICITY[self.kind]
        if max(covered) > bound:
            raise ValueError(
                f"position multiplicity {max(covered)} exceeds {bound} for {self.kind}"
            )
        for (a1, b1), (a2, b2) in zip(self.windows, self.windows[1:]):
            overlap = min(b1, b2) - max(a1, a2) + 1
            if overlap > m - 1:
                raise ValueError(
                    f"consecutive windows overlap by {overlap} > m-1 = {m - 1}"
                )
        for i in range(n - m + 1):
            containing = sum(
                1 for a, b in self.windows if a <= i and i + m - 1 <= b
            )
            if containing != 1:
                raise ValueError(
                    f"occurrence interval [{i}, {i + m - 1}] lies in "
                    f"{containing} windows, expected exactly 1"
                )


def _dedupe(windows: list[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    seen: dict[tuple[int, int], None] = {}
    for w in windows:
        seen.setdefault(w)
    return tuple(seen)


def periodic_cover(n: int, m: int) -> WindowFamily:
    """Stride-``floor(m/2)`` cover used by the periodic-case reporter.

    Windows start at ``j * floor(m/2)`` and span ``floor(3m/2) - 1`` positions
    (clipped to the text), followed by a tail window reaching ``n - 1``.
    Consecutive windows overlap by ``m - 1``, so each pattern occurrence is
    contained in exactly one window and each position in at most three.

    Raises:
        ValueError: if ``m > n`` or ``m < 2`` (stride would degenerate).
    """
    if m < 2:
        raise ValueError(f"periodic cover needs m >= 2, got m={m}")
    if m > n:
        raise ValueError(f"pattern length {m} exceeds text length {n}")
    stride = m // 2
    length = (3 * m) // 2 - 1
    tail_index = (n - m) // stride
    windows = [
        (j * stride, min(j * stride + length - 1, n - 1)) for j in range(tail_index)
    ]
    windows.append((tail_index * stride, n - 1))
    return WindowFamily(_dedupe(windows), "periodic-cover")


def counting_cover(n: int, m: int) -> WindowFamily:
    """Stride-``m`` cover used by the non-periodic counter.

    Windows span ``[j*m, (j+2)*m - 2]`` plus a tail reaching ``n - 1``; each
    pattern occurrence is contained in exactly one window and each position in
    at most two.

    Raises:
        ValueError: if ``m > n`` or ``m < 1``.
    """
    if m < 1:
        raise ValueError(f"window cover needs m >= 1, got m={m}")
    if m > n:
        raise ValueError(f"pattern length {m} exceeds text length {n}")
    blocks = (n + 1) // m
    windows = [(j * m, (j + 2) * m - 2) for j in range(blocks - 1)]
    tail_start = (blocks - 1) * m
    if tail_start <= n - 1:
        windows.append((tail_start, n - 1))
    return WindowFamily(_dedupe(windows), "counting-cover")
