"""Shared brute-force oracles for the test suite.

These deliberately avoid the library's own implementations so that the
equivalence tests stay two-sided.
"""

from itertools import product


def brute_hamming(a: bytes, b: bytes) -> int:
    assert len(a) == len(b)
    return sum(1 for x, y in zip(a, b) if x != y)


def brute_sliding(text: bytes, pattern: bytes) -> list[int]:
    m = len(pattern)
    return [
        brute_hamming(text[i : i + m], pattern) for i in range(len(text) - m + 1)
    ]


def brute_first_at_most(text: bytes, pattern: bytes, thresh: float):
    for i, d in enumerate(brute_sliding(text, pattern)):
        if d <= thresh:
            return i
    return None


def binary_strings(length: int):
    for symbols in product(b"ab", repeat=length):
        yield bytes(symbols)
