"""Sorted multi-indices over the coordinate directions 1, 2, 3.

A multi-index is a tuple of coordinate labels, kept sorted ascending so that
the symmetry of mixed partial derivatives is structural: two derivative
orders that agree as multisets are the same tuple.  The empty tuple stands
for "no derivative" and appears transiently inside the Hochschild coboundary
before terms recombine.
"""

from __future__ import annotations

import itertools
from math import comb
from typing import Iterator

MultiIndex = tuple[int, ...]

DIRECTIONS = (1, 2, 3)

EMPTY: MultiIndex = ()


def mi(*indices: int) -> MultiIndex:
    """Build a multi-index, validating entries and sorting them."""
    for a in indices:
        if a not in DIRECTIONS:
            raise ValueError(f"coordinate label out of range: {a!r}")
    return tuple(sorted(indices))


def is_valid(index: MultiIndex) -> bool:
    return all(a in DIRECTIONS for a in index) and tuple(sorted(index)) == index


def merge(left: MultiIndex, right: MultiIndex) -> MultiIndex:
    """Multiset union of two multi-indices."""
    return tuple(sorted(left + right))


def multiplicities(index: MultiIndex) -> tuple[int, int, int]:
    return (index.count(1), index.count(2), index.count(3))


def format_index(index: MultiIndex) -> str:
    """Digit string, e.g. (1, 1, 2) -> "112"; empty index -> ""."""
    return "".join(str(a) for a in index)


def parse_index(text: str) -> MultiIndex:
    if not text:
        return EMPTY
    if not text.isdigit():
        raise ValueError(f"malformed multi-index {text!r}")
    return mi(*(int(ch) for ch in text))


def binary_splits(index: MultiIndex) -> Iterator[tuple[MultiIndex, MultiIndex, int]]:
    """Ordered two-part multiset splits of ``index`` with multiplicity.

    Yields (left, right, count) where count is the number of ways to pick
    which individual derivatives go left, i.e. the product of binomial
    coefficients per direction.  This is the Leibniz expansion of a repeated
    derivative applied to a product of two factors.
    """
    mults = multiplicities(index)
    choices = [range(m + 1) for m in mults]
    for take in itertools.product(*choices):
        count = 1
        left: list[int] = []
        right: list[int] = []
        for d, m, t in zip(DIRECTIONS, mults, take):
            count *= comb(m, t)
            left.extend([d] * t)
            right.extend([d] * (m - t))
        yield tuple(left), tuple(right), count


def splits(index: MultiIndex, parts: int) -> Iterator[tuple[tuple[MultiIndex, ...], int]]:
    """Ordered multiset splits of ``index`` into ``parts`` pieces.

    Yields (pieces, count) with the multinomial multiplicity, i.e. the number
    of assignments of the individual derivatives realizing those pieces.
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    mults = multiplicities(index)
    per_direction = [list(_compositions(m, parts)) for m in mults]
    for combo in itertools.product(*per_direction):
        count = 1
        pieces: list[list[int]] = [[] for _ in range(parts)]
        for d, m, (composition, ways) in zip(DIRECTIONS, mults, combo):
            count *= ways
            for p, c in enumerate(composition):
                pieces[p].extend([d] * c)
        yield tuple(tuple(p) for p in pieces), count


def _compositions(total: int, parts: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Compositions of ``total`` into ``parts`` non-negative summands.

    Each composition comes with the multinomial count total!/(c_1!...c_k!).
    """
    if parts == 1:
        yield (total,), 1
        return
    for first in range(total + 1):
        ways_first = comb(total, first)
        for rest, ways_rest in _compositions(total - first, parts - 1):
            yield (first,) + rest, ways_first * ways_rest


def all_indices(length: int) -> list[MultiIndex]:
    """All sorted multi-indices of the given length."""
    return [tuple(c) for c in itertools.combinations_with_replacement(DIRECTIONS, length)]


def indices_up_to(length: int) -> list[MultiIndex]:
    out: list[MultiIndex] = []
    for n in range(length + 1):
        out.extend(all_indices(n))
    return out
