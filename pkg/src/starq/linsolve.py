"""Incremental exact linear solving over the rationals.

Columns are added one at a time as sparse vectors over arbitrary orderable
row keys.  The reducer keeps a column echelon form with unit leading
entries and, for every pivot, the combination of original columns that
produced it.  Solving expresses a right-hand side in the added columns
using pivot columns only, so columns that arrived linearly dependent never
appear in a solution: their coefficients stay zero.  All arithmetic is in
Fraction, so results are exact and independence decisions are never
approximate.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping

Vector = dict[Hashable, Fraction]


def _axpy(target: Vector, coeff: Fraction, source: Mapping) -> None:
    """target -= coeff * source, dropping cancelled entries."""
    for key, value in source.items():
        new = target.get(key, Fraction(0)) - coeff * value
        if new:
            target[key] = new
        else:
            target.pop(key, None)


class ColumnReducer:
    """Column echelon with combination tracking over exact rationals."""

    def __init__(self):
        # lead row key -> (unit-lead vector, combination over column keys)
        self.pivots: dict[Hashable, tuple[Vector, Vector]] = {}
        self.column_keys: list[Hashable] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _reduce(self, vec: Vector, combo: Vector) -> Vector:
        """Eliminate vec against pivots.

        Invariant: vec + columns.combo is unchanged, where columns.combo is
        the combination of original columns with the coefficients in combo.
        """
        while vec:
            lead = min(vec)
            hit = self.pivots.get(lead)
            if hit is None:
                break
            coeff = vec.pop(lead)
            pivot_vec, pivot_combo = hit
            _axpy(vec, coeff, {k: v for k, v in pivot_vec.items() if k != lead})
            _axpy(combo, -coeff, pivot_combo)
        return vec

    def add_column(self, key: Hashable, vec: Mapping) -> bool:
        """Insert a column; returns False when it is dependent on earlier ones."""
        self.column_keys.append(key)
        work: Vector = {k: Fraction(v) for k, v in vec.items() if v}
        # start from vec + columns.{key: -1} == 0 so the invariant gives the
        # reduced vector as a combination of original columns at the end
        combo: Vector = {key: Fraction(-1)}
        work = self._reduce(work, combo)
        if not work:
            return False
        lead = min(work)
        inv = 1 / work[lead]
        unit = {k: v * inv for k, v in work.items()}
        self.pivots[lead] = (unit, {k: -v * inv for k, v in combo.items()})
        return True

    def solve(self, rhs: Mapping) -> Vector | None:
        """Coefficients over column keys reproducing rhs, or None if outside
        the span.  Dependent columns are never used."""
        work: Vector = {k: Fraction(v) for k, v in rhs.items() if v}
        combo: Vector = {}
        work = self._reduce(work, combo)
        if work:
            return None
        return {k: v for k, v in combo.items() if v}

    def residual(self, rhs: Mapping) -> Vector:
        """Part of rhs outside the span of the added columns."""
        work: Vector = {k: Fraction(v) for k, v in rhs.items() if v}
        return self._reduce(work, {})
