"""Tiny GF(2) linear algebra on rows stored as int bitmasks.

Bit k of a row is the coefficient of variable k.  Everything the protocol
simulator needs reduces to rank and span queries, so a row-reduced basis
keyed by pivot position is all we keep.
"""

from __future__ import annotations

from typing import Iterable

__all__ = ["Gf2Basis", "rank", "complement_units"]


class Gf2Basis:
    """Mutable basis; rows kept reduced against each other (pivot per row)."""

    __slots__ = ("_rows",)

    def __init__(self, rows: Iterable[int] = ()):  # rows: int bitmasks
        self._rows: dict[int, int] = {}
        for r in rows:
            self.add(r)

    def reduce(self, v: int) -> int:
        rows = self._rows
        while v:
            p = v.bit_length() - 1
            r = rows.get(p)
            if r is None:
                return v
            v ^= r
        return 0

    def add(self, v: int) -> bool:
        """Insert v; False if it was already in the span."""
        v = self.reduce(v)
        if not v:
            return False
        p = v.bit_length() - 1
        # back-eliminate so reduce() stays a single downward sweep
        for q, r in self._rows.items():
            if r >> p & 1:
                self._rows[q] = r ^ v
        self._rows[p] = v
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    @property
    def rank(self) -> int:
        return len(self._rows)

    def copy(self) -> "Gf2Basis":
        b = Gf2Basis()
        b._rows = dict(self._rows)
        return b


def rank(rows: Iterable[int]) -> int:
    return Gf2Basis(rows).rank


def complement_units(basis: Gf2Basis, width: int) -> list[int]:
    """Unit vectors that extend the basis to the full space, low bit first."""
    b = basis.copy()
    out = []
    for k in range(width):
        if b.add(1 << k):
            out.append(1 << k)
    return out
