"""Dense tableau simplex over exact rationals.

Solves  min c.x  subject to  A x <= b,  x >= 0  with b >= 0, so the slack
basis is feasible from the start and no phase-1 is needed.  Entering and
leaving variables follow Bland's rule (lowest eligible index), which rules
out cycling.  Everything is Fraction arithmetic; results are exact.

The solution carries the constraint duals, read off the final reduced costs
of the slack columns.  For this minimization form each dual is <= 0 and
equals the sensitivity d(value)/d(b_i).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InternalCheckError, ValidationError

__all__ = ["LpSolution", "simplex_min"]

_MAX_PIVOTS = 200_000


@dataclass(frozen=True)
class LpSolution:
    value: Fraction
    x: tuple[Fraction, ...]
    duals: tuple[Fraction, ...]


def simplex_min(
    c: Sequence[Fraction],
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
) -> LpSolution:
    """Minimize c.x over {A x <= b, x >= 0}; requires b >= 0."""
    n = len(c)
    m = len(rows)
    if len(rhs) != m or any(len(r) != n for r in rows):
        raise ValidationError("inconsistent LP dimensions")
    b = [Fraction(v) for v in rhs]
    if any(v < 0 for v in b):
        raise ValidationError("simplex_min needs nonnegative right-hand sides")

    # Tableau columns: n structural, m slack, then the rhs.
    width = n + m + 1
    tab = []
    for i, row in enumerate(rows):
        line = [Fraction(v) for v in row] + [Fraction(0)] * m + [b[i]]
        line[n + i] = Fraction(1)
        tab.append(line)
    obj = [Fraction(v) for v in c] + [Fraction(0)] * (m + 1)
    basis = list(range(n, n + m))

    for _ in range(_MAX_PIVOTS):
        enter = -1
        for j in range(n + m):
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][width - 1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            raise InternalCheckError("LP is unbounded below")
        piv = tab[leave][enter]
        prow = tab[leave]
        if piv != 1:
            for j in range(width):
                prow[j] /= piv
        for i in range(m):
            if i == leave:
                continue
            f = tab[i][enter]
            if f:
                line = tab[i]
                for j in range(width):
                    if prow[j]:
                        line[j] -= f * prow[j]
        f = obj[enter]
        if f:
            for j in range(width):
                if prow[j]:
                    obj[j] -= f * prow[j]
        basis[leave] = enter
    else:
        raise InternalCheckError("simplex pivot budget exhausted")

    x = [Fraction(0)] * (n + m)
    for i, var in enumerate(basis):
        x[var] = tab[i][width - 1]
    value = sum((ci * xi for ci, xi in zip(c, x[:n])), Fraction(0))
    # Reduced cost of slack i is -dual_i (slack has zero objective weight).
    duals = tuple(-obj[n + i] for i in range(m))
    return LpSolution(value, tuple(x[:n]), duals)
