"""Bounds and exact curves for the key rate under an entropy budget.

The central object is the compressed-secrecy trade-off: the best key rate
when the users may first reduce their joint observation to at most ``alpha``
bits of entropy.  For pairwise-shared-bit sources (PINs) the trade-off is
known exactly and both curves here are closed forms.  In general we compute:

* a decremental lower bound: restrict each edge to a retained fraction,
  score the restricted source by its partition-based mutual information,
  and take the best value under the entropy budget.  Maximizing over
  fractional retentions is an exact rational LP (partition constraints,
  box constraints, one budget row); the full curve in ``alpha`` is
  reconstructed breakpoint-by-breakpoint from LP values and duals.
  Plain 0/1 edge subsets are enumerated as well: they supply readable
  witnesses and a cross-check, but mixing subsets alone can undershoot
  (a two-edge star with weights 1 and 2 already needs a half-retained
  edge), which is why the LP search is the authority.
* a floor from the common part all users share outright, and
* an upper bound transferred from any valid bound on the
  rate-constrained capacity via the budget-splitting inequality
  tC(alpha) <= C(alpha - tC(alpha)).

``sandwich`` evaluates all of these on a grid and flags where the bounds
pinch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .curves import CapacityCurve, upper_concave_envelope
from .errors import InternalCheckError, ResourceCapError, ValidationError
from .lp import simplex_min
from .mmi import iter_partitions, mmi
from .source_model import (
    EdgeRestriction,
    HypergraphicalSource,
    SourceSpec,
    gacs_korner,
    is_pin,
)

__all__ = [
    "PinCurves",
    "LowerBoundWitness",
    "LowerBoundResult",
    "pin_curves",
    "lower_bound_curve",
    "witness_at",
    "gk_floor",
    "duality_upper_bound",
    "alpha_s_lower_bound",
    "SandwichRow",
    "SandwichResult",
    "sandwich",
    "EDGE_CAP",
    "LB_USER_CAP",
]

EDGE_CAP = 20
LB_USER_CAP = 8
_SUBSET_OP_BUDGET = 2_000_000


@dataclass(frozen=True)
class PinCurves:
    """Exact trade-off curves for a pairwise source on >= 3 users."""

    compressed: CapacityCurve
    constrained: CapacityCurve
    cap: Fraction
    alpha_s: Fraction
    r_s: Fraction


def pin_curves(source: HypergraphicalSource) -> PinCurves:
    """Closed-form curves min(alpha/(n-1), cap) and min(R/(n-2), cap).

    Requires a PIN on at least three users; with two users the one-way
    two_user module covers the trade-off instead.
    """
    if not is_pin(source):
        raise ValidationError("pin_curves needs a source with all edges on exactly two users")
    n = len(source.users)
    if n < 3:
        raise ValidationError(
            "constrained curve is degenerate for two users; use the two_user module"
        )
    cap = mmi(source).value
    alpha_s = (n - 1) * cap
    r_s = (n - 2) * cap
    zero = Fraction(0)
    if cap == 0:
        flat = CapacityCurve(((zero, zero),))
        return PinCurves(flat, flat, cap, alpha_s, r_s)
    compressed = CapacityCurve(((zero, zero), (alpha_s, cap)))
    constrained = CapacityCurve(((zero, zero), (r_s, cap)))
    return PinCurves(compressed, constrained, cap, alpha_s, r_s)


@dataclass(frozen=True)
class LowerBoundWitness:
    """Mixture of edge restrictions certifying one point of the lower bound.

    Each component is (mixture weight, restriction, value, entropy); weights
    sum to one and the mixed entropy stays within the budget at which the
    witness was requested.
    """

    components: tuple[tuple[Fraction, EdgeRestriction, Fraction, Fraction], ...]

    def mixed_value(self) -> Fraction:
        return sum((w * v for w, _, v, _ in self.components), Fraction(0))

    def mixed_entropy(self) -> Fraction:
        return sum((w * h for w, _, _, h in self.components), Fraction(0))


@dataclass(frozen=True)
class LowerBoundResult:
    curve: CapacityCurve
    witnesses: Mapping[tuple[Fraction, Fraction], LowerBoundWitness]


def _partition_coefficients(source: HypergraphicalSource):
    """Per-partition linear forms: I_P(f) = sum_e coeff[P][e] * f_e."""
    n = len(source.users)
    emasks = source.edge_masks()
    weights = source.weights
    coeffs = []
    nblocks_of = []
    for labels in iter_partitions(n):
        nb = max(labels) + 1
        if nb < 2:
            continue
        block_masks = [0] * nb
        for i, lab in enumerate(labels):
            block_masks[lab] |= 1 << i
        denom = nb - 1
        row = []
        for emask, w in zip(emasks, weights):
            touched = sum(1 for bm in block_masks if bm & emask)
            row.append(w * (touched - 1) / denom)
        coeffs.append(tuple(row))
        nblocks_of.append(nb)
    return coeffs, nblocks_of


def _dot(row: Sequence[Fraction], f: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for a, b in zip(row, f):
        if a and b:
            total += a * b
    return total


def _best_restriction(
    coeffs: list[tuple[Fraction, ...]],
    weights: Sequence[Fraction],
    alpha: Fraction,
    seed_active: list[int],
):
    """Maximize min_P I_P(f) s.t. H(f) <= alpha, 0 <= f <= 1.

    Cutting-plane loop: solve with a working set of partition constraints,
    then add the most violated partition until none is violated.  Returns
    (value, f, slope) where slope is a subgradient of the value in alpha,
    taken from the budget-row dual.
    """
    m = len(weights)
    active = list(seed_active)
    for _ in range(len(coeffs) + 2):
        rows = []
        rhs = []
        for p in active:
            rows.append([Fraction(1)] + [-cf for cf in coeffs[p]])
            rhs.append(Fraction(0))
        budget_row = len(rows)
        rows.append([Fraction(0)] + [Fraction(w) for w in weights])
        rhs.append(alpha)
        for e in range(m):
            box = [Fraction(0)] * (m + 1)
            box[1 + e] = Fraction(1)
            rows.append(box)
            rhs.append(Fraction(1))
        c = [Fraction(-1)] + [Fraction(0)] * m
        sol = simplex_min(c, rows, rhs)
        t_star = sol.x[0]
        f_star = sol.x[1:]
        worst_p = -1
        worst = None
        for p, row in enumerate(coeffs):
            val = _dot(row, f_star)
            if worst is None or val < worst:
                worst = val
                worst_p = p
        if worst is not None and worst < t_star:
            active.append(worst_p)
            continue
        slope = -sol.duals[budget_row]
        return t_star, tuple(f_star), slope
    raise InternalCheckError("cutting-plane loop failed to converge")


def _reconstruct_curve(evaluate: Callable, a_lo: Fraction, a_hi: Fraction):
    """Recover all breakpoints of the concave LP value function exactly.

    Each evaluation yields the value and a supporting line (via the dual
    slope).  Where the supporting lines at the interval ends disagree, probe
    their intersection: either it lies on both lines (a breakpoint) or it
    splits the interval with a fresh supporting line.
    """
    store: dict[Fraction, tuple] = {}

    def ev(a: Fraction):
        if a not in store:
            store[a] = evaluate(a)
        return store[a]

    def line(a0, v0, s0, a):
        return v0 + s0 * (a - a0)

    def rec(a1, a2, depth):
        if depth > 200:
            raise InternalCheckError("curve reconstruction recursion too deep")
        v1, _, s1 = ev(a1)
        v2, _, s2 = ev(a2)
        if line(a1, v1, s1, a2) == v2 or line(a2, v2, s2, a1) == v1:
            return
        if s1 == s2:
            raise InternalCheckError("parallel supporting lines with a gap")
        a_star = (v1 - v2 + s2 * a2 - s1 * a1) / (s2 - s1)
        if not a1 < a_star < a2:
            raise InternalCheckError("supporting-line intersection left the bracket")
        v_star, _, _ = ev(a_star)
        if v_star == line(a1, v1, s1, a_star):
            return
        rec(a1, a_star, depth + 1)
        rec(a_star, a2, depth + 1)

    ev(a_lo)
    if a_hi > a_lo:
        ev(a_hi)
        rec(a_lo, a_hi, 0)
    return store


def _enumerate_subsets(source: HypergraphicalSource, coeffs):
    """All 0/1 edge subsets as (entropy, value, mask) points, Gray-code order.

    Skipped (returns None) when 2^|E| times the partition count would blow
    the operation budget; the LP search already determines the curve.
    """
    m = len(source.weights)
    if m > EDGE_CAP:
        raise ResourceCapError(f"{m} edges exceed the subset enumeration cap {EDGE_CAP}")
    if (1 << m) * max(1, len(coeffs)) > _SUBSET_OP_BUDGET:
        return None
    weights = source.weights
    vals = [Fraction(0)] * len(coeffs)
    h = Fraction(0)
    mask = 0
    points = [(Fraction(0), Fraction(0), 0)]
    for i in range(1, 1 << m):
        bit = (i & -i).bit_length() - 1
        mask ^= 1 << bit
        sign = 1 if mask >> bit & 1 else -1
        h += sign * weights[bit]
        for p, row in enumerate(coeffs):
            cf = row[bit]
            if cf:
                vals[p] += sign * cf
        points.append((h, min(vals) if vals else Fraction(0), mask))
    return points


def _restriction_from_fractions(source: HypergraphicalSource, f: Sequence[Fraction]) -> EdgeRestriction:
    return EdgeRestriction({eid: Fraction(fe) for eid, fe in zip(source.edge_ids, f)})


def _restriction_from_mask(source: HypergraphicalSource, mask: int) -> EdgeRestriction:
    return EdgeRestriction(
        {eid: Fraction(1 if mask >> k & 1 else 0) for k, eid in enumerate(source.edge_ids)}
    )


def lower_bound_curve(source: HypergraphicalSource, cap: int = LB_USER_CAP) -> LowerBoundResult:
    """Best decremental key rate as a function of the entropy budget.

    Returns the exact concave piecewise-linear curve together with a witness
    restriction per breakpoint.  Witnesses prefer plain edge subsets when one
    attains the breakpoint; otherwise they carry the fractional retention
    found by the LP.
    """
    if not isinstance(source, HypergraphicalSource):
        raise ValidationError("lower_bound_curve needs a hypergraphical source")
    n = len(source.users)
    if n > LB_USER_CAP:
        raise ResourceCapError(f"{n} users exceed the lower-bound cap {LB_USER_CAP}")
    if len(source.weights) > EDGE_CAP:
        raise ResourceCapError(f"{len(source.weights)} edges exceed cap {EDGE_CAP}")
    zero = Fraction(0)
    if not source.weights:
        curve = CapacityCurve(((zero, zero),))
        witness = LowerBoundWitness(((Fraction(1), EdgeRestriction({}), zero, zero),))
        return LowerBoundResult(curve, {(zero, zero): witness})

    coeffs, _ = _partition_coefficients(source)
    h_full = source.total_entropy()
    ones = tuple(Fraction(1) for _ in source.weights)
    full_vals = [_dot(row, ones) for row in coeffs]
    seed = [min(range(len(coeffs)), key=lambda p: full_vals[p])]

    def evaluate(alpha: Fraction):
        return _best_restriction(coeffs, source.weights, alpha, seed)

    store = _reconstruct_curve(evaluate, zero, h_full)
    curve = upper_concave_envelope([(a, v) for a, (v, _, _) in store.items()])

    subset_points = _enumerate_subsets(source, coeffs)
    subset_at: dict[tuple[Fraction, Fraction], int] = {}
    if subset_points is not None:
        for h, v, mask in subset_points:
            if v > curve.value_at(h):
                raise InternalCheckError(
                    f"edge subset {mask:b} beats the LP envelope at entropy {h}"
                )
            key = (h, v)
            if key not in subset_at or mask < subset_at[key]:
                subset_at[key] = mask

    witnesses = {}
    for x, y in curve.points:
        if (x, y) in subset_at:
            restriction = _restriction_from_mask(source, subset_at[(x, y)])
            entropy_used = x
        else:
            rec = store.get(x)
            if rec is None or rec[0] != y:
                raise InternalCheckError(f"no witness evaluation stored for breakpoint {(x, y)}")
            f = rec[1]
            restriction = _restriction_from_fractions(source, f)
            entropy_used = sum((w * fe for w, fe in zip(source.weights, f)), zero)
        witnesses[(x, y)] = LowerBoundWitness(((Fraction(1), restriction, y, entropy_used),))
    return LowerBoundResult(curve, witnesses)


def witness_at(result: LowerBoundResult, alpha: Fraction) -> LowerBoundWitness:
    """Witness for the curve value at an arbitrary budget: at most two
    breakpoint restrictions mixed so the average entropy meets the budget."""
    alpha = Fraction(alpha)
    if alpha < 0:
        raise ValidationError("budget must be nonnegative")
    pts = result.curve.points
    if alpha >= pts[-1][0]:
        return result.witnesses[pts[-1]]
    for pt in pts:
        if pt[0] == alpha:
            return result.witnesses[pt]
    idx = max(i for i, p in enumerate(pts) if p[0] < alpha)
    left, right = pts[idx], pts[idx + 1]
    lam = (right[0] - alpha) / (right[0] - left[0])
    (wl,) = result.witnesses[left].components
    (wr,) = result.witnesses[right].components
    return LowerBoundWitness(
        (
            (lam, wl[1], wl[2], wl[3]),
            (1 - lam, wr[1], wr[2], wr[3]),
        )
    )


def gk_floor(source: SourceSpec, alpha):
    """Floor min(alpha, common randomness shared by all users)."""
    if alpha < 0:
        raise ValidationError("budget must be nonnegative")
    jgk = gacs_korner(source)
    return min(alpha, jgk)


def duality_upper_bound(cs_upper: CapacityCurve, cap, alpha):
    """Largest g in [0, min(alpha, cap)] with g <= cs_upper(alpha - g).

    Splitting the entropy budget between the key and the discussion turns
    any valid bound on the rate-constrained capacity into a budget-domain
    bound.  The crossing is solved exactly on the piecewise-linear curve.
    """
    if alpha < 0:
        raise ValidationError("budget must be nonnegative")
    hi = min(alpha, cap)
    if hi <= 0:
        return hi * 0
    if hi <= cs_upper.value_at(alpha - hi):
        return hi
    # g -> U(alpha - g) - g strictly decreases, is >= 0 at g = 0 and < 0 at
    # hi, so a unique crossing lies in one linear piece of the curve.
    candidates = {alpha - x for x, _ in cs_upper.points}
    grid = sorted({g for g in candidates if 0 < g < hi} | {hi * 0, hi})
    lo = grid[0]
    for g in grid[1:]:
        if g <= cs_upper.value_at(alpha - g):
            lo = g
        else:
            u_lo = cs_upper.value_at(alpha - lo)
            u_hi = cs_upper.value_at(alpha - g)
            slope = (u_hi - u_lo) / (g - lo)
            crossing = (u_lo - slope * lo) / (1 - slope)
            return crossing
    raise InternalCheckError("no crossing found for the duality bound")


def alpha_s_lower_bound(cs_upper: CapacityCurve, cap):
    """Bound r_s + cap on the budget needed to saturate, where r_s is the
    smallest rate at which the supplied curve reaches the cap.  None when the
    curve never gets there."""
    if cs_upper.cap() < cap:
        return None
    for (x1, y1), (x2, y2) in zip(cs_upper.points, cs_upper.points[1:]):
        if y2 >= cap:
            slope = (y2 - y1) / (x2 - x1)
            r_sat = x1 if y1 >= cap else x1 + (cap - y1) / slope
            return r_sat + cap
    # single breakpoint curve already at cap
    return cs_upper.points[0][0] + cap


@dataclass(frozen=True)
class SandwichRow:
    alpha: Fraction
    lower: Fraction | float
    upper: Fraction | float
    tight: bool


@dataclass(frozen=True)
class SandwichResult:
    rows: tuple[SandwichRow, ...]
    cap: Fraction
    gk: Fraction
    inferred_alpha_s: Fraction | None


def sandwich(
    source: HypergraphicalSource,
    alphas: Sequence[Fraction],
    cs_upper: CapacityCurve | None = None,
) -> SandwichResult:
    """Evaluate the best lower and upper bounds on the compressed capacity.

    lower = max(decremental curve, common-part floor); upper = min(budget,
    cap, transferred discussion-rate bound).  Rows are flagged tight where
    they coincide (exactly in rational arithmetic, to 1e-9 when a float
    curve is supplied).
    """
    if not alphas:
        raise ValidationError("the budget grid must not be empty")
    cap = mmi(source).value
    lb = lower_bound_curve(source)
    jgk = gacs_korner(source)
    rows = []
    for alpha in alphas:
        alpha = Fraction(alpha)
        if alpha < 0:
            raise ValidationError("grid budgets must be nonnegative")
        lower = max(lb.curve.value_at(alpha), min(alpha, jgk))
        upper = min(alpha, cap)
        if cs_upper is not None:
            upper = min(upper, duality_upper_bound(cs_upper, cap, alpha))
        exact = isinstance(lower, Fraction) and isinstance(upper, Fraction)
        gap = upper - lower
        if gap < (0 if exact else -1e-9):
            raise InternalCheckError(f"bounds crossed at alpha={alpha}: {lower} > {upper}")
        rows.append(SandwichRow(alpha, lower, upper, gap <= (0 if exact else 1e-9)))
    inferred = lb.curve.saturation_x() if lb.curve.cap() == cap else None
    return SandwichResult(tuple(rows), cap, jgk, inferred)
