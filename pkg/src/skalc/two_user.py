"""One-way trade-off curves for a two-user pmf source.

User 1 summarizes its observation through a stochastic map T given Z_1 and
sends nothing else; the relevant coordinates of a summary are
i_x = I(T; Z_1) and i_y = I(T; Z_2).  Two curves share one candidate set:

* compressed:  best i_y subject to i_x <= alpha (summary budget), and
* constrained: best i_y subject to i_x - i_y <= R (one-way discussion).

Candidates come from a bottleneck-style alternating maximization, batched
over random restarts crossed with a geometric ladder of multipliers, plus
deterministic anchors (constant map, identity, coarsest sufficient
statistic).  Upper concave envelopes over the candidate cloud give the
curve values; witnesses are the best single feasible channels.  Float
arithmetic throughout, so points carry convergence flags, not exactness
claims.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curves import CapacityCurve, upper_concave_envelope
from .errors import ResourceCapError, ValidationError
from .source_model import JointPMF, gacs_korner

__all__ = [
    "ChannelWitness",
    "SweepResult",
    "TwoUserCurvePoint",
    "DualityPoint",
    "DualityReport",
    "run_sweep",
    "compressed_curve_one_sided",
    "constrained_curve_one_way",
    "duality_check",
    "mutual_information",
    "min_sufficient_statistic",
    "one_way_complexity",
    "pmf_matrix",
    "ALPHABET_CAP",
]

ALPHABET_CAP = 16
RESTARTS = 64
MULTIPLIERS = 24
MAX_ITERS = 500
OBJ_TOL = 1e-10
ROW_TOL = 1e-10
FEAS_SLACK = 1e-8
DUALITY_FLAG = 5e-3
REFINE_ROUNDS = 3

_LN2 = math.log(2.0)


def pmf_matrix(p: JointPMF) -> np.ndarray:
    if not isinstance(p, JointPMF):
        raise ValidationError("one-way analysis needs a pmf source")
    if len(p.users) != 2:
        raise ValidationError("one-way analysis needs exactly two users")
    if max(p.alphabets) > ALPHABET_CAP:
        raise ResourceCapError(
            f"alphabet size {max(p.alphabets)} exceeds the cap {ALPHABET_CAP}")
    mat = np.zeros((p.alphabets[0], p.alphabets[1]))
    for outcome, prob in zip(p.outcomes, p.probs):
        mat[outcome[0], outcome[1]] += float(prob)
    return mat


def _entropy_bits(masses) -> float:
    v = np.asarray([m for m in masses if m > 0], dtype=float)
    return float(-(v * np.log(v)).sum() / _LN2) if v.size else 0.0


def mutual_information(p: JointPMF) -> float:
    mat = pmf_matrix(p)
    px = mat.sum(axis=1)
    py = mat.sum(axis=0)
    total = 0.0
    for i in range(mat.shape[0]):
        for j in range(mat.shape[1]):
            v = mat[i, j]
            if v > 0:
                total += v * math.log(v / (px[i] * py[j]))
    return total / _LN2


def min_sufficient_statistic(p: JointPMF) -> tuple[float, tuple[int, ...]]:
    """Coarsest statistic of user 1's symbol that determines its conditional
    on user 2.

    Returns (entropy of the class distribution in bits, label per symbol).
    Symbols with identical conditional rows (within ROW_TOL per entry) share
    a class; zero-mass symbols get fresh labels and no mass.
    """
    mat = pmf_matrix(p)
    px = mat.sum(axis=1)
    reps: list[np.ndarray] = []
    labels: list[int] = []
    for i in range(mat.shape[0]):
        if px[i] <= 0:
            labels.append(-1)
            continue
        row = mat[i] / px[i]
        for li, rep in enumerate(reps):
            if np.abs(row - rep).max() <= ROW_TOL:
                labels.append(li)
                break
        else:
            labels.append(len(reps))
            reps.append(row)
    nxt = len(reps)
    final = []
    for lab in labels:
        if lab < 0:
            final.append(nxt)
            nxt += 1
        else:
            final.append(lab)
    masses: dict[int, float] = {}
    for i, lab in enumerate(final):
        if px[i] > 0:
            masses[lab] = masses.get(lab, 0.0) + px[i]
    return _entropy_bits(masses.values()), tuple(final)


def one_way_complexity(p: JointPMF) -> float:
    """Discussion rate after which the one-way constrained curve is flat:
    entropy of the minimal sufficient statistic minus the mutual
    information.  Nonnegative by the data-processing inequality."""
    value = min_sufficient_statistic(p)[0] - mutual_information(p)
    return max(value, 0.0)


@dataclass(frozen=True)
class ChannelWitness:
    """One candidate summary map: rows are q(t | z1)."""

    matrix: tuple[tuple[float, ...], ...]
    info_x: float
    info_y: float
    converged: bool


@dataclass(frozen=True)
class SweepResult:
    channels: tuple[ChannelWitness, ...]
    compressed: CapacityCurve
    constrained: CapacityCurve
    mutual_info: float
    seed: int


def _channel_scores(q: np.ndarray, px: np.ndarray, pygx: np.ndarray, py: np.ndarray):
    """(i_x, i_y) in nats for a batch of channels q: (N, X, T)."""
    qt = np.einsum("x,nxt->nt", px, q)
    qty = np.einsum("x,nxt,xy->nty", px, q, pygx)
    qt_safe = np.maximum(qt, 1e-300)
    ratio = q / qt_safe[:, None, :]
    ix = np.einsum("x,nxt->n", px, np.where(q > 0, q * np.log(np.maximum(ratio, 1e-300)), 0.0))
    qygt = qty / qt_safe[:, :, None]
    ly = np.log(np.maximum(qygt / np.maximum(py, 1e-300)[None, None, :], 1e-300))
    iy = np.where(qty > 0, qty * ly, 0.0).sum(axis=(1, 2))
    return ix, iy


def _ib_batch(px, pygx, h_row, py, q, beta_flat):
    """Run alternating maximization to a fixed point for each (init, beta).

    Returns the final channels and per-run convergence flags; a run counts
    as converged when its Lagrangian objective moved less than OBJ_TOL in
    the last iteration.
    """
    beta = beta_flat[:, None, None]
    prev_obj = np.full(len(beta_flat), np.inf)
    obj_delta = np.full(len(beta_flat), np.inf)
    for _ in range(MAX_ITERS):
        qt = np.einsum("x,nxt->nt", px, q)
        qty = np.einsum("x,nxt,xy->nty", px, q, pygx)
        qt_safe = np.maximum(qt, 1e-300)
        qygt = qty / qt_safe[:, :, None]
        log_qygt = np.log(np.maximum(qygt, 1e-300))
        cross = np.einsum("xy,nty->nxt", pygx, log_qygt)
        kl = np.maximum(-h_row[None, :, None] - cross, 0.0)
        logits = np.log(qt_safe)[:, None, :] - beta * kl
        logits -= logits.max(axis=2, keepdims=True)
        qn = np.exp(logits)
        qn /= qn.sum(axis=2, keepdims=True)
        q = qn
        ix, iy = _channel_scores(q, px, pygx, py)
        obj = ix - beta_flat * iy
        obj_delta = np.abs(obj - prev_obj)
        prev_obj = obj
        if obj_delta.max() < OBJ_TOL:
            break
    return q, obj_delta < OBJ_TOL


def _chord_multipliers(points, constrained: bool):
    """Multipliers whose Lagrangian optimum cuts between adjacent vertices.

    A chord of slope s on the budget curve is matched by beta = 1/s; on the
    rate-difference curve the same stationarity gives beta = 1 + 1/s.
    """
    out = []
    for (x1, y1), (x2, y2) in zip(points, points[1:]):
        dx = x2 - x1
        dy = y2 - y1
        if dx <= 1e-12 or dy <= 1e-12:
            continue
        s = dy / dx
        out.append(1.0 + 1.0 / s if constrained else 1.0 / s)
    return out


def run_sweep(
    p: JointPMF,
    seed: int = 0,
    restarts: int = RESTARTS,
    multipliers: int = MULTIPLIERS,
) -> SweepResult:
    """Generate the candidate channel cloud and both envelopes.

    One sweep serves both curves; callers evaluating many grid points should
    reuse it.  A geometric multiplier ladder seeds the cloud; the envelope is
    then refined by re-running the maximization at the chord slopes of its
    own vertices, which fills gaps the fixed ladder stepped over (the
    trade-off collapses to the trivial fixed point below a source-dependent
    critical multiplier, so useful multipliers can cluster tightly).
    """
    mat = pmf_matrix(p)
    nx, ny = mat.shape
    nt = nx + 1
    px = mat.sum(axis=1)
    py = mat.sum(axis=0)
    pygx = np.where(px[:, None] > 0, mat / np.maximum(px, 1e-300)[:, None], 1.0 / ny)
    h_row = -(np.where(pygx > 0, pygx * np.log(np.maximum(pygx, 1e-300)), 0.0)).sum(axis=1)

    anchors = np.zeros((3, nx, nt))
    anchors[0, :, 0] = 1.0
    anchors[1, np.arange(nx), np.arange(nx)] = 1.0
    labels = min_sufficient_statistic(p)[1]
    for i, lab in enumerate(labels):
        anchors[2, i, min(lab, nt - 1)] = 1.0

    rng = np.random.default_rng(seed)
    ladder = np.exp2(np.linspace(-10.0, 10.0, multipliers))

    def launch(betas):
        n_runs = restarts * len(betas)
        q0 = rng.random((n_runs, nx, nt))
        q0 /= q0.sum(axis=2, keepdims=True)
        return _ib_batch(px, pygx, h_row, py, q0, np.repeat(betas, restarts))

    batches = [(anchors, np.ones(3, bool))]
    batches.append(launch(ladder))
    probed = [math.log(b) for b in ladder]

    def cloud():
        qs = np.concatenate([b[0] for b in batches], axis=0)
        conv = np.concatenate([b[1] for b in batches])
        ix, iy = _channel_scores(qs, px, pygx, py)
        return qs, conv, np.maximum(ix, 0.0) / _LN2, np.maximum(iy, 0.0) / _LN2

    for _ in range(REFINE_ROUNDS):
        _, _, ix, iy = cloud()
        comp_env = upper_concave_envelope([(0.0, 0.0)] + list(zip(ix, iy)))
        cons_env = upper_concave_envelope(
            [(0.0, 0.0)] + list(zip(np.maximum(ix - iy, 0.0), iy)))
        fresh = []
        for beta in (_chord_multipliers(comp_env.points, False)
                     + _chord_multipliers(cons_env.points, True)):
            if not (2.0 ** -12 <= beta <= 2.0 ** 14):
                continue
            lb = math.log(beta)
            if all(abs(lb - seen) > 0.02 for seen in probed + [math.log(b) for b in fresh]):
                fresh.append(beta)
        if not fresh:
            break
        batches.append(launch(np.array(sorted(fresh))))
        probed.extend(math.log(b) for b in fresh)

    all_q, all_conv, ix, iy = cloud()
    mi = mutual_information(p)
    channels = tuple(
        ChannelWitness(
            tuple(tuple(float(v) for v in row) for row in all_q[k]),
            float(ix[k]),
            float(iy[k]),
            bool(all_conv[k]),
        )
        for k in range(all_q.shape[0])
    )
    comp_pts = [(0.0, 0.0)] + [(c.info_x, c.info_y) for c in channels]
    cons_pts = [(0.0, 0.0)] + [(max(c.info_x - c.info_y, 0.0), c.info_y) for c in channels]
    compressed = upper_concave_envelope(comp_pts)
    constrained = upper_concave_envelope(cons_pts)
    return SweepResult(channels, compressed, constrained, mi, seed)


@dataclass(frozen=True)
class TwoUserCurvePoint:
    x: float
    value: float
    witness: ChannelWitness | None
    converged: bool


def _pick_witness(sweep: SweepResult, budget_of, x: float) -> ChannelWitness | None:
    best = None
    for ch in sweep.channels:
        if budget_of(ch) <= x + FEAS_SLACK:
            if best is None or ch.info_y > best.info_y:
                best = ch
    return best


def compressed_curve_one_sided(
    p: JointPMF,
    alphas: Sequence[float],
    seed: int = 0,
    sweep: SweepResult | None = None,
) -> tuple[TwoUserCurvePoint, ...]:
    """Best one-way key rate per summary-information budget."""
    if sweep is None:
        sweep = run_sweep(p, seed=seed)
    out = []
    for a in alphas:
        a = float(a)
        if a < 0:
            raise ValidationError("budgets must be nonnegative")
        w = _pick_witness(sweep, lambda ch: ch.info_x, a)
        out.append(TwoUserCurvePoint(a, float(sweep.compressed.value_at(a)), w,
                                     w.converged if w else True))
    return tuple(out)


def constrained_curve_one_way(
    p: JointPMF,
    rates: Sequence[float],
    seed: int = 0,
    sweep: SweepResult | None = None,
) -> tuple[TwoUserCurvePoint, ...]:
    """Best one-way key rate per public discussion rate."""
    if sweep is None:
        sweep = run_sweep(p, seed=seed)
    out = []
    for r in rates:
        r = float(r)
        if r < 0:
            raise ValidationError("rates must be nonnegative")
        w = _pick_witness(sweep, lambda ch: max(ch.info_x - ch.info_y, 0.0), r)
        out.append(TwoUserCurvePoint(r, float(sweep.constrained.value_at(r)), w,
                                     w.converged if w else True))
    return tuple(out)


@dataclass(frozen=True)
class DualityPoint:
    alpha: float
    compressed_value: float
    constrained_value: float
    residual: float
    flagged: bool


@dataclass(frozen=True)
class DualityReport:
    points: tuple[DualityPoint, ...]

    @property
    def ok(self) -> bool:
        return not any(pt.flagged for pt in self.points)


def duality_check(
    p: JointPMF,
    alphas: Sequence[float],
    seed: int = 0,
    sweep: SweepResult | None = None,
) -> DualityReport:
    """Residuals of the budget-splitting identity tC(a) = C(a - tC(a)).

    The identity holds once the budget covers the common part both users
    hold outright; smaller budgets are rejected.  Points whose residual
    exceeds DUALITY_FLAG are flagged.
    """
    if sweep is None:
        sweep = run_sweep(p, seed=seed)
    jgk = float(gacs_korner(p))
    points = []
    for alpha in alphas:
        alpha = float(alpha)
        if alpha < jgk - 1e-9:
            raise ValidationError(
                f"budget {alpha} is below the shared common part {jgk}; "
                "the splitting identity needs alpha >= that floor")
        tc = float(sweep.compressed.value_at(alpha))
        c = float(sweep.constrained.value_at(max(alpha - tc, 0.0)))
        resid = abs(tc - c)
        points.append(DualityPoint(alpha, tc, c, resid, resid > DUALITY_FLAG))
    return DualityReport(tuple(points))
