import math
import random

import numpy as np
import pytest

from skalc.errors import ResourceCapError, ValidationError
from skalc.source_model import entropy, gacs_korner, parse_source
from skalc.two_user import (
    compressed_curve_one_sided,
    constrained_curve_one_way,
    duality_check,
    min_sufficient_statistic,
    mutual_information,
    one_way_complexity,
    pmf_matrix,
    run_sweep,
)

import _oracle
import _sources


def test_mutual_information(intro_pmf, bit_pmf):
    assert abs(mutual_information(intro_pmf) - 1.0) < 1e-12
    assert abs(mutual_information(bit_pmf) - 1.0) < 1e-12
    indep = parse_source(_sources.INDEP_PMF)
    assert abs(mutual_information(indep)) < 1e-12


def test_pmf_matrix_validation(example1):
    with pytest.raises(ValidationError):
        pmf_matrix(example1)
    three = parse_source({"kind": "pmf", "users": ["1", "2", "3"],
                          "alphabets": [2, 2, 2],
                          "table": [[0, 0, 0, 0.5], [1, 1, 1, 0.5]]})
    with pytest.raises(ValidationError):
        pmf_matrix(three)
    big = parse_source({"kind": "pmf", "users": ["1", "2"], "alphabets": [17, 2],
                        "table": [[i, i % 2, 1.0 / 17] for i in range(17)]})
    with pytest.raises(ResourceCapError):
        pmf_matrix(big)


def test_min_sufficient_statistic(intro_pmf, bit_pmf):
    ent, labels = min_sufficient_statistic(intro_pmf)
    assert labels == (0, 1, 2, 3)
    assert abs(ent - 2.0) < 1e-12
    ent, labels = min_sufficient_statistic(bit_pmf)
    assert labels == (0, 1)
    assert abs(ent - 1.0) < 1e-12
    half = parse_source(_sources.HALF_PMF)
    ent, labels = min_sufficient_statistic(half)
    assert labels == (0, 0, 1, 1)
    assert abs(ent - 1.0) < 1e-12


def test_min_sufficient_statistic_is_sufficient(intro_pmf):
    # grouping Z1 by its label leaves no extra information about Z2
    p = intro_pmf
    _, labels = min_sufficient_statistic(p)
    joint = {}
    for row, prob in zip(p.outcomes, p.probs):
        key = (labels[row[0]], row[1])
        joint[key] = joint.get(key, 0.0) + prob
    lm = {}
    zm = {}
    for (l, z), q in joint.items():
        lm[l] = lm.get(l, 0.0) + q
        zm[z] = zm.get(z, 0.0) + q
    iz = sum(q * math.log2(q / (lm[l] * zm[z])) for (l, z), q in joint.items())
    cond = mutual_information(p) - iz
    assert abs(cond) < 1e-9


def test_one_way_complexity(intro_pmf, bit_pmf):
    assert abs(one_way_complexity(intro_pmf) - 1.0) < 1e-9
    assert abs(one_way_complexity(bit_pmf)) < 1e-9
    half = parse_source(_sources.HALF_PMF)
    assert abs(one_way_complexity(half)) < 1e-9
    indep = parse_source(_sources.INDEP_PMF)
    assert abs(one_way_complexity(indep)) < 1e-9


def test_sweep_deterministic(intro_pmf):
    a = run_sweep(intro_pmf, seed=5, restarts=8, multipliers=8)
    b = run_sweep(intro_pmf, seed=5, restarts=8, multipliers=8)
    assert a.compressed.points == b.compressed.points
    assert a.constrained.points == b.constrained.points
    assert a.seed == 5


def test_compressed_curve_intro(intro_pmf):
    sweep = run_sweep(intro_pmf)
    alphas = [0.0, 0.5, 1.0, 1.5, 2.0]
    points = compressed_curve_one_sided(intro_pmf, alphas, sweep=sweep)
    for alpha, pt in zip(alphas, points):
        assert pt.x == alpha
        assert abs(pt.value - alpha / 2) <= 1e-3
        assert pt.value >= alpha / 2 - 1e-9
    # witnesses are feasible channels close to their curve point
    pmat = pmf_matrix(intro_pmf)
    px = pmat.sum(axis=1)
    for pt in points:
        if pt.witness is None:
            continue
        q = np.asarray(pt.witness.matrix)
        assert np.all(q >= -1e-12)
        assert np.allclose(q.sum(axis=1), 1.0, atol=1e-9)
        assert pt.witness.info_x <= pt.x + 1e-6
        assert pt.witness.info_y <= pt.value + 1e-6
        # recompute the scores from the matrix itself
        qt = px @ q
        ix = 0.0
        for i in range(q.shape[0]):
            for t in range(q.shape[1]):
                if q[i, t] > 0 and qt[t] > 0:
                    ix += px[i] * q[i, t] * math.log2(q[i, t] / qt[t])
        assert abs(ix - pt.witness.info_x) < 1e-8


def test_compressed_curve_uniform_bit(bit_pmf):
    sweep = run_sweep(bit_pmf)
    alphas = [0.0, 0.25, 0.5, 1.0, 1.5]
    points = compressed_curve_one_sided(bit_pmf, alphas, sweep=sweep)
    for alpha, pt in zip(alphas, points):
        assert abs(pt.value - min(alpha, 1.0)) <= 1e-6


def test_compressed_curve_general_properties(intro_pmf):
    sweep = run_sweep(intro_pmf)
    info = mutual_information(intro_pmf)
    grid = [0.1 * k for k in range(21)]
    points = compressed_curve_one_sided(intro_pmf, grid, sweep=sweep)
    values = [pt.value for pt in points]
    for alpha, v in zip(grid, values):
        assert v <= alpha + 1e-9
        assert v <= info + 1e-9
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_constrained_curve(intro_pmf, bit_pmf):
    sweep = run_sweep(intro_pmf)
    comp = one_way_complexity(intro_pmf)
    points = constrained_curve_one_way(intro_pmf, [0.0, 0.5, 1.0, 2.0], sweep=sweep)
    assert points[0].value <= 1e-3
    for pt in points:
        if pt.x >= comp - 1e-9:
            assert abs(pt.value - 1.0) <= 1e-3
    values = [pt.value for pt in points]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    # identical observations: full rate never needed
    ident = constrained_curve_one_way(bit_pmf, [0.0, 1.0], sweep=run_sweep(bit_pmf))
    for pt in ident:
        assert abs(pt.value - 1.0) <= 1e-6


def test_constrained_independent_pair():
    indep = parse_source(_sources.INDEP_PMF)
    points = constrained_curve_one_way(indep, [0.0, 1.0], sweep=run_sweep(indep))
    for pt in points:
        assert abs(pt.value) <= 1e-9


def test_negative_grid_rejected(intro_pmf):
    sweep = run_sweep(intro_pmf, restarts=4, multipliers=4)
    with pytest.raises(ValidationError):
        compressed_curve_one_sided(intro_pmf, [-0.5], sweep=sweep)
    with pytest.raises(ValidationError):
        constrained_curve_one_way(intro_pmf, [-0.1], sweep=sweep)


def test_duality_intro(intro_pmf):
    report = duality_check(intro_pmf, [1.0, 1.5, 2.0])
    assert report.ok
    for pt in report.points:
        assert pt.residual < 5e-3
        assert not pt.flagged


def test_duality_below_common_information(bit_pmf):
    with pytest.raises(ValidationError):
        duality_check(bit_pmf, [0.5])
    report = duality_check(bit_pmf, [1.0, 2.0])
    assert report.ok


def test_alphabet_cap(example1):
    big = parse_source({"kind": "pmf", "users": ["1", "2"], "alphabets": [17, 17],
                        "table": [[i, i, 1.0 / 17] for i in range(17)]})
    with pytest.raises(ResourceCapError):
        run_sweep(big)


def _random_pmf(rng, nx=3, ny=3):
    raw = [[rng.uniform(0.2, 1.0) for _ in range(ny)] for _ in range(nx)]
    total = sum(sum(r) for r in raw)
    table = [[x, y, raw[x][y] / total] for x in range(nx) for y in range(ny)]
    return parse_source({"kind": "pmf", "users": ["1", "2"],
                         "alphabets": [nx, ny], "table": table})


def test_solver_matches_quantized_reference():
    rng = random.Random(99)
    p = _random_pmf(rng)
    pmat = pmf_matrix(p)
    comp_grid = [0.25, 0.6, 1.0]
    cons_grid = [0.02, 0.1, 0.3]
    ref = _oracle.BruteForceReference(pmat, comp_grid, cons_grid, step=16)
    sweep = run_sweep(p)
    comp = compressed_curve_one_sided(p, comp_grid, sweep=sweep)
    for pt in comp:
        assert pt.value >= ref.compressed.feas_value(pt.x) - 2e-3
        assert pt.value <= ref.compressed.env_value(pt.x) + 2e-3
    cons = constrained_curve_one_way(p, cons_grid, sweep=sweep)
    for pt in cons:
        assert pt.value >= ref.constrained.feas_value(pt.x) - 2e-3
        assert pt.value <= ref.constrained.env_value(pt.x) + 2e-3
