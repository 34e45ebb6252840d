from fractions import Fraction as F

import pytest

from skalc.errors import InternalCheckError, ValidationError
from skalc.lp import simplex_min


def test_known_optimum_exact():
    # min -2x - 3y  s.t.  x + y <= 4,  x <= 2
    sol = simplex_min([F(-2), F(-3)], [[F(1), F(1)], [F(1), F(0)]], [F(4), F(2)])
    assert sol.value == F(-12)
    assert sol.x == (F(0), F(4))
    assert sol.duals == (F(-3), F(0))


def test_duals_are_rhs_sensitivities():
    rows = [[F(1), F(1)], [F(1), F(0)]]
    base = simplex_min([F(-2), F(-3)], rows, [F(4), F(2)])
    bumped = simplex_min([F(-2), F(-3)], rows, [F(4) + F(1, 16), F(2)])
    assert bumped.value - base.value == base.duals[0] * F(1, 16)


def test_degenerate_duplicate_rows():
    sol = simplex_min([F(-1)], [[F(1)], [F(1)]], [F(1), F(1)])
    assert sol.value == F(-1)
    assert sol.x == (F(1),)
    assert sol.duals == (F(-1), F(0))


def test_solution_invariants_random():
    import random
    rng = random.Random(9)
    for _ in range(25):
        n = rng.randint(1, 4)
        m = rng.randint(1, 5)
        c = [F(rng.randint(-4, 4)) for _ in range(n)]
        rows = [[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(m)]
        rhs = [F(rng.randint(0, 6)) for _ in range(m)]
        # keep it bounded: add box rows x_i <= 5
        for i in range(n):
            rows.append([F(1) if j == i else F(0) for j in range(n)])
            rhs.append(F(5))
        sol = simplex_min(c, rows, rhs)
        assert sol.value == sum(ci * xi for ci, xi in zip(c, sol.x))
        for row, b, dual in zip(rows, rhs, sol.duals):
            slack = b - sum(a * xi for a, xi in zip(row, sol.x))
            assert slack >= 0
            assert dual <= 0
            # complementary slackness
            assert dual == 0 or slack == 0
        assert all(xi >= 0 for xi in sol.x)


def test_unbounded_detected():
    with pytest.raises(InternalCheckError):
        simplex_min([F(-1)], [[F(-1)]], [F(0)])


def test_validation():
    with pytest.raises(ValidationError):
        simplex_min([F(1)], [[F(1), F(2)]], [F(1)])
    with pytest.raises(ValidationError):
        simplex_min([F(1)], [[F(1)]], [F(-1)])
