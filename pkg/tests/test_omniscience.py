import itertools
import random
from fractions import Fraction as F

import pytest

from skalc.mmi import mmi
from skalc.omniscience import rco, unconstrained_capacity
from skalc.source_model import conditional_entropy, entropy, parse_source

import _sources


def _assert_feasible(source, rates):
    """Every proper user subset must carry at least its conditional entropy."""
    users = list(source.users)
    total = sum(rates.values())
    for r in range(1, len(users)):
        for group in itertools.combinations(users, r):
            need = conditional_entropy(source, group)
            got = sum(rates[u] for u in group)
            assert got >= need, (group, got, need)
    return total


def test_example1_golden(example1):
    result = rco(example1)
    assert result.value == F(1)
    rates = result.witness.rates
    assert set(rates) == {"1", "2", "3"}
    assert _assert_feasible(example1, rates) == F(1)
    # the hand-checkable optimum: user 2 relays one bit
    hand = {"1": F(0), "2": F(1), "3": F(0)}
    assert _assert_feasible(example1, hand) == result.value


def test_triangle_golden(triangle):
    result = rco(triangle)
    assert result.value == F(3, 2)
    assert _assert_feasible(triangle, result.witness.rates) == F(3, 2)


def test_rates_nonnegative(example1, triangle):
    for src in (example1, triangle):
        for r in rco(src).witness.rates.values():
            assert r >= 0


def test_unconstrained_capacity(example1, triangle):
    assert unconstrained_capacity(example1) == F(2)
    assert unconstrained_capacity(triangle) == F(3, 2)


def test_capacity_complements_discussion():
    rng = random.Random(41)
    for _ in range(30):
        src = parse_source(_sources.random_hypergraph(rng, n_users=rng.randint(2, 5)))
        total = entropy(src, src.users)
        assert rco(src).value + mmi(src).value == total


def test_covering_edge_changes_nothing():
    rng = random.Random(8)
    for _ in range(6):
        data = _sources.random_hypergraph(rng, n_users=rng.randint(2, 4))
        base = rco(parse_source(data)).value
        data["edges"].append({"id": "omni", "on": list(data["users"]), "bits": "7/3"})
        grown = rco(parse_source(data)).value
        assert grown == base


def test_two_user_pmf_path(intro_pmf):
    result = rco(intro_pmf)
    # r1 >= H(Z1|Z2), r2 >= H(Z2|Z1), both binding at the optimum
    assert abs(result.value - 2.0) < 1e-9
    assert abs(unconstrained_capacity(intro_pmf) - 1.0) < 1e-9
