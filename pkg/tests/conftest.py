import json

import pytest

from skalc.source_model import parse_source

import _sources


@pytest.fixture
def example1():
    return parse_source(_sources.EXAMPLE1)


@pytest.fixture
def triangle():
    return parse_source(_sources.TRIANGLE)


@pytest.fixture
def star():
    return parse_source(_sources.STAR)


@pytest.fixture
def path3():
    return parse_source(_sources.PATH3)


@pytest.fixture
def intro_pmf():
    return parse_source(_sources.INTRO_PMF)


@pytest.fixture
def bit_pmf():
    return parse_source(_sources.BIT_PMF)


@pytest.fixture
def write_source(tmp_path):
    """Write a source dict to a JSON file and return its path as a string."""
    counter = iter(range(1000))

    def _write(data, name=None):
        path = tmp_path / (name or f"source{next(counter)}.json")
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write
