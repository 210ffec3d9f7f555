import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from classgroup.field import parse_field


@pytest.fixture(scope="session")
def qi():
    return parse_field([1, 0, 1])


@pytest.fixture(scope="session")
def q5():
    return parse_field([5, 0, 1])


@pytest.fixture(scope="session")
def q23():
    return parse_field([6, -1, 1])


@pytest.fixture(scope="session")
def sqrt2():
    return parse_field([-2, 0, 1])


@pytest.fixture(scope="session")
def sqrt10():
    return parse_field([-10, 0, 1])


@pytest.fixture(scope="session")
def cubic():
    return parse_field([-1, -1, 0, 1])


def field_file(tmp_path, coeffs, precision=128):
    import json
    p = tmp_path / "field.json"
    p.write_text(json.dumps({"poly": coeffs, "precision": precision}))
    return str(p)
