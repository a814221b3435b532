from __future__ import annotations

import math
import sys
from pathlib import Path

import pytest
import sympy

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from germforge.core.algebra import from_sympy  # noqa: E402
from germforge.core.directions import (  # noqa: E402
    DICRITICAL,
    ISOLATED,
    ONE_DICRITICAL,
    U_SYMBOL,
    W_SYMBOL,
    IntersectionQuery,
    bezout_check,
    characteristic_directions,
    dicriticality,
    direction_multiplicity,
    intersection_multiplicity,
    normalize_direction,
    singular_directions,
)
from germforge.core.germ import germ_from_displacement, make_germ  # noqa: E402
from germforge.core.validators import InvariantViolation  # noqa: E402

x, y, z = sympy.symbols("x y z")
u, w = U_SYMBOL, W_SYMBOL

CUBIC = (y * z * (y - z), x * (x**2 - z**2), x * z * (y - z))

EXPECTED_MULTIPLICITIES = {
    "[0:0:1]": 1,
    "[0:1:1]": 1,
    "[1:1:1]": 3,
    "[-1:1:1]": 3,
    "[0:1:0]": 5,
}


def _germ(*comps, N: int = 6):
    return germ_from_displacement([from_sympy(c, N) for c in comps])


def test_singular_directions_of_the_cubic_jet():
    report = singular_directions(_germ(*CUBIC))
    assert sorted(str(d) for d in report.resolved) == sorted(EXPECTED_MULTIPLICITIES)
    assert all(d.degenerate for d in report.resolved)
    assert report.dicriticality == ISOLATED
    assert not report.families
    assert not report.unresolved


def test_characteristic_directions_agree_without_divisor():
    f = _germ(*CUBIC)
    singular = {str(d) for d in singular_directions(f).resolved}
    characteristic = {str(d) for d in characteristic_directions(f).resolved}
    assert singular == characteristic


def test_singular_directions_are_confirmed_by_lifting():
    report = singular_directions(_germ(*CUBIC), cross_check=True)
    assert len(report.resolved) == 5


def test_direction_multiplicities_and_bezout():
    f = _germ(*CUBIC)
    for label, expected in EXPECTED_MULTIPLICITIES.items():
        coords = [int(c) for c in label.strip("[]").split(":")]
        assert direction_multiplicity(f, coords) == expected
    check = bezout_check(f)
    assert check.total == 13
    assert check.expected == 13
    assert check.ok


def test_multiplicity_requires_a_characteristic_direction():
    with pytest.raises(InvariantViolation, match="not a characteristic direction"):
        direction_multiplicity(_germ(*CUBIC), (1, 2, 3))


def test_divisor_directions_are_marked_exceptional():
    # x + y z^2, y + x z^2, z + z^4 with divisor z^2
    f = make_germ([[((0, 1, 2), 1)], [((1, 0, 2), 1)], [((0, 0, 4), 1)]], 10, (0, 0, 2))
    report = singular_directions(f)
    assert {str(d) for d in report.resolved} == {"[0:0:1]", "[1:1:0]", "[-1:1:0]"}
    assert [str(d) for d in report.non_exceptional()] == ["[0:0:1]"]
    assert report.find((0, 0, 5)).degenerate
    assert report.find((2, 2, 0)).multiplier == 1
    assert report.find((-1, 1, 0)).multiplier == -1


def test_dicriticality_degrees():
    assert dicriticality(_germ(*CUBIC)) == ISOLATED
    assert dicriticality(_germ(x**2, x * y, x * z)) == DICRITICAL
    report = singular_directions(_germ(x**2, x * y, 0))
    assert report.dicriticality == ONE_DICRITICAL
    assert report.families


def test_normalize_direction():
    assert [str(c) for c in normalize_direction((2, 4, 2))] == ["1", "2", "1"]
    assert [str(c) for c in normalize_direction((0, 3, 0))] == ["0", "1", "0"]
    with pytest.raises(InvariantViolation):
        normalize_direction((0, 0, 0))


def test_intersection_of_axes():
    assert intersection_multiplicity(IntersectionQuery(u, w)) == 1


def test_intersection_at_the_fifth_direction():
    F = w - w**2 - u**4 + u**2 * w**2
    G = u * w * (1 - w - u**2 + w**2)
    assert intersection_multiplicity(IntersectionQuery(F, G)) == 5


def test_intersection_with_common_component():
    assert intersection_multiplicity(IntersectionQuery(u**2, u**2)) == math.inf


def test_intersection_away_from_the_curves():
    assert intersection_multiplicity(IntersectionQuery(u - 1, w)) == 0
