from __future__ import annotations

import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from germforge.core.algebra import Scalar  # noqa: E402
from germforge.core.curves import (  # noqa: E402
    INFINITELY_MANY,
    NONE,
    OUTSIDE_TRICHOTOMY,
    RESONANT,
    UNDECIDED,
    UNIQUE,
    FormalCurve,
    curve_from_sequence,
    default_curve_depth,
    fixed_walker,
    half_corner_curve,
    restricted_germ_jet,
    spike_curve,
    spike_walker,
    spinning_corner_curve_analysis,
    spinning_corner_verdict,
    verify_invariance,
)
from germforge.core.germ import make_germ  # noqa: E402
from germforge.core.validators import InvariantViolation, UndecidableError  # noqa: E402


def _spike():
    # F' = (y, x, z^2) with divisor z^2
    return make_germ([[((0, 1, 2), 1)], [((1, 0, 2), 1)], [((0, 0, 4), 1)]], 10, (0, 0, 2))


def _half_corner(by: int = 2, beta: int = 0):
    # F' = (x + z^2, beta z + by yz, 5z^2) with divisor z
    y_terms = [((0, 1, 2), by)] + ([((0, 0, 2), beta)] if beta else [])
    return make_germ([[((1, 0, 1), 1), ((0, 0, 3), 1)], y_terms, [((0, 0, 3), 5)]], 10, (0, 0, 1))


def _spinning_corner(r_terms):
    # F' = (x, y(y + z), z R) with divisor yz
    return make_germ([[((1, 1, 1), 1)], [((0, 3, 1), 1), ((0, 2, 2), 1)], r_terms], 8, (0, 1, 1))


@pytest.mark.parametrize(
    "b, c, verdict, ratio",
    [
        ((0, "4/11"), ("11/2", "-40/11"), UNIQUE, -11),
        ((0, 1), (0, -3), NONE, None),
        ((1, 2), (1, 2), INFINITELY_MANY, None),
        ((0, 0), (0, 0), OUTSIDE_TRICHOTOMY, None),
        ((1, 0), (0, 1), RESONANT, 1),
    ],
)
def test_spinning_corner_trichotomy(b, c, verdict, ratio):
    b = tuple(Scalar.parse(str(v)) for v in b)
    c = tuple(Scalar.parse(str(v)) for v in c)
    found, found_ratio = spinning_corner_verdict(b, c)
    assert found == verdict
    if ratio is None:
        assert found_ratio is None
    else:
        assert found_ratio == ratio


def test_spike_curve_is_the_z_axis():
    f = _spike()
    curve = spike_curve(f)
    assert curve.axis == 2
    assert curve.depth == default_curve_depth(f) == 6
    assert all(c == 0 for c in curve.components[0])
    assert all(c == 0 for c in curve.components[1])
    assert verify_invariance(f, curve) == 6


def test_default_curve_depth_is_capped():
    f = make_germ([[((0, 1, 2), 1)], [((1, 0, 2), 1)], [((0, 0, 4), 1)]], 18, (0, 0, 2))
    assert f.reduced_degree == 16
    assert default_curve_depth(f) == 8
    assert spike_curve(f).depth == 8


def test_spike_curve_needs_a_spike():
    with pytest.raises(InvariantViolation, match="Expected a degenerate spike"):
        spike_curve(_half_corner())


def test_half_corner_curve_coefficients():
    f = _half_corner()
    curve = half_corner_curve(f)
    assert curve.depth == 7
    assert curve.coefficient(0, 1) == 0
    assert curve.coefficient(0, 2) == -1
    assert curve.coefficient(0, 3) == -10
    assert all(c == 0 for c in curve.components[1])
    assert verify_invariance(f, curve) == 7


def test_perturbed_curve_fails_invariance_early():
    f = _half_corner()
    curve = half_corner_curve(f)
    x = list(curve.components[0])
    x[2] = Scalar.coerce(0)
    broken = FormalCurve((x, curve.components[1], curve.components[2]), curve.depth, curve.axis, curve.offsets)
    assert verify_invariance(f, broken) == 1


def test_simple_half_corner_has_no_curve():
    with pytest.raises(InvariantViolation, match="Simple half corner"):
        half_corner_curve(_half_corner(beta=1))


def test_resonant_half_corner_is_undecided():
    with pytest.raises(UndecidableError, match="Resonant half corner"):
        half_corner_curve(_half_corner(by=5))


def test_curve_from_spike_walk():
    f = _spike()
    curve = curve_from_sequence(f, spike_walker, 3)
    assert curve.depth == 3
    assert curve.sequence == [(0, 0, 1)] * 3
    replay = curve_from_sequence(f, fixed_walker([(0, 0, 1)] * 3), 3)
    assert replay.components == curve.components


def test_walker_must_stay_in_the_parameter_chart():
    with pytest.raises(InvariantViolation, match="left the z-chart"):
        curve_from_sequence(_spike(), fixed_walker([(1, 0, 0)]), 1)


def test_unique_spinning_corner_curve():
    # R = 2y + 3z: b = (1, 1), c = (2, 3)
    f = _spinning_corner([((0, 2, 2), 2), ((0, 1, 3), 3)])
    result = spinning_corner_curve_analysis(f)
    assert result.verdict == UNIQUE
    assert result.ratio == -2
    assert result.points == [-2]
    assert len(result.curves) == 1
    curve = result.curves[0]
    assert curve.axis == 2
    assert curve.coefficient(1, 1) == -2
    assert curve.coefficient(0, 1) == 0


def test_spinning_corner_without_curve():
    # R = 2y + z: b = (1, 1), c = (2, 1)
    f = _spinning_corner([((0, 2, 2), 2), ((0, 1, 3), 1)])
    result = spinning_corner_curve_analysis(f)
    assert result.verdict == NONE
    assert result.curves == []


def test_restricted_germ_on_the_invariant_surface():
    f = _spinning_corner([((0, 2, 2), 2), ((0, 1, 3), 3)])
    restricted = restricted_germ_jet(f)
    assert restricted.verdict == UNDECIDED
    assert restricted.surface.is_zero()
    assert restricted.divisor == (1, 1)
    assert len(restricted.directions) == 3
    assert restricted.to_dict()["surface"].startswith("x = ")


def test_curve_to_dict():
    payload = spike_curve(_spike(), 2).to_dict()
    assert payload["e"] == 1
    assert payload["parameter"] == "z"
    assert payload["x"] == ["0", "0", "0"]
