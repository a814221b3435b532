from __future__ import annotations

import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from germforge.core.algebra import I_UNIT, ONE, ZERO, Scalar, uni_inverse, uni_mul  # noqa: E402
from germforge.core.blowup import lift, point_chart  # noqa: E402
from germforge.core.classify import HALF_CORNER, classify_germ, normal_form  # noqa: E402
from germforge.core.curves import half_corner_curve, spike_curve  # noqa: E402
from germforge.core.germ import make_germ  # noqa: E402
from germforge.core.ramis_sibuya import (  # noqa: E402
    PARABOLIC_DOMAIN_NOTE,
    RSData,
    along_curve_data,
    curve_multiplicity,
    diagonalize,
    pair_report,
    parabolic_report,
    rs_reduce,
    straighten_pair,
)
from germforge.core.validators import InvariantViolation, ValidationError  # noqa: E402


def _spike():
    # F' = (y, x, z^2) with divisor z^2
    return make_germ([[((0, 1, 2), 1)], [((1, 0, 2), 1)], [((0, 0, 4), 1)]], 10, (0, 0, 2))


def _half_corner():
    # F' = (x + z^2, 2yz, 5z^2) with divisor z
    return make_germ([[((1, 0, 1), 1), ((0, 0, 3), 1)], [((0, 1, 2), 2)], [((0, 0, 3), 5)]], 10, (0, 0, 1))


def _uni(*values):
    return [Scalar.coerce(v) for v in values]


@pytest.fixture(scope="module")
def spike_pair():
    nf = normal_form(_spike())
    return nf, spike_curve(nf.germ)


def test_curve_multiplicity(spike_pair):
    nf, curve = spike_pair
    assert curve_multiplicity(nf.germ, curve) == 4


def test_spike_reduction(spike_pair):
    nf, curve = spike_pair
    rs, report = pair_report(nf.germ, nf.cls, curve)
    assert (rs.r, rs.c, rs.e) == (3, 2, 1)
    assert rs.blowups == 6
    assert rs.a == 1
    assert rs.lam == -1
    assert rs.mu == 1
    assert rs.d1 == [0, 0, -1]
    assert rs.d2 == [0, 0, 1]
    assert rs.proportional
    assert report.count == 3
    assert report.dimensions == [2, 2, 2]
    assert report.note == PARABOLIC_DOMAIN_NOTE
    for direction in report.directions:
        assert direction.signs_x == [-s for s in direction.signs_y]


def test_half_corner_reduction():
    f = _half_corner()
    cls = classify_germ(f)
    curve = half_corner_curve(f)
    rs, report = pair_report(f, cls, curve)
    assert (rs.r, rs.c, rs.e) == (2, 1, 0)
    assert rs.a == 5
    assert rs.d1 == [0, 1]
    assert rs.d2 == [0, 0]
    assert not rs.proportional
    assert report.count == 2
    assert report.dimensions == [1, 1]
    assert report.note == ""


def test_reduction_needs_enough_blowups():
    f = _half_corner()
    cls = classify_germ(f)
    straight = straighten_pair(f, half_corner_curve(f))
    with pytest.raises(InvariantViolation, match="raise n"):
        rs_reduce(straight, cls, blowups=2)
    assert rs_reduce(straight, cls, blowups=3).blowups == 3


def test_reduction_refuses_other_classes():
    corner = make_germ([[((2, 1, 0), 1)], [((1, 2, 0), -1)], [((1, 1, 1), 1)]], 8, (1, 1, 0))
    with pytest.raises(InvariantViolation, match="degenerate spike or non-simple half corner"):
        rs_reduce(corner, classify_germ(corner))


def test_straightened_half_corner_fixes_the_axis():
    f = _half_corner()
    straight = straighten_pair(f, half_corner_curve(f))
    row = straight.displacement[0].restrict_to_axis(2).as_univariate(2)
    assert all(c == 0 for c in row[:5])


def test_diagonalize_removes_off_diagonal_terms():
    M = [
        [_uni(1, 0, 1, 2), _uni(0, 0, 0, 3)],
        [_uni(0, 0, 0, 0), _uni(1, 0, -1, 0)],
    ]
    D = diagonalize(M, 2, 3)
    assert D[0][1] == [0, 0, 0, 0]
    assert D[1][0] == [0, 0, 0, 0]
    assert D[0][0] == [1, 0, 1, 2]
    assert D[1][1][2] == -1


def test_diagonalize_needs_distinct_entries():
    M = [
        [_uni(1, 0, 1), _uni(0, 0, 0)],
        [_uni(0, 0, 0), _uni(1, 0, 1)],
    ]
    with pytest.raises(InvariantViolation):
        diagonalize(M, 2, 2)


def test_curve_data_after_a_z_chart_blowup():
    # one blow-up along C keeps h and divides M by 1 + h(z)/z
    f = _half_corner()
    straight = straighten_pair(f, half_corner_curve(f))
    h, M = along_curve_data(straight, 2)
    lifted = lift(straight, point_chart((0, 0, 1), 2))
    h2, M2 = along_curve_data(lifted, 2)
    assert h2 == h
    inv = uni_inverse([ONE + h[1], h[2], h[3]], 2)
    for i in range(2):
        for j in range(2):
            assert M2[i][j] == uni_mul(M[i][j], inv, 2)


def test_signs_at_a_gaussian_root():
    # a = i: omega^2 = i, Re((1 + i) omega) vanishes on both roots
    rs = RSData(
        kind=HALF_CORNER,
        r=2,
        c=0,
        e=0,
        blowups=3,
        a=I_UNIT,
        b=ZERO,
        d1=[ZERO, ONE],
        d2=[ZERO, Scalar.parse("1 + i")],
        c_matrix=(ZERO, ZERO, ZERO, ZERO),
    )
    report = parabolic_report(rs, cap=128)
    assert [d.signs_x for d in report.directions] == [[1], [-1]]
    assert [d.signs_y for d in report.directions] == [[0], [0]]
    assert report.dimensions == [1, 2]


def test_precision_cap_from_environment(spike_pair, monkeypatch):
    nf, curve = spike_pair
    rs, _ = pair_report(nf.germ, nf.cls, curve)
    monkeypatch.setenv("GERMFORGE_PRECISION_CAP", "8")
    with pytest.raises(ValidationError):
        parabolic_report(rs)
    monkeypatch.setenv("GERMFORGE_PRECISION_CAP", "128")
    assert parabolic_report(rs).count == 3
