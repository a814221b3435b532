from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest
import sympy

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from germforge.core.algebra import from_sympy  # noqa: E402
from germforge.core.blowup import (  # noqa: E402
    BlowupNode,
    axis_roots,
    blowup_child,
    chart_transition,
    is_exceptional,
    lift,
    lift_field,
    lift_line_blowup,
    lift_point_blowup,
    line_chart,
    point_chart,
    tree_export,
)
from germforge.core.directions import singular_directions  # noqa: E402
from germforge.core.germ import germ_from_displacement, make_germ  # noqa: E402
from germforge.core.infgen import log_germ  # noqa: E402
from germforge.core.validators import InsufficientPrecisionError, InvariantViolation  # noqa: E402

x, y, z = sympy.symbols("x y z")

CUBIC = (y * z * (y - z), x * (x**2 - z**2), x * z * (y - z))


def _cubic_germ(N: int = 6):
    return germ_from_displacement([from_sympy(c, N) for c in CUBIC])


def _simple_corner(N: int = 8):
    # x + xy x, y - xy y, z + xy z
    return make_germ([[((2, 1, 0), 1)], [((1, 2, 0), -1)], [((1, 1, 1), 1)]], N, (1, 1, 0))


def test_chart_labels():
    assert point_chart((0, 0, 1)).label == "(xz, yz, z)"
    assert point_chart((0, 1, 0)).label == "(yx, y, yz)"
    assert line_chart((0, 1), 0).label == "(x, xy, z)"
    chart = point_chart((1, 1, 1))
    assert chart.dividing == 2
    assert [str(t) for t in chart.translation] == ["1", "1", "0"]


def test_direction_must_be_visible_in_chart():
    with pytest.raises(InvariantViolation):
        point_chart((1, 0, 0), 2)


def test_first_blowup_of_the_cubic_jet():
    lifted = lift_point_blowup(_cubic_germ(), (0, 0, 1))
    assert lifted.divisor == (0, 0, 2)
    F = lifted.reduced[0]
    assert F.coefficient((0, 0, 0)) == 0
    assert F.coefficient((0, 1, 0)) == -1
    assert F.coefficient((2, 0, 0)) == 1
    assert F.coefficient((0, 2, 0)) == 1
    assert F.coefficient((2, 1, 0)) == -1


def test_simple_corner_point_blowup_exponent():
    lifted = lift(_simple_corner(), point_chart((0, 0, 1)))
    assert lifted.divisor == (1, 1, 2)


def test_simple_corner_line_blowup_exponents():
    lifted = lift_line_blowup(_simple_corner(), (0, 1), 0)
    assert lifted.divisor == (2, 1, 0)


def test_line_must_be_pointwise_fixed():
    f = make_germ([[((0, 0, 2), 1)], [], []], 6)
    with pytest.raises(InvariantViolation, match="Line not pointwise fixed"):
        lift_line_blowup(f, (0, 1), 0)


def test_lift_commutes_with_generator():
    f = _cubic_germ(8)
    chart = point_chart((0, 0, 1))
    lifted = lift(f, chart)
    direct = log_germ(lifted)
    pulled = lift_field(log_germ(f), chart)
    for a, b in zip(direct.comps, pulled.comps):
        assert a.equals_to(b)


def test_chart_transition_fixes_the_point():
    src = point_chart((0, 1, 1), 2)
    dst = point_chart((0, 1, 1), 1)
    comps = chart_transition(src, dst, 5)
    assert len(comps) == 3
    assert all(c.constant_term().is_zero() for c in comps)


def test_axis_roots():
    f = make_germ([[], [], [((2, 0, 1), 1), ((1, 0, 1), -2)]], 6, (0, 0, 1))
    found = axis_roots(f, 0)
    assert [str(r) for r in found.roots] == ["0", "2"]
    assert not found.unresolved


def test_axis_roots_need_a_margin():
    f = make_germ([[], [], [((2, 0, 1), 1), ((1, 0, 1), -2)]], 3, (0, 0, 1))
    with pytest.raises(InsufficientPrecisionError):
        axis_roots(f, 0)


def test_is_exceptional():
    node = BlowupNode("p", make_germ([[((1, 0, 1), 1)], [], [((0, 0, 3), 1)]], 6, (0, 0, 1)))
    assert is_exceptional(node, (1, 0, 0))
    assert not is_exceptional(node, (0, 0, 1))


def test_single_blowup_tree_has_five_children():
    f = _cubic_germ()
    root = BlowupNode("origin", f)
    for k, d in enumerate(singular_directions(f).resolved, start=1):
        blowup_child(root, point_chart(d.coords), f"p{k}", "E1")
    assert len(root.leaves()) == 5
    assert all(child.components[child.chart.dividing] == "E1" for child in root.children)

    payload = json.loads(tree_export(root, "json"))
    assert len(payload["children"]) == 5
    assert tree_export(root, "dot").count("->") == 5


def test_empty_tree_export():
    assert json.loads(tree_export(None, "json")) == {}
    assert tree_export(None, "dot") == "digraph modification {\n  node [shape=box];\n}\n"
    with pytest.raises(InvariantViolation):
        tree_export(None, "svg")
