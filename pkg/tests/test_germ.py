from __future__ import annotations

import sys
from pathlib import Path

import pytest
import sympy

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from germforge.core.algebra import I_UNIT, ZERO, TruncSeries, from_sympy  # noqa: E402
from germforge.core.germ import (  # noqa: E402
    compose_maps,
    conjugate,
    germ_from_displacement,
    homogeneous_data,
    identity_germ,
    iterate,
    linear_map,
    make_germ,
    map_inverse,
)
from germforge.core.validators import InvariantViolation  # noqa: E402

x, y, z = sympy.symbols("x y z")

CUBIC = (y * z * (y - z), x * (x**2 - z**2), x * z * (y - z))


def _cubic_germ(N: int = 6):
    return germ_from_displacement([from_sympy(c, N) for c in CUBIC])


def test_identity_table_gives_identity_germ():
    f = make_germ([[], [], []], 6)
    assert f.is_identity()
    assert f.N == 6
    assert all(c.is_zero() for c in f.displacement)
    assert identity_germ(6).is_identity()


def test_cubic_jet_is_a_valid_germ():
    f = _cubic_germ()
    data = homogeneous_data(f)
    assert data.order == 3
    assert data.pure_order == 3
    assert data.ell == (0, 0, 0)
    assert data.H[0] == from_sympy(y**2 * z - y * z**2)


def test_linear_perturbation_is_rejected():
    with pytest.raises(InvariantViolation, match="not tangent to the identity"):
        make_germ([[((1, 0, 0), 1)], [], []], 4)


def test_divisor_must_divide_every_component():
    with pytest.raises(InvariantViolation, match="does not divide"):
        make_germ([[((0, 2, 0), 1)], [], [((0, 0, 2), 1)]], 5, (0, 0, 1))


def test_divisor_is_split_off():
    f = make_germ([[((0, 1, 2), 1)], [((1, 0, 2), 1)], [((0, 0, 4), 1)]], 8, (0, 0, 2))
    assert f.divisor == (0, 0, 2)
    assert f.reduced_degree == 6
    assert f.reduced[2] == TruncSeries({(0, 0, 2): 1}, 6)
    data = homogeneous_data(f)
    assert data.ell == (0, 0, 2)
    assert data.order == 3


def test_homogeneous_data_refuses_identity():
    with pytest.raises(InvariantViolation, match="f = id"):
        homogeneous_data(identity_germ(5))


def test_conjugation_by_identity():
    f = _cubic_germ()
    g = conjugate(f, linear_map([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    for a, b in zip(f.displacement, g.displacement):
        assert a.equals_to(b)


def test_cubic_jet_is_sigma_invariant():
    f = _cubic_germ()
    sigma = linear_map([[-I_UNIT, ZERO, ZERO], [ZERO, I_UNIT, ZERO], [ZERO, ZERO, I_UNIT]])
    g = conjugate(f, sigma)
    for a, b in zip(f.displacement, g.displacement):
        assert a.equals_to(b)


def test_map_inverse_round_trip():
    phi = (from_sympy(x + y**2, 6), from_sympy(y + x * z, 6), from_sympy(z - x**3, 6))
    psi = map_inverse(phi, 6)
    composed = compose_maps(phi, psi, 6)
    for k, comp in enumerate(composed):
        assert comp.equals_to(TruncSeries.variable(k), 6)


def test_iterate():
    f = make_germ([[((0, 2, 0), 1)], [], []], 5)
    assert iterate(f, 1).displacement[0].equals_to(f.displacement[0])
    assert iterate(f, 2).displacement[0].equals_to(TruncSeries({(0, 2, 0): 2}))

    g = make_germ([[((0, 1, 1), 1)], [((2, 0, 0), 1)], [((0, 0, 2), 1)]], 6)
    third = iterate(g, 3)
    coords = g.coords
    expected = compose_maps(coords, compose_maps(coords, coords, 6), 6)
    for k in range(3):
        assert third.coords[k].equals_to(expected[k], 6)


def test_iterate_needs_positive_count():
    with pytest.raises(InvariantViolation):
        iterate(_cubic_germ(), 0)


def test_germ_to_dict():
    payload = _cubic_germ().to_dict()
    assert payload["N"] == 6
    assert payload["divisor"] == [0, 0, 0]
    assert len(payload["components"]) == 3
