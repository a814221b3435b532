from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
import sympy

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from germforge.core.algebra import (  # noqa: E402
    I_UNIT,
    ONE,
    ZERO,
    Scalar,
    TruncSeries,
    from_sympy,
    interval_context,
    precision_ladder,
    scalar_sign_of_real,
    series_compose,
    series_div_monomial,
    series_invert_unit,
    series_mul,
    to_sympy,
    uni_compose,
    uni_reverse,
)
from germforge.core.validators import GermParseError, InvariantViolation, UndecidableError  # noqa: E402

x, y, z = sympy.symbols("x y z")


def _poly(expr, N: int = 1 << 20) -> TruncSeries:
    return from_sympy(expr, N)


def test_gaussian_arithmetic_and_display():
    a = Scalar.gaussian(1, 2)
    assert a * a.conjugate() == 5
    assert str(Scalar.gaussian(Fraction(1, 2), 3)) == "1/2 + 3*i"
    assert str(-I_UNIT) == "-i"
    assert str(Scalar.gaussian(2, -1)) == "2 - i"
    assert I_UNIT * I_UNIT == -1
    assert (ONE / Scalar.gaussian(0, 2)) == Scalar.gaussian(0, Fraction(-1, 2))


def test_parse_inverts_str():
    for value in (Scalar.gaussian(Fraction(1, 2), -3), Scalar.gaussian(0, 1), Scalar.gaussian(-7, 0)):
        assert Scalar.parse(str(value)) == value
    assert Scalar.parse("zeta_3 + zeta_3**2") == -1


def test_parse_rejects_garbage():
    with pytest.raises(GermParseError):
        Scalar.parse("")
    with pytest.raises(GermParseError):
        Scalar.parse("1 +* i")


def test_roots_of_unity_reduce_by_minimal_polynomial():
    zeta = Scalar.root_of_unity(3)
    assert zeta + zeta * zeta == -1
    assert zeta**3 == 1
    assert Scalar.root_of_unity(4) == I_UNIT
    assert Scalar.root_of_unity(8) ** 2 == I_UNIT


def test_sign_of_real_scalars():
    assert scalar_sign_of_real(ZERO) == 0
    assert scalar_sign_of_real(Scalar.gaussian(Fraction(-3, 2))) == -1
    zeta = Scalar.root_of_unity(3)
    assert scalar_sign_of_real(zeta + zeta * zeta) == -1
    # zeta_8 + zeta_8^-1 = sqrt(2)
    eighth = Scalar.root_of_unity(8)
    assert scalar_sign_of_real(eighth + eighth.inverse()) == 1


def test_precision_ladder_ends_at_the_cap():
    assert list(precision_ladder(512)) == [53, 106, 212, 424, 512]
    assert list(precision_ladder(100)) == [53, 100]
    assert list(precision_ladder(53)) == [53]
    assert interval_context(200).prec == 200


def test_sign_leaves_the_shared_interval_precision_alone():
    before = mpmath.iv.prec
    eighth = Scalar.root_of_unity(8)
    assert scalar_sign_of_real(eighth + eighth.inverse(), cap=512) == 1
    assert scalar_sign_of_real(-(eighth + eighth.inverse()), cap=64) == -1
    assert mpmath.iv.prec == before


def test_sign_is_decided_at_the_cap():
    # sqrt(2) - 1.414213562373095048 is about 8e-19
    eighth = Scalar.root_of_unity(8)
    close = eighth + eighth.inverse() - Scalar.gaussian(Fraction(1414213562373095048, 10**18))
    with pytest.raises(UndecidableError):
        scalar_sign_of_real(close, cap=53)
    assert scalar_sign_of_real(close, cap=100) == 1


def test_sign_of_non_real_scalar_is_refused():
    with pytest.raises(InvariantViolation):
        scalar_sign_of_real(I_UNIT)


def test_series_mul_examples():
    assert series_mul(_poly(1 + x), _poly(1 - x)) == _poly(1 - x**2)
    assert series_mul(series_mul(_poly(x), _poly(y)), _poly(y - z)) == _poly(x * y**2 - x * y * z)


def test_series_mul_certified_degree():
    a = TruncSeries.variable(0, 5)
    b = TruncSeries.variable(1, 3)
    product = series_mul(a, b)
    assert product.N == 4
    assert product.coefficient((1, 1, 0)) == 1


def test_series_mul_matches_convolution():
    a = _poly(1 + 2 * x - y * z + 3 * x**2 * y + z**4, 8)
    b = _poly(x - 5 * y**2 + x * y * z - z**3 + x**4, 8)
    product = series_mul(a, b, 8)
    expected = sympy.expand((1 + 2 * x - y * z + 3 * x**2 * y + z**4) * (x - 5 * y**2 + x * y * z - z**3 + x**4))
    assert product.equals_to(_poly(expected), 8)


def test_series_compose_examples():
    chart = (_poly(x * z), _poly(y * z), _poly(z))
    assert series_compose(_poly(x), chart) == _poly(x * z)
    assert series_compose(_poly(y * z * (y - z)), chart) == _poly(y**2 * z**3 - y * z**3)
    a = _poly(x**2 + 3 * y * z - z**5, 6)
    identity = (TruncSeries.variable(0), TruncSeries.variable(1), TruncSeries.variable(2))
    assert series_compose(a, identity).equals_to(a)


def test_series_compose_rejects_units():
    with pytest.raises(InvariantViolation):
        series_compose(_poly(x), (_poly(1 + x), _poly(y), _poly(z)))


def test_series_invert_unit():
    assert series_invert_unit(TruncSeries.one(6), 6) == TruncSeries.one(6)
    inverse = series_invert_unit(_poly(1 + z, 5))
    assert inverse == _poly(1 - z + z**2 - z**3 + z**4 - z**5, 5)

    a = _poly(3 + x + 2 * y * z - x**2 * z, 8)
    residual = series_mul(a, series_invert_unit(a, 8), 8) - TruncSeries.one(8)
    assert residual.is_zero()
    assert residual.val > 8


def test_series_invert_unit_errors():
    with pytest.raises(InvariantViolation):
        series_invert_unit(_poly(x + y, 4))
    with pytest.raises(InvariantViolation):
        series_invert_unit(_poly(1 + z))


def test_series_div_monomial():
    assert series_div_monomial(_poly(x**2 * y), (1, 1, 0)) == _poly(x)
    assert series_div_monomial(_poly(z**3 * (x + y**2)), (0, 0, 3)) == _poly(x + y**2)
    with pytest.raises(InvariantViolation, match="not divisible"):
        series_div_monomial(_poly(x + z), (0, 0, 1))


def test_division_lowers_certified_degree():
    quotient = series_div_monomial(_poly(z**2 * x, 7), (0, 0, 2))
    assert quotient.N == 5


def test_coefficient_beyond_certified_degree():
    s = _poly(x + y**3, 3)
    assert s.coefficient((0, 3, 0)) == 1
    with pytest.raises(InvariantViolation):
        s.coefficient((0, 0, 4))


def test_sympy_bridge():
    expr = 2 * x**2 * y - sympy.I * z**3 + sympy.Rational(1, 3) * x * y * z
    series = from_sympy(expr)
    assert series.coefficient((0, 0, 3)) == -I_UNIT
    assert sympy.expand(to_sympy(series) - expr) == 0


def test_univariate_reversion():
    a = [ZERO, ONE, ONE, Scalar.gaussian(2)]
    inverse = uni_reverse(a, 5)
    composed = uni_compose(a, inverse, 5)
    assert composed == [ZERO, ONE, ZERO, ZERO, ZERO, ZERO]
