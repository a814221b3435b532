"""
Exact scalars and truncated power series in three variables.

Scalars are elements of the cyclotomic field Q(zeta_M) with 4 | M, so that
i = zeta_M**(M/4) is always available; Q(i) itself is M = 4.  Coefficients
are fractions.Fraction in the power basis 1, zeta, ..., zeta**(phi(M)-1).

TruncSeries stores the coefficients of total degree <= N of a formal power
series in x, y, z.  N is the certified degree: coefficients above N are
unknown, and every operation reports the degree up to which its result is
exact.
"""

from __future__ import annotations

import logging
import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from mpmath import iv
from mpmath.ctx_iv import MPIntervalContext

from .validators import (
    START_PRECISION,
    GermParseError,
    InvariantViolation,
    UndecidableError,
    resolve_precision_cap,
)

logger = logging.getLogger(__name__)

Exp = Tuple[int, int, int]
Number = Union[int, Fraction, "Scalar"]

# Certified degree used for exact polynomials
EXACT_DEGREE = 1 << 20

_ZETA = sympy.Symbol("zeta")
_ZETA_NAME = re.compile(r"zeta_(\d+)")
VARIABLES = ("x", "y", "z")


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@lru_cache(maxsize=None)
def _cyclotomic(order: int) -> Tuple[int, ...]:
    """Ascending integer coefficients of the monic cyclotomic polynomial."""
    poly = sympy.cyclotomic_poly(order, _ZETA, polys=True)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _reduce(vec: List[Fraction], order: int) -> Tuple[Fraction, ...]:
    phi = _cyclotomic(order)
    d = len(phi) - 1
    vec = list(vec) + [Fraction(0)] * max(0, d - len(vec))
    for k in range(len(vec) - 1, d - 1, -1):
        c = vec[k]
        if c:
            shift = k - d
            for t, p in enumerate(phi):
                if p:
                    vec[shift + t] -= c * p
    return tuple(vec[:d])


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise GermParseError(f"Not an exact rational: {value!r}")


class Scalar:
    """Element of Q(zeta_M), 4 | M; immutable."""

    __slots__ = ("_order", "_coeffs")

    def __init__(self, coeffs: Sequence[Fraction], order: int = 4):
        if order % 4:
            raise InvariantViolation(f"Cyclotomic order must be a multiple of 4: {order}")
        reduced = _reduce([_to_fraction(c) for c in coeffs], order)
        if order > 4:
            quarter = order // 4
            if quarter < len(reduced) and all(
                not c for k, c in enumerate(reduced) if k not in (0, quarter)
            ):
                reduced, order = (reduced[0], reduced[quarter]), 4
        self._order = order
        self._coeffs = reduced

    @classmethod
    def _fast(cls, coeffs: Tuple[Fraction, Fraction]) -> "Scalar":
        obj = cls.__new__(cls)
        obj._order = 4
        obj._coeffs = coeffs
        return obj

    # construction -----------------------------------------------------

    @classmethod
    def gaussian(cls, re_part=0, im_part=0) -> "Scalar":
        return cls((_to_fraction(re_part), _to_fraction(im_part)), 4)

    @classmethod
    def i(cls) -> "Scalar":
        return cls.gaussian(0, 1)

    @classmethod
    def root_of_unity(cls, m: int, k: int = 1) -> "Scalar":
        """zeta_m**k, computed in Q(zeta_lcm(4, m))."""
        order = _lcm(4, m)
        vec = [Fraction(0)] * order
        vec[(k * (order // m)) % order] = Fraction(1)
        return cls(vec, order)

    @classmethod
    def coerce(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.gaussian(value, 0)
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, sympy.Basic):
            return cls.from_sympy(value)
        raise GermParseError(f"Cannot interpret {value!r} as a scalar")

    @classmethod
    def from_sympy(cls, expr) -> "Scalar":
        re_part, im_part = sympy.expand(expr).as_real_imag()
        if not (re_part.is_Rational and im_part.is_Rational):
            raise GermParseError(f"Not an element of Q(i): {expr}")
        return cls.gaussian(_to_fraction(re_part), _to_fraction(im_part))

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Inverse of str(): 'a/b + c/d*i' or a sum of 'q*zeta_m**k' terms."""
        text = str(text).strip()
        if not text:
            raise GermParseError("Empty scalar string")
        orders = [int(m) for m in _ZETA_NAME.findall(text)]
        try:
            if not orders:
                return cls.from_sympy(sympy.sympify(text, locals={"i": sympy.I, "I": sympy.I}))
            order = 4
            for m in orders:
                order = _lcm(order, m)
            local = {"i": _ZETA ** (order // 4), "I": _ZETA ** (order // 4)}
            for m in set(orders):
                local[f"zeta_{m}"] = _ZETA ** (order // m)
            poly = sympy.Poly(sympy.expand(sympy.sympify(text, locals=local)), _ZETA, domain=sympy.QQ)
        except (sympy.SympifyError, TypeError, ValueError, sympy.PolynomialError) as exc:
            raise GermParseError(f"Invalid scalar: {text!r}") from exc
        coeffs = [_to_fraction(c) for c in reversed(poly.all_coeffs())]
        return cls(coeffs, order)

    # structure --------------------------------------------------------

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return self._coeffs

    def lift(self, order: int) -> Tuple[Fraction, ...]:
        """Power-basis coefficients in Q(zeta_order); order must be a multiple of self.order."""
        if order == self._order:
            return self._coeffs
        step = order // self._order
        vec = [Fraction(0)] * order
        for k, c in enumerate(self._coeffs):
            if c:
                vec[k * step] += c
        return _reduce(vec, order)

    def is_zero(self) -> bool:
        return not any(self._coeffs)

    def is_rational(self) -> bool:
        return not any(self._coeffs[1:])

    def is_gaussian(self) -> bool:
        return self._order == 4

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise InvariantViolation(f"Scalar {self} is not rational")
        return self._coeffs[0]

    def conjugate(self) -> "Scalar":
        order = self._order
        if order == 4:
            return Scalar((self._coeffs[0], -self._coeffs[1]), 4)
        vec = [Fraction(0)] * order
        for k, c in enumerate(self._coeffs):
            if c:
                vec[(order - k) % order] += c
        return Scalar(vec, order)

    def is_real(self) -> bool:
        return self == self.conjugate()

    def real_part(self) -> "Scalar":
        return (self + self.conjugate()) * Fraction(1, 2)

    def imag_part(self) -> "Scalar":
        return (self - self.conjugate()) / Scalar.gaussian(0, 2)

    def gaussian_parts(self) -> Tuple[Fraction, Fraction]:
        if self._order != 4:
            raise InvariantViolation(f"Scalar {self} is not in Q(i)")
        return self._coeffs[0], self._coeffs[1]

    def to_sympy(self):
        re_part, im_part = self.gaussian_parts()
        return sympy.Rational(re_part.numerator, re_part.denominator) + sympy.I * sympy.Rational(
            im_part.numerator, im_part.denominator
        )

    def to_interval(self, ctx=None):
        """(re, im) as intervals of ctx (default: the shared mpmath iv context)."""
        ctx = iv if ctx is None else ctx
        order = self._order
        re_iv = ctx.mpf(0)
        im_iv = ctx.mpf(0)
        for k, c in enumerate(self._coeffs):
            if not c:
                continue
            coef = ctx.mpf(c.numerator) / c.denominator
            if k == 0:
                re_iv += coef
                continue
            angle = 2 * ctx.pi * k / order
            re_iv += coef * ctx.cos(angle)
            im_iv += coef * ctx.sin(angle)
        return re_iv, im_iv

    # arithmetic -------------------------------------------------------

    def _common(self, other: "Scalar") -> Tuple[int, Tuple[Fraction, ...], Tuple[Fraction, ...]]:
        if self._order == other._order:
            return self._order, self._coeffs, other._coeffs
        order = _lcm(self._order, other._order)
        return order, self.lift(order), other.lift(order)

    def __add__(self, other) -> "Scalar":
        other = _as_scalar(other)
        if other is None:
            return NotImplemented
        order, a, b = self._common(other)
        if order == 4:
            return Scalar._fast((a[0] + b[0], a[1] + b[1]))
        return Scalar([p + q for p, q in zip(a, b)], order)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        if self._order == 4:
            return Scalar._fast((-self._coeffs[0], -self._coeffs[1]))
        return Scalar([-c for c in self._coeffs], self._order)

    def __sub__(self, other) -> "Scalar":
        other = _as_scalar(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        other = _as_scalar(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "Scalar":
        if isinstance(other, (int, Fraction)):
            return Scalar([c * other for c in self._coeffs], self._order)
        other = _as_scalar(other)
        if other is None:
            return NotImplemented
        order, a, b = self._common(other)
        if order == 4:
            ar, ai = a
            br, bi = b
            if not ai and not bi:
                return Scalar._fast((ar * br, Fraction(0)))
            return Scalar._fast((ar * br - ai * bi, ar * bi + ai * br))
        prod = [Fraction(0)] * (2 * len(a) - 1)
        for s, p in enumerate(a):
            if p:
                for t, q in enumerate(b):
                    if q:
                        prod[s + t] += p * q
        return Scalar(prod, order)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("Scalar division by zero")
        if self._order == 4:
            a, b = self._coeffs
            norm = a * a + b * b
            return Scalar((a / norm, -b / norm), 4)
        poly = sympy.Poly(
            [sympy.Rational(c.numerator, c.denominator) for c in reversed(self._coeffs)],
            _ZETA,
            domain=sympy.QQ,
        )
        modulus = sympy.Poly(list(reversed(_cyclotomic(self._order))), _ZETA, domain=sympy.QQ)
        inv = poly.invert(modulus)
        return Scalar([_to_fraction(sympy.Rational(c)) for c in reversed(inv.all_coeffs())], self._order)

    def __truediv__(self, other) -> "Scalar":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("Scalar division by zero")
            return Scalar([c / other for c in self._coeffs], self._order)
        other = _as_scalar(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        other = _as_scalar(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "Scalar":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = _as_scalar(other)
        if other is None:
            return NotImplemented
        _, a, b = self._common(other)
        return a == b

    def __ne__(self, other) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self._coeffs[0])
        return hash("non-rational scalar")

    def __bool__(self) -> bool:
        return not self.is_zero()

    # display ----------------------------------------------------------

    def __str__(self) -> str:
        if self._order == 4:
            a, b = self._coeffs
            if not b:
                return str(a)
            if b == 1:
                imag = "i"
            elif b == -1:
                imag = "-i"
            else:
                imag = f"{b}*i"
            if not a:
                return imag
            if b < 0:
                return f"{a} - {imag.lstrip('-')}"
            return f"{a} + {imag}"
        parts: List[str] = []
        for k, c in enumerate(self._coeffs):
            if not c:
                continue
            if k == 0:
                body = str(abs(c))
            else:
                power = f"zeta_{self._order}" if k == 1 else f"zeta_{self._order}**{k}"
                body = power if abs(c) == 1 else f"{abs(c)}*{power}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"


def _as_scalar(value) -> Optional[Scalar]:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction)):
        return Scalar.gaussian(value, 0)
    return None


ZERO = Scalar.gaussian(0, 0)
ONE = Scalar.gaussian(1, 0)
I_UNIT = Scalar.gaussian(0, 1)


def interval_context(prec: int) -> MPIntervalContext:
    """Interval context of its own at prec bits; the shared mpmath.iv precision is untouched."""
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def precision_ladder(cap: int) -> Iterator[int]:
    """START_PRECISION doubled up to the cap; the cap itself is always the last step."""
    prec = START_PRECISION
    while prec < cap:
        yield prec
        prec *= 2
    yield cap


def scalar_sign_of_real(x: Scalar, cap: Optional[int] = None) -> int:
    """
    Sign of a conjugation-fixed scalar under zeta_M -> exp(2*pi*i/M)

    Args:
        x: Scalar with conj(x) == x
        cap: Precision cap in bits (default from GERMFORGE_PRECISION_CAP)

    Returns:
        -1, 0 or +1

    Raises:
        InvariantViolation: If x is not real
        UndecidableError: If the interval still contains 0 at the cap
    """
    if not x.is_real():
        raise InvariantViolation(f"Sign requested for a non-real scalar: {x}")
    if x.is_zero():
        return 0
    if x.is_rational():
        value = x.rational()
        return 1 if value > 0 else -1
    cap = cap or resolve_precision_cap()
    for prec in precision_ladder(cap):
        re_iv, _ = x.to_interval(interval_context(prec))
        if (re_iv > 0) is True:
            return 1
        if (re_iv < 0) is True:
            return -1
        logger.debug("Sign of %s undecided at %d bits", x, prec)
    raise UndecidableError(f"Sign of {x} undecided at {cap} bits")


# ----------------------------------------------------------------------
# exponents


def degree(e: Exp) -> int:
    return e[0] + e[1] + e[2]


def add_exp(a: Exp, b: Exp) -> Exp:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def unit_exp(axis: int, power: int = 1) -> Exp:
    e = [0, 0, 0]
    e[axis] = power
    return tuple(e)  # type: ignore[return-value]


def monomial_str(e: Exp) -> str:
    parts = []
    for name, power in zip(VARIABLES, e):
        if power == 1:
            parts.append(name)
        elif power:
            parts.append(f"{name}^{power}")
    return "*".join(parts) or "1"


# ----------------------------------------------------------------------
# series


class TruncSeries:
    """Sparse truncated series; terms of degree > N are dropped."""

    __slots__ = ("_terms", "_N")

    def __init__(self, terms: Optional[Mapping[Exp, Number]] = None, N: int = EXACT_DEGREE):
        if N < -1:
            N = -1
        clean: Dict[Exp, Scalar] = {}
        if terms:
            for e, c in terms.items():
                if degree(e) > N:
                    continue
                c = Scalar.coerce(c)
                if not c.is_zero():
                    clean[tuple(e)] = c  # type: ignore[index]
        self._terms = clean
        self._N = N

    @classmethod
    def _raw(cls, terms: Dict[Exp, Scalar], N: int) -> "TruncSeries":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._N = N
        return obj

    @classmethod
    def zero(cls, N: int = EXACT_DEGREE) -> "TruncSeries":
        return cls._raw({}, N)

    @classmethod
    def constant(cls, value: Number, N: int = EXACT_DEGREE) -> "TruncSeries":
        return cls({(0, 0, 0): value}, N)

    @classmethod
    def one(cls, N: int = EXACT_DEGREE) -> "TruncSeries":
        return cls.constant(1, N)

    @classmethod
    def variable(cls, axis: int, N: int = EXACT_DEGREE) -> "TruncSeries":
        return cls({unit_exp(axis): 1}, N)

    @classmethod
    def monomial(cls, e: Exp, coeff: Number = 1, N: int = EXACT_DEGREE) -> "TruncSeries":
        return cls({tuple(e): coeff}, N)

    @classmethod
    def univariate(cls, coeffs: Sequence[Number], axis: int, N: int = EXACT_DEGREE) -> "TruncSeries":
        return cls({unit_exp(axis, k): c for k, c in enumerate(coeffs)}, N)

    # structure --------------------------------------------------------

    @property
    def N(self) -> int:
        return self._N

    @property
    def val(self) -> int:
        if not self._terms:
            return self._N + 1
        return min(degree(e) for e in self._terms)

    def items(self) -> Iterator[Tuple[Exp, Scalar]]:
        return iter(sorted(self._terms.items()))

    def terms(self) -> Dict[Exp, Scalar]:
        return dict(self._terms)

    def coefficient(self, e: Exp) -> Scalar:
        if degree(e) > self._N:
            raise InvariantViolation(
                f"Coefficient of {monomial_str(e)} requested beyond certified degree {self._N}"
            )
        return self._terms.get(tuple(e), ZERO)  # type: ignore[arg-type]

    def constant_term(self) -> Scalar:
        return self._terms.get((0, 0, 0), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def max_degree(self) -> int:
        return max((degree(e) for e in self._terms), default=-1)

    def truncate(self, N: int) -> "TruncSeries":
        if N >= self._N:
            return self
        return TruncSeries._raw({e: c for e, c in self._terms.items() if degree(e) <= N}, N)

    def with_degree(self, N: int) -> "TruncSeries":
        """Same known terms, certified degree lowered (or raised for exact polynomials)."""
        return TruncSeries._raw({e: c for e, c in self._terms.items() if degree(e) <= N}, N)

    def homogeneous_part(self, d: int) -> "TruncSeries":
        if d > self._N:
            raise InvariantViolation(f"Homogeneous part {d} beyond certified degree {self._N}")
        return TruncSeries._raw({e: c for e, c in self._terms.items() if degree(e) == d}, EXACT_DEGREE)

    def monomial_content(self) -> Exp:
        if not self._terms:
            return (0, 0, 0)
        return tuple(min(e[k] for e in self._terms) for k in range(3))  # type: ignore[return-value]

    def depends_only_on(self, axis: int) -> bool:
        return all(e[k] == 0 for e in self._terms for k in range(3) if k != axis)

    def as_univariate(self, axis: int) -> List[Scalar]:
        """Coefficient list (index = power) of a single-axis series, up to N."""
        if not self.depends_only_on(axis):
            raise InvariantViolation(f"Series depends on more than {VARIABLES[axis]}")
        top = min(self._N, max((e[axis] for e in self._terms), default=0))
        coeffs = [ZERO] * (top + 1)
        for e, c in self._terms.items():
            coeffs[e[axis]] = c
        return coeffs

    def restrict_to_axis(self, axis: int) -> "TruncSeries":
        """Set the other two variables to zero."""
        return TruncSeries._raw(
            {e: c for e, c in self._terms.items() if all(e[k] == 0 for k in range(3) if k != axis)},
            self._N,
        )

    def map_coefficients(self, fn) -> "TruncSeries":
        return TruncSeries({e: fn(c) for e, c in self._terms.items()}, self._N)

    def scale(self, c: Number) -> "TruncSeries":
        c = Scalar.coerce(c)
        if c.is_zero():
            return TruncSeries.zero(self._N)
        return TruncSeries._raw({e: v * c for e, v in self._terms.items()}, self._N)

    def shift(self, e: Exp) -> "TruncSeries":
        """Multiply by the monomial x^e (certified degree rises by |e|)."""
        N = self._N if self._N >= EXACT_DEGREE else self._N + degree(e)
        return TruncSeries._raw({add_exp(k, e): c for k, c in self._terms.items()}, N)

    def derivative(self, axis: int) -> "TruncSeries":
        out: Dict[Exp, Scalar] = {}
        for e, c in self._terms.items():
            if e[axis]:
                f = list(e)
                f[axis] -= 1
                out[tuple(f)] = c * e[axis]  # type: ignore[index]
        N = self._N if self._N >= EXACT_DEGREE else self._N - 1
        return TruncSeries._raw(out, N)

    def evaluate(self, point: Sequence[Number]) -> Scalar:
        """Value of an exact polynomial at a point."""
        total = ZERO
        point = [Scalar.coerce(p) for p in point]
        for e, c in self._terms.items():
            term = c
            for k in range(3):
                if e[k]:
                    term = term * point[k] ** e[k]
            total = total + term
        return total

    # arithmetic -------------------------------------------------------

    def __add__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(Scalar.coerce(other))
        N = min(self._N, other._N)
        out = {e: c for e, c in self._terms.items() if degree(e) <= N}
        for e, c in other._terms.items():
            if degree(e) > N:
                continue
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
        return TruncSeries._raw(out, N)

    __radd__ = __add__

    def __neg__(self) -> "TruncSeries":
        return TruncSeries._raw({e: -c for e, c in self._terms.items()}, self._N)

    def __sub__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(Scalar.coerce(other))
        return self + (-other)

    def __rsub__(self, other) -> "TruncSeries":
        return (-self) + other

    def __mul__(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            return series_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TruncSeries":
        if n < 0:
            raise InvariantViolation("Negative powers of series are not supported; use series_invert_unit")
        result = TruncSeries.one(self._N)
        base = self
        while n:
            if n & 1:
                result = series_mul(result, base)
            n >>= 1
            if n:
                base = series_mul(base, base)
        return result

    def equals_to(self, other: "TruncSeries", N: Optional[int] = None) -> bool:
        """Coefficient equality through degree N (default: the smaller certified degree)."""
        if N is None:
            N = min(self._N, other._N)
        a = {e: c for e, c in self._terms.items() if degree(e) <= N}
        b = {e: c for e, c in other._terms.items() if degree(e) <= N}
        return a == b

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self._N == other._N and self._terms == other._terms

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items(), key=lambda item: (degree(item[0]), item[0])):
            mono = monomial_str(e)
            if mono == "1":
                parts.append(f"({c})")
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TruncSeries({str(self)}, N={self._N})"


def series_mul(a: TruncSeries, b: TruncSeries, N: Optional[int] = None) -> TruncSeries:
    """
    Product of two series

    The certified degree is min(N_a + val(b), N_b + val(a)), optionally capped by N.
    """
    va, vb = a.val, b.val
    bound = min(a.N + vb, b.N + va)
    if N is not None:
        bound = min(bound, N)
    bound = min(bound, EXACT_DEGREE)
    out: Dict[Exp, Scalar] = {}
    if not a._terms or not b._terms:
        return TruncSeries._raw(out, bound)
    b_sorted = sorted(b._terms.items(), key=lambda item: degree(item[0]))
    for ea, ca in a._terms.items():
        da = degree(ea)
        if da + vb > bound:
            continue
        for eb, cb in b_sorted:
            if da + degree(eb) > bound:
                break
            e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2])
            prod = ca * cb
            prev = out.get(e)
            out[e] = prod if prev is None else prev + prod
    return TruncSeries._raw({e: c for e, c in out.items() if not c.is_zero()}, bound)


def series_invert_unit(a: TruncSeries, N: Optional[int] = None) -> TruncSeries:
    """
    Multiplicative inverse of a unit series

    Raises:
        InvariantViolation: If a(0) = 0
    """
    a0 = a.constant_term()
    if a0.is_zero():
        raise InvariantViolation(f"Series is not a unit (zero constant term): {a}")
    bound = a.N if N is None else min(a.N, N)
    if bound >= EXACT_DEGREE:
        raise InvariantViolation("Inverting an exact polynomial needs an explicit degree N")
    inv0 = a0.inverse()
    rest = (a - TruncSeries.constant(a0, a.N)).scale(-inv0).truncate(bound)
    result = TruncSeries.constant(inv0, bound)
    if rest.is_zero():
        return result
    term = TruncSeries.one(bound)
    total = TruncSeries.one(bound)
    for _ in range(bound // max(rest.val, 1)):
        term = series_mul(term, rest, bound)
        if term.is_zero():
            break
        total = total + term
    return total.scale(inv0).with_degree(bound)


def series_div_monomial(a: TruncSeries, e: Exp) -> TruncSeries:
    """
    Exact quotient by x^e; the certified degree drops by |e|

    Raises:
        InvariantViolation: If some known term is not divisible
    """
    out: Dict[Exp, Scalar] = {}
    for k, c in a._terms.items():
        if k[0] < e[0] or k[1] < e[1] or k[2] < e[2]:
            raise InvariantViolation(
                f"Term {c}*{monomial_str(k)} not divisible by {monomial_str(e)}"
            )
        out[(k[0] - e[0], k[1] - e[1], k[2] - e[2])] = c
    N = a.N if a.N >= EXACT_DEGREE else a.N - degree(e)
    return TruncSeries._raw(out, N)


def divides(e: Exp, series: TruncSeries) -> bool:
    return all(k[0] >= e[0] and k[1] >= e[1] and k[2] >= e[2] for k in series._terms)


def _compose_degree(a: TruncSeries, s: Sequence[TruncSeries]) -> int:
    vmin = min(c.val for c in s)
    bound = EXACT_DEGREE if a.N >= EXACT_DEGREE else (a.N + 1) * vmin - 1
    for axis in range(3):
        if s[axis].N >= EXACT_DEGREE:
            continue
        degs = [degree(e) for e in a._terms if e[axis]]
        if degs:
            bound = min(bound, s[axis].N + (min(degs) - 1) * vmin)
    return bound


def series_compose(a: TruncSeries, s: Sequence[TruncSeries], N: Optional[int] = None) -> TruncSeries:
    """
    Substitution a(s_x, s_y, s_z)

    Args:
        a: Outer series
        s: Three series of valuation >= 1
        N: Optional cap on the certified degree

    Raises:
        InvariantViolation: If a component of s is a unit
    """
    for axis, comp in enumerate(s):
        if not comp.is_zero() and comp.constant_term():
            raise InvariantViolation(
                f"Substitution component {VARIABLES[axis]} is a unit: {comp}"
            )
    bound = _compose_degree(a, s)
    if N is not None:
        bound = min(bound, N)
    if bound >= EXACT_DEGREE and any(c.N >= EXACT_DEGREE for c in s):
        bound = EXACT_DEGREE
    if all(len(c._terms) == 1 for c in s):
        return _compose_monomial(a, s, bound)
    powers: List[List[TruncSeries]] = [[TruncSeries.one(bound)] for _ in range(3)]

    def power(axis: int, n: int) -> TruncSeries:
        cache = powers[axis]
        while len(cache) <= n:
            cache.append(series_mul(cache[-1], s[axis], bound))
        return cache[n]

    vals = [max(c.val, 1) for c in s]
    partial: Dict[Tuple[int, int], TruncSeries] = {}
    total: Dict[Exp, Scalar] = {}
    for e, c in a._terms.items():
        if e[0] * vals[0] + e[1] * vals[1] + e[2] * vals[2] > bound:
            continue
        key = (e[0], e[1])
        xy = partial.get(key)
        if xy is None:
            xy = series_mul(power(0, e[0]), power(1, e[1]), bound)
            partial[key] = xy
        term = series_mul(xy, power(2, e[2]), bound) if e[2] else xy
        for k, v in term._terms.items():
            prod = v * c
            prev = total.get(k)
            total[k] = prod if prev is None else prev + prod
    return TruncSeries._raw({k: v for k, v in total.items() if not v.is_zero()}, bound)


def _compose_monomial(a: TruncSeries, s: Sequence[TruncSeries], bound: int) -> TruncSeries:
    images = [next(iter(c._terms.items())) for c in s]
    out: Dict[Exp, Scalar] = {}
    for e, c in a._terms.items():
        k = (0, 0, 0)
        coef = c
        for axis in range(3):
            if e[axis]:
                me, mc = images[axis]
                k = add_exp(k, tuple(p * e[axis] for p in me))  # type: ignore[arg-type]
                coef = coef * mc ** e[axis]
        if degree(k) > bound:
            continue
        prev = out.get(k)
        out[k] = coef if prev is None else prev + coef
    return TruncSeries._raw({k: v for k, v in out.items() if not v.is_zero()}, bound)


# ----------------------------------------------------------------------
# one-variable helpers (coefficient lists, index = power)


def uni_mul(a: Sequence[Scalar], b: Sequence[Scalar], n: int) -> List[Scalar]:
    out = [ZERO] * (n + 1)
    for i, p in enumerate(a[: n + 1]):
        if p.is_zero():
            continue
        for j, q in enumerate(b[: n + 1 - i]):
            if not q.is_zero():
                out[i + j] = out[i + j] + p * q
    return out


def uni_inverse(a: Sequence[Scalar], n: int) -> List[Scalar]:
    """Multiplicative inverse of a unit coefficient list through t^n."""
    if a[0].is_zero():
        raise InvariantViolation("Univariate series is not a unit")
    inv0 = a[0].inverse()
    out = [ZERO] * (n + 1)
    out[0] = inv0
    for k in range(1, n + 1):
        acc = ZERO
        for j in range(1, min(k, len(a) - 1) + 1):
            acc = acc + a[j] * out[k - j]
        out[k] = -acc * inv0
    return out


def uni_compose(a: Sequence[Scalar], b: Sequence[Scalar], n: int) -> List[Scalar]:
    """a(b(t)) through t^n; b(0) must vanish."""
    if len(b) and not b[0].is_zero():
        raise InvariantViolation("Inner univariate series must vanish at 0")
    out = [ZERO] * (n + 1)
    power = [ONE] + [ZERO] * n
    for k, c in enumerate(a[: n + 1]):
        if k:
            power = uni_mul(power, b, n)
        if not c.is_zero():
            out = [o + c * p for o, p in zip(out, power)]
    return out


def uni_reverse(a: Sequence[Scalar], n: int) -> List[Scalar]:
    """Compositional inverse of t + O(t^2) through t^n."""
    if len(a) < 2 or a[1] != ONE or not a[0].is_zero():
        raise InvariantViolation("Compositional inverse needs a series t + O(t^2)")
    w = [ZERO, ONE] + [ZERO] * (n - 1)
    for _ in range(n):
        aw = uni_compose(a, w, n)
        w = [wi - (ai - ti) for wi, ai, ti in zip(w, aw, [ZERO, ONE] + [ZERO] * (n - 1))]
    return w


def uni_log_unit(a: Sequence[Scalar], n: int) -> List[Scalar]:
    """log(a) for a = 1 + O(t), through t^n."""
    if a[0] != ONE:
        raise InvariantViolation("Logarithm needs a series 1 + O(t)")
    u = [ZERO] + list(a[1 : n + 1]) + [ZERO] * max(0, n + 1 - len(a))
    out = [ZERO] * (n + 1)
    power = [ONE] + [ZERO] * n
    for k in range(1, n + 1):
        power = uni_mul(power, u, n)
        if all(p.is_zero() for p in power):
            break
        sign = 1 if k % 2 else -1
        out = [o + p * Fraction(sign, k) for o, p in zip(out, power)]
    return out


def uni_order(a: Sequence[Scalar]) -> Optional[int]:
    for k, c in enumerate(a):
        if not c.is_zero():
            return k
    return None


# ----------------------------------------------------------------------
# sympy bridges

SYMBOLS = sympy.symbols("x y z")


def to_sympy(series: TruncSeries, gens: Sequence = SYMBOLS):
    """Polynomial expression of the known terms (coefficients must lie in Q(i))."""
    expr = sympy.Integer(0)
    for e, c in series.items():
        expr += c.to_sympy() * gens[0] ** e[0] * gens[1] ** e[1] * gens[2] ** e[2]
    return expr


def from_sympy(expr, N: int = EXACT_DEGREE, gens: Sequence = SYMBOLS) -> TruncSeries:
    """Series from a polynomial expression with coefficients in Q(i)."""
    poly = sympy.Poly(sympy.expand(expr), *gens)
    terms = {tuple(int(p) for p in monom): Scalar.from_sympy(coeff) for monom, coeff in poly.terms()}
    return TruncSeries(terms, N)


def terms_from_table(table: Iterable[Tuple[Sequence[int], Number]]) -> Dict[Exp, Scalar]:
    out: Dict[Exp, Scalar] = {}
    for e, c in table:
        key = tuple(int(p) for p in e)
        out[key] = out.get(key, ZERO) + Scalar.coerce(c)  # type: ignore[index]
    return out
