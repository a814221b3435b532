"""
Tangent-to-the-identity germs of (C^3, 0).

A Germ keeps its reduced displacement F' = (f - id) / l, where l = x^a y^b z^c
is the marked divisor monomial, together with the certified degree of F'.
Blow-up lifts divide by chart variables over and over; working with F'
keeps the stored series small and the degree bookkeeping explicit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .algebra import (
    EXACT_DEGREE,
    ONE,
    ZERO,
    Exp,
    Scalar,
    TruncSeries,
    degree,
    divides,
    monomial_str,
    series_compose,
    series_div_monomial,
    terms_from_table,
)
from .validators import InsufficientPrecisionError, InvariantViolation, validate_divisor

logger = logging.getLogger(__name__)

Map = Tuple[TruncSeries, TruncSeries, TruncSeries]
Matrix3 = List[List[Scalar]]


@dataclass(frozen=True, eq=False)
class Germ:
    """f = id + l * F' with l the divisor monomial."""

    reduced: Map  # F' components, certified through reduced_degree
    divisor: Exp = (0, 0, 0)

    @property
    def reduced_degree(self) -> int:
        return min(comp.N for comp in self.reduced)

    @property
    def N(self) -> int:
        return self.reduced_degree + degree(self.divisor)

    @property
    def displacement(self) -> Map:
        return tuple(comp.shift(self.divisor) for comp in self.reduced)  # type: ignore[return-value]

    @property
    def coords(self) -> Map:
        return tuple(  # type: ignore[return-value]
            TruncSeries.variable(k, self.N) + comp for k, comp in enumerate(self.displacement)
        )

    def reduced_constants(self) -> Tuple[Scalar, Scalar, Scalar]:
        """F'(0); nonzero means the saturated generator is regular at the origin."""
        return tuple(comp.constant_term() for comp in self.reduced)  # type: ignore[return-value]

    def is_identity(self) -> bool:
        return all(comp.is_zero() for comp in self.reduced)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "divisor": list(self.divisor),
            "reduced_degree": self.reduced_degree,
            "components": [str(comp) for comp in self.reduced],
        }


@dataclass
class HomogeneousData:
    """Smallest-degree data of f - id."""

    H: Map  # homogeneous part of smallest degree of f - id
    ell: Exp  # exponents of the monomial factor l (divisor plus content)
    H_ell: Map  # homogeneous part of smallest degree of (f - id) / l
    order: int
    pure_order: int

    def to_dict(self) -> dict:
        return {
            "H": [str(h) for h in self.H],
            "ell": list(self.ell),
            "H_ell": [str(h) for h in self.H_ell],
            "order": self.order,
            "pure_order": self.pure_order,
        }


def _check_tangent(reduced: Map, divisor: Exp) -> None:
    shift = degree(divisor)
    for k, comp in enumerate(reduced):
        if comp.val + shift < 2:
            offending = min(comp.items(), key=lambda item: degree(item[0]))
            raise InvariantViolation(
                f"Germ is not tangent to the identity: component {k} of f - id has the term "
                f"{offending[1]}*{monomial_str(tuple(a + b for a, b in zip(offending[0], divisor)))}"
            )


def germ_from_displacement(displacement: Sequence[TruncSeries], divisor: Exp = (0, 0, 0)) -> Germ:
    """
    Build a germ from f - id

    Raises:
        InvariantViolation: If f is not tangent to the identity or l does not divide f - id
    """
    divisor = validate_divisor(divisor)
    reduced = []
    for k, comp in enumerate(displacement):
        if not divides(divisor, comp):
            raise InvariantViolation(
                f"Divisor {monomial_str(divisor)} does not divide component {k} of f - id"
            )
        reduced.append(series_div_monomial(comp, divisor))
    N = min(c.N for c in reduced)
    reduced_map = tuple(c.with_degree(N) for c in reduced)
    _check_tangent(reduced_map, divisor)  # type: ignore[arg-type]
    return Germ(reduced_map, divisor)  # type: ignore[arg-type]


def germ_from_map(coords: Sequence[TruncSeries], divisor: Exp = (0, 0, 0)) -> Germ:
    disp = [comp - TruncSeries.variable(k, comp.N) for k, comp in enumerate(coords)]
    return germ_from_displacement(disp, divisor)


def make_germ(table: Sequence[Iterable], N: int, divisor: Sequence[int] = (0, 0, 0)) -> Germ:
    """
    Validated germ from coefficient tables of f - id

    Args:
        table: Three iterables of (exponents, scalar) pairs, one per component of f - id
        N: Truncation total degree
        divisor: Marked divisor exponents

    Returns:
        Germ

    Raises:
        InvariantViolation: If an invariant fails (named in the message)
    """
    if len(table) != 3:
        raise InvariantViolation(f"Expected three components, got {len(table)}")
    disp = [TruncSeries(terms_from_table(comp), N) for comp in table]
    return germ_from_displacement(disp, tuple(divisor))  # type: ignore[arg-type]


def identity_germ(N: int, divisor: Exp = (0, 0, 0)) -> Germ:
    M = N - degree(divisor)
    return Germ(tuple(TruncSeries.zero(M) for _ in range(3)), divisor)  # type: ignore[arg-type]


def homogeneous_data(f: Germ) -> HomogeneousData:
    """
    Orders and smallest-degree homogeneous parts of f - id

    Raises:
        InvariantViolation: If f = id to the certified degree
        InsufficientPrecisionError: If the pure order exceeds the certified degree
    """
    if f.is_identity():
        raise InvariantViolation(f"f = id to order {f.N}")
    content = _joint_content(f.reduced)
    ell = tuple(a + b for a, b in zip(f.divisor, content))
    F_ell = [series_div_monomial(c, content) for c in f.reduced]
    pure_order = min(c.val for c in F_ell)
    if pure_order > min(c.N for c in F_ell):
        raise InsufficientPrecisionError(
            f"Pure order not certified: jet known through degree {min(c.N for c in F_ell)}"
        )
    H_ell = tuple(c.homogeneous_part(pure_order) for c in F_ell)
    order = pure_order + degree(ell)  # type: ignore[arg-type]
    H = tuple(h.shift(ell) for h in H_ell)  # type: ignore[arg-type]
    return HomogeneousData(H, ell, H_ell, order, pure_order)  # type: ignore[arg-type]


def _joint_content(series: Iterable[TruncSeries]) -> Exp:
    content: Optional[List[int]] = None
    for comp in series:
        if comp.is_zero():
            continue
        c = comp.monomial_content()
        content = list(c) if content is None else [min(a, b) for a, b in zip(content, c)]
    return tuple(content or (0, 0, 0))  # type: ignore[return-value]


# ----------------------------------------------------------------------
# maps


def identity_map(N: int = EXACT_DEGREE) -> Map:
    return tuple(TruncSeries.variable(k, N) for k in range(3))  # type: ignore[return-value]


def linear_map(matrix: Sequence[Sequence]) -> Map:
    """x_i -> sum_j matrix[i][j] x_j as exact polynomials."""
    return tuple(  # type: ignore[return-value]
        TruncSeries({tuple(1 if t == j else 0 for t in range(3)): Scalar.coerce(matrix[i][j]) for j in range(3)})
        for i in range(3)
    )


def compose_maps(a: Sequence[TruncSeries], b: Sequence[TruncSeries], N: Optional[int] = None) -> Map:
    """a o b, componentwise."""
    return tuple(series_compose(comp, b, N) for comp in a)  # type: ignore[return-value]


def linear_part(phi: Sequence[TruncSeries]) -> Matrix3:
    return [[comp.coefficient(tuple(1 if t == j else 0 for t in range(3))) for j in range(3)] for comp in phi]


def det3(m: Matrix3) -> Scalar:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def inverse3(m: Matrix3) -> Matrix3:
    det = det3(m)
    if det.is_zero():
        raise InvariantViolation("Coordinate change has a non-invertible linear part")
    inv_det = det.inverse()
    cof = [[ZERO] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != i]
            cols = [c for c in range(3) if c != j]
            minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]]
            sign = ONE if (i + j) % 2 == 0 else -ONE
            cof[i][j] = sign * minor
    return [[cof[j][i] * inv_det for j in range(3)] for i in range(3)]


def map_inverse(phi: Sequence[TruncSeries], N: int) -> Map:
    """
    Compositional inverse of a coordinate change with invertible linear part

    Fixed-point iteration psi = A^-1 (x - (phi - A x) o psi), one degree per step.
    """
    for k, comp in enumerate(phi):
        if comp.constant_term():
            raise InvariantViolation(f"Coordinate change does not fix the origin (component {k})")
    A = linear_part(phi)
    A_inv = inverse3(A)
    lin = linear_map(A)
    nonlinear = [(comp - l).truncate(N) for comp, l in zip(phi, lin)]
    inv_lin = linear_map(A_inv)
    if all(c.is_zero() for c in nonlinear):
        return inv_lin
    psi = tuple(c.with_degree(N) for c in inv_lin)
    for _ in range(N):
        correction = [series_compose(c, psi, N) for c in nonlinear]
        rhs = [TruncSeries.variable(k, N) - correction[k] for k in range(3)]
        psi = tuple(
            sum((rhs[j].scale(A_inv[i][j]) for j in range(3)), TruncSeries.zero(N)) for i in range(3)
        )
    return psi  # type: ignore[return-value]


def conjugate(
    f: Germ,
    phi: Sequence[TruncSeries],
    divisor: Optional[Exp] = None,
    N: Optional[int] = None,
    inverse: Optional[Sequence[TruncSeries]] = None,
) -> Germ:
    """
    phi^-1 o f o phi

    Args:
        f: Germ
        phi: Coordinate change (three series of valuation 1 with invertible linear part)
        divisor: Divisor of the result (default: f.divisor)
        N: Working degree (default: f.N)
        inverse: phi^-1 when known in closed form (skips the fixed-point inversion)

    Returns:
        Conjugated germ with its certified degree

    Raises:
        InvariantViolation: If phi is not invertible or the divisor does not divide
    """
    work = f.N if N is None else min(N, f.N)
    psi = map_inverse(phi, work) if inverse is None else tuple(c.truncate(work) for c in inverse)
    disp = [c.truncate(work) for c in f.displacement]
    moved = [series_compose(c, phi, work) for c in disp]
    image = [phi[k].truncate(work) + moved[k] for k in range(3)]
    g = compose_maps(psi, image, work)
    g_disp = [g[k] - TruncSeries.variable(k, g[k].N) for k in range(3)]
    target = f.divisor if divisor is None else tuple(divisor)
    logger.debug("Conjugated germ to degree %d with divisor %s", min(c.N for c in g_disp), target)
    return germ_from_displacement(g_disp, target)  # type: ignore[arg-type]


def iterate(f: Germ, n: int) -> Germ:
    """n-fold composition f o ... o f."""
    if n < 1:
        raise InvariantViolation(f"Iteration count must be positive: {n}")
    coords = f.coords
    result = coords
    for _ in range(n - 1):
        result = compose_maps(coords, result, f.N)
    disp = [result[k] - TruncSeries.variable(k, result[k].N) for k in range(3)]
    return germ_from_displacement(disp, f.divisor)
