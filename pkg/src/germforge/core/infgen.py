"""
Formal infinitesimal generators: log/exp, saturation and linear-part analysis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import sympy

from .algebra import (
    ONE,
    ZERO,
    Exp,
    Scalar,
    TruncSeries,
    degree,
    divides,
    monomial_str,
    series_div_monomial,
    series_mul,
    unit_exp,
)
from .germ import Germ, Map, germ_from_map
from .validators import InsufficientPrecisionError, InvariantViolation

logger = logging.getLogger(__name__)

LAMBDA = sympy.Symbol("lambda")

# Verdicts of singularity_quality
REGULAR = "regular"
CANONICAL = "canonical"
RADIAL = "radial"
NON_LOG_CANONICAL = "non_log_canonical"


@dataclass(frozen=True, eq=False)
class VectorField:
    """sum comps[k] d/dx_k, already divided by x^divisor."""

    comps: Map
    divisor: Exp = (0, 0, 0)

    @property
    def N(self) -> int:
        return min(c.N for c in self.comps)

    @property
    def val(self) -> int:
        return min(c.val for c in self.comps)

    def apply(self, g: TruncSeries, N: Optional[int] = None) -> TruncSeries:
        """The derivation chi(g) = sum chi_k dg/dx_k."""
        total: Optional[TruncSeries] = None
        for k in range(3):
            if self.comps[k].is_zero():
                continue
            dg = g.derivative(k)
            if dg.is_zero():
                continue
            term = series_mul(self.comps[k], dg, N)
            total = term if total is None else total + term
        if total is None:
            bound = g.N if N is None else min(g.N, N)
            return TruncSeries.zero(bound)
        return total

    def unsaturated(self) -> "VectorField":
        return VectorField(tuple(c.shift(self.divisor) for c in self.comps), (0, 0, 0))  # type: ignore[arg-type]

    def truncate(self, N: int) -> "VectorField":
        return VectorField(tuple(c.truncate(N) for c in self.comps), self.divisor)  # type: ignore[arg-type]

    def to_dict(self) -> dict:
        return {"N": self.N, "divisor": list(self.divisor), "components": [str(c) for c in self.comps]}


@dataclass
class LinearPartReport:
    """Spectral data of the linear part of a vector field at the origin."""

    matrix: List[List[Scalar]]
    charpoly: List[Scalar]  # descending coefficients, monic
    eigenvalues: Optional[List[Scalar]]  # with multiplicity, None when not all in Q(i)
    unresolved_factors: List[str] = field(default_factory=list)
    rank: int = 0
    nilpotency_index: Optional[int] = None
    regular: bool = False
    constant_term: Tuple[Scalar, Scalar, Scalar] = (ZERO, ZERO, ZERO)

    @property
    def is_nilpotent(self) -> bool:
        return self.nilpotency_index is not None

    def to_dict(self) -> dict:
        return {
            "regular": self.regular,
            "matrix": [[str(c) for c in row] for row in self.matrix],
            "charpoly": [str(c) for c in self.charpoly],
            "eigenvalues": None if self.eigenvalues is None else [str(e) for e in self.eigenvalues],
            "unresolved_factors": list(self.unresolved_factors),
            "rank": self.rank,
            "nilpotency_index": self.nilpotency_index,
        }


def exp_field(chi: VectorField, N: Optional[int] = None, divisor: Exp = (0, 0, 0)) -> Germ:
    """
    Time-1 flow sum_n chi^n(x_k)/n!

    Args:
        chi: Vector field of valuation >= 2 (after undoing any saturation)
        N: Degree cap (default: certified degree of chi)
        divisor: Divisor marked on the resulting germ

    Raises:
        InvariantViolation: If val(chi) < 2
    """
    field_ = chi.unsaturated()
    if field_.val < 2:
        raise InvariantViolation(f"exp needs a field of valuation >= 2, got {field_.val}")
    bound = field_.N if N is None else min(N, field_.N)
    coords = []
    for k in range(3):
        term = TruncSeries.variable(k, bound)
        total = term
        n = 0
        while True:
            n += 1
            term = field_.apply(term, bound).scale(Fraction(1, n))
            if term.is_zero():
                break
            total = total + term
        coords.append(total.with_degree(bound))
    return germ_from_map(coords, divisor)


def log_germ(f: Germ, N: Optional[int] = None) -> VectorField:
    """
    Infinitesimal generator of f, degree by degree

    The degree-d part of chi is F_d - [exp(chi_<d) - id]_d.  Below 2*val(F) - 1
    the exp correction vanishes and chi agrees with f - id.

    Args:
        f: Tangent-to-the-identity germ
        N: Target degree (default f.N)
    """
    bound = f.N if N is None else min(N, f.N)
    disp = [c.truncate(bound) for c in f.displacement]
    v = min(c.val for c in disp)
    if v > bound:
        return VectorField(tuple(TruncSeries.zero(bound) for _ in range(3)))  # type: ignore[arg-type]
    direct = min(bound, 2 * v - 2)
    chi = [c.truncate(direct).with_degree(bound) for c in disp]
    for d in range(direct + 1, bound + 1):
        partial = VectorField(tuple(c.with_degree(d) for c in chi))  # type: ignore[arg-type]
        flow = exp_field(partial, d).displacement
        for k in range(3):
            diff = (disp[k].truncate(d) - flow[k]).truncate(d)
            part = {e: c for e, c in diff.items() if degree(e) == d}
            if part:
                chi[k] = chi[k] + TruncSeries(part, bound)
    logger.debug("Computed generator to degree %d", bound)
    return VectorField(tuple(c.with_degree(bound) for c in chi))  # type: ignore[arg-type]


def saturate(chi: VectorField, e: Exp) -> VectorField:
    """
    Divide every component by x^e

    Raises:
        InvariantViolation: If x^e does not divide some component
    """
    comps = []
    for k, comp in enumerate(chi.comps):
        if not divides(e, comp):
            raise InvariantViolation(
                f"Saturation by {monomial_str(e)} fails on component {k}: {comp}"
            )
        comps.append(series_div_monomial(comp, e))
    divisor = tuple(a + b for a, b in zip(chi.divisor, e))
    return VectorField(tuple(comps), divisor)  # type: ignore[arg-type]


def saturated_generator(f: Germ, jet: int = 1) -> VectorField:
    """
    Generator of f saturated by the marked divisor, certified through degree jet

    Raises:
        InsufficientPrecisionError: If f is not known far enough
    """
    target = degree(f.divisor) + jet
    if target > f.N:
        raise InsufficientPrecisionError(
            f"Saturated generator to degree {jet} needs N >= {target}, germ known to {f.N}"
        )
    return saturate(log_germ(f, target), f.divisor)


def linear_part(chi: VectorField) -> LinearPartReport:
    """
    Linear part at the origin with exact spectral data

    A nonzero constant term yields a report with regular=True.
    """
    if chi.N < 1:
        raise InsufficientPrecisionError("Linear part needs the field to degree 1")
    constants = tuple(c.constant_term() for c in chi.comps)
    matrix = [[chi.comps[i].coefficient(unit_exp(j)) for j in range(3)] for i in range(3)]
    if any(not c.is_zero() for c in constants):
        return LinearPartReport(matrix, [], None, regular=True, constant_term=constants, rank=0)  # type: ignore[arg-type]
    sym = sympy.Matrix([[c.to_sympy() for c in row] for row in matrix])
    poly = sym.charpoly(LAMBDA)
    charpoly = [Scalar.from_sympy(c) for c in poly.all_coeffs()]
    eigenvalues, unresolved = _eigenvalues(poly.as_expr())
    rank = sym.rank()
    nilpotency = None
    power = sympy.eye(3)
    for k in range(1, 4):
        power = power * sym
        if power.is_zero_matrix:
            nilpotency = k
            break
    return LinearPartReport(matrix, charpoly, eigenvalues, unresolved, rank, nilpotency)


def _eigenvalues(expr) -> Tuple[Optional[List[Scalar]], List[str]]:
    _, factors = sympy.factor_list(expr, LAMBDA, extension=sympy.I)
    roots: List[Scalar] = []
    unresolved: List[str] = []
    for factor, mult in factors:
        fpoly = sympy.Poly(factor, LAMBDA)
        if fpoly.degree() == 1:
            a, b = fpoly.all_coeffs()
            roots.extend([Scalar.from_sympy(-b / a)] * mult)
        else:
            unresolved.append(str(factor))
    if unresolved:
        logger.debug("Characteristic polynomial has factors outside Q(i): %s", unresolved)
        return None, unresolved
    return _sorted_scalars(roots), []


def _sorted_scalars(values: Sequence[Scalar]) -> List[Scalar]:
    return sorted(values, key=lambda s: tuple(s.coeffs))


def is_tangent_to_divisor(chi: VectorField, axes: Sequence[int]) -> bool:
    """x_k divides chi_k for every divisor axis k (known terms)."""
    return all(divides(unit_exp(k), chi.comps[k]) for k in axes)


def singularity_quality(
    report: LinearPartReport,
    field: Optional[VectorField] = None,
    divisor_axes: Sequence[int] = (),
) -> str:
    """
    Log-canonical / canonical / radial verdict of a saturated field

    Args:
        report: Linear part of the saturated generator
        field: The field itself, for the tangency check
        divisor_axes: Axes whose coordinate planes are divisor components

    Returns:
        One of regular, canonical, radial, non_log_canonical. Every
        log-canonical point is reported as canonical or radial.

    Raises:
        InvariantViolation: If the field is not tangent to the divisor
    """
    if report.regular:
        return REGULAR
    if field is not None and not is_tangent_to_divisor(field, divisor_axes):
        raise InvariantViolation(
            f"Saturated field is not tangent to the divisor components {list(divisor_axes)}"
        )
    if report.is_nilpotent:
        return NON_LOG_CANONICAL
    if report.eigenvalues is None:
        # a radial spectrum lies in Q(i)
        return CANONICAL
    if is_radial(report.eigenvalues):
        return RADIAL
    return CANONICAL


def is_radial(eigenvalues: Sequence[Scalar]) -> bool:
    """(l1, l2, l3) in l * (N*)^3 for some l != 0."""
    if any(e.is_zero() for e in eigenvalues):
        return False
    base = eigenvalues[0]
    for e in eigenvalues[1:]:
        ratio = e / base
        if not ratio.is_rational() or ratio.rational() <= 0:
            return False
    return True


def check_no_nearby_orbits(f: Germ, jet: int = 2) -> bool:
    """
    Hypotheses of the no-nearby-orbit criterion

    True iff the saturated generator is regular at 0 and tangent to every
    component of the marked divisor.
    """
    jet = max(1, min(jet, f.reduced_degree))
    chi = saturated_generator(f, jet)
    axes = [k for k in range(3) if f.divisor[k] > 0]
    regular = any(not c.constant_term().is_zero() for c in chi.comps)
    tangent = is_tangent_to_divisor(chi, axes)
    logger.debug("No-nearby-orbit hypotheses: regular=%s tangent=%s", regular, tangent)
    return regular and tangent
