"""
Membership in the four singularity families and the two pattern types.

Families are recognised on the reduced displacement F' of a germ with a
marked divisor, up to a permutation of the coordinates (the roles of the
normal form).  normal_form then conjugates by a linear change so that the
distinguished directions of the family become coordinate directions, and
closure_children lifts the germ at those directions and classifies the
children.  The expected children are:

    SimpleCorner     -> simple corners (P^1-families when resonant)
    DegenerateSpike  -> spike at [0:0:1], simple corners at the eigen-directions,
                        spike / simple corner after the curve blow-up of {x=z=0}
    SpinningCorner   -> simple corner at [1:0:0], spinning corners at [0:1:0]
                        and [0:0:1], half corners along [0:y0:1]
    HalfCorner       -> simple corner at [1:0:0], spinning corner at [0:1:0],
                        half corners along [0:y0:1] when not simple
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import ClassVar, Dict, List, Optional, Sequence, Tuple

import sympy

from .algebra import ONE, ZERO, VARIABLES, Exp, Scalar, TruncSeries, divides, scalar_sign_of_real
from .blowup import BlowupNode, Chart, line_chart, lift, point_chart
from .germ import Germ, Matrix3, conjugate, linear_map
from .infgen import LAMBDA, LinearPartReport, VectorField, linear_part
from .validators import (
    DEFAULT_SAMPLES,
    ClosureFalsification,
    InsufficientPrecisionError,
    InvariantViolation,
    validate_positive,
)

logger = logging.getLogger(__name__)

Roles = Tuple[int, int, int]
Triple = Tuple[Scalar, Scalar, Scalar]
IDENTITY_ROLES: Roles = (0, 1, 2)

# Class names, as written into tree verdicts and closure reports
REGULAR_POINT = "Regular"
SIMPLE_CORNER = "SimpleCorner"
DEGENERATE_SPIKE = "DegenerateSpike"
SPINNING_CORNER = "SpinningCorner"
HALF_CORNER = "HalfCorner"
UNCLASSIFIED = "Unclassified"

FAMILIES = (SIMPLE_CORNER, DEGENERATE_SPIKE, SPINNING_CORNER, HALF_CORNER)

# Pattern types
R0_R0 = "R0-R0"
R2_R3 = "R2-R3"


def _render(value):
    if isinstance(value, Scalar):
        return str(value)
    if isinstance(value, (tuple, list)):
        return [_render(v) for v in value]
    return value


# ----------------------------------------------------------------------
# class verdicts


@dataclass(frozen=True)
class SingularityClass:
    """Base verdict; roles[i] is the axis playing the i-th coordinate of the normal form."""

    roles: Roles
    kind: ClassVar[str] = UNCLASSIFIED

    def parameters(self) -> Dict[str, object]:
        return {}

    @property
    def is_family(self) -> bool:
        return self.kind in FAMILIES

    def describe(self) -> str:
        return self.kind

    def to_dict(self) -> dict:
        payload = {"class": self.kind, "roles": [VARIABLES[r] for r in self.roles]}
        payload.update({key: _render(value) for key, value in self.parameters().items()})
        return payload


@dataclass(frozen=True)
class Regular(SingularityClass):
    constants: Triple = (ZERO, ZERO, ZERO)
    kind: ClassVar[str] = REGULAR_POINT

    def parameters(self) -> Dict[str, object]:
        return {"constants": self.constants}


@dataclass(frozen=True)
class SimpleCorner(SingularityClass):
    """x + l x(lam + P), y + l y(mu + Q), z + l R with l = x^a y^b z^c and R = alpha x + beta y + gamma z + ..."""

    a: int = 1
    b: int = 1
    c: int = 0
    lam: Scalar = ONE
    mu: Scalar = ZERO
    alpha: Scalar = ZERO
    beta: Scalar = ZERO
    gamma: Scalar = ZERO
    kind: ClassVar[str] = SIMPLE_CORNER

    @property
    def ratio(self) -> Scalar:
        return self.mu / self.lam

    @property
    def x_family(self) -> bool:
        """Directions [p:0:r] are all singular."""
        return (self.lam - self.gamma).is_zero() and self.alpha.is_zero()

    @property
    def y_family(self) -> bool:
        return (self.mu - self.gamma).is_zero() and self.beta.is_zero()

    def parameters(self) -> Dict[str, object]:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "lambda": self.lam,
            "mu": self.mu,
            "ratio": self.ratio,
            "alpha_R": self.alpha,
            "beta_R": self.beta,
            "gamma": self.gamma,
        }


@dataclass(frozen=True)
class DegenerateSpike(SingularityClass):
    """
    x + z^c (a_x x + a_y y + a_z z + P), y + z^c (b_x x + b_y y + b_z z + Q), z + z^(c+1) R

    The 2x2 block ((a_x, a_y), (b_x, b_y)) has eigenvalues lam, mu with mu in lam R_<0.
    """

    c: int = 1
    block: Tuple[Scalar, Scalar, Scalar, Scalar] = (ZERO, ONE, ONE, ZERO)
    a_z: Scalar = ZERO
    b_z: Scalar = ZERO
    kind: ClassVar[str] = DEGENERATE_SPIKE

    @property
    def trace(self) -> Scalar:
        return self.block[0] + self.block[3]

    @property
    def det(self) -> Scalar:
        return self.block[0] * self.block[3] - self.block[1] * self.block[2]

    @property
    def ratio_class(self) -> Scalar:
        """trace^2 / det = rho + 2 + 1/rho for rho = mu / lam; real and <= 0 exactly in the Siegel case."""
        return self.trace * self.trace / self.det

    @property
    def is_diagonal(self) -> bool:
        return self.block[1].is_zero() and self.block[2].is_zero()

    def spike_direction(self) -> Triple:
        """The non-exceptional singular direction, in role coordinates."""
        a_x, a_y, b_x, b_y = self.block
        d = self.det
        vx = -(b_y * self.a_z - a_y * self.b_z) / d
        vy = -(a_x * self.b_z - b_x * self.a_z) / d
        return (vx, vy, ONE)

    def eigenvalues(self) -> Optional[Tuple[Scalar, Scalar]]:
        return quadratic_roots(self.trace, self.det)

    def parameters(self) -> Dict[str, object]:
        return {
            "c": self.c,
            "block": self.block,
            "alpha": self.block[1],
            "beta": self.block[2],
            "lambda_mu_product": self.det,
            "trace": self.trace,
            "ratio_class": self.ratio_class,
            "spike_direction": self.spike_direction(),
        }


def _tilde(row: Triple, a: Triple) -> Tuple[Scalar, Scalar]:
    """Coefficients of y and z after x -> a_x x + a_y y + a_z z."""
    return row[1] - row[0] * a[1] / a[0], row[2] - row[0] * a[2] / a[0]


@dataclass(frozen=True)
class SpinningCorner(SingularityClass):
    """
    x + y^b z^c (a_x x + a_y y + a_z z + P), y + y^(b+1) z^c Q, z + y^b z^(c+1) R

    Q = b_x x + b_y y + b_z z + ...,  R = c_x x + c_y y + c_z z + ...
    """

    b: int = 1
    c: int = 1
    a: Triple = (ONE, ZERO, ZERO)
    q: Triple = (ZERO, ZERO, ZERO)
    r: Triple = (ZERO, ZERO, ZERO)
    kind: ClassVar[str] = SPINNING_CORNER

    @property
    def tilde_q(self) -> Tuple[Scalar, Scalar]:
        return _tilde(self.q, self.a)

    @property
    def tilde_r(self) -> Tuple[Scalar, Scalar]:
        return _tilde(self.r, self.a)

    def half_corner_beta(self, y0) -> Scalar:
        """beta of the half corner at [0:y0:1] (up to a nonzero factor): b_z - c_z + y0 (b_y - c_y)."""
        (by, bz), (cy, cz) = self.tilde_q, self.tilde_r
        return bz - cz + Scalar.coerce(y0) * (by - cy)

    def non_simple_points(self) -> Optional[List[Scalar]]:
        """
        Points [0:y0:1], y0 != 0, where the half corner is not simple

        Returns:
            None if every half corner of the family is non-simple, else the list
            (empty or a single value)
        """
        (by, bz), (cy, cz) = self.tilde_q, self.tilde_r
        slope, offset = by - cy, bz - cz
        if slope.is_zero():
            return None if offset.is_zero() else []
        if offset.is_zero():
            return []
        return [-offset / slope]

    def parameters(self) -> Dict[str, object]:
        return {
            "b": self.b,
            "c": self.c,
            "a": self.a,
            "q": self.q,
            "r": self.r,
            "tilde_q": self.tilde_q,
            "tilde_r": self.tilde_r,
        }


@dataclass(frozen=True)
class HalfCorner(SingularityClass):
    """
    x + z^c (a_x x + a_y y + a_z z + P), y + z^(c+1) (beta + Q), z + z^(c+2) (gamma + ...)

    Q = b_x x + b_y y + b_z z + ...; simple iff beta != 0.
    """

    c: int = 1
    a: Triple = (ONE, ZERO, ZERO)
    beta: Scalar = ZERO
    q: Triple = (ZERO, ZERO, ZERO)
    gamma: Scalar = ZERO
    kind: ClassVar[str] = HALF_CORNER

    @property
    def simple(self) -> bool:
        return not self.beta.is_zero()

    @property
    def tilde_q(self) -> Tuple[Scalar, Scalar]:
        return _tilde(self.q, self.a)

    def resonance_pair(self) -> Tuple[Scalar, Scalar]:
        """(b_y : gamma), well defined up to homothety."""
        return self.tilde_q[0], self.gamma

    def child_beta(self, y0) -> Scalar:
        """beta of the half corner at [0:y0:1] of a non-simple half corner: b_z + (b_y - gamma) y0."""
        by, bz = self.tilde_q
        return bz + (by - self.gamma) * Scalar.coerce(y0)

    def non_simple_points(self) -> Optional[List[Scalar]]:
        by, bz = self.tilde_q
        slope = by - self.gamma
        if slope.is_zero():
            return None if bz.is_zero() else []
        return [-bz / slope]

    def describe(self) -> str:
        return f"{self.kind}(simple={self.simple})"

    def parameters(self) -> Dict[str, object]:
        return {
            "c": self.c,
            "a": self.a,
            "beta": self.beta,
            "q": self.q,
            "b_y": self.tilde_q[0],
            "gamma": self.gamma,
            "simple": self.simple,
        }


@dataclass(frozen=True)
class Unclassified(SingularityClass):
    report: Optional[LinearPartReport] = None
    kind: ClassVar[str] = UNCLASSIFIED

    def parameters(self) -> Dict[str, object]:
        return {"linear_part": None if self.report is None else self.report.to_dict()}


# ----------------------------------------------------------------------
# recognition


def _role_exp(roles: Roles, powers: Sequence[int]) -> Exp:
    e = [0, 0, 0]
    for axis, p in zip(roles, powers):
        e[axis] = p
    return tuple(e)  # type: ignore[return-value]


def _coef(f: Germ, roles: Roles, row: int, powers: Sequence[int]) -> Scalar:
    return f.reduced[roles[row]].coefficient(_role_exp(roles, powers))


def _divisible(f: Germ, roles: Roles, row: int, powers: Sequence[int]) -> bool:
    return divides(_role_exp(roles, powers), f.reduced[roles[row]])


_UNIT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def _row(f: Germ, roles: Roles, row: int) -> Triple:
    return tuple(_coef(f, roles, row, u) for u in _UNIT)  # type: ignore[return-value]


def _positive_rational(value: Scalar) -> bool:
    return value.is_rational() and value.rational() > 0


def is_siegel(trace: Scalar, det: Scalar) -> bool:
    """Eigenvalue ratio in R_<0, decided from trace and determinant without square roots."""
    if det.is_zero():
        return False
    ratio_class = trace * trace / det
    return ratio_class.is_real() and scalar_sign_of_real(ratio_class) <= 0


def quadratic_roots(trace: Scalar, det: Scalar) -> Optional[Tuple[Scalar, Scalar]]:
    """Roots of X^2 - trace X + det when both lie in Q(i)."""
    if not (trace.is_gaussian() and det.is_gaussian()):
        return None
    poly = LAMBDA**2 - trace.to_sympy() * LAMBDA + det.to_sympy()
    _, factors = sympy.factor_list(poly, LAMBDA, extension=sympy.I)
    roots: List[Scalar] = []
    for factor, mult in factors:
        fpoly = sympy.Poly(factor, LAMBDA)
        if fpoly.degree() != 1:
            return None
        a, b = fpoly.all_coeffs()
        roots.extend([Scalar.from_sympy(-b / a)] * mult)
    roots.sort(key=lambda s: tuple(s.coeffs))
    return roots[0], roots[1]


def _match_simple_corner(f: Germ, roles: Roles) -> Optional[SimpleCorner]:
    X, Y, Z = roles
    d = f.divisor
    if d[X] < 1 or d[Y] < 1:
        return None
    if not (_divisible(f, roles, 0, (1, 0, 0)) and _divisible(f, roles, 1, (0, 1, 0))):
        return None
    if d[Z] > 0 and not _divisible(f, roles, 2, (0, 0, 1)):
        return None
    lam = _coef(f, roles, 0, (1, 0, 0))
    mu = _coef(f, roles, 1, (0, 1, 0))
    if lam.is_zero() or _positive_rational(mu / lam):
        return None
    alpha, beta, gamma = _row(f, roles, 2)
    return SimpleCorner(roles, d[X], d[Y], d[Z], lam, mu, alpha, beta, gamma)


def _match_degenerate_spike(f: Germ, roles: Roles) -> Optional[DegenerateSpike]:
    X, Y, Z = roles
    d = f.divisor
    if d[Z] < 1 or d[X] or d[Y] or X > Y:
        return None
    if not _divisible(f, roles, 2, (0, 0, 1)) or not _coef(f, roles, 2, (0, 0, 1)).is_zero():
        return None
    row_x, row_y = _row(f, roles, 0), _row(f, roles, 1)
    block = (row_x[0], row_x[1], row_y[0], row_y[1])
    trace = block[0] + block[3]
    det = block[0] * block[3] - block[1] * block[2]
    if not is_siegel(trace, det):
        return None
    return DegenerateSpike(roles, d[Z], block, row_x[2], row_y[2])


def _match_spinning_corner(f: Germ, roles: Roles) -> Optional[SpinningCorner]:
    X, Y, Z = roles
    d = f.divisor
    if d[X] or d[Y] < 1 or d[Z] < 1 or (d[Y], Y) > (d[Z], Z):
        return None
    if not (_divisible(f, roles, 1, (0, 1, 0)) and _divisible(f, roles, 2, (0, 0, 1))):
        return None
    if not (_coef(f, roles, 1, (0, 1, 0)).is_zero() and _coef(f, roles, 2, (0, 0, 1)).is_zero()):
        return None
    a = _row(f, roles, 0)
    if a[0].is_zero():
        return None
    q = tuple(_coef(f, roles, 1, p) for p in ((1, 1, 0), (0, 2, 0), (0, 1, 1)))
    r = tuple(_coef(f, roles, 2, p) for p in ((1, 0, 1), (0, 1, 1), (0, 0, 2)))
    return SpinningCorner(roles, d[Y], d[Z], a, q, r)  # type: ignore[arg-type]


def _match_half_corner(f: Germ, roles: Roles) -> Optional[HalfCorner]:
    X, Y, Z = roles
    d = f.divisor
    if d[Z] < 1 or d[X] or d[Y]:
        return None
    if not (_divisible(f, roles, 1, (0, 0, 1)) and _divisible(f, roles, 2, (0, 0, 2))):
        return None
    a = _row(f, roles, 0)
    if a[0].is_zero():
        return None
    beta = _coef(f, roles, 1, (0, 0, 1))
    q = tuple(_coef(f, roles, 1, p) for p in ((1, 0, 1), (0, 1, 1), (0, 0, 2)))
    gamma = _coef(f, roles, 2, (0, 0, 2))
    return HalfCorner(roles, d[Z], a, beta, q, gamma)  # type: ignore[arg-type]


_MATCHERS = (_match_simple_corner, _match_degenerate_spike, _match_spinning_corner, _match_half_corner)


def reduced_linear_report(f: Germ) -> LinearPartReport:
    """Linear part of F', which is the linear part of the saturated generator."""
    return linear_part(VectorField(f.reduced, f.divisor))


def classify_germ(f: Germ) -> SingularityClass:
    """
    Family of a germ with marked divisor

    Args:
        f: Germ; its reduced displacement must be certified through degree 2

    Returns:
        Regular, one of the four family verdicts, or Unclassified with the linear-part report

    Raises:
        InsufficientPrecisionError: If the certified jet is too short for a verdict
    """
    constants = f.reduced_constants()
    if any(not c.is_zero() for c in constants):
        return Regular(IDENTITY_ROLES, constants)  # type: ignore[arg-type]
    if f.reduced_degree < 2:
        raise InsufficientPrecisionError(
            f"Classification needs F' through degree 2, germ known to {f.reduced_degree}; raise N"
        )
    for matcher in _MATCHERS:
        for roles in itertools.permutations(range(3)):
            found = matcher(f, roles)  # type: ignore[arg-type]
            if found is not None:
                logger.debug("Classified as %s with roles %s", found.kind, roles)
                return found
    report = reduced_linear_report(f)
    logger.debug("Germ with divisor %s left unclassified", f.divisor)
    return Unclassified(IDENTITY_ROLES, report)


# ----------------------------------------------------------------------
# normal forms


@dataclass
class NormalForm:
    """Germ in normal-form coordinates; old coordinates = matrix . new coordinates."""

    germ: Germ
    cls: SingularityClass
    matrix: Matrix3

    def to_original(self, v: Sequence) -> Triple:
        w = [Scalar.coerce(c) for c in v]
        return tuple(sum((self.matrix[i][k] * w[k] for k in range(3)), ZERO) for i in range(3))  # type: ignore[return-value]

    def to_dict(self) -> dict:
        return {
            "class": self.cls.to_dict(),
            "normalizer": [[str(c) for c in row] for row in self.matrix],
            "germ": self.germ.to_dict(),
        }


def _identity_matrix() -> Matrix3:
    return [[ONE if i == j else ZERO for j in range(3)] for i in range(3)]


def _mat_mul(a: Matrix3, b: Matrix3) -> Matrix3:
    return [[sum((a[i][k] * b[k][j] for k in range(3)), ZERO) for j in range(3)] for i in range(3)]


def _permuted(f: Germ, roles: Roles) -> Tuple[Germ, Matrix3]:
    if tuple(roles) == IDENTITY_ROLES:
        return f, _identity_matrix()
    matrix = [[ZERO] * 3 for _ in range(3)]
    for i, axis in enumerate(roles):
        matrix[axis][i] = ONE
    divisor = tuple(f.divisor[axis] for axis in roles)
    return conjugate(f, linear_map(matrix), divisor), matrix  # type: ignore[arg-type]


def _spike_matrix(cls: DegenerateSpike) -> Matrix3:
    vx, vy, _ = cls.spike_direction()
    columns = ((ONE, ZERO), (ZERO, ONE))
    eig = cls.eigenvalues()
    if eig is not None and not cls.is_diagonal:
        a_x, a_y, b_x, b_y = cls.block
        vectors = []
        for lam in eig:
            if not a_y.is_zero():
                vectors.append((a_y, lam - a_x))
            elif not b_x.is_zero():
                vectors.append((lam - b_y, b_x))
            else:
                vectors.append((ONE, ZERO) if (lam - a_x).is_zero() else (ZERO, ONE))
        columns = tuple(vectors)  # type: ignore[assignment]
    return [
        [columns[0][0], columns[1][0], vx],
        [columns[0][1], columns[1][1], vy],
        [ZERO, ZERO, ONE],
    ]


def normal_form(f: Germ, cls: Optional[SingularityClass] = None) -> NormalForm:
    """
    Conjugate f to the normal-form coordinates of its class

    Simple corners are only permuted; degenerate spikes get their spike direction
    on the z-axis and a diagonal block when the eigenvalues lie in Q(i); spinning
    and half corners get the linear part of F'_x reduced to a_x x.

    Raises:
        InvariantViolation: If the normalized germ changes class
    """
    cls = cls or classify_germ(f)
    if not cls.is_family:
        return NormalForm(f, cls, _identity_matrix())
    g, matrix = _permuted(f, cls.roles)
    if isinstance(cls, DegenerateSpike):
        step = _spike_matrix(cls)
        g = conjugate(g, linear_map(step))
        matrix = _mat_mul(matrix, step)
    elif isinstance(cls, (SpinningCorner, HalfCorner)):
        for _ in range(3):
            a = _row(g, IDENTITY_ROLES, 0)
            if a[1].is_zero() and a[2].is_zero():
                break
            step = _identity_matrix()
            step[0][1] = -a[1] / a[0]
            step[0][2] = -a[2] / a[0]
            g = conjugate(g, linear_map(step))
            matrix = _mat_mul(matrix, step)
    normalized = classify_germ(g)
    if normalized.kind != cls.kind:
        raise InvariantViolation(
            f"Normalization changed the class\n"
            f"Before: {cls.describe()}\n"
            f"After: {normalized.describe()}"
        )
    logger.debug("Normal form of %s computed", cls.kind)
    return NormalForm(g, normalized, matrix)


def straighten_spike(g: Germ, cls: DegenerateSpike) -> Germ:
    """
    Conjugate a diagonal degenerate spike by x -> x + c y^k until F'_x(0, y, 0) = 0

    Makes {x = z = 0} invariant on the certified jet, so it can be blown up.
    """
    if not cls.is_diagonal:
        raise InvariantViolation("Separatrix straightening needs a diagonal spike block")
    lam, mu = cls.block[0], cls.block[3]
    for k in range(2, g.reduced_degree + 1):
        p = g.reduced[0].coefficient((0, k, 0))
        if p.is_zero():
            continue
        c = -p / (lam - mu * k)
        phi = (
            TruncSeries.variable(0) + TruncSeries.monomial((0, k, 0), c),
            TruncSeries.variable(1),
            TruncSeries.variable(2),
        )
        g = conjugate(g, phi)
    return g


# ----------------------------------------------------------------------
# closure tables


@dataclass
class ClosureEntry:
    """One expected child: where to lift and which class to expect."""

    label: str
    chart: Chart
    expected: str
    expected_simple: Optional[bool] = None
    straightened: bool = False


@dataclass
class ClosureChild:
    """An expected child together with the lifted germ and its observed class."""

    entry: ClosureEntry
    germ: Germ
    observed: SingularityClass

    @property
    def agrees(self) -> bool:
        if self.observed.kind != self.entry.expected:
            return False
        if self.entry.expected_simple is not None and isinstance(self.observed, HalfCorner):
            return self.observed.simple == self.entry.expected_simple
        return True

    def expected_text(self) -> str:
        if self.entry.expected_simple is None:
            return self.entry.expected
        return f"{self.entry.expected}(simple={self.entry.expected_simple})"

    def to_dict(self) -> dict:
        return {
            "site": self.entry.label,
            "chart": self.entry.chart.to_dict(),
            "expected": self.expected_text(),
            "observed": self.observed.to_dict(),
            "agrees": self.agrees,
        }


def _fmt(v: Sequence) -> str:
    return "[" + ":".join(str(Scalar.coerce(c)) for c in v) + "]"


def _point_entry(v: Sequence, expected: str, simple: Optional[bool] = None, j: Optional[int] = None) -> ClosureEntry:
    return ClosureEntry(_fmt(v), point_chart(v, j), expected, simple)


def _sample_values(count: int, avoid: Sequence[Scalar] = (), start: int = 1) -> List[Scalar]:
    values: List[Scalar] = []
    k = start
    while len(values) < count:
        candidate = Scalar.coerce(k)
        if candidate not in avoid:
            values.append(candidate)
        k += 1
    return values


def _simple_corner_table(cls: SimpleCorner, samples: int) -> List[ClosureEntry]:
    entries: List[ClosureEntry] = []
    if cls.x_family:
        entries.append(_point_entry((1, 0, 0), SIMPLE_CORNER))
        entries.extend(_point_entry((ONE, ZERO, t), SIMPLE_CORNER, j=0) for t in _sample_values(samples))
    else:
        entries.append(_point_entry((cls.lam - cls.gamma, ZERO, cls.alpha), SIMPLE_CORNER))
    if cls.y_family:
        entries.append(_point_entry((0, 1, 0), SIMPLE_CORNER))
        entries.extend(_point_entry((ZERO, ONE, t), SIMPLE_CORNER, j=1) for t in _sample_values(samples))
    else:
        entries.append(_point_entry((ZERO, cls.mu - cls.gamma, cls.beta), SIMPLE_CORNER))
    entries.append(_point_entry((0, 0, 1), SIMPLE_CORNER))
    seen_points = set()
    out = []
    for entry in entries:
        key = _projective_key(entry.chart)
        if key in seen_points:
            continue
        seen_points.add(key)
        out.append(entry)
    return out


def _projective_key(chart: Chart) -> Tuple[str, ...]:
    v = [chart.translation[m] if m != chart.dividing else ONE for m in range(3)]
    return tuple(str(c) for c in _normalized(v))


def _normalized(v: Sequence[Scalar]) -> List[Scalar]:
    last = max(k for k in range(3) if not v[k].is_zero())
    return [c / v[last] for c in v]


def _spike_table(cls: DegenerateSpike) -> List[ClosureEntry]:
    entries = [_point_entry((0, 0, 1), DEGENERATE_SPIKE)]
    if cls.is_diagonal:
        entries.append(_point_entry((1, 0, 0), SIMPLE_CORNER))
        entries.append(_point_entry((0, 1, 0), SIMPLE_CORNER))
        entries.append(ClosureEntry("curve x=z=0, z-chart", line_chart((0, 2), 2), DEGENERATE_SPIKE, straightened=True))
        entries.append(ClosureEntry("curve x=z=0, x-chart", line_chart((0, 2), 0), SIMPLE_CORNER, straightened=True))
    else:
        logger.warning("Spike eigenvalues outside Q(i); eigen-directions and curve blow-up not checked")
    return entries


def _spinning_corner_table(cls: SpinningCorner, samples: int) -> List[ClosureEntry]:
    entries = [
        _point_entry((1, 0, 0), SIMPLE_CORNER),
        _point_entry((0, 1, 0), SPINNING_CORNER),
        _point_entry((0, 0, 1), SPINNING_CORNER),
    ]
    roots = cls.non_simple_points()
    special = [] if roots is None else roots
    for t in _sample_values(samples, special):
        entries.append(_point_entry((ZERO, t, ONE), HALF_CORNER, roots is not None))
    for t in special:
        entries.append(_point_entry((ZERO, t, ONE), HALF_CORNER, False))
    return entries


def _half_corner_table(cls: HalfCorner, samples: int) -> List[ClosureEntry]:
    entries = [
        _point_entry((1, 0, 0), SIMPLE_CORNER),
        _point_entry((0, 1, 0), SPINNING_CORNER),
    ]
    if cls.simple:
        return entries
    roots = cls.non_simple_points()
    special = [] if roots is None else roots
    for t in _sample_values(samples, special, start=0):
        entries.append(_point_entry((ZERO, t, ONE), HALF_CORNER, roots is not None))
    for t in special:
        entries.append(_point_entry((ZERO, t, ONE), HALF_CORNER, False))
    return entries


def closure_table(cls: SingularityClass, samples: int = DEFAULT_SAMPLES) -> List[ClosureEntry]:
    """Expected children of a class in normal form."""
    if isinstance(cls, SimpleCorner):
        return _simple_corner_table(cls, samples)
    if isinstance(cls, DegenerateSpike):
        return _spike_table(cls)
    if isinstance(cls, SpinningCorner):
        return _spinning_corner_table(cls, samples)
    if isinstance(cls, HalfCorner):
        return _half_corner_table(cls, samples)
    raise InvariantViolation(f"No closure table for {cls.kind}")


def closure_children(
    f: Germ, cls: Optional[SingularityClass] = None, samples: int = DEFAULT_SAMPLES
) -> Tuple[NormalForm, List[ClosureChild]]:
    """
    Lift a family member at every site of its closure table

    Args:
        f: Germ in one of the four families
        cls: Its class (computed when omitted)
        samples: Generic points sampled on each P^1-family

    Returns:
        The normal form used and the children with their observed classes
    """
    samples = validate_positive("samples", samples)
    nf = normal_form(f, cls)
    if not nf.cls.is_family:
        raise InvariantViolation(f"Closure table requested for {nf.cls.kind}")
    straight: Optional[Germ] = None
    children = []
    for entry in closure_table(nf.cls, samples):
        base = nf.germ
        if entry.straightened:
            if straight is None:
                straight = straighten_spike(nf.germ, nf.cls)  # type: ignore[arg-type]
            base = straight
        child = lift(base, entry.chart)
        children.append(ClosureChild(entry, child, classify_germ(child)))
    logger.debug("Closure children of %s: %d sites", nf.cls.kind, len(children))
    return nf, children


def blowup_closure(
    f: Germ, cls: Optional[SingularityClass] = None, samples: int = DEFAULT_SAMPLES
) -> List[ClosureChild]:
    """
    Check the closure table on f

    Raises:
        ClosureFalsification: At the first child whose class disagrees with the table
    """
    _, children = closure_children(f, cls, samples)
    for child in children:
        if not child.agrees:
            raise ClosureFalsification(child.entry.label, child.expected_text(), child.observed.describe())
    return children


# ----------------------------------------------------------------------
# patterns


def core_axis(f: Germ) -> Optional[int]:
    """A coordinate axis along which F' vanishes (on the known jet), if any."""
    if any(not c.is_zero() for c in f.reduced_constants()):
        return None
    for k in range(3):
        if all(comp.restrict_to_axis(k).is_zero() for comp in f.reduced):
            return k
    return None


@dataclass
class PatternType:
    """Type of a curve of singular points: generic class, special points and core blow-up children."""

    name: str
    core: str
    generic: str
    specials: List[Tuple[str, str]] = field(default_factory=list)
    samples: List[Tuple[str, str]] = field(default_factory=list)
    non_simple: Optional[List[str]] = None
    core_children: List[ClosureChild] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pattern": self.name,
            "core": self.core,
            "generic": self.generic,
            "specials": [{"site": s, "class": k} for s, k in self.specials],
            "samples": [{"site": s, "class": k} for s, k in self.samples],
            "non_simple": self.non_simple,
            "core_children": [child.to_dict() for child in self.core_children],
        }


def core_blowup(f: Germ, samples: int = DEFAULT_SAMPLES) -> List[ClosureChild]:
    """
    Blow up the core through the origin of a pattern point

    The chart dividing by the divisor axis keeps the class of the point; the
    chart dividing by the other center axis shows a simple corner.

    Raises:
        InvariantViolation: If the core is not a coordinate axis
    """
    nf = normal_form(f)
    g, cls = nf.germ, nf.cls
    k = core_axis(g)
    if k is None or not cls.is_family:
        raise InvariantViolation("Core not straightened: no coordinate axis of singular points")
    center = tuple(m for m in range(3) if m != k)
    children = []
    for j in center:
        expected = cls.kind if g.divisor[j] > 0 else SIMPLE_CORNER
        chart = line_chart(center, j)
        entry = ClosureEntry(f"core {VARIABLES[k]}-axis, {VARIABLES[j]}-chart", chart, expected)
        child = lift(g, chart)
        children.append(ClosureChild(entry, child, classify_germ(child)))
    for child in children:
        if not child.agrees:
            raise ClosureFalsification(child.entry.label, child.expected_text(), child.observed.describe())
    return children


def classify_pattern(node: BlowupNode, samples: int = DEFAULT_SAMPLES) -> PatternType:
    """
    Pattern type of the singular curve through a node

    The core must be a coordinate axis of the node's chart that the chart
    translates, so that other core points are reached by re-lifting the parent.

    Raises:
        InvariantViolation: If the core is not straightened or not reachable
        ClosureFalsification: If sampled core points disagree
    """
    samples = validate_positive("samples", samples)
    g = node.germ
    k = core_axis(g)
    if k is None:
        raise InvariantViolation(f"Core not straightened at {node.name}: no coordinate axis of singular points")
    if node.parent is None or node.chart is None or k not in node.chart.others:
        raise InvariantViolation(f"Core points at {node.name} are not reachable from the parent chart")
    chart = node.chart
    parent_cls = classify_germ(node.parent.germ)
    base = chart.translation[k]
    sampled: List[Tuple[str, str]] = []
    for t in _sample_values(samples):
        translation = list(chart.translation)
        translation[k] = base + t
        moved = Chart(chart.center, chart.dividing, tuple(translation))  # type: ignore[arg-type]
        sampled.append((_fmt(translation), classify_germ(lift(node.parent.germ, moved)).kind))
    kinds = {kind for _, kind in sampled}
    if len(kinds) != 1:
        raise ClosureFalsification(f"core of {node.name}", "one generic class", ", ".join(sorted(kinds)))
    generic = kinds.pop()
    if generic == SIMPLE_CORNER:
        name, specials = R0_R0, []
    elif generic == HALF_CORNER:
        name = R2_R3
        specials = [("[0:1:0]", SPINNING_CORNER)]
        if parent_cls.kind == SPINNING_CORNER:
            specials.append(("[0:0:1]", SPINNING_CORNER))
    else:
        raise InvariantViolation(f"Curve of {generic} points at {node.name} is not a known pattern")
    own = classify_germ(g).kind
    if own != generic and own not in {kind for _, kind in specials}:
        raise ClosureFalsification(node.name, f"{generic} or a special point", own)
    non_simple = None
    if isinstance(parent_cls, (SpinningCorner, HalfCorner)):
        roots = parent_cls.non_simple_points()
        non_simple = ["all"] if roots is None else [str(r) for r in roots]
    pattern = PatternType(
        name,
        f"{VARIABLES[k]}-axis of chart {chart.label}",
        generic,
        specials,
        sampled,
        non_simple,
        core_blowup(g, samples),
    )
    logger.info("Pattern at %s: %s", node.name, name)
    return pattern
