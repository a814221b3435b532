"""
Characteristic and singular directions, multipliers, dicriticality and
direction multiplicities.

Directions are zeros in P^2 of the 2x2 minors of (H_l(v), v).  They are
found chart by chart (z = 1, then z = 0, y = 1, then [1:0:0]) by resultant
elimination over Q(i); factors without a root in the field are reported as
unresolved instead of being approximated.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import sympy
from sympy.polys.domains import QQ_I

from .algebra import ONE, ZERO, SYMBOLS, Scalar, TruncSeries, to_sympy
from .germ import Germ, homogeneous_data
from .validators import InvariantViolation

logger = logging.getLogger(__name__)

X, Y, Z = SYMBOLS
U_SYMBOL, W_SYMBOL = sympy.symbols("u w")
_U, _W = sympy.symbols("u_ w_")

Direction3 = Tuple[Scalar, Scalar, Scalar]
Multiplicity = Union[int, float]

# Dicriticality degrees
ISOLATED = 0
ONE_DICRITICAL = 1
DICRITICAL = 2

MULTIPLIER_NOTE = "only the vanishing of a multiplier is coordinate-invariant"


@dataclass
class Direction:
    """A resolved direction with its multiplier."""

    coords: Direction3
    multiplier: Scalar
    degenerate: bool
    exceptional: bool = False

    def to_dict(self) -> dict:
        return {
            "direction": [str(c) for c in self.coords],
            "multiplier": str(self.multiplier),
            "degenerate": self.degenerate,
            "exceptional": self.exceptional,
        }

    def __str__(self) -> str:
        return "[" + ":".join(str(c) for c in self.coords) + "]"


@dataclass
class DirectionFamily:
    """Line {n . v = 0} of directions, parametrized as base + t * step (step is the point at infinity)."""

    normal: Direction3
    base: Direction3
    step: Direction3
    degenerate: bool = False
    exceptional: bool = False

    def point(self, t) -> Direction3:
        t = Scalar.coerce(t)
        return tuple(b + t * s for b, s in zip(self.base, self.step))  # type: ignore[return-value]

    def contains(self, v: Sequence) -> bool:
        return sum((n * Scalar.coerce(c) for n, c in zip(self.normal, v)), ZERO).is_zero()

    def to_dict(self) -> dict:
        return {
            "normal": [str(c) for c in self.normal],
            "base": [str(c) for c in self.base],
            "step": [str(c) for c in self.step],
            "degenerate": self.degenerate,
            "exceptional": self.exceptional,
        }


@dataclass
class DirectionReport:
    """Directions of a germ: resolved points, one-parameter families and unresolved factors."""

    kind: str  # "singular" or "characteristic"
    resolved: List[Direction] = field(default_factory=list)
    families: List[DirectionFamily] = field(default_factory=list)
    unresolved: List[str] = field(default_factory=list)
    dicriticality: int = ISOLATED

    def find(self, v: Sequence) -> Optional[Direction]:
        target = normalize_direction(v)
        for d in self.resolved:
            if d.coords == target:
                return d
        return None

    def non_exceptional(self) -> List[Direction]:
        return [d for d in self.resolved if not d.exceptional]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dicriticality": self.dicriticality,
            "resolved": [d.to_dict() for d in self.resolved],
            "families": [fam.to_dict() for fam in self.families],
            "unresolved": list(self.unresolved),
            "note": MULTIPLIER_NOTE,
        }


@dataclass
class IntersectionQuery:
    """Two plane curves F, G (sympy expressions in two variables) and a base point."""

    F: object
    G: object
    point: Tuple[Scalar, Scalar] = (ZERO, ZERO)
    variables: Tuple = (U_SYMBOL, W_SYMBOL)


def normalize_direction(v: Sequence) -> Direction3:
    """Scale so the last nonzero coordinate is 1."""
    coords = [Scalar.coerce(c) for c in v]
    nonzero = [k for k in range(3) if not coords[k].is_zero()]
    if not nonzero:
        raise InvariantViolation("The zero vector is not a direction")
    pivot = coords[nonzero[-1]]
    return tuple(c / pivot for c in coords)  # type: ignore[return-value]


# ----------------------------------------------------------------------
# exact zero sets


def _linear_roots(poly, var) -> Tuple[List[Scalar], List[str]]:
    poly = sympy.expand(poly)
    if poly == 0:
        raise InvariantViolation(f"Zero polynomial has no isolated roots in {var}")
    if sympy.Poly(poly, var).degree() <= 0:
        return [], []
    _, factors = sympy.factor_list(poly, var, extension=sympy.I)
    roots: List[Scalar] = []
    unresolved: List[str] = []
    for factor, _mult in factors:
        fp = sympy.Poly(factor, var)
        if fp.degree() == 1:
            a, b = fp.all_coeffs()
            roots.append(Scalar.from_sympy(-b / a))
        elif fp.degree() > 1:
            unresolved.append(str(factor))
    return roots, unresolved


def _poly_gcd(polys: Sequence) -> object:
    nonzero = [sympy.expand(p) for p in polys if sympy.expand(p) != 0]
    if not nonzero:
        return sympy.Integer(0)
    common = nonzero[0]
    for p in nonzero[1:]:
        common = sympy.gcd(common, p)
    return common


def _affine_zeros(polys: Sequence, u, w) -> Tuple[List[Tuple[Scalar, Scalar]], List[str]]:
    """Isolated common zeros of bivariate polynomials in (u, w) over Q(i)."""
    nonzero = [sympy.expand(p) for p in polys if sympy.expand(p) != 0]
    if not nonzero:
        return [], ["whole chart"]
    resultants = []
    if len(nonzero) == 1:
        only = nonzero[0]
        if sympy.Poly(only, w).degree() > 0:
            return [], [f"curve {only}"]
        resultants.append(only)
    for a, b in combinations(nonzero, 2):
        r = sympy.expand(sympy.resultant(a, b, w))
        if r != 0:
            resultants.append(r)
    if not resultants:
        return [], [f"common component of {nonzero}"]
    eliminated = _poly_gcd(resultants)
    u_roots, unresolved = _linear_roots(eliminated, u)
    points: List[Tuple[Scalar, Scalar]] = []
    for u0 in u_roots:
        fibre = [p.subs(u, u0.to_sympy()) for p in nonzero]
        common = _poly_gcd(fibre)
        if common == 0:
            unresolved.append(f"whole line {u} = {u0}")
            continue
        w_roots, w_unresolved = _linear_roots(common, w)
        unresolved.extend(f"{factor} at {u} = {u0}" for factor in w_unresolved)
        points.extend((u0, w0) for w0 in w_roots)
    return points, unresolved


def projective_zeros(polys: Sequence) -> Tuple[List[Direction3], List[str]]:
    """Isolated common zeros in P^2 of homogeneous polynomials in x, y, z."""
    points: List[Direction3] = []
    chart, unresolved = _affine_zeros([p.subs(Z, 1) for p in polys], X, Y)
    points.extend((a, b, ONE) for a, b in chart)
    at_infinity = [sympy.expand(p.subs({Z: 0, Y: 1})) for p in polys]
    common = _poly_gcd(at_infinity)
    if common == 0:
        unresolved.append("whole line z = 0")
    else:
        roots, more = _linear_roots(common, X)
        unresolved.extend(more)
        points.extend((r, ONE, ZERO) for r in roots)
    if all(sympy.expand(p.subs({X: 1, Y: 0, Z: 0})) == 0 for p in polys):
        points.append((ONE, ZERO, ZERO))
    return points, unresolved


def _minors(G: Sequence) -> List:
    """Cross minors x_a G_b - x_b G_a of a homogeneous triple."""
    v = (X, Y, Z)
    return [sympy.expand(v[a] * G[b] - v[b] * G[a]) for a, b in ((0, 1), (0, 2), (1, 2))]


def _line_family(factor, G: Sequence, divisor_axes: Sequence[int]) -> DirectionFamily:
    poly = sympy.Poly(factor, X, Y, Z)
    normal = tuple(Scalar.from_sympy(poly.coeff_monomial(v)) for v in (X, Y, Z))
    k = next(i for i in range(3) if not normal[i].is_zero())
    free = [i for i in range(3) if i != k]

    def basis(axis: int) -> Direction3:
        vec = [ZERO, ZERO, ZERO]
        vec[axis] = ONE
        vec[k] = -normal[axis] / normal[k]
        return tuple(vec)  # type: ignore[return-value]

    base, step = basis(free[1]), basis(free[0])
    t = sympy.Symbol("t")
    param = {sym: (b.to_sympy() + t * s.to_sympy()) for sym, b, s in zip((X, Y, Z), base, step)}
    degenerate = all(sympy.expand(g.subs(param, simultaneous=True)) == 0 for g in G)
    exceptional = any(all(normal[i].is_zero() for i in range(3) if i != m) for m in divisor_axes)
    return DirectionFamily(normal, base, step, degenerate, exceptional)  # type: ignore[arg-type]


def _solve(G: Sequence[TruncSeries], kind: str, divisor_axes: Sequence[int]) -> DirectionReport:
    G_sym = [sympy.expand(to_sympy(g)) for g in G]
    minors = _minors(G_sym)
    report = DirectionReport(kind)
    if all(m == 0 for m in minors):
        report.dicriticality = DICRITICAL
        logger.debug("Germ is dicritical: H is a multiple of the radial field")
        return report
    common = _poly_gcd(minors)
    isolated = minors
    if sympy.Poly(common, X, Y, Z).total_degree() > 0:
        report.dicriticality = ONE_DICRITICAL
        _, factors = sympy.factor_list(common, X, Y, Z, extension=sympy.I)
        for factor, _mult in factors:
            if sympy.Poly(factor, X, Y, Z).total_degree() == 1:
                report.families.append(_line_family(factor, G_sym, divisor_axes))
            else:
                report.unresolved.append(f"family {factor}")
        isolated = [sympy.quo(m, common, X, Y, Z) for m in minors]
    points, unresolved = projective_zeros(isolated)
    report.unresolved.extend(unresolved)
    for p in points:
        v = normalize_direction(p)
        if any(fam.contains(v) for fam in report.families):
            continue
        report.resolved.append(_direction(v, G, divisor_axes))
    report.resolved.sort(key=lambda d: tuple(tuple(c.coeffs) for c in reversed(d.coords)))
    logger.debug("Found %d %s directions, %d families", len(report.resolved), kind, len(report.families))
    return report


def _direction(v: Direction3, G: Sequence[TruncSeries], divisor_axes: Sequence[int]) -> Direction:
    values = [g.evaluate(v) for g in G]
    k = next(i for i in range(3) if not v[i].is_zero())
    multiplier = values[k] / v[k]
    for i in range(3):
        if values[i] != multiplier * v[i]:
            raise InvariantViolation(f"Direction {[str(c) for c in v]} does not satisfy H(v) ^ v = 0")
    exceptional = any(v[m].is_zero() for m in divisor_axes)
    return Direction(v, multiplier, multiplier.is_zero(), exceptional)


def _divisor_axes(f: Germ) -> List[int]:
    return [k for k in range(3) if f.divisor[k] > 0]


def singular_directions(f: Germ, cross_check: bool = False) -> DirectionReport:
    """
    Singular directions: zeros of H_l(v) ^ v with l the divisor times the monomial content

    Args:
        f: Germ with f - id != 0
        cross_check: Lift at every resolved direction and confirm the reduced lift vanishes there

    Returns:
        DirectionReport
    """
    data = homogeneous_data(f)
    report = _solve(data.H_ell, "singular", _divisor_axes(f))
    if cross_check:
        for d in report.resolved:
            if not lift_is_singular(f, d.coords):
                raise InvariantViolation(f"Lift at singular direction {d} is regular")
    return report


def characteristic_directions(f: Germ) -> DirectionReport:
    """Characteristic directions: zeros of H(v) ^ v."""
    data = homogeneous_data(f)
    return _solve(data.H, "characteristic", _divisor_axes(f))


def dicriticality(f: Germ) -> int:
    """0 isolated directions, 1 with a curve of directions, 2 dicritical."""
    return singular_directions(f).dicriticality


def lift_is_singular(f: Germ, v: Sequence) -> bool:
    """True iff the reduced displacement of the lift at v vanishes at the origin."""
    from .blowup import lift_point_blowup

    lifted = lift_point_blowup(f, v)
    return all(c.is_zero() for c in lifted.reduced_constants())


# ----------------------------------------------------------------------
# intersection multiplicities


def intersection_multiplicity(query: IntersectionQuery) -> Multiplicity:
    """
    Local intersection number of two plane curves (Fulton's algorithm)

    Returns:
        Non-negative integer, or math.inf when the curves share a component through the point
    """
    u, w = query.variables
    shift = {u: _U + query.point[0].to_sympy(), w: _W + query.point[1].to_sympy()}
    F = sympy.expand(sympy.sympify(query.F).subs(shift, simultaneous=True))
    G = sympy.expand(sympy.sympify(query.G).subs(shift, simultaneous=True))
    if F == 0 or G == 0:
        return math.inf
    common = sympy.gcd(F, G)
    if sympy.Poly(common, _U, _W).total_degree() > 0:
        if sympy.expand(common.subs({_U: 0, _W: 0})) == 0:
            return math.inf
        F = sympy.quo(F, common, _U, _W)
        G = sympy.quo(G, common, _U, _W)
    Fp = sympy.Poly(F, _U, _W, domain=QQ_I)
    Gp = sympy.Poly(G, _U, _W, domain=QQ_I)
    dF = Fp.total_degree()
    fuel = 4 * (dF + 1) * (Gp.total_degree() + 1) * (dF + Gp.total_degree() + 1)
    return _fulton(Fp, Gp, fuel)


def _at_origin(P: sympy.Poly) -> bool:
    return sympy.expand(P.as_expr().subs({_U: 0, _W: 0})) == 0


def _fulton(F: sympy.Poly, G: sympy.Poly, fuel: int) -> Multiplicity:
    total = 0
    while True:
        if fuel <= 0:
            raise InvariantViolation("Intersection multiplicity recursion exceeded its fuel bound")
        fuel -= 1
        if F.is_zero or G.is_zero:
            return math.inf
        if not _at_origin(F) or not _at_origin(G):
            return total
        f0 = F.eval(_W, 0)
        g0 = G.eval(_W, 0)
        if f0.is_zero and g0.is_zero:
            return math.inf
        if f0.is_zero or g0.is_zero:
            if g0.is_zero:
                F, G, f0, g0 = G, F, g0, f0
            # w | F: I(F, G) = I(w, G) + I(F / w, G)
            total += min(m[0] for m in g0.monoms())
            F = sympy.Poly(sympy.quo(F.as_expr(), _W, _U, _W), _U, _W, domain=QQ_I)
            continue
        r, s = f0.degree(), g0.degree()
        if r > s:
            F, G, f0, g0, r, s = G, F, g0, f0, s, r
        shift = sympy.Poly(_U ** (s - r), _U, _W, domain=QQ_I)
        G = G.mul_ground(f0.LC()) - (F * shift).mul_ground(g0.LC())


def direction_multiplicity(f: Germ, v: Sequence) -> Multiplicity:
    """
    mu_f(v): intersection at v of the two cross minors of H in the affine chart containing v

    Raises:
        InvariantViolation: If v is not a characteristic direction
    """
    data = homogeneous_data(f)
    coords = normalize_direction(v)
    j = max(k for k in range(3) if not coords[k].is_zero())
    H = [sympy.expand(to_sympy(h)) for h in data.H]
    variables = (X, Y, Z)
    others = [k for k in range(3) if k != j]
    substitution = {variables[j]: 1, variables[others[0]]: U_SYMBOL, variables[others[1]]: W_SYMBOL}
    curves = [
        sympy.expand((variables[j] * H[k] - variables[k] * H[j]).subs(substitution, simultaneous=True))
        for k in others
    ]
    point = (coords[others[0]] / coords[j], coords[others[1]] / coords[j])
    for curve in curves:
        if sympy.expand(curve.subs({U_SYMBOL: point[0].to_sympy(), W_SYMBOL: point[1].to_sympy()})) != 0:
            raise InvariantViolation(f"[{':'.join(str(c) for c in coords)}] is not a characteristic direction")
    mult = intersection_multiplicity(IntersectionQuery(curves[0], curves[1], point))
    if mult == math.inf:
        logger.warning("Cross minors share a component through %s", [str(c) for c in coords])
    return mult


@dataclass
class BezoutCheck:
    total: Multiplicity
    expected: int
    complete: bool

    @property
    def ok(self) -> bool:
        return self.complete and self.total == self.expected

    def to_dict(self) -> dict:
        return {"total": self.total, "expected": self.expected, "complete": self.complete, "ok": self.ok}


def bezout_check(f: Germ) -> BezoutCheck:
    """Sum of mu_f over the characteristic directions against nu^2 + nu + 1."""
    data = homogeneous_data(f)
    report = characteristic_directions(f)
    nu = data.order
    total: Multiplicity = 0
    for d in report.resolved:
        total += direction_multiplicity(f, d.coords)
    complete = not report.unresolved and report.dicriticality == ISOLATED
    return BezoutCheck(total, nu * nu + nu + 1, complete)
