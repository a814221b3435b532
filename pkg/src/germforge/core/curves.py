"""
Formal invariant curves transverse to the divisor.

Curves are smooth graphs over one coordinate axis, the parameter axis t:
(x(t), y(t), t) after ordering coordinates.  The invariance condition

    row_k(t) + D_k(gamma(t)) = row_k(t + D_t(gamma(t)))      (D = f - id)

is solved order by order.  Row k of the residual first sees the coefficient
of t^n at order n + s_k, the row offset of the class: (c, c) for degenerate
spikes and (c, c + 1) for half corners in normal form.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import sympy

from .algebra import (
    EXACT_DEGREE,
    ONE,
    SYMBOLS,
    VARIABLES,
    ZERO,
    Scalar,
    TruncSeries,
    degree,
    divides,
    series_compose,
    series_div_monomial,
    to_sympy,
    uni_compose,
    uni_order,
    uni_reverse,
)
from .blowup import Chart, lift, point_chart
from .classify import (
    DegenerateSpike,
    HalfCorner,
    SpinningCorner,
    _sample_values,
    classify_germ,
    normal_form,
)
from .directions import normalize_direction, singular_directions
from .germ import Germ, Map, Matrix3
from .validators import (
    DEFAULT_CURVE_DEPTH,
    DEFAULT_SAMPLES,
    InsufficientPrecisionError,
    InvariantViolation,
    UndecidableError,
    validate_positive,
)

logger = logging.getLogger(__name__)

# Verdicts
INFINITELY_MANY = "infinitely_many"
UNIQUE = "unique"
NONE = "none"
RESONANT = "resonant"
OUTSIDE_TRICHOTOMY = "outside_trichotomy"
UNDECIDED = "undecided"

Coefficients = List[Scalar]
Walker = Callable[[Germ, int], Sequence]


def _pad(coeffs: Sequence[Scalar], n: int) -> Coefficients:
    out = list(coeffs[: n + 1])
    return out + [ZERO] * (n + 1 - len(out))


@dataclass
class FormalCurve:
    """Smooth formal curve given as a graph over the parameter axis, known through t^depth."""

    components: Tuple[Coefficients, Coefficients, Coefficients]
    depth: int
    axis: int = 2
    offsets: Optional[Tuple[int, int]] = None  # residual order shifts of the two graph rows

    @property
    def rows(self) -> Tuple[int, int]:
        return tuple(k for k in range(3) if k != self.axis)  # type: ignore[return-value]

    def coefficient(self, k: int, n: int) -> Scalar:
        comp = self.components[k]
        return comp[n] if n < len(comp) else ZERO

    def as_map(self) -> Map:
        """The parametrization as three exact series in the parameter variable."""
        return tuple(  # type: ignore[return-value]
            TruncSeries.univariate(_pad(comp, self.depth), self.axis) for comp in self.components
        )

    def tangent(self) -> Tuple[Scalar, Scalar, Scalar]:
        return tuple(self.coefficient(k, 1) for k in range(3))  # type: ignore[return-value]

    @property
    def sequence(self) -> List[Tuple[Scalar, Scalar, Scalar]]:
        """Infinitely near points p_1..p_depth read in the parameter-axis charts."""
        return [
            tuple(ONE if k == self.axis else self.coefficient(k, n) for k in range(3))  # type: ignore[misc]
            for n in range(1, self.depth + 1)
        ]

    def truncated(self, depth: int) -> "FormalCurve":
        comps = tuple(
            [ZERO, ONE] if k == self.axis else _pad(self.components[k], depth) for k in range(3)
        )
        return FormalCurve(comps, depth, self.axis, self.offsets)  # type: ignore[arg-type]

    def transform(self, matrix: Matrix3) -> "FormalCurve":
        """
        The same curve in coordinates old = matrix . new

        Raises:
            InvariantViolation: If the image is not a graph over any axis
        """
        n = self.depth
        comps = [_pad(c, n) for c in self.components]
        old = [
            [sum((matrix[i][j] * comps[j][d] for j in range(3)), ZERO) for d in range(n + 1)]
            for i in range(3)
        ]
        unit = [ZERO, ONE] + [ZERO] * (n - 1)
        axis = next((i for i in range(3) if old[i] == unit), None)
        if axis is None:
            axis = next((i for i in range(3) if not old[i][1].is_zero()), None)
            if axis is None:
                raise InvariantViolation("Transformed curve is not transverse to any coordinate plane")
            scale = old[axis][1]
            w = uni_reverse([c / scale for c in old[axis]], n)
            inner = [c / scale**d for d, c in enumerate(w)]
            old = [unit if i == axis else uni_compose(old[i], inner, n) for i in range(3)]
        old[axis] = [ZERO, ONE]
        return FormalCurve(tuple(old), n, axis)  # type: ignore[arg-type]

    def blow_down(self, chart: Chart) -> "FormalCurve":
        """
        Image of a curve in a point-blow-up chart whose dividing axis is the parameter axis

        The jet gains one degree.
        """
        if chart.kind != "point" or chart.dividing != self.axis:
            raise InvariantViolation(f"Cannot blow a curve over {VARIABLES[self.axis]} down through {chart.label}")
        n = self.depth + 1
        comps = []
        for k in range(3):
            if k == self.axis:
                comps.append([ZERO, ONE])
                continue
            comp = _pad(self.components[k], self.depth)
            comp[0] = comp[0] + chart.translation[k]
            comps.append([ZERO] + comp)
        return FormalCurve(tuple(comps), n, self.axis)  # type: ignore[arg-type]

    def to_dict(self) -> dict:
        out = {"e": 1, "depth": self.depth, "parameter": VARIABLES[self.axis]}
        for k in range(3):
            out[VARIABLES[k]] = [str(c) for c in _pad(self.components[k], self.depth)]
        return out


def _parameter_valuation(f: Germ, curve: FormalCurve) -> int:
    """t-order of the divisor monomial along the curve."""
    total = 0
    for k in range(3):
        if f.divisor[k]:
            order = uni_order(curve.components[k])
            if order is None:
                raise InvariantViolation(f"Curve lies in the divisor component {{{VARIABLES[k]}=0}}")
            total += f.divisor[k] * order
    return total


def invariance_residual(f: Germ, curve: FormalCurve, order: int) -> Dict[int, Coefficients]:
    """
    Residual row_k(t) + D_k(gamma(t)) - row_k(t + D_t(gamma(t))) for the two graph rows

    Raises:
        InsufficientPrecisionError: If f is not known along the curve through t^order
    """
    gamma = curve.as_map()
    images = []
    for k, comp in enumerate(f.displacement):
        image = series_compose(comp, gamma, order)
        if image.N < order:
            raise InsufficientPrecisionError(
                f"Germ known along the curve through t^{image.N}, residual needs t^{order}; raise N"
            )
        images.append(_pad(image.as_univariate(curve.axis), order))
    moved_t = [ZERO, ONE] + [ZERO] * (order - 1)
    moved_t = [a + b for a, b in zip(moved_t, images[curve.axis])]
    out = {}
    for k in curve.rows:
        comp = _pad(curve.components[k], order)
        moved = uni_compose(comp, moved_t, order)
        out[k] = [comp[d] + images[k][d] - moved[d] for d in range(order + 1)]
    return out


def verify_invariance(f: Germ, curve: FormalCurve, M: Optional[int] = None) -> int:
    """
    Largest m <= M such that the curve jet is invariant through degree m

    Row k passes through degree m when its residual vanishes through t^(m + s_k).
    Without recorded offsets both shifts are the t-order of the divisor along the curve.

    Raises:
        InsufficientPrecisionError: If f is not known far enough along the curve
    """
    M = curve.depth if M is None else min(M, curve.depth)
    offsets = curve.offsets
    if offsets is None:
        c = _parameter_valuation(f, curve)
        offsets = (c, c)
    shift = dict(zip(curve.rows, offsets))
    residual = invariance_residual(f, curve.truncated(M), M + max(offsets))
    best = M
    for k, values in residual.items():
        first = next((d for d, v in enumerate(values) if not v.is_zero()), None)
        if first is not None:
            best = min(best, first - 1 - shift[k])
    logger.debug("Curve invariant through degree %d (of %d)", max(best, 0), M)
    return max(best, 0)


def solve_transverse_curve(f: Germ, offsets: Tuple[int, int], depth: int, axis: int = 2) -> FormalCurve:
    """
    Transverse invariant curve over the parameter axis, solved order by order

    Rows with the larger offset are solved first; rows sharing an offset are solved
    jointly as a 2x2 linear system.

    Args:
        f: Germ
        offsets: Residual order shifts of the two graph rows (ascending axis order)
        depth: Jet degree M of the curve
        axis: Parameter axis

    Returns:
        FormalCurve with invariance residual zero through degree M

    Raises:
        InvariantViolation: If some order of the invariance equation has no free coefficient and fails
        UndecidableError: If a coefficient equation is resonant (vanishing multiplier)
    """
    validate_positive("curve depth", depth)
    rows = tuple(k for k in range(3) if k != axis)
    shift = dict(zip(rows, offsets))
    comps: List[Coefficients] = [[ZERO] * (depth + 1) for _ in range(3)]
    comps[axis] = [ZERO, ONE]
    groups: List[List[int]] = []
    for k in sorted(rows, key=lambda r: -shift[r]):
        if groups and shift[groups[-1][0]] == shift[k]:
            groups[-1].append(k)
        else:
            groups.append([k])

    def value(level: int, trial: Dict[int, Tuple[int, Scalar]]) -> Dict[int, Scalar]:
        work = [list(c) for c in comps]
        for k, (n, v) in trial.items():
            work[k][n] = v
        curve = FormalCurve(tuple(work), depth, axis)  # type: ignore[arg-type]
        residual = invariance_residual(f, curve, level)
        return {k: residual[k][level] for k in rows}

    for level in range(1, depth + max(offsets) + 1):
        for group in groups:
            index = {k: level - shift[k] for k in group}
            active = [k for k in group if 1 <= index[k] <= depth]
            idle = [k for k in group if index[k] < 1]
            if not active and not idle:
                continue
            base = value(level, {})
            for k in idle:
                if not base[k].is_zero():
                    raise InvariantViolation(
                        f"No transverse invariant curve: row {VARIABLES[k]} fails at order {level} "
                        f"with residual {base[k]} and no free coefficient"
                    )
            if len(active) == 1:
                k = active[0]
                slope = value(level, {k: (index[k], ONE)})[k] - base[k]
                if slope.is_zero():
                    raise UndecidableError(
                        f"Resonant invariance equation for the t^{index[k]} coefficient of {VARIABLES[k]} "
                        f"(order {level}, residual {base[k]})"
                    )
                comps[k][index[k]] = -base[k] / slope
            elif len(active) == 2:
                k0, k1 = active
                col0 = value(level, {k0: (index[k0], ONE)})
                col1 = value(level, {k1: (index[k1], ONE)})
                a, b = col0[k0] - base[k0], col1[k0] - base[k0]
                c, d = col0[k1] - base[k1], col1[k1] - base[k1]
                det = a * d - b * c
                if det.is_zero():
                    raise UndecidableError(
                        f"Resonant invariance system for the t^{index[k0]} coefficients at order {level}"
                    )
                comps[k0][index[k0]] = (-base[k0] * d + b * base[k1]) / det
                comps[k1][index[k1]] = (-a * base[k1] + c * base[k0]) / det
    curve = FormalCurve(tuple(comps), depth, axis, tuple(offsets))  # type: ignore[arg-type]
    reached = verify_invariance(f, curve)
    if reached < depth:
        raise InvariantViolation(f"Solved curve fails invariance at degree {reached + 1}")
    logger.debug("Solved transverse curve to degree %d over %s", depth, VARIABLES[axis])
    return curve


def default_curve_depth(f: Germ) -> int:
    """N' - 2, the jet the certified degree supports, capped at DEFAULT_CURVE_DEPTH."""
    return min(DEFAULT_CURVE_DEPTH, max(1, f.reduced_degree - 2))


def spike_curve(f: Germ, M: Optional[int] = None) -> FormalCurve:
    """
    The unique invariant curve of a degenerate spike not contained in the divisor

    Raises:
        InvariantViolation: If f is not a degenerate spike
    """
    cls = classify_germ(f)
    if not isinstance(cls, DegenerateSpike):
        raise InvariantViolation(f"Expected a degenerate spike, got {cls.describe()}")
    nf = normal_form(f, cls)
    c = nf.cls.c  # type: ignore[attr-defined]
    M = default_curve_depth(nf.germ) if M is None else M
    curve = solve_transverse_curve(nf.germ, (c, c), M)
    return curve if _is_identity(nf.matrix) else curve.transform(nf.matrix)


def half_corner_curve(f: Germ, M: Optional[int] = None) -> FormalCurve:
    """
    The unique transverse invariant curve of a non-simple half corner

    The t^n coefficient of y is fixed by (b_y - n gamma) y_n = l.o.t., checked
    non-resonant up front.

    Raises:
        InvariantViolation: If f is not a half corner or the half corner is simple
        UndecidableError: If b_y lies in gamma N*
    """
    cls = classify_germ(f)
    if not isinstance(cls, HalfCorner):
        raise InvariantViolation(f"Expected a half corner, got {cls.describe()}")
    if cls.simple:
        raise InvariantViolation(f"Simple half corner (beta = {cls.beta}): no transverse curve")
    nf = normal_form(f, cls)
    hc: HalfCorner = nf.cls  # type: ignore[assignment]
    b_y, gamma = hc.resonance_pair()
    resonance = _resonance_index(b_y, gamma)
    if resonance is not None:
        raise UndecidableError(
            f"Resonant half corner: b_y = {b_y}, gamma = {gamma}; resonant at t^{resonance}"
        )
    M = default_curve_depth(nf.germ) if M is None else M
    curve = solve_transverse_curve(nf.germ, (hc.c, hc.c + 1), M)
    return curve if _is_identity(nf.matrix) else curve.transform(nf.matrix)


def _resonance_index(b_y: Scalar, gamma: Scalar) -> Optional[int]:
    """n >= 1 with b_y = n gamma, if any."""
    if gamma.is_zero():
        return 1 if b_y.is_zero() else None
    ratio = b_y / gamma
    if ratio.is_rational():
        value = ratio.rational()
        if value.denominator == 1 and value > 0:
            return int(value)
    return None


def _is_identity(matrix: Matrix3) -> bool:
    return all(matrix[i][j] == (ONE if i == j else ZERO) for i in range(3) for j in range(3))


# ----------------------------------------------------------------------
# infinitely near sequences


def spike_walker(g: Germ, depth: int) -> Tuple[Scalar, Scalar, Scalar]:
    """The unique non-exceptional singular direction of a degenerate spike."""
    cls = classify_germ(g)
    if not isinstance(cls, DegenerateSpike):
        raise InvariantViolation(f"Spike walk left the degenerate spikes at depth {depth}: {cls.describe()}")
    v = cls.spike_direction()
    direction = [ZERO, ZERO, ZERO]
    for i, axis in enumerate(cls.roles):
        direction[axis] = v[i]
    candidates = singular_directions(g).non_exceptional()
    if len(candidates) != 1 or candidates[0].coords != normalize_direction(direction):
        raise InvariantViolation(
            f"Spike walk at depth {depth}: expected a unique non-exceptional singular direction, "
            f"found {[str(d) for d in candidates]}"
        )
    return tuple(direction)  # type: ignore[return-value]


def half_corner_walker(g: Germ, depth: int) -> Tuple[Scalar, Scalar, Scalar]:
    """The non-simple half corner above a non-simple half corner."""
    cls = classify_germ(g)
    if not isinstance(cls, HalfCorner) or cls.simple:
        raise InvariantViolation(f"Half corner walk reached {cls.describe()} at depth {depth}")
    points = cls.non_simple_points()
    if not points:
        raise UndecidableError(
            f"Half corner walk at depth {depth}: "
            + ("every child is non-simple" if points is None else "no non-simple child")
        )
    y0 = points[0]
    a_x, a_y, a_z = cls.a
    x0 = -(a_y * y0 + a_z) / a_x
    direction = [ZERO, ZERO, ZERO]
    for axis, value in zip(cls.roles, (x0, y0, ONE)):
        direction[axis] = value
    return tuple(direction)  # type: ignore[return-value]


def fixed_walker(points: Sequence[Sequence]) -> Walker:
    """Walker replaying a given list of directions, one per depth."""
    stored = [tuple(Scalar.coerce(c) for c in p) for p in points]

    def walk(g: Germ, depth: int):
        if depth > len(stored):
            raise InvariantViolation(f"No recorded point at depth {depth}")
        return stored[depth - 1]

    return walk


def curve_from_sequence(f: Germ, walker: Walker, M: Optional[int] = None, axis: int = 2) -> FormalCurve:
    """
    Curve through an increasing sequence of singular infinitely near points

    At depth n the walker picks a direction [.. : 1 : ..] in the parameter-axis
    chart; its translations are the t^n coefficients of the curve.

    Raises:
        InvariantViolation: If a chosen point is regular for the lift or not a smooth
            point of the exceptional divisor (the message names the depth)
    """
    M = default_curve_depth(f) if M is None else M
    validate_positive("curve depth", M)
    comps: List[Coefficients] = [[ZERO] for _ in range(3)]
    g = f
    for n in range(1, M + 1):
        v = [Scalar.coerce(c) for c in walker(g, n)]
        if v[axis].is_zero():
            raise InvariantViolation(f"Walker left the {VARIABLES[axis]}-chart at depth {n}")
        v = [c / v[axis] for c in v]
        for k in range(3):
            if k != axis and g.divisor[k] and v[k].is_zero():
                raise InvariantViolation(
                    f"Point at depth {n} lies on two exceptional components (not a smooth point)"
                )
        g = lift(g, point_chart(v, axis))
        if any(not c.is_zero() for c in g.reduced_constants()):
            raise InvariantViolation(f"Point at depth {n} is regular for the lift")
        for k in range(3):
            if k != axis:
                comps[k].append(v[k])
    comps[axis] = [ZERO, ONE]
    curve = FormalCurve(tuple(comps), M, axis)  # type: ignore[arg-type]
    reached = verify_invariance(f, curve)
    if reached < M:
        raise InvariantViolation(f"Curve from the point sequence fails invariance at degree {reached + 1}")
    logger.info("Constructed curve from %d infinitely near points", M)
    return curve


# ----------------------------------------------------------------------
# spinning corners


@dataclass
class SpinningCornerCurves:
    """Transverse invariant curves of a spinning corner."""

    verdict: str
    b: Tuple[Scalar, Scalar]  # (b_y, b_z)
    c: Tuple[Scalar, Scalar]  # (c_y, c_z)
    points: List[Scalar] = field(default_factory=list)  # y0 of the half corners carrying the curves
    curves: List[FormalCurve] = field(default_factory=list)
    ratio: Optional[Scalar] = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "b_y": str(self.b[0]),
            "b_z": str(self.b[1]),
            "c_y": str(self.c[0]),
            "c_z": str(self.c[1]),
            "ratio": None if self.ratio is None else str(self.ratio),
            "points": [str(p) for p in self.points],
            "curves": [curve.to_dict() for curve in self.curves],
        }


def spinning_corner_verdict(b: Tuple[Scalar, Scalar], c: Tuple[Scalar, Scalar]) -> Tuple[str, Optional[Scalar]]:
    """
    Existence trichotomy from (b_y, b_z), (c_y, c_z)

    Returns:
        (verdict, ratio) with ratio = (c_z - b_z)(b_y - c_y) / (b_y c_z - b_z c_y) when defined
    """
    (b_y, b_z), (c_y, c_z) = b, c
    if all(v.is_zero() for v in (b_y, b_z, c_y, c_z)):
        return OUTSIDE_TRICHOTOMY, None
    same_y, same_z = b_y == c_y, b_z == c_z
    if same_y and same_z:
        return INFINITELY_MANY, None
    if same_y or same_z:
        return NONE, None
    delta = b_y * c_z - b_z * c_y
    if delta.is_zero():
        return UNIQUE, None
    ratio = (c_z - b_z) * (b_y - c_y) / delta
    if ratio.is_rational() and ratio.rational() > 0 and ratio.rational().denominator == 1:
        return RESONANT, ratio
    return UNIQUE, ratio


def spinning_corner_curve_analysis(
    f: Germ, M: Optional[int] = None, samples: int = DEFAULT_SAMPLES
) -> SpinningCornerCurves:
    """
    Trichotomy for transverse invariant curves of a spinning corner

    In the unique case the curve is built through the non-simple half corner at
    [0:y0:1], y0 = (c_z - b_z) / (b_y - c_y); with infinitely many curves, a few
    sampled members are built.

    Raises:
        InvariantViolation: If f is not a spinning corner
    """
    cls = classify_germ(f)
    if not isinstance(cls, SpinningCorner):
        raise InvariantViolation(f"Expected a spinning corner, got {cls.describe()}")
    nf = normal_form(f, cls)
    spc: SpinningCorner = nf.cls  # type: ignore[assignment]
    b, c = spc.tilde_q, spc.tilde_r
    verdict, ratio = spinning_corner_verdict(b, c)
    result = SpinningCornerCurves(verdict, b, c, ratio=ratio)
    if verdict == UNIQUE:
        result.points = spc.non_simple_points() or []
    elif verdict == INFINITELY_MANY:
        avoid = [] if c[0].is_zero() else [-c[1] / c[0]]
        result.points = _sample_values(samples, avoid)
    for y0 in result.points:
        chart = point_chart((ZERO, y0, ONE), 2)
        child = lift(nf.germ, chart)
        curve = half_corner_curve(child, M).blow_down(chart)
        result.curves.append(curve if _is_identity(nf.matrix) else curve.transform(nf.matrix))
    logger.info("Spinning corner curve verdict: %s", verdict)
    return result


# ----------------------------------------------------------------------
# restriction to the invariant surface


@dataclass
class RestrictedGerm:
    """Jet of f on the formal invariant surface {x = A(y, z)} of a spinning corner."""

    surface: TruncSeries
    components: Tuple[TruncSeries, TruncSeries]  # reduced displacement in (y, z)
    divisor: Tuple[int, int]
    directions: List[Tuple[Scalar, Scalar]]
    unresolved: List[str] = field(default_factory=list)
    verdict: str = UNDECIDED

    def to_dict(self) -> dict:
        return {
            "surface": f"x = {self.surface}",
            "components": [str(c) for c in self.components],
            "divisor": list(self.divisor),
            "characteristic_directions": ["[" + ":".join(str(c) for c in d) + "]" for d in self.directions],
            "unresolved": list(self.unresolved),
            "verdict": self.verdict,
        }


def invariant_surface(f: Germ) -> TruncSeries:
    """
    Graph x = A(y, z) of the formal invariant surface, degree by degree

    Needs F'_x = a_x x + O(2) with a_x != 0 and no linear (y, z)-terms,
    and x absent from the divisor.
    """
    a_x = f.reduced[0].coefficient((1, 0, 0))
    if a_x.is_zero() or f.divisor[0]:
        raise InvariantViolation("Invariant surface x = A(y, z) needs a_x != 0 and x outside the divisor")
    ell = f.divisor
    K = f.reduced_degree
    Y, Z = TruncSeries.variable(1), TruncSeries.variable(2)
    A = TruncSeries.zero()
    for d in range(2, K + 1):
        point = (A, Y, Z)
        image = [series_compose(comp, point, K) for comp in f.reduced]
        moved_y = Y + image[1].shift(ell)
        moved_z = Z + image[2].shift(ell)
        moved = series_compose(A, (TruncSeries.variable(0), moved_y, moved_z), K + degree(ell)) - A
        if not divides(ell, moved):
            raise InvariantViolation("Surface invariance quotient is not divisible by the divisor monomial")
        error = image[0] - series_div_monomial(moved, ell)
        part = error.homogeneous_part(d)
        if not part.is_zero():
            A = A + TruncSeries({e: -c / a_x for e, c in part.items()}, EXACT_DEGREE)
    return A.with_degree(K)


def restricted_germ_jet(f: Germ) -> RestrictedGerm:
    """
    Jet of the two-dimensional germ on the invariant surface above a spinning corner

    Separatrices of the restricted germ are not decided; the verdict is always "undecided".
    """
    cls = classify_germ(f)
    if not isinstance(cls, SpinningCorner):
        raise InvariantViolation(f"Expected a spinning corner, got {cls.describe()}")
    g = normal_form(f, cls).germ
    A = invariant_surface(g)
    K = g.reduced_degree
    point = (A.with_degree(EXACT_DEGREE), TruncSeries.variable(1), TruncSeries.variable(2))
    comps = tuple(series_compose(g.reduced[k], point, K) for k in (1, 2))
    ell = (0, g.divisor[1], g.divisor[2])
    directions, unresolved = _plane_directions([c.shift(ell) for c in comps])
    logger.info("Restricted germ on the invariant surface: %d characteristic directions", len(directions))
    return RestrictedGerm(A, comps, (g.divisor[1], g.divisor[2]), directions, unresolved)  # type: ignore[arg-type]


def _plane_directions(H: Sequence[TruncSeries]) -> Tuple[List[Tuple[Scalar, Scalar]], List[str]]:
    """Characteristic directions [u:w] of a germ of (C^2, 0) in the (y, z) plane."""
    order = min(h.val for h in H)
    Ys, Zs = SYMBOLS[1], SYMBOLS[2]
    parts = [to_sympy(h.homogeneous_part(order)) for h in H]
    expr = sympy.expand(Ys * parts[1] - Zs * parts[0])
    if expr == 0:
        return [], ["dicritical"]
    _, factors = sympy.factor_list(expr, Ys, Zs, extension=sympy.I)
    directions: List[Tuple[Scalar, Scalar]] = []
    unresolved: List[str] = []
    for factor, _mult in factors:
        poly = sympy.Poly(factor, Ys, Zs)
        if poly.total_degree() != 1:
            unresolved.append(str(factor))
            continue
        alpha = Scalar.from_sympy(poly.coeff_monomial(Ys))
        beta = Scalar.from_sympy(poly.coeff_monomial(Zs))
        direction = (ONE, ZERO) if alpha.is_zero() else (-beta / alpha, ONE)
        if direction not in directions:
            directions.append(direction)
    return directions, unresolved
