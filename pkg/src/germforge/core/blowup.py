"""
Point and coordinate-line blow-ups in explicit charts.

A chart is described by the axes C cut out by the center (all three for a
point, two for a coordinate line), the dividing axis j in C and the
translations v_m (m in C, m != j) that move the studied point of the
exceptional divisor to the origin:

    s_j = x_j,   s_m = x_j (x_m + v_m)  (m in C, m != j),   s_m = x_m  (m not in C).

With f = id + l F' and l = x^a, the lifted germ is again id + l' F~' where

    l'  = x_j^(a_C + h_C - 1) * prod_{m in C-j, v_m = 0} x_m^a_m * prod_{m not in C} x_m^a_m
    U   = prod_{m in C-j, v_m != 0} (x_m + v_m)^a_m
    K   = F'(s) / x_j^h_C

and h_C is the lowest degree of F' in the center variables.  The new reduced
components are x_j U K_j, x_j U K_m (m not in C) and
U (K_m - (x_m + v_m) K_j) / (1 + l' U K_j) for m in C - j.  The certified
degree of F' drops by h_C.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from .algebra import (
    ZERO,
    Scalar,
    TruncSeries,
    VARIABLES,
    degree,
    series_compose,
    series_div_monomial,
    series_invert_unit,
    series_mul,
    unit_exp,
)
from .germ import Germ, Map
from .infgen import VectorField
from .validators import InsufficientPrecisionError, InvariantViolation

logger = logging.getLogger(__name__)

_T = sympy.Symbol("t")


@dataclass(frozen=True)
class Chart:
    """Blow-up chart: center axes, dividing axis and translations on the other center axes."""

    center: Tuple[int, ...]
    dividing: int
    translation: Tuple[Scalar, Scalar, Scalar] = (ZERO, ZERO, ZERO)

    def __post_init__(self):
        if self.dividing not in self.center:
            raise InvariantViolation(f"Dividing axis {self.dividing} is not a center axis {self.center}")
        if len(self.center) not in (2, 3) or len(set(self.center)) != len(self.center):
            raise InvariantViolation(f"Center must be a point or a coordinate line: {self.center}")
        for m in range(3):
            if (m not in self.center or m == self.dividing) and not self.translation[m].is_zero():
                raise InvariantViolation(
                    f"Translation along {VARIABLES[m]} is not allowed in chart {self.label}"
                )

    @property
    def kind(self) -> str:
        return "point" if len(self.center) == 3 else "line"

    @property
    def others(self) -> Tuple[int, ...]:
        return tuple(m for m in self.center if m != self.dividing)

    @property
    def label(self) -> str:
        names = []
        for m in range(3):
            if m == self.dividing or m not in self.center:
                names.append(VARIABLES[m])
            else:
                names.append(f"{VARIABLES[self.dividing]}{VARIABLES[m]}")
        return "(" + ", ".join(names) + ")"

    def substitution(self) -> Map:
        j = self.dividing
        comps = []
        for m in range(3):
            if m in self.others:
                inner = TruncSeries.variable(m) + TruncSeries.constant(self.translation[m])
                comps.append(series_mul(TruncSeries.variable(j), inner))
            else:
                comps.append(TruncSeries.variable(m))
        return tuple(comps)  # type: ignore[return-value]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "center": list(self.center),
            "dividing": VARIABLES[self.dividing],
            "chart": self.label,
            "translation": [str(t) for t in self.translation],
        }


def point_chart(direction: Sequence, j: Optional[int] = None) -> Chart:
    """
    Chart of the point blow-up showing the direction [v0:v1:v2] at its origin

    Raises:
        InvariantViolation: If the direction is not visible in chart j
    """
    v = [Scalar.coerce(c) for c in direction]
    if j is None:
        j = max(k for k in range(3) if not v[k].is_zero())
    if v[j].is_zero():
        raise InvariantViolation(f"Direction {[str(c) for c in v]} is not visible in the {VARIABLES[j]}-chart")
    translation = tuple(ZERO if m == j else v[m] / v[j] for m in range(3))
    return Chart((0, 1, 2), j, translation)  # type: ignore[arg-type]


def line_chart(axes: Sequence[int], j: int, fiber_point: Optional[Scalar] = None) -> Chart:
    """Chart of the blow-up of the line {x_a = x_b = 0}; fiber_point translates the other center axis."""
    axes = tuple(sorted(axes))
    translation = [ZERO, ZERO, ZERO]
    if fiber_point is not None:
        other = [m for m in axes if m != j][0]
        translation[other] = Scalar.coerce(fiber_point)
    return Chart(axes, j, tuple(translation))  # type: ignore[arg-type]


def center_order(F: Sequence[TruncSeries], center: Sequence[int]) -> int:
    """Lowest degree of the known terms of F' in the center variables."""
    orders = [sum(e[m] for m in center) for comp in F for e, _ in comp.items()]
    return min(orders) if orders else 0


def lift(f: Germ, chart: Chart) -> Germ:
    """
    Lift of f through a blow-up chart

    Raises:
        InvariantViolation: If the center is not pointwise fixed or the lift is not tangent to the identity
        InsufficientPrecisionError: If no certified jet remains
    """
    j = chart.dividing
    a = f.divisor
    F = f.reduced
    h = center_order(F, chart.center)
    a_center = sum(a[m] for m in chart.center)
    if a_center + h == 0:
        raise InvariantViolation(
            f"Line not pointwise fixed: f - id does not vanish on the center {chart.center}"
        )
    new_exp = [0, 0, 0]
    new_exp[j] = a_center + h - 1
    unit = TruncSeries.one()
    for m in range(3):
        if m in chart.others:
            v = chart.translation[m]
            if v.is_zero():
                new_exp[m] = a[m]
            elif a[m]:
                unit = series_mul(unit, (TruncSeries.variable(m) + TruncSeries.constant(v)) ** a[m])
        elif m not in chart.center:
            new_exp[m] = a[m]
    subst = chart.substitution()
    K = [series_div_monomial(series_compose(comp, subst), unit_exp(j, h)) for comp in F]
    bound = min(c.N for c in K)
    if bound < 0:
        raise InsufficientPrecisionError(
            f"Lift in chart {chart.label} leaves no certified jet (reduced degree {f.reduced_degree}, center order {h})"
        )
    K = [c.truncate(bound) for c in K]
    ell = tuple(new_exp)
    UK = [series_mul(unit, c, bound) for c in K]
    xj = TruncSeries.variable(j)
    denominator = TruncSeries.one(bound) + UK[j].shift(ell).truncate(bound)  # type: ignore[arg-type]
    if denominator.constant_term().is_zero():
        raise InvariantViolation(f"Lift in chart {chart.label} is not tangent to the identity")
    inverse = series_invert_unit(denominator, bound)
    reduced = []
    for m in range(3):
        if m in chart.others:
            shifted = series_mul(TruncSeries.variable(m) + TruncSeries.constant(chart.translation[m]), UK[j], bound)
            reduced.append(series_mul(UK[m] - shifted, inverse, bound))
        else:
            reduced.append(series_mul(xj, UK[m], bound + 1))
    reduced = [c.with_degree(bound) for c in reduced]
    extra = min((min((e[j] for e, _ in c.items()), default=None) for c in reduced if not c.is_zero()), default=0)
    if extra:
        if bound - extra < 0:
            raise InsufficientPrecisionError("Exceptional multiplicity exceeds the certified jet")
        reduced = [series_div_monomial(c, unit_exp(j, extra)) for c in reduced]
        new_exp[j] += extra
        ell = tuple(new_exp)
    lifted = Germ(tuple(reduced), ell)  # type: ignore[arg-type]
    if any(comp.val + degree(ell) < 2 for comp in reduced):  # type: ignore[arg-type]
        raise InvariantViolation(f"Lift in chart {chart.label} is not tangent to the identity")
    logger.debug(
        "Lifted through %s %s: divisor %s, reduced degree %d",
        chart.kind,
        chart.label,
        ell,
        lifted.reduced_degree,
    )
    return lifted


def lift_point_blowup(f: Germ, direction: Sequence, j: Optional[int] = None) -> Germ:
    """Lift at the point of the exceptional divisor given by a direction."""
    return lift(f, point_chart(direction, j))


def lift_line_blowup(f: Germ, axes: Sequence[int], j: int, fiber_point: Optional[Scalar] = None) -> Germ:
    """Lift through the blow-up of the coordinate line {x_a = x_b = 0} in the x_j chart."""
    return lift(f, line_chart(axes, j, fiber_point))


def curve_blowup(f: Germ, axes: Sequence[int], j: int) -> Germ:
    """Blow-up of a coordinate curve contained in the fixed divisor (e.g. {x=z=0} over a degenerate spike)."""
    return lift(f, line_chart(axes, j))


def lift_field(chi: VectorField, chart: Chart) -> VectorField:
    """
    Pull-back of a vector field through a chart

    The field must vanish on the center so the division by x_j is exact.
    """
    field_ = chi.unsaturated()
    subst = chart.substitution()
    j = chart.dividing
    pulled = [series_compose(c, subst) for c in field_.comps]
    comps = []
    for m in range(3):
        if m in chart.others:
            inner = TruncSeries.variable(m) + TruncSeries.constant(chart.translation[m])
            numerator = pulled[m] - series_mul(inner, pulled[j], pulled[j].N)
            comps.append(series_div_monomial(numerator, unit_exp(j)))
        else:
            comps.append(pulled[m])
    N = min(c.N for c in comps)
    return VectorField(tuple(c.with_degree(N) for c in comps))  # type: ignore[arg-type]


def chart_transition(src: Chart, dst: Chart, N: int) -> Map:
    """
    Coordinates of the point-blow-up chart dst as series in the coordinates of src

    Both charts must show the same point of the exceptional divisor.
    """
    if src.kind != "point" or dst.kind != "point":
        raise InvariantViolation("Chart transitions are implemented for point blow-ups")
    j, k = src.dividing, dst.dividing
    original = [c.truncate(N) for c in src.substitution()]
    if j == k:
        raise InvariantViolation("Source and target charts coincide")
    if src.translation[k].is_zero():
        raise InvariantViolation(f"Point is not visible in the {VARIABLES[k]}-chart")
    inner_k = TruncSeries.variable(k, N) + TruncSeries.constant(src.translation[k], N)
    inv_k = series_invert_unit(inner_k, N)
    comps = []
    for m in range(3):
        if m == k:
            comps.append(original[k])
        elif m == j:
            comps.append((inv_k - TruncSeries.constant(dst.translation[m], N)).truncate(N))
        else:
            ratio = series_mul(TruncSeries.variable(m, N) + TruncSeries.constant(src.translation[m], N), inv_k, N)
            comps.append(ratio - TruncSeries.constant(dst.translation[m], N))
    for c in comps:
        if not c.constant_term().is_zero():
            raise InvariantViolation(f"Charts {src.label} and {dst.label} show different points")
    return tuple(comps)  # type: ignore[return-value]


# ----------------------------------------------------------------------
# singular points along exceptional curves


@dataclass
class AxisRoots:
    """Zeros of F' restricted to a coordinate axis."""

    axis: int
    roots: List[Scalar]
    unresolved: List[str] = field(default_factory=list)
    whole_axis: bool = False


def axis_roots(f: Germ, axis: int) -> AxisRoots:
    """
    Common zeros of the restriction of F' to a coordinate axis

    The restrictions along a compact exceptional curve are polynomials of
    bounded degree; they are accepted when the known jet exceeds their degree.

    Raises:
        InsufficientPrecisionError: If a restriction reaches the certified degree
    """
    polys = []
    for comp in f.reduced:
        restricted = comp.restrict_to_axis(axis)
        if restricted.is_zero():
            continue
        if restricted.max_degree() >= comp.N:
            raise InsufficientPrecisionError(
                f"Restriction to the {VARIABLES[axis]}-axis is not certified: degree {restricted.max_degree()} "
                f"with jet known to {comp.N}"
            )
        coeffs = restricted.as_univariate(axis)
        polys.append(sum((c.to_sympy() * _T**k for k, c in enumerate(coeffs)), sympy.Integer(0)))
    if not polys:
        return AxisRoots(axis, [], whole_axis=True)
    common = polys[0]
    for p in polys[1:]:
        common = sympy.gcd(common, p, extension=sympy.I)
    roots: List[Scalar] = []
    unresolved: List[str] = []
    if sympy.Poly(common, _T).degree() > 0:
        _, factors = sympy.factor_list(common, _T, extension=sympy.I)
        for factor, _mult in factors:
            fp = sympy.Poly(factor, _T)
            if fp.degree() == 1:
                a, b = fp.all_coeffs()
                roots.append(Scalar.from_sympy(-b / a))
            elif fp.degree() > 1:
                unresolved.append(str(factor))
    roots.sort(key=lambda s: (not s.is_zero(), tuple(s.coeffs)))
    return AxisRoots(axis, roots, unresolved)


# ----------------------------------------------------------------------
# modification tree


@dataclass
class BlowupNode:
    """One site of a modification tree."""

    name: str
    germ: Germ
    chart: Optional[Chart] = None
    parent: Optional["BlowupNode"] = None
    components: Dict[int, str] = field(default_factory=dict)  # axis -> divisor component label
    verdict: Optional[dict] = None
    children: List["BlowupNode"] = field(default_factory=list)

    @property
    def path(self) -> List[str]:
        node, names = self, []
        while node is not None:
            names.append(node.name)
            node = node.parent
        return list(reversed(names))

    @property
    def depth(self) -> int:
        return len(self.path) - 1

    def leaves(self) -> List["BlowupNode"]:
        if not self.children:
            return [self]
        out: List[BlowupNode] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def find(self, name: str) -> Optional["BlowupNode"]:
        if self.name == name:
            return self
        for child in self.children:
            hit = child.find(name)
            if hit is not None:
                return hit
        return None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "path": self.path,
            "chart": None if self.chart is None else self.chart.to_dict(),
            "divisor": list(self.germ.divisor),
            "components": {VARIABLES[k]: label for k, label in sorted(self.components.items())},
            "certified_degree": self.germ.reduced_degree,
            "verdict": self.verdict,
            "children": [child.to_dict() for child in self.children],
        }


def blowup_child(
    parent: BlowupNode,
    chart: Chart,
    name: str,
    component: Optional[str] = None,
    germ: Optional[Germ] = None,
) -> BlowupNode:
    """
    Lift the parent's germ through a chart and attach the child node

    Divisor components: the new exceptional one on the dividing axis, old ones
    on free axes, and strict transforms on untranslated center axes.
    """
    lifted = lift(parent.germ, chart) if germ is None else germ
    components: Dict[int, str] = {}
    for m, label in parent.components.items():
        if m not in chart.center:
            components[m] = label
        elif m in chart.others and chart.translation[m].is_zero():
            components[m] = label
    components[chart.dividing] = component or f"E[{name}]"
    node = BlowupNode(name, lifted, chart, parent, components)
    parent.children.append(node)
    return node


def is_exceptional(node: BlowupNode, v: Sequence) -> bool:
    """True iff the direction v is tangent to a visible divisor component."""
    axes = set(node.components) | {k for k in range(3) if node.germ.divisor[k] > 0}
    return any(Scalar.coerce(v[k]).is_zero() for k in axes)


def tree_export(root: Optional[BlowupNode], fmt: str = "json") -> str:
    """
    JSON or DOT rendering of a modification tree

    An empty tree yields an empty JSON object or an empty digraph.
    """
    if fmt == "json":
        payload = {} if root is None else root.to_dict()
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    if fmt != "dot":
        raise InvariantViolation(f"Unknown tree format: {fmt}")
    lines = ["digraph modification {", "  node [shape=box];"]
    if root is not None:
        counter = [0]

        def visit(node: BlowupNode) -> str:
            ident = f"n{counter[0]}"
            counter[0] += 1
            verdict = (node.verdict or {}).get("class", "")
            chart = node.chart.label if node.chart is not None else "origin"
            label = "\\n".join(part for part in (node.name, chart, verdict) if part)
            lines.append(f'  {ident} [label="{label}"];')
            for child in node.children:
                child_id = visit(child)
                lines.append(f"  {ident} -> {child_id};")
            return ident

        visit(root)
    lines.append("}")
    return "\n".join(lines) + "\n"
