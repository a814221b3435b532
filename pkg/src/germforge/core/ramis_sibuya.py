"""
Ramis-Sibuya reduction of (germ, invariant curve) pairs and parabolic manifolds.

Once the curve is straightened to C = {x = y = 0}, the reduction only needs
the restriction h(z) = (z o f)(0, 0, z) - z and the 2x2 linear part M(z) of
(x o f, y o f) in (x, y) along C.  A z-chart blow-up along C replaces M by
M / u with u = 1 + h(z)/z and leaves h unchanged, so the n-fold reduction
is read off these two univariate objects.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import mpmath

from .algebra import (
    I_UNIT,
    ONE,
    ZERO,
    Scalar,
    TruncSeries,
    interval_context,
    precision_ladder,
    scalar_sign_of_real,
    series_compose,
    uni_compose,
    uni_inverse,
    uni_log_unit,
    uni_mul,
    uni_order,
    uni_reverse,
)
from .classify import DegenerateSpike, HalfCorner, SingularityClass
from .curves import FormalCurve
from .germ import Germ, conjugate
from .validators import (
    InsufficientPrecisionError,
    InvariantViolation,
    UndecidableError,
    resolve_precision_cap,
)

logger = logging.getLogger(__name__)

Uni = List[Scalar]
Matrix2 = List[List[Uni]]

PARABOLIC_DOMAIN_NOTE = (
    "degenerate spike: counts follow the node/saddle rule; "
    "the invariant sets may be parabolic domains rather than manifolds"
)


def _pad(coeffs: Sequence[Scalar], n: int) -> Uni:
    out = list(coeffs[: n + 1])
    return out + [ZERO] * (n + 1 - len(out))


def _uni_add(a: Uni, b: Uni) -> Uni:
    return [p + q for p, q in zip(a, b)]


# ----------------------------------------------------------------------
# straightening


def curve_multiplicity(f: Germ, curve: FormalCurve) -> int:
    """
    ord_t of f|_C - id along the curve, i.e. r + 1

    Raises:
        InvariantViolation: If f|_C = id to the certified degree
    """
    image = series_compose(f.displacement[curve.axis], curve.as_map(), f.N)
    order = uni_order(image.as_univariate(curve.axis))
    if order is None:
        raise InvariantViolation(f"Curve pointwise fixed: f|_C = id through t^{image.N}")
    return order


def _normalize_restriction(h: Uni, r: int, n: int) -> Tuple[Uni, Uni]:
    """
    Conjugate z + h(z) to z + a z^(r+1) + b z^(2r+1) + O(z^(n+1))

    Returns:
        (normalized map, psi) with old z = psi(new z)
    """
    phi = _uni_add([ZERO, ONE] + [ZERO] * (n - 1), _pad(h, n))
    a = phi[r + 1]
    psi_total = [ZERO, ONE] + [ZERO] * (n - 1)
    for k in range(r + 2, min(2 * r, n) + 1):
        if phi[k].is_zero():
            continue
        m = k - r
        s = -phi[k] / (a * (r + 1 - m))
        psi = [ZERO, ONE] + [ZERO] * (n - 1)
        psi[m] = s
        phi = uni_compose(uni_reverse(psi, n), uni_compose(phi, psi, n), n)
        psi_total = uni_compose(psi_total, psi, n)
    return phi, psi_total


def straighten_pair(f: Germ, curve: FormalCurve) -> Germ:
    """
    Conjugate f so that the curve becomes {x = y = 0} and f|_C is normalized

    The graph (X(z), Y(z), z) is removed by (x + X(z), y + Y(z), z); then
    z -> psi(z) brings f|_C to z + a z^(r+1) + b z^(2r+1) + ...

    Raises:
        InvariantViolation: If the curve is not a graph over z or f|_C = id
    """
    if curve.axis != 2:
        raise InvariantViolation("Straightening needs a curve parametrized by z")
    r = curve_multiplicity(f, curve) - 1
    g = f
    if any(not c.is_zero() for k in curve.rows for c in curve.components[k]):
        graph = [TruncSeries.univariate(_pad(curve.components[k], curve.depth), 2) for k in range(2)]
        Z = TruncSeries.variable(2)
        phi = (TruncSeries.variable(0) + graph[0], TruncSeries.variable(1) + graph[1], Z)
        inverse = (TruncSeries.variable(0) - graph[0], TruncSeries.variable(1) - graph[1], Z)
        g = conjugate(f, phi, inverse=inverse)
    h = g.displacement[2].restrict_to_axis(2).as_univariate(2)
    n = min(g.N, 2 * r + 1)
    normalized, psi = _normalize_restriction(h, r, n)
    if psi != [ZERO, ONE] + [ZERO] * (n - 1):
        X, Y = TruncSeries.variable(0), TruncSeries.variable(1)
        phi = (X, Y, TruncSeries.univariate(psi, 2))
        inverse = (X, Y, TruncSeries.univariate(uni_reverse(psi, g.N), 2))
        g = conjugate(g, phi, inverse=inverse)
    logger.info("Straightened pair: r = %d, f|_C = z + (%s) z^%d + ...", r, normalized[r + 1], r + 1)
    return g


# ----------------------------------------------------------------------
# reduction data


@dataclass
class RSData:
    """
    Ramis-Sibuya invariants of a reduced pair

    d1, d2 and a, b are in the unscaled coordinate; c_matrix is in the scaled
    coordinate where f|_C = z - z^(r+1) + beta z^(2r+1) + ...
    """

    kind: str
    r: int
    c: int
    e: int
    blowups: int
    a: Scalar  # z^(r+1) coefficient of f|_C
    b: Scalar  # z^(2r+1) coefficient of f|_C
    d1: List[Scalar]  # coefficients of z^0..z^(r-1)
    d2: List[Scalar]
    c_matrix: Tuple[Scalar, Scalar, Scalar, Scalar]
    lam: Scalar = ZERO  # z^c coefficients of the diagonal of M
    mu: Scalar = ZERO

    @property
    def beta(self) -> Scalar:
        return self.b / (self.a * self.a)

    @property
    def proportional(self) -> bool:
        """lam^-1 d1 == mu^-1 d2 coefficientwise."""
        if self.lam.is_zero() or self.mu.is_zero():
            return False
        return all(p / self.lam == q / self.mu for p, q in zip(self.d1, self.d2))

    def to_dict(self) -> dict:
        return {
            "class": self.kind,
            "r": self.r,
            "c": self.c,
            "e": self.e,
            "blowups": self.blowups,
            "a": str(self.a),
            "b": str(self.b),
            "beta": str(self.beta),
            "d1": [str(v) for v in self.d1],
            "d2": [str(v) for v in self.d2],
            "c_matrix": [str(v) for v in self.c_matrix],
            "proportional": self.proportional,
        }


def along_curve_data(f: Germ, r: int) -> Tuple[Uni, Matrix2]:
    """
    h(z) through z^(2r+1) and M(z) through z^r along {x = y = 0}

    Raises:
        InsufficientPrecisionError: If f is not known that far
    """
    if f.N < 2 * r + 1:
        raise InsufficientPrecisionError(
            f"Ramis-Sibuya data needs f through degree {2 * r + 1}, certified {f.N}; raise N"
        )
    disp = f.displacement
    h = _pad(disp[2].restrict_to_axis(2).as_univariate(2), 2 * r + 1)
    M: Matrix2 = [[[], []], [[], []]]
    for i in range(2):
        for j in range(2):
            partial = disp[i].derivative(j).restrict_to_axis(2)
            entry = _pad(partial.as_univariate(2), r)
            if i == j:
                entry[0] = entry[0] + ONE
            M[i][j] = entry
    for i in range(2):
        row = disp[i].restrict_to_axis(2).as_univariate(2)
        if any(not c.is_zero() for c in row[: r + 2]):
            raise InvariantViolation(f"{{x = y = 0}} is not invariant: row {i} moves the curve")
    return h, M


def _mat_mul(A: Matrix2, B: Matrix2, n: int) -> Matrix2:
    return [
        [_uni_add(uni_mul(A[i][0], B[0][j], n), uni_mul(A[i][1], B[1][j], n)) for j in range(2)]
        for i in range(2)
    ]


def diagonalize(M: Matrix2, c: int, n: int) -> Matrix2:
    """
    Conjugate M(z) = I + z^c (diag(lam, mu) + O(z)) by T(z) = I + O(z) to a diagonal matrix mod z^(n+1)

    Raises:
        InvariantViolation: If the z^c block is not diagonal with distinct entries
    """
    lam, mu = M[0][0][c], M[1][1][c]
    if not (M[0][1][c].is_zero() and M[1][0][c].is_zero()) or (lam - mu).is_zero():
        raise InvariantViolation("Linear part along the curve needs a diagonal leading block with lam != mu")
    for k in range(c + 1, n + 1):
        o01, o10 = M[0][1][k], M[1][0][k]
        if o01.is_zero() and o10.is_zero():
            continue
        p = k - c
        s = -o01 / (lam - mu)
        t = o10 / (lam - mu)
        T = [[[ONE] + [ZERO] * n, [ZERO] * (n + 1)], [[ZERO] * (n + 1), [ONE] + [ZERO] * n]]
        T[0][1][p] = s
        T[1][0][p] = t
        det = [ONE] + [ZERO] * n
        if 2 * p <= n:
            det[2 * p] = -s * t
        inv_det = uni_inverse(det, n)
        adj = [[T[1][1], [-v for v in T[0][1]]], [[-v for v in T[1][0]], T[0][0]]]
        T_inv = [[uni_mul(adj[i][j], inv_det, n) for j in range(2)] for i in range(2)]
        M = _mat_mul(_mat_mul(T_inv, M, n), T, n)
    return M


def _blowup_threshold(cls: SingularityClass, c: int, e: int) -> int:
    return c + 2 * e + (1 if isinstance(cls, HalfCorner) else 0)


def rs_reduce(f: Germ, cls: SingularityClass, blowups: Optional[int] = None) -> RSData:
    """
    Ramis-Sibuya invariants of a straightened pair (f, {x = y = 0})

    Args:
        f: Straightened germ (see straighten_pair)
        cls: Class of f before straightening (degenerate spike or non-simple half corner)
        blowups: Number n of z-chart blow-ups along C; default one above the threshold

    Returns:
        RSData

    Raises:
        InvariantViolation: On a class outside the two reducible ones, or n below the threshold
        InsufficientPrecisionError: If f is not known through degree 2r + 1
    """
    if isinstance(cls, DegenerateSpike):
        c = cls.c
    elif isinstance(cls, HalfCorner) and not cls.simple:
        c = cls.c
    else:
        raise InvariantViolation(f"Ramis-Sibuya reduction needs a degenerate spike or non-simple half corner, got {cls.describe()}")
    h_raw = f.displacement[2].restrict_to_axis(2).as_univariate(2)
    order = uni_order(h_raw)
    if order is None:
        raise InvariantViolation(f"Curve pointwise fixed: f|_C = id through z^{f.N}")
    r = order - 1
    e = r - c - (1 if isinstance(cls, HalfCorner) else 0)
    threshold = _blowup_threshold(cls, c, e)
    if blowups is None:
        blowups = threshold + 2
    elif blowups <= threshold:
        raise InvariantViolation(f"{blowups} blow-ups do not reach the normal form; raise n above {threshold}")
    h, M = along_curve_data(f, r)
    phi, psi = _normalize_restriction(h, r, 2 * r + 1)
    for k in range(r + 2, 2 * r + 1):
        if not phi[k].is_zero():
            raise InvariantViolation(f"Normalization of f|_C left a z^{k} term")
    a, b = phi[r + 1], phi[2 * r + 1]
    M = [[uni_compose(M[i][j], psi, r) for j in range(2)] for i in range(2)]
    M = diagonalize(M, c, r)
    logs = [uni_log_unit(M[j][j], r) for j in range(2)]
    d1, d2 = (logs[j][:r] for j in range(2))
    scaled = [-(logs[j][r] - a * blowups) / a for j in range(2)]
    rs = RSData(
        kind=cls.kind,
        r=r,
        c=c,
        e=e,
        blowups=blowups,
        a=a,
        b=b,
        d1=list(d1),
        d2=list(d2),
        c_matrix=(scaled[0], ZERO, ZERO, scaled[1]),
        lam=M[0][0][c],
        mu=M[1][1][c],
    )
    logger.info("Ramis-Sibuya data: %s with r = %d, e = %d after %d blow-ups", cls.kind, r, e, blowups)
    return rs


# ----------------------------------------------------------------------
# parabolic manifolds


@dataclass
class AttractingDirection:
    """One root omega of omega^r = -1/a with its node/saddle analysis."""

    index: int
    omega: complex
    signs_x: List[int]
    signs_y: List[int]

    @staticmethod
    def _lex(signs: Sequence[int]) -> int:
        return next((s for s in signs if s), 0)

    @property
    def node_x(self) -> bool:
        return self._lex(self.signs_x) < 0

    @property
    def node_y(self) -> bool:
        return self._lex(self.signs_y) < 0

    @property
    def s(self) -> int:
        return int(self.node_x) + int(self.node_y)

    @property
    def dimension(self) -> int:
        return self.s + 1

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "omega": f"{self.omega.real:.6g}{self.omega.imag:+.6g}i",
            "signs_x": list(self.signs_x),
            "signs_y": list(self.signs_y),
            "node_x": self.node_x,
            "node_y": self.node_y,
            "s": self.s,
            "dimension": self.dimension,
        }


@dataclass
class ParabolicReport:
    kind: str
    r: int
    directions: List[AttractingDirection] = field(default_factory=list)
    note: str = ""

    @property
    def count(self) -> int:
        return len(self.directions)

    @property
    def dimensions(self) -> List[int]:
        return [d.dimension for d in self.directions]

    def to_dict(self) -> dict:
        return {
            "class": self.kind,
            "r": self.r,
            "count": self.count,
            "dimensions": self.dimensions,
            "directions": [d.to_dict() for d in self.directions],
            "note": self.note,
        }


def _to_mpc(x: Scalar) -> mpmath.mpc:
    if x.is_gaussian():
        re_part, im_part = x.gaussian_parts()
        return mpmath.mpc(
            mpmath.mpf(re_part.numerator) / re_part.denominator,
            mpmath.mpf(im_part.numerator) / im_part.denominator,
        )
    re_iv, im_iv = x.to_interval()
    return mpmath.mpc(re_iv.mid, im_iv.mid)


def _rational_sign(d: Scalar, k: int, r: int, m: int, negative: bool) -> int:
    """Sign of Re(d omega_m^k) for omega_m = rho zeta_r^m (or rho zeta_2r^(2m+1)), rho > 0."""
    root = Scalar.root_of_unity(2 * r, k * (2 * m + 1)) if negative else Scalar.root_of_unity(r, k * m)
    return scalar_sign_of_real((d * root).real_part())


def _numeric_sign(d: Scalar, w0: Scalar, k: int, r: int, m: int, cap: int) -> int:
    """
    Sign of Re(d omega_m^k), omega_m = |w0|^(1/r) exp(i (arg w0 + 2 pi m) / r)

    Evaluated as Re(d) cos(k theta) - Im(d) sin(k theta) in interval
    arithmetic.  Re(d omega^k) = 0 forces V = (d omega^k)^r = d^r w0^k into
    i^r R; there a nonzero real part is at least |d omega^k| sin(pi / r), so an
    enclosure below that bound certifies 0.
    """
    V = d**r * w0**k
    zero_possible = (V / I_UNIT**r).is_real()
    negative_real = w0.is_real() and scalar_sign_of_real(w0, cap) < 0
    for prec in precision_ladder(cap):
        ctx = interval_context(prec)
        d_re, d_im = d.to_interval(ctx)
        if w0.is_real():
            phase = ctx.pi if negative_real else ctx.mpf(0)
        else:
            w_re, w_im = w0.to_interval(ctx)
            phase = ctx.atan2(w_im, w_re)
        angle = k * (phase + 2 * m * ctx.pi) / r
        value = d_re * ctx.cos(angle) - d_im * ctx.sin(angle)
        if (value > 0) is True:
            return 1
        if (value < 0) is True:
            return -1
        if zero_possible:
            bound = ctx.sqrt(d_re**2 + d_im**2) * ctx.sin(ctx.pi / r)
            if (abs(value) < bound) is True:
                return 0
        logger.debug("Sign of Re(d omega^%d) undecided at %d bits", k, prec)
    raise UndecidableError(f"Sign of Re({d} * omega^{k}) undecided at {cap} bits")


def _direction_signs(d: Sequence[Scalar], w0: Scalar, r: int, m: int, cap: int) -> List[int]:
    rational = w0.is_rational()
    signs = []
    for k in range(1, r):
        coefficient = d[k] if k < len(d) else ZERO
        if coefficient.is_zero():
            signs.append(0)
        elif rational:
            signs.append(_rational_sign(coefficient, k, r, m, w0.rational() < 0))
        else:
            signs.append(_numeric_sign(coefficient, w0, k, r, m, cap))
    return signs


def _omega(w0: Scalar, r: int, m: int) -> complex:
    return complex(mpmath.root(_to_mpc(w0), r, m))


def parabolic_report(rs: RSData, cap: Optional[int] = None) -> ParabolicReport:
    """
    Node/saddle analysis of the r attracting directions and the manifold dimensions

    Returns:
        ParabolicReport with one entry per root omega of omega^r = -1/a

    Raises:
        InvariantViolation: If a spike with proportional d1, d2 breaks the sign dichotomy
        UndecidableError: If a sign stays undecided at the precision cap
    """
    cap = cap or resolve_precision_cap()
    w0 = -rs.a.inverse()
    report = ParabolicReport(rs.kind, rs.r)
    for m in range(rs.r):
        omega = _omega(w0, rs.r, m)
        entry = AttractingDirection(
            index=m,
            omega=omega,
            signs_x=_direction_signs(rs.d1, w0, rs.r, m, cap),
            signs_y=_direction_signs(rs.d2, w0, rs.r, m, cap),
        )
        report.directions.append(entry)
    if rs.kind == DegenerateSpike.kind:
        report.note = PARABOLIC_DOMAIN_NOTE
        ratio = rs.mu / rs.lam if not rs.lam.is_zero() else ZERO
        if rs.proportional and ratio.is_rational() and ratio.rational() < 0:
            for entry in report.directions:
                if entry.signs_x != [-s for s in entry.signs_y]:
                    raise InvariantViolation(f"Sign dichotomy fails at direction {entry.index}")
    logger.info("Parabolic manifolds: %d with dimensions %s", report.count, report.dimensions)
    return report


def pair_report(f: Germ, cls: SingularityClass, curve: FormalCurve) -> Tuple[RSData, ParabolicReport]:
    """Straighten, reduce and analyse a (germ, curve) pair in one go."""
    straight = straighten_pair(f, curve)
    rs = rs_reduce(straight, cls)
    return rs, parabolic_report(rs)


__all__ = [
    "AttractingDirection",
    "ParabolicReport",
    "RSData",
    "along_curve_data",
    "curve_multiplicity",
    "diagonalize",
    "pair_report",
    "parabolic_report",
    "rs_reduce",
    "straighten_pair",
]

