from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from germforge.core.algebra import Scalar  # noqa: E402
from germforge.core.blowup import lift, point_chart  # noqa: E402
from germforge.core.classify import (  # noqa: E402
    DEGENERATE_SPIKE,
    SIMPLE_CORNER,
    SPINNING_CORNER,
    reduced_linear_report,
)
from germforge.core.germ import make_germ  # noqa: E402
from germforge.core.infgen import CANONICAL, NON_LOG_CANONICAL  # noqa: E402
from germforge.core.pipeline import (  # noqa: E402
    PI0_SITES,
    PI0_TILDE_SITES,
    R040_ZERO,
    ExplorationPolicy,
    build_instance,
    example_instance,
    explore_germs,
    resolve_pi0,
    resolve_pi0_tilde,
    sigma_conjugate_instance,
    sigma_symmetry,
    singular_sites,
    spike_site,
    theorem_a_explore,
    theorem_b_report,
)
from germforge.core.validators import GermParseError, InvariantViolation, ValidationError  # noqa: E402


def _simple_corner():
    # F' = (x, -y, z) with divisor xy
    return make_germ([[((2, 1, 0), 1)], [((1, 2, 0), -1)], [((1, 1, 1), 1)]], 8, (1, 1, 0))


def _simple_half_corner():
    # F' = (x, z, 5z^2) with divisor z
    return make_germ([[((1, 0, 1), 1)], [((0, 0, 2), 1)], [((0, 0, 3), 5)]], 10, (0, 0, 1))


# R040 = 1 in the default instance
EIGENVALUES = {
    "p1": ["1", "-1", "0"],
    "p2": ["i", "-i", "0"],
    "p3": ["-1", "0", "0"],
    "p4": ["1", "0", "0"],
    "q1": ["0", "0", "1"],
    "q2": ["1/2", "-3/2", "-1"],
    "q3": ["2", "1", "-1"],
    "q4": ["3/8", "-1/4", "-1/8"],
    "q5": ["-1", "-1", "2"],
}

CLASSES = {
    "p1": DEGENERATE_SPIKE,
    "p2": DEGENERATE_SPIKE,
    "p3,1": SIMPLE_CORNER,
    "p3,2": SPINNING_CORNER,
    "p4,1": SIMPLE_CORNER,
    "p4,2": SPINNING_CORNER,
    "q1": SPINNING_CORNER,
    "q2": SIMPLE_CORNER,
    "q3": SIMPLE_CORNER,
    "q4": SIMPLE_CORNER,
    "q5": SIMPLE_CORNER,
}

# divisor and selected coefficients of F' per component (P040 = 2, Q040 = 3, R040 = 1)
STAGE_JETS = {
    "p5": (
        (0, 2, 0),
        (
            {(0, 0, 1): 1, (0, 0, 2): -1, (0, 1, 0): 2, (1, 1, 0): -3},
            {(3, 1, 0): 1, (1, 1, 2): -1, (0, 2, 0): 3},
            {(1, 0, 1): 1, (1, 0, 2): -1, (0, 1, 0): 1, (0, 1, 1): -3},
        ),
    ),
    "p5,1": (
        (2, 2, 0),
        (
            {(1, 0, 1): 1, (1, 1, 0): 2, (2, 1, 0): -3},
            {(0, 1, 1): -1, (0, 2, 0): -2, (1, 2, 0): 6},
            {(0, 1, 0): 1, (1, 0, 1): 1, (0, 0, 2): -1, (0, 1, 1): -2},
        ),
    ),
    "L(0)": (
        (4, 2, 0),
        (
            {(2, 0, 1): 1, (2, 1, 0): 2, (3, 1, 0): -3},
            {(1, 1, 1): -2, (1, 2, 0): -4, (2, 2, 0): 9},
            {(0, 1, 0): 1, (1, 0, 1): 1, (1, 0, 2): -2, (1, 1, 1): -4},
        ),
    ),
    "L(inf)": (
        (2, 2, 4),
        (
            {(1, 1, 0): -1, (1, 0, 1): 2, (2, 0, 1): -1, (1, 1, 1): 4},
            {(0, 2, 0): -1, (0, 1, 1): 0, (1, 1, 1): -1},
            {(0, 1, 1): 1, (0, 0, 2): -1, (1, 0, 2): 1, (0, 1, 2): -2},
        ),
    ),
    "q1": (
        (7, 2, 0),
        (
            {(1, 0, 1): 1, (2, 1, 0): 2},
            {(0, 1, 1): -3, (1, 2, 0): -6},
            {(0, 1, 0): 1, (0, 0, 1): 1, (0, 0, 2): -2, (1, 1, 1): -4},
        ),
    ),
    "q3": (
        (2, 2, 7),
        (
            {(1, 0, 0): 2, (2, 0, 0): -1, (1, 1, 0): -1},
            {(0, 1, 0): 1, (1, 1, 0): -2, (0, 2, 0): -2},
            {(0, 0, 1): -1, (1, 0, 1): 1, (0, 1, 1): 1},
        ),
    ),
    "q5": (
        (2, 7, 4),
        (
            {(1, 0, 0): -1, (1, 0, 1): 2, (2, 0, 1): -1},
            {(0, 1, 0): -1, (1, 1, 1): -1},
            {(0, 0, 1): 2, (0, 0, 2): -1, (1, 0, 2): 2},
        ),
    ),
}

QUARTICS = ("x**4", "z**4", "x*y**3", "x**2*z**2", "y**2*z**2", "x*y*z**2", "y*z**3", "x**3*z")


def _random_instance(seed: int):
    rng = random.Random(seed)
    while True:
        P, Q, R = (
            " + ".join(f"({rng.randint(-3, 3)})*{m}" for m in rng.sample(QUARTICS, 3)) for _ in range(3)
        )
        inst = build_instance(P, Q, f"{rng.randint(1, 3)}*y**4 + {R}")
        if inst.is_generic:
            return inst


@pytest.fixture(scope="module")
def instance():
    return example_instance()


@pytest.fixture(scope="module")
def resolution(instance):
    """Sites of the resolution, then the tree with p3 and p4 blown up."""
    root = resolve_pi0(instance)
    pi0 = [(node.name, node.verdict["class"]) for node in singular_sites(root, PI0_SITES)]
    return pi0, resolve_pi0_tilde(instance, root)


@pytest.fixture(scope="module")
def theorem_b(instance, resolution):
    return theorem_b_report(instance, resolution[1])


def test_default_instance_invariants(instance):
    assert instance.N == 12
    assert instance.R040 == 1
    assert instance.alpha_plus == -1
    assert instance.alpha_minus == 5
    assert instance.h_p1 == 2
    assert instance.h_p2 == Scalar.parse("3 + i")
    assert instance.is_generic
    assert instance.to_dict()["genericity_failures"] == []


def test_instance_needs_quartic_order():
    with pytest.raises(InvariantViolation, match="must have order >= 4"):
        build_instance("x**3", "0", "0", 6)


def test_instance_rejects_bad_polynomials():
    with pytest.raises(GermParseError):
        build_instance("2*y**4 +", "0", "0", 6)


def test_instance_order_is_validated():
    with pytest.raises(ValidationError):
        build_instance("2*y**4", "3*y**4", "y**4", 5)


def test_genericity_failure_stops_the_resolution():
    inst = build_instance("2*y**4", "3*y**4", "z**4", 6)
    assert R040_ZERO in inst.genericity_failures()
    assert not inst.is_generic
    with pytest.raises(InvariantViolation, match="Genericity failure before stage 2"):
        resolve_pi0(inst)


def test_resolution_sites(resolution):
    pi0, _ = resolution
    assert [name for name, _ in pi0] == list(PI0_SITES)
    classes = dict(pi0)
    assert classes["p1"] == "DegenerateSpike"
    assert classes["p2"] == "DegenerateSpike"
    assert classes["q2"] == "SimpleCorner"


@pytest.mark.parametrize("name", list(STAGE_JETS))
def test_resolution_stage_jets(resolution, name):
    _, root = resolution
    germ = root.find(name).germ
    divisor, rows = STAGE_JETS[name]
    assert germ.divisor == divisor
    for comp, row in zip(germ.reduced, rows):
        for exponents, value in row.items():
            assert comp.coefficient(exponents) == value, (name, exponents)


def test_resolution_eigenvalue_table(resolution):
    _, root = resolution
    for name, expected in EIGENVALUES.items():
        verdict = root.find(name).verdict
        assert sorted(verdict["eigenvalues"]) == sorted(expected), name
        assert verdict["quality"] == CANONICAL, name

    p5 = root.find("p5")
    assert p5.verdict["quality"] == NON_LOG_CANONICAL
    report = reduced_linear_report(p5.germ)
    assert report.rank == 2
    assert report.nilpotency_index == 3


def test_resolution_corner_parameters(resolution):
    _, root = resolution
    q2 = root.find("q2").verdict
    assert (q2["a"], q2["b"], q2["c"]) == (7, 2, 0)
    assert (q2["lambda"], q2["mu"]) == ("1/2", "-3/2")

    # the z-chart over L(inf) adds R040 to the z-row: mu = 2 R040
    q5 = root.find("q5")
    assert q5.germ.divisor == (2, 7, 4)
    assert (q5.verdict["a"], q5.verdict["b"], q5.verdict["c"]) == (2, 4, 7)
    assert (q5.verdict["lambda"], q5.verdict["mu"]) == ("-1", "2")


def test_resolution_class_table(resolution):
    _, root = resolution
    assert {node.name: node.verdict["class"] for node in singular_sites(root)} == CLASSES


def test_blowing_up_p3_and_p4(resolution):
    _, root = resolution
    sites = singular_sites(root)
    assert [node.name for node in sites] == list(PI0_TILDE_SITES)
    classes = {node.name: node.verdict["class"] for node in sites}
    assert classes["p3,1"] == "SimpleCorner"
    assert classes["p3,2"] == "SpinningCorner"
    assert classes["p4,2"] == "SpinningCorner"
    assert root.find("p3").children
    assert root.find("p4").children


def test_invariant_curves_and_parabolic_manifolds(theorem_b):
    report = theorem_b
    assert report.ok
    assert report.counts == (3, 3, 5, 5)
    assert report.status["q1_transverse"] == "none"
    assert report.status["q1_surface"] == "undecided"
    assert "p5" in report.status

    p32 = report.find("p3,2")
    assert p32.r == 5
    assert p32.details["y0"] == "-8/11"
    assert p32.details["gamma"] == "-4/11"
    assert report.find("p1").invariant_through is not None


def test_parabolic_dimension_tables(theorem_b):
    report = theorem_b
    # h_p1^2 = 4 is not in iR and h_p2^2 = 8 + 6i is not in R
    assert report.find("p1").dimensions == [2, 2, 2]
    assert report.find("p2").dimensions == [2, 2, 2]
    # d2 = 0 at a half corner and the x-signs sum to zero over the roots
    for name in ("p3,2", "p4,2"):
        dims = report.find(name).dimensions
        assert len(dims) == 5
        assert set(dims) == {1, 2}


def test_spike_borderline_drops_one_dimension():
    # h_p1 = 1 + i, h_p1^2 = 2i
    inst = build_instance("2*y**4", "3*y**4", "y**4 + (1 + i)*z**4")
    assert inst.h_p1 == Scalar.parse("1 + i")
    p1 = lift(inst.germ, point_chart((0, 0, 1)))
    site = spike_site("p1", p1)
    assert site.r == 3
    assert sorted(site.dimensions) == [1, 2, 2]


def test_sigma_symmetry(instance):
    rows = sigma_symmetry(instance)
    assert [row["site"] for row in rows] == ["p4", "p4,1", "p4,2"]
    assert all(row["agrees"] for row in rows)


def test_exploration_certificate():
    policy = ExplorationPolicy(depth=1, samples=1, core_blowups=False)
    report = explore_germs([("sc", _simple_corner()), ("hc", _simple_half_corner())], policy)
    assert len(report.nodes) == 8
    assert report.complete
    assert report.counterexamples == 0
    assert report.certificate == {
        "SimpleCorner": {"SimpleCorner"},
        "HalfCorner": {"SimpleCorner", "SpinningCorner"},
    }
    assert [node.status for node in report.nodes[:1]] == ["expanded"]
    payload = report.to_dict()
    assert payload["visited"] == 8
    assert payload["certificate"]["HalfCorner"] == ["SimpleCorner", "SpinningCorner"]


@pytest.mark.parametrize("name", ["sc", "hc"])
def test_exploration_to_depth_three_with_cores(name):
    germs = {"sc": _simple_corner, "hc": _simple_half_corner}
    report = explore_germs([(name, germs[name]())], ExplorationPolicy(samples=1))
    assert report.depth == 3
    assert report.counterexamples == 0
    families = {"SimpleCorner", "DegenerateSpike", "SpinningCorner", "HalfCorner"}
    assert set(report.certificate) <= families
    assert all(children <= families | {"Regular"} for children in report.certificate.values())
    assert max(len(node.trace) for node in report.nodes) <= 4
    if name == "hc":
        assert any("core" in node.trace[-1] for node in report.nodes)


def test_exploration_deduplicates_repeated_germs():
    policy = ExplorationPolicy(depth=1, samples=1, core_blowups=False)
    report = explore_germs([("a", _simple_corner()), ("b", _simple_corner())], policy)
    assert [node.status for node in report.nodes if len(node.trace) == 1] == ["expanded", "repeat"]


def test_exploration_refuses_unclassified_points():
    # x + yz(y - z), y + x(x^2 - z^2), z + xz(y - z)
    cubic = make_germ(
        [
            [((0, 2, 1), 1), ((0, 1, 2), -1)],
            [((3, 0, 0), 1), ((1, 0, 2), -1)],
            [((1, 1, 1), 1), ((1, 0, 2), -1)],
        ],
        6,
    )
    report = explore_germs([("cubic", cubic)], ExplorationPolicy(depth=1, samples=1))
    assert report.refused == ["cubic"]
    assert report.nodes[0].status == "refused"


def test_exploration_stops_at_non_degenerate_directions():
    f = make_germ([[((2, 0, 0), 1)], [((1, 1, 0), 1)], []], 6)
    with pytest.raises(InvariantViolation, match="Non-degenerate"):
        explore_germs([("bad", f)], ExplorationPolicy(depth=1, samples=1))


@pytest.mark.parametrize("field", ["depth", "samples"])
def test_exploration_policy_validation(field):
    with pytest.raises(ValidationError):
        ExplorationPolicy(**{field: 0})


def test_sigma_conjugate_instance(instance):
    conj = sigma_conjugate_instance(instance)
    assert conj.R040 == Scalar.parse("-i")
    assert conj.h_p1 == Scalar.parse("-2*i")
    assert conj.P.coefficient((0, 4, 0)) == Scalar.parse("2*i")


def test_bounded_exploration_above_the_resolution(instance, resolution):
    _, root = resolution
    policy = ExplorationPolicy(depth=1, samples=1, core_blowups=False)
    report = theorem_a_explore(instance, policy, root)
    assert report.counterexamples == 0
    assert len([node for node in report.nodes if len(node.trace) == 1]) == len(PI0_TILDE_SITES)
    families = {"SimpleCorner", "DegenerateSpike", "SpinningCorner", "HalfCorner"}
    assert set(report.certificate) <= families
    assert all(children <= families | {"Regular"} for children in report.certificate.values())


@pytest.mark.parametrize("seed", range(10))
def test_bounded_exploration_does_not_depend_on_the_instance(seed):
    inst = _random_instance(seed)
    root = resolve_pi0_tilde(inst)
    assert {node.name: node.verdict["class"] for node in singular_sites(root)} == CLASSES
    report = theorem_a_explore(inst, ExplorationPolicy(depth=1, samples=1, core_blowups=False), root)
    assert report.counterexamples == 0
    assert len([node for node in report.nodes if len(node.trace) == 1]) == len(PI0_TILDE_SITES)
