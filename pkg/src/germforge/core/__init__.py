"""
Core module for germforge
Provides exact series arithmetic, blow-ups, classification, invariant curves and the worked example
"""

from .algebra import (
    Scalar,
    TruncSeries,
    from_sympy,
    series_compose,
    series_mul,
    to_sympy,
)

from .validators import (
    DEFAULT_DEPTH,
    DEFAULT_ORDER,
    DEFAULT_SAMPLES,
    SUPPORTED_FORMATS,
    ClosureFalsification,
    GermParseError,
    InsufficientPrecisionError,
    InvariantViolation,
    UndecidableError,
    ValidationError,
)

from .germ import (
    Germ,
    conjugate,
    germ_from_displacement,
    homogeneous_data,
    iterate,
    make_germ,
)

from .infgen import (
    VectorField,
    exp_field,
    log_germ,
    saturated_generator,
    singularity_quality,
)

from .blowup import (
    BlowupNode,
    Chart,
    lift,
    line_chart,
    point_chart,
    tree_export,
)

from .directions import (
    bezout_check,
    characteristic_directions,
    dicriticality,
    direction_multiplicity,
    singular_directions,
)

from .classify import (
    DegenerateSpike,
    HalfCorner,
    SimpleCorner,
    SpinningCorner,
    classify_germ,
    classify_pattern,
    closure_children,
    normal_form,
)

from .curves import (
    FormalCurve,
    half_corner_curve,
    restricted_germ_jet,
    spike_curve,
    spinning_corner_curve_analysis,
    verify_invariance,
)

from .ramis_sibuya import (
    ParabolicReport,
    RSData,
    pair_report,
    parabolic_report,
    rs_reduce,
)

from .pipeline import (
    ExampleInstance,
    build_instance,
    example_instance,
    resolve_pi0,
    resolve_pi0_tilde,
    theorem_a_explore,
    theorem_b_report,
)

from .exporters import (
    germ_from_document,
    germ_to_document,
    render_tree,
)

__all__ = [
    # Algebra
    "Scalar",
    "TruncSeries",
    "from_sympy",
    "series_compose",
    "series_mul",
    "to_sympy",
    # Validators
    "DEFAULT_DEPTH",
    "DEFAULT_ORDER",
    "DEFAULT_SAMPLES",
    "SUPPORTED_FORMATS",
    "ClosureFalsification",
    "GermParseError",
    "InsufficientPrecisionError",
    "InvariantViolation",
    "UndecidableError",
    "ValidationError",
    # Germs
    "Germ",
    "conjugate",
    "germ_from_displacement",
    "homogeneous_data",
    "iterate",
    "make_germ",
    # Infinitesimal generators
    "VectorField",
    "exp_field",
    "log_germ",
    "saturated_generator",
    "singularity_quality",
    # Blow-ups
    "BlowupNode",
    "Chart",
    "lift",
    "line_chart",
    "point_chart",
    "tree_export",
    # Directions
    "bezout_check",
    "characteristic_directions",
    "dicriticality",
    "direction_multiplicity",
    "singular_directions",
    # Classification
    "DegenerateSpike",
    "HalfCorner",
    "SimpleCorner",
    "SpinningCorner",
    "classify_germ",
    "classify_pattern",
    "closure_children",
    "normal_form",
    # Curves
    "FormalCurve",
    "half_corner_curve",
    "restricted_germ_jet",
    "spike_curve",
    "spinning_corner_curve_analysis",
    "verify_invariance",
    # Ramis-Sibuya
    "ParabolicReport",
    "RSData",
    "pair_report",
    "parabolic_report",
    "rs_reduce",
    # Worked example
    "ExampleInstance",
    "build_instance",
    "example_instance",
    "resolve_pi0",
    "resolve_pi0_tilde",
    "theorem_a_explore",
    "theorem_b_report",
    # Exporters
    "germ_from_document",
    "germ_to_document",
    "render_tree",
]
