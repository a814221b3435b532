"""
Command line for germforge.

One subcommand per library entry point; reports go to stdout or --out, logs to stderr.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError as PydanticValidationError

from .core.classify import DegenerateSpike, HalfCorner, SpinningCorner, classify_germ, closure_children
from .core.curves import half_corner_curve, spike_curve, spinning_corner_curve_analysis, verify_invariance
from .core.directions import bezout_check, characteristic_directions, direction_multiplicity, singular_directions
from .core.exporters import (
    direction_rows,
    dump_json,
    exploration_rows,
    germ_from_document,
    instance_from_document,
    is_instance_document,
    load_json,
    parabolic_rows,
    render_tree,
    table_text,
    theorem_b_rows,
)
from .core.germ import Germ
from .core.models import CommandConfig
from .core.pipeline import (
    PI0_SITES,
    ExampleInstance,
    ExplorationPolicy,
    example_instance,
    explore_germs,
    half_corner_site,
    resolve_pi0,
    resolve_pi0_tilde,
    site_verdict,
    spike_site,
    spinning_corner_site,
    theorem_a_explore,
    theorem_b_report,
)
from .core.validators import (
    DEFAULT_DEPTH,
    DEFAULT_ORDER,
    DEFAULT_SAMPLES,
    EXIT_FAILURE,
    EXIT_INVARIANT,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_UNDECIDABLE,
    SUPPORTED_FORMATS,
    InvariantViolation,
    UndecidableError,
    ValidationError,
)

logger = logging.getLogger(__name__)

Result = Tuple[str, int]


# ----------------------------------------------------------------------
# inputs


def _load_instance(config: CommandConfig) -> ExampleInstance:
    if config.input is None:
        return example_instance(config.order)
    payload = load_json(config.input)
    payload.setdefault("N", config.order)
    return instance_from_document(payload)


def _load_germ(config: CommandConfig) -> Germ:
    if config.input is None:
        return example_instance(config.order).germ
    payload = load_json(config.input)
    if is_instance_document(payload):
        payload.setdefault("N", config.order)
        return instance_from_document(payload).germ
    return germ_from_document(payload)


def _policy(config: CommandConfig) -> ExplorationPolicy:
    return ExplorationPolicy(depth=config.depth, samples=config.samples)


# ----------------------------------------------------------------------
# subcommands


def cmd_directions(config: CommandConfig) -> Result:
    f = _load_germ(config)
    singular = singular_directions(f)
    characteristic = characteristic_directions(f)
    multiplicities = {str(d): str(direction_multiplicity(f, d.coords)) for d in characteristic.resolved}
    bezout = bezout_check(f)
    if config.format == "text":
        text = table_text(direction_rows(characteristic, multiplicities))
        text += f"Bezout: {bezout.total} of {bezout.expected} ({'ok' if bezout.ok else 'incomplete'})\n"
        return text, EXIT_OK
    payload = {
        "singular": singular.to_dict(),
        "characteristic": characteristic.to_dict(),
        "multiplicities": multiplicities,
        "bezout": {key: str(value) for key, value in bezout.to_dict().items()},
    }
    return dump_json(payload), EXIT_OK


def cmd_classify(config: CommandConfig) -> Result:
    f = _load_germ(config)
    verdict = site_verdict(f)
    children: List[dict] = []
    if classify_germ(f).is_family:
        _, found = closure_children(f, samples=config.samples)
        children = [child.to_dict() for child in found]
    if config.format == "text":
        rows = [
            {"site": c["site"], "expected": c["expected"], "observed": c["observed"]["class"], "agrees": c["agrees"]}
            for c in children
        ]
        return f"class: {verdict['class']}\n" + table_text(rows), EXIT_OK
    return dump_json({"verdict": verdict, "closure": children}), EXIT_OK


def cmd_resolve(config: CommandConfig) -> Result:
    inst = _load_instance(config)
    if config.tilde:
        return render_tree(resolve_pi0_tilde(inst), config.format), EXIT_OK
    return render_tree(resolve_pi0(inst), config.format, PI0_SITES), EXIT_OK


def _exploration_result(report, fmt: str) -> Result:
    code = EXIT_OK if report.complete else EXIT_UNDECIDABLE
    if not report.complete:
        logger.error("Exploration incomplete on %d branches; raise --order", len(report.exhausted))
    if fmt == "text":
        lines = [f"{kind} -> {', '.join(sorted(kinds))}" for kind, kinds in sorted(report.certificate.items())]
        return table_text(exploration_rows(report)) + "\n".join(lines) + "\n", code
    return dump_json(report.to_dict()), code


def cmd_explore(config: CommandConfig) -> Result:
    f = _load_germ(config)
    return _exploration_result(explore_germs([("input", f)], _policy(config)), config.format)


def cmd_curve(config: CommandConfig) -> Result:
    f = _load_germ(config)
    cls = classify_germ(f)
    if isinstance(cls, SpinningCorner):
        analysis = spinning_corner_curve_analysis(f, config.curve_depth, config.samples)
        payload = {"class": cls.kind, "analysis": analysis.to_dict()}
    elif isinstance(cls, (DegenerateSpike, HalfCorner)):
        build = spike_curve if isinstance(cls, DegenerateSpike) else half_corner_curve
        curve = build(f, config.curve_depth)
        payload = {"class": cls.kind, "curve": curve.to_dict(), "invariant_through": verify_invariance(f, curve)}
    else:
        raise InvariantViolation(f"No transverse curve construction for {cls.describe()}")
    if config.format == "text":
        curves = [payload["curve"]] if "curve" in payload else payload["analysis"]["curves"]
        rows = [{"curve": i, "x": " ".join(c["x"]), "y": " ".join(c["y"]), "z": " ".join(c["z"])} for i, c in enumerate(curves)]
        return f"class: {cls.kind}\n" + table_text(rows), EXIT_OK
    return dump_json(payload), EXIT_OK


def cmd_rs(config: CommandConfig) -> Result:
    f = _load_germ(config)
    cls = classify_germ(f)
    builders = {DegenerateSpike: spike_site, HalfCorner: half_corner_site, SpinningCorner: spinning_corner_site}
    build = builders.get(type(cls))
    if build is None:
        raise InvariantViolation(f"Ramis-Sibuya reduction needs a spike, half corner or spinning corner, got {cls.describe()}")
    site = build("input", f, config.curve_depth)
    if site.status != "ok":
        raise InvariantViolation(f"No transverse curve to reduce along: {site.status}")
    if config.format == "text":
        rs_data = site.details["ramis_sibuya"]
        header = f"r = {rs_data['r']}, beta = {rs_data['beta']}, manifolds = {site.parabolic.count}\n"
        return header + table_text(parabolic_rows(site.parabolic, "input")), EXIT_OK
    return dump_json(site.to_dict()), EXIT_OK


def cmd_theorem_a(config: CommandConfig) -> Result:
    inst = _load_instance(config)
    return _exploration_result(theorem_a_explore(inst, _policy(config)), config.format)


def cmd_theorem_b(config: CommandConfig) -> Result:
    inst = _load_instance(config)
    report = theorem_b_report(inst, curve_depth=config.curve_depth)
    code = EXIT_OK if not any(s.status.startswith("error") for s in report.sites) else EXIT_INVARIANT
    if config.format == "text":
        text = table_text(theorem_b_rows(report))
        for key, value in sorted(report.status.items()):
            text += f"{key}: {value}\n"
        return text, code
    return dump_json(report.to_dict()), code


COMMANDS: Dict[str, Callable[[CommandConfig], Result]] = {
    "directions": cmd_directions,
    "classify": cmd_classify,
    "resolve": cmd_resolve,
    "explore": cmd_explore,
    "curve": cmd_curve,
    "rs": cmd_rs,
    "theorem_a": cmd_theorem_a,
    "theorem_b": cmd_theorem_b,
}

HELP = {
    "directions": "Singular and characteristic directions with multiplicities",
    "classify": "Family verdict and closure-table children",
    "resolve": "Resolution tree of an example instance",
    "explore": "Bounded closure exploration from a germ",
    "curve": "Transverse formal invariant curves",
    "rs": "Ramis-Sibuya reduction and parabolic manifolds",
    "theorem_a": "Bounded Theorem A check above the resolution",
    "theorem_b": "Invariant curves and parabolic manifolds of an example instance",
}


# ----------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="Germ or instance JSON (default: the built-in example)")
    common.add_argument("--order", type=int, default=DEFAULT_ORDER, help=f"Truncation order N (default: {DEFAULT_ORDER})")
    common.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help=f"Exploration depth D (default: {DEFAULT_DEPTH})")
    common.add_argument(
        "--samples", type=int, default=DEFAULT_SAMPLES, help=f"Samples per P^1-family K (default: {DEFAULT_SAMPLES})"
    )
    common.add_argument("--curve-depth", type=int, help="Curve jet depth M (default: N' - 2, at most 8)")
    common.add_argument("--format", default="json", choices=sorted(SUPPORTED_FORMATS), help="Output format")
    common.add_argument("--out", type=Path, help="Write the report here instead of stdout")
    common.add_argument("--verbose", action="store_true", help="Enable debug logging")

    parser = argparse.ArgumentParser(
        description="Exact computations with tangent-to-the-identity germs of (C^3, 0)."
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        command = sub.add_parser(name, parents=[common], help=HELP[name])
        if name == "resolve":
            command.add_argument("--tilde", action="store_true", help="Also blow up p3 and p4")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI entry point

    Returns:
        0 on success, 2 on parse errors, 3 on invariant violations, 4 when undecided, 1 otherwise
    """
    args = _parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(message)s",
    )

    try:
        config = CommandConfig(
            subcommand=args.subcommand,
            input=args.input,
            order=args.order,
            depth=args.depth,
            samples=args.samples,
            curve_depth=args.curve_depth,
            format=args.format,
            out=args.out,
            tilde=getattr(args, "tilde", False),
        )
    except PydanticValidationError as exc:
        logger.error("Invalid arguments: %s", exc)
        return EXIT_PARSE

    try:
        text, code = COMMANDS[config.subcommand](config)
    except InvariantViolation as exc:
        logger.error("Invariant violation: %s", exc)
        return EXIT_INVARIANT
    except ValidationError as exc:
        logger.error("Invalid input: %s", exc)
        return EXIT_PARSE
    except UndecidableError as exc:
        logger.error("Undecided: %s", exc)
        return EXIT_UNDECIDABLE
    except Exception as exc:  # pylint: disable=broad-except
        logger.error("%s failed: %s", config.subcommand, exc, exc_info=True)
        return EXIT_FAILURE

    if config.out is not None:
        config.out.parent.mkdir(parents=True, exist_ok=True)
        config.out.write_text(text, encoding="utf-8")
        logger.info("Wrote %s report -> %s", config.subcommand, config.out)
    else:
        print(text, end="")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
