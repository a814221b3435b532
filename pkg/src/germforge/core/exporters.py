"""
JSON documents and text tables for germs, trees and reports.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import pandas as pd
from pydantic import ValidationError as PydanticValidationError

from .blowup import BlowupNode, tree_export
from .directions import DirectionReport
from .germ import Germ, make_germ
from .models import (
    DirectionRow,
    GermDocument,
    InstanceDocument,
    ParabolicRow,
    SiteRow,
    TheoremBRow,
)
from .pipeline import ExampleInstance, ExplorationReport, TheoremBReport, build_instance, singular_sites
from .ramis_sibuya import ParabolicReport
from .validators import GermParseError, validate_divisor, validate_exponents, validate_format

logger = logging.getLogger(__name__)

Document = Union[str, dict]


def dump_json(payload) -> str:
    """Deterministic JSON rendering."""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_json(path: Path) -> dict:
    """
    Read a JSON document

    Raises:
        GermParseError: If the file is missing or not valid JSON
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GermParseError(f"Cannot read {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GermParseError(f"Malformed JSON in {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise GermParseError(f"Expected a JSON object in {path}")
    return payload


def _parse(model, document: Document):
    try:
        if isinstance(document, str):
            return model.model_validate_json(document)
        return model.model_validate(document)
    except PydanticValidationError as exc:
        raise GermParseError(f"Invalid {model.__name__}:\n{exc}") from exc


# ----------------------------------------------------------------------
# germs and instances


def germ_to_document(f: Germ) -> dict:
    """f - id as a canonical germ document (terms sorted by exponent)."""
    coords = [
        [[list(e), str(c)] for e, c in sorted(comp.items())]
        for comp in f.displacement
    ]
    return {"N": f.N, "divisor": list(f.divisor), "coords": coords}


def germ_from_document(document: Document) -> Germ:
    """
    Germ from a germ document

    Raises:
        GermParseError: On schema errors or unparsable scalars
        InvariantViolation: If f is not tangent to the identity or the divisor does not divide
    """
    doc = _parse(GermDocument, document)
    table = [[(validate_exponents(e), c) for e, c in comp] for comp in doc.coords]
    return make_germ(table, doc.N, validate_divisor(doc.divisor))


def instance_from_document(document: Document) -> ExampleInstance:
    """Example instance from P, Q, R given as polynomial strings or term lists."""
    doc = _parse(InstanceDocument, document)
    return build_instance(doc.P, doc.Q, doc.R, doc.N)


def is_instance_document(payload: dict) -> bool:
    return "coords" not in payload


# ----------------------------------------------------------------------
# tables


def table_text(rows: Iterable[dict], columns: Optional[Sequence[str]] = None) -> str:
    """Aligned text table; an empty row set prints the header only."""
    rows = list(rows)
    df = pd.DataFrame(rows, columns=columns) if columns else pd.DataFrame(rows)
    if df.empty:
        return "  ".join(df.columns) + "\n"
    return df.to_string(index=False) + "\n"


def _rows(models: Iterable) -> List[dict]:
    return [row.model_dump(by_alias=True) for row in models]


def site_rows(root: BlowupNode, names: Optional[Sequence[str]] = None) -> List[dict]:
    """One row per singular site; names default to the sites of the resolution with p3, p4 blown up."""
    nodes = singular_sites(root) if names is None else singular_sites(root, names)
    rows = []
    for node in nodes:
        verdict = node.verdict or {}
        eig = verdict.get("eigenvalues")
        rows.append(
            SiteRow(
                site=node.name,
                chart=node.chart.label if node.chart is not None else "origin",
                divisor=str(list(node.germ.divisor)),
                certified_degree=node.germ.reduced_degree,
                kind=verdict.get("class", "?"),
                eigenvalues="unresolved" if eig is None else ", ".join(eig),
                quality=verdict.get("quality", ""),
            )
        )
    return _rows(rows)


def direction_rows(report: DirectionReport, multiplicities: Optional[dict] = None) -> List[dict]:
    multiplicities = multiplicities or {}
    rows = [
        DirectionRow(
            direction=str(d),
            multiplier=str(d.multiplier),
            degenerate=d.degenerate,
            exceptional=d.exceptional,
            multiplicity=None if str(d) not in multiplicities else str(multiplicities[str(d)]),
        )
        for d in report.resolved
    ]
    return _rows(rows)


def parabolic_rows(report: ParabolicReport, site: str = "") -> List[dict]:
    rows = []
    for entry in report.directions:
        data = entry.to_dict()
        rows.append(
            ParabolicRow(
                site=site,
                index=entry.index,
                omega=data["omega"],
                signs_x=" ".join(f"{s:+d}" if s else "0" for s in entry.signs_x),
                signs_y=" ".join(f"{s:+d}" if s else "0" for s in entry.signs_y),
                s=entry.s,
                dimension=entry.dimension,
            )
        )
    return _rows(rows)


def theorem_b_rows(report: TheoremBReport) -> List[dict]:
    rows = [
        TheoremBRow(
            site=site.site,
            kind=site.kind,
            status=site.status,
            r=site.r,
            count=site.count,
            dimensions=" ".join(str(d) for d in site.dimensions),
        )
        for site in report.sites
    ]
    return _rows(rows)


def exploration_rows(report: ExplorationReport) -> List[dict]:
    return [node.to_dict() for node in report.nodes]


def render_tree(root: BlowupNode, fmt: str, names: Optional[Sequence[str]] = None) -> str:
    """Tree as JSON, DOT or the singular-site table."""
    fmt = validate_format(fmt)
    if fmt == "text":
        return table_text(site_rows(root, names))
    return tree_export(root, fmt).rstrip("\n") + "\n"


__all__ = [
    "direction_rows",
    "dump_json",
    "exploration_rows",
    "germ_from_document",
    "germ_to_document",
    "instance_from_document",
    "is_instance_document",
    "load_json",
    "parabolic_rows",
    "render_tree",
    "site_rows",
    "table_text",
    "theorem_b_rows",
]
