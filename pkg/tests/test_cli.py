from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from germforge import cli  # noqa: E402
from germforge.core.validators import EXIT_INVARIANT, EXIT_OK, EXIT_PARSE  # noqa: E402

SIMPLE_CORNER = {
    "N": 8,
    "divisor": [1, 1, 0],
    "coords": [[[[2, 1, 0], "1"]], [[[1, 2, 0], "-1"]], [[[1, 1, 1], "1"]]],
}

CUBIC = {
    "N": 6,
    "coords": [
        [[[0, 2, 1], "1"], [[0, 1, 2], "-1"]],
        [[[3, 0, 0], "1"], [[1, 0, 2], "-1"]],
        [[[1, 1, 1], "1"], [[1, 0, 2], "-1"]],
    ],
}

SPIKE = {
    "N": 10,
    "divisor": [0, 0, 2],
    "coords": [[[[0, 1, 2], "1"]], [[[1, 0, 2], "1"]], [[[0, 0, 4], "1"]]],
}


def _write(tmp_path: Path, name: str, payload) -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_classify_writes_closure_report(tmp_path):
    source = _write(tmp_path, "corner.json", SIMPLE_CORNER)
    out = tmp_path / "reports" / "classify.json"

    exit_code = cli.main(["classify", "--input", str(source), "--samples", "1", "--out", str(out)])

    assert exit_code == EXIT_OK
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["verdict"]["class"] == "SimpleCorner"
    assert len(payload["closure"]) == 4
    assert all(child["agrees"] for child in payload["closure"])


def test_explore_refuses_unclassified_germ(tmp_path, capsys):
    source = _write(tmp_path, "cubic.json", CUBIC)

    exit_code = cli.main(["explore", "--input", str(source), "--depth", "1", "--samples", "1"])

    assert exit_code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["refused"] == ["input"]
    assert payload["complete"] is True


def test_directions_text_report(tmp_path, capsys):
    source = _write(tmp_path, "cubic.json", CUBIC)

    exit_code = cli.main(["directions", "--input", str(source), "--format", "text"])

    assert exit_code == EXIT_OK
    out = capsys.readouterr().out
    assert "[0:1:0]" in out
    assert "Bezout: 13 of 13 (ok)" in out


def test_resolve_tree(tmp_path):
    out = tmp_path / "tree.json"

    exit_code = cli.main(["resolve", "--format", "json", "--out", str(out)])

    assert exit_code == EXIT_OK
    tree = json.loads(out.read_text(encoding="utf-8"))
    assert len(tree["children"]) == 5


def test_malformed_input_is_a_parse_error(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert cli.main(["classify", "--input", str(broken)]) == EXIT_PARSE


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--format", "dot"],
        ["resolve", "--order", "5"],
        ["explore", "--samples", "0"],
    ],
)
def test_invalid_arguments(argv):
    assert cli.main(argv) == EXIT_PARSE


def test_curve_needs_a_curve_class(tmp_path):
    source = _write(tmp_path, "corner.json", SIMPLE_CORNER)
    assert cli.main(["curve", "--input", str(source)]) == EXIT_INVARIANT


def test_rs_text_report(tmp_path, capsys):
    source = _write(tmp_path, "spike.json", SPIKE)

    exit_code = cli.main(["rs", "--input", str(source), "--format", "text"])

    assert exit_code == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("r = 3, ")
    assert "manifolds = 3" in out
    for column in ("omega", "signs_x", "signs_y", "dimension"):
        assert column in out


@pytest.mark.parametrize("subcommand", ["classify", "rs"])
def test_reports_are_byte_identical_across_runs(tmp_path, subcommand):
    source = _write(tmp_path, "spike.json", SPIKE)
    first, second = tmp_path / "first.json", tmp_path / "second.json"

    assert cli.main([subcommand, "--input", str(source), "--samples", "1", "--out", str(first)]) == EXIT_OK
    assert cli.main([subcommand, "--input", str(source), "--samples", "1", "--out", str(second)]) == EXIT_OK

    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_text(encoding="utf-8"))
