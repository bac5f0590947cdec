import io
import json
from pathlib import Path

import pytest

from idealspace.cli import main

SPECS = Path(__file__).resolve().parents[1] / "demos" / "specs"


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


def machine(*argv):
    code, text = run(*argv, "--format", "machine")
    return code, [json.loads(line) for line in text.splitlines()]


def spec(name):
    return SPECS / f"{name}.json"


def test_ideals_on_sierpinski():
    code, recs = machine("ideals", "--spec", spec("sierpinski"), "--stage", 0, "--bound", 14)
    assert code == 0
    assert [r["members"] for r in recs if r["kind"] == "ideal"] == [[0], [0, 1]]
    assert [(r["below"], r["above"]) for r in recs if r["kind"] == "specialization"] == [(0, 1)]
    assert recs[-1]["kind"] == "result"


def test_classify_non_transitive_prints_witness():
    code, recs = machine("classify", "--spec", spec("non_transitive"), "--stage", 2)
    assert code == 1
    (tr,) = [r for r in recs if r.get("check") == "transitive"]
    assert tr["witness"] == [[0, 1], [1, 2]]


def test_classify_unknown_on_open_enumeration(tmp_path):
    p = tmp_path / "open.json"
    p.write_text(json.dumps({"catalog": {"name": "staged", "params": {"stages": [[0, [[0, 1], [1, 2]]]]}}}))
    code, _ = machine("classify", "--spec", p, "--stage", 3)
    assert code == 2


def test_interpolate_dyadic():
    code, text = run("interpolate", "--spec", spec("dyadic"), "--stage", 300)
    assert code == 0
    assert "audit:" in text and text.rstrip().splitlines()[-1].startswith("result:")


def test_interpolate_two_chain_with_small_bound():
    code, recs = machine("interpolate", "--spec", spec("two_chain"), "--stage", 300, "--bound", 3)
    assert code == 0
    (aud,) = [r for r in recs if r["kind"] == "audit"]
    assert aud["unreplaced"]


def test_machine_mode_needs_explicit_bounds():
    code, _ = run("interpolate", "--spec", spec("two_chain"), "--format", "machine")
    assert code == 3
    code, _ = run("show", "--spec", spec("sierpinski"), "--format", "machine")
    assert code == 3


@pytest.mark.parametrize("argv", [
    ("show", "--spec", "bad"),
    ("show", "--spec", "sierpinski", "--stage", "-1"),
    ("frobnicate", "--spec", "sierpinski"),
    ("morcheck", "--spec", "sierpinski", "--stage", "2", "--bound", "5"),
])
def test_usage_and_spec_errors(argv, capsys):
    argv = [str(spec(a)) if i == 2 else a for i, a in enumerate(argv)]
    code, _ = run(*argv)
    assert code == 3


def test_spec_error_names_the_node(capsys):
    code, _ = run("show", "--spec", spec("bad"))
    assert code == 3
    assert "$.catalog.name" in capsys.readouterr().err


@pytest.mark.parametrize("command, name, extra", [
    ("show", "sierpinski", ("--stage", 0, "--bound", 5)),
    ("closure", "non_transitive", ("--stage", 0)),
    ("strictify", "sierpinski", ("--stage", 3, "--bound", 60)),
    ("extend", "sierpinski_extend", ("--stage", 6, "--bound", 16)),
    ("morcheck", "identity_code", ("--stage", 0, "--bound", 10)),
    ("antichains", "level3", ("--stage", 40, "--bound", 64)),
    ("fixture", "tree_t1", ("--stage", 6, "--bound", 6)),
    ("fixture", "double_origin", ("--stage", 6, "--bound", 4)),
    ("audit", "po_repair", ("--stage", 6)),
])
def test_commands_succeed(command, name, extra):
    code, recs = machine(command, "--spec", spec(name), *extra)
    assert code == 0, recs
    assert all("kind" in r for r in recs)


@pytest.mark.parametrize("argv", [
    ("fixture", "approx_star", "--stage", 12, "--bound", 8),
    ("audit", "dyadic_engine", "--stage", 60),
    ("audit", "po_repair", "--stage", 6),
    ("fixture", "tree_t1", "--stage", 6, "--bound", 6, "--seed", 7),
])
def test_machine_output_is_byte_identical(argv):
    argv = [str(spec(a)) if i == 1 else a for i, a in enumerate(argv)]
    cmd, rest = argv[0], argv[1:]
    first = run(cmd, "--spec", *rest, "--format", "machine")
    second = run(cmd, "--spec", *rest, "--format", "machine")
    assert first == second and first[1]
