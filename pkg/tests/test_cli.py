import csv
import json
import math
import shutil
import subprocess
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

import multiplank.experiments
from multiplank.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, main
from multiplank.scene import Scene, SceneError

SCENES = Path(__file__).resolve().parent.parent / "scenes"
SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


# -- exit codes and reports --------------------------------------------------


@pytest.mark.parametrize("cmd, scene", [
    ("meb", "plank"), ("meb", "stratified"), ("plank-check", "plank"), ("plank-check", "two_planks"),
    ("stratify", "stratified"), ("verify", "square_two_planks"), ("verify", "square_chord"),
    ("inradii", "triangle"), ("normed", "normed_square"),
])
def test_commands_succeed(capsys, cmd, scene):
    rep = report(capsys, cmd, "--scene", SCENES / f"{scene}.json")
    assert rep["command"] == cmd and rep["verdicts"] and all(rep["verdicts"].values())
    assert set(rep) == {"command", "inputs_digest", "seed", "budget", "metrics", "verdicts", "witnesses", "info"}


def test_pizza_report(capsys):
    rep = report(capsys, "pizza", "--scene", SCENES / "pizza.json")
    s = math.sin(math.pi / 3)
    assert rep["metrics"]["best_piece"] == pytest.approx(s / (1 + s), abs=1e-4)
    assert rep["metrics"]["best_piece"] == pytest.approx(0.46410, abs=1e-5)
    assert rep["verdicts"]["bound_holds"]


def test_plank_check_report(capsys):
    rep = report(capsys, "plank-check", "--scene", SCENES / "plank.json")
    assert rep["verdicts"]["def_equivalence_0"]
    assert rep["metrics"]["def_disagreements_0"] == 0


def test_two_planks_union(capsys):
    rep = report(capsys, "plank-check", "--scene", SCENES / "two_planks.json")
    assert rep["verdicts"]["union_covered"]
    assert rep["metrics"]["union_inradius"] < rep["metrics"]["half_width_sum"]


def test_square_equality_case(capsys):
    rep = report(capsys, "verify", "--scene", SCENES / "square_two_planks.json")
    assert rep["metrics"]["lhs"] == pytest.approx(0.5) and rep["metrics"]["rhs"] == pytest.approx(0.5, abs=1e-9)


def test_violation_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(multiplank.experiments, "pizza_bound", lambda m, N: 2.0)
    code, out, _ = run(capsys, "pizza", "--scene", SCENES / "pizza.json")
    assert code == EXIT_VIOLATION
    rep = json.loads(out)
    assert rep["verdicts"]["bound_holds"] is False and "center" in rep["witnesses"]


def test_malformed_scene(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    code, out, err = run(capsys, "meb", "--scene", bad)
    assert code == EXIT_INPUT and out == "" and "error" in err
    bad.write_text(json.dumps({"dim": 2, "generating_sets": [[[0, 0, 0]]]}))
    assert run(capsys, "meb", "--scene", bad)[:2] == (EXIT_INPUT, "")
    bad.write_text(json.dumps({"dim": 2, "colour": "red"}))
    assert run(capsys, "meb", "--scene", bad)[:2] == (EXIT_INPUT, "")


def test_bad_flags(capsys):
    assert run(capsys, "meb", "--scene", SCENES / "plank.json", "--budget", "10")[:2] == (EXIT_INPUT, "")
    assert run(capsys, "frobnicate")[0] == EXIT_INPUT
    assert run(capsys, "meb", "--scene", SCENES / "nope.json")[:2] == (EXIT_INPUT, "")
    assert run(capsys, "meb")[:2] == (EXIT_INPUT, "")          # empty scene has nothing to enclose


def test_timing_goes_to_stderr(capsys):
    code, out, err = run(capsys, "meb", "--scene", SCENES / "plank.json", "--timing")
    assert code == EXIT_OK and "wall time" in err and "wall" not in out


def test_seed_flag_changes_digest(capsys):
    a = report(capsys, "meb", "--scene", SCENES / "plank.json")
    b = report(capsys, "meb", "--scene", SCENES / "plank.json", "--seed", "7")
    assert a["inputs_digest"] != b["inputs_digest"] and b["seed"] == 7


# -- determinism -------------------------------------------------------------


@pytest.mark.parametrize("cmd, scene", [("verify", "square_chord"), ("stratify", "stratified"),
                                        ("pizza", "pizza"), ("normed", "normed_square")])
def test_reports_are_byte_identical(capsys, cmd, scene):
    first = run(capsys, cmd, "--scene", SCENES / f"{scene}.json")[1]
    second = run(capsys, cmd, "--scene", SCENES / f"{scene}.json")[1]
    assert first == second and first


def test_svg_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        assert run(capsys, "render", "--scene", SCENES / "three_fan.json", "--out", out, "--resolution", 128)[0] == 0
    assert a.read_bytes() == b.read_bytes()


# -- scenes ------------------------------------------------------------------


@pytest.mark.parametrize("path", sorted(SCENES.glob("*.json")), ids=lambda p: p.stem)
def test_scene_round_trip(path):
    s = Scene.load(path)
    again = Scene.loads(s.dumps())
    assert again.to_dict() == s.to_dict()
    assert again.digest() == s.digest()


def test_scene_validation():
    with pytest.raises(SceneError):
        Scene.from_dict({"dim": 4})
    with pytest.raises(SceneError):
        Scene.from_dict({"generating_sets": [[[0, 0], [1, 1]]], "translations": [[0, 0], [1, 1]]})
    with pytest.raises(SceneError):
        Scene.from_dict({"bodies": {"K": {"kind": "blob"}}})
    with pytest.raises(SceneError):
        Scene.from_dict({"seed": -1})
    with pytest.raises(SceneError):
        Scene.from_dict({"generating_sets": [[[0, float("nan")]]]})


# -- render ------------------------------------------------------------------


def groups(path):
    root = ET.parse(path).getroot()
    return root, {g.get("id"): g for g in root.iter(f"{SVG}g")}


def test_render_three_fan(capsys, tmp_path):
    out = tmp_path / "fan.svg"
    assert run(capsys, "render", "--scene", SCENES / "three_fan.json", "--out", out, "--resolution", 256)[0] == 0
    root, g = groups(out)
    assert root.tag == f"{SVG}svg"
    assert {"axes", "multiplanks", "meb", "points"} <= set(g)
    assert len(list(g["points"].iter(f"{SVG}circle"))) == 3


def test_render_empty_scene(capsys, tmp_path):
    out = tmp_path / "empty.svg"
    assert run(capsys, "render", "--out", out)[0] == 0
    _, g = groups(out)
    assert set(g) == {"axes"}


def test_render_stratified_and_normed(capsys, tmp_path):
    for scene, layer in (("stratified", "strata"), ("normed_square", "gauge"), ("two_planks", "multiplanks")):
        out = tmp_path / f"{scene}.svg"
        assert run(capsys, "render", "--scene", SCENES / f"{scene}.json", "--out", out, "--resolution", 96)[0] == 0
        assert layer in groups(out)[1]


def test_render_errors(capsys, tmp_path):
    assert run(capsys, "render", "--scene", SCENES / "tetrahedron.json", "--out", tmp_path / "t.svg")[:2] == (EXIT_INPUT, "")
    assert run(capsys, "render", "--scene", SCENES / "plank.json", "--out", tmp_path / "no" / "dir.svg")[:2] == (EXIT_INPUT, "")
    assert run(capsys, "render", "--scene", SCENES / "plank.json")[:2] == (EXIT_INPUT, "")


# -- sharpness ---------------------------------------------------------------


def test_sharpness_csv(capsys, tmp_path):
    scene = tmp_path / "s.json"
    scene.write_text(json.dumps({"dim": 2, "options": {"sharpness": {"N": [6, 12], "r": 0.3}}}))
    out = tmp_path / "sweep.csv"
    rep = report(capsys, "sharpness", "--scene", scene, "--budget", 5000, "--csv", out)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["N", "min_covering_r"] and [r[0] for r in rows[1:]] == ["6", "12"]
    assert float(rows[1][1]) == rep["metrics"]["min_covering_r_N6"]
    assert rep["verdicts"] == {"above_half": True, "decreasing": True}
    assert rep["metrics"]["covers_at_r_N6"] is False and "uncovered_at_r_N6" in rep["witnesses"]


# -- console script ----------------------------------------------------------


@pytest.mark.skipif(shutil.which("multiplank") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["multiplank", "meb", "--scene", str(SCENES / "plank.json")], capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["verdicts"] == {"encloses_0": True}
