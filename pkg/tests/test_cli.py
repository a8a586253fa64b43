import json

import numpy as np
import pytest

from orlimink.body_kernel import hypercube, load_json, regular_polygon, save_json, vertices
from orlimink.cli import run


def write_measure(path, dirs, masses):
    dirs = np.asarray(dirs, dtype=float)
    path.write_text(json.dumps({"dim": dirs.shape[1],
                                "atoms": [{"direction": d.tolist(), "mass": m}
                                          for d, m in zip(dirs, masses)]}))
    return str(path)


def octagon(tmp_path):
    th = 2 * np.pi * np.arange(8) / 8
    return write_measure(tmp_path / "oct.json", np.column_stack((np.cos(th), np.sin(th))), [1.0] * 8)


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_solve_writes_outputs(tmp_path):
    out = tmp_path / "run"
    code = run(["solve", "--measure", octagon(tmp_path), "--out", str(out)])
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["termination"] == "converged"
    assert rep["pair"] == "power:-1"
    assert (out / "body.csv").exists() and (out / "body.json").exists()
    m = manifest(out)
    assert m["exit_code"] == 0 and m["subcommand"] == "solve"
    assert set(m["outputs"]) >= {"report.json", "body.json", "body.csv"}
    assert m["duration_seconds"] >= 0
    assert m["grid"]["rule"] == "equal_angle_2d"


def test_solve_report_is_byte_deterministic(tmp_path):
    meas = write_measure(tmp_path / "m.json", hypercube(2).normals, [1.0, 2.0, 1.0, 2.0])
    args = ["solve", "--measure", meas, "--seed", "3", "--pair", "power:-2"]
    assert run(args + ["--out", str(tmp_path / "a")]) == 0
    assert run(args + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a/report.json").read_bytes() == (tmp_path / "b/report.json").read_bytes()


def test_solve_3d_writes_obj(tmp_path):
    meas = write_measure(tmp_path / "m.json", hypercube(3).normals, [1.0] * 6)
    assert run(["solve", "--measure", meas, "--out", str(tmp_path)]) == 0
    obj = (tmp_path / "body.obj").read_text()
    assert sum(ln.startswith("v ") for ln in obj.splitlines()) == 8
    assert sum(ln.startswith("f ") for ln in obj.splitlines()) == 6


def test_solve_exit_codes(tmp_path):
    hemi = write_measure(tmp_path / "h.json", np.eye(2), [1.0, 1.0])
    assert run(["solve", "--measure", hemi, "--out", str(tmp_path / "d")]) == 2
    assert json.loads((tmp_path / "d/report.json").read_text())["termination"] == "degenerate_measure"
    uneven = write_measure(tmp_path / "u.json", hypercube(2).normals, [1.0, 2.0, 3.0, 4.0])
    assert run(["solve", "--measure", uneven, "--max-iters", "1", "--out", str(tmp_path / "m")]) == 3
    assert run(["solve", "--measure", uneven, "--pair", "power:2", "--out", str(tmp_path / "p")]) == 4


def test_invalid_inputs_exit_4(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["solve", "--measure", str(bad), "--out", str(tmp_path)]) == 4
    assert run(["measure", "--body", str(bad), "--out", str(tmp_path)]) == 4
    assert run(["solve", "--measure", str(tmp_path / "missing.json")]) == 4
    assert run(["frobnicate"]) == 4
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"max_iters": 0}')
    assert run(["solve", "--measure", octagon(tmp_path), "--config", str(cfg),
                "--out", str(tmp_path)]) == 4
    meas = octagon(tmp_path)
    assert run(["solve", "--measure", meas, "--dim", "3", "--out", str(tmp_path)]) == 4


def test_measure_and_quermass(tmp_path):
    body = tmp_path / "sq.json"
    save_json(hypercube(2), body)
    assert run(["measure", "--body", str(body), "--pair", "power:-1", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "measure.json").read_text())
    masses = [a["mass"] for a in doc["atoms"]]
    assert np.allclose(masses, masses[0], rtol=1e-12)
    assert run(["quermass", "--body", str(body), "--pair", "power:-1", "--out", str(tmp_path)]) == 0
    q = json.loads((tmp_path / "quermass.json").read_text())["value"]
    assert q == pytest.approx(doc["total"], rel=1e-12)
    assert run(["quermass", "--body", str(body), "--body2", str(body), "--psi", "power:2",
                "--out", str(tmp_path)]) == 0
    # psi = t^n with K = L gives the area of the square
    assert json.loads((tmp_path / "quermass.json").read_text())["value"] == pytest.approx(4, rel=1e-5)
    assert run(["quermass", "--body", str(body), "--body2", str(body), "--out", str(tmp_path)]) == 4


def test_addition_csv(tmp_path):
    k, l = tmp_path / "k.json", tmp_path / "l.json"
    save_json(hypercube(2), k)
    save_json(regular_polygon(6, 1.5), l)
    assert run(["addition", "--body", str(k), "--body2", str(l), "--pair", "power:1",
                "--grid", "256", "--out", str(tmp_path)]) == 0
    tab = np.loadtxt(tmp_path / "addition.csv", delimiter=",", skiprows=1)
    assert tab.shape == (256, 6)
    assert np.allclose(tab[:, 4], tab[:, 2] + tab[:, 3], rtol=1e-12)
    assert np.max(np.abs(tab[:, 5])) <= 1e-10
    assert manifest(tmp_path)["epsilon"] == 1.0


def test_export_round_trip(tmp_path):
    src = tmp_path / "c.json"
    save_json(hypercube(3), src)
    out = tmp_path / "e"
    assert run(["export", "--body", str(src), "--out", str(out)]) == 0
    back = load_json(out / "body.json")
    assert np.array_equal(back.offsets, hypercube(3).offsets)
    assert (out / "body.obj").exists()
    save_json(regular_polygon(5), src)
    assert run(["export", "--body", str(src), "--out", str(out)]) == 0
    pts = np.loadtxt(out / "body.csv", delimiter=",", skiprows=1)
    assert len(pts) == len(vertices(regular_polygon(5)))


def test_verify_quick(tmp_path):
    assert run(["verify", "--grid", "quick", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "verify.csv").read_text().splitlines()
    assert lines[0].startswith("check,value")
    assert all(",True," in ln for ln in lines[1:])


def test_version(capsys):
    assert run(["--version"]) == 0
    assert "orlimink" in capsys.readouterr().out
