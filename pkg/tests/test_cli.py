import json
import subprocess
import sys

import pytest

from cayleygraph.cli import main
from cayleygraph.report import read_csv


def _write(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


def _rows(text):
    return read_csv(text)[1]


LINEAR = {"immersion": {"catalog": "linear-a-Jw", "params": {"a": 0.5}}, "domain": [-1, 1], "resolution": 3}


def test_angles_csv_header_and_values(tmp_path):
    cfg = _write(tmp_path, LINEAR)
    out = tmp_path / "a.csv"
    assert main(["angles", "--config", cfg, "--out", str(out)]) == 0
    text = out.read_text()
    first = text.splitlines()[0]
    assert first == "#schema=cayleygraph.angles.v1:x,y,z,w,cos1,cos2,sin2,classification,status"
    rows = _rows(text)
    assert len(rows) == 81
    for r in rows:
        assert float(r["cos1"]) == pytest.approx(0.8, abs=1e-12)
        assert r["classification"] == "EqualAngles" and r["status"] == "ok"


def test_numbers_use_17_significant_digits(tmp_path):
    cfg = _write(tmp_path, {"immersion": {"catalog": "cayley-sin-sinh"}, "domain": [-1, 1], "resolution": 2})
    out = tmp_path / "a.csv"
    assert main(["angles", "--config", cfg, "--out", str(out)]) == 0
    rows = _rows(out.read_text())
    for r in rows:
        assert r["cos1"] == f"{float(r['cos1']):.17g}"
    digits = rows[1]["sin2"].split("e")[0].replace("-", "").replace(".", "").lstrip("0")
    assert len(digits) == 17


def test_json_mirrors_csv(tmp_path):
    cfg = _write(tmp_path, {"immersion": {"catalog": "hopf-cone"}, "domain": [-1, 1], "resolution": 3})
    csv_out, json_out = tmp_path / "a.csv", tmp_path / "a.json"
    assert main(["angles", "--config", cfg, "--out", str(csv_out)]) == 0
    assert main(["angles", "--config", cfg, "--out", str(json_out), "--format", "json"]) == 0
    rows = _rows(csv_out.read_text())
    records = json.loads(json_out.read_text())
    assert isinstance(records, list) and len(records) == len(rows)
    for r, j in zip(rows, records):
        assert set(r) == set(j)
        assert all(not isinstance(v, (dict, list)) for v in j.values())
        assert r["status"] == j["status"]
        for k in ("x", "cos1"):
            if r[k] == "na":
                assert j[k] == "na"  # the missing token is shared by both encodings
            else:
                assert float(r[k]) == j[k]
    origin = records[40]
    assert origin["status"] == "skipped:singular" and origin["cos1"] == "na"


@pytest.mark.parametrize("command,extra", [
    ("angles", {}),
    ("curvature", {"fields": ["angles", "mean_curvature", "scalar", "densities", "eta"]}),
    ("calibrate", {}),
])
def test_output_identical_across_threads(tmp_path, command, extra):
    cfg = _write(tmp_path, {"immersion": {"catalog": "j-plus-quadratic-1"}, "domain": [-1, 1],
                            "resolution": 4, **extra})
    outs = []
    for threads in ("1", "3", "0"):
        out = tmp_path / f"{command}-{threads}.csv"
        assert main([command, "--config", cfg, "--out", str(out), "--threads", threads]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_pde_check_identical_across_threads(tmp_path):
    cfg = _write(tmp_path, {"immersion": {"catalog": "cayley-sin-sinh"}, "domain": [-1, 1],
                            "sample": {"count": 4, "min_cos2": 0.05}, "checks": ["pde"]})
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"p{threads}.csv"
        assert main(["pde-check", "--config", cfg, "--out", str(out), "--threads", threads,
                     "--seed", "7", "--strict"]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rows = _rows(outs[0].decode())
    assert len(rows) == 4
    assert all(float(r["pde_order"]) >= 1.8 and float(r["cos2"]) >= 0.05 for r in rows)


def test_config_errors_exit_2(tmp_path, capsys):
    bad = [
        "{not json",
        {"immersion": {"catalog": "no-such"}},
        {"immersion": {"catalog": "zero"}, "resolution": 0},
        {"immersion": {"catalog": "zero"}, "surprise": 1},
        {"immersion": {"catalog": "linear-a-Jw", "params": {"b": 1}}},
        {"domain": [-1, 1]},
    ]
    for i, data in enumerate(bad):
        cfg = _write(tmp_path, data, f"bad{i}.json")
        assert main(["angles", "--config", cfg]) == 2
    err = capsys.readouterr().err
    assert "config field 'resolution'" in err
    assert "line 1 column 2" in err
    assert main(["angles", "--config", _write(tmp_path, LINEAR), "--threads", "-1"]) == 2


def test_io_errors_exit_3(tmp_path):
    assert main(["angles", "--config", str(tmp_path / "missing.json")]) == 3
    cfg = _write(tmp_path, LINEAR)
    assert main(["angles", "--config", cfg, "--out", str(tmp_path / "no" / "dir" / "a.csv")]) == 3


def test_strict_numeric_failure_exit_4(tmp_path):
    cfg = _write(tmp_path, {"immersion": {"random_polynomial": {"degree": 3}}, "domain": [-0.5, 0.5],
                            "resolution": 2})
    out = str(tmp_path / "c.csv")
    assert main(["calibrate", "--config", cfg, "--out", out]) == 0  # failures are reported, not fatal
    assert main(["calibrate", "--config", cfg, "--out", out, "--strict"]) == 4
    good = _write(tmp_path, {"immersion": {"catalog": "cayley-sin-sinh"}, "resolution": 3}, "good.json")
    assert main(["calibrate", "--config", good, "--out", out, "--strict"]) == 0


def test_strict_error_marker_exit_4(tmp_path):
    cfg = _write(tmp_path, {"immersion": {"catalog": "hopf-cone"}, "domain": [-1e-300, 1e-300],
                            "resolution": 1})
    out = str(tmp_path / "h.csv")
    code = main(["angles", "--config", cfg, "--out", out, "--strict"])
    status = _rows(open(out).read())[0]["status"]
    assert status.startswith("skipped:") or (status.startswith("error:") and code == 4)


def test_zero_map_all_lagrangian(tmp_path):
    cfg = _write(tmp_path, {"immersion": {"catalog": "zero"}, "resolution": 3})
    out = tmp_path / "z.json"
    assert main(["angles", "--config", cfg, "--out", str(out), "--format", "json"]) == 0
    recs = json.loads(out.read_text())
    assert {r["classification"] for r in recs} == {"Lagrangian"}


def test_cayley_lagrangian_node(tmp_path):
    cfg = _write(tmp_path, {"immersion": {"catalog": "cayley-sin-sinh"},
                            "domain": {"lower": [0, 0, 1.5707963267948966, 0],
                                       "upper": [0, 0, 1.5707963267948966, 0]},
                            "resolution": 1})
    out = tmp_path / "l.json"
    assert main(["calibrate", "--config", cfg, "--out", str(out), "--format", "json", "--strict"]) == 0
    rec = json.loads(out.read_text())[0]
    assert rec["classification"] == "Lagrangian"


def test_tube_command(tmp_path):
    cfg = _write(tmp_path, {"immersion": {"catalog": "j-plus-quadratic-1"}, "center": [0, 0, 0, 0],
                            "radii": [0.5, 0.3], "quadrature_order": 4})
    out = tmp_path / "t.csv"
    assert main(["tube", "--config", cfg, "--out", str(out), "--strict"]) == 0
    rows = _rows(out.read_text())
    assert [float(r["radius"]) for r in rows] == [0.5, 0.3]
    assert rows[0]["shell_integral"] == "na"
    assert abs(float(rows[1]["stokes_residual"])) <= 1e-12
    bad = _write(tmp_path, {"immersion": {"catalog": "linear-a-Jw"}, "radii": [0.5], "quadrature_order": 2},
                 "cx.json")
    assert main(["tube", "--config", bad, "--out", str(out)]) == 0
    assert _rows(out.read_text())[0]["status"] == "skipped:near_complex"


def test_catalog_list(capsys):
    assert main(["catalog", "list", "--format", "json"]) == 0
    recs = json.loads(capsys.readouterr().out)
    ids = {r["id"] for r in recs}
    assert {"cayley-sin-sinh", "hopf-cone", "j-plus-quadratic-1", "linear-a-Jw", "zero"} <= ids
    jq2 = next(r for r in recs if r["id"] == "j-plus-quadratic-2")
    assert jq2["loci"] == "Complex:the plane x = y = 0"
    assert main(["catalog", "list"]) == 0
    assert capsys.readouterr().out.startswith("#schema=cayleygraph.catalog.v1:id,")


def test_config_output_section(tmp_path):
    target = tmp_path / "from-config.json"
    cfg = _write(tmp_path, {**LINEAR, "output": {"path": str(target), "format": "json"}})
    assert main(["angles", "--config", cfg]) == 0
    assert len(json.loads(target.read_text())) == 81


def test_seeded_random_polynomial_reproducible(tmp_path):
    cfg = _write(tmp_path, {"immersion": {"random_polynomial": {"degree": 2}}, "resolution": 2})
    a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    assert main(["angles", "--config", cfg, "--out", str(a), "--seed", "11"]) == 0
    assert main(["angles", "--config", cfg, "--out", str(b), "--seed", "11"]) == 0
    assert main(["angles", "--config", cfg, "--out", str(c), "--seed", "12"]) == 0
    assert a.read_bytes() == b.read_bytes() != c.read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cayleygraph", "catalog", "list"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("#schema=")
