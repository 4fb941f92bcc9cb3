import json
import subprocess
import sys

import pytest

from zetareg import scenario as sc
from zetareg.cli import golden_paths, main
from zetareg.errors import ParseError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def golden(tmp_path):
    def get(name):
        path = next(p for p in golden_paths() if p.stem == name)
        return json.loads(path.read_text())
    return get


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_golden_suite_passes(capsys):
    code, out, _ = run(["verify", "--golden"], capsys)
    assert code == 0, out
    assert "mismatch" not in out and "error" not in out


def test_json_reports_are_byte_deterministic(capsys, tmp_path):
    code1, out1, _ = run(["verify", "--golden", "--json"], capsys)
    code2, out2, _ = run(["verify", "--golden", "--json"], capsys)
    assert code1 == code2 == 0 and out1 == out2
    reports = json.loads(out1)["reports"]
    assert len(reports) == len(golden_paths())
    run(["verify", "--golden", "--json-out", str(tmp_path / "a")], capsys)
    run(["verify", "--golden", "--json-out", str(tmp_path / "b"), "--jobs", "2"], capsys)
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_main_zero_and_smooth_proper_agree(capsys, golden, tmp_path):
    for name in ("p1_f3", "elliptic_f2", "point_f2"):
        rep = sc.run_scenario(sc.load_scenario(golden(name)))
        by = {t["statement"]: t for t in rep["targets"]}
        assert by["main_zero"]["verdict"] == by["smooth_proper"]["verdict"] == "match"
        assert by["main_zero"]["rhs"] == by["smooth_proper"]["rhs"]


def test_corrupted_incidence_is_reported(capsys, golden, tmp_path):
    data = golden("two_lines_f2")
    data["snc"]["faces"][3]["to"] = "L2"
    path = write(tmp_path, "bad.json", data)
    code, out, _ = run(["verify", "--scenario", path, "--json"], capsys)
    assert code == 1
    errs = [t for t in json.loads(out)["reports"][0]["targets"] if t["verdict"] == "error"]
    assert errs and all(t["error"] == "IncoherentIncidence" for t in errs)


def test_mismatch_exit_code(capsys, golden, tmp_path):
    data = golden("p1_f3")
    data["profile"] = {"projective_space": 1, "k": 2}
    code, out, _ = run(["verify", "--scenario", write(tmp_path, "x.json", data)], capsys)
    assert code == 1 and "mismatch" in out


def test_empty_scenario_list(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0


def test_parse_errors_carry_location(capsys, golden, tmp_path):
    data = golden("p1_f3")
    data["variety"]["type"] = "projective_spaec"
    path = write(tmp_path, "typo.json", data)
    code, _, err = run(["verify", "--scenario", path], capsys)
    assert code == 2 and "variety" in err
    with pytest.raises(ParseError) as info:
        sc.read_scenario(path)
    assert info.value.location.startswith(path)
    bad = tmp_path / "broken.json"
    bad.write_text("{\"field\": ")
    code, _, err = run(["count", str(bad)], capsys)
    assert code == 2 and "broken.json:1" in err
    code, _, _ = run(["count"], capsys)
    assert code == 2


def test_count_zeta_special_value(capsys, golden, tmp_path):
    path = write(tmp_path, "e.json", golden("elliptic_f2"))
    code, out, _ = run(["count", path, "-m", "6"], capsys)
    assert code == 0 and json.loads(out)["counts"] == [3, 9, 9, 9, 33, 81]
    code, out, _ = run(["zeta", path], capsys)
    assert json.loads(out)["text"] == "(1 + 2*t^2) / (1 - 3*t + 2*t^2)"
    code, out, _ = run(["special-value", path, "--at", "0"], capsys)
    data = json.loads(out)
    assert code == 0 and data["order"] == -1 and data["leading"] == "3/1"
    code, out, _ = run(["special-value", path, "--at", "-1", "--jobs", "2"], capsys)
    assert code == 0 and json.loads(out)["order"] == 0


def test_weight_homology_command(capsys, golden, tmp_path):
    path = write(tmp_path, "gm.json", golden("gm_f2"))
    code, out, _ = run(["weight-homology", path], capsys)
    assert code == 0 and json.loads(out)["text"] == ["0", "Z"]
    code, out, _ = run(["weight-homology", path, "--coefficients", "Z[1/2]"], capsys)
    assert json.loads(out)["coefficients"] == "Z[1/2]"


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "zetareg.cli", "verify"], capture_output=True, text=True)
    assert proc.returncode == 0


def test_smooth_proper_flags_wrong_pole_order(golden):
    data = golden("p1_f3")
    data["variety"] = {"type": "union", "parts": [data["variety"], data["variety"]]}
    data["targets"] = [{"statement": "smooth_proper"}]
    rep = sc.run_scenario(sc.load_scenario(data))
    t = rep["targets"][0]
    assert t["verdict"] == "error" and t["error"] == "PoleOrder"
