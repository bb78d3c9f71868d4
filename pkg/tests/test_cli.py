import csv
import json
import os
from pathlib import Path

import pytest

from schottky_zhu.cli import load_config, run
from schottky_zhu.errors import ParameterSpaceError, ParseError, SchemaError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
REF_G1 = str(CONFIGS / "ref_g1.json")
REF_G2 = str(CONFIGS / "ref_g2.json")


def _write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def test_minimal_config_gets_defaults():
    spec = load_config(REF_G1)
    assert spec.command == "verify" and spec.cutoff == 24 and spec.depth == 8
    assert spec.params.genus == 1


def test_reference_config_is_valid():
    assert load_config(REF_G2).params.genus == 2


def test_overlapping_discs_name_the_pair(tmp_path, capsys):
    path = str(CONFIGS / "overlap_g2.json")
    with pytest.raises(ParameterSpaceError, match="discs -1 and -2"):
        load_config(path)
    assert run(["verify", "--config", path]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ParameterSpaceError"


def test_unknown_keys_and_bad_values(tmp_path):
    base = json.loads(Path(REF_G1).read_text())
    with pytest.raises(SchemaError, match="unknown"):
        load_config(_write(tmp_path, {**base, "colour": "red"}))
    with pytest.raises(SchemaError):
        load_config(_write(tmp_path, {**base, "cutoff": -3}))
    with pytest.raises(SchemaError):
        load_config(_write(tmp_path, {"generators": [{"W_minus": [1, 0], "q": [0.1, 0]}]}))


def test_parse_error_reports_position(tmp_path):
    path = _write(tmp_path, '{\n  "generators": [\n  oops\n]}')
    with pytest.raises(ParseError, match="line 3"):
        load_config(path)
    assert run(["partition", "--config", path]) == 2
    assert run(["partition", "--config", str(tmp_path / "missing.json")]) == 2


def test_partition_record(tmp_path):
    out = tmp_path / "z.json"
    assert run(["partition", "--config", REF_G1, "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["value"][0] == pytest.approx(1.0102030, abs=1e-7)
    assert set(rec) >= {"value", "cutoffs", "residual_estimates"}


def test_eval_grid_rows_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["eval", "--config", REF_G2, "--kind", "omega", "--grid", "-3,3,-3,3,32,32"]
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["re(x)", "im(x)", "re(y)", "im(y)", "re(value)", "im(value)", "kind"]
    assert len(rows) - 1 == 1024


def test_eval_needs_a_grid():
    assert run(["eval", "--config", REF_G2]) == 2


def test_npoint_and_lattice_records(tmp_path):
    base = json.loads(Path(REF_G2).read_text())
    cfg = _write(tmp_path, {**base, "npoint": {"h_points": [[0.5, 0.3], [-0.4, 0.7]]},
                            "lattice": {"gram": [[2, 1], [1, 2]]}})
    out = tmp_path / "n.json"
    assert run(["npoint", "--config", cfg, "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["value"]) == 2
    assert run(["lattice", "--config", cfg, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["residual_estimates"]["theta_tail"] < 1e-10


def test_verify_all_on_the_reference(tmp_path):
    out = tmp_path / "r.json"
    assert run(["verify", "--config", REF_G2, "--suite", "all", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["pass"] and all(r["pass"] for r in rep["rows"])
    assert {"equation_id", "max_residual", "tolerance", "pass"} <= set(rep["rows"][0])


def test_suite_failure_exits_one(tmp_path):
    base = json.loads(Path(REF_G2).read_text())
    cfg = _write(tmp_path, {**base, "tolerances": {"tol": 1e-30}})
    out = tmp_path / "r.json"
    assert run(["verify", "--config", cfg, "--suite", "zhu", "--out", str(out)]) == 1
    assert json.loads(out.read_text())["pass"] is False


def test_no_partial_output_on_error(tmp_path):
    out = tmp_path / "never.json"
    assert run(["verify", "--config", REF_G1, "--suite", "ward", "--out", str(out)]) == 2
    assert not out.exists()
    assert not [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]


def test_genus_one_suite_from_the_cli(tmp_path):
    assert run(["verify", "--config", REF_G1, "--suite", "genus1", "--out", str(tmp_path / "g.json")]) == 0


def test_output_to_a_device_is_not_replaced():
    before = os.stat(os.devnull)
    assert run(["partition", "--config", REF_G1, "--out", os.devnull]) == 0
    after = os.stat(os.devnull)
    assert (after.st_mode, after.st_rdev) == (before.st_mode, before.st_rdev)
