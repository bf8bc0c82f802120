import json

import pytest

from qirigid.cli import main


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def test_ball_csv(tmp_path, capsys):
    assert run(tmp_path, "ball", "--group", "int_gens:1", "--radius", "5") == 0
    rows = (tmp_path / "vertices.csv").read_text().splitlines()
    assert len(rows) == 12 and rows[0] == "key,dist"
    assert json.loads(capsys.readouterr().out)["vertices"] == 11


def test_ends_json(tmp_path):
    assert run(tmp_path, "ends", "--group", "dihedral_inf", "--inner", "2", "--radius", "6") == 0
    assert json.loads((tmp_path / "ends.json").read_text())["ends"] == 2


def test_growth_json(tmp_path):
    assert run(tmp_path, "growth", "--group", "free:2", "--radius", "6") == 0
    assert json.loads((tmp_path / "growth.json").read_text())["classification"] == "superlinear"


def test_certify_outputs(tmp_path):
    assert run(tmp_path, "certify", "--group", "int_gens:1", "--qi", "default") == 0
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["verdict"] == "VirtuallyZ" and cert["index"] == 12
    rows = (tmp_path / "orbit.csv").read_text().splitlines()
    assert rows[0] == "z,position" and len(rows) == 2 * cert["z_max"] + 2
    assert (tmp_path / "orbit.svg").read_text().startswith("<svg")


def test_certify_negative_and_usage(tmp_path):
    assert run(tmp_path, "certify", "--group", "grid_2", "--qi", "default") == 2
    assert json.loads((tmp_path / "certificate.json").read_text())["failed_check"] == "qi_verified"
    assert run(tmp_path, "certify", "--group", "int_gens:1") == 1
    assert run(tmp_path, "certify", "--group", "int_gens:1", "--qi", "bogus") == 1
    assert run(tmp_path, "certify", "--group", "nonsense:3", "--qi", "default") == 1


def test_flow_detect(tmp_path):
    assert run(tmp_path, "flow-detect", "--group", "int_gens:2,3") == 0
    assert json.loads((tmp_path / "verdict.json").read_text())["verdict"] == "VirtuallyZ"
    assert run(tmp_path, "flow-detect", "--group", "grid_2") == 2
    table = (tmp_path / "mincut_table.csv").read_text().splitlines()
    assert table[0] == "distance,maxflow" and len(table) == 7
    assert run(tmp_path, "flow-detect", "--group", "cyclic:6") == 2
    assert "bounded" in json.loads((tmp_path / "verdict.json").read_text())["reason"]
    assert run(tmp_path, "flow-detect", "--group", "int_gens:1", "--qi", "default") == 1


def test_argparse_errors_exit_one():
    with pytest.raises(SystemExit) as info:
        main(["ball", "--radius", "zero"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


def test_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"group": {"kind": "dihedral_inf"}, "inner": 2, "radius": 6}))
    assert main(["ends", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "ends.json").read_text())["ends"] == 2
    cfg.write_text('{"group": "int_gens:1",\n "radius": -3}')
    assert main(["ball", "--config", str(cfg)]) == 1
    cfg.write_text('{"group": "int_gens:1",\n "radius": 3,}')
    assert main(["ball", "--config", str(cfg)]) == 1
    cfg.write_text('{"group": "int_gens:1", "colour": 3}')
    assert main(["ball", "--config", str(cfg)]) == 1


def test_config_diagnostics(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text('{"group": "int_gens:1",\n "radius": 3,}')
    main(["ball", "--config", str(cfg)])
    assert "line 2" in capsys.readouterr().err


def test_threads_hint_accepted(tmp_path):
    assert run(tmp_path, "ball", "--group", "int_gens:1", "--radius", "2", "--threads", "4") == 0


def test_identical_runs_identical_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        main(["flow-detect", "--group", "dihedral_inf", "--out", str(d)])
    assert (a / "verdict.json").read_bytes() == (b / "verdict.json").read_bytes()
