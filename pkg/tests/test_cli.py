import json

import pytest

from qhdual import cli
from qhdual.cli import ConfigError, load_config, main, parse_config_text


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_eval_empty_integral_is_one(capsys):
    assert main(["eval", "I", "--m2", "0", "--l2", "0", "--a", "0", "--b", "0"]) == 0
    assert _json_out(capsys)["value"] == [1.0, 0.0]


def test_eval_rejects_inadmissible_pair(capsys):
    assert main(["eval", "I", "--m2", "1", "--l2", "1", "--a", "2"]) == 2


def test_verify_example_passes(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "example2f1", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert {"suite", "params", "results", "residuals", "diagnostics", "wall_time"} <= set(rep)
    assert rep["results"] and all(r["residual"] <= 1e-6 for r in rep["results"])


@pytest.mark.parametrize("text", ["kappa = oops\n", "no equals sign\n", "colour = red\n", "m2 = 1.5\n", "z =\n"])
def test_malformed_config_exit_2_no_report(tmp_path, text):
    cfgf = tmp_path / "c.cfg"
    cfgf.write_text(text)
    out = tmp_path / "r.json"
    assert main(["verify", "example2f1", "--config", str(cfgf), "--out", str(out)]) == 2
    assert not out.exists()


@pytest.mark.parametrize("args", [["verify", "nosuchsuite"], ["verify", "selberg", "--format", "xml"],
                                  ["verify", "selberg", "--kappa", "-1"], ["frobnicate"]])
def test_bad_arguments_exit_2(args):
    assert main(args) == 2


def test_flags_override_file(tmp_path):
    cfgf = tmp_path / "c.cfg"
    cfgf.write_text("# comment\nkappa = 2.5\nrel-tol = 1e-7\nz = -40+0.3i\n")
    cfg = load_config(str(cfgf), {"kappa": "1.9"})
    assert cfg.kappa == 1.9 and cfg.rel_tol == 1e-7 and cfg.z == complex(-40, 0.3)
    assert {"kappa", "rel_tol", "z"} <= cfg.explicit


def test_config_keys_accept_dashes_and_underscores():
    assert parse_config_text("rel_tol = 1e-6\nrel-tol = 1e-5\n") == {"rel_tol": 1e-5}
    with pytest.raises(ConfigError):
        parse_config_text("seed = x")


def test_reports_deterministic(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert main(["verify", "operators", "--seed", "7", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        rep.pop("wall_time")
        outs.append(rep)
    assert outs[0] == outs[1]


def test_failures_exit_1(monkeypatch, tmp_path):
    def failing(cfg):
        return [cli._case("always fails", 1.0, 0.5)]

    monkeypatch.setitem(cli.SUITE_FUNCS, "selberg", failing)
    out = tmp_path / "r.json"
    assert main(["verify", "selberg", "--out", str(out)]) == 1
    rep = json.loads(out.read_text())
    assert rep["passed"] is False and rep["results"][0]["detail"] == {}


def test_csv_format(capsys):
    assert main(["verify", "selberg", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "suite,case,residual,threshold,passed" and len(lines) == 5


def test_dump_barnes_one_line_pair(capsys):
    assert main(["dump-contour", "barnes", "--m2", "1", "--l2", "1"]) == 0
    d = _json_out(capsys)
    assert len(d) == 1 and len(d[0]["segments"]) == 2 and d[0]["loops"] == []


def test_dump_loops_J_two_families(capsys):
    assert main(["dump-contour", "loops_J", "--m2", "2", "--l2", "2", "--b", "1"]) == 0
    d = _json_out(capsys)
    assert len(d) == 2 and d[0]["anchor"] != d[1]["anchor"]


def test_dump_loops_B_two_nested(capsys, tmp_path):
    out = tmp_path / "b.json"
    assert main(["dump-contour", "loops_B", "--m2", "2", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert len(d) == 2
