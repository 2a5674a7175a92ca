import json
import subprocess
import sys

import pytest

from ncorlicz.cli import run
from ncorlicz.report import emit_report, reports_from_json


def call(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_indices(capsys):
    code, out, _ = call(["indices", "--phi", "powerlog:a=1.2,b=0.5"], capsys)
    assert code == 0
    d = json.loads(out)
    assert list(d) == ["phi", "p_phi", "q_phi"]
    assert d["p_phi"] == pytest.approx(1.2, abs=5e-2) and d["q_phi"] == pytest.approx(1.7, abs=5e-2)


def test_delta2(capsys):
    code, out, _ = call(["delta2", "--phi", "power:p=3"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["delta2"] == pytest.approx(8.0, rel=1e-9) and d["unbounded"] is False


def test_bad_phi_names_token(capsys):
    code, _, err = call(["indices", "--phi", "powerlog:a=1.2,x=3"], capsys)
    assert code == 2 and "'x'" in err
    code, _, err = call(["indices", "--phi", "powerlog:a=0.5,b=1"], capsys)
    assert code == 2 and "a" in err


def test_usage_errors(capsys):
    assert call([], capsys)[0] == 2
    assert call(["verify", "nonsense", "--phi", "power:p=2"], capsys)[0] == 2
    assert call(["verify", "transform"], capsys)[0] == 2
    assert call(["verify", "transform", "--phi", "power:p=2", "--dim", "6"], capsys)[0] == 2


def test_regime_error_no_information(capsys):
    code, _, err = call(["verify", "bg", "--phi", "powerlog:a=1.5,b=1", "--samples", "2"], capsys)
    assert code == 2
    assert "no information" in err and "RegimeError" in err


def test_transform_ones(capsys):
    code, out, _ = call(["verify", "transform", "--phi", "power:p=2", "--alpha", "ones",
                         "--dim", "8", "--seed", "7"], capsys)
    assert code == 0
    (rep,) = reports_from_json(out)
    assert rep.passed is True and all(r["ratio"] == 1.0 for r in rep.samples)


def test_finding_only_exit_zero(capsys):
    code, out, _ = call(["verify", "bg", "--phi", "power:p=3", "--samples", "3"], capsys)
    assert code == 0
    assert json.loads(out)[0]["pass"] is None


def test_csv_output(capsys):
    code, out, _ = call(["verify", "transform", "--phi", "power:p=2", "--samples", "4", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "inequality,index,variant,lhs,rhs,ratio"
    assert len(lines) == 5 and all(l.startswith("transform,") for l in lines[1:])


def test_empty_reports():
    assert emit_report([], "json") == "[]\n"
    assert emit_report([], "csv") == "inequality,index,variant,lhs,rhs,ratio\n"


def test_config_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"phi": "power:p=2", "samples": 3, "seed": 1}))
    code, out, _ = call(["verify", "transform", "--config", str(cfg)], capsys)
    assert code == 0
    rep = json.loads(out)[0]
    assert len(rep["samples"]) == 3 and rep["config"]["seed"] == 1
    code, out, _ = call(["verify", "transform", "--config", str(cfg), "--samples", "5"], capsys)
    assert len(json.loads(out)[0]["samples"]) == 5


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"phi": "power:p=2", "sampels": 3}))
    code, _, err = call(["verify", "transform", "--config", str(cfg)], capsys)
    assert code == 2 and "sampels" in err
    code, _, _ = call(["verify", "transform", "--config", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_out_file_and_unwritable(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = call(["verify", "transform", "--phi", "power:p=2", "--samples", "2", "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())[0]["inequality"] == "transform"
    code, _, _ = call(["verify", "transform", "--phi", "power:p=2", "--out", str(tmp_path / "no" / "x.json")], capsys)
    assert code == 2


def test_filtration_flag(capsys):
    code, out, _ = call(["verify", "stein", "--phi", "power:p=2", "--samples", "2", "--dim", "4",
                         "--filtration", '{"model":"partition","levels":[[[0],[1],[2,3]],[[0,1,2,3]]]}'], capsys)
    assert code == 0
    assert json.loads(out)[0]["config"]["filtration"]["model"] == "partition"
    code, _, _ = call(["verify", "stein", "--phi", "power:p=2", "--filtration", "{bad"], capsys)
    assert code == 2


def test_ensemble_with_error_report(capsys):
    code, out, _ = call(["ensemble", "--phi", "powerlog:a=1.5,b=1", "--samples", "2", "--which", "transform,bg"], capsys)
    assert code == 2
    reps = json.loads(out)
    assert reps[1]["error"] and "no information" in reps[1]["error"]


def test_interpolate(capsys):
    code, out, _ = call(["interpolate", "--phi", "powerlog:a=1.2,b=0.5", "--op", "stein", "--samples", "5"], capsys)
    assert code == 0
    assert json.loads(out)[0]["pass"] is True


def test_failed_assertion_exits_one(monkeypatch, capsys):
    import ncorlicz.cli as cli
    from ncorlicz.report import VerificationReport

    bad = VerificationReport("transform", {}, [], {"mode": "asserted"}, False)
    monkeypatch.setitem(cli.VERIFIERS, "transform", lambda cfg: bad)
    code, _, _ = call(["verify", "transform", "--phi", "power:p=2"], capsys)
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["verify", "khintchine", "--phi", "power:p=3", "--samples", "3", "--seed", "11", "--rademacher", "mc:256"],
    ["verify", "signs", "--phi", "powerlog:a=1.2,b=0.5", "--samples", "2", "--seed", "3"],
])
def test_byte_identical_subprocess(tmp_path, argv):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        subprocess.run([sys.executable, "-m", "ncorlicz.cli", *argv, "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
