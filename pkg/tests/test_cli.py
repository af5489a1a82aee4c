from __future__ import annotations

import csv
import io
import json
import math

import pytest

from conclusive.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_json(capsys):
    code, out, _ = _run(capsys, "run", "--protocol", "mh", "--beta", "0.6", "--seed", "7")
    assert code == 0
    doc = json.loads(out)
    assert {"bits", "success", "fidelity"} <= set(doc)
    assert doc["bits"] == {"alice_to_bob": 3}
    assert math.isclose(doc["channel"]["alpha"], 0.8)


def test_run_defaults_to_maximal_channel(capsys):
    code, out, _ = _run(capsys, "run", "--protocol", "hbb", "--seed", "1")
    doc = json.loads(out)
    assert code == 0 and doc["success"] and doc["fidelity"] == 1.0


def test_run_custom_input_and_csv(capsys):
    code, out, _ = _run(capsys, "run", "--protocol", "standard", "--a", "0.6", "--b", "0.8j", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1
    assert rows[0]["success"] == "True"


def test_env_sets_default_format(capsys, monkeypatch):
    monkeypatch.setenv("CONCLUSIVE_FORMAT", "csv")
    code, out, _ = _run(capsys, "sweep", "--protocols", "mh", "--betas", "0.5")
    assert code == 0 and out.startswith("protocol,beta,p_success")


def test_sweep_csv(capsys):
    code, out, _ = _run(capsys, "sweep", "--protocols", "mh,qact1,standard", "--betas", "0.3,max", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["protocol", "beta", "p_success", "expected_bits", "fidelity_given_success"]
    assert len(rows) == 6
    by = {(r["protocol"], r["beta"][:3]): r for r in rows}
    assert float(by[("mh", "0.3")]["p_success"]) == pytest.approx(0.18)
    # standard on a non-maximal channel never succeeds: empty conditional fidelity
    assert by[("standard", "0.3")]["fidelity_given_success"] == ""
    assert float(by[("standard", "0.7")]["p_success"]) == 1.0


@pytest.mark.parametrize("betas", ["0.9", "0", "-0.1", "abc", ""])
def test_sweep_rejects_bad_grid(capsys, betas):
    code, _, err = _run(capsys, "sweep", "--betas", betas)
    assert code == 2 and "error" in err


def test_sample_is_byte_identical(capsys, tmp_path):
    args = ["sample", "--protocol", "qact1", "--beta", "0.5", "--shots", "5000", "--seed", "3"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["verdict"] == "PASS"
    assert doc["exact_probability"] == 0.5


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--protocol", "nope"],
        ["run", "--protocol", "mh", "--alpha", "0.5", "--beta", "0.5"],
        ["run", "--protocol", "mh", "--beta", "0.9"],
        ["run", "--protocol", "mh", "--a", "1"],
        ["run", "--protocol", "mh", "--a", "1", "--b", "1"],
        ["run", "--protocol", "mh", "--a", "x", "--b", "1"],
        ["sample", "--protocol", "mh", "--shots", "0"],
        ["sweep", "--protocols", "mh,zzz"],
    ],
)
def test_config_errors_exit_2(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 2
    assert err.startswith("conclusive: error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["run"])
    assert e.value.code == 2


def test_sweep_secret_sharing_variants_agree(capsys):
    code, out, _ = _run(capsys, "sweep", "--protocols", "css1_mh,css1_qact1,css2,css3", "--betas", "0.2,0.45,0.6")
    rows = json.loads(out)
    by_beta = {}
    for r in rows:
        by_beta.setdefault(r["beta"], set()).add(r["p_success"])
    assert code == 0
    assert all(len(v) == 1 for v in by_beta.values())


def test_sample_single_shot(capsys):
    code, out, _ = _run(capsys, "sample", "--protocol", "mh", "--beta", "0.5", "--shots", "1", "--seed", "2")
    doc = json.loads(out)
    assert code == 0 and doc["success_frequency"] in (0.0, 1.0)


def test_sample_csv(capsys):
    code, out, _ = _run(capsys, "sample", "--protocol", "css3", "--beta", "0.6", "--shots", "1000", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["verdict"] == "PASS"
