import json

import pytest

from shapefit.cli import main


@pytest.fixture
def cfg_path(tmp_path):
    cfg = {
        "function": {"name": "exp"},
        "Y": [],
        "A": [[0.5, 1]],
        "spec": {"family": "onesided", "r": 2, "k": 1, "m1": 1, "m2": None, "m3": 1},
        "n": 52,
        "grid": 1024,
        "seed": 0,
    }
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return p


def test_approximate_writes_artifacts(tmp_path, cfg_path, capsys):
    out = tmp_path / "out"
    code = main(["approximate", "--config", str(cfg_path), "--out", str(out),
                 "--emit-plot-data", "--figures"])
    assert code == 0
    assert (out / "spline.json").exists()
    assert (out / "errors.csv").exists()
    assert (out / "plotdata.csv").exists()
    assert (out / "approximate.png").exists()
    header = (out / "errors.csv").read_text().splitlines()[0]
    assert header == "i,z_i,z_im1,err,bound,ratio"
    payload = json.loads((out / "spline.json").read_text())
    assert payload["order"] == 3
    assert payload["provenance"]["spec"]["family"] == "onesided"


def test_approximate_deterministic(tmp_path, cfg_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["approximate", "--config", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["approximate", "--config", str(cfg_path), "--out", str(out2)]) == 0
    assert (out1 / "errors.csv").read_bytes() == (out2 / "errors.csv").read_bytes()
    assert (out1 / "spline.json").read_bytes() == (out2 / "spline.json").read_bytes()


def test_spec_rejected_exit_2(tmp_path):
    cfg = {"function": {"name": "exp"},
           "spec": {"family": "intertwining", "r": 0, "k": 2, "m1": 0, "m2": 0, "m3": 0}}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    assert main(["approximate", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_missing_registry_function_exit_2(tmp_path):
    cfg = {"function": {"name": "nope"},
           "spec": {"family": "onesided", "r": 1, "k": 2, "m1": -1, "m2": None, "m3": 0}}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    assert main(["approximate", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_density_failure_exit_2(tmp_path, cfg_path):
    cfg = json.loads(cfg_path.read_text())
    cfg["n"] = 12  # too few knots for order 3
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    assert main(["approximate", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_verify_exit_codes(tmp_path, cfg_path, capsys):
    out = tmp_path / "v"
    code = main(["verify", "--config", str(cfg_path), "--n", "52,104",
                 "--out", str(out), "--pointwise"])
    assert code in (0, 1)
    lines = (out / "verify.csv").read_text().splitlines()
    assert lines[0].startswith("n,sign_residual,hermite_rel,max_interval_ratio")
    assert "pointwise@1" in lines[0]
    assert len(lines) == 3


def test_negative_command(tmp_path):
    out = tmp_path / "neg"
    code = main(["negative", "lemma23", "--n", "8", "--out", str(out), "--figures"])
    assert code == 0
    lines = (out / "negative_lemma23.csv").read_text().splitlines()
    assert lines[0] == "family,n,param,Estar,normalizer,ratio,status"
    assert len(lines) == 10
    assert (out / "negative_lemma23.png").exists()


def test_negative_lem1(tmp_path):
    out = tmp_path / "neg1"
    code = main(["negative", "lem1", "--n", "1,2,3,4", "--out", str(out)])
    assert code == 0
    text = (out / "negative_lem1.csv").read_text()
    assert text.count("infeasible") == 4


def test_negative_unknown_family(tmp_path):
    assert main(["negative", "nope", "--out", str(tmp_path / "x")]) == 2


def test_kernels_command(tmp_path):
    out = tmp_path / "k"
    code = main(["kernels", "--n", "8,16", "--out", str(out), "--figures"])
    assert code == 0
    lines = (out / "kernels.csv").read_text().splitlines()
    assert len(lines) == 1 + 7 + 15
    assert (out / "kernels.png").exists()


def test_list_manifest(tmp_path, capsys):
    out = tmp_path / "m"
    assert main(["list", "--out", str(out)]) == 0
    manifest = json.loads((out / "families.json").read_text())
    assert len(manifest) >= 15
    assert {m["id"] for m in manifest} >= {"lemma23", "tmplem", "lem1"}
    printed = capsys.readouterr().out
    assert "lemma23" in printed


def test_threads_env_respected(tmp_path, monkeypatch):
    monkeypatch.setenv("SHAPEFIT_THREADS", "2")
    out = tmp_path / "neg2"
    code = main(["negative", "lemma28", "--n", "4", "--sweep", "0.25,0.125,0.0625,0.03125",
                 "--out", str(out)])
    assert code == 0
    lines = (out / "negative_lemma28.csv").read_text().splitlines()
    assert len(lines) == 5
