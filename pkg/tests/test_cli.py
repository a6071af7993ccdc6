import json
import subprocess
import sys
from pathlib import Path


def run_cli(*args, cwd=None, env=None):
    return subprocess.run(
        [sys.executable, "-m", "dival.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        env=env,
    )


def test_delta_golden_row(tmp_path):
    out = tmp_path / "out"
    res = run_cli("delta", "--X", "10", "--d", "3", "--a", "1", "--k", "2",
                  "--output_path", str(out))
    assert res.returncode == 0, res.stderr
    lines = (out / "delta.csv").read_text().splitlines()
    assert lines[0] == "d,a,delta_num,delta_den,abs_delta_float"
    assert lines[1] == "3,1,1,1,1.0"


def test_delta_all_residues(tmp_path):
    out = tmp_path / "out"
    res = run_cli("delta", "--X", "10", "--d", "3", "--a", "-1", "--k", "2",
                  "--output_path", str(out))
    assert res.returncode == 0
    rows = (out / "delta.csv").read_text().splitlines()[1:]
    assert rows == ["3,1,1,1,1.0", "3,2,-1,1,1.0"]


def test_family_true_parameters_empty(tmp_path):
    out = tmp_path / "fam"
    res = run_cli("family", "--X", "1000000", "--k", "4", "--a", "1",
                  "--output_path", str(out))
    assert res.returncode == 0, res.stderr
    rep = json.loads((out / "theorem1.json").read_text())
    assert rep["empty"] is True
    assert rep["scaled"] is False
    assert rep["member_count"] == 0


def test_byte_determinism_and_parallel(tmp_path):
    args = ["family", "--X", "20000", "--k", "4", "--varpi", "1/8", "--a", "1"]
    runs = {}
    for tag, extra in (("a", ["--thread_count", "1"]), ("b", ["--thread_count", "1"]),
                       ("c", ["--thread_count", "3"])):
        out = tmp_path / tag
        res = run_cli(*args, *extra, "--output_path", str(out))
        assert res.returncode == 0, res.stderr
        runs[tag] = (
            (out / "family.csv").read_bytes(),
            (out / "theorem1.json").read_bytes(),
        )
    assert runs["a"] == runs["b"]
    # parallel run differs only in the echoed thread_count inside JSON
    assert runs["a"][0] == runs["c"][0]


def test_variance_gamma_determinism(tmp_path):
    blobs = []
    for tag in ("x", "y"):
        out = tmp_path / tag
        res = run_cli("variance", "--mode", "gamma", "--k", "2",
                      "--c_grid", "0.25:1.0:0.25", "--samples", "20000",
                      "--output_path", str(out))
        assert res.returncode == 0, res.stderr
        blobs.append((out / "gamma.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_config_file_with_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("X=10\nk=2\nd=3\na=1\n# comment line\n")
    out = tmp_path / "out"
    res = run_cli("delta", "--config", str(cfg), "--a", "2", "--output_path", str(out))
    assert res.returncode == 0, res.stderr
    rows = (out / "delta.csv").read_text().splitlines()[1:]
    assert rows == ["3,2,-1,1,1.0"]  # override won


def test_invalid_config_field_message(tmp_path):
    res = run_cli("variance", "--mode", "nope", "--output_path", str(tmp_path / "o"))
    assert res.returncode == 2
    assert "mode" in res.stderr


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus=1\n")
    res = run_cli("delta", "--config", str(cfg), "--output_path", str(tmp_path / "o"))
    assert res.returncode == 2
    assert "bogus" in res.stderr


def test_failure_removes_partial_outputs(tmp_path):
    out = tmp_path / "bad"
    res = run_cli("delta", "--X", "10", "--d", "3", "--a", "0", "--k", "2",
                  "--output_path", str(out))
    assert res.returncode == 1
    assert not (out / "delta.csv").exists()
    assert not (out / "manifest.json").exists()


def test_manifest_lists_files_and_hash(tmp_path):
    out = tmp_path / "out"
    res = run_cli("expsum", "--kind", "kloosterman", "--a", "1", "--b", "2",
                  "--q", "97", "--output_path", str(out))
    assert res.returncode == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["files"] == ["expsum.csv"]
    assert len(manifest["config_sha256"]) == 64
    first = (out / "expsum.csv").read_text().splitlines()[1]
    assert first.startswith("kloosterman,1,2,97,")


def test_env_thread_fallback(tmp_path):
    import os

    env = dict(os.environ, DIVAL_THREADS="2")
    out = tmp_path / "out"
    res = run_cli("family", "--X", "20000", "--k", "4", "--varpi", "1/8", "--a", "1",
                  "--output_path", str(out), env=env)
    assert res.returncode == 0, res.stderr


def test_classify_subcommand(tmp_path):
    out = tmp_path / "out"
    res = run_cli("classify", "--nu", "0.5,0.3", "--varpi", "1/1168",
                  "--output_path", str(out))
    assert res.returncode == 0
    rep = json.loads((out / "classify.json").read_text())
    assert rep["case"] == "C"  # 0.5 lands inside the forbidden window


def test_sieve_subcommand_dump(tmp_path):
    out = tmp_path / "out"
    res = run_cli("sieve", "--kind", "moebius", "--lo", "1", "--hi", "100",
                  "--output_path", str(out))
    assert res.returncode == 0
    from dival.sieve import load_table

    table = load_table(out / "table.bin")
    assert table.kind == "moebius"
    assert table.lo == 1 and table.hi == 100
