import csv
import json
import subprocess
import sys

import pytest

from rwre_slowdown.cli import SUBCOMMANDS, build_parser, main

CONFIG = """
seed = 4321

[omega_law]
variant = "uniform"
a = 0.6
b = 0.8

[tail_law]
variant = "pareto"
params = { alpha = 2.0 }

[experiment]
v_frac = 0.5
t_grid = [10, 15]
n_envs = 2
mc_replicas = 200
oracle_t_max = 20

[tail_check]
n_grid = [25, 50]
replicas = 5000

[asymptotics]
t_grid = [1e4, 1e6]
"""


@pytest.fixture()
def config_file(tmp_path):
    p = tmp_path / "cfg.toml"
    p.write_text(CONFIG)
    return p


def run_cli(args):
    return subprocess.run(
        [sys.executable, "-m", "rwre_slowdown.cli", *args], capture_output=True, text=True
    )


def test_help_lists_all_flags():
    for sub in SUBCOMMANDS:
        out = run_cli([sub, "--help"])
        assert out.returncode == 0
        for flag in ("--config", "--seed", "--out", "--jobs", "--format"):
            assert flag in out.stdout, (sub, flag)


def test_top_level_help_lists_subcommands():
    out = run_cli(["--help"])
    assert out.returncode == 0
    for sub in SUBCOMMANDS:
        assert sub in out.stdout


def test_unknown_subcommand_rejected():
    out = run_cli(["frobnicate"])
    assert out.returncode == 2


def test_malformed_toml_exit_2_no_outputs(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("not = [toml")
    outdir = tmp_path / "out"
    rc = main(["speed", "--config", str(bad), "--out", str(outdir)])
    assert rc == 2
    assert not outdir.exists()


def test_error_stream_is_json(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("not = [toml")
    rc = main(["speed", "--config", str(bad), "--out", str(tmp_path)])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "config"


def test_numeric_error_exit_3(tmp_path, config_file):
    # weibull alpha=1 satisfies the Cramer condition, so tail-check rejects it
    cfg = tmp_path / "w.toml"
    cfg.write_text(CONFIG.replace('"pareto"', '"weibull"').replace("alpha = 2.0", "alpha = 1.0"))
    rc = main(["tail-check", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert rc == 3


def test_asymptotics_emits_h(tmp_path, config_file):
    cfg = tmp_path / "w1.toml"
    cfg.write_text(CONFIG.replace('"pareto"', '"weibull"').replace("alpha = 2.0", "alpha = 1.0"))
    outdir = tmp_path / "rates"
    assert main(["asymptotics", "--config", str(cfg), "--out", str(outdir)]) == 0
    rows = (outdir / "rates.csv").read_text().splitlines()
    # the law column is quoted JSON with embedded commas; use a real CSV parser
    first = next(csv.reader([rows[2]]))
    assert abs(float(first[0]) - 1e4) < 1e-9
    h = float(first[2])
    assert abs(h - 104.7112) < 1e-3


def test_sample_env_and_meta(tmp_path, config_file):
    outdir = tmp_path / "env"
    assert main(["sample-env", "--config", str(config_file), "--out", str(outdir),
                 "--lo", "-5", "--hi", "5"]) == 0
    assert (outdir / "env_window.csv").exists()
    meta = json.loads((outdir / "run_meta.json").read_text())
    assert meta["command"] == "sample-env" and meta["seed"] == 4321


def test_byte_identical_reruns(tmp_path, config_file):
    outs = []
    for name in ("a", "b"):
        outdir = tmp_path / name
        assert main(["slowdown-quenched", "--config", str(config_file), "--out", str(outdir)]) == 0
        assert main(["tail-check", "--config", str(config_file), "--out", str(outdir)]) == 0
        blob = b""
        for f in ("quenched.csv", "quenched.jsonl", "tail.csv", "tail.jsonl", "tail_fit.json"):
            blob += (outdir / f).read_bytes()
        outs.append(blob)
    assert outs[0] == outs[1]


def test_format_flag(tmp_path, config_file):
    outdir = tmp_path / "fmt"
    assert main(["slowdown-quenched", "--config", str(config_file), "--out", str(outdir),
                 "--format", "csv"]) == 0
    assert (outdir / "quenched.csv").exists()
    assert not (outdir / "quenched.jsonl").exists()


def test_seed_override(tmp_path, config_file):
    a = tmp_path / "s1"
    b = tmp_path / "s2"
    assert main(["sample-env", "--config", str(config_file), "--out", str(a),
                 "--lo", "0", "--hi", "5", "--seed", "111"]) == 0
    assert main(["sample-env", "--config", str(config_file), "--out", str(b),
                 "--lo", "0", "--hi", "5", "--seed", "222"]) == 0
    assert (a / "env_window.csv").read_text() != (b / "env_window.csv").read_text()


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
