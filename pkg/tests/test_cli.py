import json
import subprocess
import sys

import pytest

from supertroesch.cli import main

RUN = [sys.executable, "-m", "supertroesch.cli"]


def run_cli(*args, env=None):
    import os

    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(
        RUN + list(args), capture_output=True, text=True, env=full_env
    )


def test_cohomology_text_output():
    res = run_cli("cohomology", "--p", "3", "--r", "1", "--n", "1", "--space", "k^{1|1}")
    assert res.returncode == 0
    assert "H_[1]^0 = (1, 0)" in res.stdout
    assert "H_[1]^3 = (0, 1)" in res.stdout
    assert "normal: True" in res.stdout


def test_cohomology_zero_space():
    res = run_cli("cohomology", "--p", "3", "--r", "1", "--n", "1", "--space", "k^{0|0}")
    assert res.returncode == 0
    assert "H_[" not in res.stdout
    assert "normal: True" in res.stdout


def test_cohomology_r2_even_space():
    res = run_cli("cohomology", "--p", "3", "--r", "2", "--n", "1", "--space", "k^{0|1}")
    assert res.returncode == 0
    assert "H_[1]^36 = (0, 1)" in res.stdout


def test_decompose_output():
    res = run_cli("decompose", "--p", "3", "--r", "1", "--n", "1", "--space", "k^{0|1}")
    assert res.returncode == 0
    assert "block shift=3 length=1 parity=1 x1" in res.stdout
    assert "normal: True" in res.stdout
    res = run_cli(
        "decompose", "--p", "3", "--r", "1", "--n", "1", "--space", "k^{0|1}",
        "--format", "json",
    )
    payload = json.loads(res.stdout)
    assert payload["schema"] == 1
    assert payload["blocks"] == [
        {"shift": 3, "length": 1, "parity": 1, "multiplicity": 1}
    ]


def test_ext_table_json():
    res = run_cli(
        "ext-table", "--p", "3", "--r", "1", "--max-deg", "7", "--format", "json"
    )
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["schema"] == 1
    dims = {d["s"]: d["dim"] for d in payload["dims"]}
    assert [dims[s] for s in range(8)] == [1, 0, 1, 0, 1, 0, 1, 0]


def test_ring_output_contains_sign_line():
    res = run_cli("ring", "--p", "3", "--r", "1")
    assert res.returncode == 0
    assert "e(1)^3 = -1 * c∘cΠ" in res.stdout
    assert "FAIL" not in res.stdout


def test_verify_suite_kunneth():
    res = run_cli("verify", "--p", "3", "--suite", "kunneth")
    assert res.returncode == 0
    assert "PASS" in res.stdout
    assert "FAIL" not in res.stdout


def test_exit_codes():
    # usage error: malformed space
    res = run_cli("cohomology", "--p", "3", "--space", "nope")
    assert res.returncode == 64
    # usage error: unknown flag placement
    res = run_cli("cohomology", "--nope", "3")
    assert res.returncode == 64
    # budget exceeded
    res = run_cli(
        "cohomology", "--p", "3", "--n", "2", "--space", "k^{1|1}", "--budget", "2"
    )
    assert res.returncode == 2
    assert "budget" in res.stderr


def test_budget_env_var():
    res = run_cli(
        "cohomology", "--p", "3", "--n", "2", "--space", "k^{1|1}",
        env={"SUPERTROESCH_BUDGET": "2"},
    )
    assert res.returncode == 2


def test_deterministic_output():
    args = ["ext-table", "--p", "3", "--r", "1", "--max-deg", "9", "--format", "json"]
    a = run_cli(*args).stdout
    b = run_cli(*args).stdout
    assert a == b
    args = ["cohomology", "--p", "3", "--n", "2", "--space", "k^{1|1}", "--format", "csv"]
    assert run_cli(*args).stdout == run_cli(*args).stdout


def test_main_inprocess_exit():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--p", "3", "--suite", "epsilon"])
    assert exc.value.code == 0
