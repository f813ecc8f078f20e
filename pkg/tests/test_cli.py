import subprocess
import sys

import pytest

from capplan.cli import main
from capplan.report import CSV_HEADER


@pytest.fixture
def scenario(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text('{"sweep": {"from": 1, "to": 50}}')
    return path


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


def kv(out):
    return dict(line.split("=", 1) for line in out.splitlines() if "=" in line and not line.startswith("#"))


def test_sweep_writes_csv(capsys, scenario, tmp_path):
    out_csv = tmp_path / "base.csv"
    code, out, err = run(capsys, "sweep", "--scenario", scenario, "--from", 1, "--to", 50, "--out", out_csv)
    assert code == 0 and err == ""
    text = out_csv.read_text()
    assert len(text.splitlines()) == 51 and text.splitlines()[0] == CSV_HEADER


def test_sweep_is_byte_identical(capsys, scenario, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "sweep", "--scenario", scenario, "--out", a, "--plot", "d_total_s")
    run(capsys, "sweep", "--scenario", scenario, "--out", b, "--plot", "d_total_s")
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a_d_total_s.svg").read_bytes() == (tmp_path / "b_d_total_s.svg").read_bytes()


def test_help(capsys):
    code, out, _ = run(capsys, "help")
    assert code == 0 and "usage: capplan" in out


def test_threshold_processing_disabled(capsys, scenario):
    code, out, _ = run(capsys, "threshold", "--scenario", scenario, "--set", "modes.processing_mode=disabled")
    assert code == 0
    assert "upgrade_required_at=20" in out.splitlines()
    assert kv(out)["max_total_delay_s.first_violation"] == "20"


def test_threshold_upgraded_none(capsys, scenario):
    code, out, _ = run(capsys, "threshold", "--scenario", scenario, "--upgraded",
                       "--set", "modes.processing_mode=disabled")
    assert code == 0 and kv(out)["upgrade_required_at"] == "none"


def test_evaluate_record(capsys):
    code, out, _ = run(capsys, "evaluate", "--users", 10)
    rec = kv(out)
    assert code == 0
    assert rec["rho"] == "0.5004" and rec["utilization_pct"] == "20" and rec["saturated"] == "false"


def test_override_applies(capsys):
    code, out, _ = run(capsys, "evaluate", "--users", 50, "--set", "network.bandwidth_bps=1e9")
    assert code == 0 and kv(out)["rho"] == "0.2502"


def test_compare_outputs(capsys, scenario, tmp_path):
    prefix = tmp_path / "cmp"
    code, out, _ = run(capsys, "compare", "--scenario", scenario, "--out-prefix", prefix, "--plot", "queue_drops_pps")
    assert code == 0
    base = (tmp_path / "cmp_baseline.csv").read_text().splitlines()
    upg = (tmp_path / "cmp_upgraded.csv").read_text().splitlines()
    delta = (tmp_path / "cmp_delta.csv").read_text().splitlines()
    assert len(base) == len(upg) == len(delta) == 51
    assert upg[50].split(",")[1] == "0.2502"
    assert "<polyline" in (tmp_path / "cmp_queue_drops_pps.svg").read_text()


def test_validate_pass(capsys):
    code, out, err = run(capsys, "validate", "--users", 10, "--seed", 1, "--arrivals", 200000)
    rec = kv(out)
    assert code == 0, err
    assert rec["mean_wait_s.status"] == "pass" and rec["drop_rate_pps.status"] == "pass"
    assert rec["result"] == "pass" and rec["generator"] == "numpy.random.PCG64"


def test_validate_deterministic(capsys):
    first = run(capsys, "validate", "--users", 30, "--seed", 7, "--arrivals", 50000)
    second = run(capsys, "validate", "--users", 30, "--seed", 7, "--arrivals", 50000)
    assert first == second
    assert kv(first[1])["mean_wait_s.status"] == "skipped"


def test_validate_requires_seed(capsys):
    code, _, err = run(capsys, "validate", "--users", 10)
    assert code == 2 and "--seed" in err


@pytest.mark.parametrize("argv", [["bogus"], ["sweep", "--nope"], ["evaluate", "--users", "-3"], []])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and err


def test_unreadable_scenario_exit_1(capsys, tmp_path):
    code, out, err = run(capsys, "sweep", "--scenario", tmp_path / "missing.json")
    assert code == 1 and out == "" and "cannot read scenario" in err


@pytest.mark.parametrize(
    "extra, msg",
    [
        (["--set", "network.bogus=1"], "unknown key"),
        (["--set", "nosection.x=1"], "unknown section"),
        (["--set", "network.bandwidth_bps=-1"], "bandwidth_bps"),
        (["--from", "9", "--to", "3"], "sweep range"),
    ],
)
def test_validation_errors_exit_1(capsys, extra, msg):
    code, out, err = run(capsys, "sweep", *extra)
    assert code == 1 and out == "" and msg in err


def test_bad_scenario_syntax(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{oops")
    code, _, err = run(capsys, "threshold", "--scenario", p)
    assert code == 1 and "line 1" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "capplan", "help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "evaluate" in proc.stdout
