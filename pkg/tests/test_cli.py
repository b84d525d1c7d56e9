import json

import pytest

from sinr_coloring.cli import ExitCode, main
from sinr_coloring.storage import save_family, save_network


@pytest.fixture
def panel_b_file(tmp_path, panel_b_family):
    path = tmp_path / "panel_b.fam"
    save_family(path, panel_b_family)
    return path


@pytest.fixture
def panel_b_net_file(tmp_path, panel_b_net):
    path = tmp_path / "panel_b.json"
    save_network(path, panel_b_net)
    return path


def test_gen_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        code = main(["gen", "--nodes", "10", "--side-km", "1", "--seed", "7", "--out", str(out)])
        assert code == ExitCode.OK
    assert json.loads(a.read_text())["nodes"] == json.loads(b.read_text())["nodes"]
    assert "connection radius = 329.99" in capsys.readouterr().out


def test_gen_usage_errors():
    assert main(["gen", "--nodes", "1", "--side-km", "1", "--seed", "7"]) == ExitCode.USAGE
    assert main(["gen", "--nodes", "5", "--side-km", "-1", "--seed", "7"]) == ExitCode.USAGE
    assert main(["gen", "--nodes", "5", "--side-km", "1", "--seed", "7", "--beta", "0.5"]) == ExitCode.USAGE


def test_solve_classify_explicit_family(tmp_path, panel_b_file):
    out = tmp_path / "result.json"
    code = main(["solve", "--family", str(panel_b_file), "--mode", "classify", "--out", str(out)])
    assert code == ExitCode.OK
    doc = json.loads(out.read_text())
    assert doc["chi_star"] == "11/2"
    assert doc["chi_int"] == 6
    assert doc["verdict"] == "strict"
    assert doc["provenance"]["argv"][0] == "solve"


def test_solve_dual_explicit_family(tmp_path, panel_b_file):
    out = tmp_path / "dual.json"
    assert main(["solve", "--family", str(panel_b_file), "--mode", "dual", "--out", str(out)]) == ExitCode.OK
    assert json.loads(out.read_text())["z_star"] == "11/2"


def test_solve_network_modes(tmp_path, panel_b_net_file):
    for mode, key, value in [
        ("frac", "chi_star", "11/2"),
        ("int", "chi_int", 6),
        ("dual", "z_star", "11/2"),
        ("unrestricted", "chi_star", "1/1"),
    ]:
        out = tmp_path / f"{mode}.json"
        assert main(["solve", "--network", str(panel_b_net_file), "--mode", mode, "--out", str(out)]) == ExitCode.OK
        assert json.loads(out.read_text())[key] == value


def test_solve_empty_network_is_filtered(tmp_path, empty_net, capsys):
    path = tmp_path / "empty.json"
    save_network(path, empty_net)
    assert main(["solve", "--network", str(path)]) == ExitCode.FILTERED
    assert "empty" in capsys.readouterr().err


def test_solve_needs_an_instance():
    assert main(["solve", "--mode", "frac"]) == ExitCode.USAGE


def test_schedule(tmp_path, panel_b_file, capsys):
    out = tmp_path / "panel_b.sched"
    assert main(["schedule", "--family", str(panel_b_file), "--out", str(out)]) == ExitCode.OK
    printed = capsys.readouterr().out
    assert "T 11 q 2" in printed
    assert "T^1 q* = 12" in printed
    assert "\npreferable" in printed
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "T 11 q 2"
    assert len(lines) == 12


def test_schedule_single_link(tmp_path, single_link_net, capsys):
    path = tmp_path / "single.json"
    save_network(path, single_link_net)
    assert main(["schedule", "--network", str(path)]) == ExitCode.OK
    assert "T 1 q 1" in capsys.readouterr().out


def test_verify(tmp_path, panel_b_file, panel_b_net_file):
    sched = tmp_path / "panel_b.sched"
    assert main(["schedule", "--family", str(panel_b_file), "--out", str(sched)]) == ExitCode.OK
    assert main(["verify", "--network", str(panel_b_net_file), "--schedule", str(sched)]) == ExitCode.OK

    broken = tmp_path / "broken.sched"
    lines = sched.read_text().splitlines()
    broken.write_text("\n".join(l for l in lines if not l.startswith("10 ")) + "\n")
    assert main(["verify", "--family", str(panel_b_file), "--schedule", str(broken)]) == ExitCode.REJECTED


def test_sweep(tmp_path):
    out_dir = tmp_path / "sweep"
    args = ["sweep", "--nodes", "10", "--sides-km", "1,2", "--instances", "3", "--seed", "5", "--out-dir", str(out_dir)]
    assert main(args + ["--instances-csv"]) == ExitCode.OK
    first = (out_dir / "sweep.csv").read_bytes()
    assert (out_dir / "instances.csv").exists()
    assert (out_dir / "sweep.md").exists()

    assert main(args) == ExitCode.OK
    assert (out_dir / "sweep.csv").read_bytes() == first


def test_sweep_rejects_zero_instances(tmp_path):
    assert main(["sweep", "--instances", "0", "--out-dir", str(tmp_path)]) == ExitCode.USAGE


def test_sweep_rejects_link_limit_above_bitset_width(tmp_path, monkeypatch):
    args = ["sweep", "--nodes", "40", "--sides-km", "1", "--instances", "1", "--out-dir", str(tmp_path)]
    assert main(args + ["--max-links", "1000"]) == ExitCode.USAGE
    monkeypatch.setenv("SINR_MAX_LINKS", "1000")
    assert main(args) == ExitCode.USAGE


def test_solve_flags_approximate_feasibility(tmp_path, panel_b_net_file):
    net_file = tmp_path / "cubic.json"
    gen = ["gen", "--nodes", "4", "--side-km", "0.3", "--seed", "3", "--alpha", "3", "--out", str(net_file)]
    assert main(gen) == ExitCode.OK
    out = tmp_path / "cubic_result.json"
    assert main(["solve", "--network", str(net_file), "--mode", "frac", "--out", str(out)]) == ExitCode.OK
    assert json.loads(out.read_text())["approximate_feasibility"] is True

    exact = tmp_path / "exact.json"
    assert main(["solve", "--network", str(panel_b_net_file), "--mode", "frac", "--out", str(exact)]) == ExitCode.OK
    assert json.loads(exact.read_text())["approximate_feasibility"] is False
