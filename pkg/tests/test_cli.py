import csv
import json

import pytest

from qlga.cli import linear_fit, main, resource_rows


def data_rows(path):
    with open(path, newline="") as fh:
        return [r for r in csv.DictReader(line for line in fh if not line.startswith("#"))]


def test_compare_minimal(tmp_path, capsys):
    assert main(["compare", "--sites", "8", "--steps", "1", "--out", str(tmp_path)]) == 0
    rows = data_rows(tmp_path / "profile.csv")
    assert sorted({r["step"] for r in rows}) == ["0", "1"]
    assert all(r["quantum_mass"] == r["classical_mass"] for r in rows)
    svg = (tmp_path / "profile_t1.svg").read_text()
    assert 'stroke="blue"' in svg and 'stroke="red"' in svg and "seed: 0" in svg
    assert "profiles identical: True" in capsys.readouterr().out


def test_block_must_divide_sites(tmp_path, capsys):
    assert main(["compare", "--sites", "64", "--block", "33", "--out", str(tmp_path)]) == 2
    assert "block must divide sites" in capsys.readouterr().err


def test_capacity_exit_code(tmp_path):
    assert main(["run", "--sites", str(2**21), "--block", "1", "--steps", "0", "--out", str(tmp_path)]) == 3


@pytest.mark.parametrize("argv", [
    ["run", "--sites", "ten"],
    ["run", "--shots", "100", "--noise", "low", "--p1", "2"],
    ["run", "--region", "0.5"],
    ["run", "--noise", "low"],
    ["compare", "--sites", "16", "--snapshots", "999"],
    ["noise-sweep", "--levels", "bogus"],
    ["resources", "--n-min", "1"],
])
def test_config_errors(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_config_file_and_flag_priority(tmp_path):
    conf = tmp_path / "exp.conf"
    conf.write_text("# comment\nsites = 16\nsteps = 2\nblock = 4\nseed = 9\nmodel = d1q3-super\n")
    assert main(["run", "--config", str(conf), "--steps", "3", "--out", str(tmp_path)]) == 0
    side = json.loads((tmp_path / "profile.json").read_text())
    assert side["config"]["sites"] == 16 and side["config"]["steps"] == 3
    assert side["config"]["model"] == "d1q3-super" and side["seed"] == 9
    conf.write_text("sites\n")
    assert main(["run", "--config", str(conf), "--out", str(tmp_path)]) == 2


def test_run_is_reproducible(tmp_path):
    argv = ["run", "--sites", "16", "--steps", "3", "--shots", "200", "--noise", "mid",
            "--max-trajectories", "32", "--seed", "4"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--workers", "3", "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "profile.csv").read_bytes() == (tmp_path / "b" / "profile.csv").read_bytes()


def test_run_dumps_circuit(tmp_path):
    assert main(["run", "--sites", "16", "--steps", "1", "--dump-circuit", "collision", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "circuit_collision.txt").read_text()
    assert text.startswith("# config: ")


def test_noise_sweep(tmp_path, capsys):
    assert main(["noise-sweep", "--levels", "none", "--shots", "800", "--out", str(tmp_path)]) == 0
    rows = data_rows(tmp_path / "summary.csv")
    assert len(rows) == 1 and float(rows[0]["l1_mean"]) == 0.0
    assert (tmp_path / "cell_none_800.csv").exists()

    assert main(["noise-sweep", "--levels", "high", "--shots", "200", "--steps", "3",
                 "--max-trajectories", "16", "--out", str(tmp_path)]) == 0
    assert "FROZEN/NON-PROPAGATING" in capsys.readouterr().out


def test_resources(tmp_path, capsys):
    assert main(["resources", "--n-min", "3", "--n-max", "6", "--out", str(tmp_path)]) == 0
    assert "15(n-6)+149" in capsys.readouterr().out
    rows = data_rows(tmp_path / "resources.csv")
    assert len({r["cx_count"] for r in rows if r["stage"] == "collision"}) == 1
    assert main(["resources", "--model", "hpp", "--n-min", "2", "--n-max", "2", "--out", str(tmp_path)]) == 0
    assert {r["qubits"] for r in data_rows(tmp_path / "resources.csv")} == {"13"}


def test_resource_rows_and_fit():
    totals = [r["cx_count"] for r in resource_rows("d1q3-binary", range(6, 9)) if r["stage"] == "total"]
    slope, intercept, r2 = linear_fit([6, 7, 8], totals)
    assert r2 > 0.999 and slope > 0
    assert linear_fit([0, 1, 2], [1, 3, 5]) == pytest.approx((2.0, 1.0, 1.0))


def test_dump_circuit(tmp_path, capsys):
    assert main(["dump-circuit", "--sites", "8", "--stage", "mapping"]) == 0
    assert capsys.readouterr().out.strip()
    out = tmp_path / "c.txt"
    assert main(["dump-circuit", "--model", "hpp", "--sites", "16", "--stage", "step", "--decompose",
                 "--out", str(out)]) == 0
    gates = [ln for ln in out.read_text().splitlines() if ln and not ln.startswith("#")]
    assert all(len(ln.split("|")[1].split()) <= 1 for ln in gates if "|" in ln)
    assert main(["dump-circuit", "--sites", "12", "--stage", "collision"]) == 2
