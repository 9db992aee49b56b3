import csv
import io
import json
import random
import subprocess
import sys

import numpy as np
import pytest

from eegapprox.cli import main
from eegapprox.explorer.sweep import CSV_FIELDS
from oracles import brute_force_front

HEADER = ",".join(CSV_FIELDS)


@pytest.fixture
def signal_csv(tmp_path):
    """2 channels, 4 epochs of 1024 samples at 256 Hz, labels by epoch parity."""
    rng = np.random.default_rng(0)
    t = np.arange(4096) / 256
    rows = ["F7-T7,F8-T8,label"]
    for i in range(4096):
        lab = (i // 1024) % 2
        f = 5.0 if lab == 0 else 20.0
        a = np.sin(2 * np.pi * f * t[i]) + 0.3 * rng.standard_normal()
        b = np.cos(2 * np.pi * f * t[i]) + 0.3 * rng.standard_normal()
        rows.append(f"{float(a)!r},{float(b)!r},{lab}")
    p = tmp_path / "sig.csv"
    p.write_text("\n".join(rows) + "\n")
    return p


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestExtract:
    def test_rows_and_columns(self, capsys, signal_csv):
        code, out, _ = _run(capsys, "extract", "-i", str(signal_csv), "--epoch-len", "1024",
                            "--profile", "seizure", "--level", "0")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["epoch", "channel", "delta", "theta", "alpha", "beta", "gamma"]
        assert len(rows) == 9
        assert all(len(r) == 7 for r in rows[1:])
        assert [r[0] for r in rows[1:]] == ["0", "0", "1", "1", "2", "2", "3", "3"]

    def test_bad_level_is_usage_error(self, capsys, signal_csv):
        with pytest.raises(SystemExit) as exc:
            main(["extract", "-i", str(signal_csv), "--epoch-len", "1024", "--level", "7"])
        assert exc.value.code == 2

    def test_deterministic(self, tmp_path, signal_csv):
        outs = []
        for k in range(2):
            dest = tmp_path / f"f{k}.csv"
            assert main(["extract", "-i", str(signal_csv), "--epoch-len", "1024", "--level", "3",
                         "-o", str(dest)]) == 0
            outs.append(dest.read_bytes())
        assert outs[0] == outs[1]

    def test_expert_flags_and_channel_subset(self, capsys, signal_csv):
        code, out, _ = _run(capsys, "extract", "-i", str(signal_csv), "--epoch-len", "2048",
                            "--overlap", "0.25", "--fft-len", "512", "--perforation-stride", "4",
                            "--channels", "F8-T8", "--profile", "stress")
        assert code == 0
        assert len(out.strip().splitlines()) == 3

    def test_parse_error_exit_2(self, capsys, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b\n1.0,abc\n")
        code, _, err = _run(capsys, "extract", "-i", str(p), "--epoch-len", "1")
        assert code == 2
        assert "row 2, column 2" in err
        assert len(err.strip().splitlines()) == 1

    def test_missing_file_exit_2(self, capsys, tmp_path):
        code, _, _ = _run(capsys, "extract", "-i", str(tmp_path / "nope.csv"), "--epoch-len", "8")
        assert code == 2

    def test_short_epochs_exit_2(self, capsys, signal_csv):
        code, _, err = _run(capsys, "extract", "-i", str(signal_csv), "--epoch-len", "512")
        assert code == 2 and "shorter" in err


SMALL_SYNTH = ["--synth-epochs", "6", "--synth-epoch-s", "8", "--synth-channels", "1",
               "--duration", "0.1", "--min-heartbeats", "10"]


class TestSweep:
    def test_single_platform(self, capsys, tmp_path):
        out = tmp_path / "s.csv"
        code, stdout, _ = _run(capsys, "sweep", *SMALL_SYNTH, "--clusters", "big", "--cores", "4",
                               "--freqs", "1400", "-o", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == HEADER
        assert len(lines) == 7
        assert len({ln.split(",")[4] for ln in lines[1:]}) == 1
        assert "power_w" in stdout and "6 records" in stdout
        manifest = json.loads((tmp_path / "s.csv.json").read_text())
        assert manifest["command"] == "sweep"
        assert manifest["output"]["schema"] == list(CSV_FIELDS)
        assert manifest["harness"]["measured_columns"] == ["perf_hb_s"]
        assert set(manifest["calibration"]["residual_w"]) == {"LITTLE", "big"}
        assert len(manifest["harness"]["host_measurements"]) == 6

    def test_input_file_with_labels(self, capsys, tmp_path, signal_csv):
        out = tmp_path / "s.csv"
        code, _, _ = _run(capsys, "sweep", "-i", str(signal_csv), "--epoch-len", "1024",
                          "--clusters", "LITTLE", "--cores", "1", "--freqs", "600", "--levels", "0,5",
                          "--duration", "0.1", "--truth", "labels", "-o", str(out))
        assert code == 0
        manifest = json.loads((tmp_path / "s.csv.json").read_text())
        assert len(manifest["inputs"]["sha256"]) == 64
        assert len(out.read_text().splitlines()) == 3

    def test_unlabeled_input_exit_2(self, capsys, tmp_path):
        p = tmp_path / "u.csv"
        p.write_text("a\n" + "\n".join("0.5" for _ in range(2048)) + "\n")
        code, _, err = _run(capsys, "sweep", "-i", str(p), "--epoch-len", "1024", "-o", str(tmp_path / "o.csv"))
        assert code == 2 and "label" in err

    def test_bad_grid_exit_2(self, capsys, tmp_path):
        code, _, _ = _run(capsys, "sweep", *SMALL_SYNTH, "--cores", "5", "-o", str(tmp_path / "o.csv"))
        assert code == 2

    def test_measurement_error_exit_3(self, capsys, tmp_path):
        code, _, err = _run(capsys, "sweep", *SMALL_SYNTH[:-2], "--min-heartbeats", "100000",
                            "--clusters", "big", "--cores", "1", "--freqs", "600", "--levels", "0",
                            "-o", str(tmp_path / "o.csv"))
        assert code == 3 and "heartbeats" in err

    def test_power_calibration_file(self, capsys, tmp_path):
        cal = tmp_path / "cal.csv"
        cal.write_text("cluster,cores,freq_mhz,watts\nbig,4,600,1.0\nbig,4,1400,2.0\n"
                       "LITTLE,4,600,0.2\nLITTLE,4,1400,0.4\n")
        out = tmp_path / "s.csv"
        code, _, _ = _run(capsys, "sweep", *SMALL_SYNTH, "--clusters", "big", "--cores", "4",
                          "--freqs", "1400", "--levels", "0", "--power-calibration", str(cal), "-o", str(out))
        assert code == 0
        assert float(out.read_text().splitlines()[1].split(",")[4]) == pytest.approx(2.0)


def _sweep_text(rows):
    return HEADER + "\n" + "".join(",".join(map(str, r)) + "\n" for r in rows)


class TestPareto:
    def test_single_row(self, capsys, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text(_sweep_text([("big", 1, 600, 0, 1.0, 10.0, 1.0, 5)]))
        code, out, err = _run(capsys, "pareto", str(p))
        assert code == 0
        assert out == p.read_text()
        assert "1 of 1" in err

    def test_one_dominator(self, capsys, tmp_path):
        p = tmp_path / "s.csv"
        rows = [("big", 1, 600, 0, 2.0, 5.0, 0.8, 5), ("big", 2, 600, 0, 1.0, 9.0, 1.0, 5),
                ("LITTLE", 1, 600, 0, 1.5, 8.0, 0.9, 5)]
        p.write_text(_sweep_text(rows))
        code, out, _ = _run(capsys, "pareto", str(p))
        assert code == 0
        assert out.splitlines() == [HEADER, "big,2,600,0,1.0,9.0,1.0,5"]

    def test_random_500_matches_oracle(self, capsys, tmp_path):
        r = random.Random(3)
        rows = [("big", r.randint(1, 4), 1400, r.randint(0, 5), r.uniform(0.2, 3.0), r.uniform(10, 500),
                 r.choice([0.7, 0.8, 0.9, 1.0]), 10) for _ in range(500)]
        p = tmp_path / "s.csv"
        p.write_text(_sweep_text(rows))
        code, out, _ = _run(capsys, "pareto", str(p))
        assert code == 0
        keep = brute_force_front([(x[4], x[5], x[6]) for x in rows])
        expected = [p.read_text().splitlines()[i + 1] for i in keep]
        assert out.splitlines()[1:] == expected

    def test_malformed_exit_2(self, capsys, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text(HEADER + "\nbig,1,600,0,oops,1,1,1\n")
        code, _, _ = _run(capsys, "pareto", str(p))
        assert code == 2


class TestPlotdata:
    @pytest.fixture
    def sweep_file(self, tmp_path):
        rows = [("LITTLE", 1, 600, lv, 0.25, 100.0 + lv, 1.0 - lv / 100, 10 - lv) for lv in range(3)]
        rows += [("big", 4, 1400, lv, 3.0, 900.0 + lv, 1.0 - lv / 100, 10 - lv) for lv in range(3)]
        p = tmp_path / "s.csv"
        p.write_text(_sweep_text(rows))
        return p

    def _blocks(self, out):
        blocks = [b for b in out.split("\n\n\n") if b.strip()]
        return [[ln.split() for ln in b.splitlines() if not ln.startswith("#")] for b in blocks]

    def test_two_columns(self, capsys, sweep_file):
        code, out, _ = _run(capsys, "plotdata", str(sweep_file), "--axes", "perf,level")
        assert code == 0
        blocks = self._blocks(out)
        assert len(blocks) == 2
        assert blocks[0] == [["100.0", "0"], ["101.0", "1"], ["102.0", "2"]]

    def test_three_columns(self, capsys, sweep_file):
        code, out, _ = _run(capsys, "plotdata", str(sweep_file), "--axes", "power,perf,accuracy")
        assert code == 0
        assert all(len(row) == 3 for b in self._blocks(out) for row in b)

    def test_empty_sweep(self, capsys, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text(HEADER + "\n")
        code, out, _ = _run(capsys, "plotdata", str(p), "--axes", "perf,level")
        assert code == 0 and out == ""

    def test_unknown_axis(self, capsys, sweep_file):
        code, _, err = _run(capsys, "plotdata", str(sweep_file), "--axes", "perf,voltage")
        assert code == 2 and "voltage" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "eegapprox", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "eegapprox" in res.stdout
