"""Command-line interface tests (run in-process through main())."""

import json

import numpy as np
import pytest

from afdm.channel import ChannelRealization
from afdm.cli import main


def strip_wall(csv_text: str) -> str:
    return "\n".join(",".join(line.split(",")[:-1])
                     for line in csv_text.splitlines())


class TestBerCommand:
    def test_writes_csv_and_figure(self, tmp_path):
        out = tmp_path / "run.csv"
        code = main(["ber", "--snr", "0,10", "--frames", "5", "--seed", "3",
                     "--detector", "lmmse_band", "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("snr_db,detector,")
        assert len(lines) == 3
        assert (tmp_path / "run.png").exists()

    def test_no_plot_skips_figure(self, tmp_path):
        out = tmp_path / "run.csv"
        code = main(["ber", "--snr", "10", "--frames", "3", "--out", str(out),
                     "--no-plot"])
        assert code == 0
        assert not (tmp_path / "run.png").exists()

    def test_json_mirror(self, tmp_path):
        out = tmp_path / "run.csv"
        code = main(["ber", "--snr", "10", "--frames", "3", "--out", str(out),
                     "--json", "--no-plot"])
        assert code == 0
        parsed = json.loads((tmp_path / "run.json").read_text())
        assert parsed[0]["frames"] == 3

    def test_byte_identical_reruns(self, tmp_path):
        args = ["ber", "--snr", "5,15", "--frames", "8", "--seed", "42",
                "--detector", "mrc_dfe", "--no-plot"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert strip_wall(out1.read_text()) == strip_wall(out2.read_text())

    def test_config_file_with_flag_override(self, tmp_path):
        cfg_file = tmp_path / "exp.cfg"
        cfg_file.write_text("frames = 4\nsnr_db = 10\nseed = 1\n",
                            encoding="utf-8")
        out = tmp_path / "run.csv"
        code = main(["ber", "--config", str(cfg_file), "--frames", "2",
                     "--out", str(out), "--no-plot"])
        assert code == 0
        assert ",2," in out.read_text().split("\n")[1]

    def test_bad_config_returns_nonzero(self, tmp_path):
        cfg_file = tmp_path / "exp.cfg"
        cfg_file.write_text("detector = nonsense\n", encoding="utf-8")
        assert main(["ber", "--config", str(cfg_file), "--no-plot"]) == 1

    def test_stdout_when_no_out(self, capsys):
        code = main(["ber", "--snr", "10", "--frames", "2", "--no-plot"])
        assert code == 0
        captured = capsys.readouterr()
        assert captured.out.startswith("snr_db,")


class TestEpsilonCommand:
    def test_epsilon_sweep_csv(self, tmp_path):
        out = tmp_path / "eps.csv"
        code = main(["epsilon", "--snr", "20", "--frames", "5", "--seed", "2",
                     "--eps", "1,0.01", "--out", str(out), "--no-plot"])
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("epsilon,")
        assert len(lines) == 3

    def test_epsilon_figure(self, tmp_path):
        out = tmp_path / "eps.csv"
        code = main(["epsilon", "--snr", "20", "--frames", "3",
                     "--eps", "1,0.1", "--out", str(out)])
        assert code == 0
        assert (tmp_path / "eps.png").exists()


class TestChannelDump:
    def test_dump_round_trips(self, tmp_path):
        out = tmp_path / "chan.json"
        code = main(["channel", "dump", "--seed", "9", "--delays", "0,6,12",
                     "--nu-max", "1.0", "--out", str(out)])
        assert code == 0
        ch = ChannelRealization.from_json(out.read_text())
        assert ch.n_paths == 3
        np.testing.assert_array_equal(ch.delays, [0, 6, 12])
        assert ch.is_integer_doppler()

    def test_dump_fractional_to_stdout(self, capsys):
        code = main(["channel", "dump", "--seed", "4", "--delays", "0,1",
                     "--fractional"])
        assert code == 0
        rec = json.loads(capsys.readouterr().out)
        assert len(rec["paths"]) == 2

    def test_dump_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["channel", "dump", "--seed", "11", "--out", str(a)])
        main(["channel", "dump", "--seed", "11", "--out", str(b)])
        assert a.read_text() == b.read_text()
