"""CLI surface tests: files, exit codes, determinism and chart rendering."""

import json
from pathlib import Path

import pytest

from awtcpolar.cli import main
from awtcpolar.experiments import read_aggregates_csv, read_trials_csv
from awtcpolar.svgplot import render_line_chart

DATA = Path(__file__).parent / "data"


def run(*argv):
    return main([str(a) for a in argv])


class TestConstruct:
    def test_writes_report_and_partition(self, tmp_path, capsys):
        code = run("construct", "--n", 10, "--beta", 0.25, "--rho-w", 0.2,
                   "--rho-r", 0.4, "--out-dir", tmp_path)
        assert code == 0
        captured = capsys.readouterr().out
        assert "0.400000" in captured  # capacity at the tested fractions
        assert (tmp_path / "partition.csv").exists()
        report = (tmp_path / "rate_report.csv").read_text().splitlines()
        header = report[0].split(",")
        values = dict(zip(header, report[1].split(",")))
        assert values["secrecy_capacity"] == "0.4"
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["command"] == "construct"
        assert manifest["parameters"]["n"] == 10

    def test_repeat_runs_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run("construct", "--n", 8, "--beta", 0.3, "--rho-w", 0.2,
                       "--rho-r", 0.4, "--out-dir", out) == 0
        for name in ("partition.csv", "rate_report.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_validation_error_exits_one(self, tmp_path, capsys):
        code = run("construct", "--n", 8, "--rho-w", 0.6, "--rho-r", 0.5,
                   "--out-dir", tmp_path)
        assert code == 1
        assert "rho_w + rho_r" in capsys.readouterr().err

    def test_missing_n_exits_one(self, tmp_path):
        assert run("construct", "--out-dir", tmp_path) == 1

    def test_infeasible_exits_two(self, tmp_path, capsys):
        code = run("construct", "--n", 5, "--beta", 0.4, "--rho-w", 0.2,
                   "--rho-r", 0.4, "--out-dir", tmp_path)
        assert code == 2
        assert "infeasible" in capsys.readouterr().err

    def test_unknown_flag_exits_one(self, capsys):
        assert run("construct", "--frobnicate") == 1


class TestConfigFile:
    def test_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 6, "beta": 0.3, "rho_w": 0.1, "rho_r": 0.1}))
        code = run("construct", "--config", cfg, "--rho-w", 0.2,
                   "--out-dir", tmp_path / "out")
        assert code == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["parameters"]["rho_w"] == 0.2  # flag wins
        assert manifest["parameters"]["beta"] == 0.3  # file fills the rest

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 6, "bogus": 1}))
        assert run("construct", "--config", cfg, "--out-dir", tmp_path / "out") == 1


class TestSweepCommands:
    def test_bounds_outputs(self, tmp_path):
        code = run("bounds", "--n-list", "5,6", "--beta-list", "0.25,0.3",
                   "--blocks", 10, "--trials", 4, "--seed", 3,
                   "--out-dir", tmp_path)
        assert code == 0
        with open(tmp_path / "trials.csv", newline="") as fh:
            rows = read_trials_csv(fh)
        assert len(rows) == 16
        assert {r.kind for r in rows} == {"bounds"}
        with open(tmp_path / "aggregates.csv", newline="") as fh:
            aggs = read_aggregates_csv(fh)
        assert {a.metric for a in aggs} == {"ber_bound", "leak_bound"}
        assert (tmp_path / "ber_bound.svg").exists()
        assert (tmp_path / "leak_bound.svg").exists()

    def test_simulate_outputs(self, tmp_path):
        code = run("simulate", "--n", 5, "--beta", 0.3, "--blocks", 3,
                   "--trials", 3, "--seed", 1, "--out-dir", tmp_path)
        assert code == 0
        with open(tmp_path / "trials.csv", newline="") as fh:
            rows = read_trials_csv(fh)
        assert all(r.kind == "end_to_end" for r in rows)
        assert all(r.message_bits is not None for r in rows)
        assert (tmp_path / "bob_ber.svg").exists()
        assert (tmp_path / "eve_ber.svg").exists()

    def test_no_plot_suppresses_svg(self, tmp_path):
        code = run("bounds", "--n", 5, "--beta", 0.3, "--trials", 2,
                   "--no-plot", "--out-dir", tmp_path)
        assert code == 0
        assert not list(tmp_path.glob("*.svg"))

    def test_zero_trials_exits_one(self, tmp_path):
        assert run("bounds", "--n", 5, "--trials", 0, "--out-dir", tmp_path) == 1

    def test_all_cells_infeasible_exits_two(self, tmp_path):
        code = run("bounds", "--n", 5, "--beta", 0.4, "--rho-w", 0.2,
                   "--rho-r", 0.4, "--trials", 2, "--out-dir", tmp_path)
        assert code == 2

    def test_partially_infeasible_continues(self, tmp_path, capsys):
        code = run("bounds", "--n", 5, "--beta-list", "0.3,0.4", "--trials", 2,
                   "--no-plot", "--out-dir", tmp_path)
        assert code == 0
        assert "skipped infeasible" in capsys.readouterr().out
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["infeasible_cells"][0]["beta"] == 0.4

    def test_seed_reproducibility_across_parallelism(self, tmp_path):
        outs = []
        for name, par in (("p1", 1), ("p8", 8)):
            out = tmp_path / name
            assert run("bounds", "--n-list", "5,6", "--beta", 0.3, "--trials", 6,
                       "--seed", 11, "--parallelism", par, "--no-plot",
                       "--out-dir", out) == 0
            outs.append((out / "trials.csv").read_bytes())
        assert outs[0] == outs[1]


class TestPlotCommand:
    def test_rerender_from_aggregates(self, tmp_path):
        src = tmp_path / "sweep"
        assert run("simulate", "--n", 5, "--beta", 0.3, "--trials", 2,
                   "--no-plot", "--out-dir", src) == 0
        out = tmp_path / "charts"
        assert run("plot", "--aggregates", src / "aggregates.csv",
                   "--out-dir", out) == 0
        assert (out / "bob_ber.svg").exists()

    def test_missing_file_exits_one(self, tmp_path):
        assert run("plot", "--aggregates", tmp_path / "nope.csv",
                   "--out-dir", tmp_path) == 1


class TestSvg:
    def test_golden_chart(self):
        series = [
            ("beta=0.2", [(8.0, 0.125), (10.0, 0.015), (12.0, 0.0)]),
            ("beta=0.3", [(8.0, 0.5), (10.0, 0.1), (12.0, 0.004)]),
        ]
        svg = render_line_chart(series, title="golden chart", x_label="log2 N",
                                y_label="metric", log_y=True)
        assert svg == (DATA / "golden_chart.svg").read_text()

    def test_log_axis_clamps_zeros(self):
        svg = render_line_chart([("a", [(1.0, 0.0), (2.0, 1.0)])], title="t",
                                x_label="x", y_label="y", log_y=True)
        assert 'fill="white"' in svg  # hollow marker for the clamped point

    def test_all_zero_series_falls_back_to_linear(self):
        svg = render_line_chart([("a", [(1.0, 0.0), (2.0, 0.0)])], title="t",
                                x_label="x", y_label="y", log_y=True)
        assert "1e" not in svg

    def test_empty_series_rejected(self):
        with pytest.raises(ValueError):
            render_line_chart([], title="t", x_label="x", y_label="y")
