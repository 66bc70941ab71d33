"""End-to-end: generate the eight experiment CSVs through the simulator CLI,
render each to PNG, and check the chart contract (dimensions, threshold
line, read-only inputs)."""

import struct
import subprocess
import sys
from pathlib import Path

import pytest

from vtmplots import read_table, render, spec_for
from vtmplots.cli import main as cli_main
from vtmplots.csvdata import CsvFormatError
from vtmplots.render import build_figure
from vtmplots.specs import FIGURE_SPECS

SMALL_CONFIG = """
seed = 11
population.rsus = 30
population.vmus = 10
population.nodes = 5
experiments.reputation-decay.vmus = 12
experiments.reputation-decay.horizon = 8
experiments.coalition-distribution.node_counts = 3, 5
experiments.formation-time.rsu_counts = 20, 40
experiments.formation-time.node_counts = 3, 4, 5
experiments.formation-time.repetitions = 5
experiments.misbehavior-sweep.ratios = 0.1, 0.3
experiments.misbehavior-sweep.node_counts = 3, 5
experiments.misbehavior-sweep.seeds_per_cell = 1
experiments.misbehavior-sweep.vmus = 6
experiments.consensus-security.delegate_counts = 7, 10, 13
experiments.market.alphas = 0.3, 0.5, 0.7
"""

EXPERIMENTS = list(FIGURE_SPECS)


def png_dimensions(path: Path) -> tuple[int, int]:
    data = path.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n", "not a PNG file"
    width, height = struct.unpack(">II", data[16:24])
    return width, height


@pytest.fixture(scope="session")
def csv_dir(tmp_path_factory) -> Path:
    """All eight CSVs, produced through the simulator's own CLI."""
    root = tmp_path_factory.mktemp("csvs")
    config = root / "small.cfg"
    config.write_text(SMALL_CONFIG)
    for name in EXPERIMENTS:
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "vtmsim.harness.cli",
                "run",
                name,
                "--config",
                str(config),
                "--out",
                str(root),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, f"{name}: {proc.stderr}"
    return root


def test_all_eight_csvs_render_to_png(csv_dir, tmp_path):
    for name in EXPERIMENTS:
        csv_path = csv_dir / f"{name}.csv"
        assert csv_path.exists(), f"missing CSV for {name}"
        target = render(csv_path, tmp_path)
        assert target.exists(), f"no PNG for {name}"
        assert png_dimensions(target) == (1200, 800)
    print("PASS secondary-render-all-eight")


def test_reputation_chart_has_threshold_line(csv_dir):
    table = read_table(csv_dir / "reputation-decay.csv")
    fig = build_figure(table, spec_for(table))
    try:
        ax = fig.axes[0]
        constant_half = [
            line
            for line in ax.lines
            if len(set(line.get_ydata())) == 1 and float(line.get_ydata()[0]) == 0.5
        ]
        assert constant_half, "no horizontal 0.5 threshold line in the reputation chart"
    finally:
        import matplotlib.pyplot as plt

        plt.close(fig)


def test_rendering_is_read_only_and_stable(csv_dir, tmp_path):
    csv_path = csv_dir / "consensus-security.csv"
    before = csv_path.read_bytes()
    first = render(csv_path, tmp_path / "a")
    second = render(csv_path, tmp_path / "b")
    assert csv_path.read_bytes() == before
    assert png_dimensions(first) == png_dimensions(second) == (1200, 800)


def test_missing_column_is_named(csv_dir, tmp_path):
    broken = tmp_path / "reputation-decay.csv"
    content = (csv_dir / "reputation-decay.csv").read_text().replace("with_freshness", "with_x")
    broken.write_text(content)
    with pytest.raises(KeyError) as err:
        render(broken, tmp_path)
    assert "with_freshness" in str(err.value)


def test_malformed_preamble_rejected(tmp_path):
    bad = tmp_path / "consensus-security.csv"
    bad.write_text("# preamble without equals\ndelegates,safety_pm_0.1\n7,0.97\n")
    with pytest.raises(CsvFormatError):
        read_table(bad)


def test_unknown_experiment_rejected(tmp_path):
    other = tmp_path / "mystery.csv"
    other.write_text("# experiment = mystery\nx,y\n1,2\n")
    with pytest.raises(KeyError):
        render(other, tmp_path)


class TestCli:
    def test_render_all(self, csv_dir, tmp_path, capsys):
        assert cli_main(["render", "--all", str(csv_dir), "--out", str(tmp_path)]) == 0
        printed = capsys.readouterr().out.strip().splitlines()
        assert len(printed) == len(EXPERIMENTS)
        for name in EXPERIMENTS:
            assert (tmp_path / f"{name}.png").exists()

    def test_render_single(self, csv_dir, tmp_path):
        code = cli_main(
            ["render", "--csv", str(csv_dir / "market-demand.csv"), "--out", str(tmp_path)]
        )
        assert code == 0
        assert (tmp_path / "market-demand.png").exists()

    def test_requires_exactly_one_source(self, tmp_path):
        assert cli_main(["render", "--out", str(tmp_path)]) == 2

    def test_bad_csv_is_validation_error(self, tmp_path):
        bad = tmp_path / "reputation-decay.csv"
        bad.write_text("# broken preamble\nx\n1\n")
        assert cli_main(["render", "--csv", str(bad), "--out", str(tmp_path)]) == 2

    def test_empty_dir(self, tmp_path):
        empty = tmp_path / "none"
        empty.mkdir()
        assert cli_main(["render", "--all", str(empty), "--out", str(tmp_path)]) == 2
