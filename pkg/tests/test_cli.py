from pathlib import Path

import pandas as pd
import pytest
from click.testing import CliRunner
from loguru import logger
from pydantic import ValidationError

from cli.experiment import STRATEGIES, register_strategy
from cli.main import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, EXIT_UNEXPECTED, cli
from models.config import MaxQueries, StopSpec
from strategies.approximators import LocalApproximator
from strategies.base import Strategy
from utils.geometry import cube_geometry

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

LINE_CONFIG = """
level = 0.5
grid_n = 65
level_set_samples = 50

[function]
name = "affine"
d = 1
coeffs = [1.0]

[algorithm]
name = "bah"
c = 1.0
gamma = 1.0

[stop]
kind = "target_accuracy"
epsilon = 0.1

[sweep]
start = 0.2
factor = 0.5
count = 3

[nls]
start = 0.125
factor = 0.5
count = 5
grid_n = 512
"""

PLATEAU_CONFIG = """
level = 0.3

[function]
name = "constant"
d = 2
value = 0.3

[algorithm]
name = "bah"
c = 1.0
gamma = 1.0

[stop]
kind = "target_accuracy"
epsilon = 0.1
"""


@pytest.fixture(autouse=True)
def reset_logger():
    yield
    # Sinks point at the runner's captured stream, which is closed after invoke
    logger.remove()


@pytest.fixture
def runner():
    return CliRunner()


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_run_writes_trace_and_output_set(runner, tmp_path):
    result = runner.invoke(cli, ["--config", str(CONFIGS / "quadratic_bag.toml"), "--out", str(tmp_path), "run"])
    assert result.exit_code == EXIT_OK, result.output
    trace = pd.read_csv(tmp_path / "trace.csv")
    assert list(trace.columns) == ["iteration", "i_cubes_bisected", "cubes_retained", "cumulative_queries"]
    assert len(trace) == 5
    lines = (tmp_path / "output_set.txt").read_text().splitlines()
    assert lines[0].startswith("# level:0.0 mode:level_set iteration:5 dim:2")
    assert "status: completed" in result.output


def test_invalid_config_exits_with_config_code(runner, tmp_path):
    bad = _write(tmp_path, "bad.toml", LINE_CONFIG.replace("gamma = 1.0", "gamma = 1.0\nbeta = 0.0"))
    result = runner.invoke(cli, ["--config", bad, "--out", str(tmp_path), "run"])
    assert result.exit_code == EXIT_CONFIG
    result = runner.invoke(cli, ["--config", str(tmp_path / "missing.toml"), "run"])
    assert result.exit_code == EXIT_CONFIG
    result = runner.invoke(cli, ["run"])
    assert result.exit_code == EXIT_CONFIG


def test_cube_budget_exits_with_runtime_code(runner, tmp_path):
    text = (CONFIGS / "quadratic_bag.toml").read_text().replace("grid_n = 256", "grid_n = 256\nmax_cubes = 8")
    config = _write(tmp_path, "tight.toml", text)
    result = runner.invoke(cli, ["--config", config, "--out", str(tmp_path), "run"])
    assert result.exit_code == EXIT_RUNTIME
    assert "CubeBudgetExceeded" in result.output


def test_dry_run_prints_config_only(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(cli, ["--config", str(CONFIGS / "quadratic_bag.toml"), "--out", str(out), "--dry-run", "run"])
    assert result.exit_code == EXIT_OK
    assert '"name": "bag"' in result.output
    assert not out.exists()


def test_adversary_defeats_holder_strategy(runner, tmp_path):
    result = runner.invoke(cli, ["--config", str(CONFIGS / "adversary_holder.toml"), "--out", str(tmp_path),
                                 "adversary"])
    assert result.exit_code == EXIT_OK, result.output
    assert "verdict: AlgorithmDefeated" in result.output
    report = (tmp_path / "adversary.txt").read_text()
    assert "witness_z: 0.0" in report
    assert "witness_checked: true" in report


def test_verify_hand_written_output_set(runner, tmp_path):
    config = _write(tmp_path, "plateau.toml", PLATEAU_CONFIG)
    whole = _write(tmp_path, "whole.txt", "depth:0 idx:0,0 rho:0.0 vals:0.3\n")
    result = runner.invoke(cli, ["--config", config, "--grid", "33", "verify", "--output-set", whole])
    assert result.exit_code == EXIT_OK, result.output
    assert "Passed" in result.output

    nothing = _write(tmp_path, "nothing.txt", "depth:0 idx:0,0 rho:0.0 vals:5.0\n")
    result = runner.invoke(cli, ["--config", config, "--grid", "33", "verify", "--output-set", nothing])
    assert result.exit_code == EXIT_UNEXPECTED
    assert "Not an epsilon-approximation" in result.output


def test_verify_runs_the_engine(runner, tmp_path):
    config = _write(tmp_path, "line.toml", LINE_CONFIG)
    result = runner.invoke(cli, ["--config", config, "verify"])
    assert result.exit_code == EXIT_OK, result.output


def test_sweep_writes_csv(runner, tmp_path):
    config = _write(tmp_path, "line.toml", LINE_CONFIG)
    result = runner.invoke(cli, ["--config", config, "--out", str(tmp_path), "sweep"])
    assert result.exit_code == EXIT_OK, result.output
    sweep = pd.read_csv(tmp_path / "sweep.csv")
    assert list(sweep["epsilon"]) == pytest.approx([0.2, 0.1, 0.05])
    assert list(sweep["queries"]) == sorted(sweep["queries"])
    assert "slope:" in result.output


def test_sweep_needs_table(runner, tmp_path):
    config = _write(tmp_path, "plateau.toml", PLATEAU_CONFIG)
    result = runner.invoke(cli, ["--config", config, "sweep"])
    assert result.exit_code == EXIT_CONFIG


def test_nls_on_line_slice(runner, tmp_path):
    config = _write(tmp_path, "line.toml", LINE_CONFIG)
    result = runner.invoke(cli, ["--config", config, "--out", str(tmp_path), "nls"])
    assert result.exit_code == EXIT_OK, result.output
    nls = pd.read_csv(tmp_path / "nls.csv")
    assert list(nls["packing_count"]) == [2] * 5
    assert "slope:" in result.output


def test_pack_points_file(runner, tmp_path):
    points = _write(tmp_path, "points.csv", "x0,x1\n0.0,0.0\n0.1,0.1\n0.5,0.5\n")
    result = runner.invoke(cli, ["--out", str(tmp_path), "pack", "--points", points, "--scale", "0.2"])
    assert result.exit_code == EXIT_OK, result.output
    assert "packing count: 2" in result.output
    packing = pd.read_csv(tmp_path / "packing.csv")
    assert packing.to_numpy().tolist() == [[0.0, 0.0], [0.5, 0.5]]


def test_nls_on_circle(runner, tmp_path):
    result = runner.invoke(cli, ["--config", str(CONFIGS / "quadratic_bag.toml"), "--out", str(tmp_path), "nls"])
    assert result.exit_code == EXIT_OK, result.output
    assert len(pd.read_csv(tmp_path / "nls.csv")) == 5
    assert "slope:" in result.output


EDGE_CONFIG = """
level = 0.0
grid_n = 257
level_set_samples = 200

[function]
name = "affine"
d = 2
coeffs = [1.0, 0.0]

[algorithm]
name = "center"

[stop]
kind = "max_depth"
depth = 3

[sweep]
start = 0.25
factor = 0.5
count = 4
"""


class _CenterStrategy(Strategy):
    """Constant at the cube center with b = beta = 1"""
    name = "center"
    queries_per_cube = 1
    tolerance_b = 1.0
    tolerance_beta = 1.0

    def pick_points(self, cube):
        return cube_geometry(cube)[0][None, :]

    def build_approximator(self, cube, values):
        return LocalApproximator.constant(cube, values[0])


@pytest.fixture
def center_strategy():
    register_strategy("center", lambda spec, d: _CenterStrategy())
    yield
    STRATEGIES.pop("center", None)


def test_sweep_with_registered_strategy(runner, tmp_path, center_strategy):
    """{x = 0} keeps one column of 2^i cubes, so n(eps) grows like 1/eps"""
    config = _write(tmp_path, "edge.toml", EDGE_CONFIG)
    result = runner.invoke(cli, ["--config", config, "--out", str(tmp_path), "sweep"])
    assert result.exit_code == EXIT_OK, result.output
    sweep = pd.read_csv(tmp_path / "sweep.csv")
    # S(i) is the strip x <= 2^(1-i); eps = 2^-m first passes at i = m + 1
    assert list(sweep["queries"]) == [2 ** (m + 2) - 3 for m in range(2, 6)]
    slope = float(result.output.split("slope:")[1].split()[0])
    assert slope == pytest.approx(1.0, abs=0.15)


def test_unknown_strategy_id(runner, tmp_path):
    config = _write(tmp_path, "edge.toml", EDGE_CONFIG)
    result = runner.invoke(cli, ["--config", config, "run"])
    assert result.exit_code == EXIT_CONFIG


def test_stray_stop_values_rejected(runner, tmp_path):
    text = LINE_CONFIG.replace('kind = "target_accuracy"', 'kind = "max_depth"\ndepth = 3')
    config = _write(tmp_path, "stray.toml", text)
    result = runner.invoke(cli, ["--config", config, "run"])
    assert result.exit_code == EXIT_CONFIG
    with pytest.raises(ValidationError):
        StopSpec(kind="max_queries", queries=10, depth=2)
    assert StopSpec(kind="max_queries", queries=10).to_criterion() == MaxQueries(queries=10)


def test_repeated_runs_write_identical_files(runner, tmp_path):
    line = _write(tmp_path, "line.toml", LINE_CONFIG)
    for name in ("first", "second"):
        out = ["--out", str(tmp_path / name), "--seed", "7"]
        assert runner.invoke(cli, ["--config", str(CONFIGS / "quadratic_bag.toml")] + out + ["run"]).exit_code == EXIT_OK
        assert runner.invoke(cli, ["--config", line] + out + ["sweep"]).exit_code == EXIT_OK
    for filename in ("trace.csv", "output_set.txt", "sweep.csv"):
        assert (tmp_path / "first" / filename).read_bytes() == (tmp_path / "second" / filename).read_bytes()
