#!/usr/bin/env python3
"""
Level set approximation command line
Runs experiments, accuracy sweeps, verification passes, adversary sessions and packing estimates
"""
import functools
import os
import sys
from typing import Optional

import click
import numpy as np
from loguru import logger

from adversary.lower_bound import run_indistinguishability
from engine.ba_engine import run_ba
from engine.budgets import worst_case_budget
from models.config import ExperimentConfig, NLSSpec
from models.exceptions import ConfigError, DegenerateInput, LevelSetError
from models.results import Verdict
from models.settings import get_settings
from utils.exporters import (nls_frame, points_frame, read_output_set, read_points, sweep_frame, write_frame,
                             write_output_set)
from utils.geometry import greedy_packing, unit_cube_packing_bound
from utils.logging import configure_logging
from verification.checker import check_eps_approximation
from verification.nls import inflated_packing_counts
from verification.rates import fit_rate, fit_sweep, sweep_sample_complexity
from .experiment import (build_algorithm, build_config, build_oracle, build_strategy, load_experiment,
                         smoothness_tag)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class Session:
    """Per-invocation options shared by every subcommand"""

    def __init__(self, config_path: Optional[str], out: Optional[str], grid: Optional[int],
                 seed: Optional[int], dry_run: bool):
        self.config_path = config_path
        self.out = out
        self.grid = grid
        self.seed = seed
        self.dry_run = dry_run

    def experiment(self) -> ExperimentConfig:
        if not self.config_path:
            raise ConfigError("This command needs --config")
        cfg = load_experiment(self.config_path)
        updates = {}
        if self.grid is not None:
            updates["grid_n"] = self.grid
        if self.seed is not None:
            updates["seed"] = self.seed
        return cfg.model_copy(update=updates) if updates else cfg

    def out_dir(self, cfg: Optional[ExperimentConfig] = None) -> str:
        return self.out or (cfg.output.dir if cfg else "results")


def guarded(command):
    """Map library errors onto exit codes 2 (configuration) and 3 (runtime)"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except ConfigError as e:
            click.echo(f"ConfigError: {e}", err=True)
            ctx.exit(EXIT_CONFIG)
        except LevelSetError as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"{type(e).__name__}: {e}", err=True)
            ctx.exit(EXIT_RUNTIME)
    return wrapper


def _dry_run(session: Session, cfg: ExperimentConfig) -> bool:
    if session.dry_run:
        click.echo(cfg.model_dump_json(indent=2))
    return session.dry_run


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Experiment file (TOML)")
@click.option("--out", type=click.Path(), default=None, help="Output directory")
@click.option("--grid", type=click.IntRange(min=2), default=None, help="Grid points per axis for checks")
@click.option("--seed", type=int, default=None, help="Seed for verification sampling")
@click.option("--dry-run", is_flag=True, help="Print the resolved configuration and exit")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.pass_context
def cli(ctx, config_path, out, grid, seed, dry_run, verbose):
    """Bisect-and-approximate level set experiments"""
    settings = get_settings()
    configure_logging("DEBUG" if verbose else settings.log_level, settings.log_file)
    ctx.obj = Session(config_path, out, grid, seed, dry_run)


@cli.command()
@click.pass_obj
@guarded
def run(session: Session):
    """Run the engine once; write trace.csv and output_set.txt"""
    cfg = session.experiment()
    if _dry_run(session, cfg):
        return
    oracle = build_oracle(cfg)
    strategy = build_strategy(cfg, oracle.dim)
    trace = run_ba(build_config(cfg, strategy), oracle, strategy)

    out = session.out_dir(cfg)
    write_frame(trace.to_frame(), os.path.join(out, "trace.csv"))
    write_output_set(trace.final_output_set, os.path.join(out, "output_set.txt"))
    final_cubes = len(trace.generations[-1])
    click.echo(f"iterations: {trace.last_iteration}  queries: {trace.total_queries}  "
               f"final cubes: {final_cubes}  status: {trace.status}")


@cli.command()
@click.pass_obj
@guarded
def sweep(session: Session):
    """Sample complexity over a geometric accuracy sweep, with the fitted rate"""
    cfg = session.experiment()
    if cfg.sweep is None:
        raise ConfigError("sweep needs a [sweep] table")
    if _dry_run(session, cfg):
        return
    oracle = build_oracle(cfg)
    strategy = build_strategy(cfg, oracle.dim)
    points = sweep_sample_complexity(
        build_config(cfg, strategy), oracle, strategy, cfg.sweep.values(),
        max_depth=cfg.sweep.max_depth, grid_n=cfg.grid_n, samples=cfg.level_set_samples, seed=cfg.seed,
    )
    write_frame(sweep_frame(points), os.path.join(session.out_dir(cfg), "sweep.csv"))
    for p in points:
        click.echo(f"eps={p.epsilon:<10g} queries={p.queries if p.queries is not None else 'unbounded'}")
    try:
        fit = fit_sweep(points)
    except DegenerateInput as e:
        click.echo(f"❌ No rate: {e}", err=True)
        sys.exit(EXIT_UNEXPECTED)
    click.echo(f"slope: {fit.slope:.4f}  r2: {fit.r_squared:.4f}")


@cli.command()
@click.option("--output-set", "output_set_path", type=click.Path(exists=True), default=None,
              help="Output-set dump to check instead of running the engine")
@click.option("--epsilon", type=float, default=None, help="Accuracy (defaults to the target_accuracy stop)")
@click.option("--skip-containment", is_flag=True, help="Excess check only (no analytic level set)")
@click.pass_obj
@guarded
def verify(session: Session, output_set_path, epsilon, skip_containment):
    """Check that an output set is an epsilon-approximation"""
    cfg = session.experiment()
    epsilon = epsilon if epsilon is not None else cfg.stop.epsilon
    if epsilon is None:
        raise ConfigError("verify needs --epsilon or a target_accuracy stop")
    if _dry_run(session, cfg):
        return
    oracle = build_oracle(cfg)
    if output_set_path:
        output_set = read_output_set(output_set_path, level=cfg.level, mode=cfg.mode)
    else:
        strategy = build_strategy(cfg, oracle.dim)
        output_set = run_ba(build_config(cfg, strategy), oracle, strategy).final_output_set

    verdict = check_eps_approximation(
        output_set, oracle, cfg.level, epsilon, grid_n=cfg.grid_n, samples=cfg.level_set_samples,
        rng=np.random.default_rng(cfg.seed), skip_containment=skip_containment,
    )
    click.echo(f"containment failures: {len(verdict.containment_failures)}  "
               f"excess failures: {len(verdict.excess_failures)}  points: {verdict.points_checked}")
    if not verdict.passed:
        click.echo("❌ Not an epsilon-approximation")
        sys.exit(EXIT_UNEXPECTED)
    click.echo("✅ Passed")


@cli.command()
@click.pass_obj
@guarded
def adversary(session: Session):
    """Indistinguishability run against a bump hidden where the algorithm never queried"""
    cfg = session.experiment()
    if cfg.adversary is None:
        raise ConfigError("adversary needs an [adversary] table")
    if _dry_run(session, cfg):
        return
    d = build_oracle(cfg).dim
    tag = smoothness_tag(cfg)
    report = run_indistinguishability(build_algorithm(cfg, d), cfg.adversary.epsilon, d, tag,
                                      budget=cfg.adversary.budget)

    path = os.path.join(session.out_dir(cfg), "adversary.txt")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(report.to_text())
    click.echo(report.to_text(), nl=False)
    click.echo(f"worst-case budget: {worst_case_budget(tag, d, cfg.adversary.epsilon):.6g}")
    if report.verdict == Verdict.ALGORITHM_DEFEATED and not report.witness_checked:
        click.echo("❌ Witness did not re-validate", err=True)
        sys.exit(EXIT_UNEXPECTED)


@cli.command()
@click.pass_obj
@guarded
def nls(session: Session):
    """Packing counts of inflated level sets and the fitted near-level-set dimension"""
    cfg = session.experiment()
    spec = cfg.nls or NLSSpec()
    if _dry_run(session, cfg):
        return
    oracle = build_oracle(cfg)
    scales = spec.values()
    grid_n = session.grid or spec.grid_n
    counts = inflated_packing_counts(oracle, cfg.level, scales, grid_n)
    write_frame(nls_frame(scales, counts), os.path.join(session.out_dir(cfg), "nls.csv"))
    fit = fit_rate(list(zip(scales, counts)))
    click.echo(f"slope: {fit.slope:.4f}  r2: {fit.r_squared:.4f}")


@cli.command()
@click.option("--points", "points_path", type=click.Path(exists=True), required=True,
              help="CSV with columns x0..x(d-1)")
@click.option("--scale", type=click.FloatRange(min=0.0, min_open=True), required=True, help="Packing scale r")
@click.pass_obj
@guarded
def pack(session: Session, points_path, scale):
    """Greedy r-packing of a points file, scanned in file order"""
    if session.dry_run:
        click.echo(f"points: {points_path}\nscale: {scale!r}")
        return
    try:
        points = read_points(points_path)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    result = greedy_packing(points, scale)
    dim = points.shape[1]
    write_frame(points_frame(result.witnesses, dim), os.path.join(session.out_dir(), "packing.csv"))
    click.echo(f"packing count: {result.count}  unit-cube bound: {unit_cube_packing_bound(dim, scale)}")


if __name__ == "__main__":
    cli()
