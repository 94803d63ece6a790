"""
Experiment factories
Turn a parsed experiment file into oracles, strategies, engine configs and harness algorithms
"""
import sys
from typing import Callable, Dict

from pydantic import ValidationError

from adversary.lower_bound import BAAlgorithm, EmptySetAlgorithm, FullCubeAlgorithm, QueryAlgorithm
from models.config import AlgorithmSpec, BAConfig, ExperimentConfig
from models.exceptions import ConfigError
from oracles.oracle import GRAD_HOLDER, Oracle, SmoothnessTag
from oracles.test_functions import lookup_function
from strategies.bag_strategy import bag_strategy
from strategies.bah_strategy import bah_strategy
from strategies.base import Strategy

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

StrategyFactory = Callable[[AlgorithmSpec, int], Strategy]

STRATEGIES: Dict[str, StrategyFactory] = {
    "bah": lambda spec, d: bah_strategy(spec.c, spec.gamma),
    "bag": lambda spec, d: bag_strategy(spec.c1, spec.gamma1, d),
}


def register_strategy(name: str, factory: StrategyFactory) -> None:
    """Make a custom strategy id usable from experiment files"""
    STRATEGIES[name] = factory


def load_experiment(path: str) -> ExperimentConfig:
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path} is not valid TOML: {e}") from e
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"{path}: {e}") from e


def build_oracle(cfg: ExperimentConfig) -> Oracle:
    try:
        return lookup_function(cfg.function.name, cfg.function.params)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"Function {cfg.function.name}: {e}") from e


def build_strategy(cfg: ExperimentConfig, d: int) -> Strategy:
    factory = STRATEGIES.get(cfg.algorithm.name)
    if factory is None:
        raise ConfigError(f"Unknown strategy id {cfg.algorithm.name!r}; known: {sorted(STRATEGIES)}")
    try:
        return factory(cfg.algorithm, d)
    except ValueError as e:
        raise ConfigError(f"Strategy {cfg.algorithm.name}: {e}") from e


def build_config(cfg: ExperimentConfig, strategy: Strategy) -> BAConfig:
    try:
        return strategy.default_config(
            level=cfg.level,
            stop=cfg.stop.to_criterion(),
            mode=cfg.mode,
            max_cubes=cfg.max_cubes,
            b=cfg.algorithm.b,
            beta=cfg.algorithm.beta,
        )
    except ValidationError as e:
        raise ConfigError(f"Engine configuration: {e}") from e


def smoothness_tag(cfg: ExperimentConfig) -> SmoothnessTag:
    """Class the adversary builds its bump for, from the algorithm constants"""
    spec = cfg.algorithm
    kind = cfg.adversary.smoothness if cfg.adversary else "holder"
    if kind == GRAD_HOLDER:
        if spec.c1 is None or spec.gamma1 is None:
            raise ConfigError("Gradient-Hölder adversary needs algorithm.c1 and algorithm.gamma1")
        return SmoothnessTag.grad_holder(spec.c1, spec.gamma1)
    if spec.c is None or spec.gamma is None:
        raise ConfigError("Hölder adversary needs algorithm.c and algorithm.gamma")
    return SmoothnessTag.holder(spec.c, spec.gamma)


def build_algorithm(cfg: ExperimentConfig, d: int) -> QueryAlgorithm:
    if cfg.algorithm.name == "full_cube":
        return FullCubeAlgorithm()
    if cfg.algorithm.name == "empty_set":
        return EmptySetAlgorithm()
    return BAAlgorithm(build_strategy(cfg, d))
