"""
Configuration models
Engine configuration (BAConfig) and the experiment file schema used by the CLI
"""
from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Mode(str, Enum):
    """Which set is approximated: {f=a}, {f<=a} or {f>=a}"""
    LEVEL_SET = "level_set"
    SUBLEVEL = "sublevel"
    SUPERLEVEL = "superlevel"


class TargetAccuracy(BaseModel):
    """Run until the published set is guaranteed to be an epsilon-approximation"""
    model_config = ConfigDict(frozen=True)
    kind: Literal["target_accuracy"] = "target_accuracy"
    epsilon: float = Field(gt=0.0)


class MaxDepth(BaseModel):
    """Run exactly this many iterations"""
    model_config = ConfigDict(frozen=True)
    kind: Literal["max_depth"] = "max_depth"
    depth: int = Field(ge=0)


class MaxQueries(BaseModel):
    """Stop right after the given number of queries"""
    model_config = ConfigDict(frozen=True)
    kind: Literal["max_queries"] = "max_queries"
    queries: int = Field(ge=0)


StopCriterion = Annotated[Union[TargetAccuracy, MaxDepth, MaxQueries], Field(discriminator="kind")]


class BAConfig(BaseModel):
    """Inputs of the Bisect and Approximate loop"""
    model_config = ConfigDict(frozen=True)

    level: float
    tolerance_b: float = Field(gt=0.0)
    tolerance_beta: float = Field(gt=0.0)
    queries_per_cube: int = Field(ge=1)
    mode: Mode = Mode.LEVEL_SET
    stop: StopCriterion = MaxDepth(depth=0)
    max_cubes: int = Field(default=1_000_000, ge=1)

    def with_stop(self, stop: Union[TargetAccuracy, MaxDepth, MaxQueries]) -> "BAConfig":
        return self.model_copy(update={"stop": stop})


# ---------------------------------------------------------------------------
# Experiment files
# ---------------------------------------------------------------------------

class FunctionSpec(BaseModel):
    """Test function name plus its constructor parameters"""
    name: Literal["constant", "affine", "quadratic", "spike", "bump"]
    params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def collect_params(cls, data: Any) -> Any:
        # Flat TOML table: every key besides `name` is a parameter
        if isinstance(data, dict) and "params" not in data:
            data = dict(data)
            name = data.pop("name", None)
            return {"name": name, "params": data}
        return data


class AlgorithmSpec(BaseModel):
    """bah, bag, or a registered custom strategy id, with its constants"""
    name: str = "bah"
    c: Optional[float] = Field(default=None, gt=0.0)
    gamma: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    c1: Optional[float] = Field(default=None, gt=0.0)
    gamma1: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    # Overrides of the tolerances the strategy would otherwise wire in
    b: Optional[float] = Field(default=None, gt=0.0)
    beta: Optional[float] = Field(default=None, gt=0.0)
    params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_constants(self) -> "AlgorithmSpec":
        if self.name == "bah" and (self.c is None or self.gamma is None):
            raise ValueError("bah needs c and gamma")
        if self.name == "bag" and (self.c1 is None or self.gamma1 is None):
            raise ValueError("bag needs c1 and gamma1")
        return self


class StopSpec(BaseModel):
    """Stop criterion as written in the experiment file"""
    kind: Literal["target_accuracy", "max_depth", "max_queries"] = "max_depth"
    epsilon: Optional[float] = Field(default=None, gt=0.0)
    depth: Optional[int] = Field(default=None, ge=0)
    queries: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def check_value(self) -> "StopSpec":
        values = {"target_accuracy": self.epsilon, "max_depth": self.depth, "max_queries": self.queries}
        if values[self.kind] is None:
            raise ValueError(f"stop kind {self.kind} needs its value")
        # Exactly one criterion is active
        stray = [kind for kind, value in values.items() if kind != self.kind and value is not None]
        if stray:
            raise ValueError(f"stop kind {self.kind} does not take values for {', '.join(stray)}")
        return self

    def to_criterion(self) -> Union[TargetAccuracy, MaxDepth, MaxQueries]:
        if self.kind == "target_accuracy":
            return TargetAccuracy(epsilon=self.epsilon)
        if self.kind == "max_depth":
            return MaxDepth(depth=self.depth)
        return MaxQueries(queries=self.queries)


class GeometricSpec(BaseModel):
    """Geometric sequence start, start*factor, ..."""
    start: float = Field(gt=0.0)
    factor: float = Field(gt=0.0, lt=1.0)
    count: int = Field(ge=1)

    def values(self) -> List[float]:
        return [self.start * self.factor ** j for j in range(self.count)]


class SweepSpec(GeometricSpec):
    """Accuracy sweep; at least three points for a rate fit"""
    count: int = Field(default=4, ge=3)
    # None: one iteration past the depth that guarantees the smallest accuracy
    max_depth: Optional[int] = Field(default=None, ge=1)


class NLSSpec(GeometricSpec):
    """Scales for near-level-set dimension estimation"""
    start: float = Field(default=0.125, gt=0.0, lt=1.0)
    factor: float = Field(default=0.5, gt=0.0, lt=1.0)
    count: int = Field(default=5, ge=4)
    grid_n: int = Field(default=512, ge=2)


class AdversarySpec(BaseModel):
    """Lower-bound harness parameters"""
    epsilon: float = Field(gt=0.0)
    budget: Optional[int] = Field(default=None, ge=0)
    smoothness: Literal["holder", "grad_holder"] = "holder"


class OutputSpec(BaseModel):
    dir: str = "results"


class ExperimentConfig(BaseModel):
    """Whole experiment file"""
    model_config = ConfigDict(extra="forbid")

    function: FunctionSpec
    algorithm: AlgorithmSpec
    level: float = 0.0
    mode: Mode = Mode.LEVEL_SET
    stop: StopSpec = StopSpec(kind="max_depth", depth=4)
    sweep: Optional[SweepSpec] = None
    nls: Optional[NLSSpec] = None
    adversary: Optional[AdversarySpec] = None
    output: OutputSpec = OutputSpec()
    seed: int = 0
    max_cubes: int = Field(default=1_000_000, ge=1)
    grid_n: int = Field(default=256, ge=2)
    level_set_samples: int = Field(default=1000, ge=1)
