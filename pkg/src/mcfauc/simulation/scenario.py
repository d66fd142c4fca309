"""
Simulation scenarios: one trial design plus the replication settings.
"""
import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import yaml

from ..model.cohort import AnalysisConfig, Cohort
from ..model.const import DEFAULT_ALPHA, ENDPOINTS
from ..model.errors import ScenarioError
from .generators import (
    FOLLOWUP_CAP,
    RECURRENT_CASES,
    RMST_CASES,
    gen_baseline,
    gen_death_censor,
    gen_recurrent,
    gen_recurrent_gap,
    gen_rmst_baseline,
    gen_rmst_case,
)
from .randomization import simple_randomize, spb_randomize, stratify

SCHEMES = ("simple", "spb")
DEFAULT_TAU = {"auc": 2.0, "rmst": 5.0}
COVARIATE_NAMES = ("x1", "x2", "x3")


@dataclass(frozen=True)
class ScenarioSpec:
    endpoint: str = "auc"
    case: int = 1
    theta: float = 0.0
    n: int = 400
    scheme: str = "simple"
    tau: Optional[float] = None
    replicates: int = 1000
    base_seed: int = 0
    alpha: float = DEFAULT_ALPHA
    block_size: int = 4
    thetas: Tuple[float, ...] = field(default=())
    name: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas or ()))
        if self.tau is None:
            object.__setattr__(self, "tau", DEFAULT_TAU.get(self.endpoint))
        self.validate()

    def validate(self) -> None:
        if self.endpoint not in ENDPOINTS:
            raise ScenarioError(f"endpoint must be one of {', '.join(ENDPOINTS)}, got {self.endpoint!r}")
        cases = RECURRENT_CASES if self.endpoint == "auc" else RMST_CASES
        if self.case not in cases:
            raise ScenarioError(
                f"case {self.case} is not defined for endpoint {self.endpoint} "
                f"(valid: {', '.join(str(c) for c in cases)})"
            )
        if self.scheme not in SCHEMES:
            raise ScenarioError(f"scheme must be one of {', '.join(SCHEMES)}, got {self.scheme!r}")
        if self.replicates < 1:
            raise ScenarioError(f"replicates must be at least 1, got {self.replicates}")
        if self.n < 4:
            raise ScenarioError(f"n must be at least 4, got {self.n}")
        if self.block_size < 2 or self.block_size % 2:
            raise ScenarioError(f"block size must be a positive even number, got {self.block_size}")
        if self.tau is None or not self.tau > 0:
            raise ScenarioError(f"tau must be positive, got {self.tau!r}")
        if not 0 < self.alpha < 1:
            raise ScenarioError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScenarioSpec":
        """
        Constructs a ScenarioSpec from a dictionary, ignoring unknown fields.
        """
        known_field_names = {f.name for f in fields(cls)}
        filtered_data = {k: v for k, v in data.items() if k in known_field_names}
        try:
            return cls(**filtered_data)
        except TypeError as e:
            raise ScenarioError(f"invalid scenario: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["thetas"] = list(self.thetas)
        return data

    def with_overrides(self, **overrides: Any) -> "ScenarioSpec":
        """Copy with every non-None override applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if "endpoint" in changes and "tau" not in changes and self.tau == DEFAULT_TAU.get(self.endpoint):
            changes["tau"] = None
        return dataclasses.replace(self, **changes)

    @property
    def followup_limit(self) -> Optional[float]:
        return FOLLOWUP_CAP if self.endpoint == "auc" else None

    def analysis_config(self) -> AnalysisConfig:
        assert self.tau is not None
        return AnalysisConfig(
            tau=self.tau,
            alpha=self.alpha,
            estimand="both",
            endpoint=self.endpoint,
            followup_limit=self.followup_limit,
        )


def load_scenario(path: Union[str, Path]) -> ScenarioSpec:
    with open(path, "r") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ScenarioError(f"could not parse scenario file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ScenarioError(f"scenario file {path} must hold a mapping of settings")
    return ScenarioSpec.from_dict(data)


def _randomize(spec: ScenarioSpec, covariates: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if spec.scheme == "simple":
        return simple_randomize(spec.n, 0.5, rng)
    return spb_randomize(stratify(covariates[:, 0], covariates[:, 1]), spec.block_size, rng)


def simulate_trial(spec: ScenarioSpec, rng: np.random.Generator) -> Cohort:
    """One replicate: covariates, allocation, then outcomes."""
    if spec.endpoint == "rmst":
        covariates = gen_rmst_baseline(spec.n, rng)
        arms = _randomize(spec, covariates, rng)
        death, censor = gen_rmst_case(spec.case, spec.theta, arms, covariates, rng)
        followup = np.minimum(death, censor)
        terminal = (death <= censor).astype(int)
        events = [()] * spec.n
        return Cohort.from_arrays(arms, followup, terminal, events, covariates, COVARIATE_NAMES)

    covariates = gen_baseline(spec.n, rng)
    arms = _randomize(spec, covariates, rng)
    outcome = gen_death_censor(covariates, rng)
    if spec.case == 5:
        events = gen_recurrent_gap(spec.theta, arms, covariates, outcome.followup, rng)
    else:
        events = gen_recurrent(spec.case, spec.theta, arms, covariates, outcome.followup, rng)
    return Cohort.from_arrays(arms, outcome.followup, outcome.terminal, events, covariates, COVARIATE_NAMES)
