"""
Right-continuous step functions with exact integration.
"""
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import pandas as pd

StepKind = Literal["cumulative", "increment"]


@dataclass(frozen=True, eq=False)
class StepFunction:
    """
    A right-continuous step function on [0, inf).

    jump_values are post-jump levels when kind is "cumulative" and jump sizes
    when kind is "increment"; either way the function equals initial_value
    before the first jump time.
    """

    jump_times: np.ndarray
    jump_values: np.ndarray
    kind: StepKind = "cumulative"
    initial_value: float = 0.0

    def __post_init__(self) -> None:
        times = np.asarray(self.jump_times, dtype=float).reshape(-1)
        values = np.asarray(self.jump_values, dtype=float).reshape(-1)
        if times.shape != values.shape:
            raise ValueError("jump_times and jump_values must have the same length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("jump_times must be strictly increasing")
        if self.kind not in ("cumulative", "increment"):
            raise ValueError(f"unknown step function kind {self.kind!r}")
        object.__setattr__(self, "jump_times", times)
        object.__setattr__(self, "jump_values", values)
        object.__setattr__(self, "initial_value", float(self.initial_value))

    @classmethod
    def empty(cls, kind: StepKind = "increment", initial_value: float = 0.0) -> "StepFunction":
        return cls(np.empty(0), np.empty(0), kind, initial_value)

    @property
    def levels(self) -> np.ndarray:
        """Function value from each jump time up to the next one."""
        if self.kind == "cumulative":
            return self.jump_values
        return self.initial_value + np.cumsum(self.jump_values)

    @property
    def increments(self) -> np.ndarray:
        if self.kind == "increment":
            return self.jump_values
        return np.diff(np.concatenate(([self.initial_value], self.jump_values)))

    def _level_at(self, index: np.ndarray) -> np.ndarray:
        padded = np.concatenate(([self.initial_value], self.levels))
        return padded[index]

    def __call__(self, u: Any) -> Any:
        """Right-continuous value f(u)."""
        index = np.searchsorted(self.jump_times, u, side="right")
        result = self._level_at(index)
        return float(result) if np.ndim(result) == 0 else result

    def value_at_left(self, u: Any) -> Any:
        """Left limit f(u-)."""
        index = np.searchsorted(self.jump_times, u, side="left")
        result = self._level_at(index)
        return float(result) if np.ndim(result) == 0 else result

    def cumulative_integral(self, t: Any) -> Any:
        """Exact integral of f over [0, t], vectorized over t >= 0."""
        knots = np.concatenate(([0.0], self.jump_times))
        segment_levels = np.concatenate(([self.initial_value], self.levels))
        areas = np.concatenate(([0.0], np.cumsum(segment_levels[:-1] * np.diff(knots))))
        k = np.searchsorted(knots, t, side="right") - 1
        k = np.maximum(k, 0)
        result = areas[k] + segment_levels[k] * (np.asarray(t, dtype=float) - knots[k])
        return float(result) if np.ndim(result) == 0 else result

    def integrate(self, lower: float, upper: float) -> float:
        if upper < lower:
            raise ValueError("upper limit must not be below lower limit")
        return float(self.cumulative_integral(upper) - self.cumulative_integral(lower))

    def to_frame(self) -> pd.DataFrame:
        """(time, value) rows: the level reached at each jump, plus the value at time zero."""
        times = np.concatenate(([0.0], self.jump_times))
        values = np.concatenate(([self.initial_value], self.levels))
        if self.jump_times.size and self.jump_times[0] == 0.0:
            times, values = times[1:], values[1:]
        return pd.DataFrame({"time": times, "value": values})
