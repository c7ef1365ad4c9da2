"""Pedestrian walk generation and error-prone step sensing.

The walker crosses a rectangular field from the top-left corner to the
bottom-right corner taking one step per second, each step either Right (+x)
or Down (+y). The direction is re-drawn every ``segment_len_N`` steps; a draw
that would leave the field forces the other direction.

Axis convention: +y points "down" the field, so the walk is monotone
non-decreasing in both coordinates.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import ConfigurationError, ContractViolationError
from .geometry import Point2D


class Direction(Enum):
    RIGHT = "right"
    DOWN = "down"


@dataclass(frozen=True)
class FieldBounds:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ConfigurationError("field bounds must be non-degenerate")


@dataclass(frozen=True)
class MobilityConfig:
    stride_min: float
    stride_max: float
    segment_len_N: int
    field_bounds: FieldBounds
    steps_per_second: int = 1

    def __post_init__(self):
        if not (0.0 < self.stride_min <= self.stride_max):
            raise ConfigurationError(
                f"stride range must satisfy 0 < min <= max, got [{self.stride_min}, {self.stride_max}]"
            )
        if self.segment_len_N < 1:
            raise ConfigurationError(f"segment length must be >= 1, got {self.segment_len_N}")
        if self.steps_per_second != 1:
            raise ConfigurationError("only one step per second is supported")


@dataclass(frozen=True)
class SensorErrorModel:
    """Step-sensor inaccuracies: stride scale (SA), per-step detection
    probability (DA) and a fixed heading bias (GA, degrees) toward the other
    movement axis."""

    stride_accuracy_SA: float
    detect_accuracy_DA: float
    heading_error_GA: float

    def __post_init__(self):
        if not (0.0 < self.stride_accuracy_SA <= 1.0):
            raise ConfigurationError(f"stride accuracy must be in (0, 1], got {self.stride_accuracy_SA}")
        if not (0.0 < self.detect_accuracy_DA <= 1.0):
            raise ConfigurationError(f"detect accuracy must be in (0, 1], got {self.detect_accuracy_DA}")
        if self.heading_error_GA < 0.0:
            raise ConfigurationError(f"heading error must be >= 0, got {self.heading_error_GA}")


ERROR_FREE_SENSORS = SensorErrorModel(1.0, 1.0, 0.0)


@dataclass(frozen=True)
class WalkState:
    actual_pos: Point2D
    current_dir: Direction | None
    steps_in_segment: int
    episode_done: bool

    @classmethod
    def initial(cls, cfg: MobilityConfig) -> "WalkState":
        return cls(
            actual_pos=Point2D(cfg.field_bounds.x_min, cfg.field_bounds.y_min),
            current_dir=None,
            steps_in_segment=0,
            episode_done=False,
        )


class StepEvent(NamedTuple):
    actual_stride: float
    actual_dir: Direction


def advance_walk(
    state: WalkState, cfg: MobilityConfig, rng: random.Random
) -> tuple[WalkState, StepEvent]:
    """Take one walking step. Draw order per call: direction (only at segment
    boundaries), then stride."""
    if state.episode_done:
        raise ContractViolationError("walk advanced after the episode finished")

    direction = state.current_dir
    steps = state.steps_in_segment
    if direction is None or steps >= cfg.segment_len_N:
        direction = Direction.RIGHT if rng.random() < 0.5 else Direction.DOWN
        steps = 0

    stride = rng.uniform(cfg.stride_min, cfg.stride_max)
    bounds = cfg.field_bounds
    x, y = state.actual_pos

    # Force the other direction rather than leaving the field.
    if direction is Direction.RIGHT and x + stride > bounds.x_max + 1e-12:
        direction = Direction.DOWN
    if direction is Direction.DOWN and y + stride > bounds.y_max + 1e-12:
        direction = Direction.RIGHT
        if x + stride > bounds.x_max + 1e-12:
            # Both directions blocked: clamp onto the far corner and finish.
            pos = Point2D(bounds.x_max, bounds.y_max)
            done_state = WalkState(pos, direction, steps + 1, True)
            return done_state, StepEvent(stride, direction)

    if direction is Direction.RIGHT:
        pos = Point2D(x + stride, y)
    else:
        pos = Point2D(x, y + stride)

    done = (
        bounds.x_max - pos.x <= cfg.stride_max
        and bounds.y_max - pos.y <= cfg.stride_max
    )
    new_state = WalkState(
        actual_pos=pos,
        current_dir=direction,
        steps_in_segment=steps + 1,
        episode_done=done,
    )
    return new_state, StepEvent(stride, direction)


class SensedStep(NamedTuple):
    detected: bool
    reported_stride: float
    reported_heading_deg: float
    # Sensed displacement components; (0, 0) contribution when undetected.
    dx: float
    dy: float


def sense_step(event: StepEvent, err: SensorErrorModel, rng: random.Random) -> SensedStep:
    """Run the step sensors over one actual step.

    Detection is an independent Bernoulli draw per step (one draw per call).
    The reported stride is SA times the actual stride. The heading bias tilts
    a Right step toward Down and a Down step toward Right; the displacement
    components are formed so a zero bias reproduces the actual axis exactly.
    """
    detected = rng.random() < err.detect_accuracy_DA
    stride = err.stride_accuracy_SA * event.actual_stride
    bias = math.radians(err.heading_error_GA)
    if event.actual_dir is Direction.RIGHT:
        heading_deg = err.heading_error_GA
        dx, dy = stride * math.cos(bias), stride * math.sin(bias)
    else:
        heading_deg = 90.0 - err.heading_error_GA
        dx, dy = stride * math.sin(bias), stride * math.cos(bias)
    return SensedStep(
        detected=detected,
        reported_stride=stride,
        reported_heading_deg=heading_deg,
        dx=dx,
        dy=dy,
    )
