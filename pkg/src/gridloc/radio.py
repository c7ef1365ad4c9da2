"""Beacon scheduling at the reference nodes and probabilistic reception.

Reception is abstracted behind three pluggable models rather than a physical
radio layer:

    * ``IdealDisk``       - received iff within range R (deterministic).
    * ``BernoulliDisk``   - within R, each beacon independently lost with a
                            fixed probability.
    * ``DistanceDecay``   - certain reception up to a reliable radius, then
                            linearly falling to zero at R. This is the default
                            for experiments, because a hard disk leaves the
                            reception-count threshold with nothing to do.

All stochastic decisions take an explicit ``random.Random`` so callers can
keep one seeded lane per purpose.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from .errors import ConfigurationError, ContractViolationError
from .geometry import RANGE_TOL, GridConfig, Point2D, grid_positions


@dataclass(frozen=True)
class IdealDisk:
    range_R: float

    def __post_init__(self):
        if not (self.range_R > 0.0):
            raise ConfigurationError(f"range must be positive, got {self.range_R}")

    def receive_probability(self, dist: float) -> float:
        return 1.0 if dist <= self.range_R + RANGE_TOL else 0.0


@dataclass(frozen=True)
class BernoulliDisk:
    range_R: float
    loss_prob: float

    def __post_init__(self):
        if not (self.range_R > 0.0):
            raise ConfigurationError(f"range must be positive, got {self.range_R}")
        if not (0.0 <= self.loss_prob < 1.0):
            raise ConfigurationError(f"loss probability must be in [0, 1), got {self.loss_prob}")

    def receive_probability(self, dist: float) -> float:
        return 1.0 - self.loss_prob if dist <= self.range_R + RANGE_TOL else 0.0


@dataclass(frozen=True)
class DistanceDecay:
    reliable_radius: float
    range_R: float

    def __post_init__(self):
        if not (0.0 < self.reliable_radius <= self.range_R):
            raise ConfigurationError(
                f"reliable radius must be in (0, R], got {self.reliable_radius} vs R={self.range_R}"
            )

    def receive_probability(self, dist: float) -> float:
        if dist <= self.reliable_radius:
            return 1.0
        if dist > self.range_R + RANGE_TOL:
            return 0.0
        span = self.range_R - self.reliable_radius
        if span <= 0.0:  # degenerate: reliable radius == R behaves like a disk
            return 1.0
        return max(0.0, (self.range_R - dist) / span)


ReceptionModel = Union[IdealDisk, BernoulliDisk, DistanceDecay]


def reception_decision(dist: float, model: ReceptionModel, rng: random.Random) -> bool:
    """Decide one beacon reception at the given sender-receiver distance.

    Consumes exactly one uniform draw per in-range beacon for the stochastic
    models and none for ``IdealDisk``, so lane consumption is predictable.
    """
    if dist < 0.0:
        raise ValueError(f"distance must be non-negative, got {dist}")
    if isinstance(model, IdealDisk):
        return dist <= model.range_R + RANGE_TOL
    if dist > model.range_R + RANGE_TOL:
        return False
    if isinstance(model, BernoulliDisk):
        return rng.random() >= model.loss_prob
    return rng.random() < model.receive_probability(dist)


@dataclass(frozen=True)
class Beacon:
    source_id: int
    source_pos: Point2D
    emit_time: float


def beacon_schedule(
    grid: GridConfig, beacon_interval_p: float, phases: Sequence[float]
) -> Iterator[Beacon]:
    """Merge the per-node periodic emissions into one time-ordered stream.

    Node ``i`` emits at ``phases[i] + k * p`` for k = 0, 1, ...; ties at equal
    times break by node id. The stream is infinite; consume lazily.
    """
    if not (beacon_interval_p > 0.0):
        raise ConfigurationError(f"beacon interval must be positive, got {beacon_interval_p}")
    positions = grid_positions(grid)
    if len(phases) != len(positions):
        raise ConfigurationError(
            f"need one phase per node: {len(phases)} phases for {len(positions)} nodes"
        )
    for phase in phases:
        if not (0.0 <= phase < beacon_interval_p):
            raise ConfigurationError(f"phases must lie in [0, p), got {phase}")

    heap = [(phase, node_id, 0) for node_id, phase in enumerate(phases)]
    heapq.heapify(heap)
    while True:
        emit_time, node_id, k = heapq.heappop(heap)
        yield Beacon(source_id=node_id, source_pos=positions[node_id], emit_time=emit_time)
        # Recompute from k to avoid accumulating float drift.
        heapq.heappush(heap, (phases[node_id] + (k + 1) * beacon_interval_p, node_id, k + 1))


@dataclass(frozen=True)
class BeaconTally:
    """Per-node reception counts over one centroid window [start, start+len)."""

    window_start: float
    window_len: float
    counts: dict[int, int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.counts.values())


def window_tally(
    receptions: Sequence[tuple[float, int]], window_start: float, window_len: float
) -> BeaconTally:
    """Count received beacons per source node over a half-open window.

    ``receptions`` must be (time, node_id) pairs sorted by time.
    """
    if not (window_len > 0.0):
        raise ConfigurationError(f"window length must be positive, got {window_len}")
    counts: dict[int, int] = {}
    window_end = window_start + window_len
    prev = float("-inf")
    for t, node_id in receptions:
        if t < prev:
            raise ContractViolationError(
                f"receptions must be sorted by time; saw {t} after {prev}"
            )
        prev = t
        if window_start <= t < window_end:
            counts[node_id] = counts.get(node_id, 0) + 1
    return BeaconTally(window_start=window_start, window_len=window_len, counts=counts)
