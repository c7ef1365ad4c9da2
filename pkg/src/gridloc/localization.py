"""The graded-precision localization state machine run by a mobile node.

One update runs per centroid interval: the node selects candidate reference
nodes whose beacon counts meet the threshold, computes their centroid, and -
depending on its capability profile - may trigger a fine-grained fix, which
is modelled as the true position plus a bounded random offset (the actual
hyperbolic solver is out of scope). Between fixes, a self-localizing node
dead-reckons with its step sensors.

The "centroid changed" trigger compares candidate-node ID sets, not centroid
coordinates, so it is immune to floating-point noise: two centroids differ
exactly when their candidate sets do.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping

from .errors import ConfigurationError, ContractViolationError, NoCandidatesError
from .geometry import Point2D, has_three_noncollinear_within
from .mobility import SensedStep
from .radio import BeaconTally


@dataclass(frozen=True)
class NtlProfile:
    """Capability flags plus the trigger parameters of one node class.

    ``coarse_grained`` also gates whether the plain centroid is advertised
    while no fine fix exists yet.
    """

    coarse_grained: bool
    fine_grained: bool
    self_localize: bool
    fine_cnt_limit: int
    threshold_T: float
    max_beacons: int
    centroid_interval_P: int

    def __post_init__(self):
        if self.self_localize and not self.fine_grained:
            raise ConfigurationError(
                "self-localization requires fine-grained capability: dead reckoning "
                "is meaningless without a fix to remove the initial position error"
            )
        if not (self.coarse_grained or self.fine_grained):
            raise ConfigurationError("profile would never produce an estimate")
        if self.fine_cnt_limit < 1:
            raise ConfigurationError(f"fine count limit must be >= 1, got {self.fine_cnt_limit}")
        if not (0.0 < self.threshold_T <= 1.0):
            raise ConfigurationError(f"threshold must be in (0, 1], got {self.threshold_T}")
        if self.max_beacons < 1 or self.centroid_interval_P < 1:
            raise ConfigurationError("max beacons and centroid interval must be >= 1")


@dataclass(frozen=True)
class TdoaErrorModel:
    """Uniform per-axis error bounds for the fine-fix oracle."""

    qmin: float
    qmax: float

    def __post_init__(self):
        if not (0.0 <= self.qmin <= self.qmax):
            raise ConfigurationError(
                f"error bounds must satisfy 0 <= qmin <= qmax, got ({self.qmin}, {self.qmax})"
            )


class EstimateMethod(Enum):
    COARSE = "coarse"
    FINE = "fine"
    DEAD_RECKONED = "dead_reckoned"
    NONE = "none"


@dataclass(frozen=True)
class LocationEstimate:
    pos: Point2D | None
    method: EstimateMethod
    time: float


@dataclass(frozen=True)
class NtlState:
    """Per-node localization state; treat as immutable, updates return copies."""

    last_centroid: Point2D | None = None
    last_candidate_ids: frozenset[int] | None = None
    unchanged_count: int = 0
    last_fix: Point2D | None = None
    last_fix_time: float | None = None
    dead_reckon_offset: tuple[float, float] = (0.0, 0.0)
    fgl_count: int = 0
    fgl_unavailable_count: int = 0

    @classmethod
    def initial(cls) -> "NtlState":
        return cls()


def candidate_ids(tally: BeaconTally, profile: NtlProfile) -> list[int]:
    """IDs of reference nodes whose count meets ceil(T * max_beacons), sorted."""
    # 1e-9 guard keeps exact products like 0.7 * 10 from ceiling one too high.
    need = math.ceil(profile.threshold_T * profile.max_beacons - 1e-9)
    need = max(need, 1)
    return sorted(node for node, count in tally.counts.items() if count >= need)


def candidate_set(
    tally: BeaconTally, profile: NtlProfile, node_positions: Mapping[int, Point2D]
) -> list[Point2D]:
    """Positions of the candidate reference nodes (may be empty)."""
    return [node_positions[i] for i in candidate_ids(tally, profile)]


def centroid(points: list[Point2D]) -> Point2D:
    """Arithmetic mean of the given positions."""
    if not points:
        raise NoCandidatesError("no candidate nodes passed the threshold")
    n = len(points)
    return Point2D(sum(p.x for p in points) / n, sum(p.y for p in points) / n)


def tdoa_fix(actual: Point2D, model: TdoaErrorModel, rng: random.Random) -> Point2D:
    """One fine-grained fix: actual position plus independent per-axis errors.

    Each axis gets a uniform magnitude in [qmin, qmax] with an independent
    random sign, so every fix error norm lies in [qmin*sqrt(2), qmax*sqrt(2)].
    Draw order: x magnitude, x sign, y magnitude, y sign.
    """
    ex = rng.uniform(model.qmin, model.qmax)
    sx = 1.0 if rng.random() < 0.5 else -1.0
    ey = rng.uniform(model.qmin, model.qmax)
    sy = 1.0 if rng.random() < 0.5 else -1.0
    return Point2D(actual.x + sx * ex, actual.y + sy * ey)


def fine_anchors_available(
    actual: Point2D, node_positions: Mapping[int, Point2D], range_R: float
) -> bool:
    """Whether a fine fix is geometrically possible: three non-collinear
    reference nodes within closed range of the node."""
    return has_three_noncollinear_within(actual, list(node_positions.values()), range_R)


def current_estimate(state: NtlState, profile: NtlProfile, now: float) -> LocationEstimate:
    """The position the node would advertise right now.

    Self-localizing nodes report fix + dead-reckoned offset; fine-grained
    nodes hold the last fix; otherwise the last centroid is advertised when
    the profile allows coarse reporting.
    """
    if profile.self_localize and state.last_fix is not None:
        ox, oy = state.dead_reckon_offset
        pos = Point2D(state.last_fix.x + ox, state.last_fix.y + oy)
        return LocationEstimate(pos, EstimateMethod.DEAD_RECKONED, now)
    if profile.fine_grained and state.last_fix is not None:
        return LocationEstimate(state.last_fix, EstimateMethod.FINE, now)
    if profile.coarse_grained and state.last_centroid is not None:
        return LocationEstimate(state.last_centroid, EstimateMethod.COARSE, now)
    return LocationEstimate(None, EstimateMethod.NONE, now)


def ntl_update(
    state: NtlState,
    tally: BeaconTally,
    actual: Point2D,
    profile: NtlProfile,
    tdoa_model: TdoaErrorModel,
    rng: random.Random,
    now: float,
    node_positions: Mapping[int, Point2D],
    fine_range_R: float | None = None,
) -> tuple[NtlState, LocationEstimate, bool]:
    """One centroid-interval update; call exactly once per interval.

    A fine-grained profile fires a fix when the candidate set differs from the
    previous one (including the very first update), or when the centroid has
    been unchanged for ``fine_cnt_limit`` consecutive intervals. An interval
    with no candidates cannot signal a set change but still advances the
    unchanged count, so the staleness bound keeps working through coverage
    gaps. When ``fine_range_R`` is given, the fix only happens if three
    non-collinear reference nodes are actually in range; otherwise the node
    falls back to its coarse estimate and the denial is counted.
    """
    ids = candidate_ids(tally, profile)
    new_centroid = state.last_centroid
    new_ids = state.last_candidate_ids
    set_changed = False
    if ids:
        new_centroid = centroid([node_positions[i] for i in ids])
        id_set = frozenset(ids)
        set_changed = state.last_candidate_ids is None or id_set != state.last_candidate_ids
        new_ids = id_set

    # Consecutive intervals without a candidate-set change, counting this one.
    streak = 0 if set_changed else state.unchanged_count + 1

    fired = False
    unchanged = streak
    fix = state.last_fix
    fix_time = state.last_fix_time
    offset = state.dead_reckon_offset
    fgl_count = state.fgl_count
    denied = state.fgl_unavailable_count

    if profile.fine_grained and (set_changed or streak >= profile.fine_cnt_limit):
        anchors_ok = fine_range_R is None or fine_anchors_available(
            actual, node_positions, fine_range_R
        )
        if anchors_ok:
            fix = tdoa_fix(actual, tdoa_model, rng)
            fix_time = now
            offset = (0.0, 0.0)
            fgl_count += 1
            unchanged = 0
            fired = True
        else:
            denied += 1

    new_state = NtlState(
        last_centroid=new_centroid,
        last_candidate_ids=new_ids,
        unchanged_count=unchanged,
        last_fix=fix,
        last_fix_time=fix_time,
        dead_reckon_offset=offset,
        fgl_count=fgl_count,
        fgl_unavailable_count=denied,
    )
    return new_state, current_estimate(new_state, profile, now), fired


def dead_reckon_accumulate(
    state: NtlState, sensed: SensedStep, profile: NtlProfile
) -> NtlState:
    """Fold one sensed step into the dead-reckoning offset.

    Undetected steps contribute nothing. Only valid for self-localizing
    profiles; call once per step between centroid updates.
    """
    if not profile.self_localize:
        raise ContractViolationError("dead reckoning requires a self-localizing profile")
    if not sensed.detected:
        return state
    ox, oy = state.dead_reckon_offset
    return replace(state, dead_reckon_offset=(ox + sensed.dx, oy + sensed.dy))
