"""Deterministic discrete-event loop binding grid, radio, mobility and the
localization state machines into reproducible runs.

Time advances in whole seconds (the walker's step clock); beacon emissions
are placed at millisecond-quantized offsets inside each second so event
ordering never depends on float drift. Within one second the order is fixed:

    episode-restart check -> beacon receptions -> mobility step (+ dead
    reckoning) -> per-node trace sample -> centroid update (window boundary)

so a sample at a window-boundary timestamp still reflects the estimate held
before that boundary's update.

Every random decision draws from a lane seeded from
``derive_seed(master_seed, "replicate", k, <lane>)``; ``run_scenario`` is
exactly replicate 0, which makes a single run and the first element of a
batch interchangeable.

All node variants are co-simulated on the same walk and the same beacon
reception stream, so cross-variant comparisons are paired. When a walk
episode reaches the far corner it restarts at the origin corner as a fresh
episode: the walker state, the in-progress reception window and the
estimator states are all reset, and samples until the next estimate are
excluded from error statistics as warm-up. (Carrying the estimator across
the restart would inject a teleport artifact into every error metric.)
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import ConfigurationError
from .geometry import GridConfig, Point2D, TimingPlan, distance, grid_positions
from .localization import (
    LocationEstimate,
    NtlProfile,
    NtlState,
    TdoaErrorModel,
    current_estimate,
    dead_reckon_accumulate,
    ntl_update,
)
from .mobility import MobilityConfig, SensorErrorModel, WalkState, advance_walk, sense_step
from .radio import ReceptionModel, beacon_schedule, reception_decision, window_tally
from .rng import derive_seed, lane


@dataclass(frozen=True)
class ScenarioProfile:
    """One simulated node variant: a label, its capability profile and an
    optional per-variant sensor model (falls back to the scenario default)."""

    label: str
    profile: NtlProfile
    sensors: SensorErrorModel | None = None


@dataclass(frozen=True)
class Scenario:
    grid: GridConfig
    reception: ReceptionModel
    timing: TimingPlan
    profiles: tuple[ScenarioProfile, ...]
    mobility: MobilityConfig
    sensors: SensorErrorModel
    tdoa: TdoaErrorModel
    target_samples: int
    master_seed: int

    def __post_init__(self):
        if not self.profiles:
            raise ConfigurationError("scenario needs at least one node profile")
        labels = [sp.label for sp in self.profiles]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"profile labels must be unique, got {labels}")
        if self.target_samples <= self.timing.centroid_interval_P:
            raise ConfigurationError(
                f"run length {self.target_samples}s must exceed the centroid interval "
                f"{self.timing.centroid_interval_P}s"
            )
        for sp in self.profiles:
            p = sp.profile
            if (
                p.threshold_T != self.timing.threshold_T
                or p.max_beacons != self.timing.max_beacons
                or p.centroid_interval_P != self.timing.centroid_interval_P
            ):
                raise ConfigurationError(
                    f"profile {sp.label!r} disagrees with the scenario timing plan"
                )

    def sensors_for(self, sp: ScenarioProfile) -> SensorErrorModel:
        return sp.sensors if sp.sensors is not None else self.sensors


@dataclass(frozen=True)
class TraceSample:
    time_s: int
    label: str
    actual: Point2D
    estimate: LocationEstimate


@dataclass(frozen=True)
class Trace:
    samples: tuple[TraceSample, ...]
    fgl_events: tuple[tuple[int, str], ...]
    replicate: int = 0

    def labels(self) -> list[str]:
        seen: dict[str, None] = {}
        for s in self.samples:
            seen.setdefault(s.label, None)
        return list(seen)

    def samples_for(self, label: str) -> list[TraceSample]:
        return [s for s in self.samples if s.label == label]


def _run_replicate(scenario: Scenario, replicate: int) -> Trace:
    rep_seed = derive_seed(scenario.master_seed, "replicate", replicate)
    phases_rng = lane(rep_seed, "phases")
    walk_rng = lane(rep_seed, "walk")
    reception_rng = lane(rep_seed, "reception")
    sensor_rngs = {
        sp.label: lane(rep_seed, "sensors", sp.label)
        for sp in scenario.profiles
        if sp.profile.self_localize
    }
    tdoa_rngs = {sp.label: lane(rep_seed, "tdoa", sp.label) for sp in scenario.profiles}

    positions = grid_positions(scenario.grid)
    node_pos = dict(enumerate(positions))
    interval_p = scenario.timing.beacon_interval_p
    # Millisecond-quantized phases keep all emission times on an exact grid.
    phases = [
        phases_rng.randrange(int(interval_p * 1000)) / 1000.0 for _ in positions
    ]
    beacons = beacon_schedule(scenario.grid, float(interval_p), phases)
    pending = next(beacons)

    fine_range = scenario.reception.range_R
    interval_P = scenario.timing.centroid_interval_P
    duration = scenario.target_samples

    walk = WalkState.initial(scenario.mobility)
    states = {sp.label: NtlState.initial() for sp in scenario.profiles}
    window_receptions: list[tuple[float, int]] = []
    samples: list[TraceSample] = []
    fgl_events: list[tuple[int, str]] = []

    for t in range(duration):
        if walk.episode_done:
            walk = WalkState.initial(scenario.mobility)
            window_receptions.clear()
            states = {sp.label: NtlState.initial() for sp in scenario.profiles}

        # Beacons emitted during [t, t+1), received at the start-of-second position.
        while pending.emit_time < t + 1:
            d = distance(pending.source_pos, walk.actual_pos)
            if reception_decision(d, scenario.reception, reception_rng):
                window_receptions.append((pending.emit_time, pending.source_id))
            pending = next(beacons)

        walk, event = advance_walk(walk, scenario.mobility, walk_rng)
        for sp in scenario.profiles:
            if sp.profile.self_localize:
                sensed = sense_step(event, scenario.sensors_for(sp), sensor_rngs[sp.label])
                states[sp.label] = dead_reckon_accumulate(states[sp.label], sensed, sp.profile)

        now = t + 1
        for sp in scenario.profiles:
            est = current_estimate(states[sp.label], sp.profile, now)
            samples.append(TraceSample(now, sp.label, walk.actual_pos, est))

        if now % interval_P == 0:
            tally = window_tally(window_receptions, float(now - interval_P), float(interval_P))
            for sp in scenario.profiles:
                states[sp.label], _, fired = ntl_update(
                    states[sp.label],
                    tally,
                    walk.actual_pos,
                    sp.profile,
                    scenario.tdoa,
                    tdoa_rngs[sp.label],
                    now,
                    node_pos,
                    fine_range_R=fine_range,
                )
                if fired:
                    fgl_events.append((now, sp.label))
            window_receptions.clear()

    return Trace(samples=tuple(samples), fgl_events=tuple(fgl_events), replicate=replicate)


def run_scenario(scenario: Scenario) -> Trace:
    """Run one scenario; identical inputs produce a bit-identical trace."""
    return _run_replicate(scenario, 0)


def run_replicate(scenario: Scenario, replicate: int) -> Trace:
    """Run replicate ``replicate`` exactly as it would run inside a batch."""
    return _run_replicate(scenario, replicate)


def run_replicates(scenario: Scenario, n_replicates: int, workers: int = 1) -> list[Trace]:
    """Run n independent replicates (replicate 0 equals ``run_scenario``).

    Results are ordered by replicate index and independent of worker count.
    """
    if n_replicates < 1:
        raise ConfigurationError(f"need at least one replicate, got {n_replicates}")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_replicate, [scenario] * n_replicates, range(n_replicates)))
    return [_run_replicate(scenario, k) for k in range(n_replicates)]
