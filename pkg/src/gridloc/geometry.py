"""Closed-form deployment geometry for a fixed square-lattice reference grid.

Everything here is a pure function of its inputs (plus an explicit seed for
the two Monte Carlo verifiers), so it is safe to call from anywhere.

Conventions:
    * rows index the y axis, cols index the x axis; node lists are row-major.
    * All range / region membership uses closed balls with a small absolute
      tolerance (``RANGE_TOL``). Several bounds in this model are tight
      exactly at cell-edge midpoints, so open balls would falsify them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, ModelValidityWarning, PlanningError

# Closed-ball slack for membership tests that are tight at exact boundaries.
RANGE_TOL = 1e-9

# Range-to-cell-side ratio guaranteeing three non-collinear anchors anywhere
# in a cell: sqrt(5)/2.
MIN_RANGE_RATIO = math.sqrt(5.0) / 2.0


class Point2D(NamedTuple):
    x: float
    y: float


def _check_finite_point(p: Point2D) -> None:
    if not (math.isfinite(p.x) and math.isfinite(p.y)):
        raise ConfigurationError(f"point coordinates must be finite, got {p}")


def distance(a: Point2D, b: Point2D) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass(frozen=True)
class GridConfig:
    """A rows x cols lattice of reference nodes with cell side ``cell_side_L``."""

    rows: int
    cols: int
    cell_side_L: float
    origin: Point2D = Point2D(0.0, 0.0)

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise ConfigurationError(
                f"grid needs at least 2 rows and 2 cols, got {self.rows}x{self.cols}"
            )
        if not (self.cell_side_L > 0.0 and math.isfinite(self.cell_side_L)):
            raise ConfigurationError(f"cell side must be positive, got {self.cell_side_L}")
        _check_finite_point(self.origin)

    @property
    def width(self) -> float:
        return (self.cols - 1) * self.cell_side_L

    @property
    def height(self) -> float:
        return (self.rows - 1) * self.cell_side_L


def grid_positions(cfg: GridConfig) -> list[Point2D]:
    """Node positions, row-major (row 0 first, x varying fastest)."""
    L = cfg.cell_side_L
    return [
        Point2D(cfg.origin.x + col * L, cfg.origin.y + row * L)
        for row in range(cfg.rows)
        for col in range(cfg.cols)
    ]


def min_ntl_range(cell_side_L: float) -> float:
    """Smallest node range that keeps three non-collinear anchors reachable
    from every point of a grid cell: ``L * sqrt(5) / 2``."""
    if not (cell_side_L > 0.0):
        raise ValueError(f"cell side must be positive, got {cell_side_L}")
    return cell_side_L * MIN_RANGE_RATIO


@dataclass(frozen=True)
class TimingPlan:
    """Beaconing / centroid schedule. ``granularity_G = p / P`` exactly.

    ``raw_interval`` keeps the un-rounded centroid interval the plan was
    derived from; it defaults to P when the plan is written out directly.
    """

    centroid_interval_P: int
    beacon_interval_p: int
    granularity_G: float
    max_beacons: int
    threshold_T: float
    speed_S: float
    raw_interval: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.centroid_interval_P <= 0 or self.beacon_interval_p <= 0:
            raise ConfigurationError("intervals must be positive")
        if self.centroid_interval_P % self.beacon_interval_p != 0:
            raise ConfigurationError(
                f"centroid interval {self.centroid_interval_P} must be a multiple of "
                f"beacon interval {self.beacon_interval_p}"
            )
        if abs(self.granularity_G - self.beacon_interval_p / self.centroid_interval_P) > 1e-12:
            raise ConfigurationError("granularity must equal p / P")
        if self.max_beacons != round(self.centroid_interval_P / self.beacon_interval_p):
            raise ConfigurationError("max_beacons must equal round(P / p)")
        if not (0.0 < self.threshold_T <= 1.0):
            raise ConfigurationError(f"threshold must be in (0, 1], got {self.threshold_T}")
        if not (self.speed_S > 0.0):
            raise ConfigurationError(f"speed must be positive, got {self.speed_S}")
        if self.raw_interval is None:
            object.__setattr__(self, "raw_interval", float(self.centroid_interval_P))


# Largest reduced denominator accepted when interpreting a granularity target
# as an exact ratio of integers.
_MAX_GRANULARITY_DENOMINATOR = 10_000


def derive_timing(
    cell_side_L: float, speed_S: float, target_G: float, threshold_T: float
) -> TimingPlan:
    """Derive the integer beaconing schedule for a deployment.

    The raw centroid interval is ``(sqrt(5)/2 - 1) * L / S`` (time to cross the
    smaller homogeneous region at top speed). It is then rounded up to the
    smallest integer P that admits an integer beacon interval p with
    ``p / P == target_G``; that pins max_beacons = P / p.
    """
    if not (cell_side_L > 0.0 and speed_S > 0.0):
        raise ValueError("cell side and speed must be positive")
    if not (0.0 < target_G <= 1.0):
        raise ValueError(f"granularity target must be in (0, 1], got {target_G}")
    if not (0.0 < threshold_T <= 1.0):
        raise ValueError(f"threshold must be in (0, 1], got {threshold_T}")

    ratio = Fraction(target_G).limit_denominator(_MAX_GRANULARITY_DENOMINATOR)
    if abs(float(ratio) - target_G) > 1e-9:
        raise PlanningError(
            f"no integer beacon/centroid interval pair achieves granularity {target_G}; "
            f"use a ratio of integers with denominator <= {_MAX_GRANULARITY_DENOMINATOR}"
        )

    raw_P = (MIN_RANGE_RATIO - 1.0) * cell_side_L / speed_S
    # 1 ns slack so float noise at an exact multiple does not bump k up.
    k = max(1, math.ceil((raw_P - 1e-9) / ratio.denominator))
    interval_P = k * ratio.denominator
    interval_p = k * ratio.numerator

    return TimingPlan(
        centroid_interval_P=interval_P,
        beacon_interval_p=interval_p,
        granularity_G=interval_p / interval_P,
        max_beacons=round(interval_P / interval_p),
        threshold_T=threshold_T,
        speed_S=speed_S,
        raw_interval=raw_P,
    )


def _region_radii(cell_side_L: float, range_R: float) -> tuple[float, float]:
    if not (cell_side_L > 0.0):
        raise ValueError(f"cell side must be positive, got {cell_side_L}")
    if range_R < cell_side_L:
        raise ValueError(
            f"range {range_R} below cell side {cell_side_L}: neighbouring grid nodes "
            "would be unreachable, so routing through the grid fails"
        )
    if range_R > min_ntl_range(cell_side_L) + RANGE_TOL:
        warnings.warn(
            f"range {range_R} exceeds {min_ntl_range(cell_side_L):.4f}; corner regions "
            "grow beyond the band the analytical model assumes",
            ModelValidityWarning,
            stacklevel=3,
        )
    return cell_side_L / 2.0, range_R - cell_side_L


@dataclass(frozen=True)
class RegionModel:
    """Per-cell region decomposition: a central disk of radius ``r1 = L/2``
    and four corner disks of radius ``r2 = R - L``."""

    r1: float
    r2: float
    cell_side_L: float
    range_R: float

    def __post_init__(self):
        if abs(self.r1 - self.cell_side_L / 2.0) > 1e-12 * max(1.0, self.cell_side_L):
            raise ConfigurationError("central region radius must equal L / 2")
        if self.r2 < 0.0:
            raise ConfigurationError("corner region radius R - L must be non-negative")
        if self.r2 > self.r1 + RANGE_TOL:
            raise ConfigurationError("corner region radius must not exceed the central one")

    @classmethod
    def from_deployment(cls, cell_side_L: float, range_R: float) -> "RegionModel":
        r1, r2 = _region_radii(cell_side_L, range_R)
        return cls(r1=r1, r2=r2, cell_side_L=cell_side_L, range_R=range_R)


def theoretical_mae(cell_side_L: float, range_R: float) -> float:
    """Predicted mean absolute error of centroid-only localization.

    Averages the distance-to-region-center error over the central and corner
    disks: ``(2/3) * (r1^3 + r2^3) / (r1^2 + r2^2)``. Scale-free in L: at
    ``R = L * sqrt(5)/2`` it evaluates to 0.3199 * L.
    """
    r1, r2 = _region_radii(cell_side_L, range_R)
    return (2.0 / 3.0) * (r1**3 + r2**3) / (r1**2 + r2**2)


def region_area_fraction(cell_side_L: float, range_R: float) -> float:
    """Fraction of a cell covered by the central disk plus the four corner
    quarter-disks (which add up to one full disk of radius r2)."""
    r1, r2 = _region_radii(cell_side_L, range_R)
    return math.pi * (r1**2 + r2**2) / cell_side_L**2


def fine_cnt_limit_bound(r1: float, interval_P: float, speed_S: float) -> int:
    """Largest usable unchanged-centroid count before a forced fine fix:
    ``floor(2 * r1 / (P * S))``, the number of centroid intervals needed to
    cross the central region at top speed."""
    if not (r1 > 0.0 and interval_P > 0.0 and speed_S > 0.0):
        raise ValueError("radius, interval and speed must be positive")
    crossings = 2.0 * r1 / (interval_P * speed_S)
    if crossings < 1.0 - 1e-9:
        raise PlanningError(
            f"central region crossing time {2.0 * r1 / speed_S:.3f}s is shorter than one "
            f"centroid interval ({interval_P}s); increase the region radius or shorten "
            "the interval"
        )
    return int(math.floor(crossings + 1e-9))


class RegionKind:
    REGION1 = "region1"
    REGION2 = "region2"
    OTHER = "other"


class RegionLabel(NamedTuple):
    kind: str
    # Reference point whose distance defines the model error; None for OTHER.
    center: Point2D | None
    # Corner index 0..3 (counter-clockwise from the cell anchor); None unless REGION2.
    corner: int | None


def cell_corners(anchor: Point2D, cell_side_L: float) -> list[Point2D]:
    """Corners of the cell whose lower-left corner is ``anchor``, CCW."""
    L = cell_side_L
    return [
        Point2D(anchor.x, anchor.y),
        Point2D(anchor.x + L, anchor.y),
        Point2D(anchor.x + L, anchor.y + L),
        Point2D(anchor.x, anchor.y + L),
    ]


def region_classify(p: Point2D, model: RegionModel, cell_anchor: Point2D) -> RegionLabel:
    """Classify a point of a cell into the central region, a corner region,
    or the uncovered remainder. The central region wins on (nominally
    impossible) overlap; disjointness is checked up front."""
    L = model.cell_side_L
    if model.r1 + model.r2 >= L * math.sqrt(2.0) / 2.0:
        raise ConfigurationError(
            "central and corner regions overlap; the model is only defined for "
            "r1 + r2 < L * sqrt(2) / 2"
        )
    if not (
        cell_anchor.x - RANGE_TOL <= p.x <= cell_anchor.x + L + RANGE_TOL
        and cell_anchor.y - RANGE_TOL <= p.y <= cell_anchor.y + L + RANGE_TOL
    ):
        raise ValueError(f"point {p} lies outside the cell anchored at {cell_anchor}")

    center = Point2D(cell_anchor.x + L / 2.0, cell_anchor.y + L / 2.0)
    if distance(p, center) <= model.r1 + RANGE_TOL:
        return RegionLabel(RegionKind.REGION1, center, None)
    for idx, corner in enumerate(cell_corners(cell_anchor, L)):
        if distance(p, corner) <= model.r2 + RANGE_TOL:
            return RegionLabel(RegionKind.REGION2, corner, idx)
    return RegionLabel(RegionKind.OTHER, None, None)


@dataclass(frozen=True)
class ConnectivityReport:
    """Unit-disk adjacency over node positions plus hop counts from a gateway."""

    adjacency: list[list[int]]
    connected: bool
    hops: list[int]  # -1 where unreachable from the gateway
    gateway: int


def connectivity_graph(
    positions: list[Point2D], range_R: float, gateway: int = 0
) -> ConnectivityReport:
    """Closed-disk connectivity: an edge wherever pairwise distance <= R."""
    if not positions:
        raise ValueError("at least one position required")
    if not (range_R > 0.0):
        raise ValueError(f"range must be positive, got {range_R}")
    if not (0 <= gateway < len(positions)):
        raise ValueError(f"gateway index {gateway} out of range")

    pts = np.asarray(positions, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    within = dist <= range_R + RANGE_TOL
    np.fill_diagonal(within, False)
    adjacency = [list(np.nonzero(row)[0]) for row in within]

    hops = [-1] * len(positions)
    hops[gateway] = 0
    frontier = [gateway]
    while frontier:
        nxt = []
        for node in frontier:
            for nbr in adjacency[node]:
                if hops[nbr] < 0:
                    hops[nbr] = hops[node] + 1
                    nxt.append(nbr)
        frontier = nxt
    return ConnectivityReport(
        adjacency=adjacency,
        connected=all(h >= 0 for h in hops),
        hops=hops,
        gateway=gateway,
    )


def has_three_noncollinear_within(
    p: Point2D, nodes: list[Point2D], range_R: float, cell_scale: float | None = None
) -> bool:
    """True if at least three of ``nodes`` within closed distance R of ``p``
    are not all collinear. Collinearity uses a scale-aware cross-product
    tolerance."""
    in_range = [n for n in nodes if distance(p, n) <= range_R + RANGE_TOL]
    if len(in_range) < 3:
        return False
    scale = cell_scale if cell_scale is not None else max(range_R, 1.0)
    tol = 1e-9 * scale * scale
    ax, ay = in_range[0]
    bx, by = in_range[1]
    for qx, qy in in_range[2:]:
        cross = (bx - ax) * (qy - ay) - (by - ay) * (qx - ax)
        if abs(cross) > tol:
            return True
    return False


class CoverageReport(NamedTuple):
    ok: bool
    worst_point: Point2D
    anchors_found: int
    failures: int


def verify_three_anchor_coverage(
    cell_side_L: float, range_R: float, samples: int, seed: int
) -> CoverageReport:
    """Brute-force check that every point of a grid cell reaches three
    non-collinear lattice nodes within closed distance R.

    Samples points uniformly in one cell embedded in a lattice neighbourhood
    large enough that no node within R of the cell is missing. Deterministic
    given the seed. The worst point reported is the failing sample with the
    fewest in-range anchors (or the overall fewest if all pass).
    """
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples, got {samples}")
    if not (cell_side_L > 0.0 and range_R > 0.0):
        raise ValueError("cell side and range must be positive")

    L = cell_side_L
    # Lattice indices -m..m+1 cover every node within R of the cell [0, L]^2.
    m = int(math.ceil(range_R / L))
    idx = np.arange(-m, m + 2, dtype=float)
    gx, gy = np.meshgrid(idx * L, idx * L)
    nodes = np.column_stack([gx.ravel(), gy.ravel()])

    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, L, size=(samples, 2))

    diff = pts[:, None, :] - nodes[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    in_range = dist <= range_R + RANGE_TOL
    counts = in_range.sum(axis=1)

    # Non-collinearity: pick the two nearest in-range nodes as a baseline
    # direction, then look for any third in-range node off that line.
    masked = np.where(in_range, dist, np.inf)
    order = np.argsort(masked, axis=1)
    i0, i1 = order[:, 0], order[:, 1]
    p0 = nodes[i0]
    p1 = nodes[i1]
    base = p1 - p0
    rel = nodes[None, :, :] - p0[:, None, :]
    cross = base[:, None, 0] * rel[..., 1] - base[:, None, 1] * rel[..., 0]
    tol = 1e-9 * L * L
    noncollinear = np.logical_and(in_range, np.abs(cross) > tol).any(axis=1)

    passed = np.logical_and(counts >= 3, noncollinear)
    failures = int((~passed).sum())
    if failures:
        candidates = np.nonzero(~passed)[0]
    else:
        candidates = np.arange(samples)
    worst = candidates[np.argmin(counts[candidates])]
    return CoverageReport(
        ok=failures == 0,
        worst_point=Point2D(float(pts[worst, 0]), float(pts[worst, 1])),
        anchors_found=int(counts[worst]),
        failures=failures,
    )


def monte_carlo_analytical_mae(
    cell_side_L: float, range_R: float, samples: int, seed: int
) -> float:
    """Monte Carlo evaluation of the analytical error model: sample the
    central and corner regions with correct area weighting and average the
    distance to each region's defining center. Independent check for
    ``theoretical_mae``."""
    if samples < 100_000:
        raise ValueError(f"need at least 1e5 samples, got {samples}")
    r1, r2 = _region_radii(cell_side_L, range_R)

    rng = np.random.default_rng(seed)
    area1 = math.pi * r1**2
    area2 = math.pi * r2**2
    pick_central = rng.uniform(size=samples) < area1 / (area1 + area2)
    radius_max = np.where(pick_central, r1, r2)
    # sqrt transform gives uniform points in a disk; the error at a point is
    # exactly its radius from the region center.
    radii = radius_max * np.sqrt(rng.uniform(size=samples))
    return float(radii.mean())
