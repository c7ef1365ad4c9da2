"""Error and overhead statistics over simulation traces.

The error-index table is cumulative: level k holds the fraction of samples
whose absolute error is at most the k-th bound (closed), so the seven levels
form a CDF sampled at fixed points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import EmptyTraceError, UndefinedOverheadError
from .geometry import distance, theoretical_mae
from .localization import EstimateMethod

# Cumulative absolute-error bounds (meters) for error indices 1..7.
ERROR_INDEX_BOUNDS_M: tuple[float, ...] = (2.0, 5.0, 10.0, 20.0, 30.0, 50.0, 75.0)

# Index of the "within 10 m" level, the headline comparison level.
WITHIN_10M_INDEX = 3


@dataclass(frozen=True)
class MetricsReport:
    label: str
    n_samples: int
    warmup_samples: int
    cle: float
    mae: float
    rmse: float
    within_bound: dict[int, float] = field(default_factory=dict)
    fgl_count: int = 0
    fgl_overhead_vs_baseline: float | None = None


def compute_metrics(trace, label: str) -> MetricsReport:
    """Aggregate one node's trace samples into a metrics report.

    Samples without an estimate (warm-up after start or episode restart) are
    excluded from the error statistics and reported separately.
    """
    errors: list[float] = []
    warmup = 0
    seen = 0
    for sample in trace.samples:
        if sample.label != label:
            continue
        seen += 1
        if sample.estimate.method is EstimateMethod.NONE or sample.estimate.pos is None:
            warmup += 1
            continue
        errors.append(distance(sample.estimate.pos, sample.actual))
    if seen == 0:
        raise EmptyTraceError(f"trace holds no samples for label {label!r}")
    if not errors:
        raise EmptyTraceError(f"all samples for label {label!r} are warm-up samples")

    n = len(errors)
    cle = sum(errors)
    rmse = math.sqrt(sum(e * e for e in errors) / n)
    within = {
        idx: sum(1 for e in errors if e <= bound) / n
        for idx, bound in enumerate(ERROR_INDEX_BOUNDS_M, start=1)
    }
    fgl = sum(1 for t, lbl in trace.fgl_events if lbl == label)
    return MetricsReport(
        label=label,
        n_samples=n,
        warmup_samples=warmup,
        cle=cle,
        mae=cle / n,
        rmse=rmse,
        within_bound=within,
        fgl_count=fgl,
    )


def merge_reports(reports: list[MetricsReport]) -> MetricsReport:
    """Sample-weighted merge of reports over the same label.

    Cumulative error is additive, so the merge of per-part reports equals the
    report of the concatenated trace.
    """
    if not reports:
        raise EmptyTraceError("nothing to merge")
    label = reports[0].label
    if any(r.label != label for r in reports):
        raise ValueError("cannot merge reports for different labels")
    n = sum(r.n_samples for r in reports)
    cle = sum(r.cle for r in reports)
    sum_sq = sum(r.rmse**2 * r.n_samples for r in reports)
    within = {
        idx: sum(round(r.within_bound[idx] * r.n_samples) for r in reports) / n
        for idx in range(1, len(ERROR_INDEX_BOUNDS_M) + 1)
    }
    return MetricsReport(
        label=label,
        n_samples=n,
        warmup_samples=sum(r.warmup_samples for r in reports),
        cle=cle,
        mae=cle / n,
        rmse=math.sqrt(sum_sq / n),
        within_bound=within,
        fgl_count=sum(r.fgl_count for r in reports),
    )


def fgl_overhead(report: MetricsReport, baseline: MetricsReport) -> float:
    """Relative extra fine-localization requests vs a paired baseline run."""
    if baseline.fgl_count == 0:
        raise UndefinedOverheadError(
            f"baseline {baseline.label!r} fired no fine localizations; overhead undefined"
        )
    return (report.fgl_count - baseline.fgl_count) / baseline.fgl_count


@dataclass(frozen=True)
class TheoryComparison:
    theory_mae: float
    relative_delta: float


def compare_theory(sim_mae: float, cell_side_L: float, range_R: float) -> TheoryComparison:
    """Relative deviation of a simulated coarse-grained MAE from the model."""
    theory = theoretical_mae(cell_side_L, range_R)
    return TheoryComparison(theory_mae=theory, relative_delta=(sim_mae - theory) / theory)
