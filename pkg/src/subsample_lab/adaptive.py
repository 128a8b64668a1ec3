"""Sequential point labeling with confidence-based stopping.

Instead of a fixed sub-sample count, points are added one at a time until the
confidence interval around the estimated class proportion is decisive: for a
binary legend the interval must exclude the threshold, for a majority legend
the simultaneous lower bound of the leading class must clear the runner-up's
point estimate.  A hard cap bounds the effort on units whose true proportions
sit close to the decision boundary, where no finite sample can settle the
label.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .designs import draw_point_order
from .legends import BinaryThreshold, Label, Legend, Majority, decide
from .metrics import BinnedCurve, bin_errors, erp, purity
from .raster import CategoricalRaster, SamplingUnit, extract_units, true_proportions
from .stats import ConfidenceInterval, clopper_pearson, goodman_intervals

__all__ = [
    "AdaptiveConfig",
    "StopStatus",
    "StopDecision",
    "TraceEntry",
    "AdaptiveResult",
    "check_binary",
    "check_majority",
    "check_tallies",
    "adaptive_label",
    "optimization_experiment",
    "OptimizationReport",
    "UnitOptimizationRow",
]


class StopStatus(enum.Enum):
    CONTINUE = "Continue"
    STOP_CONFIDENT = "StopConfident"
    STOP_CAPPED = "StopCapped"


@dataclass(frozen=True)
class StopDecision:
    """Outcome of one stop check; ``label`` is set only when stopping."""

    status: StopStatus
    label: Label | None = None
    intervals: tuple[ConfidenceInterval, ...] = ()

    def __post_init__(self):
        if self.status is StopStatus.CONTINUE and self.label is not None:
            raise ValueError("a Continue decision carries no label")
        if self.status is not StopStatus.CONTINUE and self.label is None:
            raise ValueError(f"{self.status.value} requires a label")


@dataclass(frozen=True)
class TraceEntry:
    n: int
    tallies: tuple[int, ...]
    decision: StopDecision


@dataclass(frozen=True)
class AdaptiveResult:
    label: Label
    n_used: int
    trace: tuple[TraceEntry, ...]

    @property
    def status(self) -> StopStatus:
        return self.trace[-1].decision.status

    @property
    def capped(self) -> bool:
        return self.status is StopStatus.STOP_CAPPED


@dataclass(frozen=True)
class AdaptiveConfig:
    """Stopping-rule parameters: significance level, initial batch, cap."""

    legend: Legend
    alpha: float
    n_init: int = 9
    n_max: int = 144

    def __post_init__(self):
        if not isinstance(self.legend, (BinaryThreshold, Majority)):
            raise TypeError(f"unsupported legend {self.legend!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 1 <= self.n_init <= self.n_max:
            raise ValueError(
                f"need 1 <= n_init <= n_max, got {self.n_init}, {self.n_max}"
            )


def check_binary(m: int, n: int, threshold: float, alpha: float) -> StopDecision:
    """Stop check for a binary legend after ``m`` target points out of ``n``.

    Stops as soon as the exact binomial interval lies strictly on one side of
    the threshold; an interval touching the threshold keeps sampling.
    """
    if not 0 <= m <= n or n < 1:
        raise ValueError(f"need 0 <= m <= n >= 1, got m={m}, n={n}")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    ci = clopper_pearson(m, n, alpha)
    if ci.lower > threshold:
        return StopDecision(StopStatus.STOP_CONFIDENT, Label(True), (ci,))
    if ci.upper < threshold:
        return StopDecision(StopStatus.STOP_CONFIDENT, Label(False), (ci,))
    return StopDecision(StopStatus.CONTINUE, intervals=(ci,))


def check_majority(counts, alpha: float) -> StopDecision:
    """Stop check for a majority legend given per-class point tallies.

    Stops when the simultaneous lower bound of the most frequent class
    exceeds the point estimate of the second most frequent one.  A tie for
    the lead never stops.
    """
    tallies = np.asarray(counts, dtype=int)
    if tallies.size < 2:
        raise ValueError(f"need at least two classes, got {tallies.size}")
    n = int(tallies.sum())
    if n < 1:
        raise ValueError("need at least one labeled point")
    cis = tuple(goodman_intervals(tallies, alpha))
    order = np.argsort(tallies, kind="stable")
    leader, runner_up = int(order[-1]), int(order[-2])
    if tallies[leader] == tallies[runner_up]:
        return StopDecision(StopStatus.CONTINUE, intervals=cis)
    if cis[leader].lower > tallies[runner_up] / n:
        return StopDecision(StopStatus.STOP_CONFIDENT, Label(leader), cis)
    return StopDecision(StopStatus.CONTINUE, intervals=cis)


def check_tallies(tallies, n: int, config: AdaptiveConfig) -> StopDecision:
    """Dispatch the stop check matching the config's legend type."""
    tallies = np.asarray(tallies, dtype=int)
    if isinstance(config.legend, BinaryThreshold):
        m = int(tallies[sorted(config.legend.target_classes)].sum())
        return check_binary(m, n, config.legend.threshold, config.alpha)
    return check_majority(tallies, config.alpha)


def adaptive_label(unit: SamplingUnit, config: AdaptiveConfig,
                   rng_seed=0) -> AdaptiveResult:
    """Label one unit with sequentially grown point sub-samples.

    Draws an initial batch of ``n_init`` points without replacement, then adds
    one point per iteration until the stop check succeeds or the cap is hit.
    The cap is ``min(n_max, side**2)``; at ``side**2`` points the empirical
    proportions are exact, so a capped label is still the true one.  The trace
    records every evaluated (n, tallies, decision) triple; the final entry is
    always a stop.
    """
    cap = min(config.n_max, unit.cell_count)
    order = draw_point_order(unit.cell_count, rng_seed)
    classes = unit.cells.reshape(-1)[order]
    k = unit.parent.class_count
    n = min(config.n_init, cap)
    tallies = np.bincount(classes[:n], minlength=k)
    trace: list[TraceEntry] = []
    while True:
        decision = check_tallies(tallies, n, config)
        if decision.status is StopStatus.CONTINUE and n >= cap:
            label = decide(tallies / n, config.legend)
            decision = StopDecision(StopStatus.STOP_CAPPED, label, decision.intervals)
        trace.append(TraceEntry(n, tuple(int(c) for c in tallies), decision))
        if decision.status is not StopStatus.CONTINUE:
            return AdaptiveResult(decision.label, n, tuple(trace))
        tallies[classes[n]] += 1
        n += 1


@dataclass(frozen=True)
class UnitOptimizationRow:
    """Adaptive-labeling outcome for one unit, averaged over repetitions."""

    unit_row: int
    unit_col: int
    metric: float
    mean_n: float
    error_rate: float
    cap_hit_fraction: float


@dataclass(frozen=True)
class OptimizationReport:
    rows: tuple[UnitOptimizationRow, ...]
    repetitions: int
    mean_n: float
    error_rate: float
    cap_hit_fraction: float
    confident_stop_count: int
    confident_error_count: int
    curve: BinnedCurve = field(repr=False)

    @property
    def confident_error_rate(self) -> float:
        if self.confident_stop_count == 0:
            return 0.0
        return self.confident_error_count / self.confident_stop_count


def _unit_metric(proportions: np.ndarray, legend: Legend) -> float:
    if isinstance(legend, BinaryThreshold):
        return purity(proportions, legend.target_classes)
    return erp(proportions)


def optimization_experiment(raster: CategoricalRaster, config: AdaptiveConfig,
                            repetitions: int = 25, master_seed: int = 0,
                            unit_side: int = 180,
                            threads: int | None = None) -> OptimizationReport:
    """Measure adaptive effort and accuracy over every unit of a raster.

    Each unit is labeled ``repetitions`` times with seeds derived from
    ``(master_seed, unit_index, repetition)``, making the result independent
    of the execution schedule and of ``threads``.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    units = extract_units(raster, unit_side)
    if not units:
        raise ValueError(f"no unit of side {unit_side} fits the raster")

    def measure(item) -> tuple[UnitOptimizationRow, int, int, int, int]:
        index, unit = item
        props = true_proportions(unit)
        truth = decide(props, config.legend)
        n_total = wrong = caps = confident = confident_wrong = 0
        for rep in range(repetitions):
            seed = np.random.SeedSequence((master_seed, index, rep))
            result = adaptive_label(unit, config, seed)
            n_total += result.n_used
            mismatch = result.label.value != truth.value
            wrong += mismatch
            if result.capped:
                caps += 1
            else:
                confident += 1
                confident_wrong += mismatch
        row = UnitOptimizationRow(
            unit_row=unit.origin_row,
            unit_col=unit.origin_col,
            metric=_unit_metric(props, config.legend),
            mean_n=n_total / repetitions,
            error_rate=wrong / repetitions,
            cap_hit_fraction=caps / repetitions,
        )
        return row, n_total, wrong, confident, confident_wrong

    items = list(enumerate(units))
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(measure, items))
    else:
        outcomes = [measure(item) for item in items]

    rows = tuple(o[0] for o in outcomes)
    total = len(units) * repetitions
    n_sum = sum(o[1] for o in outcomes)
    wrong_sum = sum(o[2] for o in outcomes)
    confident_sum = sum(o[3] for o in outcomes)
    confident_wrong_sum = sum(o[4] for o in outcomes)
    curve = bin_errors([r.metric for r in rows], [r.error_rate for r in rows])
    return OptimizationReport(
        rows=rows,
        repetitions=repetitions,
        mean_n=n_sum / total,
        error_rate=wrong_sum / total,
        cap_hit_fraction=1.0 - confident_sum / total,
        confident_stop_count=confident_sum,
        confident_error_count=confident_wrong_sum,
        curve=curve,
    )
