"""Labeling with as few points as the unit actually needs.

Fixed point budgets waste effort: a pure unit is decided after a handful of
observations, while only ambiguous units need the full budget.  The adaptive
labeler draws points one at a time and stops as soon as the confidence
interval around the running estimate clears the legend's decision boundary.
This script first walks through single-unit traces, then measures effort and
error across a whole landscape against the fixed 144-point benchmark.

Run:  python3 demos/03_adaptive_stopping.py
"""

from pathlib import Path

import numpy as np

from subsample_lab.adaptive import (AdaptiveConfig, adaptive_label,
                                    optimization_experiment)
from subsample_lab.designs import PointBased
from subsample_lab.harness import ExperimentConfig, run_point_experiment
from subsample_lab.legends import BinaryThreshold
from subsample_lab.raster import (CategoricalRaster, SamplingUnit,
                                  extract_units, generate_smoothed_binary,
                                  true_proportions)
from subsample_lab.report import write_optimization_report

OUT = Path(__file__).parent / "output" / "adaptive_stopping"
legend = BinaryThreshold([1], 0.5)


def trace_unit(title: str, values: np.ndarray, alpha: float) -> None:
    raster = CategoricalRaster.from_array(values, class_count=2)
    unit = SamplingUnit(raster, 0, 0, values.shape[0])
    result = adaptive_label(unit, AdaptiveConfig(legend, alpha=alpha))
    print(f"{title} (alpha={alpha}):")
    for entry in result.trace[-3:]:
        interval = entry.decision.intervals[0]
        print(f"  n={entry.n:3d}  target share "
              f"{entry.tallies[1] / entry.n:.2f}  "
              f"ci [{interval.lower:.3f}, {interval.upper:.3f}]  "
              f"{entry.decision.status.value}")
    print(f"  -> label {result.label.value} after {result.n_used} points "
          f"({result.status.value})\n")


rng = np.random.default_rng(0)
pure = np.ones((30, 30), dtype=np.int64)
mixed = (rng.random((30, 30)) < 0.52).astype(np.int64)

# A pure unit is decided the moment the interval can exclude 0.5 at all:
# after 11 unanimous points at alpha=0.001, after 9 at alpha=0.1.
trace_unit("pure unit", pure, alpha=0.001)
trace_unit("pure unit", pure, alpha=0.1)
# A 52/48 unit straddles the threshold; the labeler runs to the cap and
# falls back to the majority of what it saw.
trace_unit("52/48 unit", mixed, alpha=0.001)

# --- landscape-level effort ---------------------------------------------
raster = generate_smoothed_binary(600, 600, smoothing_radius=30,
                                  cover_fraction=0.25, seed=5)
config = AdaptiveConfig(legend, alpha=0.001, n_init=9, n_max=144)
report = optimization_experiment(raster, config, repetitions=25,
                                 master_seed=3, unit_side=60)

fixed = run_point_experiment(ExperimentConfig(
    legends=(legend,), designs=(PointBased(144),), unit_side=60,
    realizations=25, master_seed=3, raster=raster))

units = extract_units(raster, 60)
shares = np.array([float(true_proportions(u)[1]) for u in units])
print(f"landscape: {len(units)} units, "
      f"{np.mean((shares < 0.3) | (shares > 0.7)):.0%} of them far from t=0.5")
print(f"  adaptive mean effort   {report.mean_n:6.1f} points "
      f"(cap hit in {report.cap_hit_fraction:.1%} of runs)")
print(f"  fixed benchmark        {144:6.1f} points")
print(f"  adaptive error         {report.error_rate:.4f}")
print(f"  fixed-144 error        {fixed.results[0].overall_error:.4f}")
print(f"  mislabels among confident stops: {report.confident_error_count} "
      f"of {report.confident_stop_count}")

written = write_optimization_report(report, OUT)
print("\nper-unit effort table and summary:")
for path in written:
    print(f"  {path}")
