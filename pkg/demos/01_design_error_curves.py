"""How labeling error depends on the response design and the unit itself.

A sampling unit is labeled from a handful of observations inside it, so the
label is a random variable: a unit whose target share sits right at the
binary threshold is a coin flip, while nearly pure units are almost never
mislabeled.  This script builds a synthetic landscape, simulates point-based
designs of increasing size next to partition-based designs, and writes the
per-design error table plus the error curves binned by unit composition.

Run:  python3 demos/01_design_error_curves.py
"""

from pathlib import Path

from subsample_lab.designs import PartitionBased, PointBased
from subsample_lab.harness import ExperimentConfig, run_experiment
from subsample_lab.legends import BinaryThreshold, Majority
from subsample_lab.raster import generate_smoothed_binary
from subsample_lab.report import write_report

OUT = Path(__file__).parent / "output" / "design_error_curves"

# A 660x660 landscape of smooth class-1 patches covering ~35% of the map,
# split into 60x60 sampling units.  Units then span the whole range of
# target shares, which is what makes the binned curves informative.
raster = generate_smoothed_binary(660, 660, smoothing_radius=25,
                                  cover_fraction=0.35, seed=11)

config = ExperimentConfig(
    legends=(BinaryThreshold([1], 0.5), Majority()),
    designs=(
        PointBased(9), PointBased(36), PointBased(144),
        PartitionBased(2, "TTM"), PartitionBased(2, "MTT"),
        PartitionBased(2, "TwoStageMajority"),
    ),
    unit_side=60,
    realizations=36,
    shifts=(0, 15, 30),
    master_seed=2,
    raster=raster,
)

report = run_experiment(config)

print("overall error by design (121 units, 36 draws each):")
for result in report.results:
    print(f"  {result.legend.name:18s} {result.design.name:28s} "
          f"error {result.overall_error:.4f}  (stderr {result.stderr:.4f})")

print()
print("points-n144 error by unit target share (bin center: mean error):")
curve = next(r for r in report.results
             if r.design.name == "points-n144").curve_by_pi
for center, mean, count in zip(curve.bin_centers, curve.mean_error, curve.counts):
    if count:
        bar = "#" * round(40 * mean)
        print(f"  {center:.3f}  {mean:.3f}  {bar}")

written = write_report(report, OUT)
print()
print("full tables and SVG curves:")
for path in written:
    print(f"  {path}")
