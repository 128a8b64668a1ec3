"""Why the order of thresholding and majority voting matters.

A partition-based design splits the unit into k x k cells and aggregates
per-cell compositions two possible ways: threshold each cell first and let
the cells vote (TTM), or take each cell's majority class first and threshold
the vote (MTT).  At a 50% threshold both orders are the same decision — but
at low thresholds TTM silently demands the target to dominate individual
cells, and compact patches below cell size are systematically omitted.

Run:  python3 demos/02_partition_protocol_bias.py
"""

import numpy as np

from subsample_lab.designs import partition_cells
from subsample_lab.legends import (BinaryThreshold, aggregate_mtt,
                                   aggregate_ttm, decide)
from subsample_lab.raster import (CategoricalRaster, SamplingUnit,
                                  extract_units, generate_patch_mosaic,
                                  true_proportions)

# --- at t = 0.5 the two orders agree wherever no tie is flagged ---------
half = BinaryThreshold([1], 0.5)
agree = ties = 0
for seed in range(20):
    mosaic = generate_patch_mosaic(60, 60, class_count=2,
                                   patch_density=40, seed=seed)
    for unit in extract_units(mosaic, 10):
        cells = partition_cells(unit, 5)
        ttm = aggregate_ttm(cells, half)
        mtt = aggregate_mtt(cells, half)
        if ttm.tie_flag or mtt.tie_flag:
            ties += 1
        else:
            assert ttm.value == mtt.value
            agree += 1
print(f"t=0.50: {agree} tie-free units, all with identical labels "
      f"({ties} tie-flagged units set aside)")

# --- at t = 0.10 a compact patch defeats TTM ----------------------------
# One 8x8 patch in a 20x20 unit is 16% cover: present under the legend,
# but it fully dominates at most 4 of the 25 partition cells, so the
# threshold-first vote says absent every time.  Majority-first counts the
# same 4 dominated cells and compares 4/25 against t = 0.10: present.
low = BinaryThreshold([1], 0.10)
values = np.zeros((20, 20), dtype=np.int64)
values[4:12, 8:16] = 1
raster = CategoricalRaster.from_array(values, class_count=2)
unit = SamplingUnit(raster, 0, 0, 20)

proportions = true_proportions(unit)
truth = decide(proportions, low)
cells = partition_cells(unit, 5)
print(f"\nt=0.10, one compact patch, target share {proportions[1]:.2f}:")
print(f"  true label            {truth.value}")
print(f"  threshold-then-vote   {aggregate_ttm(cells, low).value}   <- omission")
print(f"  vote-then-threshold   {aggregate_mtt(cells, low).value}")
