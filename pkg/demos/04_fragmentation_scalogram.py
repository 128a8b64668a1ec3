"""Choosing a sampling-unit size from landscape fragmentation.

The harder question behind every labeling campaign is how large the sampling
units should be.  Small units are mostly pure — cheap to label, but many are
needed; large units mix classes and push labels toward coin flips.  The
purity scalogram sweeps candidate unit sizes over a landscape and reports
what fraction of units would be nearly pure (>90% one class) versus badly
mixed (<50%), which is exactly the trade-off that matters for effort.

Run:  python3 demos/04_fragmentation_scalogram.py
"""

from pathlib import Path

from subsample_lab.harness import purity_scalogram
from subsample_lab.raster import generate_patch_mosaic
from subsample_lab.report import write_scalogram

OUT = Path(__file__).parent / "output" / "fragmentation_scalogram"

# A moderately fragmented five-class mosaic: ~200-cell patches.
raster = generate_patch_mosaic(720, 720, class_count=5, patch_density=50,
                               seed=9)

sides = (4, 8, 16, 30, 60, 120, 240)
rows = purity_scalogram(raster, sides)

print("unit side   nearly pure   badly mixed")
for row in rows:
    print(f"  {row.unit_side:7d}   {row.frac_purity_gt_090:11.1%}   "
          f"{row.frac_purity_lt_050:11.1%}")

written = write_scalogram(rows, OUT)
print("\ntable and SVG:")
for path in written:
    print(f"  {path}")
