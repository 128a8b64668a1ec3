"""Response designs: random point sets and regular square partitions.

A response design turns one sampling unit into a label by inspecting only a
limited number of sub-samples (points or partition cells).  This module
simulates single realizations against ground truth; the Monte Carlo driver
lives in :mod:`subsample_lab.harness`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .legends import (
    BinaryThreshold,
    Label,
    Legend,
    Majority,
    aggregate_majority_two_stage,
    aggregate_mtt,
    aggregate_ttm,
    decide,
)
from .raster import CategoricalRaster, SamplingUnit, extract_units

__all__ = [
    "PointBased",
    "PartitionBased",
    "PROTOCOLS",
    "DEFAULT_SHIFTS",
    "draw_point_order",
    "sample_points",
    "partition_cells",
    "simulate_label",
    "shifted_unit_sets",
    "design_to_dict",
    "design_from_dict",
]

PROTOCOLS = ("TTM", "MTT", "TwoStageMajority")

# Grid-origin shifts used to build independent partition realizations; the
# Cartesian product of the defaults gives 36 shifted grids.
DEFAULT_SHIFTS = (22, 33, 44, 55, 66, 77)


@dataclass(frozen=True)
class PointBased:
    """Label from ``n_points`` random cells inside the unit."""

    n_points: int

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError(f"n_points must be positive, got {self.n_points}")

    @property
    def name(self) -> str:
        return f"points-n{self.n_points}"


@dataclass(frozen=True)
class PartitionBased:
    """Label from a k-by-k partition aggregated with the given protocol."""

    k_per_side: int
    protocol: str

    def __post_init__(self):
        if self.k_per_side < 1:
            raise ValueError(f"k_per_side must be positive, got {self.k_per_side}")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}, expected one of {PROTOCOLS}")

    @property
    def name(self) -> str:
        return f"partition-k{self.k_per_side}-{self.protocol}"


ResponseDesign = PointBased | PartitionBased


def draw_point_order(cell_count: int, seed) -> np.ndarray:
    """Random visit order of a unit's cells (a permutation of flat indices).

    Prefixes of the permutation are uniform without-replacement samples, so
    the same order serves both fixed-size draws and one-at-a-time growth.
    """
    rng = np.random.default_rng(seed)
    return rng.permutation(cell_count)


def sample_points(unit: SamplingUnit, n: int, rng_seed=0):
    """Draw ``n`` distinct cells uniformly and pair them with their classes.

    Returns a list of ``((row, col), class_index)`` with unit-relative cell
    coordinates; deterministic for a fixed seed.
    """
    if not 1 <= n <= unit.cell_count:
        raise ValueError(f"n must be in [1, {unit.cell_count}], got {n}")
    rng = np.random.default_rng(rng_seed)
    flat = rng.choice(unit.cell_count, size=n, replace=False)
    rows, cols = np.divmod(flat, unit.side)
    classes = unit.cells[rows, cols]
    return [((int(r), int(c)), int(v)) for r, c, v in zip(rows, cols, classes)]


def partition_cells(unit: SamplingUnit, k: int) -> np.ndarray:
    """Exact class proportions of each cell of a k-by-k partition.

    Returns an array of shape ``(k*k, class_count)`` in row-major cell order;
    ``k`` must divide the unit side.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if unit.side % k != 0:
        raise ValueError(f"k={k} does not divide unit side {unit.side}")
    sub = unit.side // k
    kc = unit.parent.class_count
    blocks = (unit.cells.reshape(k, sub, k, sub)
              .transpose(0, 2, 1, 3)
              .reshape(k * k, sub * sub))
    offsets = np.arange(k * k, dtype=np.int64)[:, None] * kc
    counts = np.bincount((blocks + offsets).ravel(), minlength=k * k * kc)
    return counts.reshape(k * k, kc) / (sub * sub)


def simulate_label(unit: SamplingUnit, design: ResponseDesign,
                   legend: Legend, rng_seed=0) -> Label:
    """One realization of a response design applied to a unit.

    Point designs estimate proportions from sampled cells and then apply the
    legend's decision rule; partition designs compute exact cell proportions
    and aggregate them with the design's protocol.  Protocols are tied to
    legend types: TTM/MTT need a binary legend, the two-stage majority needs
    the majority legend.
    """
    if isinstance(design, PointBased):
        sampled = sample_points(unit, design.n_points, rng_seed)
        classes = np.fromiter((c for _, c in sampled), dtype=np.int64, count=len(sampled))
        counts = np.bincount(classes, minlength=unit.parent.class_count)
        return decide(counts / design.n_points, legend)
    if isinstance(design, PartitionBased):
        cells = partition_cells(unit, design.k_per_side)
        if design.protocol == "TTM":
            if not isinstance(legend, BinaryThreshold):
                raise ValueError("TTM protocol requires a binary-threshold legend")
            return aggregate_ttm(cells, legend)
        if design.protocol == "MTT":
            if not isinstance(legend, BinaryThreshold):
                raise ValueError("MTT protocol requires a binary-threshold legend")
            return aggregate_mtt(cells, legend)
        if not isinstance(legend, Majority):
            raise ValueError("TwoStageMajority protocol requires the majority legend")
        return aggregate_majority_two_stage(cells)
    raise TypeError(f"unknown design type {type(design).__name__}")


def shifted_unit_sets(raster: CategoricalRaster, side: int,
                      shifts=None) -> list[list[SamplingUnit]]:
    """One unit list per grid-origin shift, over the product of offsets.

    ``shifts`` are offsets applied to both axes; the default six offsets give
    36 shifted grids.  Units sticking out of the raster are discarded; a
    shift that leaves no unit at all raises.
    """
    if shifts is None:
        shifts = DEFAULT_SHIFTS
    shifts = [int(s) for s in shifts]
    if any(s < 0 for s in shifts):
        raise ValueError("shifts must be non-negative")
    sets = []
    for dy in shifts:
        for dx in shifts:
            units = extract_units(raster, side, dy, dx)
            if not units:
                raise ValueError(
                    f"shift ({dy}, {dx}) leaves no unit inside the "
                    f"{raster.height}x{raster.width} raster at side {side}"
                )
            sets.append(units)
    return sets


def design_to_dict(design: ResponseDesign) -> dict:
    """Serialize a design to its config-file form."""
    if isinstance(design, PointBased):
        return {"type": "points", "n": design.n_points}
    if isinstance(design, PartitionBased):
        return {"type": "partition", "k": design.k_per_side, "protocol": design.protocol}
    raise TypeError(f"unknown design type {type(design).__name__}")


def design_from_dict(spec: dict) -> ResponseDesign:
    """Parse the config-file design form (see ``design_to_dict``)."""
    kind = spec.get("type")
    if kind == "points":
        return PointBased(int(spec["n"]))
    if kind == "partition":
        return PartitionBased(int(spec["k"]), spec.get("protocol", "TTM"))
    raise ValueError(f"unknown design type {kind!r}")
