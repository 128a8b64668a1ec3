"""Legends and label-assignment rules.

Two aggregative legends are modeled: a binary threshold legend (a unit is
"present" when the summed proportion of its target classes reaches the
threshold) and a majority legend (the most frequent class wins).  For
partitioned units two protocols turn per-cell proportions into one unit
label: threshold-then-majority (TTM) thresholds each cell and takes a
majority vote, majority-then-threshold (MTT) takes each cell's majority and
thresholds the fraction of target-majority cells.

Boundary conventions, which only matter on exact ties:

* the binary rule is inclusive (``>= t``), so the 50% legend is total;
* majority ties break toward the lowest class index and set ``tie_flag``;
* MTT counts a cell as target only when its target share is strictly above
  one half; TTM calls the unit present only when strictly more than half the
  cells are present.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BinaryThreshold",
    "Majority",
    "Label",
    "decide",
    "aggregate_ttm",
    "aggregate_mtt",
    "aggregate_majority_two_stage",
    "legend_to_dict",
    "legend_from_dict",
]


@dataclass(frozen=True)
class BinaryThreshold:
    """Presence/absence legend: present iff the target share is >= threshold."""

    target_classes: frozenset[int]
    threshold: float

    def __init__(self, target_classes, threshold):
        object.__setattr__(self, "target_classes", frozenset(int(c) for c in target_classes))
        object.__setattr__(self, "threshold", float(threshold))
        if not self.target_classes:
            raise ValueError("target_classes must be non-empty")
        if any(c < 0 for c in self.target_classes):
            raise ValueError("target class indices must be non-negative")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must be in (0, 1), got {self.threshold}")

    @property
    def name(self) -> str:
        classes = "+".join(str(c) for c in sorted(self.target_classes))
        return f"binary-c{classes}-t{self.threshold:g}"


@dataclass(frozen=True)
class Majority:
    """Most-frequent-class legend; no parameters."""

    @property
    def name(self) -> str:
        return "majority"


Legend = BinaryThreshold | Majority


@dataclass(frozen=True)
class Label:
    """A decided label: class index (majority) or presence flag (binary).

    ``tie_flag`` is set only when the decision rule hit an exact tie and fell
    back to its declared deterministic convention.
    """

    value: int | bool
    tie_flag: bool = False


def _target_share(proportions: np.ndarray, legend: BinaryThreshold) -> float:
    idx = sorted(legend.target_classes)
    if idx[-1] >= proportions.shape[-1]:
        raise ValueError(
            f"target class {idx[-1]} out of range for {proportions.shape[-1]} classes"
        )
    return float(proportions[..., idx].sum(axis=-1))


def decide(proportions, legend: Legend) -> Label:
    """Assign a label to one proportion vector under the given legend.

    Binary: present iff the summed target proportion is >= the threshold
    (inclusive).  Majority: argmax over classes; an exact tie goes to the
    lowest class index with ``tie_flag`` set.
    """
    p = np.asarray(proportions, dtype=float)
    if isinstance(legend, BinaryThreshold):
        return Label(bool(_target_share(p, legend) >= legend.threshold))
    if isinstance(legend, Majority):
        winners = np.flatnonzero(p == p.max())
        return Label(int(winners[0]), tie_flag=len(winners) > 1)
    raise TypeError(f"unknown legend type {type(legend).__name__}")


def aggregate_ttm(cell_proportions, legend: BinaryThreshold) -> Label:
    """Threshold-then-majority over partition cells.

    Each cell is thresholded like a miniature unit, then the unit is present
    iff strictly more than half the cells are; an exact half split falls back
    to absent with ``tie_flag`` set.
    """
    cells = _as_cell_matrix(cell_proportions)
    if not isinstance(legend, BinaryThreshold):
        raise TypeError("TTM aggregation requires a binary-threshold legend")
    shares = cells[:, sorted(legend.target_classes)].sum(axis=1)
    present = int(np.count_nonzero(shares >= legend.threshold))
    total = cells.shape[0]
    if 2 * present == total:
        return Label(False, tie_flag=True)
    return Label(bool(2 * present > total))


def aggregate_mtt(cell_proportions, legend: BinaryThreshold) -> Label:
    """Majority-then-threshold over partition cells.

    A cell counts as target when its target share is strictly above one half;
    the unit is present iff the fraction of target cells reaches the
    threshold.  A cell sitting exactly at one half is a majority tie (counted
    as non-target) and sets ``tie_flag``.
    """
    cells = _as_cell_matrix(cell_proportions)
    if not isinstance(legend, BinaryThreshold):
        raise TypeError("MTT aggregation requires a binary-threshold legend")
    shares = cells[:, sorted(legend.target_classes)].sum(axis=1)
    majority_cells = int(np.count_nonzero(shares > 0.5))
    fraction = majority_cells / cells.shape[0]
    return Label(bool(fraction >= legend.threshold), tie_flag=bool(np.any(shares == 0.5)))


def aggregate_majority_two_stage(cell_proportions) -> Label:
    """Two-stage majority: per-cell majority class, then a vote across cells.

    Ties at either stage break toward the lowest class index and set
    ``tie_flag``.
    """
    cells = _as_cell_matrix(cell_proportions)
    maxima = cells.max(axis=1, keepdims=True)
    cell_ties = (cells == maxima).sum(axis=1) > 1
    cell_labels = cells.argmax(axis=1)
    votes = np.bincount(cell_labels, minlength=cells.shape[1])
    winners = np.flatnonzero(votes == votes.max())
    tie = bool(cell_ties.any()) or len(winners) > 1
    return Label(int(winners[0]), tie_flag=tie)


def _as_cell_matrix(cell_proportions) -> np.ndarray:
    cells = np.atleast_2d(np.asarray(cell_proportions, dtype=float))
    if cells.size == 0:
        raise ValueError("cell proportion list must be non-empty")
    return cells


def legend_to_dict(legend: Legend) -> dict:
    """Serialize a legend to its config-file form."""
    if isinstance(legend, BinaryThreshold):
        return {
            "type": "binary",
            "classes": sorted(legend.target_classes),
            "threshold": legend.threshold,
        }
    if isinstance(legend, Majority):
        return {"type": "majority"}
    raise TypeError(f"unknown legend type {type(legend).__name__}")


def legend_from_dict(spec: dict) -> Legend:
    """Parse the config-file legend form (see ``legend_to_dict``)."""
    kind = spec.get("type")
    if kind == "binary":
        return BinaryThreshold(spec["classes"], spec["threshold"])
    if kind == "majority":
        return Majority()
    raise ValueError(f"unknown legend type {kind!r}")
