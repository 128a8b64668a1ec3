"""Monte Carlo driver measuring response-design error rates over a landscape.

Point designs are evaluated with repeated random draws per sampling unit;
partition designs are evaluated deterministically on a set of shifted
partition grids, which plays the role of the repetition.  Both paths produce
the same report shape: overall error per design, per-unit error rates, and
error curves binned against unit purity and against the equivalent reference
probability.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .designs import (
    DEFAULT_SHIFTS,
    PartitionBased,
    PointBased,
    ResponseDesign,
    design_from_dict,
    design_to_dict,
    partition_cells,
    shifted_unit_sets,
)
from .legends import (
    BinaryThreshold,
    Legend,
    Majority,
    aggregate_majority_two_stage,
    aggregate_mtt,
    aggregate_ttm,
    decide,
    legend_from_dict,
    legend_to_dict,
)
from .metrics import BinnedCurve, bin_errors, erp
from .raster import (
    CategoricalRaster,
    extract_units,
    generate_patch_mosaic,
    generate_smoothed_binary,
    load_ascii_grid,
    true_proportions,
)

__all__ = [
    "ExperimentConfig",
    "UnitErrorRow",
    "DesignResult",
    "ErrorReport",
    "ScalogramRow",
    "run_point_experiment",
    "run_partition_experiment",
    "run_experiment",
    "purity_scalogram",
    "build_raster",
]


def build_raster(spec: dict) -> CategoricalRaster:
    """Materialize the raster named by a config's raster block.

    Three kinds: ``file`` (ASCII grid path), ``patch-mosaic``, and
    ``smoothed-binary`` (generator parameters passed through).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("raster spec must be a mapping with a 'kind' field")
    kind = spec["kind"]
    args = {k: v for k, v in spec.items() if k != "kind"}
    try:
        if kind == "file":
            return load_ascii_grid(args.pop("path"))
        if kind == "patch-mosaic":
            return generate_patch_mosaic(**args)
        if kind == "smoothed-binary":
            return generate_smoothed_binary(**args)
    except KeyError as exc:
        raise ValueError(f"raster spec missing field {exc}") from exc
    except TypeError as exc:
        raise ValueError(f"bad raster spec for kind {kind!r}: {exc}") from exc
    raise ValueError(f"unknown raster kind {kind!r}")


def _compatible(legend: Legend, design: ResponseDesign) -> bool:
    if isinstance(design, PointBased):
        return True
    if design.protocol == "TwoStageMajority":
        return isinstance(legend, Majority)
    return isinstance(legend, BinaryThreshold)


_CONFIG_KEYS = {
    "raster", "unit_side", "legends", "designs", "realizations",
    "shifts", "master_seed", "output_dir",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run needs, serializable to JSON."""

    legends: tuple[Legend, ...]
    designs: tuple[ResponseDesign, ...]
    unit_side: int = 180
    realizations: int = 36
    shifts: tuple[int, ...] = DEFAULT_SHIFTS
    master_seed: int = 0
    raster_spec: dict | None = None
    output_dir: str | None = None
    raster: CategoricalRaster | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "legends", tuple(self.legends))
        object.__setattr__(self, "designs", tuple(self.designs))
        object.__setattr__(self, "shifts", tuple(int(s) for s in self.shifts))
        if self.unit_side < 2:
            raise ValueError(f"unit_side must be >= 2, got {self.unit_side}")
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        cells = self.unit_side ** 2
        for design in self.designs:
            if isinstance(design, PointBased) and design.n_points > cells:
                raise ValueError(
                    f"design {design.name}: {design.n_points} points exceed "
                    f"the {cells} cells of a unit"
                )
            if isinstance(design, PartitionBased) and self.unit_side % design.k_per_side:
                raise ValueError(
                    f"design {design.name}: k={design.k_per_side} does not "
                    f"divide unit side {self.unit_side}"
                )
            if self.legends and not any(_compatible(lg, design) for lg in self.legends):
                raise ValueError(f"design {design.name} fits none of the legends")

    def resolve_raster(self) -> CategoricalRaster:
        if self.raster is not None:
            return self.raster
        if self.raster_spec is None:
            raise ValueError("config names no raster (neither object nor spec)")
        return build_raster(self.raster_spec)

    def to_dict(self) -> dict:
        out: dict = {
            "unit_side": self.unit_side,
            "legends": [legend_to_dict(lg) for lg in self.legends],
            "designs": [design_to_dict(d) for d in self.designs],
            "realizations": self.realizations,
            "shifts": list(self.shifts),
            "master_seed": self.master_seed,
        }
        if self.raster_spec is not None:
            out["raster"] = self.raster_spec
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out

    @classmethod
    def from_dict(cls, spec: dict) -> "ExperimentConfig":
        unknown = set(spec) - _CONFIG_KEYS
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        try:
            legends = tuple(legend_from_dict(lg) for lg in spec.get("legends", []))
            designs = tuple(design_from_dict(d) for d in spec.get("designs", []))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad legend or design entry: {exc}") from exc
        return cls(
            legends=legends,
            designs=designs,
            unit_side=int(spec.get("unit_side", 180)),
            realizations=int(spec.get("realizations", 36)),
            shifts=tuple(spec.get("shifts", DEFAULT_SHIFTS)),
            master_seed=int(spec.get("master_seed", 0)),
            raster_spec=spec.get("raster"),
            output_dir=spec.get("output_dir"),
        )


@dataclass(frozen=True)
class UnitErrorRow:
    """Error of one unit under one (legend, design): purity, dominance, rate."""

    unit_row: int
    unit_col: int
    pi: float
    erp: float
    error_rate: float


@dataclass(frozen=True)
class DesignResult:
    legend: Legend
    design: ResponseDesign
    overall_error: float
    stderr: float
    per_unit: tuple[UnitErrorRow, ...]
    curve_by_pi: BinnedCurve = field(repr=False)
    curve_by_erp: BinnedCurve = field(repr=False)


@dataclass(frozen=True)
class ErrorReport:
    config: ExperimentConfig
    results: tuple[DesignResult, ...]


def _row_bincount(classes: np.ndarray, class_count: int) -> np.ndarray:
    """Per-row bincount of a 2-D integer array, shape (rows, class_count)."""
    rows = classes.shape[0]
    offsets = np.arange(rows, dtype=np.int64)[:, None] * class_count
    flat = (classes.astype(np.int64) + offsets).ravel()
    return np.bincount(flat, minlength=rows * class_count).reshape(rows, class_count)


def _sample_indices(rng: np.random.Generator, draws: int, n: int, pool: int) -> np.ndarray:
    """``draws`` rows of ``n`` distinct uniform indices from ``[0, pool)``.

    Dense draws use random-key selection; sparse draws use rejection of rows
    with duplicates, which conditions independent uniforms on distinctness and
    so stays an exact without-replacement sample.
    """
    if not 1 <= n <= pool:
        raise ValueError(f"need 1 <= n <= {pool}, got {n}")
    if n == pool:
        return np.tile(np.arange(pool, dtype=np.int64), (draws, 1))
    if 3 * n >= pool or pool <= 2048:
        out = np.empty((draws, n), dtype=np.int64)
        chunk = max(1, int(4e6) // pool)
        for start in range(0, draws, chunk):
            stop = min(draws, start + chunk)
            keys = rng.random((stop - start, pool))
            out[start:stop] = np.argpartition(keys, n - 1, axis=1)[:, :n]
        return out
    idx = rng.integers(0, pool, size=(draws, n), dtype=np.int64)
    while True:
        ordered = np.sort(idx, axis=1)
        bad = (np.diff(ordered, axis=1) == 0).any(axis=1)
        if not bad.any():
            return idx
        idx[bad] = rng.integers(0, pool, size=(int(bad.sum()), n), dtype=np.int64)


def _point_error(flat: np.ndarray, class_count: int, legend: Legend,
                 truth_value, n: int, draws: int, seed) -> float:
    """Mislabel fraction of ``draws`` independent n-point samples of one unit."""
    rng = np.random.default_rng(seed)
    chunk = max(1, int(2e7) // max(n, 1))
    wrong = 0
    if isinstance(legend, BinaryThreshold):
        targets = np.fromiter(sorted(legend.target_classes), dtype=np.int64)
        in_target = np.isin(flat, targets)
    for start in range(0, draws, chunk):
        r = min(chunk, draws - start)
        idx = _sample_indices(rng, r, n, flat.size)
        if isinstance(legend, BinaryThreshold):
            m = in_target[idx].sum(axis=1)
            predicted = (m / n) >= legend.threshold
        else:
            counts = _row_bincount(flat[idx], class_count)
            predicted = counts.argmax(axis=1)
        wrong += int(np.sum(predicted != truth_value))
    return wrong / draws


def _unit_pi(proportions: np.ndarray, legend: Legend) -> float:
    if isinstance(legend, BinaryThreshold):
        idx = sorted(legend.target_classes)
        return float(proportions[idx].sum())
    return float(proportions.max())


def _finish(legend: Legend, design: ResponseDesign,
            rows: list[UnitErrorRow], overall: float, stderr: float) -> DesignResult:
    errors = [r.error_rate for r in rows]
    return DesignResult(
        legend=legend,
        design=design,
        overall_error=overall,
        stderr=stderr,
        per_unit=tuple(rows),
        curve_by_pi=bin_errors([r.pi for r in rows], errors),
        curve_by_erp=bin_errors([r.erp for r in rows], errors),
    )


def _pool_map(fn, items, threads):
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def run_point_experiment(config: ExperimentConfig,
                         threads: int | None = None) -> ErrorReport:
    """Error rates of all point designs, ``config.realizations`` draws each.

    Draw seeds derive from (master_seed, legend index, design index, unit
    index), so results do not depend on scheduling or thread count.
    """
    raster = config.resolve_raster()
    units = extract_units(raster, config.unit_side)
    if not units:
        raise ValueError(f"no unit of side {config.unit_side} fits the raster")
    pairs = [
        (li, legend, di, design)
        for li, legend in enumerate(config.legends)
        for di, design in enumerate(config.designs)
        if isinstance(design, PointBased)
    ]
    props = [true_proportions(u) for u in units]
    flats = [np.ascontiguousarray(u.cells.reshape(-1)) for u in units]
    erps = [erp(p) for p in props]

    def one(task) -> UnitErrorRow:
        (li, legend, di, design), ui = task
        truth = decide(props[ui], legend)
        seed = np.random.SeedSequence((config.master_seed, li, di, ui))
        rate = _point_error(flats[ui], raster.class_count, legend, truth.value,
                            design.n_points, config.realizations, seed)
        return UnitErrorRow(units[ui].origin_row, units[ui].origin_col,
                            _unit_pi(props[ui], legend), erps[ui], rate)

    tasks = [(pair, ui) for pair in pairs for ui in range(len(units))]
    rows = _pool_map(one, tasks, threads)

    results = []
    for j, (_, legend, _, design) in enumerate(pairs):
        pair_rows = rows[j * len(units):(j + 1) * len(units)]
        errors = np.asarray([r.error_rate for r in pair_rows])
        stderr = float(errors.std(ddof=1) / math.sqrt(errors.size)) if errors.size > 1 else 0.0
        results.append(_finish(legend, design, pair_rows, float(errors.mean()), stderr))
    return ErrorReport(config=config, results=tuple(results))


def _aggregate_cells(cells: np.ndarray, design: PartitionBased, legend: Legend):
    if design.protocol == "TTM":
        return aggregate_ttm(cells, legend)
    if design.protocol == "MTT":
        return aggregate_mtt(cells, legend)
    return aggregate_majority_two_stage(cells)


def run_partition_experiment(config: ExperimentConfig,
                             threads: int | None = None) -> ErrorReport:
    """Error rates of all partition designs over the shifted-grid realizations.

    Each shifted grid origin is one deterministic realization; per-unit rows
    from all realizations are pooled for the curves, while the overall error
    averages realizations with equal weight.
    """
    raster = config.resolve_raster()
    pairs = [
        (legend, design)
        for legend in config.legends
        for design in config.designs
        if isinstance(design, PartitionBased) and _compatible(legend, design)
    ]
    if not pairs:
        return ErrorReport(config=config, results=())
    unit_sets = shifted_unit_sets(raster, config.unit_side, config.shifts)
    ks = sorted({design.k_per_side for _, design in pairs})

    def one(units) -> list[list[UnitErrorRow]]:
        per_pair: list[list[UnitErrorRow]] = [[] for _ in pairs]
        for unit in units:
            p = true_proportions(unit)
            erp_val = erp(p)
            cells_by_k = {k: partition_cells(unit, k) for k in ks}
            for j, (legend, design) in enumerate(pairs):
                truth = decide(p, legend)
                label = _aggregate_cells(cells_by_k[design.k_per_side], design, legend)
                per_pair[j].append(UnitErrorRow(
                    unit.origin_row, unit.origin_col, _unit_pi(p, legend),
                    erp_val, float(label.value != truth.value)))
        return per_pair

    outcomes = _pool_map(one, unit_sets, threads)

    results = []
    for j, (legend, design) in enumerate(pairs):
        rows: list[UnitErrorRow] = []
        realization_means = []
        for per_pair in outcomes:
            rows.extend(per_pair[j])
            realization_means.append(float(np.mean([r.error_rate for r in per_pair[j]])))
        means = np.asarray(realization_means)
        overall = float(means.mean())
        stderr = float(means.std(ddof=1) / math.sqrt(means.size)) if means.size > 1 else 0.0
        results.append(_finish(legend, design, rows, overall, stderr))
    return ErrorReport(config=config, results=tuple(results))


def run_experiment(config: ExperimentConfig,
                   threads: int | None = None) -> ErrorReport:
    """Point and partition experiments merged into one report."""
    point = run_point_experiment(config, threads)
    partition = run_partition_experiment(config, threads)
    return ErrorReport(config=config, results=point.results + partition.results)


@dataclass(frozen=True)
class ScalogramRow:
    unit_side: int
    frac_purity_gt_090: float
    frac_purity_lt_050: float


def purity_scalogram(raster: CategoricalRaster, unit_sides) -> list[ScalogramRow]:
    """Fractions of near-pure (> 0.9) and mixed (< 0.5) units per unit size.

    Purity here is the majority-class share of each unit; comparisons are
    strict, so a unit at exactly 0.5 counts in neither fraction.
    """
    rows = []
    for side in unit_sides:
        side = int(side)
        if side < 1 or side > min(raster.height, raster.width):
            raise ValueError(f"unit side {side} does not fit the raster")
        h = raster.height // side * side
        w = raster.width // side * side
        blocks = (raster.values[:h, :w]
                  .reshape(h // side, side, w // side, side)
                  .transpose(0, 2, 1, 3)
                  .reshape(-1, side * side))
        counts = _row_bincount(blocks, raster.class_count)
        pis = counts.max(axis=1) / (side * side)
        rows.append(ScalogramRow(side, float(np.mean(pis > 0.9)),
                                 float(np.mean(pis < 0.5))))
    return rows
