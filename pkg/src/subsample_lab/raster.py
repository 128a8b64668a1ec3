"""Categorical rasters, ESRI ASCII grid I/O, synthetic landscapes, and
extraction of square sampling units.

A raster is a dense grid of class indices playing the role of error-free
ground truth.  Sampling units are side-by-side square blocks of raster cells;
one unit stands in for a single coarse-resolution map pixel whose reference
label is to be estimated from sub-samples.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage, spatial

__all__ = [
    "CategoricalRaster",
    "SamplingUnit",
    "load_ascii_grid",
    "save_ascii_grid",
    "generate_patch_mosaic",
    "generate_smoothed_binary",
    "extract_units",
    "class_counts",
    "true_proportions",
]

_HEADER_KEYS = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"}


@dataclass(frozen=True, eq=False)
class CategoricalRaster:
    """Immutable grid of class indices in ``[0, class_count)``.

    Parameters
    ----------
    values : ndarray
        Integer array of shape ``(height, width)``, row-major.
    cell_size : float
        Ground length of one cell edge, in meters.
    class_count : int
        Number of classes; every cell value must be smaller.
    class_names : list of str, optional
        Human-readable labels, one per class.
    """

    values: np.ndarray
    cell_size: float
    class_count: int
    class_names: list[str] | None = None

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.int32)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"values must be a non-empty 2-D grid, got shape {values.shape}")
        if self.cell_size <= 0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        if self.class_count < 1:
            raise ValueError(f"class_count must be positive, got {self.class_count}")
        if values.min() < 0 or values.max() >= self.class_count:
            raise ValueError(
                f"cell values must lie in [0, {self.class_count}), "
                f"found range [{values.min()}, {values.max()}]"
            )
        if self.class_names is not None and len(self.class_names) != self.class_count:
            raise ValueError("class_names length must equal class_count")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_array(cls, values, cell_size=1.0, class_count=None, class_names=None):
        """Build a raster, inferring ``class_count`` as max value + 1 if absent."""
        values = np.asarray(values)
        if class_count is None:
            class_count = int(values.max()) + 1 if values.size else 1
        return cls(values, float(cell_size), int(class_count), class_names)


@dataclass(frozen=True, eq=False)
class SamplingUnit:
    """One square block of cells inside a parent raster."""

    parent: CategoricalRaster
    origin_row: int
    origin_col: int
    side: int

    def __post_init__(self):
        if self.side < 2:
            raise ValueError(f"unit side must be at least 2, got {self.side}")
        if self.origin_row < 0 or self.origin_col < 0:
            raise ValueError("unit origin must be non-negative")
        if (self.origin_row + self.side > self.parent.height
                or self.origin_col + self.side > self.parent.width):
            raise ValueError(
                f"unit at ({self.origin_row}, {self.origin_col}) with side {self.side} "
                f"exceeds raster extent {self.parent.height}x{self.parent.width}"
            )

    @property
    def cells(self) -> np.ndarray:
        """Read-only view of the unit's cell values, shape ``(side, side)``."""
        r, c, s = self.origin_row, self.origin_col, self.side
        return self.parent.values[r:r + s, c:c + s]

    @property
    def cell_count(self) -> int:
        return self.side * self.side


def load_ascii_grid(source) -> CategoricalRaster:
    """Parse an ESRI ASCII grid into a categorical raster.

    ``source`` may be an open text stream, a path, or a string of grid text.
    Header keys are matched case-insensitively.  Cells must be non-negative
    integers; a declared NODATA value appearing in the grid is rejected
    because reference rasters must be complete.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        path = Path(source)
        if "\n" in str(source) or not path.exists():
            text = str(source)
        else:
            text = path.read_text()

    header: dict[str, float] = {}
    lines = text.splitlines()
    data_start = 0
    for i, line in enumerate(lines):
        parts = line.split()
        if len(parts) == 2 and parts[0].lower() in _HEADER_KEYS:
            key = parts[0].lower()
            try:
                header[key] = float(parts[1])
            except ValueError:
                raise ValueError(f"malformed header line: {line!r}") from None
            data_start = i + 1
        elif parts:
            break

    for key in ("ncols", "nrows", "cellsize"):
        if key not in header:
            raise ValueError(f"missing required header key {key!r}")
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    if ncols < 1 or nrows < 1 or ncols != header["ncols"] or nrows != header["nrows"]:
        raise ValueError(f"invalid grid dimensions {header['nrows']}x{header['ncols']}")
    cell_size = header["cellsize"]
    if cell_size <= 0:
        raise ValueError(f"cellsize must be positive, got {cell_size}")

    tokens = " ".join(lines[data_start:]).split()
    if len(tokens) != ncols * nrows:
        raise ValueError(
            f"expected {ncols * nrows} cell values, found {len(tokens)}"
        )
    try:
        flat = np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError:
        bad = next(t for t in tokens if not _is_int(t))
        raise ValueError(f"non-integer cell value: {bad!r}") from None

    if "nodata_value" in header:
        nodata = header["nodata_value"]
        if np.any(flat == nodata):
            raise ValueError("grid contains NODATA cells; reference rasters must be complete")
    if flat.min() < 0:
        raise ValueError(f"negative class index: {flat.min()}")

    values = flat.reshape(nrows, ncols)
    return CategoricalRaster.from_array(values, cell_size=cell_size)


def _is_int(token: str) -> bool:
    try:
        int(token)
        return True
    except ValueError:
        return False


def save_ascii_grid(raster: CategoricalRaster, target=None) -> str:
    """Serialize a raster as ESRI ASCII grid text (origin pinned to 0, 0).

    Writes to ``target`` (stream or path) when given; always returns the text.
    """
    out = io.StringIO()
    out.write(f"ncols {raster.width}\n")
    out.write(f"nrows {raster.height}\n")
    out.write("xllcorner 0\n")
    out.write("yllcorner 0\n")
    out.write(f"cellsize {repr(float(raster.cell_size))}\n")
    for row in raster.values:
        out.write(" ".join(str(int(v)) for v in row))
        out.write("\n")
    text = out.getvalue()
    if target is not None:
        if hasattr(target, "write"):
            target.write(text)
        else:
            Path(target).write_text(text)
    return text


def generate_patch_mosaic(width, height, class_count, patch_density,
                          class_weights=None, seed=0, cell_size=1.0) -> CategoricalRaster:
    """Voronoi mosaic landscape: patches of random classes around random sites.

    Parameters
    ----------
    patch_density : float
        Expected number of patch seed sites per 10^4 cells; higher values give
        a more fragmented landscape.
    class_weights : sequence of float, optional
        Relative probability of each class at a site; uniform when omitted.

    Sites are drawn uniformly over the grid and every cell takes the class of
    its nearest site, so the output is a pure function of the arguments.
    """
    if width < 1 or height < 1:
        raise ValueError(f"degenerate raster dimensions {height}x{width}")
    if class_count < 1:
        raise ValueError(f"class_count must be positive, got {class_count}")
    if patch_density <= 0:
        raise ValueError(f"patch_density must be positive, got {patch_density}")
    if class_weights is None:
        class_weights = np.ones(class_count)
    class_weights = np.asarray(class_weights, dtype=float)
    if class_weights.shape != (class_count,):
        raise ValueError("class_weights length must equal class_count")
    if np.any(class_weights < 0) or class_weights.sum() <= 0:
        raise ValueError("class_weights must be non-negative with positive sum")

    rng = np.random.default_rng(seed)
    n_sites = max(1, round(width * height * patch_density / 1e4))
    sites = np.column_stack([rng.uniform(0, height, n_sites),
                             rng.uniform(0, width, n_sites)])
    site_classes = rng.choice(class_count, size=n_sites, p=class_weights / class_weights.sum())

    rows, cols = np.mgrid[0:height, 0:width]
    centers = np.column_stack([rows.ravel() + 0.5, cols.ravel() + 0.5])
    # Continuous site coordinates make exact distance ties measure-zero, so
    # the nearest-site lookup is deterministic for a fixed seed.
    _, nearest = spatial.cKDTree(sites).query(centers, k=1)
    values = site_classes[nearest].reshape(height, width)
    return CategoricalRaster(values, float(cell_size), int(class_count))


def generate_smoothed_binary(width, height, smoothing_radius, cover_fraction,
                             seed=0, cell_size=1.0) -> CategoricalRaster:
    """Binary landscape from thresholded smoothed white noise.

    White noise is box-filtered with the given radius (in cells) and cut at
    the empirical ``1 - cover_fraction`` quantile, so class 1 covers close to
    ``cover_fraction`` of the grid regardless of the smoothing.  Larger radii
    produce larger, smoother patches.
    """
    if width < 1 or height < 1:
        raise ValueError(f"degenerate raster dimensions {height}x{width}")
    if not 0.0 < cover_fraction < 1.0:
        raise ValueError(f"cover_fraction must be in (0, 1), got {cover_fraction}")
    if smoothing_radius < 0:
        raise ValueError(f"smoothing_radius must be non-negative, got {smoothing_radius}")

    rng = np.random.default_rng(seed)
    noise = rng.random((height, width))
    size = 2 * int(smoothing_radius) + 1
    smooth = ndimage.uniform_filter(noise, size=size, mode="reflect") if size > 1 else noise
    threshold = np.quantile(smooth, 1.0 - cover_fraction)
    values = (smooth > threshold).astype(np.int32)
    return CategoricalRaster(values, float(cell_size), 2)


def extract_units(raster: CategoricalRaster, side: int,
                  row_offset: int = 0, col_offset: int = 0) -> list[SamplingUnit]:
    """All non-overlapping side-by-side blocks fully inside the raster.

    Blocks start at ``(row_offset + i*side, col_offset + j*side)`` and are
    returned in row-major order; blocks that would stick out are discarded.
    """
    if side < 2:
        raise ValueError(f"unit side must be at least 2, got {side}")
    if side > raster.height or side > raster.width:
        raise ValueError(
            f"unit side {side} exceeds raster extent {raster.height}x{raster.width}"
        )
    if row_offset < 0 or col_offset < 0:
        raise ValueError("offsets must be non-negative")
    n_rows = (raster.height - row_offset) // side
    n_cols = (raster.width - col_offset) // side
    return [
        SamplingUnit(raster, row_offset + i * side, col_offset + j * side, side)
        for i in range(n_rows)
        for j in range(n_cols)
    ]


def class_counts(unit: SamplingUnit) -> np.ndarray:
    """Exact per-class cell counts over the unit, length ``class_count``."""
    return np.bincount(unit.cells.ravel(), minlength=unit.parent.class_count)


def true_proportions(unit: SamplingUnit) -> np.ndarray:
    """Exact per-class cell fractions over the unit's ``side**2`` cells."""
    return class_counts(unit) / unit.cell_count
