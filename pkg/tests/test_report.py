"""Report writers: fixed CSV schemas, JSON summary, self-contained SVG."""

import csv
import json
import xml.etree.ElementTree as ET

import pytest

from subsample_lab.adaptive import AdaptiveConfig, optimization_experiment
from subsample_lab.designs import PartitionBased, PointBased
from subsample_lab.harness import (
    ErrorReport,
    ExperimentConfig,
    purity_scalogram,
    run_experiment,
)
from subsample_lab.legends import BinaryThreshold
from subsample_lab.raster import generate_patch_mosaic
from subsample_lab.report import (
    atomic_write_text,
    write_optimization_report,
    write_report,
    write_scalogram,
)

HALF = BinaryThreshold([1], 0.5)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def error_report():
    raster = generate_patch_mosaic(20, 20, class_count=2, patch_density=60,
                                   seed=3)
    config = ExperimentConfig(legends=(HALF,),
                              designs=(PointBased(4), PartitionBased(2, "TTM")),
                              unit_side=10, realizations=8, shifts=(0,),
                              master_seed=4, raster=raster)
    return run_experiment(config)


class TestAtomicWriteText:
    def test_writes_and_replaces(self, tmp_path):
        path = tmp_path / "out.txt"
        assert atomic_write_text(path, "first\n") == path
        atomic_write_text(path, "second\n")
        assert path.read_text() == "second\n"
        assert list(tmp_path.iterdir()) == [path]

    def test_unwritable_target_raises(self, tmp_path):
        with pytest.raises(OSError):
            atomic_write_text(tmp_path / "missing" / "out.txt", "x")


class TestWriteReport:
    def test_writes_expected_files(self, error_report, tmp_path):
        written = write_report(error_report, tmp_path)
        assert [p.name for p in written] == [
            "errors_by_design.csv", "errors_by_unit.csv", "curves.csv",
            "curves_pi.svg", "curves_erp.svg",
        ]

    def test_design_table_schema_and_values(self, error_report, tmp_path):
        write_report(error_report, tmp_path)
        rows = read_csv(tmp_path / "errors_by_design.csv")
        assert rows[0] == ["legend", "design", "protocol", "n_or_k",
                           "overall_error", "stderr"]
        assert len(rows) == 1 + len(error_report.results)
        point_row, partition_row = rows[1:]
        assert point_row[:4] == ["binary-c1-t0.5", "points", "", "4"]
        assert partition_row[:4] == ["binary-c1-t0.5", "partition", "TTM", "2"]
        # repr serialization round-trips the float exactly
        assert float(point_row[4]) == error_report.results[0].overall_error
        assert float(point_row[5]) == error_report.results[0].stderr

    def test_unit_table_schema_and_values(self, error_report, tmp_path):
        write_report(error_report, tmp_path)
        rows = read_csv(tmp_path / "errors_by_unit.csv")
        assert rows[0] == ["unit_row", "unit_col", "pi", "erp",
                           "legend", "design", "n_or_k", "error_rate"]
        expected = sum(len(res.per_unit) for res in error_report.results)
        assert len(rows) == 1 + expected
        first = error_report.results[0].per_unit[0]
        assert rows[1][:2] == [str(first.unit_row), str(first.unit_col)]
        assert float(rows[1][2]) == first.pi
        assert float(rows[1][7]) == first.error_rate

    def test_curve_table_schema_and_values(self, error_report, tmp_path):
        write_report(error_report, tmp_path)
        rows = read_csv(tmp_path / "curves.csv")
        assert rows[0] == ["metric", "bin_center", "mean_error", "count",
                           "legend", "design", "n_or_k"]
        # two metric families, full bin grid for every result
        bins = len(error_report.results[0].curve_by_pi.bin_centers)
        assert len(rows) == 1 + 2 * bins * len(error_report.results)
        assert {r[0] for r in rows[1:]} == {"pi", "erp"}
        # empty bins are preserved with a nan mean
        empty = [r for r in rows[1:] if r[3] == "0"]
        assert empty and all(r[2] == "nan" for r in empty)

    def test_charts_have_one_polyline_per_series(self, error_report, tmp_path):
        write_report(error_report, tmp_path)
        for name in ("curves_pi.svg", "curves_erp.svg"):
            root = ET.fromstring((tmp_path / name).read_text())
            assert root.tag.endswith("svg")
            polylines = root.findall(
                ".//{http://www.w3.org/2000/svg}polyline")
            assert len(polylines) == len(error_report.results)

    def test_rewrite_is_byte_identical(self, error_report, tmp_path):
        write_report(error_report, tmp_path / "a")
        write_report(error_report, tmp_path / "b")
        for name in ("errors_by_design.csv", "errors_by_unit.csv",
                     "curves.csv", "curves_pi.svg"):
            assert (tmp_path / "a" / name).read_bytes() == \
                   (tmp_path / "b" / name).read_bytes()

    def test_empty_report_writes_bare_tables(self, error_report, tmp_path):
        empty = ErrorReport(config=error_report.config, results=())
        written = write_report(empty, tmp_path)
        assert [p.name for p in written] == [
            "errors_by_design.csv", "errors_by_unit.csv", "curves.csv"]
        assert read_csv(tmp_path / "errors_by_design.csv") == [
            ["legend", "design", "protocol", "n_or_k", "overall_error",
             "stderr"]]


class TestWriteScalogram:
    def test_schema_and_chart(self, tmp_path):
        raster = generate_patch_mosaic(24, 24, class_count=3, patch_density=40,
                                       seed=7)
        rows = purity_scalogram(raster, [2, 4, 8])
        written = write_scalogram(rows, tmp_path)
        assert [p.name for p in written] == ["scalogram.csv", "scalogram.svg"]
        table = read_csv(tmp_path / "scalogram.csv")
        assert table[0] == ["unit_side", "frac_purity_gt_090",
                            "frac_purity_lt_050"]
        assert [r[0] for r in table[1:]] == ["2", "4", "8"]
        assert float(table[1][1]) == rows[0].frac_purity_gt_090
        root = ET.fromstring((tmp_path / "scalogram.svg").read_text())
        assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 2

    def test_empty_rows_write_header_only(self, tmp_path):
        written = write_scalogram([], tmp_path)
        assert [p.name for p in written] == ["scalogram.csv"]
        assert read_csv(tmp_path / "scalogram.csv") == [
            ["unit_side", "frac_purity_gt_090", "frac_purity_lt_050"]]


class TestWriteOptimizationReport:
    def test_table_summary_and_chart(self, tmp_path):
        raster = generate_patch_mosaic(20, 20, class_count=2, patch_density=60,
                                       seed=1)
        report = optimization_experiment(
            raster, AdaptiveConfig(HALF, 0.05, n_max=20), repetitions=2,
            master_seed=3, unit_side=10)
        written = write_optimization_report(report, tmp_path)
        assert [p.name for p in written] == [
            "optimization.csv", "optimization_summary.json",
            "optimization_effort.svg"]

        table = read_csv(tmp_path / "optimization.csv")
        assert table[0] == ["unit_row", "unit_col", "metric", "mean_n",
                            "error_rate", "cap_hit_fraction"]
        assert len(table) == 1 + len(report.rows)
        assert float(table[1][3]) == report.rows[0].mean_n

        summary = json.loads(
            (tmp_path / "optimization_summary.json").read_text())
        assert summary == {
            "repetitions": report.repetitions,
            "mean_n": report.mean_n,
            "error_rate": report.error_rate,
            "cap_hit_fraction": report.cap_hit_fraction,
            "confident_stop_count": report.confident_stop_count,
            "confident_error_count": report.confident_error_count,
            "confident_error_rate": report.confident_error_rate,
        }

        root = ET.fromstring(
            (tmp_path / "optimization_effort.svg").read_text())
        assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 1
