"""Command-line entry point.

Subcommands: ``generate`` (synthetic rasters), ``simulate`` (design error
experiments), ``optimize`` (sequential-stopping experiment), ``scalogram``
(purity vs. unit size), ``serve`` (labeling session service), and ``label``
(one adaptive run with a printed trace).  Exit codes: 0 success, 2 config
error, 1 runtime error.  Seeds resolve flag > config file > the
SUBSAMPLE_LAB_SEED environment variable > 0.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .adaptive import AdaptiveConfig, adaptive_label, optimization_experiment
from .designs import PartitionBased, PointBased, design_to_dict
from .harness import (
    ExperimentConfig,
    build_raster,
    purity_scalogram,
    run_experiment,
    run_partition_experiment,
    run_point_experiment,
)
from .legends import BinaryThreshold, Majority, legend_from_dict, legend_to_dict
from .raster import extract_units, load_ascii_grid, save_ascii_grid
from .report import (
    atomic_write_text,
    write_optimization_report,
    write_report,
    write_scalogram,
)

__all__ = ["main"]

_DEFAULT_RASTER_NOTE = (
    "defaults to a generated 1980x1980 smoothed binary landscape when no "
    "raster is given"
)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _json_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}")


def _resolve_seed(flag_seed, config_seed=None) -> int:
    if flag_seed is not None:
        return int(flag_seed)
    if config_seed is not None:
        return int(config_seed)
    env = os.environ.get("SUBSAMPLE_LAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"SUBSAMPLE_LAB_SEED must be an integer, got {env!r}")
    return 0


def _threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise ValueError(f"--threads must be >= 1, got {args.threads}")
        return args.threads
    return os.cpu_count() or 1


def _default_raster_spec(seed: int) -> dict:
    return {
        "kind": "smoothed-binary",
        "width": 1980,
        "height": 1980,
        "smoothing_radius": 45,
        "cover_fraction": 0.5,
        "seed": seed,
    }


def _load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except FileNotFoundError:
        raise ValueError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(spec, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return spec


def _parse_legends(text):
    spec = _json_value(text) if isinstance(text, str) else text
    if isinstance(spec, dict):
        spec = [spec]
    if not isinstance(spec, list) or not spec:
        raise ValueError("legends must be a JSON object or non-empty array")
    return tuple(legend_from_dict(entry) for entry in spec)


def _simulate_config(args) -> ExperimentConfig:
    spec = _load_config_file(args.config) if args.config else {}
    config = ExperimentConfig.from_dict(spec)
    seed = _resolve_seed(args.seed, spec.get("master_seed"))

    legends = config.legends
    if args.legends is not None:
        legends = _parse_legends(args.legends)
    if not legends:
        legends = (BinaryThreshold([1], 0.5),)

    designs = list(config.designs)
    if args.n is not None:
        designs = [d for d in designs if not isinstance(d, PointBased)]
        designs.extend(PointBased(n) for n in args.n)
    if args.k is not None:
        designs = [d for d in designs if not isinstance(d, PartitionBased)]
        if args.protocols is not None:
            protocols = [p.strip() for p in args.protocols.split(",") if p.strip()]
        else:
            protocols = []
            if any(isinstance(lg, BinaryThreshold) for lg in legends):
                protocols += ["TTM", "MTT"]
            if any(isinstance(lg, Majority) for lg in legends):
                protocols += ["TwoStageMajority"]
        designs.extend(PartitionBased(k, p) for k in args.k for p in protocols)
    if not designs:
        designs = [PointBased(n) for n in (4, 9, 16, 25, 36, 100, 144)]

    raster_spec = config.raster_spec
    if args.raster is not None:
        raster_spec = {"kind": "file", "path": str(args.raster)}
    if raster_spec is None:
        raster_spec = _default_raster_spec(seed)

    return dataclasses.replace(
        config,
        legends=tuple(legends),
        designs=tuple(designs),
        unit_side=args.unit_side if args.unit_side is not None else config.unit_side,
        realizations=(args.realizations if args.realizations is not None
                      else config.realizations),
        master_seed=seed,
        raster_spec=raster_spec,
        output_dir=str(args.out) if args.out else config.output_dir,
    )


def _cmd_generate(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.kind == "patch-mosaic":
        spec = {
            "kind": "patch-mosaic",
            "width": args.width,
            "height": args.height,
            "class_count": args.classes,
            "patch_density": args.patch_density,
            "seed": seed,
        }
        if args.class_weights is not None:
            weights = [float(w) for w in args.class_weights.split(",")]
            spec["class_weights"] = weights
    else:
        spec = {
            "kind": "smoothed-binary",
            "width": args.width,
            "height": args.height,
            "smoothing_radius": args.smoothing_radius,
            "cover_fraction": args.cover_fraction,
            "seed": seed,
        }
    if args.print_config:
        print(json.dumps(spec, indent=2, sort_keys=True))
        return 0
    raster = build_raster(spec)
    atomic_write_text(args.out, save_ascii_grid(raster))
    print(f"wrote {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    config = _simulate_config(args)
    if args.print_config:
        print(json.dumps(config.to_dict(), indent=2, sort_keys=True))
        return 0
    if config.output_dir is None:
        raise ValueError("no output directory (use --out or config output_dir)")
    threads = _threads(args)
    runner = {
        "points": run_point_experiment,
        "partition": run_partition_experiment,
        "all": run_experiment,
    }[args.design]
    report = runner(config, threads=threads)
    written = write_report(report, config.output_dir)
    for res in report.results:
        print(f"{res.legend.name} {res.design.name}: "
              f"error {res.overall_error:.4f} (stderr {res.stderr:.4f})")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_optimize(args) -> int:
    seed = _resolve_seed(args.seed)
    legend = legend_from_dict(_json_value(args.legend)) if args.legend else (
        BinaryThreshold([1], 0.5))
    config = AdaptiveConfig(legend=legend, alpha=args.alpha,
                            n_init=args.n_init, n_max=args.n_max)
    raster_spec = ({"kind": "file", "path": str(args.raster)} if args.raster
                   else _default_raster_spec(seed))
    if args.print_config:
        print(json.dumps({
            "legend": legend_to_dict(legend),
            "alpha": config.alpha,
            "n_init": config.n_init,
            "n_max": config.n_max,
            "repetitions": args.repetitions,
            "unit_side": args.unit_side,
            "master_seed": seed,
            "raster": raster_spec,
            "output_dir": str(args.out) if args.out else None,
        }, indent=2, sort_keys=True))
        return 0
    if args.out is None:
        raise ValueError("no output directory (use --out)")
    raster = build_raster(raster_spec)
    report = optimization_experiment(
        raster, config, repetitions=args.repetitions, master_seed=seed,
        unit_side=args.unit_side, threads=_threads(args))
    written = write_optimization_report(report, args.out)
    print(f"mean points {report.mean_n:.2f}, error {report.error_rate:.4f}, "
          f"cap hits {report.cap_hit_fraction:.3f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_scalogram(args) -> int:
    seed = _resolve_seed(args.seed)
    raster_spec = ({"kind": "file", "path": str(args.raster)} if args.raster
                   else _default_raster_spec(seed))
    if args.print_config:
        print(json.dumps({"raster": raster_spec, "unit_sides": args.sides,
                          "output_dir": str(args.out) if args.out else None},
                         indent=2, sort_keys=True))
        return 0
    if args.out is None:
        raise ValueError("no output directory (use --out)")
    raster = build_raster(raster_spec)
    rows = purity_scalogram(raster, args.sides)
    written = write_scalogram(rows, args.out)
    for row in rows:
        print(f"side {row.unit_side}: >0.9 {row.frac_purity_gt_090:.4f}, "
              f"<0.5 {row.frac_purity_lt_050:.4f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_serve(args) -> int:
    # imported lazily so the simulation paths work without the HTTP stack
    from .service import SessionStore, create_app, replay_journal

    if args.journal and Path(args.journal).exists():
        store = replay_journal(args.journal)
    else:
        store = SessionStore(journal_path=args.journal)
    app = create_app(store)
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_label(args) -> int:
    seed = _resolve_seed(args.seed)
    legend = legend_from_dict(_json_value(args.legend)) if args.legend else (
        BinaryThreshold([1], 0.5))
    config = AdaptiveConfig(legend=legend, alpha=args.alpha,
                            n_init=args.n_init, n_max=args.n_max)
    raster = load_ascii_grid(args.raster)
    units = extract_units(raster, args.unit_side)
    per_row = (raster.width - 0) // args.unit_side
    index = args.unit_row * per_row + args.unit_col
    if not (0 <= args.unit_col < per_row and 0 <= index < len(units)):
        raise ValueError(
            f"unit ({args.unit_row}, {args.unit_col}) outside the "
            f"{len(units) // per_row}x{per_row} unit grid"
        )
    result = adaptive_label(units[index], config, seed)
    for entry in result.trace:
        ci = entry.decision.intervals[0] if entry.decision.intervals else None
        ci_text = f" ci [{ci.lower:.4f}, {ci.upper:.4f}]" if ci else ""
        print(f"n={entry.n} tallies={list(entry.tallies)} "
              f"{entry.decision.status.value}{ci_text}")
    print(f"label={result.label.value} n_used={result.n_used} "
          f"status={result.status.value}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subsample-lab",
        description="Estimation-error experiments for point and partition "
                    "response designs on categorical rasters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic raster as an ASCII grid")
    gen.add_argument("--kind", choices=("patch-mosaic", "smoothed-binary"),
                     required=True)
    gen.add_argument("--width", type=int, default=1980)
    gen.add_argument("--height", type=int, default=1980)
    gen.add_argument("--classes", type=int, default=5,
                     help="class count (patch-mosaic)")
    gen.add_argument("--patch-density", type=float, default=2.0,
                     help="patch sites per 10^4 cells (patch-mosaic)")
    gen.add_argument("--class-weights", default=None,
                     help="comma-separated class weights (patch-mosaic)")
    gen.add_argument("--smoothing-radius", type=int, default=45,
                     help="box smoothing radius in cells (smoothed-binary)")
    gen.add_argument("--cover-fraction", type=float, default=0.5,
                     help="target-class area fraction (smoothed-binary)")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True, help="output .asc path")
    gen.add_argument("--print-config", action="store_true")
    gen.set_defaults(handler=_cmd_generate)

    sim = sub.add_parser("simulate", help="run design error experiments")
    sim.add_argument("--config", default=None, help="JSON experiment config")
    sim.add_argument("--design", choices=("points", "partition", "all"),
                     default="all")
    sim.add_argument("--n", type=_int_list, default=None,
                     help="comma-separated point counts (replaces point designs)")
    sim.add_argument("--k", type=_int_list, default=None,
                     help="comma-separated partition counts (replaces partition designs)")
    sim.add_argument("--protocols", default=None,
                     help="comma-separated protocols used with --k")
    sim.add_argument("--legends", default=None,
                     help="JSON legend object or array")
    sim.add_argument("--raster", default=None,
                     help=f"ASCII grid path; {_DEFAULT_RASTER_NOTE}")
    sim.add_argument("--unit-side", type=int, default=None)
    sim.add_argument("--realizations", type=int, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--threads", type=int, default=None)
    sim.add_argument("--out", default=None, help="output directory")
    sim.add_argument("--print-config", action="store_true")
    sim.set_defaults(handler=_cmd_simulate)

    opt = sub.add_parser("optimize", help="run the sequential-stopping experiment")
    opt.add_argument("--alpha", type=float, default=0.05)
    opt.add_argument("--n-init", type=int, default=9)
    opt.add_argument("--n-max", type=int, default=144)
    opt.add_argument("--repetitions", type=int, default=25)
    opt.add_argument("--legend", default=None, help="JSON legend object")
    opt.add_argument("--raster", default=None,
                     help=f"ASCII grid path; {_DEFAULT_RASTER_NOTE}")
    opt.add_argument("--unit-side", type=int, default=180)
    opt.add_argument("--seed", type=int, default=None)
    opt.add_argument("--threads", type=int, default=None)
    opt.add_argument("--out", default=None, help="output directory")
    opt.add_argument("--print-config", action="store_true")
    opt.set_defaults(handler=_cmd_optimize)

    sca = sub.add_parser("scalogram", help="unit purity fractions vs. unit size")
    sca.add_argument("--raster", default=None,
                     help=f"ASCII grid path; {_DEFAULT_RASTER_NOTE}")
    sca.add_argument("--sides", type=_int_list,
                     default=[9, 18, 36, 60, 90, 180, 330])
    sca.add_argument("--seed", type=int, default=None)
    sca.add_argument("--out", default=None, help="output directory")
    sca.add_argument("--print-config", action="store_true")
    sca.set_defaults(handler=_cmd_scalogram)

    srv = sub.add_parser("serve", help="run the labeling session service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8765)
    srv.add_argument("--journal", default=None,
                     help="append-only JSONL event log; replayed on start")
    srv.set_defaults(handler=_cmd_serve)

    lab = sub.add_parser("label", help="adaptively label one unit, printing the trace")
    lab.add_argument("--raster", required=True, help="ASCII grid path")
    lab.add_argument("--unit-row", type=int, default=0)
    lab.add_argument("--unit-col", type=int, default=0)
    lab.add_argument("--unit-side", type=int, default=180)
    lab.add_argument("--legend", default=None, help="JSON legend object")
    lab.add_argument("--alpha", type=float, default=0.05)
    lab.add_argument("--n-init", type=int, default=9)
    lab.add_argument("--n-max", type=int, default=144)
    lab.add_argument("--seed", type=int, default=None)
    lab.set_defaults(handler=_cmd_label)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # runtime failures: I/O, numeric, service
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
