"""Command-line entry point.

Subcommands: ``stats`` (per-band score / VIF dump), ``select`` (run the
band-selection pipeline), ``evaluate`` (score an explicit band subset) and
``sweep`` (selection + evaluation over a grid of subset sizes and
tolerances).  All band ids on the command line and in outputs are 1-based.

Every run is a pure function of its input files and flags; a rerun writes
byte-identical output.  Exit codes: 0 success, 2 validation problem,
3 infeasible request, 4 file/container problem.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .containers import load_cube, load_ground_truth, mask_and_standardize
from .errors import ContainerError, InfeasibleError, ValidationError
from .evaluation import (
    EvalConfig,
    evaluate_bands,
    report_to_json,
    sweep,
    sweep_to_csv,
    ubs_baseline,
)
from .selection import (
    VARIANTS,
    SelectionConfig,
    abc_scores,
    correlation_matrix,
    mutual_information,
    result_to_json,
    run_pipeline,
    vif_matrix,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def _add_input_flags(p: argparse.ArgumentParser):
    p.add_argument("--cube", required=True, help="HSIC v1 cube file (or CSV band directory)")
    p.add_argument("--gt", required=True, help="HSIG v1 ground-truth file (or CSV grid)")


def _add_selection_flags(p: argparse.ArgumentParser):
    p.add_argument("--tolerance", default="0.0",
                   help="VIF tolerance factor in percent (default 0.0; "
                        "sweep accepts a comma-separated list)")
    p.add_argument("--mi-bins", type=int, default=64,
                   help="equal-width histogram bins for mutual information (default 64)")
    p.add_argument("--restarts", type=int, default=40,
                   help="k-means restarts (default 40)")
    p.add_argument("--seed", type=int, default=42, help="master RNG seed (default 42)")
    p.add_argument("--variant", default="abc-mi-vif", choices=VARIANTS,
                   help="pipeline variant (default abc-mi-vif)")
    p.add_argument("--rescale-axes", action="store_true",
                   help="min-max rescale score axes before clustering (default off)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for restarts/MI (default 1; results "
                        "are identical for any thread count)")


def _add_eval_flags(p: argparse.ArgumentParser):
    p.add_argument("--train-fraction", type=float, default=0.10,
                   help="per-class training fraction (default 0.10)")
    p.add_argument("--repeats", type=int, default=10,
                   help="independent evaluation runs (default 10)")
    p.add_argument("--classifier", default="knn",
                   help="classifier id (default knn: 3-nearest-neighbour vote)")
    p.add_argument("--baseline", choices=["ubs"],
                   help="also evaluate a uniformly spaced band set of equal size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandsel",
        description="Hyperspectral band selection via VIF pre-selection and "
                    "clustering of per-band correlation/information scores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="dump per-band scores and the VIF matrix as CSV")
    _add_input_flags(p)
    p.add_argument("--mi-bins", type=int, default=64,
                   help="equal-width histogram bins for mutual information (default 64)")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("select", help="run the band-selection pipeline")
    _add_input_flags(p)
    p.add_argument("--bands-count", type=int, default=20,
                   help="number of bands to select (default 20)")
    _add_selection_flags(p)
    p.add_argument("--out", required=True, help="result JSON file")

    p = sub.add_parser("evaluate", help="score an explicit band subset")
    _add_input_flags(p)
    p.add_argument("--bands", required=True,
                   help="semicolon-separated 1-based band ids, e.g. 3;96;107")
    p.add_argument("--seed", type=int, default=42, help="master RNG seed (default 42)")
    _add_eval_flags(p)
    p.add_argument("--out", required=True, help="report JSON file")

    p = sub.add_parser("sweep", help="selection + evaluation over an n' x tolerance grid")
    _add_input_flags(p)
    p.add_argument("--bands-count", default="5:5:50",
                   help="subset sizes: single value, comma list, or start:step:stop "
                        "(default 5:5:50)")
    _add_selection_flags(p)
    _add_eval_flags(p)
    p.add_argument("--out", required=True, help="report CSV file")
    return parser


def _parse_count_grid(text: str) -> list[int]:
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValidationError(f"bad range {text!r}; expected start:step:stop")
            start, step, stop = (int(p) for p in parts)
            if step < 1 or start < 1 or stop < start:
                raise ValidationError(f"bad range {text!r}")
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"bad band-count value {text!r}") from exc


def _parse_tolerances(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"bad tolerance value {text!r}") from exc


def _parse_single_tolerance(text: str) -> float:
    values = _parse_tolerances(text)
    if len(values) != 1:
        raise ValidationError("select takes a single tolerance value")
    return values[0]


def _parse_band_list(text: str) -> list[int]:
    try:
        ids = [int(p) for p in text.split(";")]
    except ValueError as exc:
        raise ValidationError(f"bad band list {text!r}") from exc
    if any(b < 1 for b in ids):
        raise ValidationError("band ids are 1-based and must be positive")
    return [b - 1 for b in ids]


def _load_pixel_matrix(args):
    cube = load_cube(args.cube)
    gt = load_ground_truth(args.gt)
    return mask_and_standardize(cube, gt)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_stats(args) -> int:
    pm = _load_pixel_matrix(args)
    cm = correlation_matrix(pm)
    abc = abc_scores(cm)
    vif = vif_matrix(cm)
    lines = ["section,band,values"]
    for band, score in abc:
        lines.append(f"abc,{band + 1},{score!r}")
    for band in range(pm.n_bands):
        mi = mutual_information(pm.values[:, band], pm.labels, args.mi_bins)
        lines.append(f"mi,{band + 1},{mi!r}")
    for band in range(pm.n_bands):
        row = ";".join(repr(float(v)) for v in vif[band])
        lines.append(f"vif,{band + 1},{row}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_select(args) -> int:
    pm = _load_pixel_matrix(args)
    cfg = SelectionConfig(
        n_selected=args.bands_count,
        tolerance=_parse_single_tolerance(args.tolerance),
        mi_bins=args.mi_bins,
        restarts=args.restarts,
        seed=args.seed,
        variant=args.variant,
        rescale_axes=args.rescale_axes,
        threads=args.threads,
    )
    result = run_pipeline(pm, cfg)
    _emit(result_to_json(result), args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    pm = _load_pixel_matrix(args)
    bands = _parse_band_list(args.bands)
    cfg = EvalConfig(
        train_fraction=args.train_fraction,
        repeats=args.repeats,
        seed=args.seed,
        classifier=args.classifier,
    )
    report = evaluate_bands(pm, bands, cfg)
    baseline = None
    if args.baseline == "ubs":
        ubs = [b - 1 for b in ubs_baseline(pm.n_bands, len(bands))]
        baseline = evaluate_bands(pm, ubs, cfg)
    _emit(report_to_json(report, cfg, baseline), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    pm = _load_pixel_matrix(args)
    counts = _parse_count_grid(args.bands_count)
    tolerances = _parse_tolerances(args.tolerance)
    sel_cfg = SelectionConfig(
        n_selected=counts[0],
        tolerance=tolerances[0],
        mi_bins=args.mi_bins,
        restarts=args.restarts,
        seed=args.seed,
        variant=args.variant,
        rescale_axes=args.rescale_axes,
        threads=args.threads,
    )
    eval_cfg = EvalConfig(
        train_fraction=args.train_fraction,
        repeats=args.repeats,
        seed=args.seed,
        classifier=args.classifier,
    )
    cells, aggregates = sweep(pm, counts, tolerances, sel_cfg, eval_cfg)
    baseline_rows = []
    if args.baseline == "ubs":
        for n_sel in counts:
            if n_sel <= pm.n_bands:
                ubs = [b - 1 for b in ubs_baseline(pm.n_bands, n_sel)]
                baseline_rows.append((n_sel, evaluate_bands(pm, ubs, eval_cfg)))
    _emit(sweep_to_csv(cells, aggregates, baseline_rows), args.out)
    return EXIT_OK


_COMMANDS = {
    "stats": cmd_stats,
    "select": cmd_select,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ContainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
