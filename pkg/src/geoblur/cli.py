"""geoblur command line: extract, classify, synth, train, inspect.

Exit codes: 0 success, 1 fatal config/IO error, 2 report contains
per-image failures.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .blur import BlurKind, BlurSpec
from .classify import ExtractionParams, LinearModel, parse_rule
from .errors import GeoblurError
from .gradient import CENTRAL_DIFF, SOBEL3
from .pipeline import (
    DEFAULT_GLOBS,
    RunConfig,
    default_threads,
    report_to_csv,
    report_to_json,
    run_classify,
    run_extract,
    run_inspect,
    run_synth,
    run_train,
)

_OPERATOR_TOKENS = {"sobel3": SOBEL3, "central": CENTRAL_DIFF}


def _add_feature_knobs(p: argparse.ArgumentParser):
    p.add_argument("--grad-operator", choices=sorted(_OPERATOR_TOKENS), default="sobel3")
    p.add_argument("--grad-threshold", type=float, default=1000.0)
    p.add_argument("--svd-k", type=int, default=50)
    p.add_argument(
        "--svd-downscale",
        type=int,
        default=1024,
        help="max dimension before SVD; 0 disables downscaling",
    )
    p.add_argument("--fft-divisor", type=float, default=1000.0)


def _add_batch_args(p: argparse.ArgumentParser):
    p.add_argument("--input", action="append", required=True, metavar="PATH")
    p.add_argument("--glob", action="append", default=None, metavar="PAT")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True, metavar="CSV")
    p.add_argument("--json", default=None, metavar="JSON")
    p.add_argument(
        "--timings",
        action="store_true",
        help="record wall-clock duration_ms per row (makes reports nondeterministic)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geoblur", description=__doc__)
    parser.add_argument("--version", action="version", version=f"geoblur {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="compute per-image blur features")
    _add_batch_args(p)
    p.add_argument(
        "--features",
        default="grad,svd,fft",
        help="comma-separated subset of grad,svd,fft",
    )
    _add_feature_knobs(p)

    p = sub.add_parser("classify", help="extract features and label images")
    _add_batch_args(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", metavar="MODEL_JSON")
    group.add_argument("--rule", metavar="RULE", help="e.g. 'beta>0.63:blurry'")
    _add_feature_knobs(p)

    p = sub.add_parser("synth", help="generate blurred variants and a manifest")
    p.add_argument("--input", action="append", required=True, metavar="IMAGE")
    p.add_argument(
        "--blur",
        action="append",
        required=True,
        metavar="KIND:EXTENT",
        help="e.g. spin:10, vshift:5, hshift:3 (repeatable)",
    )
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("train", help="fit the linear SVM from report + manifest")
    p.add_argument("--features", required=True, metavar="REPORT_CSV_OR_JSON")
    p.add_argument("--labels", required=True, metavar="LABELS_CSV")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, metavar="MODEL_JSON")

    p = sub.add_parser("inspect", help="write histograms and spectra for one image")
    p.add_argument("--input", required=True, metavar="IMAGE")
    p.add_argument("--out-dir", required=True)
    _add_feature_knobs(p)

    return parser


def _params_from_args(args) -> ExtractionParams:
    return ExtractionParams(
        grad_operator=_OPERATOR_TOKENS[args.grad_operator],
        grad_threshold=args.grad_threshold,
        svd_k=args.svd_k,
        svd_downscale=None if args.svd_downscale == 0 else args.svd_downscale,
        fft_divisor=args.fft_divisor,
    )


def _config_from_args(args, features: tuple[str, ...]) -> RunConfig:
    return RunConfig(
        input_paths=tuple(args.input),
        include_globs=tuple(args.glob) if args.glob else DEFAULT_GLOBS,
        features=features,
        params=_params_from_args(args),
        threads=args.threads if args.threads else default_threads(),
        emit_timings=args.timings,
    )


def _write_report(report, args) -> int:
    with open(args.out, "w", newline="") as fh:
        fh.write(report_to_csv(report))
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(report_to_json(report))
    failed = report.summary.get("failed", 0) if report.summary else 0
    print(
        f"{len(report.rows)} images, {failed} failed"
        + (
            f", {report.summary['clear']} clear / {report.summary['blurry']} blurry"
            if report.summary and "clear" in report.summary
            else ""
        )
    )
    return 2 if failed else 0


def _cmd_extract(args) -> int:
    features = tuple(f.strip() for f in args.features.split(",") if f.strip())
    report = run_extract(_config_from_args(args, features))
    return _write_report(report, args)


def _cmd_classify(args) -> int:
    if args.model:
        with open(args.model) as fh:
            model_or_rule = LinearModel.from_json(fh.read())
    else:
        model_or_rule = parse_rule(args.rule)
    report = run_classify(_config_from_args(args, ("grad", "svd", "fft")), model_or_rule)
    return _write_report(report, args)


def _parse_blur_arg(text: str) -> BlurSpec:
    try:
        kind, extent = text.split(":")
        return BlurSpec(BlurKind.from_token(kind.strip().lower()), int(extent))
    except ValueError as exc:
        raise ValueError(f"bad --blur {text!r}; expected kind:extent") from exc


def _cmd_synth(args) -> int:
    specs = [_parse_blur_arg(b) for b in args.blur]
    rows = run_synth(args.input, specs, args.out_dir)
    blurry = sum(1 for r in rows if r[1] == "blurry")
    print(f"wrote {blurry} blurred images + labels.csv ({len(rows)} manifest rows)")
    return 0


def _cmd_train(args) -> int:
    model, accuracy = run_train(
        args.features, args.labels, args.lam, args.epochs, args.seed, args.out
    )
    print(f"training accuracy {accuracy}")
    return 0


def _cmd_inspect(args) -> int:
    written = run_inspect(args.input, args.out_dir, _params_from_args(args))
    for path in written:
        print(path)
    return 0


_COMMANDS = {
    "extract": _cmd_extract,
    "classify": _cmd_classify,
    "synth": _cmd_synth,
    "train": _cmd_train,
    "inspect": _cmd_inspect,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (GeoblurError, ValueError, OSError) as exc:
        print(f"geoblur: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
