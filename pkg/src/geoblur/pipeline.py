"""Batch corpus processing: scan, extract, classify, synth, train, inspect.

Per-image failures are recorded as report rows, never run aborts; a corpus
run must survive a corrupt frame. All artifacts serialize deterministically:
same inputs and config give byte-identical CSV/JSON at any worker count.
"""

from __future__ import annotations

import csv
import fnmatch
import io
import json
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import __version__, fft, gradient, svd
from .blur import BlurSpec, apply_blur
from .classify import (
    LABEL_BLURRY,
    LABEL_CLEAR,
    ExtractionParams,
    FeatureVector,
    LinearModel,
    ThresholdRule,
    predict,
    train_linear_svm,
)
from .errors import EmptyTrainingSet, ParamMismatch, PathNotFound
from .image import GrayImage, decode_to_gray, encode_png, from_float

DEFAULT_GLOBS = ("*.png", "*.jpg", "*.jpeg", "*.tif")

ALL_FEATURES = ("grad", "svd", "fft")

CSV_COLUMNS = (
    "path",
    "width",
    "height",
    "alpha",
    "beta",
    "gamma",
    "label",
    "score",
    "duration_ms",
    "error",
)


def default_threads() -> int:
    env = os.environ.get("GEOBLUR_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class RunConfig:
    input_paths: tuple[str, ...]
    include_globs: tuple[str, ...] = DEFAULT_GLOBS
    features: tuple[str, ...] = ALL_FEATURES
    params: ExtractionParams = ExtractionParams()
    threads: int = field(default_factory=default_threads)
    emit_timings: bool = False

    def __post_init__(self):
        feats = tuple(f for f in ALL_FEATURES if f in self.features)
        if not feats:
            raise ValueError(f"no known features in {self.features!r}")
        unknown = set(self.features) - set(ALL_FEATURES)
        if unknown:
            raise ValueError(f"unknown features {sorted(unknown)!r}")
        object.__setattr__(self, "features", feats)
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")

    def run_params(self) -> dict:
        """Knobs that determine feature values; echoed into every report."""
        return {
            "features": list(self.features),
            "grad_operator": self.params.grad_operator,
            "grad_threshold": self.params.grad_threshold,
            "svd_k": self.params.svd_k,
            "svd_downscale": self.params.svd_downscale,
            "fft_divisor": self.params.fft_divisor,
        }


@dataclass
class ReportRow:
    path: str
    width: int | None = None
    height: int | None = None
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    label: str | None = None
    score: float | None = None
    duration_ms: int | None = None
    error: str | None = None


@dataclass
class CorpusReport:
    rows: list[ReportRow]
    run_params: dict
    tool_version: str = __version__
    summary: dict | None = None


def scan_corpus(config: RunConfig) -> list[str]:
    """Recursive, glob-filtered, deduplicated, path-sorted file discovery.

    Explicitly named files are always included; directory walks keep only
    names matching one of the include globs (case-insensitive).
    """
    found: list[str] = []
    seen: set[str] = set()

    def _add(p: str):
        key = os.path.normpath(p)
        if key not in seen:
            seen.add(key)
            found.append(key)

    for root in config.input_paths:
        if not os.path.exists(root):
            raise PathNotFound(f"input path does not exist: {root}")
        if os.path.isfile(root):
            _add(root)
            continue
        for dirpath, dirnames, filenames in os.walk(root):
            dirnames.sort()
            for name in filenames:
                low = name.lower()
                if any(fnmatch.fnmatch(low, g.lower()) for g in config.include_globs):
                    _add(os.path.join(dirpath, name))
    return sorted(found)


def extract_row(path: str, config: RunConfig) -> ReportRow:
    """Decode one file and compute the requested features; errors stay in-row."""
    row = ReportRow(path=path)
    t0 = time.perf_counter()
    try:
        with open(path, "rb") as fh:
            data = fh.read()
        img = decode_to_gray(data)
        row.width = img.width
        row.height = img.height
        p = config.params
        if "grad" in config.features:
            grad_field = gradient.gradient_field(img, p.grad_operator)
            row.alpha = gradient.clear_coefficient(grad_field, p.grad_threshold).alpha
        if "svd" in config.features:
            spectrum = svd.singular_values(img, downscale_to=p.svd_downscale)
            row.beta = svd.blur_degree(spectrum, p.svd_k).beta
        if "fft" in config.features:
            spectrum2d = fft.fft2_shifted_magnitude(img)
            row.gamma = fft.clear_estimate(spectrum2d, p.fft_divisor).gamma
    except Exception as exc:  # noqa: BLE001 - failures become report rows
        row.error = type(exc).__name__
    if config.emit_timings:
        row.duration_ms = int(round((time.perf_counter() - t0) * 1000.0))
    return row


def run_extract(config: RunConfig) -> CorpusReport:
    """Feature extraction over the corpus with a bounded worker pool."""
    paths = scan_corpus(config)
    if config.threads == 1 or len(paths) <= 1:
        rows = [extract_row(p, config) for p in paths]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            rows = list(pool.map(lambda p: extract_row(p, config), paths))
    rows.sort(key=lambda r: r.path)
    failed = sum(1 for r in rows if r.error)
    report = CorpusReport(
        rows=rows,
        run_params=config.run_params(),
        summary={"images": len(rows), "failed": failed},
    )
    return report


def _required_features(model_or_rule) -> tuple[str, ...]:
    if isinstance(model_or_rule, LinearModel):
        return ALL_FEATURES
    return {"alpha": ("grad",), "beta": ("svd",), "gamma": ("fft",)}[
        model_or_rule.feature
    ]


def run_classify(config: RunConfig, model_or_rule) -> CorpusReport:
    """Extraction plus labels/scores from a model or a threshold rule."""
    missing = [f for f in _required_features(model_or_rule) if f not in config.features]
    if missing:
        raise ParamMismatch(
            f"classifier needs features {missing} which are not enabled"
        )
    if isinstance(model_or_rule, LinearModel) and config.params != model_or_rule.params:
        raise ParamMismatch(
            f"run params {config.params} != model params {model_or_rule.params}"
        )
    report = run_extract(config)
    clear_n = blurry_n = 0
    for row in report.rows:
        if row.error:
            continue
        if isinstance(model_or_rule, LinearModel):
            fv = FeatureVector(
                image_id=row.path,
                alpha=row.alpha,
                beta=row.beta,
                gamma=row.gamma,
                params=config.params,
            )
            row.label, score = predict(model_or_rule, fv)
            row.score = score
        else:
            value = getattr(row, model_or_rule.feature)
            row.label = _apply_rule_value(model_or_rule, value)
        if row.label == LABEL_CLEAR:
            clear_n += 1
        else:
            blurry_n += 1
    failed = sum(1 for r in report.rows if r.error)
    report.summary = {
        "images": len(report.rows),
        "clear": clear_n,
        "blurry": blurry_n,
        "failed": failed,
    }
    return report


def _apply_rule_value(rule: ThresholdRule, value: float) -> str:
    if rule.direction == "greater_is_blurry":
        return LABEL_BLURRY if value >= rule.cutoff else LABEL_CLEAR
    return LABEL_CLEAR if value > rule.cutoff else LABEL_BLURRY


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_to_csv(report: CorpusReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow([_cell(getattr(row, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def report_to_json(report: CorpusReport) -> str:
    doc = {
        "tool_version": report.tool_version,
        "run_params": report.run_params,
        "rows": [
            {col: getattr(row, col) for col in CSV_COLUMNS} for row in report.rows
        ],
        "summary": report.summary,
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Synthesis, training, inspection drivers
# ---------------------------------------------------------------------------


def run_synth(
    input_paths: list[str], specs: list[BlurSpec], out_dir: str
) -> list[tuple[str, str, str, str]]:
    """Write blurred variants plus a labels.csv manifest.

    Returns the manifest rows (path, label, kind, extent); clear rows point
    at the original inputs, blurry rows at the generated PNGs.
    """
    os.makedirs(out_dir, exist_ok=True)
    images: list[tuple[str, GrayImage]] = []
    for p in input_paths:
        if not os.path.exists(p):
            raise PathNotFound(f"input image does not exist: {p}")
        with open(p, "rb") as fh:
            images.append((p, decode_to_gray(fh.read())))

    rows: list[tuple[str, str, str, str]] = []
    for p, _ in images:
        rows.append((p, LABEL_CLEAR, "", ""))
    written: set[str] = set()
    for p, img in images:
        stem = os.path.splitext(os.path.basename(p))[0]
        for spec in specs:
            name = f"{stem}__{spec.token}.png"
            if name in written:
                raise ValueError(f"duplicate output name {name}; rename inputs")
            written.add(name)
            out_path = os.path.join(out_dir, name)
            blurred = apply_blur(img, spec)
            with open(out_path, "wb") as fh:
                fh.write(encode_png(blurred))
            rows.append((out_path, LABEL_BLURRY, spec.kind.value, str(spec.extent)))

    manifest = os.path.join(out_dir, "labels.csv")
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "label", "kind", "extent"])
        writer.writerows(rows)
    return rows


def load_feature_rows(features_path: str) -> tuple[list[ReportRow], ExtractionParams | None]:
    """Read an extract report (.json carries exact params, .csv assumes defaults)."""
    if features_path.endswith(".json"):
        with open(features_path) as fh:
            doc = json.load(fh)
        rp = doc["run_params"]
        params = ExtractionParams(
            grad_operator=rp["grad_operator"],
            grad_threshold=float(rp["grad_threshold"]),
            svd_k=int(rp["svd_k"]),
            svd_downscale=None if rp["svd_downscale"] is None else int(rp["svd_downscale"]),
            fft_divisor=float(rp["fft_divisor"]),
        )
        rows = []
        for r in doc["rows"]:
            rows.append(
                ReportRow(
                    path=r["path"],
                    alpha=r["alpha"],
                    beta=r["beta"],
                    gamma=r["gamma"],
                    error=r["error"],
                )
            )
        return rows, params
    rows = []
    with open(features_path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                ReportRow(
                    path=rec["path"],
                    alpha=float(rec["alpha"]) if rec["alpha"] else None,
                    beta=float(rec["beta"]) if rec["beta"] else None,
                    gamma=float(rec["gamma"]) if rec["gamma"] else None,
                    error=rec["error"] or None,
                )
            )
    return rows, None


def load_labels(labels_path: str) -> dict[str, str]:
    """Map of path -> clear/blurry from a labels.csv manifest."""
    labels: dict[str, str] = {}
    with open(labels_path, newline="") as fh:
        for rec in csv.DictReader(fh):
            labels[rec["path"]] = rec["label"].strip().lower()
    return labels


def _match_labels(rows: list[ReportRow], labels: dict[str, str]) -> list[tuple[ReportRow, str]]:
    norm = {os.path.normpath(p): lab for p, lab in labels.items()}
    pairs = [(r, norm.get(os.path.normpath(r.path))) for r in rows]
    if not any(lab for _, lab in pairs):
        # no exact path overlap; fall back to unique basenames
        by_base: dict[str, str] = {}
        for p, lab in labels.items():
            base = os.path.basename(p)
            if base in by_base and by_base[base] != lab:
                raise ValueError(f"conflicting labels for duplicate basename {base}")
            by_base[base] = lab
        pairs = [(r, by_base.get(os.path.basename(r.path))) for r in rows]
    return [(r, lab) for r, lab in pairs if lab is not None]


def run_train(
    features_path: str,
    labels_path: str,
    lam: float,
    epochs: int,
    seed: int,
    out_path: str,
) -> tuple[LinearModel, float]:
    """Train the linear SVM from report + manifest files; returns (model, accuracy)."""
    rows, params = load_feature_rows(features_path)
    if params is None:
        params = ExtractionParams()
        warnings.warn(
            "features CSV carries no extraction params; assuming defaults "
            "(use the JSON report to train with exact params)",
            stacklevel=2,
        )
    labels = load_labels(labels_path)
    vectors: list[FeatureVector] = []
    targets: list[int] = []
    for row, lab in _match_labels(rows, labels):
        if row.error or row.alpha is None or row.beta is None or row.gamma is None:
            continue
        vectors.append(
            FeatureVector(row.path, row.alpha, row.beta, row.gamma, params)
        )
        targets.append(1 if lab == LABEL_CLEAR else -1)
    if len(vectors) < 2:
        raise EmptyTrainingSet(
            f"only {len(vectors)} labeled feature rows matched; cannot train"
        )
    model = train_linear_svm(vectors, targets, lam=lam, epochs=epochs, seed=seed)
    correct = sum(
        1 for fv, t in zip(vectors, targets) if predict(model, fv)[0] == (LABEL_CLEAR if t == 1 else LABEL_BLURRY)
    )
    accuracy = correct / len(vectors)
    with open(out_path, "w") as fh:
        fh.write(model.to_json())
    return model, accuracy


def run_inspect(image_path: str, out_dir: str, params: ExtractionParams) -> list[str]:
    """Write per-image diagnostics: histograms, singular values, log spectrum."""
    if not os.path.exists(image_path):
        raise PathNotFound(f"input image does not exist: {image_path}")
    os.makedirs(out_dir, exist_ok=True)
    with open(image_path, "rb") as fh:
        img = decode_to_gray(fh.read())
    stem = os.path.splitext(os.path.basename(image_path))[0]
    written: list[str] = []

    def _write_hist_csv(name: str, rows):
        path = os.path.join(out_dir, f"{stem}__{name}.csv")
        with open(path, "w", newline="") as out:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(["bin_lower", "bin_upper", "count"])
            for lo, hi, count in rows:
                writer.writerow([repr(lo), repr(hi), count])
        written.append(path)

    grad_field = gradient.gradient_field(img, params.grad_operator)
    hists = gradient.gradient_histograms(grad_field)
    _write_hist_csv(
        "gradient_magnitude_hist",
        gradient.histogram_csv_rows(hists.magnitude_counts, hists.magnitude_edges),
    )
    _write_hist_csv(
        "gradient_direction_hist",
        gradient.histogram_csv_rows(hists.direction_counts, hists.direction_edges),
    )

    spectrum = svd.singular_values(img, downscale_to=params.svd_downscale)
    sv_path = os.path.join(out_dir, f"{stem}__singular_values.csv")
    with open(sv_path, "w", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["index", "sigma"])
        for i, sigma in enumerate(spectrum.values):
            writer.writerow([i, repr(float(sigma))])
    written.append(sv_path)

    spec2d = fft.fft2_shifted_magnitude(img)
    _write_hist_csv("spectrum_hist", fft.spectrum_histogram(spec2d))
    log_png = os.path.join(out_dir, f"{stem}__spectrum_log.png")
    with open(log_png, "wb") as out:
        out.write(encode_png(from_float(fft.spectrum_log_view(spec2d))))
    written.append(log_png)
    return written
