"""Image gradients, magnitude/direction histograms, and the clear coefficient.

The clear coefficient is the fraction of pixels whose gradient magnitude
strictly exceeds a preset threshold; sharp imagery scores high, blurred
imagery collapses toward zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ImageTooSmall
from .image import FloatPlane, GrayImage

SOBEL3 = "sobel3"
CENTRAL_DIFF = "central_diff"

OPERATORS = (SOBEL3, CENTRAL_DIFF)

HISTOGRAM_BINS = 64

# Largest reachable magnitude on 8-bit input, per operator: the un-normalized
# 3x3 Sobel peaks at 4*255 per axis, unit central differences at 255.
_MAX_AXIS_RESPONSE = {SOBEL3: 1020.0, CENTRAL_DIFF: 255.0}

_MIN_DIM = {SOBEL3: 3, CENTRAL_DIFF: 2}


def magnitude_ceiling(operator: str) -> float:
    """Upper bound of the gradient magnitude for 8-bit input."""
    return math.sqrt(2.0) * _MAX_AXIS_RESPONSE[operator]


@dataclass(frozen=True, eq=False)
class GradientField:
    magnitude: FloatPlane
    direction: FloatPlane
    operator: str


@dataclass(frozen=True, eq=False)
class GradientHistograms:
    magnitude_counts: np.ndarray
    magnitude_edges: np.ndarray
    direction_counts: np.ndarray
    direction_edges: np.ndarray
    total_pixels: int


@dataclass(frozen=True)
class ClearCoefficient:
    alpha: float
    threshold: float


def gradient_field(img: GrayImage, operator: str = SOBEL3) -> GradientField:
    """Per-pixel gradient magnitude and direction.

    Direction is the two-argument arctangent of (x-partial, y-partial),
    defined as 0 where both partials vanish; range (-pi, pi].
    """
    if operator not in OPERATORS:
        raise ValueError(f"unknown gradient operator {operator!r}")
    need = _MIN_DIM[operator]
    if img.height < need or img.width < need:
        raise ImageTooSmall(
            f"{operator} needs at least {need}x{need}, got {img.height}x{img.width}"
        )
    plane = img.pixels.astype(np.float64)
    if operator == SOBEL3:
        gx, gy = _kernels.sobel_gradients(plane)
    else:
        gx, gy = _kernels.central_gradients(plane)
    mag = np.hypot(gx, gy)
    theta = np.arctan2(gx, gy)
    theta[mag == 0.0] = 0.0
    theta[theta <= -np.pi] = np.pi
    return GradientField(FloatPlane(mag), FloatPlane(theta), operator)


def _bin_upper_inclusive(values: np.ndarray, lo: float, hi: float, nbins: int) -> np.ndarray:
    """Fixed-width binning with (lower, upper] bins; value == lo joins bin 0."""
    width = (hi - lo) / nbins
    idx = np.ceil((values - lo) / width).astype(np.int64) - 1
    return np.bincount(np.clip(idx, 0, nbins - 1), minlength=nbins)


def gradient_histograms(field: GradientField) -> GradientHistograms:
    """64-bin histograms of magnitude (over [0, ceiling]) and direction."""
    mag = field.magnitude.values
    theta = field.direction.values
    g_max = magnitude_ceiling(field.operator)
    # [lo, hi) bins with the top edge folded into the last bin
    mag_counts, mag_edges = np.histogram(
        mag.ravel(), bins=HISTOGRAM_BINS, range=(0.0, g_max)
    )
    dir_edges = np.linspace(-np.pi, np.pi, HISTOGRAM_BINS + 1)
    dir_counts = _bin_upper_inclusive(theta.ravel(), -np.pi, np.pi, HISTOGRAM_BINS)
    return GradientHistograms(
        magnitude_counts=mag_counts.astype(np.int64),
        magnitude_edges=mag_edges,
        direction_counts=dir_counts.astype(np.int64),
        direction_edges=dir_edges,
        total_pixels=int(mag.size),
    )


def clear_coefficient(field: GradientField, threshold: float = 1000.0) -> ClearCoefficient:
    """Fraction of pixels with magnitude strictly above the threshold."""
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    mag = field.magnitude.values
    alpha = float(np.count_nonzero(mag > threshold)) / mag.size
    return ClearCoefficient(alpha=alpha, threshold=float(threshold))


def histogram_csv_rows(counts: np.ndarray, edges: np.ndarray) -> list[tuple[float, float, int]]:
    """Rows of (bin_lower, bin_upper, count) for CSV export."""
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i]))
        for i in range(len(counts))
    ]
