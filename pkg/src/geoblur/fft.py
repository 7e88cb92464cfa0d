"""Shifted 2D spectrum magnitudes and the frequency-domain clear estimate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ZeroImage
from .image import FloatPlane, GrayImage

DEFAULT_DIVISOR = 1000.0

SPECTRUM_HISTOGRAM_BINS = 64


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Center-shifted DFT magnitudes; DC sits at (M//2, N//2)."""

    magnitudes: FloatPlane

    @property
    def dims(self) -> tuple[int, int]:
        return self.magnitudes.values.shape


@dataclass(frozen=True)
class ClearEstimate:
    gamma: float
    divisor: float
    threshold_used: float
    count_above: int


def fft2_shifted_magnitude(img: GrayImage) -> Spectrum:
    """Exact-size 2D DFT magnitudes with the DC component shifted to center.

    No zero-padding is applied: padding would change M*N and silently bias
    the clear estimate.
    """
    z = _kernels.fft2(img.pixels.astype(np.complex128))
    mag = np.abs(z)
    h, w = mag.shape
    shifted = np.roll(np.roll(mag, h // 2, axis=0), w // 2, axis=1)
    return Spectrum(FloatPlane(shifted))


def clear_estimate(spec: Spectrum, divisor: float = DEFAULT_DIVISOR) -> ClearEstimate:
    """Fraction of components strictly above max-magnitude / divisor."""
    if divisor <= 1:
        raise ValueError(f"divisor must be > 1, got {divisor}")
    mag = spec.magnitudes.values
    peak = float(mag.max())
    if peak == 0.0:
        raise ZeroImage("all-zero spectrum has no clear estimate")
    threshold = peak / divisor
    count = int(np.count_nonzero(mag > threshold))
    return ClearEstimate(
        gamma=count / mag.size,
        divisor=float(divisor),
        threshold_used=threshold,
        count_above=count,
    )


def spectrum_log_view(spec: Spectrum) -> FloatPlane:
    """log(1 + |s|) scaled to [0, 255] for PNG export."""
    logged = np.log1p(spec.magnitudes.values)
    peak = logged.max()
    if peak == 0.0:
        return FloatPlane(np.zeros_like(logged))
    return FloatPlane(logged * (255.0 / peak))


def spectrum_histogram(spec: Spectrum, bins: int = SPECTRUM_HISTOGRAM_BINS):
    """Log-spaced magnitude histogram rows (bin_lower, bin_upper, count).

    Components below the lowest edge (including exact zeros) are counted in
    the first bin so the counts always sum to M*N.
    """
    mag = spec.magnitudes.values.ravel()
    peak = float(mag.max())
    if peak == 0.0:
        edges = np.linspace(0.0, 1.0, bins + 1)
        counts = np.zeros(bins, dtype=np.int64)
        counts[0] = mag.size
    else:
        edges = np.geomspace(peak * 1e-12, peak, bins + 1)
        idx = np.searchsorted(edges[1:-1], mag, side="left")
        counts = np.bincount(idx, minlength=bins).astype(np.int64)
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)
    ]
