"""Singular spectrum of the pixel matrix, blur degree, and low-rank rebuilds.

Blur concentrates the image's energy in its leading singular values, so the
ratio of the top-k sum to the full sum (the blur degree) rises with blur.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ZeroSpectrum
from .image import FloatPlane, GrayImage, downscale, from_float

DEFAULT_K = 50
ALTERNATE_K = 300
DEFAULT_DOWNSCALE = 1024


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    """All singular values of the (possibly downscaled) pixel matrix."""

    values: np.ndarray
    source_dims: tuple[int, int]
    downscaled_to: tuple[int, int] | None = None

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class BlurDegree:
    beta: float
    k: int


def singular_values(img: GrayImage, downscale_to: int | None = None) -> SingularSpectrum:
    """Descending singular values of the pixel matrix.

    With ``downscale_to``, the image is first shrunk so its larger side is at
    most that many pixels; the spectrum records the analyzed dimensions since
    the blur degree shifts under rescaling.
    """
    source_dims = (img.height, img.width)
    analyzed = img
    downscaled_to = None
    if downscale_to is not None:
        analyzed = downscale(img, downscale_to)
        if analyzed is not img:
            downscaled_to = (analyzed.height, analyzed.width)
    values = _kernels.svd_values(analyzed.pixels.astype(np.float64))
    return SingularSpectrum(values, source_dims, downscaled_to)


def blur_degree(spectrum: SingularSpectrum, k: int = DEFAULT_K) -> BlurDegree:
    """Ratio of the k largest singular values' sum to the full sum."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    sv = spectrum.values
    total = float(np.sum(sv))
    if total == 0.0:
        raise ZeroSpectrum("all singular values are zero")
    kk = min(k, sv.size)
    return BlurDegree(beta=float(np.sum(sv[:kk])) / total, k=k)


def lowrank_plane(img: GrayImage, k: int) -> FloatPlane:
    """Best rank-k approximation of the pixel matrix, un-quantized."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    u, s, vt = _kernels.svd_factor(img.pixels.astype(np.float64))
    kk = min(k, s.size)
    return FloatPlane((u[:, :kk] * s[:kk]) @ vt[:kk, :])


def lowrank_reconstruct(img: GrayImage, k: int) -> GrayImage:
    """Rank-k approximation quantized back to 8 bits."""
    return from_float(lowrank_plane(img, k))
