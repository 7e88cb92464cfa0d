"""Synthetic shift and spin blur for building labeled training corpora."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import ExtentTooLarge
from .image import GrayImage, round_half_up


class BlurKind(Enum):
    SHIFT_VERTICAL = "vshift"
    SHIFT_HORIZONTAL = "hshift"
    SPIN = "spin"

    @classmethod
    def from_token(cls, token: str) -> "BlurKind":
        for kind in cls:
            if kind.value == token:
                return kind
        raise ValueError(f"unknown blur kind {token!r}; use vshift, hshift or spin")


MAX_SPIN_EXTENT = 180


@dataclass(frozen=True)
class BlurSpec:
    """One blur to synthesize: shift extent in pixels, spin extent in degrees."""

    kind: BlurKind
    extent: int

    def __post_init__(self):
        if self.extent < 0:
            raise ValueError(f"extent must be >= 0, got {self.extent}")
        if self.kind is BlurKind.SPIN and self.extent > MAX_SPIN_EXTENT:
            raise ExtentTooLarge(
                f"spin extent {self.extent} exceeds {MAX_SPIN_EXTENT} degrees"
            )

    @property
    def token(self) -> str:
        return f"{self.kind.value}{self.extent}"


@dataclass(frozen=True, eq=False)
class CorpusRecord:
    image: GrayImage
    label: str  # "clear" | "blurry"
    spec: BlurSpec | None

    @property
    def is_identity(self) -> bool:
        """True for degenerate blurry records whose spec is the identity."""
        return self.spec is not None and self.spec.extent == 0


def _quantize(plane: np.ndarray) -> GrayImage:
    return GrayImage(round_half_up(plane).astype(np.uint8))


def shift_blur(img: GrayImage, axis: str, extent: int) -> GrayImage:
    """Average of extent+1 copies translated 0..extent pixels along the axis.

    Vertical shifts move down, horizontal to the right; vacated border rows
    or columns replicate the edge.
    """
    if axis not in ("vertical", "horizontal"):
        raise ValueError(f"axis must be 'vertical' or 'horizontal', got {axis!r}")
    span = img.height if axis == "vertical" else img.width
    if extent < 0 or extent >= span:
        raise ExtentTooLarge(f"shift extent {extent} not in [0, {span})")
    if extent == 0:
        return img
    plane = img.pixels.astype(np.float64)
    h, w = plane.shape
    acc = np.zeros_like(plane)
    for t in range(extent + 1):
        if axis == "vertical":
            src_rows = np.maximum(np.arange(h) - t, 0)
            acc += plane[src_rows, :]
        else:
            src_cols = np.maximum(np.arange(w) - t, 0)
            acc += plane[:, src_cols]
    return _quantize(acc / (extent + 1))


def spin_blur(img: GrayImage, extent: int) -> GrayImage:
    """Average of the image rotated by each whole degree in [-extent, extent].

    Rotations are about the pixel-grid center with bilinear sampling;
    out-of-frame samples clamp to the nearest edge pixel.
    """
    if extent < 0 or extent > MAX_SPIN_EXTENT:
        raise ExtentTooLarge(f"spin extent {extent} not in [0, {MAX_SPIN_EXTENT}]")
    if extent == 0:
        return img
    mean = _kernels.rotate_mean(img.pixels.astype(np.float64), extent)
    return _quantize(mean)


def apply_blur(img: GrayImage, spec: BlurSpec) -> GrayImage:
    if spec.kind is BlurKind.SPIN:
        return spin_blur(img, spec.extent)
    axis = "vertical" if spec.kind is BlurKind.SHIFT_VERTICAL else "horizontal"
    return shift_blur(img, axis, spec.extent)


def synth_corpus(
    clear_images: list[GrayImage], specs: list[BlurSpec]
) -> list[CorpusRecord]:
    """Each input labeled clear, plus every (image, spec) pair labeled blurry.

    Ordering is deterministic: input order, then spec order per image.
    """
    if not clear_images:
        raise ValueError("need at least one clear image")
    records = [CorpusRecord(img, "clear", None) for img in clear_images]
    for img in clear_images:
        for spec in specs:
            records.append(CorpusRecord(apply_blur(img, spec), "blurry", spec))
    return records
