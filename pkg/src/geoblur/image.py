"""Grayscale image decoding, quantization and area-average resizing."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import _kernels
from .errors import CorruptStream, NonFiniteValue, UnsupportedFormat, ZeroDimension

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_JPEG_MAGIC = b"\xff\xd8\xff"
_TIFF_MAGICS = (b"II*\x00", b"MM\x00*")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit luminance plane; pixels are a read-only uint8 array (h, w)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.uint8, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2D pixel array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ZeroDimension(f"image has zero dimension: {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True, eq=False)
class FloatPlane:
    """Real-valued plane; values are a read-only float64 array (h, w)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2D value array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ZeroDimension(f"plane has zero dimension: {arr.shape}")
        if not np.isfinite(arr).all():
            raise NonFiniteValue("plane contains NaN or Inf")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def round_half_up(values: np.ndarray) -> np.ndarray:
    """Round nonnegative floats to the nearest integer, ties away from zero."""
    return np.floor(values + 0.5)


def decode_to_gray(file_bytes: bytes) -> GrayImage:
    """Decode PNG/JPEG/TIFF bytes to a grayscale image.

    Color inputs are converted with integer BT.601 luma
    (299 R + 587 G + 114 B, in thousandths) rounded half-up; inputs that are
    already single-channel pass through unchanged.
    """
    head = bytes(file_bytes[:8])
    if not (
        head.startswith(_PNG_MAGIC)
        or head.startswith(_JPEG_MAGIC)
        or head[:4] in _TIFF_MAGICS
    ):
        raise UnsupportedFormat("not a PNG, JPEG or TIFF stream")
    try:
        with Image.open(io.BytesIO(file_bytes)) as im:
            im.load()
            if im.width < 1 or im.height < 1:
                raise ZeroDimension(f"decoded image is {im.width}x{im.height}")
            if im.mode == "L":
                return GrayImage(np.asarray(im))
            if im.mode in ("1", "I", "I;16", "F"):
                return GrayImage(np.asarray(im.convert("L")))
            rgb = np.asarray(im.convert("RGB"), dtype=np.int64)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        # signature already matched, so a decoder failure means a bad stream
        raise CorruptStream(str(exc)) from exc
    luma_milli = 299 * rgb[:, :, 0] + 587 * rgb[:, :, 1] + 114 * rgb[:, :, 2]
    return GrayImage(((luma_milli + 500) // 1000).astype(np.uint8))


def encode_png(img: GrayImage) -> bytes:
    """Lossless PNG bytes for a grayscale image."""
    buf = io.BytesIO()
    Image.fromarray(np.asarray(img.pixels), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def downscale(img: GrayImage, max_dim: int) -> GrayImage:
    """Shrink so max(width, height) == max_dim, by area-average resampling.

    Images already within the bound are returned unchanged.
    """
    if max_dim < 1:
        raise ValueError(f"max_dim must be >= 1, got {max_dim}")
    h, w = img.height, img.width
    if max(h, w) <= max_dim:
        return img
    factor = max_dim / max(h, w)
    out_h = max(1, int(round_half_up(np.float64(h * factor))))
    out_w = max(1, int(round_half_up(np.float64(w * factor))))
    box = _kernels.area_resample(img.pixels.astype(np.float64), out_h, out_w)
    return GrayImage(round_half_up(box).astype(np.uint8))


def to_float(img: GrayImage) -> FloatPlane:
    """Exact widening of pixel values to a real-valued plane."""
    return FloatPlane(img.pixels.astype(np.float64))


def from_float(plane: FloatPlane) -> GrayImage:
    """Quantize a plane back to 8 bits: clamp to [0, 255], round half-up."""
    clamped = np.clip(plane.values, 0.0, 255.0)
    return GrayImage(round_half_up(clamped).astype(np.uint8))
