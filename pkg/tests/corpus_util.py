"""Deterministic photo-like test scenes for corpus-level assertions.

Five grayscale scenes sized differently (odd and even dims both exercised).
Each mixes structure (full-contrast step edges, for gradient response) with
broadband speckle texture (for SVD rank and high-frequency content), which is
what survey photographs look like at desk scale.
"""

from __future__ import annotations

import numpy as np

from geoblur.image import GrayImage


def _blocks(rng: np.random.RandomState, h: int, w: int) -> np.ndarray:
    """Rooftop-like random rectangles over textured ground."""
    img = np.full((h, w), 140.0)
    for _ in range(40):
        bh = rng.randint(8, h // 3)
        bw = rng.randint(8, w // 3)
        y = rng.randint(0, h - bh)
        x = rng.randint(0, w - bw)
        img[y : y + bh, x : x + bw] = rng.choice([0, 48, 176, 224, 255])
    img += rng.randint(-35, 36, size=(h, w))
    return img


def _fields(rng: np.random.RandomState, h: int, w: int) -> np.ndarray:
    """Smooth gradient ground, sharp circular features, heavy speckle."""
    yy, xx = np.mgrid[0:h, 0:w]
    img = 80.0 + 100.0 * xx / w + 25.0 * np.sin(2 * np.pi * yy / h)
    for _ in range(12):
        cy = rng.randint(0, h)
        cx = rng.randint(0, w)
        r = rng.randint(8, 20)
        mask = (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
        img[mask] = rng.choice([0.0, 255.0])
    img += rng.randint(-45, 46, size=(h, w))
    return img


def _glyphs(rng: np.random.RandomState, h: int, w: int) -> np.ndarray:
    """Survey-marker-like grid of small high-contrast patterns."""
    img = np.full((h, w), 215.0)
    cell = 10
    for y in range(2, h - cell, cell + 4):
        for x in range(2, w - cell, cell + 4):
            if rng.rand() < 0.6:
                patch = rng.choice([0.0, 255.0], size=(5, 5), p=[0.7, 0.3])
                img[y : y + 10, x : x + 10] = np.kron(patch, np.ones((2, 2)))
    img += rng.randint(-30, 31, size=(h, w))
    return img


def _rings_checker(rng: np.random.RandomState, h: int, w: int) -> np.ndarray:
    """Half checkerboard (3 px cells), half concentric rings, light speckle."""
    yy, xx = np.mgrid[0:h, 0:w]
    checker = 255.0 * (((yy // 3) + (xx // 3)) % 2)
    r = np.hypot(yy - h / 2, xx - 3 * w / 4)
    rings = 127.5 + 127.5 * np.cos(r * 0.5)
    img = np.where(xx < w // 2, checker, rings)
    img += rng.randint(-25, 26, size=(h, w))
    return img


def _shoreline(rng: np.random.RandomState, h: int, w: int) -> np.ndarray:
    """Two textured regions split by a jagged full-contrast boundary."""
    yy, xx = np.mgrid[0:h, 0:w]
    border = (h / 2 + 18 * np.sin(2 * np.pi * np.arange(w) / 45) + 9 * np.sin(2 * np.pi * np.arange(w) / 13)).astype(int)
    img = np.where(yy < border[xx], 235.0, 20.0)
    img += 18.0 * np.sin(2 * np.pi * xx / 7.0) * (yy >= border[xx])
    img += rng.randint(-40, 41, size=(h, w))
    return img


_SCENES = (
    ("blocks", _blocks, (224, 288)),
    ("fields", _fields, (232, 301)),
    ("glyphs", _glyphs, (219, 256)),
    ("rings_checker", _rings_checker, (211, 270)),
    ("shoreline", _shoreline, (240, 240)),
)


def build_corpus() -> dict[str, GrayImage]:
    """Name -> clear image; deterministic across runs."""
    out: dict[str, GrayImage] = {}
    for i, (name, fn, (h, w)) in enumerate(_SCENES):
        rng = np.random.RandomState(1000 + i)
        plane = np.clip(fn(rng, h, w), 0.0, 255.0)
        out[name] = GrayImage(np.floor(plane + 0.5).astype(np.uint8))
    return out
