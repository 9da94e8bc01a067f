#!/usr/bin/env python3
"""
image.py

8-bit grayscale images: PGM (P5/P2, maxval 255) ingest and output, the
256-cell gray-level histogram, quantization onto a selected sub-partition of
the gray levels, and PSNR.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .exceptions import PGMFormatError
from .histogram import BinnedSample, CellGrid, SubPartition

logger = logging.getLogger("riccode.image")

MAXVAL = 255
GRAY_GRID = CellGrid(np.arange(MAXVAL + 2, dtype=np.float64))

_COMMENT = re.compile(rb"#[^\n]*")


@dataclass(frozen=True, eq=False)
class GrayImage:
    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")
        pixels = np.asarray(self.pixels)
        if pixels.size != self.width * self.height:
            raise ValueError(f"{pixels.size} pixels for a {self.width}x{self.height} image")
        if pixels.size and (pixels.min() < 0 or pixels.max() > MAXVAL):
            raise ValueError("gray levels must lie in [0, 255]")
        pixels = pixels.reshape(self.height, self.width).astype(np.uint8)
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "GrayImage":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        return cls(arr.shape[1], arr.shape[0], arr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def distinct_levels(self) -> int:
        return int(np.unique(self.pixels).size)


# ----------------------------------------------------------------------
# PGM
# ----------------------------------------------------------------------
def _header(data: bytes, source: str) -> Tuple[List[int], int]:
    """Width, height and maxval after the magic, and the offset just past maxval."""
    pos, tokens = 2, []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise PGMFormatError("truncated header", source)
        if data[pos : pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise PGMFormatError(f"unexpected byte {data[pos:pos + 1]!r} in header", source)
        tokens.append(int(data[start:pos]))
    return tokens, pos


def read_pgm(data: bytes, source: str = "<pgm>") -> GrayImage:
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise PGMFormatError(f"unsupported magic {magic!r}, expected P5 or P2", source)
    (width, height, maxval), pos = _header(data, source)
    if maxval != MAXVAL:
        raise PGMFormatError(f"unsupported maxval {maxval}, only 255 is handled", source)
    if width < 1 or height < 1:
        raise PGMFormatError(f"bad dimensions {width}x{height}", source)
    size = width * height
    if magic == b"P5":
        body = data[pos + 1 : pos + 1 + size]
        if len(body) < size:
            raise PGMFormatError(f"truncated payload: {len(body)} of {size} bytes", source)
        pixels = np.frombuffer(body, dtype=np.uint8)
    else:
        values = _COMMENT.sub(b"", data[pos:]).split()
        if len(values) < size:
            raise PGMFormatError(f"truncated payload: {len(values)} of {size} values", source)
        try:
            pixels = np.array([int(v) for v in values[:size]], dtype=np.int64)
        except ValueError as e:
            raise PGMFormatError(f"non-integer pixel value: {e}", source) from e
        if pixels.min() < 0 or pixels.max() > MAXVAL:
            raise PGMFormatError("pixel value above maxval", source)
    return GrayImage(width, height, pixels)


def write_pgm(img: GrayImage, ascii: bool = False) -> bytes:
    if not ascii:
        return f"P5\n{img.width} {img.height}\n{MAXVAL}\n".encode("ascii") + img.pixels.tobytes()
    rows = "\n".join(" ".join(str(int(v)) for v in row) for row in img.pixels)
    return f"P2\n{img.width} {img.height}\n{MAXVAL}\n{rows}\n".encode("ascii")


def read_pgm_file(path: Union[str, Path]) -> GrayImage:
    p = Path(path)
    return read_pgm(p.read_bytes(), str(p))


def write_pgm_file(path: Union[str, Path], img: GrayImage, ascii: bool = False) -> None:
    Path(path).write_bytes(write_pgm(img, ascii=ascii))


# ----------------------------------------------------------------------
# Histogram and quantization
# ----------------------------------------------------------------------
def gray_histogram(img: GrayImage) -> BinnedSample:
    """Unit cells [g, g+1) for g = 0..255."""
    counts = np.bincount(img.pixels.ravel(), minlength=MAXVAL + 1)
    return BinnedSample(GRAY_GRID, counts)


def _check_gray_partition(part: SubPartition) -> None:
    if part.grid.R != MAXVAL + 1:
        raise ValueError(f"partition over {part.grid.R} cells, expected the 256 gray levels")


def quantization_levels(binned: BinnedSample, part: SubPartition) -> np.ndarray:
    """Rounded count-weighted mean level of each interval; empty intervals get their midpoint."""
    _check_gray_partition(part)
    levels = np.arange(MAXVAL + 1, dtype=np.float64)
    cuts = list(part.cuts)
    weight = np.diff(np.concatenate([[0], np.cumsum(binned.counts)])[cuts]).astype(np.float64)
    mass = np.diff(np.concatenate([[0.0], np.cumsum(binned.counts * levels)])[cuts])
    first = np.asarray(cuts[:-1], dtype=np.float64)
    last = np.asarray(cuts[1:], dtype=np.float64) - 1
    centre = np.where(weight > 0, mass / np.where(weight > 0, weight, 1.0), 0.5 * (first + last))
    return np.floor(centre + 0.5).astype(np.int64)


def quantize(img: GrayImage, part: SubPartition, levels: Optional[np.ndarray] = None) -> GrayImage:
    """Replace each pixel by the representative level of its interval.

    ``levels`` defaults to quantization_levels of img's own histogram; pass the
    levels of a source image to requantize deterministically.
    """
    _check_gray_partition(part)
    if levels is None:
        levels = quantization_levels(gray_histogram(img), part)
    levels = np.asarray(levels, dtype=np.int64)
    if levels.shape != (part.m,):
        raise ValueError(f"{levels.size} levels for {part.m} intervals")
    lut = levels[part.interval_of_cell()].astype(np.uint8)
    return GrayImage(img.width, img.height, lut[img.pixels])


def psnr(a: GrayImage, b: GrayImage) -> float:
    """10 log10(255^2 / MSE) in dB; +inf for identical images."""
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return float("inf")
    return 10.0 * math.log10(MAXVAL**2 / mse)


def quantization_report(part: SubPartition, levels: np.ndarray, psnr_db: float) -> Dict[str, Any]:
    """JSON-ready report; an infinite PSNR is stored as null."""
    return {
        "m": part.m,
        "levels": [int(v) for v in levels],
        "psnr_db": None if math.isinf(psnr_db) else float(psnr_db),
    }
