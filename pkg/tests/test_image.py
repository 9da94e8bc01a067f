import math

import numpy as np
import pytest

from src.riccode.data import synthetic_image
from src.riccode.exceptions import PGMFormatError
from src.riccode.histogram import SubPartition, dp_select
from src.riccode.image import (
    GRAY_GRID,
    GrayImage,
    gray_histogram,
    psnr,
    quantization_levels,
    quantization_report,
    quantize,
    read_pgm,
    read_pgm_file,
    write_pgm,
    write_pgm_file,
)


@pytest.fixture
def small_image(rng):
    return GrayImage.from_array(rng.integers(0, 256, (7, 5)))


def test_pgm_roundtrip(small_image, tmp_path):
    assert read_pgm(write_pgm(small_image)) == small_image
    write_pgm_file(tmp_path / "a.pgm", small_image)
    assert read_pgm_file(tmp_path / "a.pgm") == small_image


def test_p2_and_p5_agree(small_image):
    assert read_pgm(write_pgm(small_image, ascii=True)) == read_pgm(write_pgm(small_image))


def test_pgm_header_comments():
    data = b"P5\n# made by hand\n2 1\n# depth\n255\n\x00\xff"
    img = read_pgm(data)
    assert (img.width, img.height) == (2, 1)
    assert list(img.pixels.ravel()) == [0, 255]


def test_pgm_rejects_16_bit():
    with pytest.raises(PGMFormatError, match="maxval"):
        read_pgm(b"P5\n2 2\n65535\n" + bytes(8))


def test_pgm_rejects_truncated_payload():
    with pytest.raises(PGMFormatError, match="truncated"):
        read_pgm(b"P5\n4 4\n255\n" + bytes(10))
    with pytest.raises(PGMFormatError, match="truncated"):
        read_pgm(b"P2\n2 2\n255\n1 2 3\n")
    with pytest.raises(PGMFormatError):
        read_pgm(b"P6\n1 1\n255\n\x00\x00\x00")


def test_gray_histogram_examples():
    binned = gray_histogram(GrayImage.from_array([[0, 0], [255, 128]]))
    assert binned.grid.R == 256
    assert binned.counts[0] == 2 and binned.counts[128] == 1 and binned.counts[255] == 1
    assert binned.n == 4

    flat = gray_histogram(GrayImage.from_array(np.full((3, 4), 17)))
    assert np.count_nonzero(flat.counts) == 1
    assert flat.counts[17] == 12


def test_quantize_finest_is_identity(small_image):
    assert quantize(small_image, SubPartition.finest(GRAY_GRID)) == small_image


def test_quantize_coarsest_is_rounded_mean():
    img = GrayImage.from_array([[10, 11], [12, 12]])
    out = quantize(img, SubPartition.coarsest(GRAY_GRID))
    assert np.all(out.pixels == 11)


def test_quantize_empty_interval_gets_midpoint():
    binned = gray_histogram(GrayImage.from_array([[200, 201]]))
    levels = quantization_levels(binned, SubPartition((0, 100, 256), GRAY_GRID))
    assert list(levels) == [50, 201]


def test_quantize_idempotent_with_source_levels(rng):
    img = GrayImage.from_array(rng.integers(0, 256, (16, 16)))
    part = SubPartition((0, 40, 90, 200, 256), GRAY_GRID)
    levels = quantization_levels(gray_histogram(img), part)
    once = quantize(img, part, levels)
    assert quantize(once, part, levels) == once
    assert once.distinct_levels() <= part.m


def test_quantize_rejects_wrong_grid(small_image):
    from src.riccode.histogram import CellGrid

    with pytest.raises(ValueError):
        quantize(small_image, SubPartition.coarsest(CellGrid([0.0, 1.0, 2.0])))


def test_psnr_values():
    a = GrayImage.from_array(np.full((4, 4), 100))
    b = GrayImage.from_array(np.full((4, 4), 101))
    assert psnr(a, a) == math.inf
    assert psnr(a, b) == pytest.approx(10 * math.log10(65025), abs=1e-9)
    assert psnr(a, b) == pytest.approx(48.13, abs=0.01)
    assert psnr(a, b) == psnr(b, a)
    with pytest.raises(ValueError):
        psnr(a, GrayImage.from_array(np.zeros((2, 8))))


def test_refinement_increases_psnr():
    img = GrayImage.from_array([[10, 10, 50, 50], [10, 10, 50, 50]])
    coarse = SubPartition.coarsest(GRAY_GRID)
    fine = SubPartition((0, 30, 256), GRAY_GRID)
    assert psnr(img, quantize(img, fine)) > psnr(img, quantize(img, coarse))


def test_synthetic_image_quantization():
    img = synthetic_image(256, 256, seed=3)
    binned = gray_histogram(img)
    part, _ = dp_select(binned)
    levels = quantization_levels(binned, part)
    recon = quantize(img, part, levels)
    assert 2 <= part.m <= 256
    assert recon.distinct_levels() <= part.m
    assert psnr(img, recon) >= 30


def test_quantization_report():
    part = SubPartition((0, 128, 256), GRAY_GRID)
    report = quantization_report(part, np.array([60, 190]), math.inf)
    assert report == {"m": 2, "levels": [60, 190], "psnr_db": None}
