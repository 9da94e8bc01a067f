#!/usr/bin/env python3
"""
visualization.py

Renders the figures from the CSV/JSON/PGM artifacts written by the CLI and the
experiments. The CLI itself never imports this module.

Run:
    python -m src.riccode.visualization --curve reports/curve.csv \
        --partition reports/laplace_part.json --original image.pgm --reconstructed image_q.pgm
"""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import seaborn as sns  # noqa: E402

from .criteria import read_curve_csv  # noqa: E402
from .histogram import laplace_density, read_json  # noqa: E402
from .image import read_pgm_file  # noqa: E402

sns.set(style="whitegrid")

FIG_DIR = Path("reports/figures")


def savefig(name: str, fig_dir: Path = FIG_DIR) -> Path:
    """Save the current figure and close it."""
    fig_dir.mkdir(parents=True, exist_ok=True)
    plt.tight_layout()
    out = fig_dir / name
    plt.savefig(out, dpi=300)
    print(f"[saved] {out}")
    plt.close()
    return out


def plot_criterion_curve(csv_path: str, fig_dir: Path = FIG_DIR) -> Path:
    """Adaptive length, simple length, MV and RIC (bits per symbol) against k."""
    frame = read_curve_csv(csv_path).to_frame()
    plt.figure(figsize=(8, 5))
    for column, label, marker in (
        ("adaptive_bps", "adaptive coding", "o"),
        ("simple_bps", "simple coding", "s"),
        ("mv_bps", "MV", "^"),
        ("ric_bps", "RIC", "D"),
    ):
        plt.plot(frame["k"], frame[column], marker=marker, label=label)
    plt.xlabel("order k")
    plt.ylabel("bits per symbol")
    plt.legend()
    return savefig("criterion_curves.png", fig_dir)


def plot_partition(json_path: str, laplace: bool = False, fig_dir: Path = FIG_DIR) -> Path:
    """Selected histogram as a density; optionally the Laplacian density on top."""
    obj = read_json(json_path)
    edges = np.asarray(obj["boundaries"], dtype=np.float64)
    counts = np.asarray(obj["counts"], dtype=np.float64)
    widths = np.diff(edges)
    heights = counts / (counts.sum() * widths)

    plt.figure(figsize=(8, 5))
    plt.bar(edges[:-1], heights, width=widths, align="edge", alpha=0.6, edgecolor="black", linewidth=0.3)
    if laplace:
        x = np.linspace(edges[0], edges[-1], 1000)
        plt.plot(x, laplace_density(x), color="crimson", label="exp(-|x|)/2")
        plt.legend()
    plt.xlabel("x")
    plt.ylabel("density")
    plt.title(f"Partition, m = {len(obj['counts'])}")
    return savefig(Path(json_path).stem + "_partition.png", fig_dir)


def plot_reconstruction(original: str, reconstructed: str, fig_dir: Path = FIG_DIR) -> Path:
    """Original and quantized images side by side."""
    a, b = read_pgm_file(original), read_pgm_file(reconstructed)
    fig, axes = plt.subplots(1, 2, figsize=(10, 5))
    for ax, img, title in zip(axes, (a, b), ("original", f"{b.distinct_levels()} levels")):
        ax.imshow(img.pixels, cmap="gray", vmin=0, vmax=255)
        ax.set_title(title)
        ax.axis("off")
    return savefig("reconstruction.png", fig_dir)


def main(argv: Optional[list] = None):
    parser = argparse.ArgumentParser(description="Render figures from riccode artifacts.")
    parser.add_argument("--curve", help="Criterion curve CSV.")
    parser.add_argument("--partition", help="Partition JSON.")
    parser.add_argument("--laplace", action="store_true", help="Overlay the Laplacian density.")
    parser.add_argument("--original", help="Original PGM image.")
    parser.add_argument("--reconstructed", help="Quantized PGM image.")
    parser.add_argument("--out", default=str(FIG_DIR), help="Figure directory.")
    args = parser.parse_args(argv)

    fig_dir = Path(args.out)
    if args.curve:
        plot_criterion_curve(args.curve, fig_dir)
    if args.partition:
        plot_partition(args.partition, args.laplace, fig_dir)
    if args.original and args.reconstructed:
        plot_reconstruction(args.original, args.reconstructed, fig_dir)
    print(f"\nAll plots saved under {fig_dir}/")


if __name__ == "__main__":
    main()
