#!/usr/bin/env python3
"""
experiments.py

Seeded reproductions of the three experiments:

- order selection on simulated order-5 binary chains (criterion curves),
- MDL histogram of a truncated Laplacian sample,
- MDL gray-level histogram and quantization of an 8-bit image.

Each runner returns a plain dict; main() writes them as metrics JSON.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from .arithcode import adaptive_code_length_fast
from .criteria import Criterion, criterion_curve, mv, penalty, select_order
from .data import BASELINE, synthetic_image, synthetic_model
from .histogram import CellGrid, bin_sample, dp_select, mean_bin_width, sample_laplace
from .image import GrayImage, gray_histogram, psnr, quantization_levels, quantize, read_pgm_file
from .markov import MarkovModel, entropy_rate, simulate

logger = logging.getLogger("riccode.experiments")

CENTER = ((-1.0, 1.0),)
TAILS = ((-5.0, -2.0), (2.0, 5.0))


# ----------------------------------------------------------------------
# Order selection
# ----------------------------------------------------------------------
def _order_trial(model: MarkovModel, n: int, k_max: int, seed: int) -> Dict[str, Any]:
    seq = simulate(model, n, seed)
    k_true = model.order
    return {
        "seed": seed,
        "k_ric": select_order(seq, k_max, Criterion.RIC),
        "k_mv": select_order(seq, k_max, Criterion.MV),
        "k_adaptive": select_order(seq, k_max, Criterion.ADAPTIVE_LENGTH),
        "adaptive_minus_mv": adaptive_code_length_fast(seq, k_true) - mv(seq, k_true),
    }


def order_selection_trials(
    n_trials: int = 50,
    n: int = BASELINE["n"],
    k_max: int = 7,
    model: Optional[MarkovModel] = None,
    seed: int = 2007,
    n_jobs: int = 1,
) -> Dict[str, Any]:
    """Selection rates of RIC, MV and adaptive length over seeded realisations of one model."""
    model = model if model is not None else synthetic_model(seed=seed)
    k_true = model.order
    trials = Parallel(n_jobs=n_jobs)(
        delayed(_order_trial)(model, n, k_max, seed + i) for i in range(n_trials)
    )
    pen = penalty(model.m, k_true, n)
    gaps = np.array([t["adaptive_minus_mv"] for t in trials])
    metrics = {
        "n_trials": n_trials,
        "n": n,
        "k_true": k_true,
        "entropy_rate": entropy_rate(model),
        "ric_hit_rate": float(np.mean([t["k_ric"] == k_true for t in trials])),
        "adaptive_hit_rate": float(np.mean([t["k_adaptive"] == k_true for t in trials])),
        "mv_ge_ric_rate": float(np.mean([t["k_mv"] >= t["k_ric"] for t in trials])),
        "mean_gap_bits": float(gaps.mean()),
        "penalty_bits": pen,
        "gap_over_penalty": float(gaps.mean() / pen),
        "trials": trials,
    }
    logger.info(
        "order selection: RIC %.2f, adaptive %.2f, MV>=RIC %.2f",
        metrics["ric_hit_rate"],
        metrics["adaptive_hit_rate"],
        metrics["mv_ge_ric_rate"],
    )
    return metrics


# ----------------------------------------------------------------------
# Laplacian histogram
# ----------------------------------------------------------------------
def _laplace_trial(n: int, seed: int, interval: Tuple[float, float], step: float) -> Dict[str, Any]:
    grid = CellGrid.regular(interval[0], interval[1], step)
    part, value = dp_select(bin_sample(sample_laplace(n, seed, interval), grid))
    return {
        "seed": seed,
        "m": part.m,
        "crit_bits": value,
        "center_width": mean_bin_width(part, CENTER),
        "tail_width": mean_bin_width(part, TAILS),
    }


def laplace_trials(
    n_trials: int = 20,
    n: int = BASELINE["laplace_n"],
    interval: Tuple[float, float] = BASELINE["laplace_interval"],
    step: float = 0.02,
    seed: int = 2007,
    n_jobs: int = 1,
) -> Dict[str, Any]:
    trials = Parallel(n_jobs=n_jobs)(
        delayed(_laplace_trial)(n, seed + i, interval, step) for i in range(n_trials)
    )
    finer = [t["center_width"] < t["tail_width"] for t in trials]
    return {
        "n_trials": n_trials,
        "n": n,
        "step": step,
        "finer_center_rate": float(np.mean(finer)),
        "m_min": int(min(t["m"] for t in trials)),
        "m_max": int(max(t["m"] for t in trials)),
        "trials": trials,
    }


# ----------------------------------------------------------------------
# Image quantization
# ----------------------------------------------------------------------
def image_experiment(img: GrayImage) -> Dict[str, Any]:
    binned = gray_histogram(img)
    part, value = dp_select(binned)
    levels = quantization_levels(binned, part)
    recon = quantize(img, part, levels)
    return {
        "width": img.width,
        "height": img.height,
        "m": part.m,
        "crit_bits": value,
        "distinct_levels": recon.distinct_levels(),
        "psnr_db": psnr(img, recon),
        "levels": [int(v) for v in levels],
    }


def write_metrics(path: Union[str, Path], metrics: Dict[str, Any]) -> str:
    out_path = Path(path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w") as f:
        json.dump(metrics, f, indent=2)
    return str(out_path)


def main():
    parser = argparse.ArgumentParser(description="Run the order-selection, Laplacian and image experiments.")
    parser.add_argument("--experiment", choices=["order", "laplace", "image", "all"], default="all")
    parser.add_argument("--trials", type=int, default=None, help="Number of seeded trials.")
    parser.add_argument("--seed", type=int, default=2007)
    parser.add_argument("--image", type=str, default=os.environ.get("RICCODE_LENA"), help="8-bit PGM image.")
    parser.add_argument("--out", type=str, default="reports", help="Output directory for metrics JSON.")
    parser.add_argument("--curve", action="store_true", help="Also export the criterion curve of one trial.")
    args = parser.parse_args()

    n_jobs = int(os.environ.get("RICCODE_N_JOBS", "1"))
    out = Path(args.out)

    if args.experiment in ("order", "all"):
        model = synthetic_model(seed=args.seed)
        metrics = order_selection_trials(args.trials or 50, model=model, seed=args.seed, n_jobs=n_jobs)
        print(f"Metrics saved to {write_metrics(out / 'order_selection.json', metrics)}")
        print(
            f"RIC hit rate={metrics['ric_hit_rate']:.2f}, adaptive hit rate={metrics['adaptive_hit_rate']:.2f}"
        )
        if args.curve:
            seq = simulate(model, BASELINE["n"], args.seed)
            criterion_curve(seq, 7, n_jobs=n_jobs).to_csv(out / "curve.csv")
            print(f"Criterion curve saved to {out / 'curve.csv'}")

    if args.experiment in ("laplace", "all"):
        metrics = laplace_trials(args.trials or 20, seed=args.seed, n_jobs=n_jobs)
        print(f"Metrics saved to {write_metrics(out / 'laplace.json', metrics)}")
        print(f"Finer center rate={metrics['finer_center_rate']:.2f}, m in [{metrics['m_min']}, {metrics['m_max']}]")

    if args.experiment in ("image", "all"):
        img = read_pgm_file(args.image) if args.image else synthetic_image(seed=args.seed)
        metrics = image_experiment(img)
        metrics["source"] = args.image or "synthetic"
        print(f"Metrics saved to {write_metrics(out / 'image.json', metrics)}")
        print(f"m={metrics['m']}, PSNR={metrics['psnr_db']:.2f} dB")


if __name__ == "__main__":
    main()
