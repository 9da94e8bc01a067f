#!/usr/bin/env python3
"""
data.py

Synthetic inputs for the experiments: an order-k Markov parameter with a
prescribed entropy rate, realisations of it, a truncated Laplacian sample and
a smooth natural-looking test image. The CLI writes them under data/.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .histogram import sample_laplace, write_sample
from .image import GrayImage, write_pgm_file
from .markov import Alphabet, MarkovModel, check_table_size, entropy_rate, simulate, write_model, write_sequence

logger = logging.getLogger("riccode.data")

BASELINE = {
    "m": 2,
    "k": 5,
    "n": 2000,
    "entropy": 0.527,  # bits per symbol
    "spread": 0.03,  # per-context jitter of the favoured probability
    "laplace_n": 10_000,
    "laplace_interval": (-5.0, 5.0),
}

# Strongest favour tried when solving for the entropy target.
_MAX_FAVOUR = 0.99


def _favoured_model(m: int, k: int, favour: float, jitter: np.ndarray, preferred: np.ndarray) -> MarkovModel:
    p = np.clip(favour + jitter, 1.0 / m, _MAX_FAVOUR)
    theta = np.repeat(((1.0 - p) / (m - 1))[:, None], m, axis=1)
    theta[np.arange(m**k), preferred] = p
    return MarkovModel(Alphabet(m), k, theta)


def synthetic_model(
    m: int = BASELINE["m"],
    k: int = BASELINE["k"],
    target_entropy: float = BASELINE["entropy"],
    seed: Optional[int] = 42,
    spread: float = BASELINE["spread"],
) -> MarkovModel:
    """Order-k parameter whose next symbol repeats the oldest context symbol.

    Each context j favours the symbol x_{t-k} with probability favour + jitter_j
    (the remaining mass is shared by the other symbols). The favour is solved so
    that the entropy rate equals ``target_entropy``. For k = 0 the favoured
    symbol is drawn at random.
    """
    check_table_size(m, k)
    rng = np.random.default_rng(seed)
    n_ctx = m**k
    jitter = rng.uniform(-spread, spread, n_ctx)
    if k == 0:
        preferred = rng.integers(0, m, size=1)
    else:
        preferred = np.arange(n_ctx) // m ** (k - 1)

    def gap(favour: float) -> float:
        return entropy_rate(_favoured_model(m, k, favour, jitter, preferred)) - target_entropy

    lo, hi = 1.0 / m, _MAX_FAVOUR
    if not gap(lo) > 0 > gap(hi):
        raise ValueError(
            f"entropy {target_entropy} not reachable for m={m}, k={k} "
            f"(range {gap(hi) + target_entropy:.3f}..{gap(lo) + target_entropy:.3f})"
        )
    favour = brentq(gap, lo, hi, xtol=1e-12)
    model = _favoured_model(m, k, favour, jitter, preferred)
    logger.info("synthetic model m=%d k=%d favour=%.4f H=%.4f", m, k, favour, entropy_rate(model))
    return model


def synthetic_image(width: int = 512, height: int = 512, seed: Optional[int] = 0) -> GrayImage:
    """Smooth gradients, soft blobs and mild sensor noise on 8 bits."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width] / max(width, height)
    field = 0.6 * x + 0.3 * y
    for _ in range(6):
        cx, cy = rng.uniform(0, 1, 2)
        radius = rng.uniform(0.05, 0.25)
        field += rng.uniform(-0.6, 0.6) * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * radius**2))
    fx, fy = rng.uniform(2, 8, 2)
    field += 0.15 * np.sin(2 * np.pi * fx * x) * np.cos(2 * np.pi * fy * y)
    field = (field - field.min()) / (field.max() - field.min())
    pixels = 10 + 235 * field + rng.normal(0, 2.0, field.shape)
    return GrayImage.from_array(np.clip(np.floor(pixels + 0.5), 0, 255).astype(np.uint8))


def main():
    parser = argparse.ArgumentParser(description="Generate synthetic model, sequence, Laplacian sample and image.")
    parser.add_argument("--n", type=int, default=BASELINE["n"], help="Sequence length.")
    parser.add_argument("--order", type=int, default=BASELINE["k"], help="Order of the synthetic chain.")
    parser.add_argument("--entropy", type=float, default=BASELINE["entropy"], help="Target entropy rate (bits).")
    parser.add_argument("--seed", type=int, default=42, help="Random seed.")
    parser.add_argument("--out", type=str, default="data", help="Output directory.")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    model = synthetic_model(k=args.order, target_entropy=args.entropy, seed=args.seed)
    write_model(out / "order5.model", model)
    write_sequence(out / "sim.seq", simulate(model, args.n, args.seed), model.order)
    write_sample(
        out / "laplace.txt",
        sample_laplace(BASELINE["laplace_n"], args.seed, BASELINE["laplace_interval"]),
    )
    write_pgm_file(out / "synthetic.pgm", synthetic_image(seed=args.seed))
    print(f"Synthetic inputs written to '{out}' (n={args.n}, H={entropy_rate(model):.4f})")


if __name__ == "__main__":
    main()
