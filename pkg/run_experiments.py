#!/usr/bin/env python3
"""
run_experiments.py

Runs the seeded order-selection, Laplacian-histogram and image-quantization
experiments and writes their metrics JSON under `reports/`.

    python run_experiments.py --experiment all --curve
    RICCODE_LENA=lena.pgm python run_experiments.py --experiment image
"""
import logging
import os

from src.riccode.experiments import main

if __name__ == "__main__":
    logging.basicConfig(
        level=os.environ.get("RICCODE_LOG_LEVEL", "INFO").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    main()
