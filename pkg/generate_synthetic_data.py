#!/usr/bin/env python3
"""
generate_synthetic_data.py

Writes the synthetic inputs used by the experiments into `data/`:
an order-5 binary model, one realisation of it, a truncated Laplacian sample
and a smooth 512x512 test image.
"""
from src.riccode.data import main

if __name__ == "__main__":
    main()
