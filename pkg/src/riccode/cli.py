#!/usr/bin/env python3
"""
Command-line interface for riccode.

Subcommands
-----------
gen-model       synthetic order-k model file with a target entropy rate
simulate        model file + n + seed -> sequence file
encode/decode   sequence file <-> RIC1 code file (adaptive predictive coding)
order-select    print the selected order for RIC, MV and adaptive code length
curve           per-symbol criterion curves as CSV
sample-laplace  truncated Laplacian sample, one real per line
hist-select     MDL sub-partition of a sample binned on a regular grid (JSON)
img-hist        gray-level histogram of a PGM image (JSON)
img-quantize    quantize a PGM image onto a partition, report PSNR

Machine output goes to stdout when no output path is given; diagnostics go to
stderr. Seeds default to RICCODE_SEED (20070101).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from .arithcode import decode_adaptive, encode_adaptive, pack_code_file, read_code_file
from .criteria import DEFAULT_K_MAX, Criterion, criterion_curve, select_order
from .data import BASELINE, synthetic_model
from .histogram import (
    CellGrid,
    bin_sample,
    binned_to_json,
    dp_select,
    partition_from_json,
    partition_to_json,
    read_json,
    read_sample,
    sample_laplace,
)
from .image import (
    gray_histogram,
    psnr,
    quantization_levels,
    quantization_report,
    quantize,
    read_pgm_file,
    write_pgm,
)
from .markov import MAX_ORDER, format_model, format_sequence, labels_to_symbols, read_model, read_sequence, simulate

logger = logging.getLogger("riccode.cli")

DEFAULT_SEED = int(os.environ.get("RICCODE_SEED", "20070101"))
DEFAULT_LOG_LEVEL = os.environ.get("RICCODE_LOG_LEVEL", "WARNING")
DEFAULT_N_JOBS = int(os.environ.get("RICCODE_N_JOBS", "1"))


# ----------------------------------------------------------------------
# Option validators
# ----------------------------------------------------------------------
def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _order(text: str) -> int:
    value = _non_negative_int(text)
    if value > MAX_ORDER:
        raise argparse.ArgumentTypeError(f"order must be <= {MAX_ORDER}, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = _non_negative_int(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def _alphabet_size(text: str) -> int:
    value = _non_negative_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"alphabet size must be >= 2, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


# ----------------------------------------------------------------------
# Output helpers
# ----------------------------------------------------------------------
def _emit_text(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        logger.info("wrote %s", out)


def _emit_bytes(data: bytes, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(data)
        logger.info("wrote %s", out)


def _emit_json(obj: Dict[str, Any], out: Optional[str]) -> None:
    _emit_text(json.dumps(obj, indent=2) + "\n", out)


# ----------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------
def _cmd_gen_model(args: argparse.Namespace) -> None:
    model = synthetic_model(args.m, args.order, args.entropy, args.seed)
    _emit_text(format_model(model), args.output)


def _cmd_simulate(args: argparse.Namespace) -> None:
    model = read_model(args.model)
    seq = simulate(model, args.n, args.seed)
    _emit_text(format_sequence(seq, model.order), args.output)


def _cmd_encode(args: argparse.Namespace) -> None:
    if args.text is not None:
        seq, file_order = labels_to_symbols(args.text, args.m), 0
    elif args.input is not None:
        seq, file_order = read_sequence(args.input)
    else:
        raise ValueError("encode needs a sequence file or --text")
    k = file_order if args.order is None else args.order
    msg, _ = encode_adaptive(seq, k, with_trace=False)
    logger.info("encoded %d symbols at order %d into %d bits", seq.n, k, len(msg.payload))
    _emit_bytes(pack_code_file(msg), args.output)


def _cmd_decode(args: argparse.Namespace) -> None:
    msg = read_code_file(args.input)
    seq = decode_adaptive(msg)
    _emit_text(format_sequence(seq, msg.k), args.output)


def _cmd_order_select(args: argparse.Namespace) -> None:
    seq, _ = read_sequence(args.input)
    lines = [
        f"{c.value} {select_order(seq, args.kmax, c, exact=args.exact)}"
        for c in (Criterion.RIC, Criterion.MV, Criterion.ADAPTIVE_LENGTH)
    ]
    _emit_text("\n".join(lines) + "\n", args.output)


def _cmd_curve(args: argparse.Namespace) -> None:
    seq, _ = read_sequence(args.input)
    curve = criterion_curve(seq, args.kmax, exact=args.exact, n_jobs=args.jobs)
    _emit_text(curve.to_csv(), args.output)


def _cmd_sample_laplace(args: argparse.Namespace) -> None:
    data = sample_laplace(args.n, args.seed, (args.lo, args.hi))
    _emit_text("".join(f"{x:.17g}\n" for x in data), args.output)


def _cmd_hist_select(args: argparse.Namespace) -> None:
    grid = CellGrid.regular(args.lo, args.hi, args.step)
    r = 2.0 ** -args.precision_bits if args.include_precision else None
    binned = bin_sample(read_sample(args.input), grid, r)
    part, value = dp_select(binned)
    logger.info("selected %d intervals out of %d cells (crit=%.3f bits)", part.m, grid.R, value)
    _emit_json(partition_to_json(binned, part, value), args.output)


def _cmd_img_hist(args: argparse.Namespace) -> None:
    _emit_json(binned_to_json(gray_histogram(read_pgm_file(args.input))), args.output)


def _cmd_img_quantize(args: argparse.Namespace) -> None:
    img = read_pgm_file(args.input)
    binned = gray_histogram(img)
    if args.partition is not None:
        part = partition_from_json(read_json(args.partition), binned.grid, args.partition)
    else:
        part, _ = dp_select(binned)
    levels = quantization_levels(binned, part)
    recon = quantize(img, part, levels)
    Path(args.output).write_bytes(write_pgm(recon))
    _emit_json(quantization_report(part, levels, psnr(img, recon)), args.report)


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riccode", description="Adaptive arithmetic coding, RIC order selection and MDL histograms."
    )
    parser.add_argument("--log-level", default=DEFAULT_LOG_LEVEL, help="Logging level (default: %(default)s).")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[[argparse.Namespace], None], help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("-o", "--output", default=None, help="Output path (default: stdout).")
        return p

    p = add("gen-model", _cmd_gen_model, "Write a synthetic order-k model file.")
    p.add_argument("--m", type=_alphabet_size, default=BASELINE["m"])
    p.add_argument("--order", type=_order, default=BASELINE["k"])
    p.add_argument("--entropy", type=_positive_float, default=BASELINE["entropy"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = add("simulate", _cmd_simulate, "Simulate a sequence from a model file.")
    p.add_argument("model")
    p.add_argument("--n", type=_non_negative_int, default=BASELINE["n"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = add("encode", _cmd_encode, "Adaptive arithmetic code of a sequence file.")
    p.add_argument("input", nargs="?")
    p.add_argument("--order", type=_order, default=None, help="Coding order (default: file header).")
    p.add_argument("--text", default=None, help="Letters a, b, c... instead of a sequence file.")
    p.add_argument("--m", type=_alphabet_size, default=None, help="Alphabet size for --text.")

    p = add("decode", _cmd_decode, "Decode a RIC1 code file to a sequence file.")
    p.add_argument("input")

    p = add("order-select", _cmd_order_select, "Selected order per criterion.")
    p.add_argument("input")
    p.add_argument("--kmax", type=_order, default=DEFAULT_K_MAX)
    p.add_argument("--exact", action="store_true", help="Exact coding for the adaptive length.")

    p = add("curve", _cmd_curve, "Criterion curves (bits per symbol) as CSV.")
    p.add_argument("input")
    p.add_argument("--kmax", type=_order, default=DEFAULT_K_MAX)
    p.add_argument("--exact", action="store_true", help="Exact coders instead of the fast length path.")
    p.add_argument("--jobs", type=_positive_int, default=DEFAULT_N_JOBS)

    p = add("sample-laplace", _cmd_sample_laplace, "Truncated Laplacian sample.")
    p.add_argument("--n", type=_non_negative_int, default=BASELINE["laplace_n"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--lo", type=float, default=BASELINE["laplace_interval"][0])
    p.add_argument("--hi", type=float, default=BASELINE["laplace_interval"][1])

    p = add("hist-select", _cmd_hist_select, "MDL sub-partition of a regular grid.")
    p.add_argument("input")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--step", type=_positive_float, required=True)
    p.add_argument("--precision-bits", type=_positive_int, default=32)
    p.add_argument("--include-precision", action="store_true", help="Add the -n log2 r term to crit.")

    p = add("img-hist", _cmd_img_hist, "Gray-level histogram of a PGM image as JSON.")
    p.add_argument("input")

    p = sub.add_parser("img-quantize", help="Quantize a PGM image onto a gray-level partition.")
    p.set_defaults(handler=_cmd_img_quantize)
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="Output PGM path.")
    p.add_argument("--partition", default=None, help="Partition JSON (default: MDL selection).")
    p.add_argument("--report", default=None, help="Report JSON path (default: stdout).")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        args.handler(args)
    except (OSError, ValueError, RuntimeError, MemoryError) as exc:
        logger.error("%s: %s", args.command, exc)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
