#!/usr/bin/env python3
"""
criteria.py

Order selection for Markov sequences: the maximized likelihood criterion MV,
the penalized criterion RIC = MV + (m-1) m^k / 2 * log2 n, selection by
minimization, and the four-series criterion curves (adaptive code length,
simple code length, MV, RIC), all in bits.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Tuple, Union

import pandas as pd
from joblib import Parallel, delayed

from .arithcode import adaptive_code_length_fast, encode_adaptive, encode_simple
from .markov import SymbolSeq, mle_estimate, neg_log_likelihood

logger = logging.getLogger("riccode.criteria")

DEFAULT_K_MAX = 7
CURVE_COLUMNS = ["k", "adaptive_bps", "simple_bps", "mv_bps", "ric_bps"]


class Criterion(str, Enum):
    RIC = "RIC"
    MV = "MV"
    ADAPTIVE_LENGTH = "ADAPTIVE_LENGTH"


def free_parameters(m: int, k: int) -> int:
    """|Theta_k| = (m - 1) m^k."""
    return (m - 1) * m**k


def mv(seq: SymbolSeq, k: int) -> float:
    """MV(x^n, k) = -log2 P(x^n | ML parameter of order k)."""
    return neg_log_likelihood(seq, mle_estimate(seq, k))


def penalty(m: int, k: int, n: int) -> float:
    if n < 1:
        raise ValueError(f"penalty needs n >= 1, got {n}")
    return free_parameters(m, k) / 2 * math.log2(n)


def ric(seq: SymbolSeq, k: int) -> float:
    if seq.n < max(k, 1):
        raise ValueError(f"RIC needs n >= max(k, 1), got n={seq.n}, k={k}")
    return mv(seq, k) + penalty(seq.m, k, seq.n)


def criterion_value(seq: SymbolSeq, k: int, criterion: Criterion, exact: bool = False) -> float:
    criterion = Criterion(criterion)
    if criterion is Criterion.RIC:
        return ric(seq, k)
    if criterion is Criterion.MV:
        return mv(seq, k)
    if exact:
        msg, _ = encode_adaptive(seq, k, with_trace=False)
        return float(len(msg.payload))
    return adaptive_code_length_fast(seq, k)


def select_order(
    seq: SymbolSeq,
    k_max: int = DEFAULT_K_MAX,
    criterion: Criterion = Criterion.RIC,
    exact: bool = False,
) -> int:
    """Argmin of the criterion over k = 0..k_max; ties go to the smaller order."""
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    if seq.n <= k_max:
        raise ValueError(f"sequence of length {seq.n} too short for k_max={k_max}")
    values = [criterion_value(seq, k, criterion, exact) for k in range(k_max + 1)]
    best = min(range(k_max + 1), key=lambda k: (values[k], k))
    logger.debug("%s selects k=%d (values=%s)", Criterion(criterion).value, best, values)
    return best


# ----------------------------------------------------------------------
# Criterion curves
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class CurveRow:
    """Bits per symbol at one order."""

    k: int
    adaptive_bits: float
    simple_bits: float
    mv: float
    ric: float


@dataclass(frozen=True)
class CriterionCurve:
    n: int
    rows: Tuple[CurveRow, ...]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(r.k, r.adaptive_bits, r.simple_bits, r.mv, r.ric) for r in self.rows],
            columns=CURVE_COLUMNS,
        )

    def to_csv(self, path: Union[str, Path, None] = None) -> str:
        text = self.to_frame().to_csv(index=False, float_format="%.6f", lineterminator="\n")
        if path is not None:
            Path(path).write_text(text)
        return text

    def argmin(self, series: str) -> int:
        """Order minimizing one series ('adaptive_bits', 'simple_bits', 'mv' or 'ric')."""
        return min(self.rows, key=lambda r: (getattr(r, series), r.k)).k


def _curve_row(seq: SymbolSeq, k: int, exact: bool) -> CurveRow:
    n = seq.n
    mv_bits = mv(seq, k)
    if exact:
        adaptive = float(len(encode_adaptive(seq, k, with_trace=False)[0].payload))
        simple = float(len(encode_simple(seq, k)[0].payload))
    else:
        adaptive = adaptive_code_length_fast(seq, k)
        simple = float(math.ceil(mv_bits))
    ric_bits = mv_bits + penalty(seq.m, k, n)
    return CurveRow(k, adaptive / n, simple / n, mv_bits / n, ric_bits / n)


def criterion_curve(
    seq: SymbolSeq, k_max: int = DEFAULT_K_MAX, exact: bool = False, n_jobs: int = 1
) -> CriterionCurve:
    """Per-symbol adaptive length, simple length, MV and RIC for k = 0..k_max."""
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    if seq.n <= k_max:
        raise ValueError(f"sequence of length {seq.n} too short for k_max={k_max}")
    rows: List[CurveRow] = Parallel(n_jobs=n_jobs)(
        delayed(_curve_row)(seq, k, exact) for k in range(k_max + 1)
    )
    rows.sort(key=lambda r: r.k)
    return CriterionCurve(seq.n, tuple(rows))


def read_curve_csv(path: Union[str, Path]) -> CriterionCurve:
    df = pd.read_csv(path)
    missing = [c for c in CURVE_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    rows = tuple(
        CurveRow(int(r.k), float(r.adaptive_bps), float(r.simple_bps), float(r.mv_bps), float(r.ric_bps))
        for r in df.itertuples(index=False)
    )
    return CriterionCurve(0, rows)
