#!/usr/bin/env python3
"""
arithcode.py

Exact arithmetic coding of Markov sequences.

The adaptive predictive coder splits the current interval with the Laplace
estimates (n(i|j) + 1) / (n(j) + m) learnt from the already-coded prefix; the
simple coder splits with a fixed maximum-likelihood parameter estimated in a
first pass. The first k symbols are always split uniformly. Sub-intervals are
ordered by ascending symbol index. Intervals are tracked with Python integers
(low / denom, width / denom) so the arithmetic is exact.

Code file layout (big-endian)::

    b"RIC1" | m:u32 | k:u32 | n:u32 | bit count:u32 | payload bits, MSB first, zero padded
"""

from __future__ import annotations

import bisect
import logging
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .exceptions import CodeFormatError, IntervalError
from .markov import (
    Alphabet,
    MarkovModel,
    SymbolSeq,
    TransitionCounts,
    check_table_size,
    context_indices,
    count_transitions,
    mle_estimate,
)

logger = logging.getLogger("riccode.arithcode")

MAGIC = b"RIC1"
_HEADER = struct.Struct(">4sIIII")
_U32_MAX = 2**32 - 1


# ----------------------------------------------------------------------
# Domain types
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ExactInterval:
    """[a, b) with rational endpoints, 0 <= a < b <= 1."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        a, b = Fraction(self.a), Fraction(self.b)
        if not 0 <= a < b <= 1:
            raise IntervalError(f"invalid interval [{a}, {b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def width(self) -> Fraction:
        return self.b - self.a

    def __contains__(self, value) -> bool:
        return self.a <= value < self.b

    def __str__(self) -> str:
        return f"[{self.a}, {self.b})"


@dataclass(frozen=True)
class BitCode:
    bits: Tuple[int, ...] = ()

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "BitCode":
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitCode":
        if length == 0:
            return cls()
        return cls.from_string(format(value, f"0{length}b"))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def value(self) -> Fraction:
        """The dyadic rational 0.b_1 b_2 ... b_L."""
        if not self.bits:
            return Fraction(0)
        return Fraction(int(str(self), 2), 2 ** len(self.bits))


@dataclass(frozen=True)
class CodedMessage:
    m: int
    k: int
    n: int
    payload: BitCode

    def __post_init__(self):
        if self.m < 2:
            raise CodeFormatError(f"alphabet size must be >= 2, got {self.m}")
        if self.k < 0 or self.n < 0:
            raise CodeFormatError(f"negative header field: k={self.k}, n={self.n}")


# ----------------------------------------------------------------------
# Interval splitting
# ----------------------------------------------------------------------
class _ScaledInterval:
    """[low, low + width) / denom with integer fields."""

    __slots__ = ("low", "width", "denom")

    def __init__(self):
        self.low, self.width, self.denom = 0, 1, 1

    def narrow(self, cum_lo: int, freq: int, total: int) -> None:
        self.low = self.low * total + self.width * cum_lo
        self.width *= freq
        self.denom *= total

    def exact(self) -> ExactInterval:
        return ExactInterval(
            Fraction(self.low, self.denom), Fraction(self.low + self.width, self.denom)
        )


class _AdaptiveSplitter:
    """Frequencies n(i|j) + 1 over the coded prefix; uniform for the first k steps."""

    def __init__(self, m: int, k: int):
        check_table_size(m, k)
        self.m, self.k = m, k
        self.n_states = m**k
        self.counts = [[0] * m for _ in range(self.n_states)]
        self.state = 0
        self.t = 0

    def frequencies(self) -> List[int]:
        if self.t < self.k:
            return [1] * self.m
        return [c + 1 for c in self.counts[self.state]]

    def update(self, symbol: int) -> None:
        if self.t >= self.k:
            self.counts[self.state][symbol] += 1
        if self.k:
            self.state = (self.state * self.m + symbol) % self.n_states
        self.t += 1


class _FixedSplitter(_AdaptiveSplitter):
    """Frequencies n(i|j) of a whole-sequence count table (the ML parameter)."""

    def __init__(self, counts: TransitionCounts):
        super().__init__(counts.alphabet.m, counts.order)
        self.table = counts.table.tolist()

    def frequencies(self) -> List[int]:
        if self.t < self.k:
            return [1] * self.m
        row = self.table[self.state]
        return row if sum(row) > 0 else [1] * self.m

    def update(self, symbol: int) -> None:
        if self.k:
            self.state = (self.state * self.m + symbol) % self.n_states
        self.t += 1


def _cumulative(freqs: Sequence[int]) -> List[int]:
    cums = [0]
    for f in freqs:
        cums.append(cums[-1] + f)
    return cums


def _run_encoder(
    seq: SymbolSeq, splitter: _AdaptiveSplitter, with_trace: bool
) -> Tuple[_ScaledInterval, List[ExactInterval]]:
    interval = _ScaledInterval()
    trace = [interval.exact()] if with_trace else []
    for t, s in enumerate(seq.symbols):
        cums = _cumulative(splitter.frequencies())
        freq = cums[s + 1] - cums[s]
        if freq == 0:
            raise IntervalError(f"symbol {s} at position {t} has zero probability")
        interval.narrow(cums[s], freq, cums[-1])
        splitter.update(s)
        if with_trace:
            trace.append(interval.exact())
    return interval, trace


def _run_decoder(msg: CodedMessage, splitter: _AdaptiveSplitter) -> SymbolSeq:
    length = len(msg.payload)
    point = int(str(msg.payload), 2) if length else 0
    scale = 1 << length
    interval = _ScaledInterval()
    out = []
    for t in range(msg.n):
        cums = _cumulative(splitter.frequencies())
        total = cums[-1]
        offset = point * interval.denom - interval.low * scale
        if offset < 0 or offset >= interval.width * scale:
            raise CodeFormatError(f"code point left the coding interval at step {t}")
        pos = (offset * total) // (interval.width * scale)
        s = bisect.bisect_right(cums, pos) - 1
        interval.narrow(cums[s], cums[s + 1] - cums[s], total)
        splitter.update(s)
        out.append(s)
    return SymbolSeq(Alphabet(msg.m), tuple(out))


# ----------------------------------------------------------------------
# Dyadic code extraction
# ----------------------------------------------------------------------
def _ceil_neg_log2(width: Fraction) -> int:
    """Smallest L >= 0 with 2^-L <= width."""
    p, q = width.numerator, width.denominator
    length = max(0, q.bit_length() - p.bit_length() - 1)
    while (p << length) < q:
        length += 1
    return length


def dyadic_code(interval: ExactInterval) -> BitCode:
    """Binary expansion of the larger of two consecutive length-L dyadics in [a, b), L = ceil(-log2(b - a))."""
    a, b = interval.a, interval.b
    if not a < b:
        raise IntervalError(f"empty interval {interval}")
    length = _ceil_neg_log2(b - a)
    while True:
        scale = 1 << length
        c = -((-a.numerator * scale) // a.denominator)  # ceil(a * 2^L)
        if Fraction(c + 1, scale) < b:
            return BitCode.from_int(c + 1, length)
        if Fraction(c, scale) < b:
            return BitCode.from_int(c, length)
        length += 1


# ----------------------------------------------------------------------
# Coders
# ----------------------------------------------------------------------
def encode_adaptive(
    seq: SymbolSeq, k: int, with_trace: bool = True
) -> Tuple[CodedMessage, List[ExactInterval]]:
    """Adaptive predictive arithmetic code of seq at order k.

    Returns the coded message and the n + 1 successive coding intervals
    (empty list when ``with_trace`` is False).
    """
    check_table_size(seq.m, k)
    interval, trace = _run_encoder(seq, _AdaptiveSplitter(seq.m, k), with_trace)
    payload = dyadic_code(interval.exact())
    logger.debug("adaptive code: n=%d k=%d -> %d bits", seq.n, k, len(payload))
    return CodedMessage(seq.m, k, seq.n, payload), trace


def decode_adaptive(msg: CodedMessage) -> SymbolSeq:
    return _run_decoder(msg, _AdaptiveSplitter(msg.m, msg.k))


def encode_simple(seq: SymbolSeq, k: int) -> Tuple[CodedMessage, MarkovModel]:
    """Two-pass arithmetic code with the fixed ML parameter of order k.

    The parameter is returned as side information; its description length is
    not part of the payload.
    """
    check_table_size(seq.m, k)
    if seq.n < k:
        raise ValueError(f"sequence of length {seq.n} is shorter than the order {k}")
    counts = count_transitions(seq, k)
    interval, _ = _run_encoder(seq, _FixedSplitter(counts), with_trace=False)
    payload = dyadic_code(interval.exact())
    return CodedMessage(seq.m, k, seq.n, payload), mle_estimate(seq, k)


def decode_simple(msg: CodedMessage, counts: TransitionCounts) -> SymbolSeq:
    """Invert encode_simple given the exact count table the parameter came from."""
    if counts.alphabet.m != msg.m or counts.order != msg.k:
        raise CodeFormatError(
            f"count table (m={counts.alphabet.m}, k={counts.order}) does not match "
            f"header (m={msg.m}, k={msg.k})"
        )
    return _run_decoder(msg, _FixedSplitter(counts))


# ----------------------------------------------------------------------
# Code lengths
# ----------------------------------------------------------------------
def final_interval(seq: SymbolSeq, k: int) -> ExactInterval:
    check_table_size(seq.m, k)
    interval, _ = _run_encoder(seq, _AdaptiveSplitter(seq.m, k), with_trace=False)
    return interval.exact()


def code_length_exact(seq: SymbolSeq, k: int) -> float:
    """-log2 of the exact width of the final adaptive interval."""
    width = final_interval(seq, k).width
    return math.log2(width.denominator) - math.log2(width.numerator)


def adaptive_code_length_fast(seq: SymbolSeq, k: int) -> float:
    """Floating-point length of the adaptive code, C_k(x^n), in bits."""
    check_table_size(seq.m, k)
    x, m = seq.array, seq.m
    n = len(x)
    bits = min(n, k) * math.log2(m)
    if n <= k:
        return bits
    frame = pd.DataFrame({"ctx": context_indices(x, k, m), "sym": x[k:]})
    seen_pair = frame.groupby(["ctx", "sym"], sort=False).cumcount().to_numpy()
    seen_ctx = frame.groupby("ctx", sort=False).cumcount().to_numpy()
    bits += float(np.sum(np.log2(seen_ctx + m) - np.log2(seen_pair + 1)))
    return bits


def kraft_sum(lengths: Iterable[int]) -> Fraction:
    """Exact sum of 2^-L over the given code lengths."""
    return sum((Fraction(1, 1 << L) for L in lengths), Fraction(0))


# ----------------------------------------------------------------------
# Code file format
# ----------------------------------------------------------------------
def pack_code_file(msg: CodedMessage) -> bytes:
    for name, value in (("m", msg.m), ("k", msg.k), ("n", msg.n), ("bit count", len(msg.payload))):
        if value > _U32_MAX:
            raise CodeFormatError(f"{name}={value} does not fit in 32 bits")
    header = _HEADER.pack(MAGIC, msg.m, msg.k, msg.n, len(msg.payload))
    body = np.packbits(np.asarray(msg.payload.bits, dtype=np.uint8)).tobytes()
    return header + body


def unpack_code_file(data: bytes, source: str = "<code>") -> CodedMessage:
    if len(data) < _HEADER.size:
        raise CodeFormatError(f"{source}: truncated header ({len(data)} bytes)")
    magic, m, k, n, n_bits = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CodeFormatError(f"{source}: bad magic {magic!r}, expected {MAGIC!r}")
    try:
        check_table_size(m, k)
    except ValueError as e:
        raise CodeFormatError(f"{source}: {e}") from e
    body = data[_HEADER.size :]
    expected = (n_bits + 7) // 8
    if len(body) != expected:
        raise CodeFormatError(
            f"{source}: payload has {len(body)} bytes, header declares {n_bits} bits ({expected} bytes)"
        )
    bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8))
    if np.any(bits[n_bits:]):
        raise CodeFormatError(f"{source}: non-zero padding bits")
    return CodedMessage(m, k, n, BitCode(tuple(bits[:n_bits].tolist())))


def write_code_file(path: Union[str, Path], msg: CodedMessage) -> None:
    Path(path).write_bytes(pack_code_file(msg))


def read_code_file(path: Union[str, Path]) -> CodedMessage:
    p = Path(path)
    return unpack_code_file(p.read_bytes(), str(p))

