#!/usr/bin/env python3
"""
markov.py

Multiple Markov chains (order-k chains over an m-symbol alphabet): sequences,
transition counting, simulation, maximum-likelihood estimation, likelihood,
entropy rate and cross entropy. Logarithms are base 2 throughout.

Text formats
------------
Sequence file::

    m k
    s_1 s_2 ... s_n

Model file::

    m k
    theta(0|j) ... theta(m-1|j)      one line per context j, lexicographic order
"""

from __future__ import annotations

import logging
import string
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import AlphabetError, ConvergenceError, FormatError

logger = logging.getLogger("riccode.markov")

ROW_TOLERANCE = 1e-12
STATIONARY_TOLERANCE = 1e-12
STATIONARY_MAX_ITER = 10**6
# m^k contexts times m symbols
MAX_TABLE_CELLS = 2**22
# largest order within MAX_TABLE_CELLS for a binary alphabet
MAX_ORDER = 21

Context = Tuple[int, ...]


# ----------------------------------------------------------------------
# Domain types
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Alphabet:
    """Symbols are the indices 0..m-1."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise AlphabetError(f"alphabet needs at least 2 symbols, got m={self.m!r}")

    def n_contexts(self, k: int) -> int:
        return self.m**k


@dataclass(frozen=True)
class SymbolSeq:
    alphabet: Alphabet
    symbols: Tuple[int, ...]

    def __post_init__(self):
        symbols = tuple(int(s) for s in self.symbols)
        for t, s in enumerate(symbols):
            if not 0 <= s < self.alphabet.m:
                raise AlphabetError(
                    f"symbol {s} at position {t} outside alphabet of size {self.alphabet.m}"
                )
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def of(cls, symbols: Iterable[int], m: int) -> "SymbolSeq":
        return cls(Alphabet(m), tuple(symbols))

    @property
    def m(self) -> int:
        return self.alphabet.m

    @property
    def n(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.symbols, dtype=np.int64)


def context_index(context: Sequence[int], m: int) -> int:
    """Lexicographic rank of a context, oldest symbol most significant."""
    idx = 0
    for s in context:
        if not 0 <= s < m:
            raise AlphabetError(f"context symbol {s} outside alphabet of size {m}")
        idx = idx * m + int(s)
    return idx


def index_to_context(idx: int, m: int, k: int) -> Context:
    out = []
    for _ in range(k):
        idx, s = divmod(idx, m)
        out.append(s)
    return tuple(reversed(out))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TransitionCounts:
    """n(i|j) for every context j (rows) and symbol i (columns)."""

    alphabet: Alphabet
    order: int
    table: np.ndarray

    def __post_init__(self):
        shape = (self.alphabet.n_contexts(self.order), self.alphabet.m)
        if self.table.shape != shape:
            raise ValueError(f"count table has shape {self.table.shape}, expected {shape}")
        object.__setattr__(self, "table", _readonly(self.table.astype(np.int64)))

    @property
    def totals(self) -> np.ndarray:
        """n(j): number of times context j is followed by a symbol."""
        return self.table.sum(axis=1)

    def count(self, symbol: int, context: Sequence[int]) -> int:
        return int(self.table[context_index(context, self.alphabet.m), symbol])

    def total(self, context: Sequence[int]) -> int:
        return int(self.table[context_index(context, self.alphabet.m)].sum())


@dataclass(frozen=True, eq=False)
class MarkovModel:
    """Transition law theta(i|j); row j is the distribution after context j."""

    alphabet: Alphabet
    order: int
    theta: np.ndarray

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"order must be >= 0, got {self.order}")
        theta = np.asarray(self.theta, dtype=np.float64)
        shape = (self.alphabet.n_contexts(self.order), self.alphabet.m)
        if theta.shape != shape:
            raise ValueError(f"theta has shape {theta.shape}, expected {shape}")
        if np.any(theta < 0):
            raise ValueError("transition probabilities cannot be negative")
        sums = theta.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOLERANCE)
        if bad.size:
            j = int(bad[0])
            raise ValueError(
                f"row {index_to_context(j, self.alphabet.m, self.order)} sums to {sums[j]!r}, not 1"
            )
        object.__setattr__(self, "theta", _readonly(theta))

    @property
    def m(self) -> int:
        return self.alphabet.m

    def row(self, context: Sequence[int]) -> np.ndarray:
        if len(context) != self.order:
            raise ValueError(f"context of length {len(context)} for order {self.order}")
        return self.theta[context_index(context, self.m)]


# ----------------------------------------------------------------------
# Counting and estimation
# ----------------------------------------------------------------------
def context_indices(x: np.ndarray, k: int, m: int) -> np.ndarray:
    """Context index of every position t >= k (0-based) of x."""
    n = len(x)
    idx = np.zeros(max(n - k, 0), dtype=np.int64)
    if n <= k:
        return idx
    for r in range(k):
        idx = idx * m + x[r : n - k + r]
    return idx


def check_table_size(m: int, k: int) -> None:
    """Reject orders whose m^k x m count table exceeds MAX_TABLE_CELLS."""
    if k < 0:
        raise ValueError(f"order must be >= 0, got {k}")
    if k > 63 or m ** (k + 1) > MAX_TABLE_CELLS:
        raise ValueError(f"order {k} over {m} symbols needs {m}^{k + 1} table cells, limit is {MAX_TABLE_CELLS}")


def count_transitions(seq: SymbolSeq, k: int) -> TransitionCounts:
    """Count n(i|j) over the positions that have a complete context."""
    check_table_size(seq.m, k)
    m = seq.m
    table = np.zeros((m**k, m), dtype=np.int64)
    x = seq.array
    if len(x) > k:
        np.add.at(table, (context_indices(x, k, m), x[k:]), 1)
    return TransitionCounts(seq.alphabet, k, table)


def predictive_distribution(counts: TransitionCounts, context: Sequence[int]) -> Tuple[Fraction, ...]:
    """Laplace add-one estimate (n(i|j) + 1) / (n(j) + m), in exact rationals."""
    if len(context) != counts.order:
        raise ValueError(f"context of length {len(context)} for order {counts.order}")
    m = counts.alphabet.m
    row = counts.table[context_index(context, m)]
    denom = int(row.sum()) + m
    return tuple(Fraction(int(c) + 1, denom) for c in row)


def mle_estimate(seq: SymbolSeq, k: int) -> MarkovModel:
    """Maximum-likelihood theta; contexts never followed by a symbol get a uniform row."""
    counts = count_transitions(seq, k)
    table = counts.table.astype(np.float64)
    totals = table.sum(axis=1, keepdims=True)
    theta = np.where(totals > 0, table / np.where(totals > 0, totals, 1.0), 1.0 / seq.m)
    return MarkovModel(seq.alphabet, k, theta)


def neg_log_likelihood(seq: SymbolSeq, model: MarkovModel) -> float:
    """-log2 P(x^n | theta), including the uniform 1/m^k factor of the first k symbols."""
    if seq.m != model.m:
        raise AlphabetError(f"sequence alphabet m={seq.m} differs from model m={model.m}")
    k = model.order
    if seq.n < k:
        raise ValueError(f"sequence of length {seq.n} is shorter than the order {k}")
    table = count_transitions(seq, k).table
    seen = table > 0
    if np.any(model.theta[seen] == 0.0):
        return float("inf")
    bits = -float(np.sum(table[seen] * np.log2(model.theta[seen])))
    return bits + k * float(np.log2(seq.m))


# ----------------------------------------------------------------------
# Simulation
# ----------------------------------------------------------------------
def simulate(model: MarkovModel, n: int, seed: int) -> SymbolSeq:
    """Draw a realisation of length n; the first k symbols are i.i.d. uniform."""
    if n < 0:
        raise ValueError(f"length must be >= 0, got {n}")
    m, k = model.m, model.order
    rng = np.random.default_rng(seed)
    head = min(k, n)
    out = np.empty(n, dtype=np.int64)
    out[:head] = rng.integers(0, m, size=head)
    if n <= k:
        return SymbolSeq(model.alphabet, tuple(out.tolist()))

    cum = np.cumsum(model.theta, axis=1)
    n_states = m**k
    state = context_index(out[:k].tolist(), m)
    draws = rng.random(n - k)
    for t, u in enumerate(draws, start=k):
        s = min(int(np.searchsorted(cum[state], u, side="right")), m - 1)
        out[t] = s
        if k:
            state = (state * m + s) % n_states
    return SymbolSeq(model.alphabet, tuple(out.tolist()))


# ----------------------------------------------------------------------
# Information quantities
# ----------------------------------------------------------------------
def _row_entropies(theta: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(theta > 0, -theta * np.log2(theta), 0.0)
    return terms.sum(axis=1)


def stationary_distribution(
    model: MarkovModel,
    tol: float = STATIONARY_TOLERANCE,
    max_iter: int = STATIONARY_MAX_ITER,
) -> np.ndarray:
    """Stationary law of the chain on composed states E^k, by power iteration from uniform."""
    m, k = model.m, model.order
    n_states = m**k
    if k == 0:
        return np.ones(1)
    next_state = (np.arange(n_states)[:, None] * m + np.arange(m)[None, :]) % n_states
    flat_next = next_state.ravel()
    pi = np.full(n_states, 1.0 / n_states)
    for it in range(1, max_iter + 1):
        new = np.bincount(flat_next, weights=(pi[:, None] * model.theta).ravel(), minlength=n_states)
        residual = float(np.abs(new - pi).sum())
        pi = new
        if residual < tol:
            logger.debug("power iteration converged after %d steps", it)
            return pi
    raise ConvergenceError(
        f"power iteration did not reach residual {tol} within {max_iter} iterations "
        "(reducible or periodic chain?)"
    )


def entropy_rate(model: MarkovModel, **kwargs) -> float:
    """H(theta) = sum_j pi(j) H(theta(.|j)) in bits per symbol."""
    pi = stationary_distribution(model, **kwargs)
    return float(pi @ _row_entropies(model.theta))


def cross_entropy(p: Sequence[float], q: Sequence[float]) -> float:
    """H(P, Q) = E_P[-log2 Q]; 0 log 0 = 0 and +inf when Q misses mass of P."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    support = p > 0
    if np.any(q[support] == 0.0):
        return float("inf")
    return float(-np.sum(p[support] * np.log2(q[support])))


def entropy(p: Sequence[float]) -> float:
    return cross_entropy(p, p)


# ----------------------------------------------------------------------
# Labels and text formats
# ----------------------------------------------------------------------
LABELS = string.ascii_lowercase


def labels_to_symbols(text: str, m: Optional[int] = None) -> SymbolSeq:
    """Map letters a, b, c... to 0, 1, 2...; m defaults to the smallest alphabet that fits (>= 2)."""
    symbols = []
    for pos, ch in enumerate(text.strip()):
        if ch not in LABELS:
            raise AlphabetError(f"label {ch!r} at position {pos} is not a lowercase letter")
        symbols.append(LABELS.index(ch))
    if m is None:
        m = max([2] + [s + 1 for s in symbols])
    return SymbolSeq.of(symbols, m)


def symbols_to_labels(seq: SymbolSeq) -> str:
    if seq.m > len(LABELS):
        raise AlphabetError(f"cannot label an alphabet of {seq.m} symbols with letters")
    return "".join(LABELS[s] for s in seq.symbols)


def format_sequence(seq: SymbolSeq, k: int = 0) -> str:
    return f"{seq.m} {k}\n" + " ".join(str(s) for s in seq.symbols) + "\n"


def _parse_header(line: str, source: str) -> Tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise FormatError("header must be 'm k'", source, 1)
    try:
        m, k = int(parts[0]), int(parts[1])
    except ValueError as e:
        raise FormatError(f"non-integer header: {line.strip()!r}", source, 1) from e
    if m < 2 or k < 0:
        raise FormatError(f"header out of range: m={m}, k={k}", source, 1)
    try:
        check_table_size(m, k)
    except ValueError as e:
        raise FormatError(str(e), source, 1) from e
    return m, k


def parse_sequence(text: str, source: str = "<sequence>") -> Tuple[SymbolSeq, int]:
    """Return (sequence, order) from the sequence text format."""
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty sequence file", source)
    m, k = _parse_header(lines[0], source)
    body = " ".join(lines[1:]).split()
    try:
        symbols = [int(tok) for tok in body]
    except ValueError as e:
        raise FormatError(f"non-integer symbol: {e}", source, 2) from e
    try:
        return SymbolSeq.of(symbols, m), k
    except AlphabetError as e:
        raise FormatError(str(e), source, 2) from e


def format_model(model: MarkovModel) -> str:
    rows = (" ".join(repr(float(p)) for p in row) for row in model.theta)
    return f"{model.m} {model.order}\n" + "\n".join(rows) + "\n"


def parse_model(text: str, source: str = "<model>") -> MarkovModel:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty model file", source)
    m, k = _parse_header(lines[0], source)
    rows = lines[1:]
    if len(rows) != m**k:
        raise FormatError(f"expected {m ** k} rows, found {len(rows)}", source)
    try:
        theta = np.array([[float(tok) for tok in row.split()] for row in rows])
    except ValueError as e:
        raise FormatError(f"non-numeric probability: {e}", source) from e
    try:
        return MarkovModel(Alphabet(m), k, theta)
    except ValueError as e:
        raise FormatError(str(e), source) from e


def read_sequence(path: Union[str, Path]) -> Tuple[SymbolSeq, int]:
    p = Path(path)
    return parse_sequence(p.read_text(), str(p))


def write_sequence(path: Union[str, Path], seq: SymbolSeq, k: int = 0) -> None:
    Path(path).write_text(format_sequence(seq, k))


def read_model(path: Union[str, Path]) -> MarkovModel:
    p = Path(path)
    return parse_model(p.read_text(), str(p))


def write_model(path: Union[str, Path], model: MarkovModel) -> None:
    Path(path).write_text(format_model(model))
