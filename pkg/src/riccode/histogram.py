#!/usr/bin/env python3
"""
histogram.py

MDL histograms. A sample is binned on a fine grid (the maximal partition, R
cells); a sub-partition keeps a subset of its cut points. The lossless
description length of the sample given a sub-partition with m intervals is

    Crit = -sum_j n_j log2(n_j / (n l_j)) + (m - 1)/2 log2 n  [- n log2 r]

and the best sub-partition is found by a shortest path over cut indices in
R(R+1)/2 edge evaluations.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import EnumerationLimitError, FormatError, SampleRangeError

logger = logging.getLogger("riccode.histogram")

BRUTE_FORCE_MAX_CELLS = 20
TIE_TOLERANCE = 1e-9


# ----------------------------------------------------------------------
# Domain types
# ----------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class CellGrid:
    """Cell boundaries t_0 < t_1 < ... < t_R."""

    boundaries: np.ndarray

    def __post_init__(self):
        t = np.array(self.boundaries, dtype=np.float64)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("a grid needs at least two boundaries")
        if not np.all(np.isfinite(t)) or np.any(np.diff(t) <= 0):
            raise ValueError("grid boundaries must be finite and strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "boundaries", t)

    @classmethod
    def regular(cls, lo: float, hi: float, step: float) -> "CellGrid":
        if not hi > lo or not step > 0:
            raise ValueError(f"need lo < hi and step > 0, got lo={lo}, hi={hi}, step={step}")
        R = int(round((hi - lo) / step))
        if R < 1 or abs(R * step - (hi - lo)) > 1e-9 * max(1.0, abs(hi - lo)):
            raise ValueError(f"step {step} does not divide [{lo}, {hi}]")
        t = lo + step * np.arange(R + 1)
        t[-1] = hi
        return cls(t)

    @property
    def R(self) -> int:
        return self.boundaries.size - 1

    @property
    def lo(self) -> float:
        return float(self.boundaries[0])

    @property
    def hi(self) -> float:
        return float(self.boundaries[-1])


@dataclass(frozen=True, eq=False)
class BinnedSample:
    grid: CellGrid
    counts: np.ndarray
    r: Optional[float] = None

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.shape != (self.grid.R,):
            raise ValueError(f"{counts.size} counts for a grid of {self.grid.R} cells")
        if np.any(counts < 0):
            raise ValueError("cell counts cannot be negative")
        if self.r is not None and not self.r > 0:
            raise ValueError(f"precision r must be > 0, got {self.r}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class SubPartition:
    """Kept cut indices of a grid, always including 0 and R."""

    cuts: Tuple[int, ...]
    grid: CellGrid

    def __post_init__(self):
        cuts = tuple(int(c) for c in self.cuts)
        R = self.grid.R
        if len(cuts) < 2 or cuts[0] != 0 or cuts[-1] != R:
            raise ValueError(f"cuts must start at 0 and end at {R}, got {cuts}")
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError(f"cuts must be strictly increasing, got {cuts}")
        object.__setattr__(self, "cuts", cuts)

    @classmethod
    def finest(cls, grid: CellGrid) -> "SubPartition":
        return cls(tuple(range(grid.R + 1)), grid)

    @classmethod
    def coarsest(cls, grid: CellGrid) -> "SubPartition":
        return cls((0, grid.R), grid)

    @property
    def m(self) -> int:
        return len(self.cuts) - 1

    @property
    def edges(self) -> np.ndarray:
        return self.grid.boundaries[list(self.cuts)]

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.edges)

    def merged_counts(self, binned: BinnedSample) -> np.ndarray:
        prefix = np.concatenate([[0], np.cumsum(binned.counts)])
        return np.diff(prefix[list(self.cuts)])

    def interval_of_cell(self) -> np.ndarray:
        """Index of the interval that holds each grid cell."""
        return np.repeat(np.arange(self.m), np.diff(self.cuts))


# ----------------------------------------------------------------------
# Binning and the criterion
# ----------------------------------------------------------------------
def bin_sample(data: Sequence[float], grid: CellGrid, r: Optional[float] = None) -> BinnedSample:
    """Count samples per cell [t_c, t_{c+1}); the last cell is closed on the right."""
    x = np.asarray(data, dtype=np.float64).ravel()
    outside = ~((x >= grid.lo) & (x <= grid.hi))
    if np.any(outside):
        i = int(np.flatnonzero(outside)[0])
        raise SampleRangeError(i, float(x[i]), grid.lo, grid.hi)
    cells = np.searchsorted(grid.boundaries, x, side="right") - 1
    cells = np.minimum(cells, grid.R - 1)
    return BinnedSample(grid, np.bincount(cells, minlength=grid.R), r)


def _entropy_terms(counts: np.ndarray, lengths: np.ndarray, n: int) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    safe = np.where(counts > 0, counts, 1.0)
    return np.where(counts > 0, -counts * np.log2(safe / (n * lengths)), 0.0)


def crit(binned: BinnedSample, part: SubPartition) -> float:
    """Description length in bits of the sample given the sub-partition."""
    n = binned.n
    if n < 1:
        raise ValueError("criterion needs at least one sample")
    if part.grid.R != binned.grid.R:
        raise ValueError(f"partition over {part.grid.R} cells, sample over {binned.grid.R}")
    value = float(_entropy_terms(part.merged_counts(binned), part.lengths, n).sum())
    value += (part.m - 1) / 2 * math.log2(n)
    if binned.r is not None:
        value -= n * math.log2(binned.r)
    return value


class EdgeCosts:
    """Cost of a merged interval spanning cells start..end-1, from prefix sums.

    cost(start, end) = -n_se log2(n_se / (n l_se)) + log2(n) / 2
    ``evaluations`` counts every edge cost computed.
    """

    def __init__(self, binned: BinnedSample):
        if binned.n < 1:
            raise ValueError("criterion needs at least one sample")
        self.n = binned.n
        self.half_log_n = 0.5 * math.log2(self.n)
        self.prefix = np.concatenate([[0], np.cumsum(binned.counts)]).astype(np.float64)
        self.t = binned.grid.boundaries
        self.evaluations = 0

    def ending_at(self, end: int) -> np.ndarray:
        """Costs of the edges start -> end for every start in 0..end-1."""
        self.evaluations += end
        counts = self.prefix[end] - self.prefix[:end]
        lengths = self.t[end] - self.t[:end]
        return _entropy_terms(counts, lengths, self.n) + self.half_log_n

    def edge(self, start: int, end: int) -> float:
        self.evaluations += 1
        counts = np.array([self.prefix[end] - self.prefix[start]])
        lengths = np.array([self.t[end] - self.t[start]])
        return float(_entropy_terms(counts, lengths, self.n)[0]) + self.half_log_n


def _finish(binned: BinnedSample, path_cost: float) -> float:
    value = path_cost - 0.5 * math.log2(binned.n)
    if binned.r is not None:
        value -= binned.n * math.log2(binned.r)
    return value


def dp_select(binned: BinnedSample, costs: Optional[EdgeCosts] = None) -> Tuple[SubPartition, float]:
    """Sub-partition minimizing crit, by shortest path over the cut indices 0..R.

    Ties (within 1e-9 bits) go to fewer intervals, then to the lexicographically
    smallest cut tuple.
    """
    costs = costs if costs is not None else EdgeCosts(binned)
    R = binned.grid.R
    best = np.full(R + 1, np.inf)
    best[0] = 0.0
    paths: list = [(0,)] + [None] * R
    for end in range(1, R + 1):
        totals = best[:end] + costs.ending_at(end)
        lowest = totals.min()
        tied = np.flatnonzero(totals <= lowest + TIE_TOLERANCE)
        start = int(tied[0]) if tied.size == 1 else min(
            (int(c) for c in tied), key=lambda c: (len(paths[c]), paths[c])
        )
        best[end] = totals[start]
        paths[end] = paths[start] + (end,)
    part = SubPartition(paths[R], binned.grid)
    value = _finish(binned, float(best[R]))
    logger.debug("dp_select: R=%d -> m=%d, crit=%.4f bits", R, part.m, value)
    return part, value


def iter_subpartitions(grid: CellGrid) -> Iterator[SubPartition]:
    """All 2^(R-1) sub-partitions of the grid."""
    inner = range(1, grid.R)
    for keep in itertools.product((False, True), repeat=grid.R - 1):
        yield SubPartition((0,) + tuple(c for c, k in zip(inner, keep) if k) + (grid.R,), grid)


def brute_force_select(binned: BinnedSample, limit: int = BRUTE_FORCE_MAX_CELLS) -> Tuple[SubPartition, float]:
    """Exhaustive minimizer of crit, with the tie-break of dp_select."""
    if binned.grid.R > limit:
        raise EnumerationLimitError(f"brute force limited to R <= {limit}, got R={binned.grid.R}")
    scored = [(crit(binned, p), p) for p in iter_subpartitions(binned.grid)]
    lowest = min(v for v, _ in scored)
    value, part = min(
        ((v, p) for v, p in scored if v <= lowest + TIE_TOLERANCE),
        key=lambda vp: (vp[1].m, vp[1].cuts),
    )
    return part, value


# ----------------------------------------------------------------------
# Sampling and summaries
# ----------------------------------------------------------------------
def sample_laplace(n: int, seed: int, interval: Tuple[float, float] = (-5.0, 5.0)) -> np.ndarray:
    """n draws of the density exp(-|x|)/2 restricted to [lo, hi], by inverse CDF and rejection."""
    lo, hi = interval
    if not lo < 0 < hi:
        raise ValueError(f"interval must contain 0 in its interior, got [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    out = np.empty(0)
    while out.size < n:
        u = rng.random(max(n - out.size, 64))
        with np.errstate(divide="ignore"):
            x = np.where(u < 0.5, np.log(2 * u), -np.log(2 * (1 - u)))
        out = np.concatenate([out, x[(x >= lo) & (x <= hi)]])
    return out[:n]


def laplace_density(x: np.ndarray) -> np.ndarray:
    return 0.5 * np.exp(-np.abs(x))


def partition_density(binned: BinnedSample, part: SubPartition) -> np.ndarray:
    """Height n_j / (n l_j) of the selected histogram on each interval."""
    return part.merged_counts(binned) / (binned.n * part.lengths)


def mean_bin_width(part: SubPartition, regions: Sequence[Tuple[float, float]]) -> float:
    """Mean width of the intervals whose midpoint lies in one of the regions."""
    edges = part.edges
    mids = 0.5 * (edges[:-1] + edges[1:])
    inside = np.zeros(mids.size, dtype=bool)
    for lo, hi in regions:
        inside |= (mids >= lo) & (mids <= hi)
    if not np.any(inside):
        return float("nan")
    return float(part.lengths[inside].mean())


# ----------------------------------------------------------------------
# Artifacts
# ----------------------------------------------------------------------
def partition_to_json(binned: BinnedSample, part: SubPartition, crit_bits: float) -> Dict[str, Any]:
    return {
        "boundaries": [float(t) for t in part.edges],
        "counts": [int(c) for c in part.merged_counts(binned)],
        "crit_bits": float(crit_bits),
        "m": part.m,
    }


def partition_from_json(obj: Dict[str, Any], grid: CellGrid, source: str = "<partition>") -> SubPartition:
    """Map stored boundaries back onto cut indices of the grid."""
    try:
        edges = np.asarray(obj["boundaries"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"missing or invalid 'boundaries': {e}", source) from e
    cuts = np.searchsorted(grid.boundaries, edges)
    cuts = np.minimum(cuts, grid.R)
    if not np.allclose(grid.boundaries[cuts], edges, rtol=0, atol=1e-9):
        raise FormatError("boundaries do not lie on the grid", source)
    try:
        return SubPartition(tuple(int(c) for c in cuts), grid)
    except ValueError as e:
        raise FormatError(str(e), source) from e


def binned_to_json(binned: BinnedSample) -> Dict[str, Any]:
    obj: Dict[str, Any] = {
        "boundaries": [float(t) for t in binned.grid.boundaries],
        "counts": [int(c) for c in binned.counts],
        "n": binned.n,
    }
    if binned.r is not None:
        obj["r"] = binned.r
    return obj


def binned_from_json(obj: Dict[str, Any], source: str = "<binned>") -> BinnedSample:
    try:
        return BinnedSample(CellGrid(obj["boundaries"]), obj["counts"], obj.get("r"))
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"invalid binned sample: {e}", source) from e


def write_json(path: Union[str, Path], obj: Dict[str, Any]) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    p = Path(path)
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e.msg}", str(p), e.lineno) from e


def read_sample(path: Union[str, Path]) -> np.ndarray:
    p = Path(path)
    try:
        return np.loadtxt(p, dtype=np.float64, ndmin=1)
    except ValueError as e:
        raise FormatError(f"not one real per line: {e}", str(p)) from e


def write_sample(path: Union[str, Path], data: Sequence[float]) -> None:
    np.savetxt(path, np.asarray(data, dtype=np.float64), fmt="%.17g")
