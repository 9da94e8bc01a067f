import math
import time

import numpy as np
import pytest

from src.riccode.criteria import ric
from src.riccode.exceptions import EnumerationLimitError, FormatError, SampleRangeError
from src.riccode.histogram import (
    BinnedSample,
    CellGrid,
    EdgeCosts,
    SubPartition,
    bin_sample,
    binned_from_json,
    binned_to_json,
    brute_force_select,
    crit,
    dp_select,
    iter_subpartitions,
    mean_bin_width,
    partition_density,
    partition_from_json,
    partition_to_json,
    read_sample,
    sample_laplace,
    write_sample,
)
from src.riccode.markov import SymbolSeq


def _random_binned(rng, R, r=None):
    widths = rng.uniform(0.1, 2.0, R)
    grid = CellGrid(np.concatenate([[0.0], np.cumsum(widths)]))
    counts = rng.integers(0, 8, R)
    counts[rng.integers(0, R)] += 1
    return BinnedSample(grid, counts, r)


def test_bin_sample_examples():
    grid = CellGrid([0.0, 0.5, 1.0])
    assert list(bin_sample([0.1, 0.6, 0.7], grid).counts) == [1, 2]
    assert list(bin_sample([0.5], grid).counts) == [0, 1]
    assert list(bin_sample([1.0], grid).counts) == [0, 1]
    assert list(bin_sample([0.0], grid).counts) == [1, 0]


def test_bin_sample_reports_index_out_of_range():
    with pytest.raises(SampleRangeError) as exc:
        bin_sample([0.2, 0.3, 1.5], CellGrid([0.0, 0.5, 1.0]))
    assert exc.value.index == 2


def test_regular_grid():
    grid = CellGrid.regular(-5, 5, 0.02)
    assert grid.R == 500
    assert grid.lo == -5 and grid.hi == 5
    with pytest.raises(ValueError):
        CellGrid.regular(0, 1, 0.3)
    with pytest.raises(ValueError):
        CellGrid([0.0, 0.0, 1.0])


def test_subpartition_validation():
    grid = CellGrid([0, 1, 2, 3])
    with pytest.raises(ValueError):
        SubPartition((0, 2), grid)
    with pytest.raises(ValueError):
        SubPartition((0, 2, 2, 3), grid)
    part = SubPartition((0, 2, 3), grid)
    assert part.m == 2
    assert part.lengths.sum() == pytest.approx(grid.hi - grid.lo)
    assert list(part.interval_of_cell()) == [0, 0, 1]


def test_crit_examples():
    grid = CellGrid([0.0, 0.5, 1.0])
    binned = BinnedSample(grid, [3, 1])
    assert crit(binned, SubPartition.finest(grid)) == pytest.approx(0.2451, abs=1e-4)
    assert crit(binned, SubPartition.coarsest(grid)) == pytest.approx(0.0)


def test_crit_empty_bin_contributes_nothing():
    binned = BinnedSample(CellGrid([0.0, 0.5, 1.0]), [0, 4])
    assert crit(binned, SubPartition.finest(binned.grid)) == pytest.approx(-3.0)


def test_crit_matches_ric_of_interval_labels(rng):
    for r in (1.0, 0.25) * 10:
        binned = _random_binned(rng, int(rng.integers(2, 9)), r=r)
        for part in list(iter_subpartitions(binned.grid))[:10]:
            n_j = part.merged_counts(binned)
            expected = float(np.sum(n_j * np.log2(part.lengths))) - binned.n * math.log2(r)
            if part.m >= 2:
                y = SymbolSeq.of(np.repeat(np.arange(part.m), n_j), part.m)
                expected += ric(y, 0)
            assert crit(binned, part) == pytest.approx(expected, abs=1e-9)


def test_dp_single_cell():
    binned = BinnedSample(CellGrid([0.0, 1.0]), [7])
    part, value = dp_select(binned)
    assert part.cuts == (0, 1)
    assert value == pytest.approx(0.0)


def test_dp_matches_brute_force(rng):
    for _ in range(100):
        binned = _random_binned(rng, int(rng.integers(1, 13)))
        dp_part, dp_value = dp_select(binned)
        bf_part, bf_value = brute_force_select(binned)
        assert dp_value == pytest.approx(bf_value, abs=1e-9)
        assert dp_part.cuts == bf_part.cuts


def test_dp_value_equals_crit_of_selection(rng):
    for _ in range(20):
        binned = _random_binned(rng, int(rng.integers(1, 30)))
        part, value = dp_select(binned)
        assert crit(binned, part) == pytest.approx(value, abs=1e-9)


def test_crit_decomposes_into_edge_costs(rng):
    binned = _random_binned(rng, 15)
    costs = EdgeCosts(binned)
    for part in list(iter_subpartitions(binned.grid))[::97]:
        path = sum(costs.edge(a, b) for a, b in zip(part.cuts, part.cuts[1:]))
        assert crit(binned, part) == pytest.approx(path - 0.5 * math.log2(binned.n), abs=1e-9)


def test_dp_precision_shifts_value_only(rng):
    for _ in range(10):
        binned = _random_binned(rng, 10)
        with_r = BinnedSample(binned.grid, binned.counts, 2.0**-32)
        part, value = dp_select(binned)
        part_r, value_r = dp_select(with_r)
        assert part_r.cuts == part.cuts
        assert value_r - value == pytest.approx(32 * binned.n, abs=1e-6)


def test_dp_ties_go_to_fewer_intervals():
    binned = BinnedSample(CellGrid([0, 1, 2, 3, 4]), [5, 5, 5, 5])
    part, _ = dp_select(binned)
    assert part.cuts == (0, 4)


def test_dp_edge_evaluations_and_speed():
    rng = np.random.default_rng(7)
    R = 500
    binned = BinnedSample(CellGrid(np.arange(R + 1, dtype=float)), rng.integers(0, 50, R))
    costs = EdgeCosts(binned)
    start = time.perf_counter()
    dp_select(binned, costs)
    assert time.perf_counter() - start < 5.0
    assert costs.evaluations <= R * (R + 1) // 2


def test_brute_force_guard():
    small = BinnedSample(CellGrid(np.arange(13, dtype=float)), np.ones(12, dtype=int))
    brute_force_select(small)
    large = BinnedSample(CellGrid(np.arange(22, dtype=float)), np.ones(21, dtype=int))
    with pytest.raises(EnumerationLimitError):
        brute_force_select(large)


def test_brute_force_enumerates_two_candidates_for_two_cells():
    grid = CellGrid([0.0, 1.0, 2.0])
    assert len(list(iter_subpartitions(grid))) == 2
    part, _ = brute_force_select(BinnedSample(grid, [5, 5]))
    assert part.cuts == (0, 2)


def test_sample_laplace_range_and_determinism():
    a = sample_laplace(5000, 3, (-2.0, 3.0))
    assert a.shape == (5000,)
    assert a.min() >= -2.0 and a.max() <= 3.0
    assert np.array_equal(a, sample_laplace(5000, 3, (-2.0, 3.0)))
    with pytest.raises(ValueError):
        sample_laplace(10, 0, (0.5, 2.0))


def test_sample_laplace_moments():
    x = sample_laplace(100_000, 11, (-5.0, 5.0))
    # variance of exp(-|x|)/2 truncated to [-5, 5]
    truncated = (2 - 37 * math.exp(-5)) / (1 - math.exp(-5))
    assert abs(x.mean()) <= 0.02
    assert x.var() == pytest.approx(truncated, abs=0.1)


def test_laplace_selection_is_finer_near_zero():
    grid = CellGrid.regular(-5, 5, 0.02)
    part, _ = dp_select(bin_sample(sample_laplace(10_000, 1, (-5.0, 5.0)), grid))
    assert 4 <= part.m <= 80
    assert mean_bin_width(part, ((-1.0, 1.0),)) < mean_bin_width(part, ((-5.0, -2.0), (2.0, 5.0)))


def test_partition_density_integrates_to_one(rng):
    binned = _random_binned(rng, 9)
    part, _ = dp_select(binned)
    assert float(np.sum(partition_density(binned, part) * part.lengths)) == pytest.approx(1.0)


def test_partition_json(rng):
    grid = CellGrid.regular(0, 1, 0.125)
    binned = BinnedSample(grid, rng.integers(0, 10, 8) + 1)
    part, value = dp_select(binned)
    obj = partition_to_json(binned, part, value)
    assert set(obj) == {"boundaries", "counts", "crit_bits", "m"}
    assert sum(obj["counts"]) == binned.n
    assert partition_from_json(obj, grid).cuts == part.cuts
    with pytest.raises(FormatError):
        partition_from_json({"boundaries": [0.0, 0.3, 1.0]}, grid)
    with pytest.raises(FormatError):
        partition_from_json({}, grid)


def test_sample_file(tmp_path):
    data = sample_laplace(50, 2)
    path = tmp_path / "s.txt"
    write_sample(path, data)
    assert np.array_equal(read_sample(path), data)
    (tmp_path / "bad.txt").write_text("0.5\nabc\n")
    with pytest.raises(FormatError):
        read_sample(tmp_path / "bad.txt")


def test_binned_json(rng):
    binned = _random_binned(rng, 6, r=0.5)
    back = binned_from_json(binned_to_json(binned))
    assert np.array_equal(back.counts, binned.counts)
    assert np.allclose(back.grid.boundaries, binned.grid.boundaries)
    assert back.r == 0.5
    with pytest.raises(FormatError):
        binned_from_json({"boundaries": [0.0, 1.0], "counts": [1, 2]})
