import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest

from src.riccode.arithcode import (
    BitCode,
    CodedMessage,
    ExactInterval,
    adaptive_code_length_fast,
    code_length_exact,
    decode_adaptive,
    decode_simple,
    dyadic_code,
    encode_adaptive,
    encode_simple,
    kraft_sum,
    pack_code_file,
    read_code_file,
    unpack_code_file,
    write_code_file,
)
from src.riccode.criteria import mv
from src.riccode.exceptions import CodeFormatError, IntervalError
from src.riccode.markov import (
    Alphabet,
    MarkovModel,
    SymbolSeq,
    count_transitions,
    context_index,
    labels_to_symbols,
    predictive_distribution,
    simulate,
)


def random_seq(rng, m_max=4, n_max=500, k_max=3):
    m = int(rng.integers(2, m_max + 1))
    n = int(rng.integers(0, n_max + 1))
    k = int(rng.integers(0, k_max + 1))
    return SymbolSeq.of(rng.integers(0, m, n), m), k


def test_abaa_order1_trace_and_code():
    msg, trace = encode_adaptive(labels_to_symbols("abaa"), 1)
    assert [(i.a, i.b) for i in trace] == [
        (F(0), F(1)),
        (F(0), F(1, 2)),
        (F(1, 4), F(1, 2)),
        (F(1, 4), F(3, 8)),
        (F(1, 4), F(7, 24)),
    ]
    assert str(msg.payload) == "01001"
    assert len(msg.payload) == 5 == math.ceil(-math.log2(1 / 24))
    assert (msg.m, msg.k, msg.n) == (2, 1, 4)


def test_empty_sequence_codes_to_nothing():
    msg, trace = encode_adaptive(SymbolSeq.of([], 2), 2)
    assert trace == [ExactInterval(F(0), F(1))]
    assert len(msg.payload) == 0


def test_order0_hand_simulation():
    msg, trace = encode_adaptive(labels_to_symbols("aa"), 0)
    assert [(i.a, i.b) for i in trace[1:]] == [(F(0), F(1, 2)), (F(0), F(1, 3))]
    assert str(msg.payload) == "01"


def test_dyadic_code_examples():
    assert str(dyadic_code(ExactInterval(F(1, 4), F(7, 24)))) == "01001"
    assert len(dyadic_code(ExactInterval(F(0), F(1)))) == 0
    assert str(dyadic_code(ExactInterval(F(1, 3), F(2, 3)))) == "10"


def test_dyadic_code_lies_in_interval(rng):
    for _ in range(500):
        a, b = sorted(F(int(x), 997) for x in rng.choice(998, size=2, replace=False))
        code = dyadic_code(ExactInterval(a, b))
        assert a <= code.value < b
        assert len(code) <= math.ceil(-math.log2(b - a)) + 1


def test_invalid_interval_rejected():
    with pytest.raises(IntervalError):
        ExactInterval(F(1, 2), F(1, 2))
    with pytest.raises(IntervalError):
        ExactInterval(F(-1, 2), F(1, 2))


def test_decode_abaa_order1():
    msg = CodedMessage(2, 1, 4, BitCode.from_string("01001"))
    assert decode_adaptive(msg).symbols == (0, 1, 0, 0)
    assert decode_adaptive(CodedMessage(2, 0, 0, BitCode())).n == 0


def test_roundtrip_random(rng):
    for _ in range(1000):
        seq, k = random_seq(rng)
        msg, _ = encode_adaptive(seq, k, with_trace=False)
        assert decode_adaptive(msg) == seq


def test_trace_nesting_and_widths(rng):
    for _ in range(20):
        seq, k = random_seq(rng, n_max=40)
        _, trace = encode_adaptive(seq, k)
        width = F(1)
        for t in range(seq.n):
            assert trace[t].a <= trace[t + 1].a and trace[t + 1].b <= trace[t].b
            if t < k:
                width *= F(1, seq.m)
            else:
                prefix = SymbolSeq.of(seq.symbols[:t], seq.m)
                context = seq.symbols[t - k : t]
                width *= predictive_distribution(count_transitions(prefix, k), context)[seq.symbols[t]]
            assert trace[t + 1].width == width


@pytest.mark.parametrize("k", [0, 1])
@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_kraft_inequality_exhaustive(n, k):
    lengths = []
    for symbols in itertools.product((0, 1), repeat=n):
        msg, trace = encode_adaptive(SymbolSeq.of(symbols, 2), k)
        assert F(1, 2 ** len(msg.payload)) <= trace[-1].width
        lengths.append(len(msg.payload))
    assert kraft_sum(lengths) <= 1


def test_encode_simple_examples():
    msg, model = encode_simple(labels_to_symbols("aab"), 0)
    assert mv(labels_to_symbols("aab"), 0) == pytest.approx(math.log2(27 / 4))
    assert len(msg.payload) == 3
    assert np.allclose(model.theta, [[2 / 3, 1 / 3]])
    msg, _ = encode_simple(labels_to_symbols("aaaa"), 0)
    assert len(msg.payload) == 0


def test_encode_simple_matches_ceiling_of_mv(rng):
    for _ in range(200):
        seq, k = random_seq(rng, n_max=300)
        if seq.n < k:
            continue
        msg, _ = encode_simple(seq, k)
        assert abs(len(msg.payload) - math.ceil(mv(seq, k))) <= 1


def test_decode_simple_roundtrip(rng):
    for _ in range(50):
        seq, k = random_seq(rng, n_max=200)
        if seq.n < k:
            continue
        msg, _ = encode_simple(seq, k)
        assert decode_simple(msg, count_transitions(seq, k)) == seq


def test_fast_length_examples():
    assert adaptive_code_length_fast(labels_to_symbols("abaa"), 1) == pytest.approx(math.log2(24))
    assert math.ceil(adaptive_code_length_fast(labels_to_symbols("abaa"), 1)) == 5
    assert adaptive_code_length_fast(SymbolSeq.of([], 3), 2) == 0.0


def test_fast_length_matches_exact_width(rng):
    for _ in range(200):
        seq, k = random_seq(rng, n_max=300)
        fast = adaptive_code_length_fast(seq, k)
        assert fast == pytest.approx(code_length_exact(seq, k), abs=1e-6)
        msg, _ = encode_adaptive(seq, k, with_trace=False)
        assert abs(math.ceil(fast) - len(msg.payload)) <= 1


def test_adaptive_coding_learns_order1_regularity():
    theta = np.array([[0.95, 0.05], [0.05, 0.95]])
    seq = simulate(MarkovModel(Alphabet(2), 1, theta), 2000, seed=5)
    assert adaptive_code_length_fast(seq, 1) < adaptive_code_length_fast(seq, 0)


def test_code_file_layout():
    msg, _ = encode_adaptive(labels_to_symbols("abaa"), 1)
    data = pack_code_file(msg)
    assert data == b"RIC1" + bytes.fromhex("00000002" "00000001" "00000004" "00000005") + bytes([0b01001000])
    assert unpack_code_file(data) == msg


def test_code_file_on_disk(tmp_path, rng):
    seq, k = random_seq(rng, n_max=200)
    msg, _ = encode_adaptive(seq, k, with_trace=False)
    write_code_file(tmp_path / "x.ric", msg)
    assert decode_adaptive(read_code_file(tmp_path / "x.ric")) == seq


def test_code_file_errors():
    msg, _ = encode_adaptive(labels_to_symbols("abaa"), 1)
    data = pack_code_file(msg)
    with pytest.raises(CodeFormatError):
        unpack_code_file(b"RIC2" + data[4:])
    with pytest.raises(CodeFormatError):
        unpack_code_file(data[:10])
    with pytest.raises(CodeFormatError):
        unpack_code_file(data + b"\x00")
    with pytest.raises(CodeFormatError):
        unpack_code_file(data[:-1] + bytes([0b01001001]))


def test_context_index_is_lexicographic():
    assert context_index((0, 0), 2) == 0
    assert context_index((1, 0), 2) == 2
    assert context_index((1, 1), 2) == 3


def test_code_file_rejects_oversized_order():
    header = b"RIC1" + (2).to_bytes(4, "big") + (40).to_bytes(4, "big") + (1).to_bytes(4, "big") + bytes(4)
    with pytest.raises(CodeFormatError, match="table cells"):
        unpack_code_file(header)


def test_coders_reject_oversized_order():
    seq = labels_to_symbols("abab")
    with pytest.raises(ValueError):
        encode_adaptive(seq, 30)
    with pytest.raises(ValueError):
        adaptive_code_length_fast(seq, 30)
    with pytest.raises(ValueError):
        count_transitions(seq, 30)
