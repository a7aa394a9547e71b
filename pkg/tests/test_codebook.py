from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fakemark.codebook import (
    WatermarkSequence,
    assign,
    hamming,
    iter_sparse_order,
    popcount,
    sparse_order,
    watermark_length,
)
from fakemark.errors import CapacityError, DomainError, ValidationError


def bits(text):
    return WatermarkSequence.from_str(text)


@pytest.mark.parametrize("n_u, L", [(2, 1), (3, 2), (4, 2), (5, 3), (50, 6), (64, 6), (65, 7), (1000, 10)])
def test_watermark_length(n_u, L):
    assert watermark_length(n_u) == L


@pytest.mark.parametrize("n_u", [1, 0, -3])
def test_watermark_length_rejects_tiny_user_counts(n_u):
    with pytest.raises(DomainError):
        watermark_length(n_u)


def test_sparse_order_examples():
    assert [str(w) for w in sparse_order(1)] == ["0", "1"]
    assert [str(w) for w in sparse_order(2)] == ["00", "01", "10", "11"]
    assert [str(w) for w in sparse_order(3)] == ["000", "001", "010", "100", "011", "101", "110", "111"]


@pytest.mark.parametrize("L", range(1, 11))
def test_sparse_order_matches_sort_oracle(L):
    # oracle: brute-force sort of every bitstring by (ones, numeric value)
    every = ["".join(t) for t in product("01", repeat=L)]
    expected = sorted(every, key=lambda s: (s.count("1"), int(s, 2)))
    got = [str(w) for w in sparse_order(L)]
    assert got == expected
    assert len(set(got)) == 2**L


@pytest.mark.parametrize("L", range(1, 9))
def test_popcount_is_non_decreasing(L):
    counts = [popcount(w) for w in sparse_order(L)]
    assert counts == sorted(counts)


def test_assign_three_users():
    cb = assign(["a", "b", "c"], 2)
    assert [(u, str(w)) for u, w in cb.entries] == [("a", "00"), ("b", "01"), ("c", "10")]


def test_assign_single_user_gets_zero():
    cb = assign(["solo"], 1)
    assert str(cb.watermark_of("solo")) == "0"


def test_fifty_users_reach_popcount_four():
    cb = assign([f"u{i}" for i in range(50)], 6)
    counts = [w.popcount() for w in cb.watermarks]
    assert max(counts) == 4
    assert counts.count(4) == 8
    assert sum(c <= 3 for c in counts) == 42


def test_assign_errors():
    with pytest.raises(CapacityError):
        assign(["a", "b", "c", "d", "e"], 2)
    with pytest.raises(DomainError):
        assign(["a", "a"], 2)


def test_popcount_examples():
    assert popcount(bits("00")) == 0
    assert popcount(bits("1010")) == 2
    assert popcount(bits("111111")) == 6


def test_bit_zero_is_leftmost():
    w = bits("10")
    assert w[0] == 1 and w[1] == 0
    assert w.as_int() == 2
    assert WatermarkSequence.from_int(2, 2) == w


@given(st.integers(1, 9), st.data())
def test_mean_popcount_below_half_unless_full(L, data):
    n_u = data.draw(st.integers(1, 2**L))
    cb = assign([str(i) for i in range(n_u)], L)
    mean = sum(w.popcount() for w in cb.watermarks) / n_u
    if n_u < 2**L:
        assert mean < L / 2
    else:
        assert mean == L / 2


def test_codebook_rejects_duplicate_watermarks():
    from fakemark.codebook import Codebook

    with pytest.raises(ValidationError):
        Codebook((("a", bits("01")), ("b", bits("01"))))


def test_iter_sparse_order_is_lazy_for_long_watermarks():
    it = iter_sparse_order(40)
    first = [str(next(it)) for _ in range(3)]
    assert first == ["0" * 40, "0" * 39 + "1", "0" * 38 + "10"]


def test_hamming():
    assert hamming(bits("1010"), bits("1110")) == 1
    with pytest.raises(DomainError):
        hamming(bits("10"), bits("100"))
