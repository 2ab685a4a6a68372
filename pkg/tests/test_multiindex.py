import pytest

from starq.multiindex import (binary_splits, format_index, indices_up_to, merge,
                              mi, multiplicities, parse_index, splits)


def test_mi_sorts_and_validates():
    assert mi(3, 1, 2) == (1, 2, 3)
    assert mi() == ()
    with pytest.raises(ValueError):
        mi(0)
    with pytest.raises(ValueError):
        mi(4)


def test_merge_is_sorted_union_with_repeats():
    assert merge((1, 2), (2, 3)) == (1, 2, 2, 3)
    assert merge((), (1,)) == (1,)


def test_multiplicities():
    assert multiplicities((1, 1, 3)) == (2, 0, 1)
    assert multiplicities(()) == (0, 0, 0)


def test_format_parse_roundtrip():
    for index in indices_up_to(3):
        assert parse_index(format_index(index)) == index


def test_binary_splits_counts_by_multinomial():
    # Leibniz: d_{112} over two factors splits with multiplicity products
    pieces = list(binary_splits((1, 1, 2)))
    assert sum(c for _, _, c in pieces) == 2 ** 3
    as_map = {(a, b): c for a, b, c in pieces}
    assert as_map[((1, 1), (2,))] == 1
    assert as_map[((1,), (1, 2))] == 2


def test_splits_three_ways_sum():
    pieces = list(splits((1, 2), 3))
    assert sum(c for _, c in pieces) == 3 ** 2
    assert (((), (1,), (2,)), 1) in pieces
