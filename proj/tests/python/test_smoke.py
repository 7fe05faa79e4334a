import pytest

from qfilters import (
    BloomFilter,
    ConcurrentQF,
    ExpandableQF,
    FilterFullError,
    LinearProbingQF,
    QuotientFilter,
)


def test_quotient_filter_basic():
    f = QuotientFilter(quotient_bits=10, remainder_bits=8)
    keys = [b"key-%d" % i for i in range(500)]
    for k in keys:
        f.insert(k)
    assert len(f) == 500
    for k in keys:
        assert k in f
    misses = sum(b"other-%d" % i in f for i in range(2000))
    assert misses < 40  # ~500 * 2^-18 expected; generous slack


def test_quotient_filter_two_bit_and_ints():
    f = QuotientFilter(quotient_bits=9, remainder_bits=9, two_bit=True)
    for i in range(300):
        f.insert_int(i)
    assert all(f.contains_int(i) for i in range(300))


def test_quotient_filter_grow_and_serialize():
    f = QuotientFilter(quotient_bits=8, remainder_bits=10)
    for i in range(150):
        f.insert_int(i)
    g = f.grow()
    assert g.quotient_bits == 9
    assert g.remainder_bits == 9
    assert all(g.contains_int(i) for i in range(150))
    h = QuotientFilter.loads(f.dumps())
    assert len(h) == len(f)
    assert all(h.contains_int(i) for i in range(150))


def test_quotient_filter_full():
    f = QuotientFilter(quotient_bits=4, remainder_bits=8)
    with pytest.raises(FilterFullError):
        for i in range(17):
            f.insert_int(i)


def test_linear_probing():
    f = LinearProbingQF(quotient_bits=10, remainder_bits=10)
    for i in range(700):
        f.insert_int(i)
    assert all(f.contains_int(i) for i in range(700))
    assert 0.0 < LinearProbingQF.expected_fpr(0.5, 10) < 1.0
    g = LinearProbingQF.loads(f.dumps())
    assert len(g) == 700


def test_concurrent_grows():
    f = ConcurrentQF(quotient_bits=8, remainder_bits=12)
    n = 2000  # far past the initial 256 slots
    for i in range(n):
        f.insert_int(i)
    assert len(f) == n
    assert f.quotient_bits > 8
    assert all(f.contains_int(i) for i in range(n))


def test_expandable_levels_and_bound():
    f = ExpandableQF(capacity=500, target_fpr=1 / 1024)
    n = 20000
    for i in range(n):
        f.insert_int(i)
    assert len(f) == n
    assert f.num_levels >= 3
    assert all(f.contains_int(i) for i in range(0, n, 97))
    sum_bound, limit = f.fpr_bound()
    assert sum_bound < limit < 1 / 1024


def test_expandable_query_or_insert():
    f = ExpandableQF(capacity=500)
    assert f.query_or_insert_int(7) is False
    assert f.query_or_insert_int(7) is True
    assert f.contains_int(7)


def test_bloom():
    f = BloomFilter(num_bits=1 << 16)
    for i in range(1000):
        f.insert_int(i)
    assert all(f.contains_int(i) for i in range(1000))
    assert f.expected_fpr(1000) < 0.01
    assert b"hello" not in f
    f.insert(b"hello")
    assert b"hello" in f
