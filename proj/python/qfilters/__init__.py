"""Quotient-filter approximate-membership structures.

Thin re-export of the compiled module: sequential 3-bit and 2-bit quotient
filters, a lock-free linear-probing variant, a concurrent growing filter, an
expandable multi-level filter, and a Bloom-filter baseline.
"""

from ._qfilters import (
    BloomFilter,
    ConcurrentQF,
    ExpandableQF,
    FilterFullError,
    LinearProbingQF,
    QuotientFilter,
)

__all__ = [
    "BloomFilter",
    "ConcurrentQF",
    "ExpandableQF",
    "FilterFullError",
    "LinearProbingQF",
    "QuotientFilter",
]
