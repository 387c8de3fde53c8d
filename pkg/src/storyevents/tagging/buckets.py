"""Signed distance bucketing for the sentence-level CNN.

Seventeen buckets: a zero-distance bucket (index 0), eight positive buckets
(+1..+5 singletons, +[6-10], +[11-20], +>20 at indices 1..8), and their
negative twins at indices 9..16. The mapping is total over the integers.
"""
from __future__ import annotations

N_BUCKETS = 17

_POSITIVE_OFFSET = 0
_NEGATIVE_OFFSET = 8


def bucket_index(distance: int) -> int:
    if distance == 0:
        return 0
    magnitude = abs(distance)
    if magnitude <= 5:
        slot = magnitude
    elif magnitude <= 10:
        slot = 6
    elif magnitude <= 20:
        slot = 7
    else:
        slot = 8
    return slot if distance > 0 else slot + _NEGATIVE_OFFSET


def negative_twin(index: int) -> int:
    """The bucket holding -d for any d in the given (non-zero) bucket."""
    if index == 0:
        return 0
    return index + _NEGATIVE_OFFSET if index <= 8 else index - _NEGATIVE_OFFSET
