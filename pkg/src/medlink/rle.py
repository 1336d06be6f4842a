"""Run-length coding of integer symbol streams.

Zero runs collapse into (run_length, 0) pairs; nonzero symbols pass
through one by one as (1, value). Decoding expands any (run, value) pair
back to ``run`` copies of ``value`` and rejects non-positive run lengths.
"""

from __future__ import annotations

import numpy as np

__all__ = ["rle_encode", "rle_decode"]


def _runs(a: np.ndarray):
    """(value, length) runs of equal consecutive elements."""
    if a.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    boundaries = np.nonzero(a[1:] != a[:-1])[0] + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [a.size]])
    return a[starts], ends - starts


def rle_encode(symbols) -> list[tuple[int, int]]:
    """Encode a sequence of ints as (run, value) pairs."""
    a = np.asarray(symbols, dtype=np.int64).ravel()
    values, lengths = _runs(a)
    out: list[tuple[int, int]] = []
    for value, length in zip(values.tolist(), lengths.tolist()):
        if value == 0:
            out.append((length, 0))
        else:
            out.extend([(1, value)] * length)
    return out


def rle_decode(pairs) -> list[int]:
    """Expand (run, value) pairs back into a flat symbol list."""
    out: list[int] = []
    for run, value in pairs:
        if run < 1:
            raise ValueError(f"run length must be >= 1, got {run}")
        out.extend([value] * run)
    return out
