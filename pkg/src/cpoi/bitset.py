"""Python-int bitsets keyed by triple id (bit ``k`` set <=> id ``k`` present)."""

import numpy as np


def from_ids(ids) -> int:
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size == 0:
        return 0
    flags = np.zeros(int(ids.max()) + 1, dtype=bool)
    flags[ids] = True
    return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")


def to_ids(mask: int) -> np.ndarray:
    if mask == 0:
        return np.empty(0, dtype=np.int64)
    raw = mask.to_bytes((mask.bit_length() + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return np.flatnonzero(bits).astype(np.int64)


def is_subset(a: int, b: int) -> bool:
    return a & b == a
