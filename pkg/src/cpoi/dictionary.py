"""Triple identity: the string <-> id table shared by every archive."""

from __future__ import annotations

import numpy as np

MAX_ID = 2**32 - 1


class UnknownIdError(KeyError):
    pass


class InvalidPermutationError(ValueError):
    pass


class TripleDictionary:
    """Bidirectional map between triple strings and dense ids ``1..|T|``.

    Strings are opaque; no subject/predicate/object splitting is done.
    """

    def __init__(self, entries=()):
        self._entries: list[str] = []
        self._ids: dict[str, int] = {}
        for s in entries:
            self.intern(s)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, s):
        return s in self._ids

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other):
        if not isinstance(other, TripleDictionary):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self):
        return f"TripleDictionary(<{len(self)} triples>)"

    def intern(self, s: str) -> int:
        """Return the id of ``s``, assigning ``|T| + 1`` on first sight."""
        tid = self._ids.get(s)
        if tid is not None:
            return tid
        if len(self._entries) >= MAX_ID:
            raise OverflowError("dictionary is full (ids are 32-bit)")
        self._entries.append(s)
        tid = len(self._entries)
        self._ids[s] = tid
        return tid

    def lookup(self, k: int) -> str:
        if not 1 <= k <= len(self._entries):
            raise UnknownIdError(f"unknown id {k} (dictionary holds 1..{len(self)})")
        return self._entries[k - 1]

    def id_of(self, s: str) -> int:
        try:
            return self._ids[s]
        except KeyError:
            raise UnknownIdError(f"triple not interned: {s!r}") from None

    def strings(self, ids) -> list[str]:
        return [self.lookup(int(k)) for k in ids]

    def byte_sizes(self) -> np.ndarray:
        """UTF-8 length of every entry, indexed by id (slot 0 unused)."""
        out = np.zeros(len(self) + 1, dtype=np.int64)
        out[1:] = [len(s.encode("utf-8")) for s in self._entries]
        return out

    def permuted(self, perm) -> "TripleDictionary":
        """Return a new dictionary where old id ``k`` now lives at ``perm[k]``."""
        mapping = np.asarray(perm.mapping if hasattr(perm, "mapping") else perm)
        n = len(self)
        if mapping.shape != (n + 1,) or not _is_bijection(mapping):
            raise InvalidPermutationError("invalid permutation for dictionary of size %d" % n)
        entries = [None] * n
        for old, s in enumerate(self._entries, start=1):
            entries[mapping[old] - 1] = s
        out = TripleDictionary()
        out._entries = entries
        out._ids = {s: i for i, s in enumerate(entries, start=1)}
        return out


def intern_triple(d: TripleDictionary, s: str) -> int:
    return d.intern(s)


def lookup_triple(d: TripleDictionary, k: int) -> str:
    return d.lookup(k)


def apply_permutation_dict(d: TripleDictionary, perm) -> TripleDictionary:
    return d.permuted(perm)


def _is_bijection(mapping: np.ndarray) -> bool:
    n = len(mapping) - 1
    if mapping[0] != 0:
        return False
    body = mapping[1:]
    if n == 0:
        return True
    if body.min() < 1 or body.max() > n:
        return False
    return len(np.unique(body)) == n
