"""Partial order index (POI): the storage graph over distinct version contents.

Each node stands for one distinct content.  Parent links are the cover
relation of strict set inclusion, and a node only stores the ids that none of
its ancestors hold, so a version is rebuilt by unioning the stored sets up the
graph.  The stored sets are a pure function of the set of contents, which makes
the structure independent of insertion order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import bitset
from .dictionary import TripleDictionary


class UnknownVersionError(KeyError):
    pass


class DuplicateVersionError(ValueError):
    pass


@dataclass
class Node:
    node_id: int
    stored: np.ndarray
    parents: frozenset
    children: frozenset
    creation_ordinal: int = field(default=0)


def as_triple_set(ids) -> np.ndarray:
    """Normalize ``ids`` to a sorted, duplicate-free int64 array."""
    arr = np.unique(np.asarray(ids, dtype=np.int64))
    if arr.size and arr[0] < 1:
        raise ValueError("triple ids must be positive")
    return arr


class StorageGraph:
    """The POI storage graph plus the version -> node map.

    ``cache_unions`` keeps every node's full content bitset between insertions
    (contents of existing nodes never change on insert).  It only affects
    speed; with it off, contents are recomputed by a top-down pass per insert.
    """

    def __init__(self, dictionary: TripleDictionary | None = None, cache_unions: bool = False):
        self.dictionary = dictionary
        self.cache_unions = cache_unions
        self.version_map: dict[str, int] = {}
        self._stored: list[int] = []  # node_id - 1 -> stored bitset
        self._parents: list[set] = []
        self._children: list[set] = []
        self._fingerprints: dict[int, list[int]] = {}
        self._content_cache: dict[int, int] = {}
        self._max_id = 0

    # -- basic views -------------------------------------------------------

    def __len__(self):
        return len(self._stored)

    @property
    def node_ids(self):
        return range(1, len(self._stored) + 1)

    @property
    def t_count(self) -> int:
        if self.dictionary is not None:
            return max(len(self.dictionary), self._max_id)
        return self._max_id

    @property
    def versions(self) -> list[str]:
        return list(self.version_map)

    def node(self, node_id: int) -> Node:
        i = node_id - 1
        return Node(
            node_id=node_id,
            stored=bitset.to_ids(self._stored[i]),
            parents=frozenset(self._parents[i]),
            children=frozenset(self._children[i]),
            creation_ordinal=node_id,
        )

    def stored(self, node_id: int) -> np.ndarray:
        return bitset.to_ids(self._stored[node_id - 1])

    def stored_size(self, node_id: int) -> int:
        return self._stored[node_id - 1].bit_count()

    def parents(self, node_id: int) -> set:
        return set(self._parents[node_id - 1])

    def children(self, node_id: int) -> set:
        return set(self._children[node_id - 1])

    def roots(self) -> list[int]:
        return [n for n in self.node_ids if not self._parents[n - 1]]

    def node_of(self, version: str) -> int:
        try:
            return self.version_map[version]
        except KeyError:
            raise UnknownVersionError(version) from None

    def versions_at(self, node_id: int) -> list[str]:
        return [v for v, n in self.version_map.items() if n == node_id]

    def edge_count(self) -> int:
        return sum(len(p) for p in self._parents)

    def depths(self) -> np.ndarray:
        """Longest-path level of every node, roots at depth 1."""
        depth = {}
        for n in self._topological_order():
            ps = self._parents[n - 1]
            depth[n] = 1 + max((depth[p] for p in ps), default=0)
        return np.array([depth[n] for n in self.node_ids], dtype=np.int64)

    # -- contents ----------------------------------------------------------

    def _topological_order(self) -> list[int]:
        indeg = [len(p) for p in self._parents]
        queue = deque(n for n in self.node_ids if indeg[n - 1] == 0)
        order = []
        while queue:
            n = queue.popleft()
            order.append(n)
            for c in sorted(self._children[n - 1]):
                indeg[c - 1] -= 1
                if indeg[c - 1] == 0:
                    queue.append(c)
        return order

    def _all_contents(self) -> dict[int, int]:
        if self.cache_unions and len(self._content_cache) == len(self):
            return self._content_cache
        contents = {}
        for n in self._topological_order():
            m = self._stored[n - 1]
            for p in self._parents[n - 1]:
                m |= contents[p]
            contents[n] = m
        if self.cache_unions:
            self._content_cache = contents
        return contents

    def _content_mask(self, node_id: int) -> int:
        if self.cache_unions and node_id in self._content_cache:
            return self._content_cache[node_id]
        m = 0
        seen = set()
        stack = [node_id]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            m |= self._stored[n - 1]
            stack.extend(self._parents[n - 1])
        return m

    def content(self, node_id: int) -> np.ndarray:
        return bitset.to_ids(self._content_mask(node_id))

    def reconstruct(self, version: str) -> np.ndarray:
        """Full content of ``version``: its node's stored ids plus every ancestor's."""
        return self.content(self.node_of(version))

    def reconstruct_strings(self, version: str) -> list[str]:
        if self.dictionary is None:
            raise ValueError("graph has no dictionary")
        return self.dictionary.strings(self.reconstruct(version))

    # -- insertion ---------------------------------------------------------

    def insert_version(self, version: str, content) -> int:
        """Archive ``content`` under label ``version``; return its node id."""
        if version in self.version_map:
            raise DuplicateVersionError(f"version {version!r} already archived")
        ids = as_triple_set(content)
        if ids.size:
            self._max_id = max(self._max_id, int(ids[-1]))
        new = bitset.from_ids(ids)

        fp = hash(new)
        for cand in self._fingerprints.get(fp, ()):
            if self._content_mask(cand) == new:
                self.version_map[version] = cand
                return cand

        contents = self._all_contents()
        size = new.bit_count()
        subsets, supersets = self._locate(new, size, contents)
        maximal = [n for n in subsets if not (self._children[n - 1] & subsets)]
        minimal = [n for n in supersets if not (self._parents[n - 1] & supersets)]

        inherited = 0
        for p in maximal:
            inherited |= contents[p]

        x = len(self._stored) + 1
        self._stored.append(new & ~inherited)
        self._parents.append(set(maximal))
        self._children.append(set(minimal))
        for p in maximal:
            self._children[p - 1].add(x)
        for m in minimal:
            i = m - 1
            for p in [p for p in self._parents[i] if p in subsets]:
                self._parents[i].discard(p)
                self._children[p - 1].discard(m)
            self._parents[i].add(x)
            self._stored[i] &= ~new

        self._fingerprints.setdefault(fp, []).append(x)
        if self.cache_unions:
            self._content_cache[x] = new
        self.version_map[version] = x
        return x

    def insert_triples(self, version: str, triples) -> int:
        """Intern ``triples`` (strings) and insert them as one version."""
        if self.dictionary is None:
            self.dictionary = TripleDictionary()
        ids = [self.dictionary.intern(s) for s in triples]
        return self.insert_version(version, ids)

    def _locate(self, new: int, size: int, contents: dict[int, int]):
        # Subsets are closed upward, so descend from roots through subset nodes only.
        subsets = set()
        pending = {}
        queue = deque()
        for r in self.roots():
            queue.append(r)
        while queue:
            n = queue.popleft()
            c = contents[n]
            if c != new and c & new == c:
                subsets.add(n)
                for ch in self._children[n - 1]:
                    pending[ch] = pending.get(ch, 0) + 1
                    if pending[ch] == len(self._parents[ch - 1]):
                        queue.append(ch)
        supersets = set()
        for n, c in contents.items():
            if c.bit_count() > size and c & new == new:
                supersets.add(n)
        return subsets, supersets

    # -- queries -----------------------------------------------------------

    def subsets_of(self, ids) -> set[str]:
        """Versions whose content is a subset of ``ids``."""
        target = bitset.from_ids(as_triple_set(ids))
        hits = set()
        contents = {}
        pending = {}
        queue = deque(self.roots())
        while queue:
            n = queue.popleft()
            c = self._stored[n - 1]
            for p in self._parents[n - 1]:
                c |= contents[p]
            if c & target != c:
                continue
            contents[n] = c
            hits.add(n)
            for ch in self._children[n - 1]:
                pending[ch] = pending.get(ch, 0) + 1
                if pending[ch] == len(self._parents[ch - 1]):
                    queue.append(ch)
        return {v for v, n in self.version_map.items() if n in hits}

    def supersets_of(self, ids) -> set[str]:
        """Versions whose content is a superset of ``ids``."""
        target = bitset.from_ids(as_triple_set(ids))
        hits = set()
        contents = {}
        for n in self._topological_order():
            if any(p in hits for p in self._parents[n - 1]):
                hits.add(n)
                continue
            c = self._stored[n - 1]
            for p in self._parents[n - 1]:
                c |= contents[p]
            contents[n] = c
            if c & target == target:
                hits.add(n)
        return {v for v, n in self.version_map.items() if n in hits}

    def stored_family(self) -> list[np.ndarray]:
        return [bitset.to_ids(m) for m in self._stored]

    def stored_sizes(self) -> np.ndarray:
        return np.array([m.bit_count() for m in self._stored], dtype=np.int64)

    # -- relabeling --------------------------------------------------------

    def relabeled(self, mapping: np.ndarray, dictionary: TripleDictionary | None = None) -> "StorageGraph":
        """Copy of the graph with every id ``k`` replaced by ``mapping[k]``."""
        out = StorageGraph(dictionary=dictionary, cache_unions=self.cache_unions)
        out.version_map = dict(self.version_map)
        out._parents = [set(p) for p in self._parents]
        out._children = [set(c) for c in self._children]
        out._stored = [bitset.from_ids(np.sort(mapping[bitset.to_ids(m)])) for m in self._stored]
        out._max_id = self._max_id
        for n, c in out._all_contents().items():
            out._fingerprints.setdefault(hash(c), []).append(n)
        return out

    # -- debugging aids ----------------------------------------------------

    def check_invariants(self) -> None:
        """Brute-force check of disjointness, cover edges and version coverage."""
        contents = self._all_contents()
        seen = {}
        for n, c in contents.items():
            if c in seen:
                raise AssertionError(f"nodes {seen[c]} and {n} share a content")
            seen[c] = n
        for n in self.node_ids:
            anc = self._ancestors(n)
            for a in anc:
                if self._stored[n - 1] & self._stored[a - 1]:
                    raise AssertionError(f"node {n} overlaps ancestor {a}")
            expected = set()
            cn = contents[n]
            subs = [m for m, c in contents.items() if c != cn and c & cn == c]
            for m in subs:
                if not any(contents[k] != contents[m] and contents[m] & contents[k] == contents[m] for k in subs):
                    expected.add(m)
            if expected != self._parents[n - 1]:
                raise AssertionError(f"node {n}: parents {self._parents[n - 1]} != cover {expected}")
            inherited = 0
            for m in subs:
                inherited |= contents[m]
            if self._stored[n - 1] != cn & ~inherited:
                raise AssertionError(f"node {n}: stored set is not content minus inherited ids")
        pointed = set(self.version_map.values())
        if pointed != set(self.node_ids):
            raise AssertionError("some node is not pointed to by any version")

    def _ancestors(self, node_id: int) -> set:
        out = set()
        stack = list(self._parents[node_id - 1])
        while stack:
            n = stack.pop()
            if n not in out:
                out.add(n)
                stack.extend(self._parents[n - 1])
        return out


def build_graph(records, dictionary=None, cache_unions=False) -> StorageGraph:
    """Insert ``(label, ids)`` pairs in order into a fresh graph."""
    g = StorageGraph(dictionary=dictionary, cache_unions=cache_unions)
    for label, ids in records:
        g.insert_version(label, ids)
    return g


def insert_version(g: StorageGraph, v: str, content) -> int:
    return g.insert_version(v, content)


def reconstruct(g: StorageGraph, v: str) -> np.ndarray:
    return g.reconstruct(v)


def subsets_of(g: StorageGraph, s) -> set[str]:
    return g.subsets_of(s)


def supersets_of(g: StorageGraph, s) -> set[str]:
    return g.supersets_of(s)


def stored_family(g: StorageGraph) -> list[np.ndarray]:
    return g.stored_family()
