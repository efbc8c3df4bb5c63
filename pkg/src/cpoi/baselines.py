"""Reference archives (independent copies and change-based deltas) plus the
shared size/reconstruct surface used to compare them against the POI family.

Everything is held as ids in memory.  Sizes charge each stored triple string
its byte length: the dictionary's UTF-8 lengths for ingested data, or a flat
``triple_bytes`` for generated logs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import codec
from .graph import StorageGraph, UnknownVersionError
from .space import FamilyStats, space_cpoi_u, space_poi
from .vlog import BrokenChainError, VersionLog

DEFAULT_TRIPLE_BYTES = 100
DELTA_HEADER_BYTES = 8
B_DEFAULT = 32


class Method(enum.Enum):
    IC = "ic"
    CB = "cb"
    CBD = "cbd"
    POI = "poi"
    CPOI = "cpoi"
    CPOI_U = "cpoi-u"


@dataclass(frozen=True)
class MethodSize:
    method: Method
    node_bits: int  # the id lists, or the triple payload for string-storing methods
    total_bits: int  # node_bits plus stored strings (dictionary) where applicable
    dictionary_bits: int = 0
    header_bits: int = 0  # per-record overhead, never folded into total_bits
    id_count: int = 0  # stored triples/ids, comparable across methods

    def ratio_to(self, other: "MethodSize", total: bool = False) -> float:
        a, b = (self.total_bits, other.total_bits) if total else (self.node_bits, other.node_bits)
        return 100.0 * a / b if b else float("nan")


@dataclass
class Delta:
    added: np.ndarray
    deleted: np.ndarray

    @classmethod
    def between(cls, parent, child) -> "Delta":
        parent = np.asarray(parent, dtype=np.int64)
        child = np.asarray(child, dtype=np.int64)
        return cls(np.setdiff1d(child, parent, assume_unique=True),
                   np.setdiff1d(parent, child, assume_unique=True))

    def apply(self, content) -> np.ndarray:
        content = np.asarray(content, dtype=np.int64)
        kept = np.setdiff1d(content, self.deleted, assume_unique=True)
        return np.union1d(kept, self.added)

    def __len__(self):
        return len(self.added) + len(self.deleted)


def triple_byte_sizes(log: VersionLog, triple_bytes: int | None = None) -> np.ndarray:
    """Bytes per triple, indexed by id."""
    t = log.t_count
    if triple_bytes is None and log.dictionary is not None:
        return log.dictionary.byte_sizes()
    out = np.full(t + 1, DEFAULT_TRIPLE_BYTES if triple_bytes is None else triple_bytes, dtype=np.int64)
    out[0] = 0
    return out


class ICArchive:
    """Every version stored in full."""

    method = Method.IC

    def __init__(self, log: VersionLog):
        self.contents = {r.label: r.content for r in log}

    def reconstruct(self, v) -> np.ndarray:
        try:
            return self.contents[v]
        except KeyError:
            raise UnknownVersionError(f"unknown version {v!r}") from None

    def size(self, sizes: np.ndarray) -> MethodSize:
        ids = sum(len(c) for c in self.contents.values())
        payload = 8 * sum(int(sizes[c].sum()) for c in self.contents.values())
        return MethodSize(Method.IC, payload, payload, id_count=ids)


class DeltaArchive:
    """Track roots in full, every other version as a directed delta from its parent.

    The same structure serves both delta methods; they differ in what a
    stored entry costs (a triple string for CB, a B-bit id for CBD).
    """

    def __init__(self, log: VersionLog, method: Method = Method.CB):
        if method not in (Method.CB, Method.CBD):
            raise ValueError(method)
        self.method = method
        self.full: dict[str, np.ndarray] = {}
        self.deltas: dict[str, tuple[str, Delta]] = {}
        seen = {}
        for r in log:
            if r.parent is None:
                self.full[r.label] = r.content
            else:
                if r.parent not in seen:
                    raise BrokenChainError(f"parent {r.parent!r} of {r.label!r} missing")
                self.deltas[r.label] = (r.parent, Delta.between(seen[r.parent], r.content))
            seen[r.label] = r.content

    def chain(self, v) -> list[str]:
        """Labels from ``v`` back to its track root."""
        out = [v]
        while out[-1] not in self.full:
            step = self.deltas.get(out[-1])
            if step is None:
                raise UnknownVersionError(f"unknown version {out[-1]!r}")
            out.append(step[0])
        return out

    def reconstruct(self, v) -> np.ndarray:
        path = self.chain(v)
        content = self.full[path[-1]]
        for label in reversed(path[:-1]):
            content = self.deltas[label][1].apply(content)
        return content

    def id_count(self) -> int:
        return sum(len(c) for c in self.full.values()) + sum(len(d) for _, d in self.deltas.values())

    def size(self, sizes: np.ndarray, B: int = B_DEFAULT) -> MethodSize:
        headers = 8 * DELTA_HEADER_BYTES * len(self.deltas)
        ids = self.id_count()
        if self.method is Method.CB:
            payload = sum(int(sizes[c].sum()) for c in self.full.values())
            payload += sum(int(sizes[d.added].sum() + sizes[d.deleted].sum()) for _, d in self.deltas.values())
            return MethodSize(Method.CB, 8 * payload, 8 * payload, header_bits=headers, id_count=ids)
        dict_bits = 8 * int(sizes[1:].sum())
        node = B * ids
        return MethodSize(Method.CBD, node, node + dict_bits, dictionary_bits=dict_bits,
                          header_bits=headers, id_count=ids)


def ic_build(log: VersionLog) -> ICArchive:
    return ICArchive(log)


def cb_build(log: VersionLog) -> DeltaArchive:
    return DeltaArchive(log, Method.CB)


def cbd_build(log: VersionLog) -> DeltaArchive:
    return DeltaArchive(log, Method.CBD)


def ic_size(log: VersionLog, triple_bytes: int | None = None) -> MethodSize:
    return ic_build(log).size(triple_byte_sizes(log, triple_bytes))


def cb_size(log: VersionLog, triple_bytes: int | None = None) -> MethodSize:
    return cb_build(log).size(triple_byte_sizes(log, triple_bytes))


def cbd_size(log: VersionLog, triple_bytes: int | None = None, B: int = B_DEFAULT) -> MethodSize:
    return cbd_build(log).size(triple_byte_sizes(log, triple_bytes), B=B)


def graph_size(g: StorageGraph, method: Method, sizes: np.ndarray, B: int = B_DEFAULT,
               kind: codec.CodecKind | None = None) -> MethodSize:
    """Size of a POI-family archive built over ``g``.

    CPOI defaults to Elias-gamma gaps; pass ``kind`` for another tail code.
    """
    family = g.stored_family()
    stats = FamilyStats.from_family(family, g.t_count, B=B)
    dict_bits = 8 * int(sizes[1:].sum())
    if method is Method.POI:
        node = space_poi(stats)
    elif method is Method.CPOI_U:
        node = space_cpoi_u(stats)
    elif method is Method.CPOI:
        node = codec.family_bits(family, kind or codec.GAMMA)
    else:
        raise ValueError(f"{method} is not a graph method")
    return MethodSize(method, node, node + dict_bits, dictionary_bits=dict_bits, id_count=stats.sum_sizes)


def reconstruct_any(archive, v) -> np.ndarray:
    """Content of ``v`` from any archive kind (baseline, graph or encoded)."""
    return np.asarray(archive.reconstruct(v), dtype=np.int64)


def adversarial_log(rounds: int, size: int, base: int = 1) -> VersionLog:
    """One track where a block of ``size`` ids is added, then deleted, ``rounds`` times.

    Versions alternate between ``base`` ids plus the block and the ``base``
    ids alone.  Each delta carries the whole block while a full copy of the
    small version is cheap, so deltas approach twice the size of full copies.
    """
    if base < 1:
        raise ValueError("versions must stay non-empty; base >= 1")
    small = np.arange(1, base + 1)
    big = np.arange(1, base + size + 1)
    log = VersionLog(t_count=base + size)
    prev = None
    for i in range(2 * rounds):
        label = f"v{i}"
        log.add(label, big if i % 2 == 0 else small, parent=prev)
        prev = label
    return log
