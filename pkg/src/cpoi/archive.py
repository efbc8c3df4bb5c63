"""Self-describing binary archive for an encoded storage graph.

Layout (all integers little-endian)::

    "CPOI" <format byte>
    section header      B(1) |T|(4) |N|(4) versions(4) codec(1) width(1)
    section dictionary  count(4), then per id: len(4) + UTF-8 bytes
    section nodes       per node: node_id(4) parent_count(2) parent ids(4 each)
                        triple_count(4) encoded list (padded to a byte)
    section versions    per version: ordinal(4) node_id(4) len(4) + UTF-8 label

Each section is framed as length(8) + payload + CRC32(4) of the payload.
An id-mode archive (no triple strings) has an empty dictionary.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bitset, codec
from .dictionary import TripleDictionary
from .graph import StorageGraph, UnknownVersionError

MAGIC = b"CPOI"
FORMAT_VERSION = 1
_CODEC_TAGS = {"unary": 0, "gamma": 1, "uniform": 2, "fixed32": 3}
_TAG_NAMES = {v: k for k, v in _CODEC_TAGS.items()}


class ArchiveCorruptError(ValueError):
    pass


@dataclass(frozen=True)
class NodeRecord:
    node_id: int
    parents: tuple
    count: int
    data: bytes


class EncodedArchive:
    """Node lists held in their encoded byte form; decoded on demand."""

    def __init__(self, kind: codec.CodecKind, t_count: int, nodes, versions,
                 dictionary: TripleDictionary | None = None, B: int = 32):
        self.kind = kind
        self.t_count = t_count
        self.nodes: list[NodeRecord] = list(nodes)
        self.versions: list[tuple[str, int]] = list(versions)  # (label, node_id) in archive order
        self.version_map = dict(self.versions)
        self.dictionary = dictionary
        self.B = B
        self._decoded: dict[int, np.ndarray] = {}

    @classmethod
    def from_graph(cls, g: StorageGraph, kind: codec.CodecKind, B: int = 32) -> "EncodedArchive":
        nodes = []
        for n in g.node_ids:
            ids = g.stored(n)
            nodes.append(NodeRecord(n, tuple(sorted(g.parents(n))), int(ids.size), codec.node_bytes(ids, kind)))
        return cls(kind, g.t_count, nodes, list(g.version_map.items()), g.dictionary, B)

    def __len__(self):
        return len(self.nodes)

    @property
    def labels(self) -> list[str]:
        return [v for v, _ in self.versions]

    def node_ids_of(self, v) -> int:
        try:
            return self.version_map[v]
        except KeyError:
            raise UnknownVersionError(f"unknown version {v!r}") from None

    def decode_node(self, node_id: int) -> np.ndarray:
        ids = self._decoded.get(node_id)
        if ids is None:
            rec = self.nodes[node_id - 1]
            e, end = codec.node_list_from_bytes(rec.data, 0, rec.count, self.kind)
            if end != len(rec.data):
                raise ArchiveCorruptError(f"node {node_id}: {len(rec.data) - end} stray bytes")
            ids = codec.decode_gapped_list(e, self.kind)
            self._decoded[node_id] = ids
        return ids

    def stored_family(self) -> list[np.ndarray]:
        return [self.decode_node(r.node_id) for r in self.nodes]

    def reconstruct(self, v) -> np.ndarray:
        start = self.node_ids_of(v)
        seen = {start}
        stack = [start]
        parts = []
        while stack:
            n = stack.pop()
            parts.append(self.decode_node(n))
            for p in self.nodes[n - 1].parents:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return np.unique(np.concatenate(parts)) if parts else np.empty(0, np.int64)

    def reconstruct_strings(self, v) -> list[str]:
        return self.dictionary.strings(self.reconstruct(v))

    def to_graph(self) -> StorageGraph:
        """Rebuild the in-memory graph (inverse of :meth:`from_graph`)."""
        g = StorageGraph(dictionary=self.dictionary)
        g._stored = [bitset.from_ids(self.decode_node(r.node_id)) for r in self.nodes]
        g._parents = [set(r.parents) for r in self.nodes]
        g._children = [set() for _ in self.nodes]
        for r in self.nodes:
            for p in r.parents:
                g._children[p - 1].add(r.node_id)
        g.version_map = dict(self.versions)
        g._max_id = max((int(s[-1]) for s in self.stored_family() if s.size), default=0)
        for n, c in g._all_contents().items():
            g._fingerprints.setdefault(hash(c), []).append(n)
        return g

    # -- serialization -----------------------------------------------------

    def to_bytes(self) -> bytes:
        width = self.kind.width if self.kind.name == "uniform" else 0
        header = struct.pack("<BIIIBB", self.B, self.t_count, len(self.nodes), len(self.versions),
                             _CODEC_TAGS[self.kind.name], width)
        d = self.dictionary
        parts = [struct.pack("<I", len(d) if d is not None else 0)]
        if d is not None:
            for s in d:
                raw = s.encode("utf-8")
                parts.append(struct.pack("<I", len(raw)))
                parts.append(raw)
        dictionary = b"".join(parts)
        parts = []
        for r in self.nodes:
            parts.append(struct.pack(f"<IH{len(r.parents)}II", r.node_id, len(r.parents), *r.parents, r.count))
            parts.append(r.data)
        nodes = b"".join(parts)
        parts = []
        for i, (label, n) in enumerate(self.versions, start=1):
            raw = label.encode("utf-8")
            parts.append(struct.pack("<III", i, n, len(raw)))
            parts.append(raw)
        versions = b"".join(parts)
        out = [MAGIC, bytes([FORMAT_VERSION])]
        for payload in (header, dictionary, nodes, versions):
            out.append(struct.pack("<Q", len(payload)))
            out.append(payload)
            out.append(struct.pack("<I", zlib.crc32(payload)))
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "EncodedArchive":
        if data[:4] != MAGIC:
            raise ArchiveCorruptError("not a CPOI archive (bad magic)")
        if len(data) < 5 or data[4] != FORMAT_VERSION:
            raise ArchiveCorruptError("unsupported archive format version")
        pos = 5
        sections = []
        for name in ("header", "dictionary", "nodes", "versions"):
            if pos + 8 > len(data):
                raise ArchiveCorruptError(f"truncated before {name} section")
            (n,) = struct.unpack_from("<Q", data, pos)
            pos += 8
            if pos + n + 4 > len(data):
                raise ArchiveCorruptError(f"truncated {name} section")
            payload = data[pos:pos + n]
            (crc,) = struct.unpack_from("<I", data, pos + n)
            if zlib.crc32(payload) != crc:
                raise ArchiveCorruptError(f"checksum mismatch in {name} section")
            sections.append(payload)
            pos += n + 4
        if pos != len(data):
            raise ArchiveCorruptError("trailing bytes after last section")
        try:
            return cls._parse(*sections)
        except (struct.error, IndexError, KeyError, UnicodeDecodeError, codec.MalformedStreamError) as e:
            raise ArchiveCorruptError(f"malformed archive: {e}") from None

    @classmethod
    def _parse(cls, header, dictionary, nodes, versions):
        B, t_count, n_nodes, n_versions, tag, width = struct.unpack("<BIIIBB", header)
        name = _TAG_NAMES[tag]
        kind = codec.CodecKind(name, width if name == "uniform" else None)

        (count,) = struct.unpack_from("<I", dictionary, 0)
        pos = 4
        d = None
        if count:
            entries = []
            for _ in range(count):
                (n,) = struct.unpack_from("<I", dictionary, pos)
                entries.append(dictionary[pos + 4:pos + 4 + n].decode("utf-8"))
                pos += 4 + n
            d = TripleDictionary(entries)
            if len(d) != count:
                raise ArchiveCorruptError("duplicate dictionary entries")

        recs = []
        pos = 0
        for expect in range(1, n_nodes + 1):
            node_id, npar = struct.unpack_from("<IH", nodes, pos)
            pos += 6
            parents = struct.unpack_from(f"<{npar}I", nodes, pos)
            pos += 4 * npar
            (cnt,) = struct.unpack_from("<I", nodes, pos)
            pos += 4
            if node_id != expect:
                raise ArchiveCorruptError(f"node record {expect} carries id {node_id}")
            _, end = codec.node_list_from_bytes(nodes, pos, cnt, kind)
            recs.append(NodeRecord(node_id, tuple(parents), cnt, bytes(nodes[pos:end])))
            pos = end
        if pos != len(nodes):
            raise ArchiveCorruptError("stray bytes in node section")

        vers = []
        pos = 0
        for expect in range(1, n_versions + 1):
            ordinal, node_id, n = struct.unpack_from("<III", versions, pos)
            if ordinal != expect or not 1 <= node_id <= n_nodes:
                raise ArchiveCorruptError(f"bad version record {expect}")
            vers.append((versions[pos + 12:pos + 12 + n].decode("utf-8"), node_id))
            pos += 12 + n
        if pos != len(versions):
            raise ArchiveCorruptError("stray bytes in version section")
        return cls(kind, t_count, recs, vers, d, B)

    def write(self, path):
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def read(cls, path) -> "EncodedArchive":
        return cls.from_bytes(Path(path).read_bytes())


def write_archive(g: StorageGraph, path, kind: codec.CodecKind = codec.GAMMA, B: int = 32) -> EncodedArchive:
    a = EncodedArchive.from_graph(g, kind, B)
    a.write(path)
    return a


def read_archive(path) -> EncodedArchive:
    return EncodedArchive.read(path)
