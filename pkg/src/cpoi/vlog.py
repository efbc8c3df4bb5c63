"""Version logs: the ordered (label, parent, content) records an archive is built from.

Text interchange format::

    VLOG 1 <|T|>
    V <label> <parent-label or ->
    I <id>            (id mode)   or   T <triple string>   (string mode)
    ...
    <blank line>

Every version block ends with a blank line.  Labels may not contain whitespace.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dictionary import TripleDictionary
from .graph import StorageGraph, as_triple_set

MAGIC = "VLOG"
FORMAT_VERSION = 1


class VlogParseError(ValueError):
    def __init__(self, msg, line):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class BrokenChainError(ValueError):
    pass


@dataclass
class VersionRecord:
    label: str
    parent: str | None
    content: np.ndarray  # sorted unique ids

    def __post_init__(self):
        self.content = as_triple_set(self.content)


class VersionLog:
    """Ordered, possibly branching version records.

    ``dictionary`` is set for string-mode logs; ids then index into it.
    ``t_count`` is the size of the id universe (ids may be unused).
    """

    def __init__(self, records=(), dictionary: TripleDictionary | None = None, t_count: int | None = None):
        self.records: list[VersionRecord] = []
        self._index: dict[str, int] = {}
        self.dictionary = dictionary
        self._t_count = t_count
        for r in records:
            self.append(r)

    def append(self, rec: VersionRecord):
        if rec.label in self._index:
            raise ValueError(f"duplicate version label {rec.label!r}")
        if not rec.label or any(c.isspace() for c in rec.label):
            raise ValueError(f"bad version label {rec.label!r}")
        if rec.parent is not None and rec.parent not in self._index:
            raise BrokenChainError(f"parent {rec.parent!r} of {rec.label!r} does not precede it")
        self._index[rec.label] = len(self.records)
        self.records.append(rec)

    def add(self, label, content, parent=None):
        self.append(VersionRecord(label, parent, content))

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, label) -> VersionRecord:
        try:
            return self.records[self._index[label]]
        except KeyError:
            raise KeyError(f"unknown version {label!r}") from None

    def __contains__(self, label):
        return label in self._index

    def __eq__(self, other):
        if not isinstance(other, VersionLog) or len(self) != len(other):
            return False
        if self.t_count != other.t_count or self.dictionary != other.dictionary:
            return False
        return all(a.label == b.label and a.parent == b.parent and np.array_equal(a.content, b.content)
                   for a, b in zip(self, other))

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.records]

    @property
    def t_count(self) -> int:
        if self._t_count is not None:
            return self._t_count
        if self.dictionary is not None:
            return len(self.dictionary)
        return max((int(r.content[-1]) for r in self.records if r.content.size), default=0)

    def id_pairs(self):
        """(label, ids) pairs, the input shape for graph building."""
        return [(r.label, r.content) for r in self.records]

    def strings_of(self, label) -> list[str]:
        if self.dictionary is None:
            raise ValueError("id-mode log has no triple strings")
        return self.dictionary.strings(self[label].content)

    def reordered(self, order) -> "VersionLog":
        """Same contents in another order; parent links are dropped (they may no longer precede)."""
        out = VersionLog(dictionary=self.dictionary, t_count=self.t_count)
        for label in order:
            r = self[label]
            out.append(VersionRecord(r.label, None, r.content))
        return out


def build_from_log(log: VersionLog, cache_unions: bool = False) -> StorageGraph:
    g = StorageGraph(dictionary=log.dictionary, cache_unions=cache_unions)
    for r in log:
        g.insert_version(r.label, r.content)
    return g


# -- text format --------------------------------------------------------------

def dumps(log: VersionLog, strings: bool | None = None) -> str:
    buf = io.StringIO()
    write(log, buf, strings=strings)
    return buf.getvalue()


def write(log: VersionLog, out, strings: bool | None = None):
    """Write ``log``; string mode by default when it has a dictionary."""
    if strings is None:
        strings = log.dictionary is not None
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            return write(log, f, strings=strings)
    out.write(f"{MAGIC} {FORMAT_VERSION} {log.t_count}\n")
    for r in log:
        out.write(f"V {r.label} {r.parent or '-'}\n")
        if strings:
            for s in log.dictionary.strings(r.content):
                out.write(f"T {s}\n")
        else:
            out.write("".join(f"I {k}\n" for k in r.content.tolist()))
        out.write("\n")


def loads(text: str) -> VersionLog:
    return read(io.StringIO(text))


def read(src) -> VersionLog:
    """Parse the text format.  String-mode triples are interned in order of appearance."""
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8", newline="\n") as f:
            return read(f)
    lines = src.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # the newline ending the last line does not open another
    if not lines or not lines[0].strip():
        raise VlogParseError("missing header", 1)
    head = lines[0].split()
    if len(head) != 3 or head[0] != MAGIC:
        raise VlogParseError(f"expected '{MAGIC} {FORMAT_VERSION} <count>'", 1)
    if head[1] != str(FORMAT_VERSION):
        raise VlogParseError(f"unsupported format version {head[1]}", 1)
    try:
        t_count = int(head[2])
    except ValueError:
        raise VlogParseError("triple count is not an integer", 1) from None

    log = VersionLog(t_count=t_count)
    d = None
    mode = None
    cur = None  # (label, parent, ids, line)

    def close():
        label, parent, ids, at = cur
        try:
            log.append(VersionRecord(label, parent, ids))
        except ValueError as e:
            raise VlogParseError(str(e), at) from None

    for i, raw in enumerate(lines[1:], start=2):
        line = raw.rstrip("\r")
        if cur is None:
            if not line:
                continue
            parts = line.split()
            if parts[0] != "V" or len(parts) != 3:
                raise VlogParseError("expected 'V <label> <parent|->'", i)
            cur = (parts[1], None if parts[2] == "-" else parts[2], [], i)
            continue
        if not line:
            close()
            cur = None
            continue
        tag, _, rest = line.partition(" ")
        if tag == "I":
            if mode == "T":
                raise VlogParseError("id line in a string-mode log", i)
            mode = "I"
            try:
                k = int(rest)
            except ValueError:
                raise VlogParseError(f"bad id {rest!r}", i) from None
            if not 1 <= k <= t_count:
                raise VlogParseError(f"id {k} outside 1..{t_count}", i)
            cur[2].append(k)
        elif tag == "T":
            if mode == "I":
                raise VlogParseError("triple line in an id-mode log", i)
            mode = "T"
            if d is None:
                d = TripleDictionary()
            cur[2].append(d.intern(rest))
        else:
            raise VlogParseError(f"unexpected line {line[:40]!r}", i)
    if cur is not None:
        raise VlogParseError(f"version {cur[0]!r} is not terminated by a blank line", cur[3])
    if d is not None:
        if len(d) > t_count:
            raise VlogParseError(f"header says {t_count} triples, log holds {len(d)}", 1)
        log.dictionary = d
    return log
