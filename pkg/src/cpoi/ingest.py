"""N-Triples snapshot ingestion: one file per version."""

from __future__ import annotations

from pathlib import Path

from .dictionary import TripleDictionary
from .vlog import VersionLog, VersionRecord


class IngestError(ValueError):
    pass


def normalize_line(line: str) -> str:
    """Collapse whitespace runs so formatting differences do not split triples."""
    return " ".join(line.split())


def read_snapshot(path) -> list[str]:
    """Distinct normalized triple lines of one N-Triples file, in file order."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise IngestError(f"{path}: cannot read ({e.strerror})") from None
    seen = {}
    for i, chunk in enumerate(raw.split(b"\n"), start=1):
        try:
            line = chunk.decode("utf-8")
        except UnicodeDecodeError:
            raise IngestError(f"{path}:{i}: line is not valid UTF-8") from None
        line = normalize_line(line)
        if line and not line.startswith("#"):
            seen.setdefault(line, None)
    return list(seen)


def default_labels(paths) -> list[str]:
    out, used = [], set()
    for i, p in enumerate(paths, start=1):
        label = "".join(c if not c.isspace() else "_" for c in Path(p).stem) or f"v{i}"
        if label in used:
            label = f"{label}.{i}"
        used.add(label)
        out.append(label)
    return out


def ingest(paths, labels=None, parents=None) -> VersionLog:
    """Build a string-mode log; each file's parent is the previous file unless ``parents`` says otherwise.

    ``parents`` holds one entry per file: a label, or None / "-" for a root.
    """
    paths = list(paths)
    labels = list(labels) if labels is not None else default_labels(paths)
    if len(labels) != len(paths):
        raise IngestError("need exactly one label per snapshot")
    if parents is None:
        parents = [None] + labels[:-1]
    elif len(parents) != len(paths):
        raise IngestError("need exactly one parent entry per snapshot")
    d = TripleDictionary()
    log = VersionLog(dictionary=d)
    for path, label, parent in zip(paths, labels, parents):
        ids = [d.intern(s) for s in read_snapshot(path)]
        try:
            log.append(VersionRecord(label, None if parent in (None, "-") else parent, ids))
        except ValueError as e:
            raise IngestError(f"{path}: {e}") from None
    log._t_count = len(d)
    return log
