"""Bit-level integer codes and the gapped node-list encoding.

Bit strings are plain ``str`` objects of ``'0'``/``'1'`` characters, written
most-significant bit first.  Bulk encoders build the bits with numpy and only
materialize the string at the end; :func:`codeword_lengths` gives exact sizes
without building anything.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

FIRST_ID_BITS = 32


class MalformedStreamError(ValueError):
    def __init__(self, reason, offset):
        super().__init__(f"{reason} at bit offset {offset}")
        self.reason = reason
        self.offset = offset


@dataclass(frozen=True)
class CodecKind:
    name: str
    width: int | None = None

    def __post_init__(self):
        if self.name not in ("unary", "gamma", "uniform", "fixed32"):
            raise ValueError(f"unknown codec {self.name!r}")
        if self.name == "uniform" and not (self.width and 1 <= self.width <= 32):
            raise ValueError("uniform codec needs a width in 1..32")

    @property
    def gapped(self) -> bool:
        """Variable-length codes store gaps; fixed-width codes store plain ids."""
        return self.name in ("unary", "gamma")

    def __str__(self):
        return f"uniform{self.width}" if self.name == "uniform" else self.name


UNARY = CodecKind("unary")
GAMMA = CodecKind("gamma")
FIXED32 = CodecKind("fixed32")


def uniform(t_count: int) -> CodecKind:
    return CodecKind("uniform", uniform_width(t_count))


def uniform_width(t_count: int) -> int:
    """ceil(log2 |T|), with one bit for the degenerate |T| = 1."""
    if t_count < 1:
        raise ValueError("|T| must be positive")
    return max(1, (t_count - 1).bit_length())


def codec_for(name: str, t_count: int = 1) -> CodecKind:
    if name == "uniform":
        return uniform(t_count)
    return {"unary": UNARY, "gamma": GAMMA, "fixed32": FIXED32}[name]


def _check_positive(k):
    if k < 1:
        raise ValueError(f"code is only defined for k >= 1, got {k}")


def encode_unary(k: int) -> str:
    _check_positive(k)
    return "1" * (k - 1) + "0"


def encode_elias_gamma(k: int) -> str:
    _check_positive(k)
    b = bin(k)[2:]
    return "0" * (len(b) - 1) + b


def encode_fixed(k: int, width: int) -> str:
    if not 0 <= k < (1 << width):
        raise ValueError(f"{k} does not fit in {width} bits")
    return format(k, f"0{width}b")


def encode_uniform(k: int, width: int) -> str:
    # ids 1..2**width map onto codes 0..2**width - 1
    _check_positive(k)
    return encode_fixed(k - 1, width)


def floor_log2(values: np.ndarray) -> np.ndarray:
    _, exp = np.frexp(np.asarray(values, dtype=np.float64))
    return exp.astype(np.int64) - 1


def codeword_lengths(values, kind: CodecKind) -> np.ndarray:
    """Exact bit length of each codeword."""
    v = np.asarray(values, dtype=np.int64)
    if v.size and v.min() < 1:
        raise ValueError("codes are only defined for k >= 1")
    if kind.name == "unary":
        return v.copy()
    if kind.name == "gamma":
        return 2 * floor_log2(v) + 1
    if kind.name == "uniform":
        return np.full(v.shape, kind.width, dtype=np.int64)
    return np.full(v.shape, FIRST_ID_BITS, dtype=np.int64)


def _bits_to_str(bits: np.ndarray) -> str:
    return (bits.astype(np.uint8) + ord("0")).tobytes().decode("ascii")


def _fixed_bits(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((values[:, None] >> shifts) & 1).ravel()


def encode_stream_bits(values, kind: CodecKind) -> np.ndarray:
    """Concatenated codewords as a uint8 array of 0/1."""
    v = np.asarray(values, dtype=np.int64)
    if v.size == 0:
        return np.zeros(0, dtype=np.uint8)
    lengths = codeword_lengths(v, kind)
    if kind.name in ("uniform", "fixed32"):
        width = int(lengths[0])
        body = v - 1 if kind.name == "uniform" else v
        if body.max() >= (1 << width):
            raise ValueError(f"value does not fit in {width} bits")
        return _fixed_bits(body, width).astype(np.uint8)
    total = int(lengths.sum())
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    if kind.name == "unary":
        bits = np.ones(total, dtype=np.uint8)
        bits[starts + lengths - 1] = 0
        return bits
    # gamma: L zeros, then the L+1 binary digits of k
    bits = np.zeros(total, dtype=np.uint8)
    nbin = (lengths + 1) // 2
    owner = np.repeat(np.arange(v.size), nbin)
    within = np.arange(owner.size) - np.repeat(np.cumsum(nbin) - nbin, nbin)
    shift = nbin[owner] - 1 - within
    pos = starts[owner] + (nbin[owner] - 1) + within
    bits[pos] = (v[owner] >> shift) & 1
    return bits


def encode_stream(values, kind: CodecKind) -> str:
    return _bits_to_str(encode_stream_bits(values, kind))


def decode_stream(bits: str, kind: CodecKind, count: int | None = None, start: int = 0):
    """Decode codewords from ``bits``.

    Reads to the end of the string, or exactly ``count`` codewords when given.
    Returns the decoded list; use :func:`decode_stream_at` to also get the end offset.
    """
    out, _ = decode_stream_at(bits, kind, count, start)
    return out


def decode_stream_at(bits: str, kind: CodecKind, count=None, start=0):
    out = []
    pos = start
    n = len(bits)
    if kind.name in ("uniform", "fixed32"):
        width = kind.width if kind.name == "uniform" else FIRST_ID_BITS
        bias = 1 if kind.name == "uniform" else 0
        limit = count if count is not None else (n - start) // width
        if count is None and (n - start) % width:
            raise MalformedStreamError("trailing partial fixed-width codeword", start + limit * width)
        for _ in range(limit):
            if pos + width > n:
                raise MalformedStreamError("truncated fixed-width codeword", pos)
            out.append(int(bits[pos:pos + width], 2) + bias)
            pos += width
        return out, pos
    while (count is None and pos < n) or (count is not None and len(out) < count):
        if kind.name == "unary":
            end = bits.find("0", pos)
            if end < 0:
                raise MalformedStreamError("unterminated unary codeword", pos)
            out.append(end - pos + 1)
            pos = end + 1
        else:
            one = bits.find("1", pos)
            if one < 0:
                raise MalformedStreamError("gamma codeword without a leading one", pos)
            nzeros = one - pos
            end = one + nzeros + 1
            if end > n:
                raise MalformedStreamError("truncated gamma codeword", pos)
            out.append(int(bits[one:end], 2))
            pos = end
    return out, pos


@dataclass(frozen=True)
class EncodedNodeList:
    """One node's ids: a fixed 32-bit head plus tail codewords.

    For gapped codes the head is the first id and ``tail_bits`` holds the gaps.
    For fixed-width codes there is no separate head: every id sits in
    ``tail_bits`` at the codec's width and ``first_id`` is informational.
    """

    first_id: int
    tail_bits: str
    count: int

    @property
    def first_id_bits(self) -> str:
        return encode_fixed(self.first_id, FIRST_ID_BITS) if self.count else ""

    def bit_length(self, kind: CodecKind) -> int:
        head = FIRST_ID_BITS if (kind.gapped and self.count) else 0
        return head + len(self.tail_bits)


def _check_ascending(ids: np.ndarray):
    if ids.size and ids[0] < 1:
        raise ValueError("ids must be positive")
    if ids.size > 1 and np.any(np.diff(ids) <= 0):
        raise ValueError("ids must be strictly ascending")


def gap_list(ids) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    return np.diff(ids)


def encode_gapped_list(ids, tail: CodecKind = GAMMA) -> EncodedNodeList:
    """Encode a sorted id list.

    Gapped codecs keep the first id verbatim and code each later id as its
    difference from the previous one.  Fixed-width codecs store every id.
    """
    ids = np.asarray(ids, dtype=np.int64)
    _check_ascending(ids)
    if ids.size == 0:
        return EncodedNodeList(0, "", 0)
    if ids[-1] > 2**32 - 1:
        raise ValueError("ids must fit in 32 bits")
    if tail.gapped:
        return EncodedNodeList(int(ids[0]), encode_stream(np.diff(ids), tail), int(ids.size))
    return EncodedNodeList(int(ids[0]), encode_stream(ids, tail), int(ids.size))


def decode_gapped_list(e: EncodedNodeList, tail: CodecKind = GAMMA) -> np.ndarray:
    if e.count == 0:
        return np.empty(0, dtype=np.int64)
    if tail.gapped:
        gaps, end = decode_stream_at(e.tail_bits, tail, e.count - 1)
        if end != len(e.tail_bits):
            raise MalformedStreamError("trailing bits after last gap", end)
        # one addition per id
        return e.first_id + np.concatenate(([0], np.cumsum(np.asarray(gaps, dtype=np.int64))))
    ids, end = decode_stream_at(e.tail_bits, tail, e.count)
    if end != len(e.tail_bits):
        raise MalformedStreamError("trailing bits after last id", end)
    return np.asarray(ids, dtype=np.int64)


def node_bits(ids, kind: CodecKind) -> int:
    """Exact encoded size of one node without building the bits."""
    n = len(ids)
    if n == 0:
        return 0
    if kind.gapped:
        return FIRST_ID_BITS + int(codeword_lengths(np.diff(np.asarray(ids, dtype=np.int64)), kind).sum())
    return n * (kind.width if kind.name == "uniform" else FIRST_ID_BITS)


def family_bits(family, kind: CodecKind) -> int:
    return sum(node_bits(n, kind) for n in family)


def tail_bits(family, kind: CodecKind = GAMMA) -> int:
    """Bits spent on gaps only (first ids excluded)."""
    return sum(int(codeword_lengths(np.diff(np.asarray(n, dtype=np.int64)), kind).sum()) for n in family if len(n) > 1)


# -- byte layout used inside archive files ---------------------------------

def pack_bits(bits: str) -> bytes:
    """MSB-first packing, zero-padded to the next byte."""
    if not bits:
        return b""
    arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    return np.packbits(arr, bitorder="big").tobytes()


def unpack_bits(data: bytes) -> str:
    if not data:
        return ""
    return _bits_to_str(np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="big"))


def node_list_to_bytes(e: EncodedNodeList, kind: CodecKind) -> bytes:
    if e.count == 0:
        return b""
    head = struct.pack("<I", e.first_id) if kind.gapped else b""
    return head + pack_bits(e.tail_bits)


def node_bytes(ids, kind: CodecKind) -> bytes:
    """Same bytes as ``node_list_to_bytes(encode_gapped_list(ids, kind), kind)``, built without strings."""
    ids = np.asarray(ids, dtype=np.int64)
    _check_ascending(ids)
    if ids.size == 0:
        return b""
    if ids[-1] > 2**32 - 1:
        raise ValueError("ids must fit in 32 bits")
    if kind.gapped:
        bits = encode_stream_bits(np.diff(ids), kind)
        return struct.pack("<I", int(ids[0])) + np.packbits(bits, bitorder="big").tobytes()
    return np.packbits(encode_stream_bits(ids, kind), bitorder="big").tobytes()


def node_list_from_bytes(data: bytes, offset: int, count: int, kind: CodecKind):
    """Parse one node list starting at byte ``offset``; return (list, next offset)."""
    if count == 0:
        return EncodedNodeList(0, "", 0), offset
    if kind.gapped:
        if offset + 4 > len(data):
            raise MalformedStreamError("truncated first id", offset * 8)
        (first,) = struct.unpack_from("<I", data, offset)
        offset += 4
        bits, end = _scan_codewords(data, offset, count - 1, kind)
        return EncodedNodeList(first, bits, count), offset + (end + 7) // 8
    width = kind.width if kind.name == "uniform" else FIRST_ID_BITS
    nbytes = (width * count + 7) // 8
    if offset + nbytes > len(data):
        raise MalformedStreamError("truncated id block", offset * 8)
    bits = unpack_bits(data[offset:offset + nbytes])[: width * count]
    first = int(bits[:width], 2) + (1 if kind.name == "uniform" else 0)
    return EncodedNodeList(first, bits, count), offset + nbytes


def _scan_codewords(data: bytes, offset: int, n: int, kind: CodecKind):
    # Grow the window until n codewords fit; avoids unpacking the whole file.
    if n == 0:
        return "", 0
    window = max(64, n * 4)
    while True:
        chunk = unpack_bits(data[offset:offset + window])
        try:
            _, end = decode_stream_at(chunk, kind, n)
            return chunk[:end], end
        except MalformedStreamError as exc:
            if offset + window >= len(data):
                raise MalformedStreamError(exc.reason, offset * 8 + exc.offset) from None
            window *= 4
