"""Self-describing container for encoded streams.

Layout (all integers little-endian)::

    magic  b"DKRL"   version u8   algorithm u8 (0 = sliding, 1 = interleaved)
    d u16   k u16   k_infinite u8
    message_bits u64
    -- sliding --
    j u16   bias_numerator u16   biased_bits u64   consumed u64
    tail_bits u32   tail bytes
    -- interleaved --
    n_factors u8   prime u16 * n_factors
    n_transformers u16   per transformer:
        bias_numerator u16   consumed u64   tail_bits u32   tail bytes
    payload_bits u64   payload bytes

Bit fields are packed MSB-first with their length stored explicitly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Union

from .analysis import INFINITY, Constraint
from .bitstream import BitBuffer, pack, unpack
from .errors import CorruptContainerError, LengthMismatchError

MAGIC = b"DKRL"
VERSION = 1
ALGO_SLIDING = 0
ALGO_INTERLEAVED = 1


@dataclass(frozen=True)
class SlidingHeader:
    j: int
    bias_numerator: int
    biased_bits: int
    consumed: int
    tail: BitBuffer


@dataclass(frozen=True)
class TransformerTermination:
    bias_numerator: int
    consumed: int
    tail: BitBuffer


@dataclass(frozen=True)
class InterleavedHeader:
    primes: tuple[int, ...]
    transformers: tuple[TransformerTermination, ...]

    @property
    def consumed(self) -> int:
        return sum(t.consumed for t in self.transformers)


@dataclass(frozen=True)
class EncodedContainer:
    constraint: Constraint
    message_bits: int
    header: Union[SlidingHeader, InterleavedHeader]
    payload: BitBuffer = field(repr=False)

    @property
    def algorithm(self) -> str:
        return "ss" if isinstance(self.header, SlidingHeader) else "il"

    def to_bytes(self) -> bytes:
        return serialize(self)

    @classmethod
    def from_bytes(cls, data: bytes) -> "EncodedContainer":
        return parse(data)


def _put_bits(out: bytearray, bits: BitBuffer, width: str) -> None:
    data, n = pack(bits)
    out += struct.pack("<" + width, n)
    out += data


def serialize(c: EncodedContainer) -> bytes:
    out = bytearray(MAGIC)
    h = c.header
    algo = ALGO_SLIDING if isinstance(h, SlidingHeader) else ALGO_INTERLEAVED
    k_inf = not c.constraint.finite
    out += struct.pack(
        "<BBHHBQ",
        VERSION,
        algo,
        c.constraint.d,
        0 if k_inf else c.constraint.k,
        int(k_inf),
        c.message_bits,
    )
    if isinstance(h, SlidingHeader):
        out += struct.pack("<HHQQ", h.j, h.bias_numerator, h.biased_bits, h.consumed)
        _put_bits(out, h.tail, "I")
    else:
        out += struct.pack("<B", len(h.primes))
        out += struct.pack(f"<{len(h.primes)}H", *h.primes)
        out += struct.pack("<H", len(h.transformers))
        for t in h.transformers:
            out += struct.pack("<HQ", t.bias_numerator, t.consumed)
            _put_bits(out, t.tail, "I")
    _put_bits(out, c.payload, "Q")
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise CorruptContainerError(f"container truncated at byte {self.pos}")
        vals = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return vals

    def bits(self, width: str) -> BitBuffer:
        (n,) = self.take("<" + width)
        nbytes = (n + 7) // 8
        if self.pos + nbytes > len(self.data):
            raise CorruptContainerError(
                f"bit field of {n} bits runs past end of container at byte {self.pos}"
            )
        try:
            buf = unpack(self.data[self.pos : self.pos + nbytes], n)
        except LengthMismatchError as exc:
            raise CorruptContainerError(str(exc)) from exc
        self.pos += nbytes
        return buf


def parse(data: bytes) -> EncodedContainer:
    if not data.startswith(MAGIC):
        raise CorruptContainerError("bad magic; not an encoded container")
    r = _Reader(data)
    r.pos = len(MAGIC)
    version, algo, d, k, k_inf, message_bits = r.take("<BBHHBQ")
    if version != VERSION:
        raise CorruptContainerError(f"unsupported container version {version}")
    try:
        constraint = Constraint(d, INFINITY if k_inf else k)
    except ValueError as exc:
        raise CorruptContainerError(f"invalid constraint in header: {exc}") from exc
    if algo == ALGO_SLIDING:
        j, num, biased, consumed = r.take("<HHQQ")
        header = SlidingHeader(j, num, biased, consumed, r.bits("I"))
    elif algo == ALGO_INTERLEAVED:
        (n_factors,) = r.take("<B")
        primes = r.take(f"<{n_factors}H")
        (n_dt,) = r.take("<H")
        dts = []
        for _ in range(n_dt):
            num, consumed = r.take("<HQ")
            dts.append(TransformerTermination(num, consumed, r.bits("I")))
        header = InterleavedHeader(tuple(primes), tuple(dts))
    else:
        raise CorruptContainerError(f"unknown algorithm id {algo}")
    payload = r.bits("Q")
    if r.pos != len(data):
        raise CorruptContainerError(f"{len(data) - r.pos} trailing bytes after payload")
    return EncodedContainer(constraint, message_bits, header, payload)


def is_container(data: bytes) -> bool:
    return data.startswith(MAGIC)
