"""Bit buffers, cursors and MSB-first byte packing.

Bits are stored one per ``uint8`` element. Packing is MSB-first: the first
bit of a buffer lands in the most significant bit of the first byte and the
final partial byte is zero-padded on the right. The bit length always travels
separately from the bytes; it is never inferred from padding.
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np

from .errors import BitstreamUnderflowError, LengthMismatchError, ParameterError

BitsLike = Union["BitBuffer", np.ndarray, Iterable[int], str]


class BitBuffer:
    """Immutable sequence of binary symbols.

    Accepts a numpy array, any iterable of 0/1 integers, or a string of
    ``'0'``/``'1'`` characters (whitespace ignored).
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: BitsLike = ()):
        if isinstance(bits, BitBuffer):
            self._bits = bits._bits
            return
        if isinstance(bits, str):
            arr = np.frombuffer("".join(bits.split()).encode("ascii"), dtype=np.uint8)
            if arr.size and not np.all((arr == 48) | (arr == 49)):
                raise ParameterError("bit strings may contain only '0' and '1'")
            arr = arr - 48
        else:
            arr = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits))
            if arr.ndim != 1:
                arr = arr.reshape(-1)
            if arr.size and not np.all((arr == 0) | (arr == 1)):
                raise ParameterError("bit buffers may contain only 0 and 1")
        arr = np.array(arr, dtype=np.uint8)
        arr.flags.writeable = False
        self._bits = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BitBuffer":
        # trusted constructor for kernel output: no validation, no copy
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        arr.flags.writeable = False
        obj._bits = arr
        return obj

    @property
    def bits(self) -> np.ndarray:
        """Read-only ``uint8`` view of the symbols."""
        return self._bits

    @property
    def length(self) -> int:
        return int(self._bits.size)

    def __len__(self) -> int:
        return int(self._bits.size)

    def __iter__(self):
        return (int(b) for b in self._bits)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return BitBuffer._wrap(self._bits[index])
        return int(self._bits[index])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitBuffer):
            try:
                other = BitBuffer(other)
            except (ParameterError, TypeError, ValueError):
                return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash((self._bits.size, self._bits.tobytes()))

    def __add__(self, other: BitsLike) -> "BitBuffer":
        return BitBuffer._wrap(np.concatenate([self._bits, as_bits(other).bits]))

    def __repr__(self) -> str:
        if len(self) <= 64:
            return f"BitBuffer('{self.to_string()}')"
        return f"BitBuffer(<{len(self)} bits>)"

    def to_string(self) -> str:
        return (self._bits + 48).tobytes().decode("ascii")

    def count_zeros(self) -> int:
        return int(self._bits.size - np.count_nonzero(self._bits))


def as_bits(value: BitsLike) -> BitBuffer:
    return value if isinstance(value, BitBuffer) else BitBuffer(value)


class BitCursor:
    """Sequential reader over a :class:`BitBuffer`.

    Reading past the end raises :class:`BitstreamUnderflowError`; there is no
    silent padding.
    """

    def __init__(self, buffer: BitsLike, position: int = 0):
        self.buffer = as_bits(buffer)
        if not 0 <= position <= len(self.buffer):
            raise ParameterError("cursor position outside buffer")
        self.position = position

    @property
    def remaining(self) -> int:
        return len(self.buffer) - self.position

    def read(self, n: int) -> BitBuffer:
        if n < 0:
            raise ParameterError("cannot read a negative number of bits")
        if n > self.remaining:
            raise BitstreamUnderflowError(
                f"requested {n} bits at position {self.position}, {self.remaining} left"
            )
        out = self.buffer[self.position : self.position + n]
        self.position += n
        return out

    def read_bit(self) -> int:
        if self.position >= len(self.buffer):
            raise BitstreamUnderflowError(f"read past end at position {self.position}")
        bit = self.buffer[self.position]
        self.position += 1
        return bit


def pack(bits: BitsLike) -> tuple[bytes, int]:
    """Pack bits MSB-first; returns ``(bytes, bit_length)``."""
    buf = as_bits(bits)
    return np.packbits(buf.bits, bitorder="big").tobytes(), len(buf)


def unpack(data: bytes, bit_length: int) -> BitBuffer:
    """Inverse of :func:`pack`."""
    if bit_length < 0:
        raise ParameterError("bit length must be non-negative")
    if bit_length > 8 * len(data):
        raise LengthMismatchError(
            f"bit length {bit_length} exceeds the {8 * len(data)} bits available"
        )
    arr = np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=bit_length, bitorder="big")
    return BitBuffer._wrap(arr)


def random_bits(n: int, seed: int | np.random.Generator | None = None) -> BitBuffer:
    """Uniform i.i.d. bits from a seeded numpy generator."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return BitBuffer._wrap(rng.integers(0, 2, size=n, dtype=np.uint8))
