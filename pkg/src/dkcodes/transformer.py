"""Distribution transformer: unbiased bits <-> p-biased bits (Pr{0} = p).

The forward direction runs a binary arithmetic *decoder* over the unbiased
input, so every input bit string is a valid code stream; the inverse runs the
matching *encoder* over the biased symbols. Both use 32-bit low/high
registers with the classic three-way renormalization and a probability
quantized to 16 bits, and they perform identical integer interval updates.

After ``n`` symbols the encoder has reproduced every input bit except the
decoder's 32-bit lookahead window and any still-pending underflow bits.
Those trailing bits (``tail``) are returned by the forward transform and
must be handed back to the inverse, together with the consumed-bit count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .bitstream import BitBuffer, BitsLike, as_bits
from .errors import DecodeDivergenceError, ParameterError, TransformerUnderflowError

STATE_BITS = 32
FULL = 1 << STATE_BITS
MASK = FULL - 1
HALF = FULL >> 1
QUARTER = HALF >> 1
THREE_QUARTERS = HALF + QUARTER

PROB_BITS = 16
PROB_ONE = 1 << PROB_BITS

# state columns
LOW, HIGH, CODE, PEND, STARTED = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class QuantizedBias:
    """Bias ``Pr{0} = numerator / 2**16`` with ``1 <= numerator < 2**16``."""

    numerator: int

    def __post_init__(self):
        if not 1 <= int(self.numerator) < PROB_ONE:
            raise ParameterError(f"numerator must lie in [1, {PROB_ONE - 1}]")
        object.__setattr__(self, "numerator", int(self.numerator))

    @classmethod
    def from_float(cls, p: float) -> "QuantizedBias":
        if not 0.0 < p < 1.0:
            raise ParameterError(f"bias must lie in (0,1), got {p!r}")
        return cls(min(max(int(round(p * PROB_ONE)), 1), PROB_ONE - 1))

    @property
    def denominator(self) -> int:
        return PROB_ONE

    @property
    def value(self) -> float:
        return self.numerator / PROB_ONE


def as_bias(p: float | QuantizedBias) -> QuantizedBias:
    return p if isinstance(p, QuantizedBias) else QuantizedBias.from_float(float(p))


def new_state(n: int = 1) -> np.ndarray:
    st = np.zeros((n, 5), dtype=np.int64)
    st[:, HIGH] = MASK
    return st


@njit(cache=True)
def grow(arr, need):
    if need <= arr.shape[0]:
        return arr
    size = max(need, 2 * arr.shape[0] + 64)
    out = np.empty(size, dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


@njit(cache=True)
def decode_step(st, i, num, src, nsrc, pos, pad, owner, track):
    """Emit one biased symbol from transformer ``i``, pulling input bits at ``pos``.

    Returns ``(symbol, pos, owner)``; symbol is -1 when the input ran out and
    padding is disabled. ``owner[pos]`` records which transformer read each
    input position when ``track`` is set.
    """
    if st[i, STARTED] == 0:
        code = 0
        for _ in range(STATE_BITS):
            if pos >= nsrc and not pad:
                return -1, pos, owner
            bit = src[pos] if pos < nsrc else 0
            if track:
                owner = grow(owner, pos + 1)
                owner[pos] = i
            code = (code << 1) | bit
            pos += 1
        st[i, CODE] = code
        st[i, STARTED] = 1
    low = st[i, LOW]
    high = st[i, HIGH]
    code = st[i, CODE]
    pend = st[i, PEND]
    split = low + (((high - low + 1) * num) >> PROB_BITS)
    if code < split:
        sym = 0
        high = split - 1
    else:
        sym = 1
        low = split
    while True:
        if high < HALF:
            pend = 0
        elif low >= HALF:
            low -= HALF
            high -= HALF
            code -= HALF
            pend = 0
        elif low >= QUARTER and high < THREE_QUARTERS:
            low -= QUARTER
            high -= QUARTER
            code -= QUARTER
            pend += 1
        else:
            break
        if pos >= nsrc and not pad:
            return -1, pos, owner
        bit = src[pos] if pos < nsrc else 0
        if track:
            owner = grow(owner, pos + 1)
            owner[pos] = i
        pos += 1
        low = low << 1
        high = (high << 1) | 1
        code = (code << 1) | bit
    st[i, LOW] = low
    st[i, HIGH] = high
    st[i, CODE] = code
    st[i, PEND] = pend
    return sym, pos, owner


@njit(cache=True)
def encode_step(st, i, num, sym, out, outlen):
    """Feed one biased symbol to inverse transformer ``i``.

    Resolved unbiased bits are appended to row ``i`` of ``out``. Returns the
    number of input positions the forward direction read for this symbol, or
    -1 if row ``i`` of ``out`` is too short.
    """
    room = out.shape[1]
    reads = 0
    if st[i, STARTED] == 0:
        st[i, STARTED] = 1
        reads = STATE_BITS
    low = st[i, LOW]
    high = st[i, HIGH]
    pend = st[i, PEND]
    n = outlen[i]
    split = low + (((high - low + 1) * num) >> PROB_BITS)
    if sym == 0:
        high = split - 1
    else:
        low = split
    while True:
        if (high < HALF or low >= HALF) and n + pend + 1 > room:
            return -1
        if high < HALF:
            out[i, n] = 0
            n += 1
            for _ in range(pend):
                out[i, n] = 1
                n += 1
            pend = 0
        elif low >= HALF:
            out[i, n] = 1
            n += 1
            for _ in range(pend):
                out[i, n] = 0
                n += 1
            pend = 0
            low -= HALF
            high -= HALF
        elif low >= QUARTER and high < THREE_QUARTERS:
            pend += 1
            low -= QUARTER
            high -= QUARTER
        else:
            break
        reads += 1
        low = low << 1
        high = (high << 1) | 1
    st[i, LOW] = low
    st[i, HIGH] = high
    st[i, PEND] = pend
    outlen[i] = n
    return reads


@njit(cache=True)
def _forward(src, nsrc, num, n_out, target, pad):
    st = np.zeros((1, 5), dtype=np.int64)
    st[0, HIGH] = MASK
    owner = np.empty(0, dtype=np.int8)
    cap = n_out if n_out >= 0 else 1024
    out = np.empty(cap, dtype=np.uint8)
    produced = 0
    pos = 0
    while True:
        if n_out >= 0:
            if produced >= n_out:
                break
        elif pos >= target:
            break
        saved = st[0].copy()
        start = pos
        sym, pos, owner = decode_step(st, 0, num, src, nsrc, pos, pad, owner, False)
        if sym < 0:
            if n_out < 0:
                # run-to-end mode: drop the symbol that would read past the input
                return out[:produced], start, saved[PEND], True
            return out[:produced], pos, st[0, PEND], False
        out = grow(out, produced + 1)
        out[produced] = sym
        produced += 1
    return out[:produced], pos, st[0, PEND], True


@njit(cache=True)
def _inverse(sym, num, cap):
    st = np.zeros((1, 5), dtype=np.int64)
    st[0, HIGH] = MASK
    out = np.zeros((1, cap + STATE_BITS + 8), dtype=np.uint8)
    outlen = np.zeros(1, dtype=np.int64)
    reads = 0
    for t in range(sym.shape[0]):
        r = encode_step(st, 0, num, sym[t], out, outlen)
        if r < 0 or outlen[0] > cap:
            return out[0, :outlen[0]], reads, st[0, PEND], False
        reads += r
    return out[0, :outlen[0]], reads, st[0, PEND], True


@dataclass(frozen=True)
class TransformResult:
    """Biased output plus the termination data the inverse needs."""

    bits: BitBuffer
    consumed: int
    tail: BitBuffer

    def __len__(self) -> int:
        return len(self.bits)


def _padded_slice(src: np.ndarray, start: int, stop: int) -> np.ndarray:
    out = np.zeros(stop - start, dtype=np.uint8)
    have = max(0, min(stop, src.size) - start)
    if have:
        out[:have] = src[start : start + have]
    return out


def bias_transform(
    u: BitsLike,
    p: float | QuantizedBias,
    n_out: int | None = None,
    *,
    pad: bool = False,
) -> TransformResult:
    """Map unbiased bits ``u`` to ``n_out`` symbols with ``Pr{0} = p``.

    With ``n_out=None`` the transform runs until every bit of ``u`` has been
    read; without padding the last symbol that would need bits past the end
    is dropped. ``pad=True`` supplies zero bits past the end of ``u`` (they count as
    consumed); otherwise running dry raises :class:`TransformerUnderflowError`.
    About ``h(p)`` input bits are consumed per output symbol, plus a 32-bit
    lookahead.
    """
    bias = as_bias(p)
    src = np.ascontiguousarray(as_bits(u).bits)
    if n_out is None:
        n, target = -1, src.size
    else:
        if n_out < 0:
            raise ParameterError("n_out must be non-negative")
        n, target = int(n_out), 0
    out, consumed, pend, ok = _forward(src, src.size, bias.numerator, n, target, pad)
    if not ok:
        raise TransformerUnderflowError(int(out.size), int(n_out))
    consumed = int(consumed)
    tail_len = STATE_BITS + int(pend) if out.size else 0
    tail = _padded_slice(src, consumed - tail_len, consumed)
    return TransformResult(BitBuffer._wrap(out), consumed, BitBuffer._wrap(tail))


def bias_inverse(
    b: BitsLike | TransformResult,
    p: float | QuantizedBias,
    consumed: int | None = None,
    tail: BitsLike | None = None,
    *,
    verify: bool = True,
) -> BitBuffer:
    """Recover the consumed unbiased prefix from biased symbols.

    ``consumed`` and ``tail`` come from the :class:`TransformResult` (or a
    container header). With ``verify`` the recovered bits are pushed through
    the forward transform again and any disagreement raises
    :class:`DecodeDivergenceError` at the first differing symbol.
    """
    if isinstance(b, TransformResult):
        consumed = b.consumed if consumed is None else consumed
        tail = b.tail if tail is None else tail
        b = b.bits
    bias = as_bias(p)
    sym = np.ascontiguousarray(as_bits(b).bits)
    if consumed is None or tail is None:
        raise ParameterError("consumed count and tail bits are required")
    tail = as_bits(tail)
    if sym.size == 0:
        if consumed != 0 or len(tail):
            raise DecodeDivergenceError(0, "non-empty termination data for empty stream")
        return BitBuffer()
    resolved, reads, pend, ok = _inverse(sym, bias.numerator, int(consumed))
    if not ok or int(reads) != consumed:
        raise DecodeDivergenceError(
            int(sym.size), f"consumed count {consumed} disagrees with symbol stream"
        )
    if len(tail) != STATE_BITS + int(pend) or resolved.size + len(tail) != consumed:
        raise DecodeDivergenceError(int(sym.size), "tail length disagrees with symbol stream")
    recovered = BitBuffer._wrap(np.concatenate([resolved, tail.bits]))
    if verify:
        check, _, _, ok = _forward(recovered.bits, len(recovered), bias.numerator, sym.size, 0, False)
        if not ok:
            raise DecodeDivergenceError(int(check.size))
        diff = np.flatnonzero(check != sym)
        if diff.size:
            raise DecodeDivergenceError(int(diff[0]))
    return recovered


def biased_source(seed: int, p: float | QuantizedBias, n: int) -> BitBuffer:
    """Seeded i.i.d. bits with ``Pr{0} = p`` (not invertible; for simulation)."""
    if n < 0:
        raise ParameterError("n must be non-negative")
    bias = as_bias(p)
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, PROB_ONE, size=n, dtype=np.int64)
    return BitBuffer._wrap((draws >= bias.numerator).astype(np.uint8))
