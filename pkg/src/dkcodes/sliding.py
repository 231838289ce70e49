"""SS(j) constrained encoder/decoder; SS(0) is bit stuffing, SS(1) bit flipping.

The encoder parses the biased stream into message words ``0^(k-d)`` and
``0^t 1`` (``t < k-d``) and maps each to a (0, k-d) phrase:

* ``0^(k-d)``                       ->  ``0^(k-d-j) 1``
* ``0^t 1`` with ``k-d-j <= t``     ->  ``0^(t+1) 1``
* ``0^t 1`` with ``t < k-d-j``      ->  ``0^t 1``

and then stuffs ``d`` zeros after every one. When ``k`` is infinite only the
stuffing step runs.

Finite messages are terminated by pushing one extra ``1`` through the encoder
(``flush=True``), so every encoded stream ends in ``1 0^d``; the decoder
drops that bit again.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .analysis import Constraint, SlidingConfig
from .bitstream import BitBuffer, BitsLike, as_bits
from .container import EncodedContainer, SlidingHeader
from .errors import CorruptContainerError, CorruptStreamError, DecodeDivergenceError
from .transformer import QuantizedBias, bias_inverse, bias_transform


@dataclass(frozen=True)
class ConstrainedStream:
    bits: BitBuffer
    constraint: Constraint

    def __len__(self) -> int:
        return len(self.bits)


def _params(cfg: SlidingConfig) -> tuple[int, int, int]:
    c = cfg.constraint
    if not c.finite:
        return c.d, -1, 0
    return c.d, c.span, cfg.j


@njit(cache=True)
def _ss_encode(b, d, span, j, flush):
    n = b.shape[0]
    cap = (n + 1) * (d + 2) + max(span, 0) + 1
    out = np.zeros(cap, dtype=np.uint8)
    o = 0
    t = 0
    total = n + 1 if flush else n
    for idx in range(total):
        x = b[idx] if idx < n else 1
        if span < 0:
            if x == 0:
                o += 1
            else:
                out[o] = 1
                o += 1 + d
            continue
        if x == 0:
            t += 1
            if t == span:
                o += span - j
                out[o] = 1
                o += 1 + d
                t = 0
        else:
            if t >= span - j:
                o += t + 1
            else:
                o += t
            out[o] = 1
            o += 1 + d
            t = 0
    o += t
    return out[:o]


@njit(cache=True)
def _ss_decode(s, d, span, j, flush):
    """Returns ``(bits, error_code, error_offset)``; error_code 0 means success."""
    n = s.shape[0]
    per_phrase = span if span > 0 else 1
    out = np.zeros((n + 1) * per_phrase + 1, dtype=np.uint8)
    o = 0
    g = 0
    i = 0
    while i < n:
        if s[i] == 0:
            g += 1
            if span >= 0 and g > span:
                return out[:o], 1, i
            i += 1
            continue
        if span < 0:
            o += g
            out[o] = 1
            o += 1
        elif g == span - j:
            o += span
        elif g > span - j:
            o += g - 1
            out[o] = 1
            o += 1
        else:
            o += g
            out[o] = 1
            o += 1
        g = 0
        for q in range(1, d + 1):
            if i + q >= n:
                return out[:o], 2, n
            if s[i + q] != 0:
                return out[:o], 3, i + q
        i += 1 + d
    if flush:
        if g:
            return out[:o], 4, n - g
        if o == 0 or out[o - 1] != 1:
            return out[:o], 5, n
        return out[: o - 1], 0, 0
    o += g
    return out[:o], 0, 0


_DECODE_ERRORS = {
    1: "zero run longer than k-d",
    2: "stream ends inside stuffed zeros",
    3: "one found where a stuffed zero was expected",
    4: "trailing zeros after the terminal phrase",
    5: "missing terminal phrase",
}


def ss_encode(b: BitsLike, cfg: SlidingConfig, *, flush: bool = True) -> ConstrainedStream:
    """Encode a biased stream into a (d,k) stream with SS(j).

    With ``flush=False`` no terminal phrase is added and an incomplete final
    message word is emitted as plain zeros.
    """
    d, span, j = _params(cfg)
    bits = np.ascontiguousarray(as_bits(b).bits)
    return ConstrainedStream(BitBuffer._wrap(_ss_encode(bits, d, span, j, flush)), cfg.constraint)


def ss_decode(
    s: ConstrainedStream | BitsLike, cfg: SlidingConfig, *, flush: bool = True
) -> BitBuffer:
    """Exact inverse of :func:`ss_encode` with the same ``flush`` setting."""
    bits = s.bits if isinstance(s, ConstrainedStream) else as_bits(s)
    d, span, j = _params(cfg)
    out, err, offset = _ss_decode(np.ascontiguousarray(bits.bits), d, span, j, flush)
    if err:
        raise CorruptStreamError(_DECODE_ERRORS[int(err)], int(offset))
    return BitBuffer._wrap(out)


def full_encode(u: BitsLike, cfg: SlidingConfig) -> EncodedContainer:
    """Unbiased message -> DT(p) -> SS(j) -> container."""
    u = as_bits(u)
    bias = QuantizedBias.from_float(cfg.p)
    biased = bias_transform(u, bias, None, pad=True)
    stream = ss_encode(biased.bits, cfg)
    j = cfg.j if cfg.constraint.finite else 0
    header = SlidingHeader(j, bias.numerator, len(biased.bits), biased.consumed, biased.tail)
    return EncodedContainer(cfg.constraint, len(u), header, stream.bits)


def full_decode(c: EncodedContainer) -> BitBuffer:
    """Inverse of :func:`full_encode`."""
    h = c.header
    if not isinstance(h, SlidingHeader):
        raise CorruptContainerError("container does not hold a symbol-sliding stream")
    bias = QuantizedBias(h.bias_numerator)
    try:
        cfg = SlidingConfig(c.constraint, h.j, bias.value)
        biased = ss_decode(c.payload, cfg)
        if len(biased) != h.biased_bits:
            raise CorruptContainerError(
                f"payload decodes to {len(biased)} biased bits, header says {h.biased_bits}"
            )
        u = bias_inverse(biased, bias, h.consumed, h.tail)
    except (CorruptStreamError, DecodeDivergenceError, ValueError) as exc:
        raise CorruptContainerError(f"cannot decode payload: {exc}") from exc
    if len(u) < c.message_bits:
        raise CorruptContainerError("payload holds fewer bits than the message length")
    return u[: c.message_bits]
