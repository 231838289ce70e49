"""Interleaved multi-transformer construction for composite ``k - d + 1``.

Write ``N = k - d + 1 = P_1 * ... * P_n`` (primes, ascending) and
``eta_0 = 1``, ``eta_i = P_1 * ... * P_i``. Then

    H_{d,k}(z) = z^-(d+1) * prod_i (1 + z^-eta_{i-1} + ... + z^-(P_i - 1) eta_{i-1})

so a maxentropic phrase ``0^(d+j) 1`` is a sum of independent per-factor
delays, ``j = sum_i digit_i * eta_{i-1}``. Each factor's digit is drawn by a
chain of ``P_i - 1`` binary transformers: transformer ``t`` emits 0 ("stop
at digit t-1") with the conditional maxentropic probability and is consulted
only if all earlier links emitted 1.

Factors are consulted from the largest stride down, matching an MSB-first
reading of the interleaved word. Transformers pull unbiased bits from the
one shared input on demand, in consult order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit

from .analysis import Constraint, solve_lambda
from .bitstream import BitBuffer, BitsLike, as_bits
from .container import EncodedContainer, InterleavedHeader, TransformerTermination
from .errors import (
    CorruptContainerError,
    CorruptStreamError,
    NotFactorableError,
    ParameterError,
)
from .transformer import (
    HIGH,
    MASK,
    PEND,
    STARTED,
    STATE_BITS,
    QuantizedBias,
    decode_step,
    encode_step,
    grow,
)


def prime_factors(n: int) -> list[int]:
    """Prime factors of ``n`` with multiplicity, ascending (trial division)."""
    if n < 2:
        raise ParameterError("need n >= 2")
    out, f = [], 2
    while f * f <= n:
        while n % f == 0:
            out.append(f)
            n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _expand(plan: "FactorizationPlan") -> np.ndarray:
    """Coefficients of ``z^-(d+1) * prod F_i`` indexed by delay exponent."""
    poly = np.zeros(plan.constraint.d + 2, dtype=np.int64)
    poly[plan.leading_delay] = 1
    for p, eta in zip(plan.primes, plan.strides):
        factor = np.zeros((p - 1) * eta + 1, dtype=np.int64)
        factor[::eta] = 1
        poly = np.convolve(poly, factor)
    return poly


@dataclass(frozen=True)
class FactorizationPlan:
    constraint: Constraint
    primes: tuple[int, ...]
    strides: tuple[int, ...]

    @property
    def leading_delay(self) -> int:
        return self.constraint.d + 1

    @property
    def binary_delay(self) -> int | None:
        """Exponent ``d - m + 1`` of the power-of-two factorization, or None.

        Bookkeeping only; it may be negative and is never emitted as a delay.
        """
        if set(self.primes) != {2}:
            return None
        return self.constraint.d - len(self.primes) + 1

    @property
    def size(self) -> int:
        return self.constraint.span + 1

    @property
    def n_transformers(self) -> int:
        return sum(p - 1 for p in self.primes)

    def factor_terms(self, i: int) -> list[int]:
        """Exponents of ``z^-1`` present in factor ``i``."""
        return [t * self.strides[i] for t in range(self.primes[i])]

    def verify(self) -> None:
        poly = _expand(self)
        c = self.constraint
        expected = np.zeros(c.k + 2, dtype=np.int64)
        expected[c.d + 1 :] = 1
        if not np.array_equal(poly, expected):
            raise AssertionError(f"factorization of {c} does not expand to its polynomial")

    def describe(self) -> str:
        terms = []
        for p, eta in zip(self.primes, self.strides):
            terms.append("(" + " + ".join(["1"] + [f"z^-{t * eta}" for t in range(1, p)]) + ")")
        return f"z^-{self.leading_delay} " + "".join(terms)


def factorize(c: Constraint) -> FactorizationPlan:
    """Factor ``H_{d,k}`` according to the prime factorization of ``k - d + 1``."""
    if not c.finite:
        raise ParameterError("interleaved construction needs finite k")
    primes = prime_factors(c.span + 1)
    if len(primes) < 2:
        raise NotFactorableError(f"k-d+1 = {c.span + 1} is prime; {c} has no interleaved plan")
    strides = [1]
    for p in primes[:-1]:
        strides.append(strides[-1] * p)
    plan = FactorizationPlan(c, tuple(primes), tuple(strides))
    plan.verify()
    return plan


@dataclass(frozen=True)
class DtChain:
    """Per-factor chains of transformer biases (``Pr{0}`` = stop)."""

    plan: FactorizationPlan
    biases: tuple[tuple[float, ...], ...]

    @cached_property
    def quantized(self) -> tuple[tuple[QuantizedBias, ...], ...]:
        return tuple(tuple(QuantizedBias.from_float(b) for b in chain) for chain in self.biases)

    def flat(self) -> list[QuantizedBias]:
        return [q for chain in self.quantized for q in chain]

    def delay_distribution(self, i: int, quantized: bool = False) -> np.ndarray:
        """Probability of each digit ``0..P_i-1`` induced by chain ``i``."""
        chain = [q.value for q in self.quantized[i]] if quantized else self.biases[i]
        probs = np.empty(len(chain) + 1)
        go_on = 1.0
        for t, b in enumerate(chain):
            probs[t] = go_on * b
            go_on *= 1.0 - b
        probs[-1] = go_on
        return probs


def derive_biases(plan: FactorizationPlan, lam: float | None = None) -> DtChain:
    """Chain biases reproducing the maxentropic per-factor digit distribution.

    Link ``t`` of a factor with arity ``P`` and stride ``eta`` stops with
    probability ``1 / sum_{s=0}^{P-t} lam^(-s*eta)``; for ``P = 2`` that is
    ``1 / (1 + lam^-eta)``.
    """
    if lam is None:
        lam = solve_lambda(plan.constraint).lam
    chains = []
    for p, eta in zip(plan.primes, plan.strides):
        w = lam ** -float(eta)
        chains.append(tuple(1.0 / sum(w ** s for s in range(p - t + 1)) for t in range(1, p)))
    return DtChain(plan, tuple(chains))


@dataclass(frozen=True)
class Codebook:
    plan: FactorizationPlan

    @property
    def consult_order(self) -> list[int]:
        return sorted(range(len(self.plan.primes)), key=lambda i: -self.plan.strides[i])

    def offset(self, digits) -> int:
        """``j = sum digit_i * eta_{i-1}`` with digits listed in plan order."""
        return sum(int(v) * eta for v, eta in zip(digits, self.plan.strides))

    def digits(self, j: int) -> tuple[int, ...]:
        if not 0 <= j < self.plan.size:
            raise ParameterError(f"offset {j} outside 0..{self.plan.size - 1}")
        return tuple((j // eta) % p for p, eta in zip(self.plan.primes, self.plan.strides))

    def word(self, digits) -> str:
        """Interleaved bit word for ``digits`` (largest stride first)."""
        parts = []
        for i in self.consult_order:
            v, p = int(digits[i]), self.plan.primes[i]
            parts.append("1" * v + ("0" if v < p - 1 else ""))
        return "".join(parts)

    def phrase(self, digits) -> str:
        return "0" * (self.plan.constraint.d + self.offset(digits)) + "1"

    def entries(self) -> list[tuple[str, str]]:
        """``(word, phrase)`` pairs ordered by phrase length."""
        return [(self.word(self.digits(j)), self.phrase(self.digits(j))) for j in range(self.plan.size)]

    def verify(self) -> None:
        ranges = [range(p) for p in self.plan.primes]
        seen = sorted(self.offset(ds) for ds in itertools.product(*ranges))
        if seen != list(range(self.plan.size)):
            raise AssertionError("codebook is not a bijection onto the phrase set")
        words = [w for w, _ in self.entries()]
        for a, b in itertools.permutations(words, 2):
            if b.startswith(a):
                raise AssertionError("interleaved words are not prefix-free")


def build_codebook(plan: FactorizationPlan) -> Codebook:
    book = Codebook(plan)
    book.verify()
    return book


def _layout(plan: FactorizationPlan):
    """Per-factor arrays in consult order, plus each factor's first transformer index."""
    first, acc = [], 0
    for p in plan.primes:
        first.append(acc)
        acc += p - 1
    order = Codebook(plan).consult_order
    stride = np.array([plan.strides[i] for i in order], dtype=np.int64)
    arity = np.array([plan.primes[i] for i in order], dtype=np.int64)
    dt0 = np.array([first[i] for i in order], dtype=np.int64)
    return stride, arity, dt0


@njit(cache=True)
def _il_encode(src, nsrc, d, stride, arity, dt0, nums):
    n_dt = nums.shape[0]
    st = np.zeros((n_dt, 5), dtype=np.int64)
    for i in range(n_dt):
        st[i, HIGH] = MASK
    owner = np.empty(nsrc + 64 * n_dt + 64, dtype=np.int8)
    out = np.empty(1024, dtype=np.uint8)
    o = 0
    pos = 0
    while pos < nsrc:
        gap = d
        for f in range(stride.shape[0]):
            v = 0
            for t in range(arity[f] - 1):
                i = dt0[f] + t
                sym, pos, owner = decode_step(st, i, nums[i], src, nsrc, pos, True, owner, True)
                if sym == 0:
                    break
                v += 1
            gap += v * stride[f]
        out = grow(out, o + gap + 1)
        for q in range(gap):
            out[o + q] = 0
        out[o + gap] = 1
        o += gap + 1
    return out[:o], owner[:pos], st[:, PEND].copy(), st[:, STARTED].copy()


@njit(cache=True)
def _il_schedule(s, d, k, stride, arity, dt0, nums, caps):
    """Re-run the encoders over the parsed phrases.

    Returns ``(resolved, resolved_len, pend, schedule, n_sched, err, where)``.
    """
    n_dt = nums.shape[0]
    st = np.zeros((n_dt, 5), dtype=np.int64)
    for i in range(n_dt):
        st[i, HIGH] = MASK
    width = 0
    for i in range(n_dt):
        width = max(width, caps[i])
    resolved = np.zeros((n_dt, width + STATE_BITS + 8), dtype=np.uint8)
    outlen = np.zeros(n_dt, dtype=np.int64)
    sched = np.empty(1024, dtype=np.int8)
    ns = 0
    g = 0
    phrase = 0
    for idx in range(s.shape[0]):
        if s[idx] == 0:
            g += 1
            if g > k:
                return resolved, outlen, st[:, PEND].copy(), sched[:ns], ns, 1, phrase
            continue
        if g < d:
            return resolved, outlen, st[:, PEND].copy(), sched[:ns], ns, 2, phrase
        jv = g - d
        for f in range(stride.shape[0]):
            v = (jv // stride[f]) % arity[f]
            for t in range(arity[f] - 1):
                i = dt0[f] + t
                sym = 1 if t < v else 0
                reads = encode_step(st, i, nums[i], sym, resolved, outlen)
                if reads < 0:
                    return resolved, outlen, st[:, PEND].copy(), sched[:ns], ns, 3, phrase
                sched = grow(sched, ns + reads)
                for q in range(reads):
                    sched[ns + q] = i
                ns += reads
                if sym == 0:
                    break
        g = 0
        phrase += 1
    if g:
        return resolved, outlen, st[:, PEND].copy(), sched[:ns], ns, 4, phrase
    return resolved, outlen, st[:, PEND].copy(), sched[:ns], ns, 0, phrase


@njit(cache=True)
def _il_merge(sched, seqs):
    ptr = np.zeros(seqs.shape[0], dtype=np.int64)
    out = np.empty(sched.shape[0], dtype=np.uint8)
    for pos in range(sched.shape[0]):
        i = sched[pos]
        out[pos] = seqs[i, ptr[i]]
        ptr[i] += 1
    return out


@dataclass(frozen=True)
class InterleavedCode:
    """Plan, bias chains and codebook for one constraint."""

    plan: FactorizationPlan
    chain: DtChain
    codebook: Codebook

    @classmethod
    def for_constraint(cls, c: Constraint) -> "InterleavedCode":
        plan = factorize(c)
        return cls(plan, derive_biases(plan), build_codebook(plan))

    @property
    def numerators(self) -> np.ndarray:
        return np.array([q.numerator for q in self.chain.flat()], dtype=np.int64)


def _encode_with(u: BitBuffer, plan: FactorizationPlan, nums: np.ndarray):
    stride, arity, dt0 = _layout(plan)
    src = np.ascontiguousarray(u.bits)
    return _il_encode(src, src.size, plan.constraint.d, stride, arity, dt0, nums)


def il_encode(u: BitsLike, c: Constraint | InterleavedCode) -> EncodedContainer:
    """Encode unbiased bits into a (d,k) stream with the interleaved construction.

    Encoding continues, with zero padding, until every message bit has been
    read; the container records what the decoder needs to drop the padding.
    """
    code = c if isinstance(c, InterleavedCode) else InterleavedCode.for_constraint(c)
    u = as_bits(u)
    nums = code.numerators
    payload, owner, pend, started = _encode_with(u, code.plan, nums)
    padded = np.zeros(owner.size, dtype=np.uint8)
    padded[: min(len(u), owner.size)] = u.bits[: owner.size]
    terms = []
    for i, num in enumerate(nums):
        mine = padded[owner == i]
        tail_len = STATE_BITS + int(pend[i]) if started[i] else 0
        terms.append(
            TransformerTermination(int(num), int(mine.size), BitBuffer._wrap(mine[mine.size - tail_len :]))
        )
    header = InterleavedHeader(code.plan.primes, tuple(terms))
    return EncodedContainer(code.plan.constraint, len(u), header, BitBuffer._wrap(payload))


def _plan_from_header(c: EncodedContainer) -> FactorizationPlan:
    h = c.header
    try:
        plan = factorize(c.constraint)
    except ValueError as exc:
        raise CorruptContainerError(str(exc)) from exc
    if tuple(h.primes) != plan.primes:
        raise CorruptContainerError("factor list in header disagrees with the constraint")
    if len(h.transformers) != plan.n_transformers:
        raise CorruptContainerError("transformer count disagrees with the factor list")
    return plan


def il_decode(cont: EncodedContainer, *, verify: bool = True) -> BitBuffer:
    """Exact inverse of :func:`il_encode`.

    Gaps outside ``[d, k]`` raise :class:`CorruptStreamError` carrying the
    phrase index; header inconsistencies raise :class:`CorruptContainerError`.
    """
    h = cont.header
    if not isinstance(h, InterleavedHeader):
        raise CorruptContainerError("container does not hold an interleaved stream")
    plan = _plan_from_header(cont)
    c = plan.constraint
    nums = np.array([t.bias_numerator for t in h.transformers], dtype=np.int64)
    caps = np.array([t.consumed for t in h.transformers], dtype=np.int64)
    stride, arity, dt0 = _layout(plan)
    s = np.ascontiguousarray(cont.payload.bits)
    resolved, outlen, pend, sched, ns, err, where = _il_schedule(
        s, c.d, c.k, stride, arity, dt0, nums, caps
    )
    if err == 1:
        raise CorruptStreamError(f"gap longer than k={c.k} in phrase {where}", int(where))
    if err == 2:
        raise CorruptStreamError(f"gap shorter than d={c.d} in phrase {where}", int(where))
    if err == 4:
        raise CorruptStreamError("trailing zeros after the last phrase", int(where))
    if err == 3:
        raise CorruptContainerError("payload needs more input bits than the header records")
    width = int(caps.max()) if caps.size else 0
    seqs = np.zeros((len(nums), max(width, 1)), dtype=np.uint8)
    for i, t in enumerate(h.transformers):
        n_res = int(outlen[i])
        if n_res + len(t.tail) != t.consumed:
            raise CorruptContainerError(f"transformer {i}: consumed count disagrees with payload")
        expect_tail = STATE_BITS + int(pend[i]) if t.consumed else 0
        if len(t.tail) != expect_tail:
            raise CorruptContainerError(f"transformer {i}: tail length disagrees with payload")
        seqs[i, :n_res] = resolved[i, :n_res]
        seqs[i, n_res : t.consumed] = t.tail.bits
    if int(ns) != h.consumed:
        raise CorruptContainerError("total consumed count disagrees with payload")
    recovered = _il_merge(sched, seqs)
    if recovered.size < cont.message_bits or np.any(recovered[cont.message_bits :]):
        raise CorruptContainerError("recovered bits are inconsistent with the message length")
    u = BitBuffer._wrap(recovered[: cont.message_bits])
    if verify:
        again, _, _, _ = _encode_with(u, plan, nums)
        if not np.array_equal(again, s):
            raise CorruptContainerError("re-encoding the recovered message does not match payload")
    return u
