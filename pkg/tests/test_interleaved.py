import itertools
from collections import Counter
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dkcodes.analysis import INFINITY, Constraint, solve_lambda
from dkcodes.bitstream import BitBuffer, random_bits
from dkcodes.container import EncodedContainer
from dkcodes.errors import CorruptContainerError, CorruptStreamError, NotFactorableError, ParameterError
from dkcodes.harness import validate_constraint
from dkcodes.interleaved import (
    InterleavedCode,
    build_codebook,
    derive_biases,
    factorize,
    il_decode,
    il_encode,
    prime_factors,
)
from reference import rll_ok
from strategies import COMPOSITE, bit_lists, interleaved_constraints


def test_prime_factors():
    assert prime_factors(12) == [2, 2, 3]
    assert prime_factors(97) == [97]
    assert prime_factors(64) == [2] * 6


def test_plan_14():
    plan = factorize(Constraint(1, 4))
    assert plan.primes == (2, 2) and plan.strides == (1, 2)
    assert plan.n_transformers == 2


def test_plan_011():
    plan = factorize(Constraint(0, 11))
    assert plan.primes == (2, 2, 3) and plan.strides == (1, 2, 4)
    assert plan.factor_terms(2) == [0, 4, 8]


def test_prime_size_not_factorable():
    with pytest.raises(NotFactorableError):
        factorize(Constraint(1, 3))
    with pytest.raises(ParameterError):
        factorize(Constraint(1, INFINITY))


def _expanded_exponents(plan):
    exps = Counter()
    for combo in itertools.product(*(plan.factor_terms(i) for i in range(len(plan.primes)))):
        exps[plan.constraint.d + 1 + sum(combo)] += 1
    return exps


@pytest.mark.parametrize("d", range(0, 4))
def test_expansion_reproduces_polynomial(d):
    for size in range(4, 65):
        if len(prime_factors(size)) < 2:
            continue
        plan = factorize(Constraint(d, d + size - 1))
        plan.verify()
        assert _expanded_exponents(plan) == Counter(range(d + 1, d + size + 1))
        assert plan.n_transformers < plan.constraint.span or size == 4


def test_fewer_transformers_than_states():
    for size in (6, 8, 12, 16, 36, 64):
        plan = factorize(Constraint(0, size - 1))
        assert plan.n_transformers < size - 1


def test_power_of_two_biases():
    c = Constraint(2, 9)
    lam = solve_lambda(c).lam
    chain = derive_biases(factorize(c), lam)
    assert all(len(b) == 1 for b in chain.biases)
    assert [b[0] for b in chain.biases] == pytest.approx([1 / (1 + lam ** -(2**l)) for l in range(3)], abs=1e-15)


def test_ternary_chain_biases_011():
    c = Constraint(0, 11)
    lam = solve_lambda(c).lam
    chain = derive_biases(factorize(c), lam)
    assert chain.biases[2] == pytest.approx((1 / (1 + lam**-4 + lam**-8), 1 / (1 + lam**-4)), abs=1e-15)


@pytest.mark.parametrize("dk", COMPOSITE)
def test_delay_distribution_is_maxentropic(dk):
    c = Constraint(*dk)
    plan = factorize(c)
    lam = solve_lambda(c).lam
    chain = derive_biases(plan, lam)
    for i, (p, eta) in enumerate(zip(plan.primes, plan.strides)):
        got = chain.delay_distribution(i)
        w = lam ** -(eta * np.arange(p, dtype=float))
        assert got.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(got, w / w.sum(), atol=1e-14)


def test_codebook_binary_factors():
    book = dict(build_codebook(factorize(Constraint(3, 10))).entries())
    assert book["101"] == "0" * 8 + "1"
    assert book["000"] == "0001"
    assert book["111"] == "0" * 10 + "1"


def test_codebook_mixed_radix_011():
    book = dict(build_codebook(factorize(Constraint(0, 11))).entries())
    assert book["000"] == "1"
    assert book["1011"] == "0" * 7 + "1"
    assert book["1111"] == "0" * 11 + "1"
    assert len(book) == 12


def test_codebook_bijective_up_to_64():
    for size in range(4, 65):
        if len(prime_factors(size)) >= 2:
            build_codebook(factorize(Constraint(1, size))).verify()


def test_single_phrase_message():
    cont = il_encode("0", Constraint(1, 4))
    assert il_decode(cont) == BitBuffer("0")


def test_empty_message():
    cont = il_encode("", Constraint(1, 4))
    assert len(cont.payload) == 0
    assert len(il_decode(cont)) == 0


@given(bit_lists, interleaved_constraints())
def test_roundtrip_and_validity(bits, c):
    cont = il_encode(bits, c)
    assert validate_constraint(cont.payload, c).ok
    assert rll_ok(cont.payload.bits, c.d, c.k)
    again = EncodedContainer.from_bytes(cont.to_bytes())
    assert il_decode(again) == BitBuffer(bits)


def test_corrupted_gap_raises_with_phrase_index():
    cont = il_encode(random_bits(4000, 3), Constraint(1, 4))
    bits = cont.payload.bits.copy()
    ones = np.flatnonzero(bits)
    bits[ones[10] + 1] = 1  # gap of zero after the 11th one
    with pytest.raises(CorruptStreamError) as exc:
        il_decode(replace(cont, payload=BitBuffer(bits)))
    assert exc.value.offset == 11


def test_flipped_phrase_choice_detected():
    cont = il_encode(random_bits(4000, 3), Constraint(2, 9))
    bits = cont.payload.bits.copy()
    # move one 1 a position later without breaking the constraint
    ones = np.flatnonzero(bits)
    for a, b in zip(ones[:-1], ones[1:]):
        if b - a - 1 > 2 and b - a - 1 <= 9:
            bits[b], bits[b - 1] = 0, 1
            break
    with pytest.raises((CorruptContainerError, CorruptStreamError)):
        il_decode(replace(cont, payload=BitBuffer(bits)))


def test_header_factor_mismatch():
    cont = il_encode(random_bits(500, 3), Constraint(0, 11))
    bad = replace(cont, header=replace(cont.header, primes=(2, 3, 2)))
    with pytest.raises(CorruptContainerError):
        il_decode(bad)


def test_rate_close_to_capacity_14():
    c = Constraint(1, 4)
    cont = il_encode(random_bits(200_000, 7), c)
    assert 200_000 / len(cont.payload) == pytest.approx(solve_lambda(c).capacity, rel=0.005)
