import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dkcodes.analysis import (
    INFINITY,
    Constraint,
    PhraseDistribution,
    SlidingConfig,
    binary_entropy,
    char_poly_eval,
    golden_section_max,
    maxentropic_distribution,
    optimize_rate,
    parse_k,
    rate_comparison_threshold,
    sliding_distribution,
    sliding_rate,
    solve_lambda,
    word_lengths,
)
from dkcodes.errors import DomainError, ParameterError


def roots_oracle(d, k):
    """Largest real root of z^(k+1) - sum_{j=d+1}^{k+1} z^(k+1-j), via numpy's eigenvalue solver."""
    if k is INFINITY:
        # z^(d+1) - z^d - 1
        coeffs = np.zeros(d + 2)
        coeffs[0], coeffs[1], coeffs[-1] = 1, -1, -1
    else:
        coeffs = np.zeros(k + 2)
        coeffs[0] = 1
        coeffs[d + 1 :] -= 1
    r = np.roots(coeffs)
    real = r[np.abs(r.imag) < 1e-9].real
    return real.max()


def rate_by_enumeration(d, k, j, p):
    """h(p) E[input length] / E[output length] summed over message words directly."""
    n = k - d
    words = [(t, p**t * (1 - p)) for t in range(n)] + [(n, p**n)]
    e_in = e_out = 0.0
    for t, prob in words:
        l_in = t + 1 if t < n else n
        if t == n:
            zeros = n - j
        elif t >= n - j:
            zeros = t + 1
        else:
            zeros = t
        e_in += prob * l_in
        e_out += prob * (zeros + 1 + d)
    return binary_entropy(p) * e_in / e_out


def test_constraint_validation():
    with pytest.raises(ParameterError):
        Constraint(2, 2)
    with pytest.raises(ParameterError):
        Constraint(-1, 3)
    assert str(Constraint(1, INFINITY)) == "(1,inf)"
    assert parse_k("inf") is INFINITY and parse_k("7") == 7


@pytest.mark.parametrize("d,k", [(0, 1), (1, 3), (2, 7), (3, 10), (0, 20), (1, INFINITY), (4, INFINITY)])
def test_lambda_matches_polynomial_roots(d, k):
    res = solve_lambda(Constraint(d, k))
    assert res.lam == pytest.approx(roots_oracle(d, k), abs=1e-11)
    assert res.residual <= 1e-12
    assert res.capacity == pytest.approx(math.log2(res.lam), abs=1e-15)


def test_unconstrained_limit_is_one_bit():
    assert solve_lambda(Constraint(0, INFINITY)).capacity == 1.0


def test_golden_ratio():
    assert solve_lambda(Constraint(1, INFINITY)).lam == pytest.approx((1 + 5**0.5) / 2, abs=1e-14)


def test_char_poly_domain():
    with pytest.raises(DomainError):
        char_poly_eval(Constraint(1, 3), 1.0)


def test_maxentropic_sums_to_one_and_orders_by_length():
    dist = maxentropic_distribution(Constraint(2, 7))
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-13)
    # index 0 is the longest phrase, hence the least likely
    assert np.all(np.diff(dist.probs) > 0)
    assert dist.phrase_length(0) == 8


def test_stuffing_distribution_at_half():
    dist = sliding_distribution(SlidingConfig(Constraint(1, 3), 0, 0.5))
    assert np.allclose(dist.probs, [0.25, 0.25, 0.5])


def test_sliding_distribution_matches_definition():
    p, n, j = 0.7, 5, 2
    dist = sliding_distribution(SlidingConfig(Constraint(1, 6), j, p))
    expected = [p ** (n - i - 1) * (1 - p) if i < j else p**n if i == j else p ** (n - i) * (1 - p) for i in range(n + 1)]
    assert np.allclose(dist.probs, expected, atol=1e-15)


def test_phrase_distribution_rejects_bad_vectors():
    c = Constraint(1, 3)
    with pytest.raises(ParameterError):
        PhraseDistribution(c, [0.5, 0.5])
    with pytest.raises(ParameterError):
        PhraseDistribution(c, [0.5, 0.5, 0.1])


def test_config_validation():
    c = Constraint(1, 3)
    with pytest.raises(ParameterError):
        SlidingConfig(c, 3, 0.5)
    with pytest.raises(DomainError):
        SlidingConfig(c, 0, 1.0)


def test_binary_entropy_edges():
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0
    assert np.allclose(binary_entropy(np.array([0.25, 0.75])), 0.8112781244591328)


def test_word_lengths_stuffing():
    # SS(0) on (0,1): message words "1" and "0", outputs "1" and "01"
    l_in, l_out = word_lengths(SlidingConfig(Constraint(0, 1), 0, 0.5))
    assert l_in == pytest.approx(1.0)
    assert l_out == pytest.approx(1.5)


@given(
    st.integers(0, 6),
    st.integers(1, 10),
    st.data(),
    st.floats(0.01, 0.99),
)
def test_rate_formula_matches_enumeration(d, span, data, p):
    j = data.draw(st.integers(0, span))
    cfg = SlidingConfig(Constraint(d, d + span), j, p)
    assert sliding_rate(cfg) == pytest.approx(rate_by_enumeration(d, d + span, j, p), rel=1e-12)


@given(st.integers(0, 5), st.integers(1, 9), st.data(), st.floats(0.01, 0.99))
def test_rate_never_exceeds_capacity(d, span, data, p):
    c = Constraint(d, d + span)
    j = data.draw(st.integers(0, span))
    assert sliding_rate(SlidingConfig(c, j, p)) <= solve_lambda(c).capacity + 1e-12


def test_golden_section_on_parabola():
    x, fx = golden_section_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-8)
    assert fx == pytest.approx(0.0, abs=1e-15)


def test_optimize_reaches_capacity_for_13():
    prof = optimize_rate(Constraint(1, 3))
    assert prof.j_star == 2
    assert prof.p_star == pytest.approx(1 / solve_lambda(Constraint(1, 3)).lam, abs=1e-7)
    assert prof.efficiency == pytest.approx(1.0, abs=1e-12)


def test_optimize_fixed_j_and_errors():
    c = Constraint(2, 5)
    assert optimize_rate(c, 0).j_star == 0
    with pytest.raises(ParameterError):
        optimize_rate(c, 4)
    with pytest.raises(ParameterError):
        optimize_rate(Constraint(1, INFINITY))


def test_threshold_roots():
    assert rate_comparison_threshold(1) == 0.5
    t2 = rate_comparison_threshold(2)
    assert t2 == pytest.approx((5**0.5 - 1) / 2, abs=1e-15)
    for j in range(2, 8):
        t = rate_comparison_threshold(j)
        assert abs(t**j + t - 1) < 1e-15
        assert t == pytest.approx(1 / solve_lambda(Constraint(j - 1, INFINITY)).lam, abs=1e-13)
