import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bheto.specfun import (
    gamma_fn,
    gauss2f1_restricted,
    laguerre_expand,
    log_gamma,
    lower_incomplete_gamma,
    upper_incomplete_gamma,
)


@pytest.mark.parametrize(
    "x, expected",
    [(5.0, 24.0), (0.5, 1.7724538509055160), (2.5, 1.3293403881791370), (1.0, 1.0), (10.0, 362880.0)],
)
def test_gamma_examples(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.5, float("nan")])
def test_gamma_domain(x):
    with pytest.raises(ValueError):
        gamma_fn(x)


def test_gamma_overflow_is_signalled():
    with pytest.raises(OverflowError):
        gamma_fn(200.0)
    assert log_gamma(200.0) == pytest.approx(float(mp.loggamma(200)), rel=1e-14)


def test_log_gamma_vectorized():
    x = np.array([0.1, 0.5, 1.0, 7.3, 55.0])
    ref = np.array([float(mp.loggamma(v)) for v in x])
    np.testing.assert_allclose(log_gamma(x), ref, rtol=1e-13, atol=1e-14)


@given(st.floats(0.1, 50.0))
def test_gamma_recurrence(x):
    assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-13)


@given(st.floats(0.05, 150.0))
def test_exp_log_gamma_consistent(x):
    assert math.exp(log_gamma(x)) == pytest.approx(gamma_fn(x), rel=1e-12)


@given(st.floats(0.01, 60.0))
def test_gamma_against_mpmath(x):
    assert gamma_fn(x) == pytest.approx(float(mp.gamma(x)), rel=1e-13)


def test_lower_incomplete_examples():
    assert lower_incomplete_gamma(1.0, 1.0) == pytest.approx(0.6321205588285577, rel=1e-14)
    assert lower_incomplete_gamma(2.5, 0.0) == 0.0
    with mp.workdps(30):
        ref = float(mp.quad(lambda t: t ** mp.mpf(-0.5) * mp.exp(-t), [0, 1, 2.25]))
    assert lower_incomplete_gamma(0.5, 2.25) == pytest.approx(ref, rel=1e-12)


def test_incomplete_domain():
    with pytest.raises(ValueError):
        lower_incomplete_gamma(0.0, 1.0)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(1.0, -1.0)


@given(st.floats(0.1, 30.0), st.floats(0.0, 80.0))
def test_incomplete_gamma_split(a, x):
    with mp.workdps(30):
        upper_q = float(mp.gammainc(a, x, mp.inf))
    assert lower_incomplete_gamma(a, x) + upper_q == pytest.approx(gamma_fn(a), rel=1e-10)
    assert upper_incomplete_gamma(a, x) == pytest.approx(upper_q, rel=1e-10, abs=1e-300)


@given(st.floats(0.1, 20.0), st.floats(0.0, 40.0), st.floats(0.0, 5.0))
def test_lower_incomplete_monotone(a, x, dx):
    assert lower_incomplete_gamma(a, x + dx) >= lower_incomplete_gamma(a, x) * (1 - 1e-14)


def test_lower_incomplete_limit():
    assert lower_incomplete_gamma(3.5, 200.0) == pytest.approx(gamma_fn(3.5), rel=1e-14)


def test_2f1_examples():
    assert gauss2f1_restricted(3.0, 2.0, 0.0) == (1.0, True)
    s, ok = gauss2f1_restricted(1.0, 1.0, 0.5)
    assert ok and s == pytest.approx(2.0, rel=1e-15)
    with mp.workdps(40):
        ref = float(mp.hyp2f1(1, 2.5, 3.5, 0.25))
    s, ok = gauss2f1_restricted(2.5, 3.5, 0.25)
    assert ok and s == pytest.approx(ref, rel=1e-15)


def test_2f1_flags_nonconvergence():
    s, ok = gauss2f1_restricted(5.0, 1.0, 0.999, max_terms=50)
    assert not ok


@given(st.floats(0.5, 40.0), st.floats(0.5, 40.0), st.floats(0.0, 0.9))
def test_2f1_against_mpmath(b, c, z):
    s, ok = gauss2f1_restricted(b, c, z)
    assert ok
    assert s == pytest.approx(float(mp.hyp2f1(1, b, c, z)), rel=1e-13)


def test_laguerre_examples():
    assert laguerre_expand(0, 0.3).coefficients == (1.0,)
    assert laguerre_expand(1, 0.5).coefficients == pytest.approx((1.5, -1.0), rel=1e-15)
    assert laguerre_expand(2, 0.5).coefficients == pytest.approx((1.875, -2.5, 0.5), rel=1e-15)


def test_laguerre_domain():
    with pytest.raises(ValueError):
        laguerre_expand(2, -3.0)
    with pytest.raises(ValueError):
        laguerre_expand(-1, 0.0)


@given(st.integers(0, 6), st.floats(-0.95, 8.0))
def test_laguerre_invariants(q, g):
    L = laguerre_expand(q, g)
    assert len(L.coefficients) == q + 1
    assert L.coefficients[-1] == pytest.approx((-1) ** q / math.factorial(q), rel=1e-13)
    # value at zero is the generalized binomial C(q + g, q)
    c0 = math.exp(log_gamma(q + g + 1) - log_gamma(g + 1) - math.lgamma(q + 1))
    assert L(0.0) == pytest.approx(c0, rel=1e-13)


@given(st.integers(1, 6), st.floats(-0.9, 6.0), st.floats(0.0, 50.0))
def test_laguerre_three_term_recurrence(q, g, x):
    lm, l0, lp = laguerre_expand(q - 1, g), laguerre_expand(q, g), laguerre_expand(q + 1, g)
    lhs = (q + 1) * lp(x)
    rhs = (2 * q + g + 1 - x) * l0(x) - (q + g) * lm(x)

    def mag(L):
        # monomial evaluation loses digits to cancellation; this is its condition scale
        return sum(abs(c) * x**j for j, c in enumerate(L.coefficients))

    scale = (q + 1) * mag(lp) + abs(2 * q + g + 1 - x) * mag(l0) + abs(q + g) * mag(lm)
    assert abs(lhs - rhs) <= 1e-12 * scale


@given(st.integers(0, 5), st.floats(-0.9, 5.0), st.floats(0.0, 50.0))
def test_laguerre_against_mpmath(q, g, x):
    ref = float(mp.laguerre(q, g, x))
    L = laguerre_expand(q, g)
    scale = sum(abs(c) * x**j for j, c in enumerate(L.coefficients))
    assert abs(L(x) - ref) <= 1e-13 * max(scale, 1.0)
