import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bheto.angular import allowed_k
from bheto.basis import BHETO, NSTF, STF, build_basis_function, build_basis_set
from bheto.integrals import (
    basic_a,
    channel_tables,
    kinetic,
    nuclear,
    overlap,
    slater_rk,
    two_range_w,
)
from bheto.oracle import (
    de_kinetic,
    de_nuclear,
    de_overlap,
    de_quad,
    de_slater_rk,
    quad_kinetic,
    quad_nuclear,
    quad_overlap,
    quad_slater_rk,
    quadrature_oracle,
)

import mpmath as mp


def stf(l, n, z):
    return build_basis_function(STF, l, n - 1, zeta=z)


def bheto(l, p, nu, alpha, z):
    return build_basis_function(BHETO, l, p, nu=nu, alpha=alpha, zeta=z)


@st.composite
def functions(draw, l=None):
    l = draw(st.integers(0, 1)) if l is None else l
    p = draw(st.integers(l, 2))
    zeta = math.exp(draw(st.floats(math.log(0.2), math.log(15.0))))
    nu = draw(st.floats(0.8, 1.1))
    family = draw(st.sampled_from([BHETO, BHETO, BHETO, STF, NSTF]))
    if family == BHETO:
        alpha = min(draw(st.floats(0.5, 2.9)), 2 * l + 2 * nu + 1 - 0.01)
        return build_basis_function(BHETO, l, p, nu=nu, alpha=alpha, zeta=zeta)
    return build_basis_function(family, l, p, nu=nu, zeta=zeta)


def _magnitude(f):
    prims = tuple(replace(pr, coefficient=abs(pr.coefficient)) for pr in f.primitives)
    return replace(f, primitives=prims)


def close(x, y, scale, tol=1e-10):
    # relative error, measured against the integrand magnitude when the value cancels
    return abs(x - y) <= tol * max(abs(y), 1e-3 * scale)


# -- basic_a ----------------------------------------------------------------


def test_basic_a_examples():
    assert basic_a(0, 1) == pytest.approx(1.0, rel=1e-14)
    assert basic_a(2, 2) == pytest.approx(0.25, rel=1e-15)
    assert basic_a(1.5, 1) == pytest.approx(1.3293403881791370, rel=1e-14)


def test_basic_a_domain():
    with pytest.raises(ValueError):
        basic_a(-1.0, 1.0)
    with pytest.raises(ValueError):
        basic_a(1.0, 0.0)


def test_basic_a_no_overflow():
    assert math.isfinite(basic_a(300.0, 400.0))


# -- quadrature oracle self-checks --------------------------------------------


def test_oracle_examples():
    assert quadrature_oracle(lambda r: mp.exp(-2 * r)) == pytest.approx(0.5, rel=1e-14)
    assert quadrature_oracle(lambda r: r**1.5 * mp.exp(-r)) == pytest.approx(1.3293403882, rel=1e-10)
    assert de_quad(lambda x: np.exp(-2 * x), 0.5) == pytest.approx(0.5, rel=1e-14)


def test_oracle_f0_double_integral():
    f = stf(0, 1, 1.0)
    assert quad_slater_rk(f, f, f, f, 0, nested=True) == pytest.approx(0.625, abs=1e-10)
    assert de_slater_rk(f, f, f, f, 0) == pytest.approx(0.625, abs=1e-12)


# -- one-electron examples ----------------------------------------------------


def test_overlap_examples():
    assert overlap(stf(0, 1, 1.7), stf(0, 1, 1.7)) == pytest.approx(1.0, rel=1e-14)
    assert overlap(stf(0, 1, 1.0), stf(0, 1, 2.0)) == pytest.approx((2 * math.sqrt(2) / 3) ** 3, rel=1e-14)
    f = bheto(0, 0, 1.0, 2.0, 1.0)
    assert overlap(f, f) == pytest.approx(quad_overlap(f, f), rel=1e-12)
    assert overlap(f, f) == pytest.approx(0.5, rel=1e-14)


def test_kinetic_examples():
    z = 1.9
    assert kinetic(stf(0, 1, z), stf(0, 1, z)) == pytest.approx(z * z / 2, rel=1e-14)
    f = stf(1, 2, z)
    assert kinetic(f, f) == pytest.approx(quad_kinetic(f, f), rel=1e-12)
    assert kinetic(f, f) == pytest.approx(z * z / 2, rel=1e-14)


def test_nuclear_examples():
    z, Z = 1.3, 3.0
    assert nuclear(stf(0, 1, z), stf(0, 1, z), Z) == pytest.approx(-Z * z, rel=1e-14)
    f = stf(0, 1, Z)
    assert kinetic(f, f) + nuclear(f, f, Z) == pytest.approx(-Z * Z / 2, rel=1e-14)
    g = bheto(0, 0, 0.9, 2.0, 1.0)
    assert nuclear(g, g, 1.0) == pytest.approx(quad_nuclear(g, g, 1.0), rel=1e-12)


def test_one_electron_needs_same_l():
    with pytest.raises(ValueError):
        overlap(stf(0, 1, 1.0), stf(1, 2, 1.0))


@given(functions(), functions())
def test_kinetic_symmetric(f, g):
    if f.l != g.l:
        g = build_basis_function(STF, f.l, max(f.l, 1), zeta=g.zeta)
    assert kinetic(f, g) == kinetic(g, f)


# -- two-electron -------------------------------------------------------------


def test_f0_closed_form():
    for z in (1.0, 1.6875, 3.3):
        f = stf(0, 1, z)
        assert slater_rk(f, f, f, f, 0) == pytest.approx(5 * z / 8, rel=1e-14)


def test_two_range_w_symmetric_exact():
    for a, b1, b, k, b2 in [(2, 2, 2, 0, 2), (2.3, 1.1, 3.7, 1, 9.0), (1.6, 0.4, 2.2, 2, 30.0)]:
        assert two_range_w(a, b1, b, k, b2) == two_range_w(b, b2, a, k, b1)


def test_two_range_w_f0_kernel():
    # u = 2 r e^-r for a normalized 1s(1): F0 = 16 W(2, 2; 2, 0, 2) = 5/8
    assert 16 * two_range_w(2, 2, 2, 0, 2) == pytest.approx(0.625, rel=1e-15)


def test_two_range_w_domain():
    with pytest.raises(ValueError):
        two_range_w(-1.5, 1.0, 0.2, 0, 1.0)


def test_g1_against_quadrature():
    p, s = stf(1, 2, 1.0), stf(0, 1, 1.0)
    assert slater_rk(p, s, p, s, 1) == pytest.approx(quad_slater_rk(p, s, p, s, 1), rel=1e-11)


def test_integer_fast_path_matches_general():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b = int(rng.integers(2, 9)), int(rng.integers(2, 9))
        k = int(rng.integers(0, 3))
        b1, b2 = rng.uniform(0.3, 30.0, size=2)
        fast = two_range_w(a, b1, b, k, b2, fast=True)
        slow = two_range_w(a, b1, b, k, b2, fast=False)
        assert fast == pytest.approx(slow, rel=1e-12)


@given(functions(), functions(), functions(), functions())
def test_rk_permutation_symmetry(fa, fb, fc, fd):
    # summation order differs between the orderings; cancelling primitives set the scale
    r = slater_rk(fa, fb, fc, fd, 0)
    scale = slater_rk(*(_magnitude(f) for f in (fa, fb, fc, fd)), 0)
    assert abs(slater_rk(fb, fa, fc, fd, 0) - r) <= 1e-13 * scale
    assert abs(slater_rk(fa, fb, fd, fc, 0) - r) <= 1e-13 * scale
    assert abs(slater_rk(fc, fd, fa, fb, 0) - r) <= 1e-12 * scale


@given(functions(), functions())
def test_rk_positivity(fa, fb):
    assert slater_rk(fa, fa, fb, fb, 0) > 0.0
    assert slater_rk(fa, fa, fa, fa, 0) > 0.0
    for k in allowed_k(fa.l, fb.l):
        assert slater_rk(fa, fb, fa, fb, k) >= -1e-14


@given(functions(l=0), functions(l=0))
def test_cauchy_schwarz(f, g):
    assert overlap(f, g) ** 2 <= overlap(f, f) * overlap(g, g) * (1 + 1e-12)


# -- oracle agreement (randomized) ---------------------------------------------


@given(functions(), functions())
def test_one_electron_against_oracle(f, g):
    if f.l != g.l:
        g = build_basis_function(STF, f.l, max(f.l, 1), zeta=g.zeta)
    assert close(overlap(f, g), *de_overlap(f, g, with_scale=True))
    assert close(kinetic(f, g), *de_kinetic(f, g, with_scale=True))
    assert close(nuclear(f, g, 2.5), *de_nuclear(f, g, 2.5, with_scale=True))


@given(functions(), functions(), functions(), functions(), st.data())
def test_rk_against_oracle(fa, fb, fc, fd, data):
    # Coulomb ordering R^0(ab; cd) needs a, b and c, d in one channel each
    fb = build_basis_function(STF, fa.l, max(fa.l, 1), zeta=fb.zeta) if fb.l != fa.l else fb
    fd = build_basis_function(STF, fc.l, max(fc.l, 1), zeta=fd.zeta) if fd.l != fc.l else fd
    assert close(slater_rk(fa, fb, fc, fd, 0), *de_slater_rk(fa, fb, fc, fd, 0, with_scale=True))
    k = data.draw(st.sampled_from(allowed_k(fa.l, fc.l)))
    assert close(slater_rk(fa, fc, fb, fd, k), *de_slater_rk(fa, fc, fb, fd, k, with_scale=True))


def test_extreme_exponent_ratio_against_mpmath():
    f, g = bheto(0, 1, 0.95, 2.2, 0.21), bheto(0, 2, 1.05, 1.0, 14.8)
    assert slater_rk(f, f, g, g, 0) == pytest.approx(quad_slater_rk(f, f, g, g, 0), rel=1e-10)
    assert slater_rk(f, g, f, g, 0) == pytest.approx(quad_slater_rk(f, g, f, g, 0), rel=1e-10)


# -- tables -------------------------------------------------------------------


def test_channel_tables_match_scalar_path():
    b = build_basis_set("1122-22", [9.7, 2.06, 7.9, 13.2, 4.67, 2.05], nu=0.998, alpha=2.0)
    t = channel_tables(b, 10.0)
    p = b.channel(1)
    s = b.channel(0)
    np.testing.assert_allclose(t.S[1], [[overlap(x, y) for y in p] for x in p], rtol=1e-14)
    R = t.rk[(0, 0, 1, 1, 0)]
    assert R[0, 3, 1, 0] == pytest.approx(slater_rk(s[0], s[3], p[1], p[0], 0), rel=1e-12)
    G = t.rk[(0, 1, 0, 1, 1)]
    assert G[2, 1, 0, 0] == pytest.approx(slater_rk(s[2], p[1], s[0], p[0], 1), rel=1e-12)
    G10 = t.rk[(1, 0, 1, 0, 1)]
    assert G10[1, 2, 0, 0] == pytest.approx(slater_rk(p[1], s[2], p[0], s[0], 1), rel=1e-12)


def test_channel_tables_invariants():
    b = build_basis_set("1122-22", [9.7, 2.06, 7.9, 13.2, 4.67, 2.05], nu=0.998, alpha=2.0)
    t = channel_tables(b, 10.0)
    for l in (0, 1):
        assert np.all(np.linalg.eigvalsh(t.S[l]) > 0)
        assert np.all(np.linalg.eigvalsh(t.T[l]) > 0)
        assert np.all(np.diag(t.V[l]) < 0)
    R = t.rk[(0, 0, 0, 0, 0)]
    np.testing.assert_allclose(R, R.transpose(1, 0, 2, 3), rtol=1e-13)
    np.testing.assert_allclose(R, R.transpose(2, 3, 0, 1), rtol=1e-12)
    with pytest.raises(ValueError):
        t.S[0][0, 0] = 1.0
    assert channel_tables(b, 10.0) is t
