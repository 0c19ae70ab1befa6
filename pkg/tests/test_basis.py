import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bheto.basis import (
    BHETO,
    NSTF,
    STF,
    BasisConstraintError,
    RadialPrimitive,
    build_basis_function,
    build_basis_set,
    cusp_diagnostic,
    evaluate_radial,
    format_notation,
    parse_notation,
)
from bheto.integrals import overlap
from bheto.oracle import de_weighted_norm, quad_weighted_norm


# -- notation ---------------------------------------------------------------


def test_parse_minimal():
    assert parse_notation("12").slots == ((0, 0), (0, 1))


def test_parse_double_zeta_ne():
    sk = parse_notation("(1122-22)")
    assert sk.slots == ((0, 0), (0, 0), (0, 1), (0, 1), (1, 1), (1, 1))
    assert sk.l_values == (0, 1)


def test_parse_large_stf():
    sk = parse_notation("(1111122-22223)", STF)
    s = [p for l, p in sk.slots if l == 0]
    pp = [p for l, p in sk.slots if l == 1]
    assert s == [0] * 5 + [1] * 2
    assert pp == [1] * 4 + [2]


@pytest.mark.parametrize("bad", ["1-1", "12--2", "", "1a", "2-", "()"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_notation(bad)


def test_parse_unknown_family():
    with pytest.raises(ValueError):
        parse_notation("12", "GTO")


@given(st.lists(st.text("123", min_size=1, max_size=5), min_size=1, max_size=3))
def test_notation_round_trip(blocks):
    # block l may only hold digits > l
    blocks = ["".join(ch for ch in b if int(ch) > l) or str(l + 1) for l, b in enumerate(blocks)]
    s = "-".join(blocks)
    assert format_notation(parse_notation(s).slots) == s


# -- construction -----------------------------------------------------------


def test_bheto_1s_alpha2_norm():
    f = build_basis_function(BHETO, 0, 0, nu=1.0, alpha=2.0, zeta=1.0)
    assert len(f.primitives) == 1
    assert f.primitives[0].power == 0.0
    assert f.norm == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert quad_weighted_norm(f, f, 2.0) == pytest.approx(1.0, rel=1e-12)


def test_stf_1s_norm():
    f = build_basis_function(STF, 0, 0, zeta=2.0)
    assert f.primitives[0].power == 0.0
    assert f.norm == pytest.approx(5.6568542495, rel=1e-10)


def test_alpha_near_three_degenerates_to_nodeless():
    f = build_basis_function(BHETO, 0, 1, nu=1.0, alpha=2.99999, zeta=1.0)
    c0, c1 = (abs(p.coefficient) for p in f.primitives)
    # (gamma + 1) / (2 zeta) with gamma = 2 nu - alpha
    assert c0 / c1 == pytest.approx(5e-6, rel=1e-6)


def test_nstf_norm():
    f = build_basis_function(NSTF, 0, 0, zeta=1.3, n_star=1.2)
    assert f.norm == pytest.approx(float((2 * mp.mpf(1.3)) ** 1.7 / mp.sqrt(mp.gamma(3.4))), rel=1e-13)
    assert overlap(f, f) == pytest.approx(1.0, rel=1e-13)


def test_bheto_primitive_powers():
    f = build_basis_function(BHETO, 1, 3, nu=0.93, alpha=1.7, zeta=2.0)
    assert [p.power for p in f.primitives] == pytest.approx([1 + 0.93 - 1 + j for j in range(3)])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family=BHETO, l=0, p=0, nu=1.0, alpha=3.5, zeta=1.0),
        dict(family=BHETO, l=0, p=0, nu=1.0, alpha=2.0, zeta=-1.0),
        dict(family=BHETO, l=2, p=1, nu=1.0, alpha=2.0, zeta=1.0),
        dict(family=NSTF, l=1, p=1, zeta=1.0, n_star=0.9),
    ],
)
def test_build_rejects(kwargs):
    with pytest.raises(BasisConstraintError) as exc:
        build_basis_function(**kwargs)
    assert exc.value.constraint


def test_primitive_validation():
    with pytest.raises(BasisConstraintError):
        RadialPrimitive(1.0, -1.0, 1.0)
    with pytest.raises(BasisConstraintError):
        RadialPrimitive(1.0, 0.0, 0.0)


def test_basis_set_constraints():
    with pytest.raises(BasisConstraintError, match="nu >"):
        build_basis_set("12", [1.0, 1.0], nu=0.5, alpha=1.0)
    with pytest.raises(BasisConstraintError, match="nu_max"):
        build_basis_set("12", [1.0, 1.0], nu=1.2, alpha=1.0)
    assert build_basis_set("12", [1.0, 1.0], nu=1.2, alpha=1.0, nu_max=1.3).shared_nu == 1.2
    with pytest.raises(BasisConstraintError, match="alpha"):
        build_basis_set("12", [1.0, 1.0], nu=1.0, alpha=3.0)
    with pytest.raises(ValueError):
        build_basis_set("12", [1.0], nu=1.0, alpha=2.0)


def test_basis_set_channels_and_order():
    b = build_basis_set("1122-22", [1, 2, 3, 4, 5, 6], nu=0.99, alpha=2.0)
    assert [f.zeta for f in b.channel(0)] == [1, 2, 3, 4]
    assert [f.zeta for f in b.channel(1)] == [5, 6]
    assert [f.label for f in b.functions] == ["1s", "1s", "2s", "2s", "2p", "2p"]
    assert hash(b) == hash(build_basis_set("1122-22", [1, 2, 3, 4, 5, 6], nu=0.99, alpha=2.0))


# -- evaluation -------------------------------------------------------------


def test_evaluate_examples():
    f = build_basis_function(STF, 0, 0, zeta=1.0)
    assert evaluate_radial(f, 1.0) == pytest.approx(2 * math.exp(-1), rel=1e-14)
    g = build_basis_function(BHETO, 0, 0, nu=1.0, alpha=2.0, zeta=1.0)
    assert g(0.5) == pytest.approx(math.sqrt(2) * math.exp(-0.5), rel=1e-14)
    with pytest.raises(ValueError):
        evaluate_radial(f, 0.0)


def test_evaluate_against_extended_precision():
    nu, alpha, zeta, r = mp.mpf("0.98"), mp.mpf("2.5"), mp.mpf(1), mp.mpf(2)
    f = build_basis_function(BHETO, 0, 1, nu=0.98, alpha=2.5, zeta=1.0)
    with mp.workdps(40):
        gam = 2 * nu - alpha
        norm = (2 * zeta) ** ((3 - alpha) / 2) * mp.sqrt(1 / mp.gamma(1 + gam + 1))
        x = 2 * zeta * r
        ref = norm * x ** (nu - 1) * mp.exp(-zeta * r) * mp.laguerre(1, gam, x)
    assert f(2.0) == pytest.approx(float(ref), rel=1e-14)


# -- weighted orthonormality and limits -------------------------------------


@pytest.mark.parametrize("l, nu, alpha, zeta", [(0, 0.98, 2.5, 1.3), (0, 1.05, 0.7, 3.0), (1, 0.9, 1.5, 0.8)])
def test_weighted_orthonormality(l, nu, alpha, zeta):
    fs = [build_basis_function(BHETO, l, p, nu=nu, alpha=alpha, zeta=zeta) for p in range(l, l + 3)]
    G = np.array([[quad_weighted_norm(f, g, alpha) for g in fs] for f in fs])
    np.testing.assert_allclose(G, np.eye(3), atol=1e-10)


@given(
    st.integers(0, 1), st.integers(0, 2), st.floats(0.8, 1.1), st.floats(0.5, 2.9), st.floats(0.2, 15.0)
)
def test_weighted_norm_randomized(l, dp, nu, alpha, zeta):
    alpha = min(alpha, 2 * l + 2 * nu + 1 - 0.05)
    f = build_basis_function(BHETO, l, l + dp, nu=nu, alpha=alpha, zeta=zeta)
    assert de_weighted_norm(f, f, alpha) == pytest.approx(1.0, abs=1e-10)


def _shape(f, r):
    # compare shapes: divide out the plain r^2 dr normalization
    return f(r) / math.sqrt(overlap(f, f))


@pytest.mark.parametrize("alpha, tol", [(2.99999, 1e-4), (3.0 - 1e-9, 1e-9)])
def test_alpha_limit_1s_matches_stf(alpha, tol):
    r = np.linspace(0.1, 10.0, 60)
    for zeta in (0.7, 2.3):
        b = build_basis_function(BHETO, 0, 0, nu=1.0, alpha=alpha, zeta=zeta)
        s = build_basis_function(STF, 0, 0, zeta=zeta)
        np.testing.assert_allclose(_shape(b, r), _shape(s, r), rtol=tol)


@pytest.mark.parametrize("alpha, tol", [(2.99999, 1e-4), (3.0 - 1e-9, 1e-8)])
def test_alpha_limit_2s_matches_stf(alpha, tol):
    r = np.linspace(0.1, 10.0, 60)
    b = build_basis_function(BHETO, 0, 1, nu=1.0, alpha=alpha, zeta=1.0)
    s = build_basis_function(STF, 0, 1, zeta=1.0)
    # L_1 is negative near the origin at this alpha, so compare up to sign
    np.testing.assert_allclose(np.abs(_shape(b, r)), _shape(s, r), rtol=tol)


# -- cusp -------------------------------------------------------------------


def test_cusp_single_stf():
    f = build_basis_function(STF, 0, 0, zeta=3.0)
    rep = cusp_diagnostic([f], [1.0], 3.0)
    assert rep.behavior == "finite" and rep.satisfied
    assert rep.ratio == pytest.approx(-3.0)
    assert rep.message == "cusp satisfied"


def test_cusp_divergent_bheto():
    f = build_basis_function(BHETO, 0, 0, nu=0.98, alpha=2.0, zeta=1.0)
    g = build_basis_function(STF, 0, 0, zeta=2.0)
    rep = cusp_diagnostic([g, f], [1.0, 0.2], 4.0)
    assert rep.behavior == "divergent"
    assert "divergent at origin" in rep.message


def test_cusp_vanishing_for_nu_above_one():
    f = build_basis_function(BHETO, 0, 0, nu=1.05, alpha=2.0, zeta=1.0)
    assert cusp_diagnostic([f], [1.0], 2.0).behavior == "vanishing"


def test_cusp_stf_pair_formula():
    f1, f2 = build_basis_function(STF, 0, 0, zeta=1.2), build_basis_function(STF, 0, 0, zeta=4.5)
    c1, c2 = 0.7, 0.4
    N1, N2 = f1.norm, f2.norm
    expected = -(c1 * N1 * 1.2 + c2 * N2 * 4.5) / (c1 * N1 + c2 * N2)
    rep = cusp_diagnostic([f1, f2], [c1, c2], 4.0)
    assert rep.ratio == pytest.approx(expected, rel=1e-14)
    assert not rep.satisfied
