import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gvlab.arith import (
    Character,
    DavenportHeilbronn,
    Explicit,
    FinitelySupported,
    Liouville,
    Moebius,
    One,
    RamanujanTauNormalized,
    Unit,
)
from gvlab.errors import DomainError, PoleProximityError, PrecisionError, TruncationError, UnsupportedError
from gvlab.mellin import (
    AffineClosedForm,
    BHFFactorized,
    ComplexBox,
    NumericalIntegral,
    analytic_index,
    dirichlet_series,
    find_zeros,
    hurwitz_zeta,
    lemma23_consistency,
    mellin_for_weight,
    refine_zero,
    winding_number,
    zeta_complex,
)
from gvlab.weights import Affine, GeneralizedIngham, Ingham, PowerScale


# -- zeta and Hurwitz zeta ------------------------------------------------------

# mpmath's own zeta loses accuracy for |s| below about 1e-6, so the oracle stays clear of 0
envelope = st.tuples(st.floats(-2, 3), st.floats(-200, 200)).filter(
    lambda t: abs(complex(*t) - 1) > 0.05 and abs(complex(*t)) > 1e-6)


@settings(max_examples=150, deadline=None)
@given(envelope)
def test_zeta_matches_mpmath(t):
    s = complex(*t)
    ref = complex(mpmath.zeta(s))
    assert abs(zeta_complex(s) - ref) <= 1e-10 * max(1.0, abs(ref))


@settings(max_examples=100, deadline=None)
@given(envelope, st.floats(0.01, 1.0))
def test_hurwitz_matches_mpmath(t, a):
    s = complex(*t)
    ref = complex(mpmath.zeta(s, a))
    assert abs(hurwitz_zeta(s, a) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_zeta_special_values():
    assert abs(zeta_complex(0) + 0.5) < 1e-13
    assert abs(zeta_complex(2) - math.pi ** 2 / 6) < 1e-13
    assert abs(zeta_complex(-1) + 1 / 12) < 1e-13
    assert abs(zeta_complex(complex(0.5, 14.134725141734695))) < 1e-10
    eps = complex(1e-20, 1e-20)
    near0 = zeta_complex(eps)
    assert near0.real == pytest.approx(-0.5, abs=1e-15)
    assert near0.imag == pytest.approx(-1e-20 * math.log(2 * math.pi) / 2, rel=1e-12)


def test_hurwitz_half_against_series():
    # zeta(2, 1/2) = sum 1/(n + 1/2)^2, summed directly with an integral tail
    M = 200_000
    n = np.arange(M, dtype=float)
    direct = np.sum(1 / (n + 0.5) ** 2) + 1 / (M + 0.5) + 0.5 / (M + 0.5) ** 2
    assert abs(hurwitz_zeta(2, 0.5) - math.pi ** 2 / 2) < 1e-12
    assert abs(hurwitz_zeta(2, 0.5).real - direct) < 1e-9


def test_dh_series_against_partial_sum():
    H = dirichlet_series(DavenportHeilbronn())
    N = 1_000_000
    n = np.arange(1, N + 1)
    u = DavenportHeilbronn().array(N)[1:]
    direct = np.sum(u / n.astype(float) ** 2)
    assert abs(H(2) - direct) < 1e-6


def test_vectorised_evaluation_matches_scalar():
    s = np.array([0.3 + 5j, -1.5 + 100j, 2.5 - 40j])
    vec = zeta_complex(s)
    assert np.allclose(vec, [zeta_complex(complex(x)) for x in s], rtol=1e-14, atol=0)


def test_term_count_doubling_is_self_consistent():
    s = complex(0.5, 150)
    a = zeta_complex(s, n_terms=200)
    b = zeta_complex(s, n_terms=400)
    assert abs(a - b) < 1e-10


def test_high_precision_path():
    s = complex(0.25, 30)
    with mpmath.workdps(40):
        ref = mpmath.zeta(mpmath.mpc(0.25, 30), mpmath.mpf(1 / 3))
        val = hurwitz_zeta(s, 1 / 3, tol=1e-25)
        assert abs(val - ref) < 1e-24


def test_zeta_errors():
    with pytest.raises(PoleProximityError):
        zeta_complex(1)
    with pytest.raises(DomainError):
        zeta_complex(complex(0.5, 250))
    with pytest.raises(PrecisionError):
        zeta_complex(0.5, tol=0)
    with pytest.raises(DomainError):
        hurwitz_zeta(2, 1.5)


# -- Dirichlet series -----------------------------------------------------------


def test_dirichlet_series_strategies():
    s = 3 + 1j
    N = 20000
    n = np.arange(1, N + 1)
    cases = [(Unit(), "unit"), (One(), "zeta"), (Moebius(), "inverse-zeta"), (Liouville(), "liouville"),
             (Character(4, 1), "hurwitz"), (DavenportHeilbronn(), "hurwitz")]
    for u, strategy in cases:
        D = dirichlet_series(u)
        assert D.strategy == strategy and not D.approximate
        direct = np.sum(u.array(N)[1:] * np.exp(-s * np.log(n)))
        assert abs(D(s) - direct) < 1e-7


def test_character_series_is_dirichlet_beta():
    D = dirichlet_series(Character(4, 1))
    assert abs(D(1) - math.pi / 4) < 1e-12
    assert abs(D(complex(0.5, 6)) - complex(mpmath.dirichlet(complex(0.5, 6), [0, 1, 0, -1]))) < 1e-11


def test_finite_and_truncated_series():
    F = dirichlet_series(FinitelySupported([1, 2, -3]))
    z = complex(-0.4, 2)
    assert abs(F(z) - (1 + 2 * 2 ** -z - 3 * 3 ** -z)) < 1e-13
    T = dirichlet_series(RamanujanTauNormalized())
    assert T.approximate
    assert abs(T(3) - T(3)) == 0
    with pytest.raises(UnsupportedError):
        T(0.9)
    with pytest.raises(UnsupportedError):
        dirichlet_series(Explicit([1, 2, 3]))


# -- transforms -----------------------------------------------------------------


def test_affine_closed_form():
    m = AffineClosedForm(0.5, 0.5)
    assert abs(m(-0.5) - 4 / 3) < 1e-15
    assert abs(m(0.5)) < 1e-15
    c0, c1 = 1.0, 2.0
    assert abs(AffineClosedForm(c0, c1)(c0 / (c0 + c1))) < 1e-15


def test_affine_against_quadrature():
    # g*(z) = int_0^1 g(x) x^{-z-1} dx converges for Re z < 0
    c0, c1 = 0.3, 0.7
    z = complex(-0.6, 1.3)
    ref = mpmath.quad(lambda x: (c1 * x + c0) * x ** (-z - 1), [0, 1])
    assert abs(AffineClosedForm(c0, c1)(z) - complex(ref)) < 1e-10
    assert abs(NumericalIntegral(Affine(c0, c1))(z) - complex(ref)) < 1e-10


def test_bhf_unit_is_zeta_ratio():
    m = BHFFactorized(Unit())
    assert abs(m(-1) - math.pi ** 2 / 12) < 1e-13


@pytest.mark.parametrize("z", [-0.5, -1.0, complex(-0.7, 3)])
def test_power_scale_numerical_matches_geometric_form(z):
    lam = 2.0
    m = NumericalIntegral(PowerScale(lam))
    closed = (1 - lam ** (z - 1)) / ((1 - z) * (1 - lam ** z))
    assert abs(m(z) - closed) < 1e-10


def test_ingham_numerical_matches_factorized():
    z = complex(-0.8, 2)
    num = NumericalIntegral(Ingham())(z, tol=1e-8)
    fac = mellin_for_weight(Ingham())(z)
    assert abs(num - fac) < 1e-7


def test_numerical_integral_requires_left_half_plane():
    with pytest.raises(DomainError):
        NumericalIntegral(Ingham())(0.5)


def test_pole_proximity():
    m = AffineClosedForm(0.5, 0.5)
    with pytest.raises(PoleProximityError):
        m(1e-7)
    with pytest.raises(PoleProximityError):
        mellin_for_weight(Ingham())(1 + 1e-8j)


def test_reciprocal_sum_identity_finite_support():
    chk = lemma23_consistency(FinitelySupported([1, 2, -3]), -0.7)
    assert chk.diff < 1e-10 and chk.rigorous_tail


def test_reciprocal_sum_identity_truncation_error():
    with pytest.raises(TruncationError):
        lemma23_consistency(Character(4, 1), -0.5, tol=1e-14, max_pieces=1 << 15)


@pytest.mark.parametrize("u", [Unit(), Character(4, 1), DavenportHeilbronn()])
def test_conjugate_symmetry(u):
    m = mellin_for_weight(GeneralizedIngham(u))
    rng = np.random.default_rng(11)
    pts = rng.uniform(-1, 2, 100) + 1j * rng.uniform(-60, 60, 100)
    pts = pts[(np.abs(pts) > 0.05) & (np.abs(pts - 1) > 0.05)]
    for z in pts:
        a, b = m(complex(z)), m(complex(z).conjugate())
        assert abs(a - b.conjugate()) <= 1e-11 * max(1.0, abs(a))


# -- winding numbers and zeros --------------------------------------------------


def test_winding_number_is_integral():
    w = winding_number(lambda z: z ** 3 - 0.001, ComplexBox(-1, 1, -1, 1))
    assert w.count == 3 and abs(w.raw - 3) < 1e-9
    w0 = winding_number(lambda z: np.exp(z), ComplexBox(-1, 1, -1, 1))
    assert w0.count == 0


def test_box_parse_and_split():
    b = ComplexBox.parse("0,1,-2,3")
    assert (b.re_min, b.re_max, b.im_min, b.im_max) == (0, 1, -2, 3)
    lo, hi = b.split()
    assert lo.im_max == hi.im_min == 0.5


def test_affine_zero_with_automatic_shrink():
    zs = find_zeros(AffineClosedForm(0.5, 0.5), ComplexBox(0, 1, -1, 1))
    assert len(zs) == 1 and abs(zs[0].location - 0.5) < 1e-10
    assert zs[0].winding_certificate == 1


INGHAM_IM = (14.1347, 21.0220, 25.0109)


def test_ingham_zeros_in_strip():
    zs = find_zeros(mellin_for_weight(Ingham()), ComplexBox(0, 1, 0, 30))
    assert len(zs) == 3
    for rec, k, im in zip(zs, (1, 2, 3), INGHAM_IM):
        assert abs(rec.re - 0.5) < 1e-9
        assert abs(rec.im - im) < 1e-4
        # the transform vanishes where zeta(1 - z) does; zeros come in conjugate pairs
        assert abs(rec.im - float(mpmath.zetazero(k).imag)) < 1e-9
        assert rec.factor == "zeta"


def test_ingham_zeros_against_grid_minimum():
    m = mellin_for_weight(Ingham())
    t = np.arange(13.5, 26.0, 1e-3)
    vals = np.abs(m(0.5 + 1j * t))
    mins = [t[i] for i in range(1, len(t) - 1) if vals[i] < vals[i - 1] and vals[i] < vals[i + 1] and vals[i] < 1e-2]
    assert len(mins) == 3
    assert all(abs(a - b) < 1e-3 for a, b in zip(mins, INGHAM_IM))


def test_zero_refinement_is_stable():
    m = mellin_for_weight(Ingham())
    z0 = complex(0.5, float(mpmath.zetazero(1).imag))
    z, res = refine_zero(m, z0 + complex(2e-3, -1e-3))
    assert abs(z - z0) < 1e-9 and res < 1e-10


def test_dh_off_line_zero_pair():
    m = mellin_for_weight(GeneralizedIngham(DavenportHeilbronn()))
    zs = find_zeros(m, ComplexBox(0, 1, 80, 90))
    off = [r for r in zs if abs(r.re - 0.5) > 1e-3]
    assert len(off) == 2
    lo, hi = sorted(off, key=lambda r: r.re)
    assert abs(lo.re + hi.re - 1) < 1e-9 and abs(lo.im - hi.im) < 1e-9
    assert abs(lo.re - 0.19148) < 1e-4 and abs(lo.im - 85.69935) < 1e-4
    assert all(r.factor == "U" for r in off)
    # independent check of U(1 - z) = 0 with mpmath's Dirichlet series
    xi = float(DavenportHeilbronn().array(5)[2])
    with mpmath.workdps(30):
        val = mpmath.dirichlet(1 - mpmath.mpc(lo.location), [0, 1, xi, -xi, -1])
    assert abs(val) < 1e-8


def test_analytic_index_estimates():
    aff = analytic_index(AffineClosedForm(1.0, 3.0), ComplexBox(0, 1, -1, 1))
    assert abs(aff.eta - 0.25) < 1e-10 and aff.box_limited
    ing = analytic_index(mellin_for_weight(Ingham()), ComplexBox(0, 1, -50, 50))
    assert abs(ing.eta - 0.5) < 1e-6 and len(ing.zeros) == 20
    im = [z.im for z in ing.zeros]
    assert im == sorted(im)


def test_every_reported_zero_is_stable_and_certified():
    m = mellin_for_weight(GeneralizedIngham(DavenportHeilbronn()))
    tol = 1e-10
    zs = find_zeros(m, ComplexBox(0, 1, 0, 40), tol)
    assert zs
    for rec in zs:
        assert rec.winding_certificate == 1
        z, _ = refine_zero(m, rec.location + complex(1e-3, 1e-3), tol)
        assert abs(z - rec.location) < 10 * tol


def test_winding_margin_is_certified():
    m = mellin_for_weight(Ingham())
    w = winding_number(lambda s: m(s), ComplexBox(0.01, 0.99, 10, 30))
    assert w.count == 3 and w.margin <= 0.25


def test_factorized_transform_is_product_of_factors():
    u = DavenportHeilbronn()
    m = BHFFactorized(u)
    H = dirichlet_series(u)
    for z in (complex(0.3, 7), complex(-1.2, 40), complex(2.5, -3)):
        expected = zeta_complex(1 - z) * H(1 - z) / (1 - z)
        assert abs(m(z) - expected) <= 1e-14 * abs(expected)
