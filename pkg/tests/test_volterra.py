import csv
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from gvlab.arith import Character, DavenportHeilbronn, FinitelySupported, Liouville
from gvlab.errors import InvalidArgumentError, SingularError
from gvlab.precision import default_bits
from gvlab.volterra import (
    PowerRHS,
    VolterraProblem,
    affine_exact_formula,
    character_closed_form,
    moebius_closed_form,
    multiplicative_closed_form,
    parse_rhs,
    solve,
    summatory_identity_check,
)
from gvlab.weights import Affine, GeneralizedIngham, Ingham, PowerScale


def exact_solve(g, f, N):
    """Forward substitution in rationals: a(n) = (f(n) - sum_{k<n} a(k) g(k/n)) / g(1)."""
    a = []
    g1 = g(1)
    for n in range(1, N + 1):
        row = g.row_exact(n)
        a.append((f(n) - sum(a[k] * row[k] for k in range(n - 1))) / g1)
    return a


def _mpq(x):
    return mpmath.mpf(x.numerator) / x.denominator


def mp_solve(g, beta, N, dps=60):
    with mpmath.workdps(dps):
        a = []
        for n in range(1, N + 1):
            s = mpmath.fsum(a[k - 1] * _mpq(g(Fraction(k, n))) for k in range(1, n))
            a.append(mpmath.power(n, -_mpq(beta)) - s)
        return a


@pytest.mark.parametrize("g", [Ingham(), Affine(Fraction(1, 2), Fraction(1, 2)), PowerScale(2),
                               GeneralizedIngham(Character(4, 1)), GeneralizedIngham(Liouville())])
def test_float_solver_matches_exact_rational_solver(g):
    N = 120
    ref = exact_solve(g, lambda n: Fraction(n), N)
    sol = solve(VolterraProblem(g, PowerRHS(-1), N))
    scale = max(abs(float(x)) for x in ref)
    assert np.max(np.abs(sol.a_float() - np.array([float(x) for x in ref]))) <= 1e-12 * scale


def test_highprec_solver_matches_exact_rational_solver():
    g = GeneralizedIngham(Character(4, 1))
    N = 80
    ref = exact_solve(g, lambda n: Fraction(1), N)
    sol = solve(VolterraProblem(g, PowerRHS(0), N), path="highprec")
    with mpmath.workprec(256):
        assert max(abs(sol.a[i] - mpmath.mpf(ref[i].numerator) / ref[i].denominator) for i in range(N)) < 1e-70


def test_irrational_rhs_against_naive_mp_recurrence():
    g = Ingham()
    N = 150
    ref = mp_solve(g, Fraction(1, 3), N)
    sol = solve(VolterraProblem(g, PowerRHS(Fraction(1, 3)), N), path="highprec")
    assert max(abs(x - y) for x, y in zip(sol.a, ref)) < mpmath.mpf(10) ** -50
    fl = solve(VolterraProblem(g, PowerRHS(1 / 3), N))
    assert np.allclose(fl.a_float(), [float(x) for x in ref], rtol=0, atol=1e-13)


@pytest.mark.parametrize("g", [Ingham(), Affine(1, 2), GeneralizedIngham(DavenportHeilbronn())])
def test_blocked_matches_direct(g):
    N = 3000
    p = VolterraProblem(g, PowerRHS(0.4), N)
    d = solve(p, method="direct").a_float()
    b = solve(p, method="blocked").a_float()
    assert np.max(np.abs(d - b)) <= 1e-12 * max(1.0, np.max(np.abs(d)))


def test_highprec_blocked_matches_direct():
    p = VolterraProblem(Ingham(), PowerRHS(Fraction(1, 2)), 700)
    d = solve(p, path="highprec", method="direct").a
    b = solve(p, path="highprec", method="blocked").a
    assert max(abs(x - y) for x, y in zip(d, b)) < mpmath.mpf(10) ** -60


def test_residual_and_divergence_reported():
    sol = solve(VolterraProblem(Ingham(), PowerRHS(0.5), 400), path="both")
    assert sol.residual_max < 1e-13
    assert sol.divergence is not None and sol.divergence < 1e-13
    assert sol.residual_rows == 400


def test_ingham_beta_zero_is_unit_vector():
    a = solve(VolterraProblem(Ingham(), PowerRHS(0), 10)).a_float()
    assert a.tolist() == [1.0] + [0.0] * 9


def test_closed_form_against_exact_solver_at_rational_point():
    # beta = 0 makes b = mu * D with D = (1, 0, 0, ...), so n a(n) = mu(n) for Ingham
    N = 60
    cf = moebius_closed_form(0, N)
    ref = exact_solve(Ingham(), lambda n: Fraction(1), N)
    assert np.allclose(cf, [float(x) for x in ref], atol=1e-15)


def test_multiplicative_closed_form_reduces_to_character_form():
    chi = Character(4, 1)
    N = 800
    for beta in (0.3, 1):
        a1 = character_closed_form(beta, chi, N)
        a2 = multiplicative_closed_form(beta, chi, N)
        assert np.allclose(a1, a2, rtol=0, atol=1e-15)


def test_closed_form_rejects_beta_above_one():
    with pytest.raises(SingularError):
        moebius_closed_form(1.5, 10)


def test_problem_validation():
    with pytest.raises(InvalidArgumentError):
        VolterraProblem(Ingham(), PowerRHS(0.5), 0)
    with pytest.raises(SingularError):
        VolterraProblem(GeneralizedIngham(FinitelySupported([0, 1])), PowerRHS(0.5), 5)
    with pytest.raises(InvalidArgumentError):
        solve(VolterraProblem(Ingham(), PowerRHS(0.5), 5), path="quad")


def test_underflow_switches_to_highprec():
    sol = solve(VolterraProblem(Ingham(), PowerRHS(400), 50))
    assert sol.forced_highprec and sol.path == "highprec"
    assert sol.a[0] == 1
    with mpmath.workprec(256):
        assert abs(sol.a[1] - (mpmath.mpf(2) ** -400 - 1)) < mpmath.mpf(2) ** -250
    assert isinstance(sol.a[1], mpmath.mpf) and sol.residual_max < 1e-60


def test_parse_rhs():
    assert parse_rhs("n^0.5").beta == Fraction(-1, 2)
    assert parse_rhs(None, "1/3").beta == Fraction(1, 3)
    with pytest.raises(InvalidArgumentError):
        parse_rhs("exp(n)")
    with pytest.raises(InvalidArgumentError):
        parse_rhs(None, None)


def test_csv_round_trip(tmp_path):
    sol = solve(VolterraProblem(GeneralizedIngham(DavenportHeilbronn()), PowerRHS(1 / 3), 300))
    path = tmp_path / "s.csv"
    sol.to_csv(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n", "a_n", "A_n", "n*a_n"]
    a = np.array([float(r[1]) for r in rows[1:]])
    assert np.array_equal(a, sol.a_float())


def test_highprec_csv_keeps_digits(tmp_path):
    sol = solve(VolterraProblem(Ingham(), PowerRHS(Fraction(1, 2)), 20), path="highprec")
    path = tmp_path / "s.csv"
    sol.to_csv(path)
    rows = list(csv.reader(open(path, newline="")))
    with mpmath.workprec(256):
        assert abs(mpmath.mpf(rows[-1][1]) - sol.a[-1]) < mpmath.mpf(10) ** -70


def test_precision_override(monkeypatch):
    monkeypatch.setenv("GVLAB_PRECISION_BITS", "128")
    assert default_bits() == 128
    assert VolterraProblem(Ingham(), PowerRHS(0.5), 3).precision == 128
    monkeypatch.setenv("GVLAB_PRECISION_BITS", "20")
    with pytest.raises(ValueError):
        default_bits()


def test_summatory_identity_small_and_oracle():
    chk = summatory_identity_check(2000)
    assert chk.all_equal
    lam = [0] + Liouville().values(2000)
    for n in (1, 2, 17, 99, 1000, 2000):
        assert sum(lam[k] * (n // k) for k in range(1, n + 1)) == math.isqrt(n) == chk.lhs[n - 1]


def test_affine_formula_matches_solver_small():
    sol = solve(VolterraProblem(Affine(Fraction(1, 2), Fraction(1, 2)), parse_rhs("n^1/2"), 60), path="highprec")
    for n in (2, 3, 10, 60):
        assert abs(affine_exact_formula(n) / sol.A[n - 1] - 1) < mpmath.mpf(10) ** -60


def test_solution_is_linear_in_rhs():
    g = GeneralizedIngham(Character(4, 1))
    base = exact_solve(g, lambda n: Fraction(1, n), 60)
    scaled = exact_solve(g, lambda n: Fraction(7, 3) * Fraction(1, n), 60)
    assert scaled == [Fraction(7, 3) * x for x in base]
    a = solve(VolterraProblem(Ingham(), PowerRHS(0.3), 2000)).a_float()
    b = solve(VolterraProblem(Ingham(), PowerRHS(0.3, scale=2.5), 2000)).a_float()
    assert np.max(np.abs(b - 2.5 * a)) <= 1e-13


def test_residual_reproduces_rhs_at_every_row():
    g = GeneralizedIngham(DavenportHeilbronn())
    N = 300
    sol = solve(VolterraProblem(g, PowerRHS(0.7), N))
    a = sol.a_float()
    for n in range(1, N + 1):
        lhs = np.dot(a[:n], g.row_float(n))
        assert abs(lhs - n ** -0.7) <= 1e-12
