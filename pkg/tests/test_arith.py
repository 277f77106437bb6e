import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gvlab.arith import (
    Character,
    CompletelyMultiplicative,
    DavenportHeilbronn,
    Explicit,
    FactorSieve,
    Liouville,
    Moebius,
    Multiplicative,
    One,
    Periodic,
    RamanujanTauNormalized,
    Unit,
    davenport_heilbronn_xi,
    dirichlet_convolve,
    dirichlet_convolve_array,
    dirichlet_inverse,
    dirichlet_inverse_array,
    parse_sequence,
    ramanujan_tau,
)
from gvlab.errors import InvalidArgumentError, NotInvertibleError, OutOfRangeError


def trial_factor(n):
    out, p = [], 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def naive_mu(n):
    f = trial_factor(n)
    return 0 if any(e > 1 for _, e in f) else (-1) ** len(f)


def naive_lambda(n):
    return (-1) ** sum(e for _, e in trial_factor(n))


def naive_convolve(u, v, N):
    return [sum(u[d - 1] * v[n // d - 1] for d in range(1, n + 1) if n % d == 0) for n in range(1, N + 1)]


def unit_list(N):
    return [1] + [0] * (N - 1)


# -- sieve --------------------------------------------------------------------


def test_sieve_matches_trial_division():
    s = FactorSieve(3000)
    for n in range(2, 3001):
        assert s.factorize(n) == trial_factor(n)
        assert s.is_prime(n) == (trial_factor(n) == [(n, 1)])


def test_moebius_and_liouville_match_trial_division():
    s = FactorSieve(5000)
    mu, lam = s.moebius_array(), s.liouville_array()
    assert all(mu[n] == naive_mu(n) for n in range(1, 5001))
    assert all(lam[n] == naive_lambda(n) for n in range(1, 5001))


def test_sieve_small_values():
    s = FactorSieve(100)
    assert s.spf[4] == 2 and s.spf[9] == 3 and s.spf[30] == 2
    assert s.divisors(12) == [1, 2, 3, 4, 6, 12]
    assert s.big_omega(12) == 3


def test_sieve_is_read_only():
    s = FactorSieve(50)
    with pytest.raises(ValueError):
        s.spf[4] = 3


@pytest.mark.parametrize("bad", [0, 1, -5, 2.5])
def test_sieve_rejects_bad_limits(bad):
    with pytest.raises(InvalidArgumentError):
        FactorSieve(bad)


def test_sieve_range_errors():
    s = FactorSieve(100)
    with pytest.raises(OutOfRangeError):
        s.factorize(101)
    with pytest.raises((OutOfRangeError, InvalidArgumentError)):
        s.factorize(0)


# -- sequences ----------------------------------------------------------------


def test_builtin_values():
    assert Unit().values(4) == [1, 0, 0, 0]
    assert One().values(3) == [1, 1, 1]
    assert Liouville()(12) == -1
    assert Moebius()(12) == 0 and Moebius()(6) == 1
    assert Character(4, 1).values(8) == [1, 0, -1, 0, 1, 0, -1, 0]


def test_characters_are_completely_multiplicative_and_periodic():
    for q in (3, 4, 5, 7, 8, 12):
        for i in range(q):
            try:
                chi = Character(q, i)
            except InvalidArgumentError:
                break
            v = [0] + chi.values(3 * q)
            for m in range(1, 2 * q):
                for n in range(1, 2 * q):
                    if m * n <= 3 * q:
                        assert v[m * n] == pytest.approx(v[m] * v[n], abs=1e-12)
            assert all(v[n] == pytest.approx(v[n + q], abs=1e-12) for n in range(1, 2 * q))
            assert all(v[n] == 0 for n in range(1, 3 * q + 1) if math.gcd(n, q) > 1)


def test_character_orthogonality_mod_5():
    chars = [Character(5, i) for i in range(4)]
    rows = np.array([c.array(5)[1:5] for c in chars])
    gram = rows @ rows.conj().T
    assert np.allclose(gram, 4 * np.eye(4))


def test_davenport_heilbronn_block():
    xi = davenport_heilbronn_xi(200)
    with mpmath.workprec(200):
        ref = (-2 + mpmath.sqrt(10 - 2 * mpmath.sqrt(5))) / (mpmath.sqrt(5) - 1)
        assert abs(xi - ref) < mpmath.mpf(2) ** -190
    assert float(xi) == pytest.approx(0.284079, abs=1e-6)
    dh = DavenportHeilbronn()
    v = dh.values(10)
    assert float(v[0]) == 1 and float(v[3]) == -1 and v[4] == 0
    assert float(v[1]) == pytest.approx(float(xi)) and float(v[2]) == pytest.approx(-float(xi))
    assert [float(x) for x in v[5:]] == [float(x) for x in v[:5]]


def test_explicit_bounds_and_construction_errors():
    e = Explicit([1, 2, 3])
    assert e(3) == 3
    with pytest.raises(OutOfRangeError):
        e(4)
    with pytest.raises(OutOfRangeError):
        CompletelyMultiplicative({2: -1})(3)
    with pytest.raises(InvalidArgumentError):
        Multiplicative({(1, 0): 2})
    with pytest.raises(InvalidArgumentError):
        CompletelyMultiplicative({1: 3})


def test_parse_sequence_ids():
    assert parse_sequence("chi:4,1").values(4) == [1, 0, -1, 0]
    assert isinstance(parse_sequence("davenport_heilbronn"), Periodic)
    with pytest.raises(InvalidArgumentError):
        parse_sequence("nope")


# -- Dirichlet ring -----------------------------------------------------------

ints = st.lists(st.integers(-5, 5), min_size=40, max_size=40)


@settings(max_examples=60, deadline=None)
@given(ints, ints, ints)
def test_ring_axioms(u, v, w):
    N = 40
    uv = dirichlet_convolve(u, v, N).values(N)
    assert uv == naive_convolve(u, v, N)
    assert uv == dirichlet_convolve(v, u, N).values(N)
    assert dirichlet_convolve(uv, w, N).values(N) == dirichlet_convolve(u, dirichlet_convolve(v, w, N), N).values(N)
    vw = [a + b for a, b in zip(v, w)]
    lhs = dirichlet_convolve(u, vw, N).values(N)
    rhs = [a + b for a, b in zip(uv, dirichlet_convolve(u, w, N).values(N))]
    assert lhs == rhs
    assert dirichlet_convolve(u, unit_list(N), N).values(N) == u


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=60, max_size=60).filter(lambda x: x[0] != 0))
def test_inverse_is_two_sided(u):
    N = 60
    inv = dirichlet_inverse(u, N).values(N)
    assert dirichlet_convolve(u, inv, N).values(N) == unit_list(N)
    assert all(isinstance(x, (int, Fraction)) for x in inv)


@pytest.mark.parametrize("u", [Liouville(), Moebius(), One(), Character(4, 1), Character(3, 1)])
def test_inverse_to_1000(u):
    N = 1000
    inv = dirichlet_inverse(u, N)
    assert dirichlet_convolve(u, inv, N).values(N) == unit_list(N)


def test_character_inverse_is_moebius_twist():
    N = 1000
    chi = Character(4, 1)
    mu = Moebius().values(N)
    inv = dirichlet_inverse(chi, N).values(N)
    assert inv == [c * m for c, m in zip(chi.values(N), mu)]


def test_known_convolutions():
    N = 500
    assert dirichlet_inverse(One(), N).values(N) == Moebius().values(N)
    d = dirichlet_convolve(One(), One(), N).values(N)
    assert d[11] == 6 and d[0] == 1
    # lambda * 1 is the indicator of squares
    sq = dirichlet_convolve(Liouville(), One(), N).values(N)
    assert sq == [1 if math.isqrt(n) ** 2 == n else 0 for n in range(1, N + 1)]


def test_inverse_requires_unit_first_term():
    with pytest.raises(NotInvertibleError):
        dirichlet_inverse([0, 1, 1], 3)


def test_array_ring_matches_exact():
    N = 300
    rng = np.random.default_rng(3)
    u = rng.integers(-3, 4, N).tolist()
    u[0] = 1
    v = rng.integers(-3, 4, N).tolist()
    ua = np.array([0.0] + u)
    va = np.array([0.0] + v)
    assert np.array_equal(dirichlet_convolve_array(ua, va)[1:], np.array(naive_convolve(u, v, N), dtype=float))
    inv = dirichlet_inverse(u, N).values(N)
    assert np.allclose(dirichlet_inverse_array(ua)[1:], np.array(inv, dtype=float))


# -- Ramanujan tau ------------------------------------------------------------


def naive_tau(N):
    poly = [0] * (N + 1)
    poly[0] = 1
    for k in range(1, N + 1):
        for _ in range(24):
            for i in range(N, k - 1, -1):
                poly[i] -= poly[i - k]
    return [poly[n - 1] for n in range(1, N + 1)]


def test_tau_matches_direct_product():
    assert ramanujan_tau(120) == naive_tau(120)


def test_tau_known_values():
    assert ramanujan_tau(10) == [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def test_tau_multiplicative_and_hecke():
    t = [0] + ramanujan_tau(2000)
    for m in range(1, 101):
        for n in range(1, 101):
            if math.gcd(m, n) == 1 and m * n <= 2000:
                assert t[m * n] == t[m] * t[n]
    for p in (2, 3, 5, 7):
        for e in range(1, 5):
            if p ** (e + 1) <= 2000:
                assert t[p ** (e + 1)] == t[p] * t[p ** e] - p ** 11 * t[p ** (e - 1)]


def test_deligne_bound():
    t = [0] + ramanujan_tau(100)
    for p in range(2, 101):
        if trial_factor(p) == [(p, 1)]:
            assert t[p] ** 2 <= 4 * p ** 11


def test_normalized_tau():
    u = RamanujanTauNormalized()
    assert u(1) == 1
    assert float(u(2)) == pytest.approx(-24 / 2 ** 5.5, rel=1e-14)
    assert u.multiplicative


# -- further invariants ---------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=80, max_size=80), st.lists(st.integers(-3, 3), min_size=80, max_size=80))
def test_inverse_of_product(u, v):
    N = 80
    u[0] = v[0] = 1
    lhs = dirichlet_inverse(dirichlet_convolve(u, v, N), N).values(N)
    rhs = dirichlet_convolve(dirichlet_inverse(v, N), dirichlet_inverse(u, N), N).values(N)
    assert lhs == rhs


def test_sieve_agrees_with_trial_division_to_1e4():
    s = FactorSieve(10_000)
    mu, lam = s.moebius_array(), s.liouville_array()
    for n in range(1, 10_001):
        assert mu[n] == naive_mu(n) and lam[n] == naive_lambda(n)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_moebius_transform_of_bounded_multiplicative_is_bounded_by_one(seed):
    rng = np.random.default_rng(seed)
    cache = {}

    def f_pp(p, e):
        if e == 0:
            return 1.0
        if (p, e) not in cache:
            cache[(p, e)] = float(rng.uniform(1e-9, 1.0))
        return cache[(p, e)]

    N = 10_000
    f = Multiplicative(f_pp).values(N)
    mu = Moebius().values(N)
    b = dirichlet_convolve(mu, f, N).values(N)
    assert max(abs(x) for x in b) <= 1 + 1e-12


def test_inverse_of_slowly_growing_multiplicative():
    N = 5000
    u = Multiplicative(lambda p, e: 1 if e == 0 else (-1) ** e * (p ** e) ** 0.1 / 2).values(N)
    inv = dirichlet_inverse(u, N).values(N)
    for m in range(1, 80):
        for n in range(1, 80):
            if math.gcd(m, n) == 1 and m * n <= N:
                assert inv[m * n - 1] == pytest.approx(inv[m - 1] * inv[n - 1], rel=1e-9, abs=1e-12)
    ratio = [abs(x) / k ** 0.25 for k, x in enumerate(inv, start=1)]
    assert max(ratio[N // 2:]) <= max(ratio[: N // 2])


def test_xi_satisfies_defining_identity():
    with mpmath.workprec(256):
        xi = davenport_heilbronn_xi(256)
        s5 = mpmath.sqrt(5)
        assert abs(((s5 - 1) * xi + 2) ** 2 - (10 - 2 * s5)) < mpmath.mpf(2) ** -240
    assert abs(float(davenport_heilbronn_xi(53)) - 0.284079) < 5e-7
