"""Discrete Volterra equations sum_{k<=n} a(k) g(k/n) = f(n) and their closed-form oracles.

The system is lower triangular with constant diagonal g(1), so the solver is a
forward recurrence.  Two numeric paths exist: float64 with compensated sums
(numba kernels) and an mpmath path at a configurable number of bits.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import _kernels
from .arith import (
    CoefficientSequence,
    FactorSieve,
    dirichlet_convolve_array,
    dirichlet_inverse,
    dirichlet_inverse_array,
    get_sieve,
)
from .errors import InvalidArgumentError, OutOfRangeError, SingularError, UnsupportedError
from .precision import default_bits
from .weights import Affine, GeneralizedIngham, Ingham, WeightFunction

__all__ = [
    "PowerRHS",
    "parse_rhs",
    "VolterraProblem",
    "VolterraSolution",
    "solve",
    "moebius_closed_form",
    "character_closed_form",
    "multiplicative_closed_form",
    "summatory_identity_check",
    "IdentityCheck",
    "affine_exact_formula",
    "affine_exact_series",
]

FLOAT_EPS = np.finfo(np.float64).eps
# below this many rows the O(N^2) recurrence is used unless a method is forced
DIRECT_LIMIT_FLOAT = 4000
DIRECT_LIMIT_MP = 600


@dataclass(frozen=True)
class PowerRHS:
    """f(n) = scale * n^(-beta)."""

    beta: float | Fraction
    scale: float | Fraction = 1

    @property
    def id(self):
        s = "" if self.scale == 1 else f"{self.scale}*"
        return f"{s}n^{-self.beta}" if self.beta else f"{s}1"

    def float_values(self, N: int) -> np.ndarray:
        n = np.arange(N + 1, dtype=np.float64)
        out = np.zeros(N + 1)
        out[1:] = float(self.scale) * n[1:] ** (-float(self.beta))
        return out

    def mp_values(self, N: int) -> list:
        beta = _mp(self.beta)
        scale = _mp(self.scale)
        return [mpmath.mpf(0)] + [scale * mpmath.power(n, -beta) for n in range(1, N + 1)]

    def underflows(self, N: int) -> bool:
        # n^-beta below the float64 normal range for the largest n
        if float(self.beta) <= 0:
            return False
        return float(self.beta) * math.log(N) > 700 or float(self.scale) * N ** (-float(self.beta)) == 0


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def parse_rhs(text: str | None, beta=None) -> PowerRHS:
    """``"n^0.5"`` means f(n) = n^0.5, i.e. beta = -0.5; otherwise use ``beta``."""
    if text:
        s = text.replace(" ", "")
        if not s.startswith("n^"):
            raise InvalidArgumentError("rhs must look like n^<exponent>")
        return PowerRHS(-Fraction(s[2:]))
    if beta is None:
        raise InvalidArgumentError("need --beta or --rhs")
    return PowerRHS(Fraction(beta) if isinstance(beta, str) else beta)


@dataclass
class VolterraProblem:
    weight: WeightFunction
    rhs: PowerRHS
    N: int
    precision: int = field(default_factory=default_bits)

    def __post_init__(self):
        if not isinstance(self.rhs, PowerRHS):
            self.rhs = PowerRHS(self.rhs)
        if self.N < 1:
            raise InvalidArgumentError("horizon N must be >= 1")
        if self.weight.at_one() == 0:
            raise SingularError("g(1) = 0: the recurrence cannot be solved for a(n)")

    @property
    def beta(self):
        return self.rhs.beta


@dataclass
class VolterraSolution:
    problem: VolterraProblem
    a: np.ndarray | list  # a(1..N); float64 array or list of mpf
    A: np.ndarray | list
    path: str
    method: str
    residual_max: float
    residual_rows: int
    divergence: float | None = None
    forced_highprec: bool = False
    seconds: float = 0.0

    @property
    def N(self):
        return self.problem.N

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, self.N + 1)

    def a_float(self) -> np.ndarray:
        if isinstance(self.a, np.ndarray):
            return self.a
        return np.array([complex(x) if isinstance(x, mpmath.mpc) else float(x) for x in self.a])

    def A_float(self) -> np.ndarray:
        if isinstance(self.A, np.ndarray):
            return self.A
        return np.array([complex(x) if isinstance(x, mpmath.mpc) else float(x) for x in self.A])

    def na(self) -> np.ndarray:
        return self.n * self.a_float()

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            self.to_csv_stream(fh)

    def to_csv_stream(self, fh) -> None:
        fmt = _formatter(self.path, self.problem.precision)
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["n", "a_n", "A_n", "n*a_n"])
        for i in range(self.N):
            n = i + 1
            wr.writerow([n, fmt(self.a[i]), fmt(self.A[i]), fmt(n * self.a[i])])

    def run_record(self) -> dict:
        return {
            "problem": {
                "weight": self.problem.weight.id,
                "rhs": self.problem.rhs.id,
                "beta": str(self.problem.beta),
                "N": self.N,
                "precision_bits": self.problem.precision,
            },
            "path": self.path,
            "method": self.method,
            "forced_highprec": self.forced_highprec,
            "residual_max": self.residual_max,
            "residual_rows_checked": self.residual_rows,
            "divergence": self.divergence,
            "timing_seconds": self.seconds,
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.run_record(), fh, indent=2, sort_keys=True)


def _formatter(path, bits):
    """Round-trip formatting: repr for floats, enough digits for the working precision otherwise."""
    digits = int(bits * math.log10(2)) + 2

    def fmt(x):
        if isinstance(x, (mpmath.mpf, mpmath.mpc)):
            return mpmath.nstr(x, digits)
        if isinstance(x, (complex, np.complexfloating)):
            return repr(complex(x))
        return repr(float(x))

    return fmt


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


def _supports_blocked(g):
    return isinstance(g, (Ingham, GeneralizedIngham, Affine))


def _solve_float(problem: VolterraProblem, method: str):
    g = problem.weight
    N = problem.N
    f = problem.rhs.float_values(N)
    if isinstance(g, Affine):
        c0, c1 = float(g.c0), float(g.c1)
        kern = _kernels.direct_affine if method == "direct" else _kernels.blocked_affine
        return kern(f, c0, c1)[1:]
    if isinstance(g, (Ingham, GeneralizedIngham)):
        w = g.slope_table(N)
        if np.iscomplexobj(w):
            f = f.astype(np.complex128)
        g1 = w[1]
        kern = _kernels.direct_reciprocal if method == "direct" else _kernels.blocked_reciprocal
        return kern(f, w, g1)[1:]
    # generic BHF: row-by-row with exact rounding of each row sum
    g1 = float(g.at_one())
    a = np.zeros(N)
    for n in range(1, N + 1):
        row = g.row_float(n)
        s = math.fsum(a[: n - 1] * row[: n - 1]) if n > 1 else 0.0
        a[n - 1] = (f[n] - s) / g1
    return a


def _mp_slopes(g, N):
    w = g.slope_values(N)
    return [x if isinstance(x, (int, Fraction)) else mpmath.mpf(x) for x in w]


def _to_mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, complex):
        return mpmath.mpc(x)
    return mpmath.mpmathify(x)


def _solve_mp(problem: VolterraProblem, method: str):
    g = problem.weight
    N = problem.N
    f = problem.rhs.mp_values(N)
    a = [mpmath.mpf(0)] * (N + 1)
    if isinstance(g, Affine):
        c0, c1 = _to_mp(g.c0), _to_mp(g.c1)
        g1 = c0 + c1
        if method == "direct":
            for n in range(1, N + 1):
                row = [c1 * k / n + c0 for k in range(1, n)]
                a[n] = (f[n] - mpmath.fdot(a[1:n], row)) / g1
        else:
            s1 = s0 = mpmath.mpf(0)
            for n in range(1, N + 1):
                a[n] = (f[n] - c1 * s1 / n - c0 * s0) / g1
                s1 += n * a[n]
                s0 += a[n]
        return a[1:]
    if isinstance(g, (Ingham, GeneralizedIngham)):
        w = _mp_slopes(g, N)
        g1 = _to_mp(w[1])
        if method == "direct":
            for n in range(1, N + 1):
                coeffs = [k * w[n // k] for k in range(1, n)]
                a[n] = (f[n] - mpmath.fdot(a[1:n], [_to_mp(c) for c in coeffs]) / n) / g1
        else:
            prefix = [mpmath.mpf(0)] * (N + 1)
            for n in range(1, N + 1):
                s = mpmath.mpf(0)
                k = 1
                while k <= n - 1:
                    q = n // k
                    khi = min(n // q, n - 1)
                    s += w[q] * (prefix[khi] - prefix[k - 1])
                    k = khi + 1
                a[n] = (f[n] - s / n) / g1
                prefix[n] = prefix[n - 1] + n * a[n]
        return a[1:]
    g1 = _to_mp(g.at_one())
    for n in range(1, N + 1):
        row = [_to_mp(v) for v in g.row_exact(n)[: n - 1]]
        a[n] = (f[n] - mpmath.fdot(a[1:n], row)) / g1
    return a[1:]


def _residual_rows(N):
    if N <= 3000:
        return list(range(1, N + 1))
    rows = set(np.unique(np.geomspace(1, N, 200).astype(int)).tolist())
    rows.update(range(max(1, N - 49), N + 1))
    return sorted(rows)


def _row_float(g, n):
    if isinstance(g, (Ingham, GeneralizedIngham)):
        k = np.arange(1, n + 1)
        return (k * g.slope_table(n)[n // k]) / n
    return g.row_float(n)


def _residual_float(problem, a):
    """max_n |sum a(k) g(k/n) - f(n)| / (sum |a(k) g(k/n)| + |f(n)|) over checked rows."""
    g = problem.weight
    f = problem.rhs.float_values(problem.N)
    worst = 0.0
    rows = _residual_rows(problem.N)
    for n in rows:
        terms = a[:n] * _row_float(g, n)
        if np.iscomplexobj(terms):
            s = complex(math.fsum(terms.real), math.fsum(terms.imag))
        else:
            s = math.fsum(terms)
        scale = float(np.sum(np.abs(terms))) + abs(f[n])
        worst = max(worst, abs(s - f[n]) / scale)
    return worst, len(rows)


def _residual_mp(problem, a):
    g = problem.weight
    N = problem.N
    f = problem.rhs.mp_values(N)
    rows = _residual_rows(N) if N <= 600 else _residual_rows(N)[-60:]
    worst = mpmath.mpf(0)
    w = _mp_slopes(g, N) if isinstance(g, (Ingham, GeneralizedIngham)) else None
    for n in rows:
        if w is not None:
            row = [_to_mp(k * w[n // k]) / n for k in range(1, n + 1)]
        else:
            row = [_to_mp(v) for v in g.row_exact(n)]
        terms = [x * y for x, y in zip(a[:n], row)]
        s = mpmath.fsum(terms)
        scale = mpmath.fsum(abs(t) for t in terms) + abs(f[n])
        worst = max(worst, abs(s - f[n]) / scale)
    return float(worst), len(rows)


def solve(problem: VolterraProblem, path: str = "float64", method: str = "auto") -> VolterraSolution:
    """Solve A_g(n) = f(n) for a(1..N).

    ``path``: "float64", "highprec" or "both" (float64 result, high-precision
    cross-check stored as ``divergence``).  ``method``: "direct" (row sums of
    length n), "blocked" (sums over blocks of constant g(k/n)/(k/n)) or "auto".
    """
    if path not in ("float64", "highprec", "both"):
        raise InvalidArgumentError(f"unknown path {path!r}")
    if method not in ("auto", "direct", "blocked"):
        raise InvalidArgumentError(f"unknown method {method!r}")
    g = problem.weight
    if method == "blocked" and not _supports_blocked(g):
        raise UnsupportedError(f"blocked summation not available for {g.id}")
    forced = False
    if path in ("float64", "both") and problem.rhs.underflows(problem.N):
        path, forced = "highprec", True

    def pick(limit):
        if method != "auto":
            return method
        return "blocked" if problem.N > limit and _supports_blocked(g) else "direct"

    t0 = time.perf_counter()
    divergence = None
    if path == "highprec":
        m = pick(DIRECT_LIMIT_MP)
        with mpmath.workprec(problem.precision):
            a = _solve_mp(problem, m)
            A = list(np.cumsum(np.array(a, dtype=object)))
            res, rows = _residual_mp(problem, a)
    else:
        m = pick(DIRECT_LIMIT_FLOAT)
        a = _solve_float(problem, m)
        A = np.cumsum(a)
        res, rows = _residual_float(problem, a)
        if path == "both":
            with mpmath.workprec(problem.precision):
                ahp = _solve_mp(problem, pick(DIRECT_LIMIT_MP))
            ref = np.array([complex(x) if isinstance(x, mpmath.mpc) else float(x) for x in ahp])
            divergence = float(np.max(np.abs(a - ref)) / max(np.max(np.abs(ref)), np.finfo(float).tiny))
            path = "float64"
    sol = VolterraSolution(problem, a, A, path, m, res, rows, divergence, forced, time.perf_counter() - t0)
    return sol


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def _check_beta(beta):
    if beta > 1:
        raise SingularError("closed forms need beta <= 1: (d-1)^(1-beta) is singular at d = 1")


def _increments_float(beta: float, N: int) -> np.ndarray:
    """D(d) = d^(1-beta) - (d-1)^(1-beta), D(1) = 1 (0^(1-beta) taken as 0)."""
    D = np.zeros(N + 1)
    D[1] = 1.0
    if N >= 2 and beta != 1:
        d = np.arange(2, N + 1, dtype=np.float64)
        e = 1.0 - beta
        D[2:] = -(d**e) * np.expm1(e * np.log1p(-1.0 / d))
    return D


def _increments_mp(beta, N: int) -> list:
    e = 1 - _mp(beta)
    D = [mpmath.mpf(0), mpmath.mpf(1)]
    prev = mpmath.mpf(1)
    for d in range(2, N + 1):
        cur = mpmath.power(d, e) if e != 0 else mpmath.mpf(1)
        D.append(cur - prev if e != 0 else mpmath.mpf(0))
        prev = cur
    return D


def _convolve_lists(u: Sequence, v: Sequence, N: int) -> list:
    """Padded-list Dirichlet convolution (slot 0 unused)."""
    out = [0] * (N + 1)
    for d in range(1, N + 1):
        ud = u[d]
        if ud == 0:
            continue
        for k in range(1, N // d + 1):
            vk = v[k]
            if vk != 0:
                out[d * k] += ud * vk
    return out


def _sieve_for(N, sieve):
    if sieve is None:
        return get_sieve(N)
    if N > sieve.limit:
        raise OutOfRangeError(f"N={N} exceeds sieve limit {sieve.limit}")
    return sieve


def _b_values(beta, N, sieve, path):
    mu = sieve.moebius_array()[: N + 1]
    if path == "float64":
        return dirichlet_convolve_array(mu.astype(np.float64), _increments_float(float(beta), N))
    return _convolve_lists([int(x) for x in mu], _increments_mp(beta, N), N)


def _finish_closed(ap, N, path):
    if path == "float64":
        return ap[1:] / np.arange(1, N + 1)
    return [ap[n] / n for n in range(1, N + 1)]


def moebius_closed_form(beta, N: int, sieve: FactorSieve | None = None, path: str = "float64",
                        bits: int | None = None):
    """Ingham-weight coefficients n a(n) = sum_{d|n} mu(n/d) (d^(1-beta) - (d-1)^(1-beta))."""
    _check_beta(beta)
    sieve = _sieve_for(N, sieve)
    if path == "float64":
        return _finish_closed(_b_values(beta, N, sieve, path), N, path)
    with mpmath.workprec(bits or default_bits()):
        return _finish_closed(_b_values(beta, N, sieve, path), N, path)


def character_closed_form(beta, chi: CoefficientSequence, N: int, sieve: FactorSieve | None = None,
                          path: str = "float64", bits: int | None = None):
    """Coefficients for Phi_chi: n a(n) = sum_{d|n} b(d) chi(n/d) mu(n/d)."""
    if not chi.completely_multiplicative:
        raise InvalidArgumentError(f"{chi.id} is not completely multiplicative")
    _check_beta(beta)
    sieve = _sieve_for(N, sieve)
    mu = sieve.moebius_array()[: N + 1]
    if path == "float64":
        b = _b_values(beta, N, sieve, path)
        twist = chi.array(N) * mu
        return _finish_closed(dirichlet_convolve_array(b.astype(twist.dtype), twist), N, path)
    with mpmath.workprec(bits or default_bits()):
        b = _b_values(beta, N, sieve, path)
        cv = chi.values(N)
        twist = [0] + [cv[k - 1] * int(mu[k]) for k in range(1, N + 1)]
        return _finish_closed(_convolve_lists(b, twist, N), N, path)


def multiplicative_closed_form(beta, u: CoefficientSequence, N: int, sieve: FactorSieve | None = None,
                               path: str = "float64", bits: int | None = None):
    """Coefficients for Phi_u, u multiplicative: n a(n) = sum_{d|n} b(n/d) u^-1(d)."""
    if not u.multiplicative:
        raise InvalidArgumentError(f"{u.id} is not multiplicative")
    if u(1) != 1:
        raise InvalidArgumentError("multiplicative sequences must have u(1) = 1")
    _check_beta(beta)
    sieve = _sieve_for(N, sieve)
    if path == "float64":
        b = _b_values(beta, N, sieve, path)
        inv = dirichlet_inverse_array(u.array(N))
        return _finish_closed(dirichlet_convolve_array(b.astype(inv.dtype), inv), N, path)
    with mpmath.workprec(bits or default_bits()):
        b = _b_values(beta, N, sieve, path)
        inv = [0] + dirichlet_inverse(u, N).values(N)
        return _finish_closed(_convolve_lists(b, inv, N), N, path)


# ---------------------------------------------------------------------------
# exact identities
# ---------------------------------------------------------------------------


@dataclass
class IdentityCheck:
    """sum_{k<=n} lambda(k) floor(n/k) against floor(sqrt n) for n = 1..N."""

    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def equal(self) -> np.ndarray:
        return self.lhs == self.rhs

    @property
    def failures(self) -> list[int]:
        return (np.flatnonzero(~self.equal) + 1).tolist()

    @property
    def all_equal(self) -> bool:
        return bool(np.all(self.equal))

    def __len__(self):
        return len(self.lhs)

    def __getitem__(self, i):
        return (i + 1, int(self.lhs[i]), int(self.rhs[i]), bool(self.lhs[i] == self.rhs[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def summatory_identity_check(N: int, sieve: FactorSieve | None = None) -> IdentityCheck:
    """Exact check of sum_{k<=n} lambda(k) floor(n/k) = floor(sqrt n) for every n <= N.

    Uses sum_{k<=n} lambda(k) floor(n/k) = sum_{m<=n} (lambda * 1)(m), with the
    convolution accumulated over multiples in int64.
    """
    sieve = _sieve_for(N, sieve)
    lam = sieve.liouville_array()[: N + 1].astype(np.int64)
    conv = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        conv[d::d] += lam[d]
    lhs = np.cumsum(conv[1:])
    rhs = np.array([math.isqrt(n) for n in range(1, N + 1)], dtype=np.int64)
    return IdentityCheck(lhs, rhs)


def affine_exact_series(N: int, bits: int | None = None) -> list:
    """A(n) for n = 2..N from the Pochhammer formula for g(x) = (x+1)/2, A_g(n) = n^(1/2).

    A(n) = h(n) + r(n) (2 + sum_{k=2}^{n-1} h(k)/r(k)), h(n) = (n^(3/2) - (n-1)^(3/2))/n,
    r(n) = (1/2)_n / n!.  Returns a list whose entry i is A(i + 2).
    """
    if N < 2:
        raise OutOfRangeError("the exact formula starts at n = 2")
    with mpmath.workprec(bits or default_bits()):
        half = mpmath.mpf(1) / 2
        r = mpmath.mpf(1)
        rs = [r]
        for k in range(1, N + 1):
            r = r * (k - half) / k
            rs.append(r)
        three_halves = mpmath.mpf(3) / 2
        out = []
        acc = mpmath.mpf(2)
        prev_pow = mpmath.mpf(1)  # (n-1)^(3/2) at n = 2
        for n in range(2, N + 1):
            cur_pow = mpmath.power(n, three_halves)
            h = (cur_pow - prev_pow) / n
            out.append(h + rs[n] * acc)
            acc += h / rs[n]
            prev_pow = cur_pow
        return out


def affine_exact_formula(n: int, bits: int | None = None):
    if n < 2:
        raise OutOfRangeError("the exact formula starts at n = 2")
    return affine_exact_series(n, bits)[-1]
