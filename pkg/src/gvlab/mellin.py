"""Little Mellin transforms g*(z) = int_0^1 g(t) t^(-z-1) dt and their zeros.

Continuation machinery covers the envelope -2 <= Re <= 3, |Im| <= 200:
Hurwitz/Riemann zeta by Euler-Maclaurin, Dirichlet series U(s) by kind, and
zero location by argument-principle box subdivision plus secant refinement.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .arith import (
    CoefficientSequence,
    Explicit,
    FinitelySupported,
    Liouville,
    Moebius,
    One,
    Periodic,
    Unit,
)
from .errors import (
    ConvergenceError,
    DomainError,
    InvalidArgumentError,
    PoleProximityError,
    PrecisionError,
    TruncationError,
    UnsupportedError,
)
from .weights import Affine, ExplicitBHF, GeneralizedIngham, Ingham, PowerScale, WeightFunction

log = logging.getLogger(__name__)

__all__ = [
    "ComplexBox",
    "zeta_complex",
    "hurwitz_zeta",
    "DirichletSeries",
    "dirichlet_series",
    "MellinFunction",
    "AffineClosedForm",
    "BHFFactorized",
    "NumericalIntegral",
    "mellin_for_weight",
    "eval_mellin",
    "Lemma23Check",
    "lemma23_consistency",
    "ZeroRecord",
    "find_zeros",
    "winding_number",
    "refine_zero",
    "IndexEstimate",
    "analytic_index",
]

POLE_DISTANCE = 1e-6


# ---------------------------------------------------------------------------
# Euler-Maclaurin zeta
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _bernoulli_even(m: int) -> tuple[Fraction, ...]:
    """B_0, B_2, ..., B_{2m} (exact), via the Akiyama-Tanigawa algorithm."""
    n = 2 * m
    a = [Fraction(0)] * (n + 1)
    out = []
    for i in range(n + 1):
        a[i] = Fraction(1, i + 1)
        for j in range(i, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if i % 2 == 0:
            out.append(a[0])
    return tuple(out)


@lru_cache(maxsize=None)
def _em_coeffs(m: int) -> np.ndarray:
    """B_{2j}/(2j)! for j = 1..m as floats."""
    b = _bernoulli_even(m)
    return np.array([float(b[j] / math.factorial(2 * j)) for j in range(1, m + 1)])


_MAX_EM_TERMS = 80


def _em_cutoff(smax: float, n_terms: int | None) -> int:
    if n_terms is not None:
        return int(n_terms)
    return int((smax + 40.0) / math.pi) + 10


def _hurwitz_float(s: np.ndarray, a: float, tol: float, n_terms: int | None):
    """Vectorized Euler-Maclaurin for zeta(s, a); returns (values, error estimate)."""
    N = _em_cutoff(float(np.max(np.abs(s))) if s.size else 0.0, n_terms)
    total = np.zeros_like(s)
    for k in range(N):
        total += np.exp(-s * math.log(k + a))
    x = N + a
    lx = math.log(x)
    xs = np.exp(-s * lx)  # x^-s
    total += x * xs / (s - 1) + 0.5 * xs
    coeffs = _em_coeffs(_MAX_EM_TERMS)
    poch = s.copy()  # s (s+1) ... (s + 2j - 2)
    xpow = xs / x  # x^(-s-1)
    err = np.full(s.shape, np.inf)
    done = np.zeros(s.shape, dtype=bool)
    for j in range(1, _MAX_EM_TERMS + 1):
        term = coeffs[j - 1] * poch * xpow
        mag = np.abs(term)
        total = np.where(done, total, total + term)
        newly = (~done) & (mag < tol * 1e-3)
        err = np.where(newly, mag, err)
        done |= newly
        if done.all():
            break
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
        xpow = xpow / (x * x)
    if not done.all():
        raise PrecisionError(f"Euler-Maclaurin tail did not reach tol={tol} with N={N}")
    return total, err


def _hurwitz_mp(s, a, tol, n_terms):
    bits = max(64, int(-math.log2(tol)) + 32)
    with mpmath.workprec(bits):
        s = mpmath.mpc(s)
        a = mpmath.mpf(a)
        N = _em_cutoff(float(abs(s)), n_terms)
        total = mpmath.fsum(mpmath.power(k + a, -s) for k in range(N))
        x = N + a
        xs = mpmath.power(x, -s)
        total += x * xs / (s - 1) + xs / 2
        poch = s
        xpow = xs / x
        for j in range(1, 400):
            b = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j)
            term = b * poch * xpow
            total += term
            if abs(term) < tol * 1e-3:
                return total
            poch = poch * (s + 2 * j - 1) * (s + 2 * j)
            xpow = xpow / (x * x)
        raise PrecisionError(f"Euler-Maclaurin tail did not reach tol={tol}")


def _check_envelope(s):
    arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(np.abs(arr.imag) > 200):
        raise DomainError("continuation is limited to |Im s| <= 200")
    return arr


def hurwitz_zeta(s, a=1.0, tol: float = 1e-12, n_terms: int | None = None):
    """zeta(s, a) for 0 < a <= 1 by Euler-Maclaurin summation.

    ``s`` may be a scalar or an array.  ``tol`` below 1e-13 switches to mpmath
    arithmetic at a matching precision (scalars only).
    """
    if not 0 < float(a) <= 1:
        raise DomainError("Hurwitz parameter must lie in ]0, 1]")
    if tol <= 0:
        raise PrecisionError("tol must be positive")
    scalar = np.ndim(s) == 0
    arr = _check_envelope(s)
    if np.any(np.abs(arr - 1) < 1e-300):
        raise PoleProximityError("zeta(s, a) has a pole at s = 1")
    if tol < 1e-13:
        if not scalar:
            return np.array([hurwitz_zeta(complex(v), a, tol, n_terms) for v in arr])
        return _hurwitz_mp(complex(s) if not isinstance(s, mpmath.mpc) else s, a, tol, n_terms)
    vals, _ = _hurwitz_float(arr, float(a), tol, n_terms)
    return complex(vals[0]) if scalar else vals


def zeta_complex(s, tol: float = 1e-12, n_terms: int | None = None):
    """Riemann zeta(s) = zeta(s, 1)."""
    return hurwitz_zeta(s, 1.0, tol, n_terms)


# ---------------------------------------------------------------------------
# Dirichlet series U(s)
# ---------------------------------------------------------------------------


@dataclass
class DirichletSeries:
    """Analytic continuation of sum u(n) n^-s by a kind-specific strategy."""

    u: CoefficientSequence
    strategy: str
    poles: tuple = ()
    truncation: int = 0

    @property
    def approximate(self) -> bool:
        """True when values come from a truncated sum rather than an exact continuation."""
        return self.strategy == "truncated"

    def __call__(self, s, tol: float = 1e-12):
        arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
        out = self._eval(arr, tol)
        return complex(out[0]) if np.ndim(s) == 0 else out

    def _eval(self, s, tol):
        u = self.u
        if self.strategy == "unit":
            return np.ones_like(s)
        if self.strategy == "zeta":
            return hurwitz_zeta(s, 1.0, tol)
        if self.strategy == "inverse-zeta":
            return 1 / hurwitz_zeta(s, 1.0, tol)
        if self.strategy == "liouville":
            return hurwitz_zeta(2 * s, 1.0, tol) / hurwitz_zeta(s, 1.0, tol)
        if self.strategy == "hurwitz":
            q = u.period
            block = u.array(q)
            near = np.abs(s - 1) < _NEAR_ONE if not self.poles else np.zeros(s.shape, dtype=bool)
            total = np.zeros_like(s)
            far = s[~near]
            if far.size:
                part = np.zeros_like(far)
                for r in range(1, q + 1):
                    c = block[r]
                    if c != 0:
                        part += c * hurwitz_zeta(far, r / q, tol)
                total[~near] = part
            if near.any():
                # the 1/(s-1) terms cancel when the block sums to zero; use the Laurent tail
                coeffs = _stieltjes_mix(tuple(complex(c) for c in block[1:]))
                total[near] = np.polyval(coeffs[::-1], s[near] - 1)
            return np.exp(-s * math.log(q)) * total
        if self.strategy == "finite":
            vals = u.array(u.support)
            n = np.arange(1, u.support + 1)
            return np.exp(-np.outer(s, np.log(n))) @ vals[1:]
        if self.strategy == "truncated":
            if np.any(s.real <= 1):
                raise UnsupportedError(f"{u.id}: truncated series only valid for Re s > 1")
            vals = self.u.array(self.truncation)
            n = np.arange(1, self.truncation + 1)
            return np.exp(-np.outer(s, np.log(n))) @ vals[1:]
        raise UnsupportedError(self.strategy)


_NEAR_ONE = 0.05
_LAURENT_TERMS = 18


@lru_cache(maxsize=32)
def _stieltjes_mix(block: tuple) -> np.ndarray:
    """Taylor coefficients at s = 1 of sum_r c_r zeta(s, r/q) for a zero-sum block."""
    q = len(block)
    out = np.zeros(_LAURENT_TERMS, dtype=np.complex128)
    with mpmath.workdps(30):
        for k in range(_LAURENT_TERMS):
            acc = mpmath.mpc(0)
            for r, c in enumerate(block, start=1):
                if c != 0:
                    acc += mpmath.mpc(c) * mpmath.stieltjes(k, mpmath.mpf(r) / q)
            out[k] = complex((-1) ** k * acc / mpmath.factorial(k))
    return out


def dirichlet_series(u: CoefficientSequence, truncation: int = 20000) -> DirichletSeries:
    if isinstance(u, Unit):
        return DirichletSeries(u, "unit")
    if isinstance(u, One):
        return DirichletSeries(u, "zeta", poles=(1,))
    if isinstance(u, Moebius):
        return DirichletSeries(u, "inverse-zeta")
    if isinstance(u, Liouville):
        return DirichletSeries(u, "liouville")
    if isinstance(u, Periodic):
        block = u.array(u.period)
        mean_zero = abs(np.sum(block[1:])) < 1e-12
        return DirichletSeries(u, "hurwitz", poles=() if mean_zero else (1,))
    if isinstance(u, FinitelySupported):
        return DirichletSeries(u, "finite")
    if isinstance(u, Explicit):
        raise UnsupportedError(f"{u.id}: only {u.length} values are known; "
                               "wrap them in FinitelySupported if the rest are zero")
    log.info("%s: no continuation known, using a truncated series (Re s > 1 only)", u.id)
    return DirichletSeries(u, "truncated", truncation=truncation)


# ---------------------------------------------------------------------------
# Mellin transforms
# ---------------------------------------------------------------------------


class MellinFunction:
    poles: tuple = ()
    real_coefficients = True
    id = "mellin"

    def __call__(self, z, tol: float = 1e-12):
        raise NotImplementedError

    def check_poles(self, z):
        arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        for p in self.poles:
            if np.any(np.abs(arr - p) < POLE_DISTANCE):
                raise PoleProximityError(f"{self.id}: z is within {POLE_DISTANCE} of the pole {p}")

    def factors(self, z, tol: float = 1e-12) -> dict:
        return {"total": self(z, tol)}


class AffineClosedForm(MellinFunction):
    """g*(z) = c1/(1 - z) - c0/z for g(x) = c1 x + c0."""

    def __init__(self, c0, c1):
        self.c0 = float(c0)
        self.c1 = float(c1)
        self.poles = (0, 1)
        self.id = f"affine:{c0},{c1}"

    def __call__(self, z, tol=1e-12):
        self.check_poles(z)
        z = np.asarray(z, dtype=np.complex128)
        out = self.c1 / (1 - z) - self.c0 / z
        return complex(out) if out.ndim == 0 else out


class BHFFactorized(MellinFunction):
    """g_u*(z) = zeta(1 - z) U(1 - z) / (1 - z)."""

    def __init__(self, u: CoefficientSequence):
        self.u = u
        self.series = dirichlet_series(u)
        self.poles = (0, 1)
        self.real_coefficients = bool(u.real)
        self.id = f"gingham:{u.id}"

    def __call__(self, z, tol=1e-12):
        self.check_poles(z)
        z = np.asarray(z, dtype=np.complex128)
        s = 1 - z
        out = hurwitz_zeta(s, 1.0, tol) * self.series(s, tol) / s
        return complex(out) if np.ndim(out) == 0 else out

    def factors(self, z, tol=1e-12):
        s = 1 - complex(z)
        zeta = hurwitz_zeta(s, 1.0, tol)
        U = self.series(s, tol)
        return {"zeta": zeta, "U": U, "total": zeta * U / s}


class NumericalIntegral(MellinFunction):
    """int_0^1 g(t) t^(-z-1) dt for Re z < 0, summing exact integrals over the linear pieces."""

    def __init__(self, weight: WeightFunction, max_pieces: int = 1 << 22):
        self.weight = weight
        self.max_pieces = max_pieces
        self.id = f"integral:{weight.id}"

    def __call__(self, z, tol=1e-10):
        z = complex(z)
        if z.real >= 0:
            raise DomainError("the defining integral needs Re z < 0")
        g = self.weight
        if isinstance(g, Affine):
            return float(g.c1) / (1 - z) - float(g.c0) / z
        if isinstance(g, (Ingham, GeneralizedIngham)):
            u = Unit() if isinstance(g, Ingham) else g.u
            return _reciprocal_integral(u, z, tol, self.max_pieces).value
        if isinstance(g, PowerScale):
            return _geometric_integral(float(g.lam), z, tol)
        if isinstance(g, ExplicitBHF):
            total = 0j
            us = [float(x) for x in g.u] + [0.0]
            for i, v in enumerate(g.v):
                hi, lo = us[i], us[i + 1]
                piece = hi ** (1 - z) - (lo ** (1 - z) if lo > 0 else 0)
                total += float(v) * piece / (1 - z)
            return total
        raise UnsupportedError(f"no piecewise integral for {g.id}")


def _geometric_integral(lam, z, tol):
    """Power-scale pieces form a geometric series in lam^z; sum until the remainder is below tol."""
    ratio = cmath.exp(z * math.log(lam))
    first = (1 - cmath.exp((z - 1) * math.log(lam))) / (1 - z)
    total = 0j
    term = first
    i = 0
    while True:
        total += term
        i += 1
        term *= ratio
        bound = abs(term) / (1 - abs(ratio))
        if bound < tol:
            return total
        if i > 10**7:
            raise TruncationError("geometric series did not converge")


def _expm1c(w: np.ndarray) -> np.ndarray:
    """exp(w) - 1 for complex w without cancellation near 0."""
    x, y = w.real, w.imag
    em = np.expm1(x)
    cm1 = -2.0 * np.sin(0.5 * y) ** 2
    return (em * np.cos(y) + cm1) + 1j * (np.exp(x) * np.sin(y))


@dataclass(frozen=True)
class _IntegralResult:
    value: complex
    pieces: int
    tail: complex
    tail_bound: float
    limit_estimate: complex
    rigorous: bool


def _reciprocal_integral(u, z, tol, max_pieces, start=1 << 14):
    """int_0^1 Phi_u(t) t^(-z-1) dt, Re z < 0.

    On (1/(n+1), 1/n] the weight is w(n) t, giving w(n) (n^(z-1) - (n+1)^(z-1)) / (1 - z).
    Below 1/K the remainder is c K^z / (-z) with c = lim Phi_u estimated from
    w(n)/n on [K/2, K], plus a bound (|c| + sup |w(n) - c n|) K^(Re z - 1) / (1 - Re z).
    The sup is exact for finitely supported u and observed on [K/2, K] otherwise.
    """
    gi = GeneralizedIngham(u)
    K = start
    while True:
        w = gi.slope_table(K)
        n = np.arange(1, K, dtype=np.float64)
        lp = np.log1p(1.0 / n)
        zm1 = z - 1
        # n^(z-1) - (n+1)^(z-1) = -n^(z-1) expm1((z-1) log(1 + 1/n))
        pieces = -np.exp(zm1 * np.log(n)) * _expm1c(zm1 * lp) * w[1:K] / (1 - z)
        head = complex(math.fsum(pieces.real), math.fsum(pieces.imag))
        win = np.arange(K // 2, K + 1)
        c_hat = complex(np.mean(w[win] / win))
        finite = isinstance(u, (Unit, FinitelySupported))
        if finite:
            uv = u.array(u.support if isinstance(u, FinitelySupported) else 1)
            c_hat = complex(np.sum(uv[1:] / np.arange(1, len(uv))))
            sup_e = float(np.sum(np.abs(uv[1:])))
        else:
            sup_e = 2.0 * float(np.max(np.abs(w[win] - c_hat * win)))
        tail = c_hat * cmath.exp(z * math.log(K)) / (-z)
        bound = (abs(c_hat) + sup_e) * K ** (z.real - 1) / (1 - z.real)
        if bound < tol or 2 * K > max_pieces:
            if bound >= tol:
                raise TruncationError(f"tail bound {bound:.2e} above tol {tol:.2e} at K={K}")
            return _IntegralResult(head + tail, K - 1, tail, bound, c_hat, finite)
        K *= 2


@dataclass(frozen=True)
class Lemma23Check:
    lhs: complex
    rhs: complex
    diff: float
    tail_bound: float
    pieces: int
    rigorous_tail: bool


def lemma23_consistency(u: CoefficientSequence, z, tol: float = 1e-7, max_pieces: int = 1 << 23) -> Lemma23Check:
    """Compare the piecewise integral of Phi_u against zeta(1-z) U(1-z)/(1-z) at Re z < 0."""
    z = complex(z)
    if z.real >= 0:
        raise DomainError("the integral side needs Re z < 0")
    res = _reciprocal_integral(u, z, tol, max_pieces)
    rhs = BHFFactorized(u)(z, tol=1e-13)
    return Lemma23Check(res.value, rhs, abs(res.value - rhs), res.tail_bound, res.pieces, res.rigorous)


def mellin_for_weight(g: WeightFunction) -> MellinFunction:
    """The continued transform for a catalog weight."""
    if isinstance(g, Affine):
        return AffineClosedForm(g.c0, g.c1)
    if isinstance(g, Ingham):
        return BHFFactorized(Unit())
    if isinstance(g, GeneralizedIngham):
        return BHFFactorized(g.u)
    return NumericalIntegral(g)


def eval_mellin(m: MellinFunction, z, tol: float = 1e-12):
    return m(z, tol)


# ---------------------------------------------------------------------------
# zero location
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComplexBox:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise InvalidArgumentError(f"degenerate box {self}")

    @property
    def width(self):
        return self.re_max - self.re_min

    @property
    def height(self):
        return self.im_max - self.im_min

    @property
    def center(self):
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def contains(self, z, slack=0.0):
        return (self.re_min - slack <= z.real <= self.re_max + slack
                and self.im_min - slack <= z.imag <= self.im_max + slack)

    def boundary_distance(self, z):
        """Distance from z to the box boundary."""
        x, y = z.real, z.imag
        cx = min(max(x, self.re_min), self.re_max)
        cy = min(max(y, self.im_min), self.im_max)
        if (cx, cy) != (x, y):
            return math.hypot(x - cx, y - cy)
        return min(x - self.re_min, self.re_max - x, y - self.im_min, self.im_max - y)

    def split(self, offset=0.5):
        if self.width >= self.height:
            mid = self.re_min + offset * self.width
            return (ComplexBox(self.re_min, mid, self.im_min, self.im_max),
                    ComplexBox(mid, self.re_max, self.im_min, self.im_max))
        mid = self.im_min + offset * self.height
        return (ComplexBox(self.re_min, self.re_max, self.im_min, mid),
                ComplexBox(self.re_min, self.re_max, mid, self.im_max))

    @classmethod
    def parse(cls, text: str) -> "ComplexBox":
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise InvalidArgumentError("box is re0,re1,im0,im1")
        return cls(*parts)


def _avoid_poles(box: ComplexBox, poles, margin: float) -> tuple[ComplexBox, bool]:
    """Move the nearest edge so every pole is at least ``margin`` outside the box."""
    changed = False
    for p in poles:
        p = complex(p)
        if box.boundary_distance(p) >= margin and not box.contains(p):
            continue
        if box.contains(p, slack=margin) and box.boundary_distance(p) >= margin:
            raise PoleProximityError(f"pole {p} lies inside the box; choose a box that excludes it")
        # candidate edge moves, in order of preference: bottom, top, left, right
        moves = [
            ("im_min", p.imag + margin, abs(p.imag - box.im_min)),
            ("im_max", p.imag - margin, abs(p.imag - box.im_max)),
            ("re_min", p.real + margin, abs(p.real - box.re_min)),
            ("re_max", p.real - margin, abs(p.real - box.re_max)),
        ]
        name, value, _ = min(moves, key=lambda m: m[2])
        kw = dict(re_min=box.re_min, re_max=box.re_max, im_min=box.im_min, im_max=box.im_max)
        if name.endswith("min"):
            kw[name] = max(kw[name], value)
        else:
            kw[name] = min(kw[name], value)
        box = ComplexBox(**kw)
        changed = True
    return box, changed


class ContourError(ConvergenceError):
    """The contour passes too close to a zero for the winding number to be resolved."""


def _contour(box: ComplexBox, density: float) -> np.ndarray:
    corners = [complex(box.re_min, box.im_min), complex(box.re_max, box.im_min),
               complex(box.re_max, box.im_max), complex(box.re_min, box.im_max)]
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        k = max(8, int(math.ceil(abs(b - a) * density)))
        pts.append(a + (b - a) * np.arange(k) / k)
    pts.append(np.array([corners[0]]))
    return np.concatenate(pts)


@dataclass(frozen=True)
class Winding:
    count: int
    raw: float
    margin: float
    samples: int
    min_modulus: float


def winding_number(f, box: ComplexBox, max_step: float = 0.5, density: float = 8.0,
                   min_segment: float = 1e-10) -> Winding:
    """Number of zeros minus poles of f inside ``box``.

    Integrates d(arg f) around the boundary: the boundary is sampled, segments whose
    phase change exceeds ``max_step`` (or whose modulus ratio is extreme) are
    bisected, and the phase increments are summed.
    """
    z = _contour(box, density)
    v = np.asarray(f(z))
    while True:
        if np.any(v == 0):
            raise ContourError(f"contour of {box} passes through a zero")
        ratio = v[1:] / v[:-1]
        dphi = np.angle(ratio)
        mod = np.abs(ratio)
        bad = (np.abs(dphi) > max_step) | (mod > 4) | (mod < 0.25)
        if not bad.any():
            break
        idx = np.flatnonzero(bad)
        seglen = np.abs(z[idx + 1] - z[idx])
        if np.any(seglen < min_segment):
            raise ContourError(f"contour of {box} passes within {min_segment:g} of a zero")
        mids = 0.5 * (z[idx] + z[idx + 1])
        vm = np.asarray(f(mids))
        z = np.insert(z, idx + 1, mids)
        v = np.insert(v, idx + 1, vm)
    raw = float(np.sum(dphi)) / (2 * math.pi)
    count = int(round(raw))
    margin = abs(raw - count)
    if margin > 0.25:
        raise ContourError(f"winding estimate {raw:.3f} is not near an integer")
    return Winding(count, raw, margin, len(z), float(np.min(np.abs(v))))


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    winding_certificate: int
    residual: float
    method: str = "argument-principle + secant"
    factor: str = ""

    @property
    def re(self):
        return self.location.real

    @property
    def im(self):
        return self.location.imag


def _secant(f, z0, z1, tol, max_iter=80):
    f0, f1 = f(z0), f(z1)
    for _ in range(max_iter):
        if f1 == f0:
            break
        z2 = z1 - f1 * (z1 - z0) / (f1 - f0)
        z0, f0 = z1, f1
        z1, f1 = z2, f(z2)
        if abs(z1 - z0) <= 1e-14 * max(1.0, abs(z1)) or abs(f1) <= tol * 1e-6:
            return z1, abs(f1)
    return z1, abs(f1)


def _classify(m, z, tol):
    parts = m.factors(z, tol)
    if "zeta" not in parts:
        return ""
    az, au = abs(parts["zeta"]), abs(parts["U"])
    if az < 1e-6 and au < 1e-6:
        return "both"
    return "zeta" if az < au else "U"


def find_zeros(m: MellinFunction, box: ComplexBox, tol: float = 1e-10, *, min_box: float = 0.25,
               max_depth: int = 40, pole_margin: float = 0.01, eval_tol: float = 1e-12) -> list[ZeroRecord]:
    """Zeros of ``m`` in ``box``, sorted by (Im, Re).

    The box is first shrunk away from the transform's poles; sub-boxes are bisected
    until they hold one zero and are smaller than ``min_box``, then the zero is
    refined by the secant method and certified by a winding number of 1 on a small
    box around it.
    """
    box, shrunk = _avoid_poles(box, m.poles, pole_margin)
    if shrunk:
        log.info("box shrunk away from poles to %s", box)

    def f(z):
        return m(z, eval_tol)

    def count(b):
        for attempt, step in enumerate((0.5, 0.25, 0.1)):
            try:
                return winding_number(f, b, max_step=step).count
            except ContourError:
                if attempt == 2:
                    raise
        raise AssertionError("unreachable")

    records: list[ZeroRecord] = []
    stack = [(box, count(box), 0)]
    while stack:
        b, c, depth = stack.pop()
        log.debug("box re[%g,%g] im[%g,%g] winding=%d", b.re_min, b.re_max, b.im_min, b.im_max, c)
        if c == 0:
            continue
        if c < 0:
            raise ConvergenceError(f"negative winding {c} in {b}: pole inside the box")
        if c == 1 and max(b.width, b.height) <= min_box:
            rec = _refine(m, f, b, tol, eval_tol)
            if rec is not None:
                records.append(rec)
                continue
        if depth >= max_depth:
            raise ConvergenceError(f"subdivision depth exceeded near {b}")
        for offset in (0.5, 0.5 + 1 / 37, 0.5 - 1 / 41):
            try:
                b1, b2 = b.split(offset)
                c1, c2 = count(b1), count(b2)
            except ContourError:
                continue
            if c1 + c2 == c:
                break
            log.warning("winding mismatch %d + %d != %d in %s; retrying split", c1, c2, c, b)
        else:
            raise ConvergenceError(f"could not split {b} consistently")
        stack.append((b2, c2, depth + 1))
        stack.append((b1, c1, depth + 1))
    records.sort(key=lambda r: (r.im, r.re))
    return records


def refine_zero(m: MellinFunction, z0, tol: float = 1e-10, step: float = 1e-4, eval_tol: float = 1e-12):
    """Secant iteration on g* from ``z0``; returns (location, |g*(location)|)."""
    z0 = complex(z0)
    z, res = _secant(lambda z: m(z, eval_tol), z0, z0 + complex(step, step), tol)
    return complex(z), float(res)


def _refine(m, f, b: ComplexBox, tol, eval_tol):
    h = 1e-3 * max(b.width, b.height)
    z, res = _secant(f, b.center, b.center + complex(h, h), tol)
    if not (b.contains(z, slack=1e-9) and res <= tol):
        return None
    side = min(1e-3, 0.5 * min(b.width, b.height))
    try:
        cert = winding_number(f, ComplexBox(z.real - side, z.real + side, z.imag - side, z.imag + side),
                              max_step=0.25)
    except ContourError:
        return None
    if cert.count != 1:
        return None
    return ZeroRecord(complex(z), cert.count, float(res), factor=_classify(m, z, eval_tol))


@dataclass(frozen=True)
class IndexEstimate:
    eta: float | None
    zeros: list = field(default_factory=list)
    box_limited: bool = True


def analytic_index(m: MellinFunction, box: ComplexBox, tol: float = 1e-10) -> IndexEstimate:
    """Smallest real part among the zeros found in ``box`` (always a box-limited estimate)."""
    zeros = find_zeros(m, box, tol)
    if not zeros:
        return IndexEstimate(None, [], True)
    return IndexEstimate(min(z.re for z in zeros), zeros, True)
