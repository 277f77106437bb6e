"""Weight functions g on ]0, 1]: affine weights and broken harmonic functions (BHF).

A BHF satisfies ``g(x) = v_i * x`` on ``u_{i+1} < x <= u_i`` (left-open, right-closed);
every evaluator here, and the solver rows built from them, use that convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath
import numpy as np

from .arith import CoefficientSequence, FinitelySupported, Unit, parse_sequence
from .errors import DomainError, InvalidArgumentError, UnsupportedError

__all__ = [
    "WeightFunction",
    "WeightValue",
    "Affine",
    "BHF",
    "Ingham",
    "GeneralizedIngham",
    "PowerScale",
    "ExplicitBHF",
    "eval_weight",
    "eval_generalized_ingham",
    "weight_limit_at_zero",
    "LimitEstimate",
    "bhf_breakpoints",
    "parse_weight",
    "WEIGHT_IDS",
]


@dataclass(frozen=True)
class WeightValue:
    value: object
    exact: bool

    def __float__(self):
        return float(self.value)


def _to_number(x):
    """Normalize an evaluation point; returns (value, kind) with kind in {'exact', 'float', 'mp'}."""
    if isinstance(x, bool):
        raise DomainError("boolean is not a valid point")
    if isinstance(x, (int, Rational)):
        return Fraction(x), "exact"
    if isinstance(x, float):
        return Fraction(x), "float"
    if isinstance(x, mpmath.mpf):
        return x, "mp"
    if isinstance(x, str):
        return Fraction(x), "exact"
    raise DomainError(f"unsupported point type {type(x).__name__}")


def _check_domain(x):
    if not 0 < x <= 1:
        raise DomainError(f"weights live on ]0, 1]; got x = {x}")


def _finish(value, kind, exact_inputs=True):
    if kind == "exact":
        return WeightValue(value, exact_inputs and isinstance(value, (int, Fraction)))
    if kind == "float":
        if isinstance(value, Fraction):
            f = float(value)
            return WeightValue(f, exact_inputs and Fraction(f) == value)
        return WeightValue(float(value), False)
    return WeightValue(value, False)


class WeightFunction:
    id = "weight"
    is_bhf = False

    def eval(self, x) -> WeightValue:
        x, kind = _to_number(x)
        _check_domain(x)
        return self._eval(x, kind)

    def __call__(self, x):
        return self.eval(x).value

    def _eval(self, x, kind):
        raise NotImplementedError

    def at_one(self):
        """g(1) as an exact or high-precision scalar."""
        return self.eval(1).value

    def row_float(self, n: int) -> np.ndarray:
        """g(k/n) for k = 1..n as float64."""
        return np.array([float(self._eval(Fraction(k, n), "exact").value) for k in range(1, n + 1)])

    def row_exact(self, n: int) -> list:
        """g(k/n) for k = 1..n; Fractions where possible, mpmath numbers otherwise."""
        return [self._eval(Fraction(k, n), "exact").value for k in range(1, n + 1)]

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"


class Affine(WeightFunction):
    """g(x) = c1 x + c0 with c0, c1 > 0."""

    def __init__(self, c0, c1):
        c0 = Fraction(c0) if isinstance(c0, (int, Rational, str)) else c0
        c1 = Fraction(c1) if isinstance(c1, (int, Rational, str)) else c1
        if not (c0 > 0 and c1 > 0):
            raise InvalidArgumentError("affine weight needs c0 > 0 and c1 > 0")
        self.c0 = c0
        self.c1 = c1
        self.id = f"affine:{c0},{c1}"

    @property
    def index(self):
        """c0 / (c0 + c1), the good-variation index of the affine weight."""
        return self.c0 / (self.c0 + self.c1)

    def _eval(self, x, kind):
        exact_coeffs = isinstance(self.c0, Fraction) and isinstance(self.c1, Fraction)
        return _finish(self.c1 * x + self.c0, kind, exact_coeffs)

    def row_float(self, n):
        k = np.arange(1, n + 1, dtype=np.float64)
        return float(self.c1) * (k / n) + float(self.c0)


class BHF(WeightFunction):
    """Broken harmonic function: g(x) = slope_i * x on (u_{i+1}, u_i]."""

    is_bhf = True

    def breakpoints(self, m: int) -> list[tuple[object, object]]:
        raise NotImplementedError

    def interval_index(self, x) -> int:
        """i with u_{i+1} < x <= u_i."""
        raise NotImplementedError

    def slope(self, i: int):
        raise NotImplementedError

    def _eval(self, x, kind):
        value = self.slope(self.interval_index(x)) * x
        return _finish(value, kind, self._exact_slopes)

    _exact_slopes = True


class Ingham(BHF):
    """Phi(x) = x * floor(1/x); breakpoints 1/i, slopes i."""

    id = "ingham"
    reciprocal_breaks = True

    def interval_index(self, x):
        return math.floor(1 / x)

    def slope(self, i):
        return i

    def breakpoints(self, m):
        return [(Fraction(1, i), i) for i in range(1, m + 1)]

    def slope_table(self, m: int) -> np.ndarray:
        """w(q) for q = 0..m, where g(x) = x * w(floor(1/x))."""
        return np.arange(m + 1, dtype=np.float64)

    def slope_values(self, m: int) -> list:
        return list(range(m + 1))

    def row_float(self, n):
        k = np.arange(1, n + 1)
        return (k * (n // k)) / n

    def row_exact(self, n):
        return [Fraction(k * (n // k), n) for k in range(1, n + 1)]


class GeneralizedIngham(BHF):
    """Phi_u(x) = x * sum_{k <= 1/x} u(k) floor(1/(k x)).

    On (1/(q+1), 1/q] the weight is ``w(q) * x`` with ``w(q) = sum_{k <= q} u(k) floor(q/k)``.
    For sign-changing u the slopes need not be positive or increasing.
    """

    reciprocal_breaks = True

    def __init__(self, u: CoefficientSequence):
        self.u = u
        self.id = f"gingham:{u.id}"
        self._exact_slopes = all(isinstance(v, (int, Fraction)) for v in u.values(min(5, u.length or 5)))
        self._w_exact: list = [0]
        self._w_float = np.zeros(1)

    def slope_values(self, m: int) -> list:
        """Exact/high-precision w(0..m)."""
        if len(self._w_exact) <= m:
            size = max(m, 2 * (len(self._w_exact) - 1), 16)
            uv = self.u.values(size)
            conv = [0] * (size + 1)  # (u * 1)(j)
            for k in range(1, size + 1):
                uk = uv[k - 1]
                if uk != 0:
                    for j in range(k, size + 1, k):
                        conv[j] += uk
            w = [0] * (size + 1)
            for j in range(1, size + 1):
                w[j] = w[j - 1] + conv[j]
            self._w_exact = w
        return self._w_exact[: m + 1]

    def slope_table(self, m: int) -> np.ndarray:
        if len(self._w_float) <= m:
            size = max(m, 2 * (len(self._w_float) - 1), 16)
            u = self.u.array(size)
            conv = np.zeros(size + 1, dtype=u.dtype)
            for k in range(1, size + 1):
                if u[k] != 0:
                    conv[k::k] += u[k]
            self._w_float = np.cumsum(conv)
        return self._w_float[: m + 1]

    def interval_index(self, x):
        return math.floor(1 / x)

    def slope(self, i):
        return self.slope_values(i)[i]

    def breakpoints(self, m):
        w = self.slope_values(m)
        return [(Fraction(1, i), w[i]) for i in range(1, m + 1)]

    def row_float(self, n):
        k = np.arange(1, n + 1)
        w = self.slope_table(n)
        return (k / n) * w[n // k]

    def row_exact(self, n):
        w = self.slope_values(n)
        return [Fraction(k, n) * w[n // k] if isinstance(w[n // k], (int, Fraction)) else w[n // k] * k / n
                for k in range(1, n + 1)]

    def strictly_positive(self, m: int) -> bool:
        """Whether w(1..m) > 0 (only meaningful for real u)."""
        return bool(np.all(np.real(self.slope_table(m)[1:]) > 0))


class PowerScale(BHF):
    """g_lambda(x) = x * lambda^floor(-log x / log lambda); breakpoints lambda^(1-i)."""

    reciprocal_breaks = False

    def __init__(self, lam):
        lam = Fraction(lam) if isinstance(lam, (int, Rational, str)) else lam
        if not lam > 1:
            raise InvalidArgumentError("power-scale weight needs lambda > 1")
        self.lam = lam
        self.id = f"power:{lam}"
        self._exact_slopes = isinstance(lam, Fraction)

    def interval_index(self, x):
        # i - 1 = largest j >= 0 with x * lam^j <= 1; float guess, then exact correction
        lam = self.lam
        j = max(0, int(math.floor(-math.log(float(x)) / math.log(float(lam)))))
        while j > 0 and x * lam**j > 1:
            j -= 1
        while x * lam ** (j + 1) <= 1:
            j += 1
        return j + 1

    def slope(self, i):
        return self.lam ** (i - 1)

    def breakpoints(self, m):
        return [(1 / self.lam ** (i - 1), self.lam ** (i - 1)) for i in range(1, m + 1)]

    def row_float(self, n):
        return np.array([float(self._eval(Fraction(k, n), "exact").value) for k in range(1, n + 1)])


class ExplicitBHF(BHF):
    """BHF from finitely many breakpoints 1 = u_1 > ... > u_m > 0 and slopes v_1..v_m.

    The last slope applies on all of ]0, u_m].
    """

    reciprocal_breaks = False

    def __init__(self, breakpoints, slopes):
        if len(breakpoints) != len(slopes) or not breakpoints:
            raise InvalidArgumentError("need equally many breakpoints and slopes")
        u = [Fraction(b) if isinstance(b, (int, Rational, str)) else b for b in breakpoints]
        v = [Fraction(s) if isinstance(s, (int, Rational, str)) else s for s in slopes]
        if u[0] != 1 or any(not a > b for a, b in zip(u, u[1:])) or not u[-1] > 0:
            raise InvalidArgumentError("breakpoints must start at 1 and strictly decrease to a positive value")
        if any(not s > 0 for s in v) or any(not b > a for a, b in zip(v, v[1:])):
            raise InvalidArgumentError("slopes must be positive and increasing")
        self.u = u
        self.v = v
        self.id = "bhf:" + ";".join(f"{a}@{b}" for a, b in zip(u, v))
        self._exact_slopes = all(isinstance(t, Fraction) for t in u + v)

    def interval_index(self, x):
        i = 1
        while i < len(self.u) and x <= self.u[i]:
            i += 1
        return i

    def slope(self, i):
        return self.v[i - 1]

    def breakpoints(self, m):
        if m > len(self.u):
            raise InvalidArgumentError(f"only {len(self.u)} breakpoints defined")
        return list(zip(self.u[:m], self.v[:m]))


def eval_weight(g: WeightFunction, x) -> WeightValue:
    return g.eval(x)


def eval_generalized_ingham(u: CoefficientSequence, x) -> WeightValue:
    """Phi_u(x) summed term by term, floors taken exactly for rational x."""
    x, kind = _to_number(x)
    _check_domain(x)
    if kind == "mp":
        top = int(mpmath.floor(1 / x))
        total = sum(u(k) * int(mpmath.floor(1 / (k * x))) for k in range(1, top + 1))
        return WeightValue(x * total, False)
    p, q = x.numerator, x.denominator
    top = q // p
    total = 0
    for k in range(1, top + 1):
        total += u(k) * (q // (k * p))
    value = x * total if isinstance(total, (int, Fraction)) else total * mpmath.mpf(p) / q
    return _finish(value, kind, isinstance(total, (int, Fraction)))


def bhf_breakpoints(g: WeightFunction, count: int) -> list[tuple[object, object]]:
    if not g.is_bhf:
        raise UnsupportedError(f"{g.id} is not a broken harmonic function")
    return g.breakpoints(count)


@dataclass(frozen=True)
class LimitEstimate:
    """Estimate of lim_{x -> 0} g(x).

    ``partial`` is the plain partial sum at ``terms``; ``value`` the averaged estimate;
    ``diagnostic`` the change of the averaged estimate between the last two octaves.
    """

    value: float
    partial: float
    diagnostic: float
    converged: bool
    terms: int


def weight_limit_at_zero(g: WeightFunction, u: CoefficientSequence | None = None,
                         terms: int = 100_000, tol: float = 1e-2) -> LimitEstimate:
    """lim g(x) as x -> 0; for Phi_u this is sum u(n)/n, estimated by averaging partial sums."""
    if isinstance(g, Affine):
        c0 = float(g.c0)
        return LimitEstimate(c0, c0, 0.0, True, 0)
    if u is None:
        if isinstance(g, Ingham):
            u = Unit()
        elif isinstance(g, GeneralizedIngham):
            u = g.u
        else:
            # slopes * breakpoints oscillate for power-scale weights; report the spread
            pairs = g.breakpoints(min(terms, 64)) if isinstance(g, PowerScale) else g.breakpoints(len(g.u))
            prods = [float(a * b) for a, b in pairs]
            spread = max(prods) - min(prods)
            return LimitEstimate(prods[-1], prods[-1], spread, False, len(prods))
    if isinstance(u, FinitelySupported):
        total = sum(Fraction(1, n) * u(n) if isinstance(u(n), (int, Fraction)) else u(n) / n
                    for n in range(1, u.support + 1))
        value = float(total) if not isinstance(total, complex) else total
        return LimitEstimate(value, value, 0.0, True, u.support)
    vals = u.array(terms)
    n = np.arange(1, terms + 1)
    partial = np.cumsum(vals[1:] / n)
    half = terms // 2
    quarter = terms // 4
    est = partial[half:].mean()
    prev = partial[quarter:half].mean()
    diag = abs(est - prev)
    def scalar(x):
        x = complex(x)
        return x.real if abs(x.imag) < 1e-15 else x

    est = scalar(est)
    return LimitEstimate(est, scalar(partial[-1]), float(diag), bool(diag <= tol * (1 + abs(est))), terms)


WEIGHT_IDS = {
    "ingham": "Phi(x) = x floor(1/x)",
    "affine:c0,c1": "g(x) = c1 x + c0",
    "power:lambda": "g(x) = x lambda^floor(-log x / log lambda)",
    "gingham:<sequence-id>": "generalized Ingham weight Phi_u for a catalog sequence",
}


def parse_weight(text: str) -> WeightFunction:
    head, _, tail = text.partition(":")
    head = head.lower()
    if head == "ingham":
        return Ingham()
    if head == "affine":
        try:
            c0, c1 = tail.split(",")
        except ValueError:
            raise InvalidArgumentError("affine weight id is affine:c0,c1") from None
        return Affine(Fraction(c0), Fraction(c1))
    if head == "power":
        return PowerScale(Fraction(tail))
    if head == "gingham":
        return GeneralizedIngham(parse_sequence(tail))
    raise InvalidArgumentError(f"unknown weight {text!r}; known ids: {', '.join(WEIGHT_IDS)}")
