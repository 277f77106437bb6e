"""Exact multiplicative arithmetic: factor sieve, arithmetic functions and the Dirichlet ring.

Sequences are indexed from 1.  ``values(N)`` returns the Python scalars
``u(1), ..., u(N)`` (ints, Fractions or mpmath numbers, depending on the kind);
``array(N)`` returns a float/complex numpy array of length ``N + 1`` whose slot 0
is unused, which is the layout every numerical kernel in the package expects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np

try:
    from gmpy2 import mpz as _bigint
except ImportError:  # pragma: no cover
    _bigint = int

from .errors import InvalidArgumentError, NotInvertibleError, OutOfRangeError

__all__ = [
    "FactorSieve",
    "build_sieve",
    "get_sieve",
    "liouville",
    "moebius",
    "CoefficientSequence",
    "Explicit",
    "FinitelySupported",
    "Periodic",
    "CompletelyMultiplicative",
    "Multiplicative",
    "Unit",
    "One",
    "Liouville",
    "Moebius",
    "Character",
    "DavenportHeilbronn",
    "RamanujanTauNormalized",
    "DirichletSeriesMeta",
    "builtin",
    "parse_sequence",
    "SEQUENCE_IDS",
    "eval_coefficient",
    "dirichlet_convolve",
    "dirichlet_inverse",
    "ramanujan_tau",
    "davenport_heilbronn_xi",
]


# ---------------------------------------------------------------------------
# Factor sieve
# ---------------------------------------------------------------------------


class FactorSieve:
    """Smallest-prime-factor table for ``2 <= n <= limit``."""

    def __init__(self, limit: int):
        if not isinstance(limit, (int, np.integer)) or limit < 2:
            raise InvalidArgumentError(f"sieve limit must be an integer >= 2, got {limit!r}")
        limit = int(limit)
        spf = np.zeros(limit + 1, dtype=np.int64)
        for p in range(2, math.isqrt(limit) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        rest = np.flatnonzero(spf == 0)
        spf[rest] = rest
        spf[0] = 0
        spf[1] = 1
        spf.flags.writeable = False
        self.limit = limit
        self.spf = spf
        self._liouville = None
        self._moebius = None

    def __repr__(self):
        return f"FactorSieve(limit={self.limit})"

    def _check(self, n: int) -> int:
        n = int(n)
        if n < 1:
            raise InvalidArgumentError(f"expected a positive integer, got {n}")
        if n > self.limit:
            raise OutOfRangeError(f"n={n} exceeds sieve limit {self.limit}")
        return n

    def is_prime(self, n: int) -> bool:
        n = self._check(n)
        return n >= 2 and int(self.spf[n]) == n

    def primes(self, upto: int | None = None) -> np.ndarray:
        upto = self.limit if upto is None else min(int(upto), self.limit)
        idx = np.arange(2, upto + 1)
        return idx[self.spf[2 : upto + 1] == idx]

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization of ``n`` as ``[(p, e), ...]`` with increasing ``p``."""
        n = self._check(n)
        out = []
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def divisors(self, n: int) -> list[int]:
        divs = [1]
        for p, e in self.factorize(n):
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)

    def big_omega(self, n: int) -> int:
        return sum(e for _, e in self.factorize(n))

    def liouville_array(self) -> np.ndarray:
        """lambda(n) for ``0 <= n <= limit`` (slot 0 is 0)."""
        if self._liouville is None:
            lam = np.zeros(self.limit + 1, dtype=np.int8)
            lam[1] = 1
            lo = 2
            # n // spf[n] <= n/2, so each dyadic block only reads finished entries.
            while lo <= self.limit:
                hi = min(2 * lo, self.limit + 1)
                n = np.arange(lo, hi)
                lam[lo:hi] = -lam[n // self.spf[lo:hi]]
                lo = hi
            lam.flags.writeable = False
            self._liouville = lam
        return self._liouville

    def moebius_array(self) -> np.ndarray:
        if self._moebius is None:
            mu = np.zeros(self.limit + 1, dtype=np.int8)
            mu[1] = 1
            lo = 2
            while lo <= self.limit:
                hi = min(2 * lo, self.limit + 1)
                n = np.arange(lo, hi)
                p = self.spf[lo:hi]
                m = n // p
                mu[lo:hi] = np.where(m % p == 0, 0, -mu[m])
                lo = hi
            mu.flags.writeable = False
            self._moebius = mu
        return self._moebius


def build_sieve(limit: int) -> FactorSieve:
    return FactorSieve(limit)


_SIEVE: FactorSieve | None = None


def get_sieve(limit: int) -> FactorSieve:
    """Shared sieve covering at least ``limit`` (grown by doubling)."""
    global _SIEVE
    limit = max(int(limit), 2)
    if _SIEVE is None or _SIEVE.limit < limit:
        size = 1 << max(10, (limit - 1).bit_length())
        _SIEVE = FactorSieve(size)
    return _SIEVE


def liouville(n: int, sieve: FactorSieve) -> int:
    n = sieve._check(n)
    return int(sieve.liouville_array()[n])


def moebius(n: int, sieve: FactorSieve) -> int:
    n = sieve._check(n)
    return int(sieve.moebius_array()[n])


# ---------------------------------------------------------------------------
# Coefficient sequences
# ---------------------------------------------------------------------------


def _as_complex_array(values: Sequence, n: int) -> np.ndarray:
    complex_like = any(isinstance(v, (complex, mpmath.mpc)) for v in values)
    dtype = np.complex128 if complex_like else np.float64
    out = np.zeros(n + 1, dtype=dtype)
    out[1:] = [complex(v) if complex_like else float(v) for v in values]
    return out


class CoefficientSequence:
    """An arithmetic sequence u(1), u(2), ...

    Subclasses implement ``_value(n)`` for ``n >= 1``.  ``values``/``array`` may be
    overridden with bulk evaluations.
    """

    id = "sequence"
    multiplicative = False
    completely_multiplicative = False
    period: int | None = None
    length: int | None = None  # finite support (Explicit only)
    real = True

    def __call__(self, n: int):
        n = int(n)
        if n < 1:
            raise InvalidArgumentError(f"sequences are indexed from 1, got {n}")
        if self.length is not None and n > self.length:
            raise OutOfRangeError(f"{self.id}: n={n} beyond explicit length {self.length}")
        return self._value(n)

    def _value(self, n: int):
        raise NotImplementedError

    def values(self, n: int) -> list:
        if self.length is not None and n > self.length:
            raise OutOfRangeError(f"{self.id}: requested {n} values, only {self.length} stored")
        return [self._value(k) for k in range(1, n + 1)]

    def array(self, n: int) -> np.ndarray:
        return _as_complex_array(self.values(n), n)

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"


class Explicit(CoefficientSequence):
    def __init__(self, values: Sequence, id: str = "explicit"):
        if len(values) == 0:
            raise InvalidArgumentError("explicit sequence needs at least u(1)")
        self._values = tuple(values)
        self.length = len(self._values)
        self.id = id
        self.real = not any(isinstance(v, (complex, mpmath.mpc)) for v in self._values)

    def _value(self, n):
        return self._values[n - 1]

    def values(self, n):
        if n > self.length:
            raise OutOfRangeError(f"{self.id}: requested {n} values, only {self.length} stored")
        return list(self._values[:n])


class FinitelySupported(Explicit):
    """u(1..m) as given and u(n) = 0 for n > m."""

    def __init__(self, values: Sequence, id: str = "finite"):
        super().__init__(values, id)
        self.support = self.length
        self.length = None

    def _value(self, n):
        return self._values[n - 1] if n <= self.support else 0

    def values(self, n):
        head = list(self._values[:n])
        return head + [0] * (n - len(head))


class Periodic(CoefficientSequence):
    def __init__(self, block: Sequence, id: str = "periodic"):
        if len(block) == 0:
            raise InvalidArgumentError("period must be at least 1")
        self.block = tuple(block)
        self.period = len(self.block)
        self.id = id
        self.real = not any(isinstance(v, (complex, mpmath.mpc)) for v in self.block)

    def _value(self, n):
        return self.block[(n - 1) % self.period]

    def values(self, n):
        q = self.period
        return [self.block[(k - 1) % q] for k in range(1, n + 1)]


def _check_unit_normalized(table, what):
    for key in (1, (1, 0)):
        if isinstance(table, Mapping) and key in table and table[key] != 1:
            raise InvalidArgumentError(f"{what}: u(1) must be 1")


class CompletelyMultiplicative(CoefficientSequence):
    """u(p1^e1 ... pk^ek) = u(p1)^e1 ... u(pk)^ek from a prime-value map."""

    multiplicative = True
    completely_multiplicative = True

    def __init__(self, prime_values: Mapping[int, object] | Callable[[int], object],
                 id: str = "completely_multiplicative"):
        _check_unit_normalized(prime_values, id)
        self._map = prime_values
        self.id = id

    def at_prime(self, p: int):
        if callable(self._map):
            return self._map(p)
        try:
            return self._map[p]
        except KeyError:
            raise OutOfRangeError(f"{self.id}: no value supplied for prime {p}") from None

    def _value(self, n):
        out = 1
        for p, e in get_sieve(n).factorize(n):
            out = out * self.at_prime(p) ** e
        return out


class Multiplicative(CoefficientSequence):
    """u(n) = prod u(p^e) from a prime-power-value map keyed by ``(p, e)``."""

    multiplicative = True

    def __init__(self, prime_power_values: Mapping[tuple[int, int], object] | Callable[[int, int], object],
                 id: str = "multiplicative"):
        _check_unit_normalized(prime_power_values, id)
        self._map = prime_power_values
        self.id = id

    def at_prime_power(self, p: int, e: int):
        if callable(self._map):
            return self._map(p, e)
        try:
            return self._map[(p, e)]
        except KeyError:
            raise OutOfRangeError(f"{self.id}: no value supplied for {p}^{e}") from None

    def _value(self, n):
        out = 1
        for p, e in get_sieve(n).factorize(n):
            out = out * self.at_prime_power(p, e)
        return out


# -- builtins ---------------------------------------------------------------


class Unit(CoefficientSequence):
    """The Dirichlet identity e = (1, 0, 0, ...)."""

    id = "e"
    multiplicative = True
    completely_multiplicative = True

    def _value(self, n):
        return 1 if n == 1 else 0


class One(CoefficientSequence):
    id = "one"
    multiplicative = True
    completely_multiplicative = True
    period = 1

    def _value(self, n):
        return 1


class Liouville(CoefficientSequence):
    id = "liouville"
    multiplicative = True
    completely_multiplicative = True

    def _value(self, n):
        return liouville(n, get_sieve(n))

    def values(self, n):
        return [int(v) for v in get_sieve(n).liouville_array()[1 : n + 1]]

    def array(self, n):
        out = np.zeros(n + 1)
        out[1:] = get_sieve(n).liouville_array()[1 : n + 1]
        return out


class Moebius(CoefficientSequence):
    id = "moebius"
    multiplicative = True

    def _value(self, n):
        return moebius(n, get_sieve(n))

    def values(self, n):
        return [int(v) for v in get_sieve(n).moebius_array()[1 : n + 1]]

    def array(self, n):
        out = np.zeros(n + 1)
        out[1:] = get_sieve(n).moebius_array()[1 : n + 1]
        return out


def _primitive_root(p: int, k: int) -> int:
    m = p**k
    phi = p ** (k - 1) * (p - 1)
    factors = [q for q, _ in get_sieve(max(phi, 2)).factorize(phi)] if phi > 1 else []
    for g in range(2, m):
        if math.gcd(g, p) == 1 and all(pow(g, phi // q, m) != 1 for q in factors):
            return g
    return 1


@lru_cache(maxsize=64)
def _character_group(q: int):
    """Generators of (Z/qZ)^* as (modulus, generator, order) per CRT component."""
    comps = []
    for p, k in get_sieve(max(q, 2)).factorize(q) if q > 1 else []:
        m = p**k
        if p == 2:
            if k >= 2:
                comps.append((m, m - 1, 2))
            if k >= 3:
                comps.append((m, 5, 2 ** (k - 2)))
        else:
            comps.append((m, _primitive_root(p, k), p ** (k - 1) * (p - 1)))
    return tuple(comps)


@lru_cache(maxsize=64)
def _character_phases(q: int, index: int) -> tuple:
    """chi(r) for r = 0..q-1 as a Fraction phase in [0, 1), or None where chi vanishes."""
    comps = _character_group(q)
    order = math.prod(o for _, _, o in comps) if comps else 1
    if not 0 <= index < order:
        raise InvalidArgumentError(f"character index must lie in [0, {order}) for modulus {q}")
    exps = []
    rem = index
    for _, _, o in comps:
        exps.append(rem % o)
        rem //= o
    # discrete logs per component; the 2^k (k >= 3) case uses the pair (-1, 5)
    logs = []
    for (m, g, o) in comps:
        table = {}
        x = 1
        for j in range(o):
            table.setdefault(x, j)
            x = x * g % m
        logs.append((m, g, o, table))
    phases = []
    for r in range(q):
        if math.gcd(r, q) != 1:
            phases.append(None)
            continue
        phase = Fraction(0)
        i = 0
        while i < len(comps):
            m, g, o, table = logs[i]
            if m % 8 == 0 and g == m - 1:
                # r = (+-1) * 5^j mod 2^k
                m5, g5, o5, table5 = logs[i + 1]
                s = 0 if r % 4 == 1 else 1
                j = table5[(r * (1 if s == 0 else -1)) % m5]
                phase += Fraction(exps[i] * s, o) + Fraction(exps[i + 1] * j, o5)
                i += 2
                continue
            phase += Fraction(exps[i] * table[r % m], o)
            i += 1
        phases.append(phase % 1)
    return tuple(phases)


class Character(Periodic):
    """Dirichlet character modulo ``q``; index 0 is the principal character.

    Characters are labelled by the mixed-radix index of their exponent vector on
    the CRT generators of (Z/qZ)^*.  Real characters take integer values.
    """

    multiplicative = True
    completely_multiplicative = True

    def __init__(self, q: int, index: int = 0):
        if q < 1:
            raise InvalidArgumentError("character modulus must be >= 1")
        self.q = q
        self.index = index
        phases = _character_phases(q, index)
        block = []
        for r in list(range(1, q)) + [0]:
            ph = phases[r]
            if ph is None:
                block.append(0)
            elif ph == 0:
                block.append(1)
            elif ph == Fraction(1, 2):
                block.append(-1)
            else:
                block.append(complex(math.cos(2 * math.pi * ph), math.sin(2 * math.pi * ph)))
        super().__init__(block, id=f"chi:{q},{index}")
        self.phases = phases


class DavenportHeilbronn(Periodic):
    """The 5-periodic sequence (1, xi, -xi, -1, 0); xi comes from its nested-radical form."""

    def __init__(self):
        xi = davenport_heilbronn_xi()
        super().__init__((1, xi, -xi, -1, 0), id="davenport_heilbronn")

    def values(self, n):
        # re-derive xi so the current mpmath precision is honoured
        xi = davenport_heilbronn_xi()
        block = (1, xi, -xi, -1, 0)
        return [block[(k - 1) % 5] for k in range(1, n + 1)]

    def _value(self, n):
        xi = davenport_heilbronn_xi()
        return (1, xi, -xi, -1, 0)[(n - 1) % 5]

    def array(self, n):
        xi = float(davenport_heilbronn_xi(64))
        block = np.array([1.0, xi, -xi, -1.0, 0.0])
        out = np.zeros(n + 1)
        out[1:] = np.resize(block, n)
        return out


class RamanujanTauNormalized(Multiplicative):
    """u(n) = tau(n) / n^(11/2)."""

    def __init__(self):
        super().__init__(self._pp, id="tau")

    @staticmethod
    def _pp(p, e):
        n = p**e
        return mpmath.mpf(_tau_table(n)[n - 1]) / mpmath.power(n, mpmath.mpf(11) / 2)

    def _value(self, n):
        return mpmath.mpf(_tau_table(n)[n - 1]) / mpmath.power(n, mpmath.mpf(11) / 2)

    def values(self, n):
        taus = _tau_table(n)
        half = mpmath.mpf(11) / 2
        return [mpmath.mpf(taus[k - 1]) / mpmath.power(k, half) for k in range(1, n + 1)]

    def array(self, n):
        taus = _tau_table(n)
        out = np.zeros(n + 1)
        # tau(k) exceeds the float range of exactness but not its dynamic range
        k = np.arange(1, n + 1, dtype=np.float64)
        out[1:] = np.array([float(t) for t in taus[:n]]) / k**5.5
        return out


@dataclass(frozen=True)
class DirichletSeriesMeta:
    """A Dirichlet series sum u(n) n^-s with catalog labels.

    ``claims_functional_equation`` is a label only; nothing is derived from it.
    """

    coefficients: CoefficientSequence
    claims_functional_equation: bool = False
    abscissa_hint: float = 1.0


SEQUENCE_IDS = {
    "e": "Dirichlet identity (1, 0, 0, ...)",
    "one": "constant 1",
    "liouville": "Liouville lambda(n) = (-1)^Omega(n)",
    "moebius": "Moebius mu(n)",
    "chi:q,i": "Dirichlet character mod q with index i (chi:4,1 is the non-principal character mod 4)",
    "davenport_heilbronn": "5-periodic (1, xi, -xi, -1, 0)",
    "tau": "normalized Ramanujan tau(n)/n^(11/2)",
}


def builtin(name: str, *params) -> CoefficientSequence:
    name = name.lower()
    if name in ("e", "unit", "identity"):
        return Unit()
    if name == "one":
        return One()
    if name == "liouville":
        return Liouville()
    if name == "moebius":
        return Moebius()
    if name in ("character", "chi"):
        return Character(*[int(p) for p in params])
    if name in ("davenport_heilbronn", "dh"):
        return DavenportHeilbronn()
    if name in ("ramanujan_tau_normalized", "tau"):
        return RamanujanTauNormalized()
    raise InvalidArgumentError(f"unknown sequence {name!r}; known ids: {', '.join(SEQUENCE_IDS)}")


def parse_sequence(text: str) -> CoefficientSequence:
    """Parse a catalog id such as ``"liouville"`` or ``"chi:4,1"``."""
    head, _, tail = text.partition(":")
    params = [p for p in tail.split(",") if p] if tail else []
    return builtin(head, *params)


# ---------------------------------------------------------------------------
# Dirichlet ring
# ---------------------------------------------------------------------------


def eval_coefficient(u: CoefficientSequence, n: int):
    return u(n)


def _seq_values(u, n):
    if isinstance(u, CoefficientSequence):
        return u.values(n)
    if len(u) < n:
        raise OutOfRangeError(f"need {n} values, got {len(u)}")
    return list(u[:n])


def dirichlet_convolve(u, v, limit: int) -> Explicit:
    """(u * v)(n) = sum_{d | n} u(d) v(n/d) for n <= limit.

    Runs over multiples rather than divisors: each pair (d, k) with d*k <= limit is
    visited once, O(limit log limit) products.
    """
    if limit < 1:
        raise InvalidArgumentError("limit must be >= 1")
    uv = _seq_values(u, limit)
    vv = _seq_values(v, limit)
    out = [0] * (limit + 1)
    for d in range(1, limit + 1):
        ud = uv[d - 1]
        if ud == 0:
            continue
        for k in range(1, limit // d + 1):
            vk = vv[k - 1]
            if vk != 0:
                out[d * k] += ud * vk
    return Explicit(out[1:], id="convolution")


def _reciprocal(x):
    if isinstance(x, int):
        return Fraction(1, x) if abs(x) != 1 else x
    if isinstance(x, Fraction):
        return 1 / x
    return 1 / x


def dirichlet_inverse(u, limit: int) -> Explicit:
    """Dirichlet inverse via u^-1(n) = -(1/u(1)) sum_{d | n, d < n} u^-1(d) u(n/d)."""
    if limit < 1:
        raise InvalidArgumentError("limit must be >= 1")
    uv = _seq_values(u, limit)
    if uv[0] == 0:
        raise NotInvertibleError("u(1) = 0: no Dirichlet inverse")
    r = _reciprocal(uv[0])
    inv = [0] * (limit + 1)
    acc = [0] * (limit + 1)
    for d in range(1, limit + 1):
        val = r if d == 1 else -r * acc[d]
        if isinstance(val, Fraction) and val.denominator == 1:
            val = int(val)
        inv[d] = val
        if val == 0:
            continue
        for k in range(2, limit // d + 1):
            uk = uv[k - 1]
            if uk != 0:
                acc[d * k] += val * uk
    return Explicit(inv[1:], id="inverse")


def dirichlet_convolve_array(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Float/complex convolution of padded arrays (slot 0 unused) of equal length."""
    n = len(u) - 1
    dtype = np.result_type(u, v)
    out = np.zeros(n + 1, dtype=dtype)
    for d in range(1, n + 1):
        ud = u[d]
        if ud != 0:
            out[d::d] += ud * v[1 : n // d + 1]
    return out


def dirichlet_inverse_array(u: np.ndarray) -> np.ndarray:
    n = len(u) - 1
    if u[1] == 0:
        raise NotInvertibleError("u(1) = 0: no Dirichlet inverse")
    r = 1 / u[1]
    inv = np.zeros(n + 1, dtype=np.result_type(u, float))
    acc = np.zeros_like(inv)
    for d in range(1, n + 1):
        val = r if d == 1 else -r * acc[d]
        inv[d] = val
        if val != 0 and 2 * d <= n:
            acc[2 * d :: d] += val * u[2 : n // d + 1]
    return inv


# ---------------------------------------------------------------------------
# Ramanujan tau
# ---------------------------------------------------------------------------


def _pack(coeffs, slot):
    pos = b"".join(max(c, 0).to_bytes(slot, "little") for c in coeffs)
    neg = b"".join(max(-c, 0).to_bytes(slot, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _poly_mul_trunc(a: list[int], b: list[int], n: int) -> list[int]:
    """First ``n`` coefficients of a*b by Kronecker substitution (exact integers)."""
    ma = max((abs(c) for c in a), default=0)
    mb = max((abs(c) for c in b), default=0)
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    slot = (bits + 7) // 8
    prod = int(_bigint(_pack(a[:n], slot)) * _bigint(_pack(b[:n], slot)))
    width = 8 * slot
    half = 1 << (width - 1)
    bias = int.from_bytes((b"\x00" * (slot - 1) + b"\x80") * n, "little")
    raw = ((prod + bias) & ((1 << (width * n)) - 1)).to_bytes(slot * n, "little")
    return [int.from_bytes(raw[i * slot : (i + 1) * slot], "little") - half for i in range(n)]


def _euler_product_series(n: int) -> list[int]:
    """Coefficients of prod_{k>=1} (1 - x^k) up to x^(n-1), by the pentagonal number theorem."""
    out = [0] * n
    k = 0
    while True:
        hit = False
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e < n:
                out[e] += -1 if kk % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    return out


def ramanujan_tau(limit: int) -> list[int]:
    """tau(1), ..., tau(limit) from x * prod (1 - x^k)^24, exact."""
    if limit < 1:
        raise InvalidArgumentError("limit must be >= 1")
    return list(_tau_table(limit)[:limit])


_TAU_CACHE: list[int] = []


def _tau_table(limit: int) -> list[int]:
    global _TAU_CACHE
    if len(_TAU_CACHE) < limit:
        size = 1 << max(8, (limit - 1).bit_length())
        p1 = _euler_product_series(size)
        p2 = _poly_mul_trunc(p1, p1, size)
        p4 = _poly_mul_trunc(p2, p2, size)
        p8 = _poly_mul_trunc(p4, p4, size)
        p16 = _poly_mul_trunc(p8, p8, size)
        _TAU_CACHE = _poly_mul_trunc(p16, p8, size)
    return _TAU_CACHE


# ---------------------------------------------------------------------------
# Davenport-Heilbronn constant
# ---------------------------------------------------------------------------


def davenport_heilbronn_xi(bits: int | None = None) -> mpmath.mpf:
    """xi = (-2 + sqrt(10 - 2 sqrt 5)) / (sqrt 5 - 1) at ``bits`` (default: current mp precision)."""
    if bits is None:
        bits = mpmath.mp.prec
    with mpmath.workprec(bits + 16):
        s5 = mpmath.sqrt(5)
        xi = (-2 + mpmath.sqrt(10 - 2 * s5)) / (s5 - 1)
    with mpmath.workprec(bits):
        return +xi
