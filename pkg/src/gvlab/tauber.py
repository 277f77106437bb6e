"""Tauberian test bench: growth tests, asymptotic fits and slowly varying bounds.

Limits and limsups cannot be computed, so every check here works on a finite
window of the solved sequence.  Defaults:

* HLR test: compare the max of |a(n)| n^(1-eps) over the final half of the
  horizon with the max over the first half.
* Fits and bound diagnostics: the final decade [N/10, N], compared against the
  preceding decade [N/100, N/10] when a trend is needed.

Verdicts are three-valued and never claim more than the window shows.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, InvalidArgumentError, PoleProximityError, UnsupportedError
from .mellin import mellin_for_weight, zeta_complex
from .volterra import VolterraSolution
from .weights import Affine, Ingham, WeightFunction, weight_limit_at_zero

__all__ = [
    "CONSISTENT",
    "INCONSISTENT",
    "INCONCLUSIVE",
    "EpsilonResult",
    "HLRReport",
    "hlr_test",
    "AsymptoticFit",
    "fit_asymptotic",
    "fit_series",
    "predicted_constant",
    "zeta_ratio_constant",
    "SlowlyVaryingReport",
    "slowly_varying_diagnostic",
    "AntiHLRReport",
    "anti_hlr_probe",
]

CONSISTENT = "consistent-with-HLR"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"

HLR_MIN_HORIZON = 1000
FIT_MIN_HORIZON = 10_000


def _real_series(sol: VolterraSolution) -> np.ndarray:
    a = sol.a_float()
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag)) > 0:
            raise UnsupportedError("growth tests need a real solution")
        a = a.real
    return np.asarray(a, dtype=np.float64)


def _decade(N: int) -> int:
    """1-based start of the final decade."""
    return max(1, math.ceil(N / 10))


# ---------------------------------------------------------------------------
# HLR criterion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonResult:
    epsilon: float
    early_max: float
    late_max: float
    verdict: str
    witness: int | None


@dataclass
class HLRReport:
    beta: float
    N: int
    epsilon_grid: list
    results: list
    verdict: str
    sup_na: float
    sup_na_at: int
    tolerance: float
    scaled_max: dict = field(default_factory=dict, repr=False)

    @property
    def witness(self) -> int | None:
        for r in self.results:
            if r.verdict == INCONSISTENT:
                return r.witness
        return None

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "N": self.N,
            "epsilon_grid": list(self.epsilon_grid),
            "results": [asdict(r) for r in self.results],
            "verdict": self.verdict,
            "witness": self.witness,
            "sup_na": self.sup_na,
            "sup_na_at": self.sup_na_at,
            "tolerance": self.tolerance,
        }


def hlr_test(sol: VolterraSolution, epsilon_grid=(0.05, 0.1, 0.25, 0.5), tolerance: float = 0.05) -> HLRReport:
    """Check that the running max of |a(n)| n^(1-eps) stops growing over the final half.

    Per eps: consistent if the final half sets no new maximum; inconsistent if it
    exceeds the first-half maximum by more than ``tolerance`` (relative), the
    witness being where that happens; inconclusive in between.  The overall
    verdict is inconsistent if any eps is, consistent if all are.
    """
    grid = [float(e) for e in epsilon_grid]
    if not grid or any(not 0 < e <= 0.5 for e in grid):
        raise InvalidArgumentError("epsilon values must lie in ]0, 1/2]")
    a = _real_series(sol)
    N = len(a)
    n = np.arange(1, N + 1, dtype=np.float64)
    na = np.abs(n * a)
    k = int(np.argmax(na))
    base = dict(beta=float(sol.problem.beta), N=N, epsilon_grid=grid, tolerance=tolerance,
                sup_na=float(na[k]), sup_na_at=k + 1)
    if N < HLR_MIN_HORIZON:
        return HLRReport(results=[], verdict=INCONCLUSIVE, **base)
    half = N // 2
    results, running = [], {}
    for e in grid:
        scaled = na * n ** (-e)
        running[e] = np.maximum.accumulate(scaled)
        early = float(scaled[:half].max())
        j = int(np.argmax(scaled[half:]))
        late = float(scaled[half + j])
        if late <= early:
            v, w = CONSISTENT, None
        elif late > early * (1 + tolerance):
            v, w = INCONSISTENT, half + j + 1
        else:
            v, w = INCONCLUSIVE, None
        results.append(EpsilonResult(e, early, late, v, w))
    verdicts = {r.verdict for r in results}
    if INCONSISTENT in verdicts:
        overall = INCONSISTENT
    elif verdicts == {CONSISTENT}:
        overall = CONSISTENT
    else:
        overall = INCONCLUSIVE
    return HLRReport(results=results, verdict=overall, scaled_max=running, **base)


# ---------------------------------------------------------------------------
# asymptotic fits
# ---------------------------------------------------------------------------


def zeta_ratio_constant(beta: float) -> float:
    """(1 - 1/beta) / zeta(1 - beta), the predicted constant of A(n) n^beta for the Ingham weight."""
    beta = float(beta)
    if beta in (0.0, 1.0):
        raise DomainError("the constant is undefined at beta = 0 and beta = 1")
    return float(((1 - 1 / beta) / complex(zeta_complex(1 - beta, tol=1e-14))).real)


def predicted_constant(g: WeightFunction, beta: float) -> float | None:
    """-1 / (beta g*(beta)), or 1/g(0) at beta = 0.

    Raises DomainError when the formula is degenerate (pole or zero of g* at beta).
    Returns None when g* cannot be evaluated at beta.
    """
    beta = float(beta)
    if beta == 0:
        if isinstance(g, Affine):
            return 1 / float(g.c0) if g.c0 else None
        est = weight_limit_at_zero(g)
        return 1 / est.value if est.converged and est.value else None
    m = mellin_for_weight(g)
    try:
        gs = complex(m(beta))
    except PoleProximityError as exc:
        raise DomainError(f"predicted constant undefined: g* has a pole at {beta}") from exc
    except (DomainError, UnsupportedError):
        return None
    if abs(gs) < 1e-12:
        raise DomainError(f"g*({beta}) = 0; use the power-log model")
    return (-1 / (beta * gs)).real


@dataclass
class AsymptoticFit:
    model: str
    fitted_constant: float
    n_lo: int
    n_hi: int
    residual_norm: float
    predicted_constant: float | None = None
    corrections: dict = field(default_factory=dict)
    bounded: bool | None = None

    @property
    def relative_error(self) -> float | None:
        if self.predicted_constant in (None, 0):
            return None
        return abs(self.fitted_constant / self.predicted_constant - 1)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["relative_error"] = self.relative_error
        return d


def _auto_corrections(g, model, beta):
    """Next-order terms to fit alongside the main one, in units of the main term."""
    if not isinstance(g, Affine) or model != "power":
        return ()
    alpha = float(g.index)
    if beta >= alpha:
        return ()
    p = beta - alpha
    if abs(beta + alpha) < 1e-12:
        # the zero of g* meets the pole of the rhs transform: a log term appears
        return (("n^%g log n" % p, p, True), ("n^%g" % p, p, False))
    return (("n^%g" % p, p, False),)


def fit_series(A, model: str = "power", *, beta: float = 0.0, alpha: float | None = None,
               corrections=(), predicted: float | None = None, band: float = 0.10) -> AsymptoticFit:
    """Least-squares fit of a model constant on the final decade of A(1..N).

    Models:
      power      A(n) n^beta = C + sum_j D_j n^p_j [log n]
      power-log  A(n) n^alpha = C log n + D
      bound      running max of |A(n)| n^alpha; C is its final value and
                 ``bounded`` says whether the final decade stayed within
                 ``band`` of the preceding decade's max
    """
    A = np.asarray(A, dtype=np.float64)
    N = len(A)
    if N < 100:
        raise InvalidArgumentError("need at least 100 points for a final-decade fit")
    lo = _decade(N)
    n = np.arange(lo, N + 1, dtype=np.float64)
    An = A[lo - 1:]
    if model == "power":
        y = An * n ** beta
        cols, names = [np.ones_like(n)], []
        for name, p, logf in corrections:
            cols.append(n ** p * (np.log(n) if logf else 1.0))
            names.append(name)
        X = np.stack(cols, 1)
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        resid = y - X @ coef
        return AsymptoticFit("C*n^-beta", float(coef[0]), lo, N, float(np.sqrt(np.mean(resid ** 2))),
                             predicted, {k: float(c) for k, c in zip(names, coef[1:])})
    if alpha is None:
        raise InvalidArgumentError(f"model {model!r} needs alpha")
    if model == "power-log":
        y = An * n ** alpha
        X = np.stack([np.log(n), np.ones_like(n)], 1)
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        resid = y - X @ coef
        return AsymptoticFit("C*n^-alpha*log n", float(coef[0]), lo, N, float(np.sqrt(np.mean(resid ** 2))),
                             predicted, {"n^-alpha": float(coef[1])})
    if model == "bound":
        s = np.abs(A) * np.arange(1, N + 1, dtype=np.float64) ** alpha
        prev = float(s[max(0, lo // 10 - 1):lo - 1].max())
        last = float(s[lo - 1:].max())
        return AsymptoticFit("bounded-by-slowly-varying", last, lo, N, 0.0, predicted,
                             {"preceding_decade_max": prev}, bounded=last <= prev * (1 + band))
    raise InvalidArgumentError(f"unknown model {model!r}")


def fit_asymptotic(sol: VolterraSolution, model: str = "power", *, beta: float | None = None,
                   alpha: float | None = None, corrections="auto") -> AsymptoticFit:
    """Fit A(n) from a solution against one of the asymptotic models and attach the predicted constant."""
    N = sol.N
    if N < FIT_MIN_HORIZON:
        raise InvalidArgumentError(f"fits need a horizon of at least {FIT_MIN_HORIZON}")
    g = sol.problem.weight
    beta = float(sol.problem.beta if beta is None else beta)
    A = sol.A_float()
    if np.iscomplexobj(A):
        A = A.real
    if alpha is None and isinstance(g, Affine):
        alpha = float(g.index)
    predicted = None
    if model == "power":
        if isinstance(g, Ingham):
            predicted = 1.0 if beta == 0 else zeta_ratio_constant(beta)
        else:
            predicted = predicted_constant(g, beta)
        if corrections == "auto":
            corrections = _auto_corrections(g, model, beta)
    elif model == "power-log":
        if alpha is None:
            raise InvalidArgumentError("power-log model needs the index alpha")
        predicted = 1 - alpha
    return fit_series(A, model, beta=beta, alpha=alpha,
                      corrections=() if corrections == "auto" else corrections, predicted=predicted)


# ---------------------------------------------------------------------------
# slowly varying bounds
# ---------------------------------------------------------------------------


@dataclass
class SlowlyVaryingReport:
    exponent: float
    burn_in: int
    n: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    scaled: np.ndarray = field(repr=False)
    running_max: np.ndarray = field(repr=False)
    log_fit: tuple
    ratio_range: tuple
    window_max: tuple
    running_max_constant: bool
    verdict: str
    band: float

    @property
    def bounded_by_log(self) -> bool:
        return self.verdict in ("bounded", "decaying", "bounded-by-log")

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "burn_in": self.burn_in,
            "log_fit": {"c0": self.log_fit[0], "c1": self.log_fit[1]},
            "ratio_range": list(self.ratio_range),
            "window_max": {"preceding_decade": self.window_max[0], "final_decade": self.window_max[1]},
            "running_max_constant": self.running_max_constant,
            "verdict": self.verdict,
            "band": self.band,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh)
            wr.writerow(["n", "a_n", "scaled"])
            for n, a, s in zip(self.n.tolist(), self.a.tolist(), self.scaled.tolist()):
                wr.writerow([n, repr(a), repr(s)])


def slowly_varying_diagnostic(sol: VolterraSolution, exponent: float, *, burn_in: int = 10,
                              band: float = 0.10) -> SlowlyVaryingReport:
    """Test whether n^exponent a(n) is bounded by c0 + c1 log n.

    The running max of |n^exponent a(n)| starts at ``burn_in`` so the fixed
    early values (a(1) = 1 in particular) do not pin it.  Over the final decade:

    * ``decaying``: the final-decade max of |scaled| is below the preceding decade's;
    * ``bounded``: the running max grows by less than band/2 across the decade;
    * ``bounded-by-log``: running max / log n stays within +-band of its midrange;
    * ``exceeds-log``: none of the above.
    """
    a = _real_series(sol)
    N = len(a)
    if N < FIT_MIN_HORIZON:
        raise InvalidArgumentError(f"diagnostic needs a horizon of at least {FIT_MIN_HORIZON}")
    if not 1 <= burn_in < N // 10:
        raise InvalidArgumentError("burn_in must lie before the final decade")
    n = np.arange(1, N + 1)
    scaled = a * n.astype(np.float64) ** exponent
    rm = np.full(N, np.nan)
    rm[burn_in - 1:] = np.maximum.accumulate(np.abs(scaled[burn_in - 1:]))
    lo = _decade(N)
    nn = n[lo - 1:].astype(np.float64)
    R = rm[lo - 1:]
    ratio = R / np.log(nn)
    rmin, rmax = float(ratio.min()), float(ratio.max())
    stable = (rmax - rmin) <= band * (rmax + rmin)
    X = np.stack([np.ones_like(nn), np.log(nn)], 1)
    c, *_ = np.linalg.lstsq(X, R, rcond=None)
    prev_lo = max(burn_in, lo // 10)
    prev = float(np.abs(scaled[prev_lo - 1:lo - 1]).max())
    last = float(np.abs(scaled[lo - 1:]).max())
    # constancy is judged on the full history, burn-in aside
    full = np.maximum.accumulate(np.abs(scaled))
    constant = bool(full[-1] == full[lo - 1])
    if last < prev:
        verdict = "decaying"
    elif R[-1] <= R[0] * (1 + band / 2):
        verdict = "bounded"
    elif stable:
        verdict = "bounded-by-log"
    else:
        verdict = "exceeds-log"
    return SlowlyVaryingReport(float(exponent), burn_in, n, a, scaled, rm, (float(c[0]), float(c[1])),
                               (rmin, rmax), (prev, last), constant, verdict, band)


# ---------------------------------------------------------------------------
# anti-HLR probe
# ---------------------------------------------------------------------------


@dataclass
class AntiHLRReport:
    N: int
    checks: list

    @property
    def lim_zero(self) -> bool:
        return all(c["lim_zero"] for c in self.checks)

    @property
    def limsup_growth(self) -> bool:
        return all(c["limsup_growth"] for c in self.checks)

    def to_dict(self) -> dict:
        return {"N": self.N, "checks": self.checks,
                "lim_zero": self.lim_zero, "limsup_growth": self.limsup_growth}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def anti_hlr_probe(sol: VolterraSolution, epsilons=(0.05, 0.1)) -> AntiHLRReport:
    """Look for the signature lim a(n) n^(1/2-eps) = 0 and limsup |a(n) n^(1/2+eps)| = oo.

    Per eps: ``lim_zero`` holds when the final-decade max of n^(1/2-eps)|a(n)|
    is below the preceding decade's; ``limsup_growth`` holds when
    n^(1/2+eps)|a(n)| sets a new all-time maximum inside the final decade.
    """
    a = np.abs(_real_series(sol))
    N = len(a)
    if N < FIT_MIN_HORIZON:
        raise InvalidArgumentError(f"probe needs a horizon of at least {FIT_MIN_HORIZON}")
    n = np.arange(1, N + 1, dtype=np.float64)
    lo = _decade(N)
    checks = []
    for e in epsilons:
        low = a * n ** (0.5 - e)
        high = a * n ** (0.5 + e)
        prev_low = float(low[lo // 10 - 1:lo - 1].max())
        last_low = float(low[lo - 1:].max())
        before = float(high[:lo - 1].max())
        last_high = float(high[lo - 1:].max())
        checks.append({
            "epsilon": float(e),
            "lim_zero": last_low < prev_low,
            "limsup_growth": last_high > before,
            "low_window_max": [prev_low, last_low],
            "high_max": [before, last_high],
        })
    return AntiHLRReport(N, checks)
