"""Command-line front end: ``gvlab solve``, ``gvlab reproduce``, ``gvlab mellin``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .arith import SEQUENCE_IDS, Character, DavenportHeilbronn, ramanujan_tau
from .errors import GVLabError, InvalidArgumentError
from .mellin import ComplexBox, find_zeros, mellin_for_weight
from .tauber import fit_asymptotic, hlr_test, slowly_varying_diagnostic
from .volterra import (
    VolterraProblem,
    affine_exact_series,
    character_closed_form,
    parse_rhs,
    solve,
    summatory_identity_check,
)
from .weights import WEIGHT_IDS, Affine, GeneralizedIngham, parse_weight

log = logging.getLogger("gvlab")

TARGETS = ("eq1", "thm11", "fig1", "remark52", "tau", "dh-zeros")
DEFAULT_N = {"eq1": 100_000, "thm11": 100_000, "fig1": 20_000, "remark52": 1105, "tau": 1000}


class UsageError(GVLabError):
    """Bad command-line input."""


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def atomic_write(path: Path, data: bytes | str) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


@dataclass
class SvgPlot:
    x: list
    y: list
    xlabel: str = "n"
    ylabel: str = ""
    caption: str = ""
    log_x: bool = False
    width: int = 800
    height: int = 480


def _ticks(lo, hi, count=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out, t = [], start
    while t <= hi + 1e-12 * span:
        out.append(round(t, 12))
        t += step
    return out


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg(plot: SvgPlot) -> bytes:
    """Deterministic SVG 1.1 polyline plot with axes, tick labels and a caption."""
    x = np.asarray(plot.x, dtype=np.float64)
    y = np.asarray(plot.y, dtype=np.float64)
    if x.size == 0 or x.size != y.size:
        raise UsageError("SVG plot needs a non-empty series with matching x and y")
    if plot.log_x and np.any(x <= 0):
        raise UsageError("log-x plot needs positive x values")
    xv = np.log10(x) if plot.log_x else x
    W, H = plot.width, plot.height
    left, right, top, bottom = 70, 20, 20, 70
    pw, ph = W - left - right, H - top - bottom
    x0, x1 = float(xv.min()), float(xv.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xv.tolist(), y.tolist()))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        label = f"{10 ** t:g}" if plot.log_x else f"{t:g}"
        out.append(f'<line x1="{sx(t):.2f}" y1="{top + ph}" x2="{sx(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{top + ph + 18}" font-size="11" text-anchor="middle">{label}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{sy(t) + 4:.2f}" font-size="11" text-anchor="end">{t:g}</text>')
    out.append(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="0.8" points="{pts}"/>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{H - 35}" font-size="12" text-anchor="middle">'
               f'{_esc(plot.xlabel)}</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.2f}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ph / 2:.2f})">{_esc(plot.ylabel)}</text>')
    out.append(f'<text x="{W / 2:.2f}" y="{H - 10}" font-size="12" text-anchor="middle">{_esc(plot.caption)}</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# run records
# ---------------------------------------------------------------------------


@dataclass
class RunRecord:
    config: dict
    results: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append({"name": name, "pass": bool(ok), "detail": detail})
        return ok

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def as_json(self) -> str:
        body = asdict(self)
        body["version"] = __version__
        body["pass"] = self.passed
        return json_text(body)


def _config(args) -> dict:
    keep = ("command", "target", "action", "weight", "sequence", "beta", "rhs", "n", "precision_bits",
            "epsilon", "box", "tol", "seed", "path", "z")
    return {k: getattr(args, k) for k in keep if getattr(args, k, None) is not None}


def _finish(rec: RunRecord, out: Path, name: str = "run.json") -> int:
    atomic_write(out / name, rec.as_json())
    for c in rec.checks:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}" + (f": {c['detail']}" if c["detail"] else ""))
    return 0 if rec.passed else 1


def _weight_from_args(args):
    text = args.weight
    if text is None:
        raise UsageError("--weight is required")
    if text == "gingham" and args.sequence:
        text = f"gingham:{args.sequence}"
    return parse_weight(text)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    out = Path(args.out)
    g = _weight_from_args(args)
    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive horizon")
    rhs = parse_rhs(args.rhs, args.beta)
    kw = {} if args.precision_bits is None else {"precision": args.precision_bits}
    problem = VolterraProblem(g, rhs, args.n, **kw)
    sol = solve(problem, path=args.path)
    if sol.forced_highprec:
        print(f"note: n^-beta underflows float64 at N={args.n}; switched to the high-precision path "
              f"({problem.precision} bits)", file=sys.stderr)
    rec = RunRecord(_config(args))
    rec.results = {"N": sol.N, "path": sol.path, "method": sol.method, "forced_highprec": sol.forced_highprec,
                   "A_N": str(sol.A[-1]), "a_N": str(sol.a[-1])}
    rec.residuals = {"max": sol.residual_max, "rows_checked": sol.residual_rows, "divergence": sol.divergence}
    rec.timing = {"solve_seconds": sol.seconds}
    tol = args.tol if args.tol is not None else 1e-9
    rec.check("residual", sol.residual_max <= tol, f"max relative residual {sol.residual_max:.3e} <= {tol:g}")
    if sol.divergence is not None:
        rec.check("path-divergence", sol.divergence <= max(tol, 1e-9), f"{sol.divergence:.3e}")
    if args.epsilon:
        rep = hlr_test(sol, args.epsilon)
        rec.results["hlr"] = rep.to_dict()
    buf = io.StringIO()
    sol.to_csv_stream(buf)
    atomic_write(out / "solution.csv", buf.getvalue())
    return _finish(rec, out)


# ---------------------------------------------------------------------------
# reproduce
# ---------------------------------------------------------------------------


def _reproduce_eq1(args, rec, out):
    N = args.n or DEFAULT_N["eq1"]
    t = time.perf_counter()
    chk = summatory_identity_check(N)
    rec.timing["seconds"] = time.perf_counter() - t
    fails = chk.failures
    rec.results = {"N": N, "failures": fails[:20], "failure_count": len(fails)}
    rec.check("eq1", chk.all_equal, f"sum lambda(k) floor(n/k) = floor(sqrt n) for all n <= {N}")


def _reproduce_thm11(args, rec, out):
    N = args.n or DEFAULT_N["thm11"]
    g = Affine(0.5, 0.5)
    t = time.perf_counter()
    sol = solve(VolterraProblem(g, parse_rhs("n^1/2"), N))
    fit = fit_asymptotic(sol, "power")
    ratio = float(sol.A[-1] / math.sqrt(N))
    logc = fit.corrections.get("n^-1 log n")
    exact_n = min(500, N)
    hp = solve(VolterraProblem(g, parse_rhs("n^1/2"), exact_n), path="highprec")
    ref = affine_exact_series(exact_n)
    rel = max(abs((hp.A[i + 1] - ref[i]) / ref[i]) for i in range(exact_n - 1))
    rec.timing["seconds"] = time.perf_counter() - t
    rec.results = {"N": N, "A_N_over_sqrt_N": ratio, "fit": fit.to_dict(),
                   "exact_formula_max_rel_diff": float(rel), "exact_formula_range": [2, exact_n]}
    rec.residuals = {"solve": sol.residual_max, "highprec": hp.residual_max}
    rec.check("leading-constant", abs(ratio - 1.5) <= 1e-3, f"A(N)/sqrt(N) = {ratio:.8f}")
    rec.check("log-correction", logc is not None and abs(logc / (-3 / 16) - 1) <= 0.10,
              f"n^-1/2 log n coefficient {logc:.6f} vs -3/16")
    rec.check("exact-formula", rel <= 1e-10, f"max relative difference {float(rel):.3e} for 2 <= n <= {exact_n}")
    atomic_write(out / "thm11_solution.csv", sol_csv(sol))


def sol_csv(sol) -> str:
    buf = io.StringIO()
    sol.to_csv_stream(buf)
    return buf.getvalue()


def fig1_plot(diag) -> SvgPlot:
    return SvgPlot(diag.n.tolist(), diag.scaled.tolist(), xlabel="n", ylabel="n^(1/2) a(n)",
                   caption="n^(1/2) a(n) for the Davenport-Heilbronn weight g_H with A(n) = n^(-1/3)")


def _reproduce_fig1(args, rec, out):
    N = args.n or DEFAULT_N["fig1"]
    t = time.perf_counter()
    sol = solve(VolterraProblem(GeneralizedIngham(DavenportHeilbronn()), parse_rhs(None, 1 / 3), N))
    diag = slowly_varying_diagnostic(sol, 0.5)
    svg = emit_svg(fig1_plot(diag))
    rec.timing["seconds"] = time.perf_counter() - t
    atomic_write(out / "fig1.svg", svg)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "a_n", "scaled"])
    for n, a, s in zip(diag.n.tolist(), diag.a.tolist(), diag.scaled.tolist()):
        wr.writerow([n, repr(a), repr(s)])
    atomic_write(out / "fig1.csv", buf.getvalue())
    rec.results = {"N": N, "diagnostic": diag.to_dict(), "svg_bytes": len(svg)}
    rec.residuals = {"solve": sol.residual_max}
    rec.check("fig1-bounded-by-log", diag.verdict == "bounded-by-log",
              f"verdict {diag.verdict}; running max / log n in [{diag.ratio_range[0]:.4f}, {diag.ratio_range[1]:.4f}]")
    rec.check("fig1-svg-deterministic", emit_svg(fig1_plot(diag)) == svg, f"{len(svg)} bytes")


DOUBLING_POINTS = (5, 65, 1105)


def _reproduce_remark52(args, rec, out):
    N = max(args.n or DEFAULT_N["remark52"], DOUBLING_POINTS[-1])
    chi = Character(4, 1)
    t = time.perf_counter()
    closed = character_closed_form(1, chi, N)
    sol = solve(VolterraProblem(GeneralizedIngham(chi), parse_rhs(None, 1), N))
    a = sol.a_float()
    rec.timing["seconds"] = time.perf_counter() - t
    rows = []
    for m, P in enumerate(DOUBLING_POINTS, start=1):
        vc, vs = abs(P * closed[P - 1]), abs(P * a[P - 1])
        rows.append({"m": m, "P": P, "closed_form": float(vc), "solver": float(vs), "expected": 2 ** m})
        rec.check(f"remark52-m{m}", abs(vc / 2 ** m - 1) <= 1e-9 and abs(vs / 2 ** m - 1) <= 1e-9,
                  f"|P a(P)| = {float(vc):.12g} (closed form), {float(vs):.12g} (solver), expected {2 ** m}")
    rec.results = {"N": N, "points": rows}
    rec.residuals = {"solve": sol.residual_max}
    atomic_write(out / "remark52.csv", csv_text(["m", "P", "closed_form", "solver", "expected"],
                                                [[r["m"], r["P"], repr(r["closed_form"]), repr(r["solver"]),
                                                  r["expected"]] for r in rows]))


def _reproduce_tau(args, rec, out):
    N = args.n or DEFAULT_N["tau"]
    t = time.perf_counter()
    tau = [0] + ramanujan_tau(N)  # tau[n] = tau(n)
    rng = np.random.default_rng(args.seed)
    limit = min(N, 100)
    mult_fail = [(m, n) for m in range(1, limit + 1) for n in range(1, limit // m + 1)
                 if math.gcd(m, n) == 1 and tau[m * n] != tau[m] * tau[n]]
    extra = []
    for _ in range(200):
        m, n = (int(v) for v in rng.integers(1, int(math.isqrt(N)) + 1, size=2))
        if math.gcd(m, n) == 1 and m * n <= N:
            extra.append((m, n))
    extra_fail = [(m, n) for m, n in extra if tau[m * n] != tau[m] * tau[n]]
    primes = [p for p in range(2, min(N, 100) + 1) if all(p % q for q in range(2, math.isqrt(p) + 1))]
    # |tau(p)| <= 2 p^(11/2)  <=>  tau(p)^2 <= 4 p^11, checked in integers
    deligne_fail = [p for p in primes if tau[p] * tau[p] > 4 * p ** 11]
    rec.timing["seconds"] = time.perf_counter() - t
    rec.results = {"N": N, "first": [int(v) for v in tau[1:11]], "random_pairs": len(extra)}
    rec.check("tau-multiplicative", not mult_fail and not extra_fail,
              f"coprime m n <= {limit}: {len(mult_fail)} failures; {len(extra)} random pairs: {len(extra_fail)}")
    rec.check("tau-deligne", not deligne_fail, f"{len(primes)} primes <= {min(N, 100)}, failures {deligne_fail}")
    atomic_write(out / "tau.csv", csv_text(["n", "tau"], [[n, int(tau[n])] for n in range(1, N + 1)]))


def zeros_csv(zeros) -> str:
    return csv_text(["re", "im", "residual", "factor"],
                    [[repr(z.re), repr(z.im), repr(z.residual), z.factor] for z in zeros])


def _reproduce_dh_zeros(args, rec, out):
    box = ComplexBox.parse(args.box) if args.box else ComplexBox(0, 1, 0, 100)
    tol = args.tol or 1e-10
    t = time.perf_counter()
    zeros = find_zeros(mellin_for_weight(GeneralizedIngham(DavenportHeilbronn())), box, tol)
    rec.timing["seconds"] = time.perf_counter() - t
    off = [z for z in zeros if abs(z.re - 0.5) > 1e-3 and z.winding_certificate == 1]
    rec.results = {"box": asdict(box), "count": len(zeros),
                   "off_line": [{"re": z.re, "im": z.im, "residual": z.residual, "factor": z.factor} for z in off]}
    atomic_write(out / "dh_zeros.csv", zeros_csv(zeros))
    rec.check("dh-off-line-zero", bool(off),
              f"{len(off)} certified zeros with |Re - 1/2| > 1e-3 among {len(zeros)}")


REPRODUCERS = {
    "eq1": _reproduce_eq1,
    "thm11": _reproduce_thm11,
    "fig1": _reproduce_fig1,
    "remark52": _reproduce_remark52,
    "tau": _reproduce_tau,
    "dh-zeros": _reproduce_dh_zeros,
}


def cmd_reproduce(args) -> int:
    out = Path(args.out)
    rec = RunRecord(_config(args))
    REPRODUCERS[args.target](args, rec, out)
    return _finish(rec, out, f"{args.target}.json")


# ---------------------------------------------------------------------------
# mellin
# ---------------------------------------------------------------------------


def cmd_mellin(args) -> int:
    out = Path(args.out)
    m = mellin_for_weight(_weight_from_args(args))
    rec = RunRecord(_config(args))
    tol = args.tol or 1e-10
    t = time.perf_counter()
    if args.action == "eval":
        if not args.z:
            raise UsageError("mellin eval needs at least one --z")
        rows = []
        for zs in args.z:
            try:
                z = complex(zs.replace(" ", ""))
            except ValueError:
                raise UsageError(f"cannot parse --z {zs!r}") from None
            v = complex(m(z))
            rows.append([repr(z.real), repr(z.imag), repr(v.real), repr(v.imag)])
            print(f"g*({zs}) = {v.real!r}" + (f" + {v.imag!r}i" if v.imag else ""))
        rec.results = {"values": rows}
        atomic_write(out / "values.csv", csv_text(["z_re", "z_im", "value_re", "value_im"], rows))
    else:
        if not args.box:
            raise UsageError("mellin zeros needs --box re0,re1,im0,im1")
        zeros = find_zeros(m, ComplexBox.parse(args.box), tol)
        for z in zeros:
            print(f"zero {z.re!r} {z.im!r} residual={z.residual:.2e} factor={z.factor}")
        rec.results = {"count": len(zeros)}
        rec.check("zeros-certified", all(z.winding_certificate == 1 and z.residual <= tol for z in zeros),
                  f"{len(zeros)} zeros")
        atomic_write(out / "zeros.csv", zeros_csv(zeros))
    rec.timing["seconds"] = time.perf_counter() - t
    return _finish(rec, out)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def catalog_text() -> str:
    lines = ["weights:"]
    lines += [f"  {k:28s} {v}" for k, v in WEIGHT_IDS.items()]
    lines.append("sequences:")
    lines += [f"  {k:28s} {v}" for k, v in SEQUENCE_IDS.items()]
    lines.append("reproduce targets:")
    lines.append("  " + ", ".join(TARGETS))
    return "\n".join(lines)


def _epsilons(text: str) -> list:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("epsilon grid is a comma-separated list of numbers") from None


def _bits(text: str) -> int:
    v = int(text)
    if v < 53:
        raise argparse.ArgumentTypeError("precision must be at least 53 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weight", help="weight id (see --list)")
    common.add_argument("--sequence", help="sequence id for gingham weights")
    common.add_argument("--beta", help="exponent beta in A(n) = n^-beta")
    common.add_argument("--rhs", help="right-hand side as n^<exponent>")
    common.add_argument("--n", type=int, help="horizon N")
    common.add_argument("--precision-bits", type=_bits, help="working precision of the high-precision path")
    common.add_argument("--epsilon", type=_epsilons, help="epsilon grid for the HLR test, e.g. 0.05,0.1")
    common.add_argument("--box", help="zero-search box re0,re1,im0,im1")
    common.add_argument("--tol", type=float, help="tolerance")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="gvlab", description="Discrete Volterra equations, Mellin zeros and "
                                "Tauberian growth tests.")
    p.add_argument("--list", action="store_true", help="list weight and sequence ids")
    p.add_argument("--version", action="version", version=f"gvlab {__version__}")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("solve", parents=[common], help="solve A_g(n) = f(n)")
    s.add_argument("--path", choices=("float64", "highprec", "both"), default="float64")

    r = sub.add_parser("reproduce", parents=[common], help="run a reproduction target")
    r.add_argument("target", choices=TARGETS)

    m = sub.add_parser("mellin", parents=[common], help="evaluate g* or locate its zeros")
    m.add_argument("action", choices=("eval", "zeros"))
    m.add_argument("--z", action="append", help="evaluation point (repeatable), e.g. -0.5 or 0.5+14j")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s %(message)s")
    if getattr(args, "list", False):
        print(catalog_text())
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "reproduce":
            return cmd_reproduce(args)
        return cmd_mellin(args)
    except (UsageError, InvalidArgumentError) as exc:
        print(f"gvlab: error: {exc}", file=sys.stderr)
        if "unknown" in str(exc):
            print(catalog_text(), file=sys.stderr)
        return 2
    except GVLabError as exc:
        print(f"gvlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
