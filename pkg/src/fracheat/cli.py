"""Command-line front end.

Every command dispatches to the library modules and emits a deterministic
machine-readable report (JSON or CSV) with method tags on each numeric.
Exit codes: 0 success, 2 validation error, 3 numerical-quality failure,
1 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import decay_analysis, pde_solver, subordination
from .errors import (
    EvaluationError,
    FracHeatError,
    InsufficientDataError,
    QuadratureError,
)
from .special_functions import (
    Alpha,
    EvalPolicy,
    mittag_leffler_contour,
    mittag_leffler_neg,
    mittag_leffler_neg_info,
    wright_m,
    wright_m_info,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_QUALITY = 3


class QualityFailure(FracHeatError):
    """A verification table exceeded its tolerance (exit code 3)."""


def _default_policy(tol: float | None = None) -> EvalPolicy:
    precision = os.environ.get("FRAC_HEAT_PRECISION", "standard")
    if precision not in ("standard", "extended"):
        raise ValueError(
            f"FRAC_HEAT_PRECISION must be 'standard' or 'extended', got {precision!r}"
        )
    kwargs = {"working_precision": precision}
    if tol is not None:
        kwargs["series_tol"] = tol
    return EvalPolicy(**kwargs)


# ---------------------------------------------------------------------------
# config file: flat key=value lines; flags override file values
# ---------------------------------------------------------------------------

def _load_config(path: str, known_keys: set[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in known_keys:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = value.strip()
    return out


def _merge_config(args: argparse.Namespace, parser_defaults: dict) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    known = {k for k in vars(args) if k not in ("config", "command", "func", "inputs")}
    cfg = _load_config(args.config, known)
    for key, text in cfg.items():
        if getattr(args, key) == parser_defaults.get(key):
            default = parser_defaults.get(key)
            caster = type(default) if default is not None and not isinstance(default, bool) else str
            if isinstance(default, bool):
                setattr(args, key, text.lower() in ("1", "true", "yes"))
            elif default is None:
                setattr(args, key, text)
            else:
                setattr(args, key, caster(text))
    return args


# ---------------------------------------------------------------------------
# deterministic report emission
# ---------------------------------------------------------------------------

_SORT_KEYS = ("command", "alpha", "lambda", "p", "q", "gamma", "beta", "delta",
              "eps", "t", "x", "s", "check")


def _record_sort_key(rec: dict) -> tuple:
    key = []
    for k in _SORT_KEYS:
        v = rec.get(k)
        key.append((v is None, str(type(v).__name__), v if v is not None else 0))
    key.append(json.dumps(rec, sort_keys=True, default=str))
    return tuple(key)


def _atomic_write(path: str, data: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent) or ".", prefix=".fracheat-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, str(target))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _format_value(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return float(v)
    return v


def emit_report(records: list[dict], fmt: str, out: str | None) -> None:
    """Sorted, schema-versioned report; identical inputs yield
    byte-identical output."""
    if not records:
        raise ValueError("empty result set")
    records = sorted(({k: _format_value(v) for k, v in r.items()} for r in records),
                     key=_record_sort_key)
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "records": records}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        cols = sorted({k for r in records for k in r})
        lines = [",".join(cols)]
        for r in records:
            lines.append(",".join("" if r.get(c) is None else str(r.get(c)) for c in cols))
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _parse_alphas(text: str) -> list[float]:
    return [float(a) for a in text.split(",") if a.strip()]


def cmd_eval_ml(args) -> list[dict]:
    policy = _default_policy(args.tol)
    value, method = mittag_leffler_neg_info(args.alpha, args.x, policy)
    print(f"E_alpha(-x) = {value!r}   [alpha={args.alpha}, x={args.x}, method={method}]")
    return [{"command": "eval-ml", "alpha": args.alpha, "x": args.x,
             "value": value, "method": method}]


def cmd_eval_wright(args) -> list[dict]:
    policy = _default_policy(args.tol)
    res = wright_m_info(args.alpha, args.s, policy)
    if not res.reliable:
        raise QualityFailure(f"M_alpha unreliable at alpha={args.alpha}, s={args.s}")
    print(f"M_alpha(s) = {res.value!r}   [alpha={args.alpha}, s={args.s}, method={res.method}]")
    return [{"command": "eval-wright", "alpha": args.alpha, "s": args.s,
             "value": res.value, "method": res.method}]


def cmd_verify_subordination(args) -> list[dict]:
    policy = _default_policy(args.tol)
    records = []
    worst_overall = 0.0
    for a in _parse_alphas(args.alpha):
        xs = np.logspace(-3, 2, 30)
        worst = 0.0
        for x in xs:
            sub = subordination.subordinate_scalar(a, float(x))
            direct = mittag_leffler_neg(a, float(x), policy)
            worst = max(worst, abs(sub - direct))
        records.append({"command": "verify-subordination", "alpha": a,
                        "worst_abs_error": worst, "n_points": 30,
                        "tolerance": 1e-8, "method": "quadrature-vs-series"})
        worst_overall = max(worst_overall, worst)
        print(f"alpha={a}: worst |subordination - direct| = {worst:.3e}")
    if worst_overall > 1e-8:
        raise QualityFailure(f"subordination identity error {worst_overall:.3e} > 1e-8")
    return records


def cmd_verify_moments(args) -> list[dict]:
    records = []
    worst = 0.0
    for a in _parse_alphas(args.alpha):
        for g in (-0.5, 0.0, 0.5, 1.0, 2.0, 3.0):
            numeric = subordination.wright_moment(a, g)
            exact = math.gamma(g + 1.0) / math.gamma(g * a + 1.0)
            rel = abs(numeric - exact) / abs(exact)
            worst = max(worst, rel)
            records.append({"command": "verify-moments", "alpha": a, "gamma": g,
                            "numeric": numeric, "exact": exact,
                            "relative_error": rel, "method": "quadrature"})
            print(f"alpha={a} gamma={g:5.1f}: rel error {rel:.3e}")
    if worst > 1e-6:
        raise QualityFailure(f"moment identity error {worst:.3e} > 1e-6")
    return records


def cmd_verify_special(args) -> list[dict]:
    policy = _default_policy(args.tol)
    records = []

    def check(name: str, worst: float, tol: float) -> None:
        ok = worst <= tol
        records.append({"command": "verify-special", "check": name,
                        "worst_error": worst, "tolerance": tol,
                        "passed": ok, "method": "cross-check"})
        print(f"{name}: worst {worst:.3e} (tol {tol:g}) {'ok' if ok else 'FAIL'}")
        if not ok:
            raise QualityFailure(f"{name}: {worst:.3e} > {tol:g}")

    xs = np.linspace(0.0, 30.0, 61)
    check("alpha-1-exponential-reduction",
          max(abs(mittag_leffler_neg(1.0, float(x), policy) - math.exp(-x)) for x in xs),
          1e-12)
    worst = 0.0
    for a in (0.5, 0.75, 0.9):
        for x in (0.1, 1.0, 10.0):
            worst = max(worst, abs(mittag_leffler_contour(a, x, policy)
                                   - mittag_leffler_neg(a, x, policy)))
    check("contour-vs-series-agreement", worst, 1e-10)
    worst = 0.0
    for s in np.linspace(0.0, 8.0, 81):
        exact = math.exp(-s * s / 4.0) / math.sqrt(math.pi)
        worst = max(worst, abs(wright_m(0.5, float(s), policy) - exact))
    check("wright-half-gaussian-identity", worst, 1e-10)
    return records


def cmd_decay_sup(args) -> list[dict]:
    beta = args.lmbda * (1.0 / args.p - 1.0 / args.q)
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"lambda*(1/p-1/q) = {beta} must lie in (0, 1]")
    records = []
    heat = decay_analysis.sup_heat_closed_form(beta, args.t)
    records.append({"command": "decay-sup", "alpha": args.alpha, "lambda": args.lmbda,
                    "p": args.p, "q": args.q, "beta": beta, "t": args.t,
                    "kernel": "heat", "value": heat, "method": "closed-form"})
    ml = decay_analysis.sup_ml_numeric(args.alpha, beta, args.t, exact_kernel=True)
    records.append({"command": "decay-sup", "alpha": args.alpha, "lambda": args.lmbda,
                    "p": args.p, "q": args.q, "beta": beta, "t": args.t,
                    "kernel": "mittag-leffler", "value": ml, "method": "grid-supremum"})
    bound = decay_analysis.sup_bound_kernel_closed_form(args.alpha, beta, args.t)
    records.append({"command": "decay-sup", "alpha": args.alpha, "lambda": args.lmbda,
                    "p": args.p, "q": args.q, "beta": beta, "t": args.t,
                    "kernel": "algebraic-bound", "value": bound, "method": "closed-form"})
    for r in records:
        print(f"{r['kernel']}: sup = {r['value']!r} ({r['method']})")
    return records


def cmd_decay_compare(args) -> list[dict]:
    eps = [float(e) for e in args.eps.split(",") if e.strip()]
    report = decay_analysis.compare_representations(
        args.alpha, args.lmbda, args.p, args.q, eps)
    records = []
    for rec in report.records:
        records.append({"command": "decay-compare", "alpha": rec.alpha,
                        "lambda": rec.lambda_exp, "p": rec.p, "q": rec.q,
                        "delta": rec.delta, "eps": rec.eps,
                        "representation": rec.representation,
                        "constant": rec.constant, "slope": rec.slope,
                        "method": rec.method})
    records.append({"command": "decay-compare", "alpha": Alpha.coerce(args.alpha),
                    "lambda": args.lmbda, "p": args.p, "q": args.q,
                    "verdict": report.verdict,
                    "direct_uniform_bound": report.direct_uniform_bound,
                    "method": "grid-supremum"})
    print(report.verdict)
    return records


def cmd_solve(args) -> list[dict]:
    grid = pde_solver.PeriodicGrid(dim=args.dim, box_length=args.box_length,
                                   points_per_dim=args.n_points)
    w0 = pde_solver.gaussian_bump(grid, sigma=args.sigma)
    rep = "direct_ml" if args.rep == "direct" else args.rep
    cfg = pde_solver.SolverConfig(alpha=Alpha(args.alpha), representation=rep)
    w = pde_solver.spectral_solve(w0, cfg, args.t)
    if args.field_out:
        pde_solver.write_field(w, args.field_out, time=args.t)
    rec = {"command": "solve", "alpha": args.alpha, "t": args.t,
           "representation": cfg.representation, "dim": args.dim,
           "L": args.box_length, "N": args.n_points,
           "norm_l2": w.norm_lp(2.0), "max_norm": w.max_norm(),
           "mean": w.mean(), "method": cfg.representation}
    print(f"t={args.t}: ||w||_2 = {rec['norm_l2']!r}, max = {rec['max_norm']!r}")
    return [rec]


def cmd_report(args) -> list[dict]:
    records: list[dict] = []
    for path in args.inputs:
        doc = json.loads(Path(path).read_text())
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"{path}: unsupported schema version {doc.get('schema_version')}")
        records.extend(doc["records"])
    return records


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> tuple[argparse.ArgumentParser, dict[str, dict]]:
    defaults_map: dict[str, dict] = {}
    parser = argparse.ArgumentParser(
        prog="fracheat",
        description="Numerical laboratory for the time-fractional heat propagator: "
                    "direct Mittag-Leffler evaluation vs Wright subordination.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat key=value config file; flags override")
        p.add_argument("--out", default=None, help="report output path (default stdout)")
        p.add_argument("--format", default="json", choices=("json", "csv"))
        p.add_argument("--tol", type=float, default=None,
                       help="relative evaluation tolerance")

    p = sub.add_parser("eval-ml", help="evaluate E_alpha(-x)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_eval_ml)

    p = sub.add_parser("eval-wright", help="evaluate M_alpha(s)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_eval_wright)

    p = sub.add_parser("verify-subordination",
                       help="check int M_alpha(s) e^{-sx} ds == E_alpha(-x)")
    p.add_argument("--alpha", default="0.25,0.5,0.75",
                   help="comma-separated alpha values")
    common(p)
    p.set_defaults(func=cmd_verify_subordination)

    p = sub.add_parser("verify-moments",
                       help="check int s^gamma M_alpha ds == Gamma(gamma+1)/Gamma(gamma*alpha+1)")
    p.add_argument("--alpha", default="0.25,0.5,0.75")
    common(p)
    p.set_defaults(func=cmd_verify_moments)

    p = sub.add_parser("verify-special",
                       help="cross-checks: alpha=1 reduction, contour agreement, Wright identity")
    common(p)
    p.set_defaults(func=cmd_verify_special)

    p = sub.add_parser("decay-sup", help="supremum values for the three decay kernels")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lambda", dest="lmbda", type=float, required=True)
    p.add_argument("--p", type=float, default=4.0 / 3.0)
    p.add_argument("--q", type=float, default=4.0)
    p.add_argument("--t", type=float, default=1.0)
    common(p)
    p.set_defaults(func=cmd_decay_sup)

    p = sub.add_parser("decay-compare",
                       help="endpoint-loss comparison of the two representations")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lambda", dest="lmbda", type=float, required=True)
    p.add_argument("--p", type=float, default=4.0 / 3.0)
    p.add_argument("--q", type=float, default=4.0)
    p.add_argument("--eps", default="0.2,0.1,0.05",
                   help="comma-separated distances to the endpoint")
    common(p)
    p.set_defaults(func=cmd_decay_compare)

    p = sub.add_parser("solve", help="evolve a Gaussian bump on a periodic box")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--rep", default="direct",
                   choices=("direct", "subordination"))
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--L", dest="box_length", type=float, default=200.0)
    p.add_argument("--N", dest="n_points", type=int, default=4096)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--field-out", default=None,
                   help="write the evolved field (binary + JSON sidecar)")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("report", help="merge JSON reports into one sorted document")
    p.add_argument("inputs", nargs="+", help="input JSON report files")
    common(p)
    p.set_defaults(func=cmd_report)

    for name, subparser in sub.choices.items():
        defaults_map[name] = {a.dest: a.default for a in subparser._actions}
    return parser, defaults_map


def main(argv: list[str] | None = None) -> int:
    parser, defaults_map = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses code 2 for usage errors, which matches the
        # validation exit code; propagate anything else unchanged
        return int(exc.code or 0)
    defaults = defaults_map[args.command]
    try:
        args = _merge_config(args, defaults)
        records = args.func(args)
        emit_report(records, args.format, args.out)
        return EXIT_OK
    except QualityFailure as exc:
        # the report (if any) is still useful for diagnosis
        print(f"error code={EXIT_QUALITY} type={type(exc).__name__} message={str(exc)!r}",
              file=sys.stderr)
        return EXIT_QUALITY
    except (EvaluationError, QuadratureError) as exc:
        print(f"error code={EXIT_QUALITY} type={type(exc).__name__} message={str(exc)!r}",
              file=sys.stderr)
        return EXIT_QUALITY
    except (ValueError, InsufficientDataError, OverflowError, FileNotFoundError) as exc:
        print(f"error code={EXIT_VALIDATION} type={type(exc).__name__} message={str(exc)!r}",
              file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error code={EXIT_INTERNAL} type={type(exc).__name__} message={str(exc)!r}",
              file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
