"""Command-line front end: ``thetalab <subcommand> [options]``.

Exit codes: 0 success, 1 selftest failure, 2 precondition or usage error,
3 resource error.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import random
import re
import sys
from dataclasses import dataclass, fields, is_dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from . import _config, _phase
from ._config import PreconditionError, ResourceError
from .dav_chowla import dc_report
from .exact_arith import (
    EighthRootPhase,
    ReducedRational,
    kronecker,
    liouville_sieve,
)
from .gauss import (
    ExactGaussSum,
    gauss_sum_bruteforce,
    gauss_sum_closed,
    landsberg_schaar_residual,
    reciprocity_ratio,
    scaling_ratio,
    smith_G,
)
from .local_analysis import (
    PredictedKappa,
    classify_rational,
    derivative_estimate,
    expansion_check,
    fit_exponent,
    holder_exponent,
    infinite_derivative_probe,
    predicted_kappa,
)
from .series import (
    SeriesSpec,
    F_eval,
    nondiff_criteria,
    riemann_series,
    theta_right,
    theta_transform_residual,
    theta_upper,
    to_mpf,
    weierstrass_eval,
)

SCHEMA = "thetalab/1"


@dataclass
class RunConfig:
    precision_bits: int
    output_format: str = "plain"
    seed: int = 0
    thread_count: object = 1


# ------------------------------------------------------------------ parsing

_IMAG_LITERAL = re.compile(r"((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)([ij])\b")
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_number(text: str, wp: int):
    """Evaluate a small arithmetic expression.

    Integers combined with + - * / give an exact Fraction; anything else
    (decimals, pi, e, i, sqrt, exp, log) is evaluated in mpmath at ``wp`` bits.
    """
    src = _IMAG_LITERAL.sub(r"(\1*\2)", str(text).strip())
    try:
        tree = ast.parse(src, mode="eval").body
    except SyntaxError as exc:
        raise PreconditionError(f"cannot parse number {text!r}") from exc

    def exact(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return Fraction(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = exact(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in (ast.Add, ast.Sub, ast.Mult, ast.Div):
            left, right = exact(node.left), exact(node.right)
            if isinstance(node.op, ast.Div) and right == 0:
                raise PreconditionError("division by zero")
            return _BINOPS[type(node.op)](left, right)
        raise LookupError

    names = {"pi": mpmath.pi, "e": mpmath.e, "i": mpmath.j, "j": mpmath.j}
    funcs = {"sqrt": mpmath.sqrt, "exp": mpmath.exp, "log": mpmath.log}

    def approx(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            v = node.value
            return mpmath.mpc(v) if isinstance(v, complex) else mpmath.mpf(repr(v) if isinstance(v, float) else v)
        if isinstance(node, ast.Name) and node.id in names:
            return +names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = approx(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](approx(node.left), approx(node.right))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in funcs and len(node.args) == 1:
            return funcs[node.func.id](approx(node.args[0]))
        raise PreconditionError(f"unsupported expression in {text!r}")

    try:
        return exact(tree)
    except LookupError:
        pass
    # decimal literals are read from their text, so 0.1 means 1/10 to wp bits
    with mpmath.workprec(wp):
        return approx(tree)


def parse_real(text: str, wp: int):
    v = parse_number(text, wp)
    if isinstance(v, mpmath.mpc):
        if v.imag != 0:
            raise PreconditionError(f"expected a real number, got {text!r}")
        return v.real
    return v


def parse_int(text: str) -> int:
    v = parse_number(text, 64)
    if not isinstance(v, Fraction) or v.denominator != 1:
        raise PreconditionError(f"expected an integer, got {text!r}")
    return int(v)


# ------------------------------------------------------------------ output


def _digits(precision: int) -> int:
    return max(17, int(precision * math.log10(2)))


def rounded(v, err):
    """Digit string for v showing only the digits its error bound supports."""
    if isinstance(v, mpmath.mpc):
        return {"re": rounded(v.real, err), "im": rounded(v.imag, err)}
    v = mpmath.mpf(v)
    if not err or not v:
        return v
    digits = int(math.ceil(float(mpmath.log10(abs(v))) - math.log10(err))) + 2
    return mpmath.nstr(v, max(3, min(digits, 60)))


def _evaluation(ev) -> dict:
    return {"value": rounded(ev.value, ev.error), "error_bound": ev.error, "terms": ev.terms}


def jsonable(v, dps: int):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, dps)
    if isinstance(v, mpmath.mpc):
        return {"re": mpmath.nstr(v.real, dps), "im": mpmath.nstr(v.imag, dps)}
    if isinstance(v, complex):
        return {"re": jsonable(v.real, dps), "im": jsonable(v.imag, dps)}
    if isinstance(v, (Fraction, ReducedRational)):
        f = v.fraction if isinstance(v, ReducedRational) else v
        return f"{f.numerator}/{f.denominator}"
    if isinstance(v, EighthRootPhase):
        return v.k
    if isinstance(v, ExactGaussSum):
        return {"is_zero": v.is_zero, "k": v.phase.k, "radicand": v.radicand, "text": str(v)}
    if isinstance(v, PredictedKappa):
        return {"is_zero": v.is_zero, "k": v.phase.k, "p": v.p, "text": str(v), "value": jsonable(complex(v), dps)}
    if isinstance(v, SeriesSpec):
        if v.is_riemann:
            return {"kind": v.kind, "alpha": str(v.alpha), "a": None, "b": None}
        return {"kind": v.kind, "alpha": None, "a": str(v.a), "b": str(v.b)}
    if isinstance(v, dict):
        return {str(k): jsonable(x, dps) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x, dps) for x in v]
    if is_dataclass(v):
        return {f.name: jsonable(getattr(v, f.name), dps) for f in fields(v)}
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _flatten(prefix: str, v, out: list):
    if isinstance(v, dict):
        for k, x in v.items():
            _flatten(f"{prefix}.{k}" if prefix else k, x, out)
    elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
        for i, x in enumerate(v):
            _flatten(f"{prefix}[{i}]", x, out)
    else:
        out.append((prefix, v))


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return format(v, ".17e")
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, list):
        return " ".join(_csv_cell(x) for x in v)
    return str(v)


def render(payload: dict, table, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if table is not None:
            header, rows = table
            w.writerow(header)
            for row in rows:
                w.writerow([_csv_cell(c) for c in row])
        else:
            w.writerow(["key", "value"])
            flat = []
            _flatten("", payload, flat)
            for k, v in flat:
                w.writerow([k, _csv_cell(v)])
        return buf.getvalue()
    flat = []
    _flatten("", payload, flat)
    return "".join(f"{k}: {_csv_cell(v) if isinstance(v, list) else v}\n" for k, v in flat)


# ------------------------------------------------------------------ commands


def _rational(text: str) -> ReducedRational:
    return ReducedRational.parse(text)


def cmd_gauss_sum(args, cfg):
    b, a = parse_int(args.b), parse_int(args.a)
    prec = cfg.precision_bits
    out = {}
    brute = closed = None
    if args.mode in ("brute", "both"):
        brute = gauss_sum_bruteforce(b, a, prec)
        out["brute"] = {"value": brute, "error_bound": 2.0 ** -(prec // 2)}
    if args.mode in ("closed", "both"):
        if b < 0:
            b_, a_ = -b, -a
        else:
            b_, a_ = b, a
        closed = gauss_sum_closed(b_, a_)
        out["closed"] = closed
        out["closed_value"] = closed.value(prec)
    if brute is not None and closed is not None:
        with mpmath.workprec(prec):
            out["agree"] = bool(abs(brute - closed.value(prec)) <= mpmath.ldexp(1, -(prec // 2)))
    return {"b": b, "a": a, **out}, None


def cmd_smith_g(args, cfg):
    r, s = parse_int(args.r), parse_int(args.s)
    v = smith_G(r, s, cfg.precision_bits)
    return {"r": r, "s": s, "value": v, "error_bound": 2.0 ** -(cfg.precision_bits // 2)}, None


def _ratio_payload(res, prec):
    if res.degenerate:
        return {"degenerate": True, "ratio": None, "error_bound": None}
    return {"degenerate": False, "ratio": res.value, "error_bound": 2.0 ** -(prec // 2)}


def cmd_reciprocity(args, cfg):
    p, q = parse_int(args.p), parse_int(args.q)
    return {"p": p, "q": q, **_ratio_payload(reciprocity_ratio(p, q, cfg.precision_bits), cfg.precision_bits)}, None


def cmd_landsberg(args, cfg):
    p, q = parse_int(args.p), parse_int(args.q)
    r = landsberg_schaar_residual(p, q, cfg.precision_bits)
    return {"p": p, "q": q, "residual": r, "tolerance": 2.0 ** -(cfg.precision_bits // 2)}, None


def cmd_scaling(args, cfg):
    a, b, k = parse_int(args.a), parse_int(args.b), parse_int(args.k)
    return {"a": a, "b": b, "k": k, **_ratio_payload(scaling_ratio(a, b, k, cfg.precision_bits), cfg.precision_bits)}, None


def _mpc_arg(text, wp):
    v = parse_number(text, wp)
    with mpmath.workprec(wp):
        return mpmath.mpc(to_mpf(v)) if isinstance(v, Fraction) else mpmath.mpc(v)


def cmd_theta(args, cfg):
    prec = cfg.precision_bits
    wp = prec + _config.GUARD_BITS
    z = _mpc_arg(args.z, wp)
    if args.kind == "transform":
        return {"kind": "transform", "z": z, "residual": theta_transform_residual(z, prec),
                "tolerance": 2.0 ** -(prec // 2)}, None
    ev = theta_upper(z, prec) if args.kind == "upper" else theta_right(z, prec)
    return {"kind": args.kind, "z": z, **_evaluation(ev)}, None


def cmd_f_eval(args, cfg):
    prec = cfg.precision_bits
    v = parse_number(args.z, prec + _config.GUARD_BITS)
    if isinstance(v, mpmath.mpf):
        v = mpmath.mpc(v)
    ev = F_eval(v, prec, args.terms)
    return {"z": v, **_evaluation(ev)}, None


def cmd_riemann(args, cfg):
    prec = cfg.precision_bits
    spec = SeriesSpec("riemann_" + args.kind, alpha=parse_real(args.alpha, prec))
    x = parse_real(args.x, prec + _config.GUARD_BITS)
    ev = riemann_series(spec, x, prec, args.terms)
    return {"spec": spec, "x": to_mpf(x, prec), **_evaluation(ev)}, None


def cmd_weierstrass(args, cfg):
    prec = cfg.precision_bits
    spec = SeriesSpec("weierstrass_" + args.kind, a=parse_real(args.a, prec), b=parse_real(args.b, prec))
    x = parse_real(args.x, prec + _config.GUARD_BITS)
    ev = weierstrass_eval(spec, x, prec, args.terms)
    return {"spec": spec, "x": to_mpf(x, prec), "xi": spec.xi, **_evaluation(ev)}, None


def _exact_or_real(text: str):
    try:
        return Fraction(text.strip())
    except ValueError:
        return parse_real(text, 256)


def cmd_criteria(args, cfg):
    return nondiff_criteria(_exact_or_real(args.a), _exact_or_real(args.b)), None


def cmd_classify(args, cfg):
    xi = _rational(args.xi)
    v = classify_rational(xi)
    return {"input": args.xi, "point": v.point, "two_sided": v.two_sided, "right": v.right,
            "left": v.left, "symmetric": v.symmetric, "kappa": v.kappa}, None


def cmd_expansion(args, cfg):
    xi = _rational(args.xi)
    r = expansion_check(xi, args.h_min, args.h_max, args.steps, cfg.precision_bits, args.epsilon)
    payload = {
        "input": args.xi, "point": r.point, "epsilon": r.epsilon, "terms": r.terms,
        "kappa_fitted": r.kappa_fitted, "kappa_predicted": r.kappa_predicted,
        "kappa_error": r.kappa_error, "max_model_residual": r.max_model_residual,
        "fitted_exponent": r.fitted_exponent, "error_bound": r.error_bound, "exact_match": r.exact_match,
        "grid": [{"h": h, "dF": d, "model": m, "residual": res} for h, d, m, res in r.rows],
    }
    table = (["h", "re_dF", "im_dF", "re_model", "im_model", "residual"],
             [(h, d.real, d.imag, m.real, m.imag, res) for h, d, m, res in r.rows])
    return payload, table


def cmd_derivative(args, cfg):
    xi = _rational(args.xi)
    r = derivative_estimate(xi, cfg.precision_bits)
    payload = {"input": args.xi, "point": r.point, "value": r.value,
               "right": r.right, "left": r.left,
               "right_converged": r.right_converged, "left_converged": r.left_converged,
               "right_growth": r.right_growth, "left_growth": r.left_growth,
               "scales": r.scales, "right_quotients": r.right_quotients, "left_quotients": r.left_quotients}
    table = (["h", "right_quotient", "left_quotient"],
             list(zip(r.scales, r.right_quotients, r.left_quotients)))
    return payload, table


def _series_spec(args, prec) -> SeriesSpec:
    if args.kind.startswith("riemann"):
        return SeriesSpec(args.kind, alpha=parse_real(args.alpha, prec))
    if args.a is None or args.b is None:
        raise PreconditionError("weierstrass kinds need --a and --b")
    return SeriesSpec(args.kind, a=parse_real(args.a, prec), b=parse_real(args.b, prec))


def cmd_holder(args, cfg):
    prec = cfg.precision_bits
    spec = _series_spec(args, prec)
    x = parse_real(args.x, prec + _config.GUARD_BITS)
    r = holder_exponent(spec, x, args.h_min, args.h_max, args.steps, prec)
    payload = {"spec": r.spec, "point": r.point, "estimated_exponent": r.estimated_exponent,
               "expected": r.expected, "regression_residual": r.regression_residual,
               "h_range": list(r.h_range), "used": r.used, "inconclusive": r.inconclusive,
               "grid": [{"h": h, "increment": v} for h, v in zip(r.h_grid, r.increments)]}
    return payload, (["h", "increment"], list(zip(r.h_grid, r.increments)))


def cmd_ht3(args, cfg):
    a, b = parse_real(args.a, 256), parse_real(args.b, 256)
    r = infinite_derivative_probe(a, b, args.kind, args.k_max, cfg.precision_bits)
    payload = {"a": r.a, "b": r.b, "kind": r.kind, "hypothesis_met": r.hypothesis_met,
               "strictly_increasing": r.strictly_increasing, "exceeds_1e3": r.exceeds_1e3,
               "claim_holds": r.claim_holds,
               "rows": [{"k": k, "h": h, "quotient": q} for k, h, q in r.rows]}
    return payload, (["k", "h", "quotient"], r.rows)


def cmd_dc(args, cfg):
    x = parse_real(args.x, 160)
    schedule = [parse_int(s) for s in args.schedule.split(",")]
    if min(schedule) < 1 or max(schedule) > _phase.MAX_INDEX:
        raise PreconditionError(f"schedule entries must lie in [1, {_phase.MAX_INDEX}]")
    table = liouville_sieve(max(schedule))
    r = dc_report(x, schedule, table)
    payload = {"x": args.x, "schedule": r.schedule, "lhs_partials": r.lhs_partials,
               "rhs_value": r.rhs_value, "rhs_error_bound": r.rhs_error_bound, "residuals": r.residuals,
               "final_below_bound": r.final_below_bound, "trend_non_increasing": r.trend_non_increasing}
    return payload, (["N", "lhs_partial", "residual"], list(zip(r.schedule, r.lhs_partials, r.residuals)))


# ------------------------------------------------------------------ selftest


def _selftest_checks(cfg):
    rng = random.Random(cfg.seed)
    prec = cfg.precision_bits
    tol = mpmath.ldexp(1, -(prec // 4))

    def kronecker_laws():
        primes = [p for p in range(3, 98) if all(p % d for d in range(2, p))]
        recip = all(
            kronecker(p, q) * kronecker(q, p) == (-1) ** (((p - 1) // 2) * ((q - 1) // 2))
            for p in primes for q in primes if p != q
        )
        mult = all(
            kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)
            for a in range(-30, 31) for b in range(-30, 31) for n in range(1, 40)
        )
        return recip and mult

    def liouville():
        N = 10**4
        t = liouville_sieve(N)
        return all(t[m * n] == t[m] * t[n] for m in range(1, 101) for n in range(1, N // m + 1))

    def closed_forms():
        return all(
            abs(gauss_sum_bruteforce(p, q, prec) - gauss_sum_closed(p, q).value(prec)) <= tol
            for p in range(1, 61) for q in range(-20, 21) if math.gcd(p, q) == 1
        )

    def reciprocity():
        vals = []
        while len(vals) < 20:
            p, q = rng.randint(1, 200), rng.choice([-1, 1]) * rng.randint(1, 200)
            if math.gcd(p, q) == 1:
                r = reciprocity_ratio(p, q, prec)
                if not r.degenerate:
                    vals.append(r.value)
        return all(abs(v - mpmath.mpf(0.5)) <= tol for v in vals)

    def landsberg():
        return all(landsberg_schaar_residual(p, q, prec) <= tol for p in range(1, 13) for q in range(1, 13))

    def theta_transform():
        zs = [mpmath.mpc(rng.uniform(-5, 5), rng.uniform(0.05, 10)) for _ in range(5)]
        return all(theta_transform_residual(z, prec) <= mpmath.ldexp(1, -(prec // 2)) for z in zs)

    def classification():
        for s in range(1, 31):
            for r in range(0, 31):
                if math.gcd(r, s) != 1:
                    continue
                v = classify_rational(f"{r}/{s}")
                G = smith_G(r, s, 96)
                if (r * s) % 2:
                    if (v.right, v.left, v.symmetric) != ("zero",) * 3:
                        return False
                    continue
                C, S = G.real, G.imag
                expect = (
                    "zero" if abs(S - C) < 1e-9 else "infinite",
                    "zero" if abs(S + C) < 1e-9 else "infinite",
                    "zero" if abs(C) < 1e-9 else "infinite",
                )
                if (v.right, v.left, v.symmetric) != expect:
                    return False
        return True

    def kappa_oracle():
        for p in range(1, 13):
            for q in range(0, 2 * p):
                if math.gcd(p, q) != 1:
                    continue
                s = sum(mpmath.expjpi(mpmath.mpf(n * n * q) / p) for n in range(2 * p)) / (2 * p)
                if abs(mpmath.expjpi(0.25) * s - predicted_kappa(f"{q}/{p}").value(64)) > 1e-12:
                    return False
        return True

    def derivative():
        r = derivative_estimate("1/1", prec)
        return r.value is not None and abs(r.value + 0.5) <= 5e-3

    def synthetic_holder():
        hs = [10.0**-k for k in range(1, 9)]
        return abs(fit_exponent(hs, [h**0.75 for h in hs])[0] - 0.75) <= 1e-6

    def davenport_chowla():
        r = dc_report(Fraction(1, 4), [4], liouville_sieve(4))
        return abs(r.lhs_partials[0] + 1 / 3) < 1e-15

    return [
        ("kronecker_laws", kronecker_laws),
        ("liouville_multiplicative", liouville),
        ("closed_forms", closed_forms),
        ("reciprocity_constant", reciprocity),
        ("landsberg_schaar", landsberg),
        ("theta_transform", theta_transform),
        ("classification", classification),
        ("kappa_oracle", kappa_oracle),
        ("derivative_1_1", derivative),
        ("synthetic_holder", synthetic_holder),
        ("davenport_chowla_small", davenport_chowla),
    ]


def cmd_selftest(args, cfg):
    results = [{"check": name, "passed": bool(fn())} for name, fn in _selftest_checks(cfg)]
    payload = {"checks": results, "all_passed": all(r["passed"] for r in results)}
    return payload, (["check", "passed"], [(r["check"], r["passed"]) for r in results])


# ------------------------------------------------------------------ schemas

_EVAL = {"value", "error_bound", "terms"}

# result keys per subcommand; gauss-sum keys depend on --mode
SCHEMAS = {
    "gauss-sum": {"b", "a"},
    "smith-g": {"r", "s", "value", "error_bound"},
    "reciprocity": {"p", "q", "degenerate", "ratio", "error_bound"},
    "landsberg-schaar": {"p", "q", "residual", "tolerance"},
    "scaling": {"a", "b", "k", "degenerate", "ratio", "error_bound"},
    "theta": {"kind", "z"},
    "f-eval": {"z"} | _EVAL,
    "riemann": {"spec", "x"} | _EVAL,
    "weierstrass": {"spec", "x", "xi"} | _EVAL,
    "criteria": {"a", "b", "weierstrass", "bromwich", "dini_pair", "lerch_pair", "dini_general", "dini_general2", "hardy"},
    "classify": {"input", "point", "two_sided", "right", "left", "symmetric", "kappa"},
    "expansion": {"input", "point", "epsilon", "terms", "kappa_fitted", "kappa_predicted", "kappa_error",
                  "max_model_residual", "fitted_exponent", "error_bound", "exact_match", "grid"},
    "derivative": {"input", "point", "value", "right", "left", "right_converged", "left_converged",
                   "right_growth", "left_growth", "scales", "right_quotients", "left_quotients"},
    "holder": {"spec", "point", "estimated_exponent", "expected", "regression_residual", "h_range", "used",
               "inconclusive", "grid"},
    "ht3-probe": {"a", "b", "kind", "hypothesis_met", "strictly_increasing", "exceeds_1e3", "claim_holds", "rows"},
    "dc": {"x", "schedule", "lhs_partials", "rhs_value", "rhs_error_bound", "residuals", "final_below_bound",
           "trend_non_increasing"},
    "selftest": {"checks", "all_passed"},
}
_OPTIONAL = {
    "gauss-sum": {"brute", "closed", "closed_value", "agree"},
    "theta": _EVAL | {"residual", "tolerance"},
}


def validate(payload: dict) -> None:
    """Raise ValueError unless ``payload`` matches the declared layout."""
    if set(payload) != {"schema", "command", "precision", "result"}:
        raise ValueError(f"unexpected top-level keys {sorted(payload)}")
    if payload["schema"] != SCHEMA:
        raise ValueError(f"unknown schema {payload['schema']!r}")
    cmd = payload["command"]
    if cmd not in SCHEMAS:
        raise ValueError(f"unknown command {cmd!r}")
    if not isinstance(payload["precision"], int) or payload["precision"] < _config.MIN_PRECISION:
        raise ValueError("bad precision")
    keys = set(payload["result"])
    missing = SCHEMAS[cmd] - keys
    extra = keys - SCHEMAS[cmd] - _OPTIONAL.get(cmd, set())
    if missing or extra:
        raise ValueError(f"{cmd}: missing {sorted(missing)}, unexpected {sorted(extra)}")


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="working precision in bits (default 192 or $THETALAB_PRECISION)")
    common.add_argument("--format", choices=("json", "csv", "plain"), default="plain")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised sweeps")
    common.add_argument("--threads", default="1", help="worker threads, an integer or 'auto'")

    parser = argparse.ArgumentParser(prog="thetalab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(fn=fn)
        return p

    p = add("gauss-sum", cmd_gauss_sum, "quadratic Gauss sum S(b, a)")
    p.add_argument("--b", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--mode", choices=("brute", "closed", "both"), default="both")

    p = add("smith-g", cmd_smith_g, "half-weight sum G(r/s)")
    p.add_argument("--r", required=True)
    p.add_argument("--s", required=True)

    p = add("reciprocity", cmd_reciprocity, "reciprocity ratio for S(p, q)")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = add("landsberg-schaar", cmd_landsberg, "Landsberg-Schaar residual")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = add("scaling", cmd_scaling, "S(ka, kb)/S(a, b)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--k", required=True)

    p = add("theta", cmd_theta, "Theta(z), theta(s) or the transformation residual")
    p.add_argument("--z", required=True, help="point, e.g. '0.5+1i'; for --kind right this is s")
    p.add_argument("--kind", choices=("upper", "right", "transform"), default="upper")

    p = add("f-eval", cmd_f_eval, "F(z) for Im z >= 0")
    p.add_argument("--z", required=True, help="point, e.g. '1/3' (exact) or '0.1+1e-6i'")
    p.add_argument("--terms", type=int, default=None)

    p = add("riemann", cmd_riemann, "sum sin(n^2 x)/n^alpha or the cosine analogue")
    p.add_argument("--x", required=True, help="radians; expressions like 'pi/2' allowed")
    p.add_argument("--alpha", default="2")
    p.add_argument("--kind", choices=("sin", "cos"), default="sin")
    p.add_argument("--terms", type=int, default=None)

    p = add("weierstrass", cmd_weierstrass, "sum a^n cos(b^n pi x) or the sine analogue")
    p.add_argument("--x", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--kind", choices=("cos", "sin"), default="cos")
    p.add_argument("--terms", type=int, default=None)

    p = add("criteria", cmd_criteria, "classical non-differentiability conditions")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = add("classify", cmd_classify, "derivative classification at a rational point")
    p.add_argument("--xi", required=True, help="rational 'q/p'")

    p = add("expansion", cmd_expansion, "fit the local coefficient of F at a rational")
    p.add_argument("--xi", required=True)
    p.add_argument("--h-min", type=float, default=1e-5)
    p.add_argument("--h-max", type=float, default=1e-2)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--epsilon", type=float, default=None)

    p = add("derivative", cmd_derivative, "one-sided derivative estimates of Riemann's function")
    p.add_argument("--xi", required=True)

    p = add("holder", cmd_holder, "Hoelder exponent by log-log regression")
    p.add_argument("--kind", choices=("weierstrass_cos", "weierstrass_sin", "riemann_sin", "riemann_cos"), required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--a", default=None)
    p.add_argument("--b", default=None)
    p.add_argument("--alpha", default="2")
    p.add_argument("--h-min", type=float, default=1e-8)
    p.add_argument("--h-max", type=float, default=1e-2)
    p.add_argument("--steps", type=int, default=21)

    p = add("ht3-probe", cmd_ht3, "difference quotients at h = b^-k")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--kind", choices=("sine", "cosine_shifted"), default="sine")
    p.add_argument("--k-max", type=int, default=20)

    p = add("dc", cmd_dc, "Davenport-Chowla partial sums against the series side")
    p.add_argument("--x", required=True)
    p.add_argument("--schedule", default="1000,10000,100000,1000000,10000000")

    add("selftest", cmd_selftest, "run the fast invariant suite")
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        precision = _config.check_precision(args.precision) if args.precision is not None else _config.default_precision()
        threads = "auto" if args.threads == "auto" else int(args.threads)
        cfg = RunConfig(precision, args.format, args.seed, threads)
        with _config.threads(cfg.thread_count), mpmath.workprec(precision):
            result, table = args.fn(args, cfg)
        payload = {"schema": SCHEMA, "command": args.command, "precision": precision,
                   "result": jsonable(result, _digits(precision))}
        stdout.write(render(payload, table, cfg.output_format))
    except PreconditionError as exc:
        print(f"thetalab: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"thetalab: {exc}", file=sys.stderr)
        return 3
    except MemoryError:
        print("thetalab: out of memory", file=sys.stderr)
        return 3
    except (ValueError, ZeroDivisionError) as exc:
        print(f"thetalab: {exc}", file=sys.stderr)
        return 2
    if args.command == "selftest" and not payload["result"]["all_passed"]:
        return 1
    return 0


def main(argv=None) -> int:
    return run(argv)
