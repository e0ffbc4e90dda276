"""``orthowg`` command line."""

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

from .asymptotics import LimitDistribution, limit_cov_powers, limit_covariance_spoke
from .montecarlo import SamplerConfig, estimate_cumulant, estimate_moment
from .parser import WordSyntaxError, parse_word, to_wordspec
from .trace_calculus import (
    ENGINE_CAP,
    MatrixSet,
    Symbol,
    covariance_symbolic,
    cumulant_expression,
    expected_trace,
    merge,
)
from .weingarten import WeingartenCapError, weingarten_numeric, weingarten_symbolic, wg_class_function
from .verify import SUITES, run_verify

DEFAULT_SEED = 20240101


def load_schema(name):
    """Published JSON schema for the output of a subcommand."""
    text = resources.files("orthowg").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def _load_matrices(path):
    if path is None:
        return None
    with open(path) as fh:
        return MatrixSet.from_json(json.load(fh))


def _frac(x):
    return str(Fraction(x))


def _expression_payload(expr, mats):
    out = {"expression": expr.to_json(), "text": str(expr)}
    if mats is not None:
        value = expr.evaluate(mats)
        out.update(d=mats.d, value=_frac(value), float=float(value))
    return out


def _words(args):
    return [to_wordspec(parse_word(w)) for w in args.word]


def _check_symbols(words, mats):
    if mats is None:
        return
    used = set().union(*(w.symbols() for w in words)) - {"I"}
    missing = used - set(mats.matrices)
    if missing:
        raise KeyError(f"unknown symbol(s): {', '.join(sorted(missing))}")


def _numeric_d(args, mats, n):
    d = mats.d if mats is not None else getattr(args, "d", None)
    if d is not None and d < n:
        raise ValueError(f"dimension d = {d} is below the number of Haar factors n = {n}")
    return d


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_wg(args):
    n = args.n
    if args.d is None:
        table = wg_class_function(n, allow_large=args.large)
        mode = "symbolic"
    else:
        table = wg_class_function(n, args.d, allow_large=True)
        mode = "numeric"
    entries = []
    for t, v in sorted(table.items(), reverse=True):
        entry = {"coset_type": list(t), "value": str(v)}
        if mode == "symbolic":
            lead = v.leading_term()
            entry["leading"] = {"coefficient": _frac(lead.coefficient), "exponent": lead.exponent}
        entries.append(entry)
    payload = {"n": n, "mode": mode, "entries": entries}
    if args.d is not None:
        payload["d"] = str(args.d)
    if args.full:
        if args.d is None:
            full = weingarten_symbolic(n, allow_large=args.large)
        else:
            full = weingarten_numeric(n, args.d)
        payload["table"] = full.to_json()
    return payload, _render_wg(payload)


def _render_wg(payload):
    lines = [f"Weingarten class function, n = {payload['n']} ({payload['mode']})"]
    for e in payload["entries"]:
        lines.append(f"  {tuple(e['coset_type'])}: {e['value']}")
    return "\n".join(lines)


def cmd_moment(args):
    mats = _load_matrices(args.matrices)
    words = _words(args)
    _check_symbols(words, mats)
    spec = merge(*words)
    expr = expected_trace(spec, _numeric_d(args, mats, spec.n))
    payload = {"kind": "moment", "words": args.word, **_expression_payload(expr, mats)}
    return payload, _render_expr(payload)


def cmd_cov(args):
    mats = _load_matrices(args.matrices)
    w1 = to_wordspec(parse_word(args.word[0]))
    w2 = to_wordspec(parse_word(args.word2))
    _check_symbols([w1, w2], mats)
    expr = covariance_symbolic(w1, w2, _numeric_d(args, mats, w1.n + w2.n))
    payload = {"kind": "cov", "words": [args.word[0], args.word2], **_expression_payload(expr, mats)}
    return payload, _render_expr(payload)


def cmd_cumulant(args):
    mats = _load_matrices(args.matrices)
    words = _words(args)
    _check_symbols(words, mats)
    expr = cumulant_expression(words, _numeric_d(args, mats, sum(w.n for w in words)))
    payload = {"kind": "cumulant", "words": args.word, **_expression_payload(expr, mats)}
    return payload, _render_expr(payload)


def _render_expr(payload):
    lines = [f"{payload['kind']} of {' | '.join(payload['words'])}", f"  = {payload['text']}"]
    if "value" in payload:
        lines.append(f"  at d = {payload['d']}: {payload['value']} ~ {payload['float']:.10g}")
    return "\n".join(lines)


def cmd_limit(args):
    if args.cov_powers:
        m, n = args.cov_powers
        res = limit_cov_powers(m, n)
        payload = {"kind": "cov_powers", "m": m, "n": n, **res}
        text = (f"lim cov(Tr O^{m}, Tr O^{n}) = {res['engine_value']} "
                f"(spoke enumeration; published constant {res['published_value']})")
        return payload, text
    with open(args.spoke) as fh:
        data = json.load(fh)
    phi = LimitDistribution({tuple(_symbols(w)): Fraction(str(v)) for w, v in data["phi"].items()})
    a = [tuple(_symbols(w)) for w in data["a"]] if "a" in data else None
    b = [tuple(_symbols(w)) for w in data["b"]] if "b" in data else None
    value = limit_covariance_spoke(phi, data["k"], data["l"], a, b)
    payload = {"kind": "spoke", "engine_value": _frac(value), "float": float(value)}
    return payload, f"limit covariance = {payload['engine_value']}"


def _symbols(text):
    out = []
    for tok in text.split():
        out.append(Symbol(tok[:-2], True) if tok.endswith("^t") else Symbol(tok))
    return out


def cmd_mc(args):
    mats = _load_matrices(args.matrices)
    words = _words(args)
    if args.word2:
        words.append(to_wordspec(parse_word(args.word2)))
    d = args.d if args.d is not None else (mats.d if mats is not None else None)
    if d is None:
        raise ValueError("--d is required without --matrices")
    if mats is not None and mats.d != d:
        raise ValueError(f"--d {d} does not match the matrices' dimension {mats.d}")
    haar = max((max(w.labels()) for w in words if w.n), default=1)
    cfg = SamplerConfig(d=d, samples=args.samples, seed=args.seed, haar_count=haar)
    exact = None
    total_n = sum(w.n for w in words)
    if args.cumulant:
        r = args.cumulant
        if len(words) == 1:
            words = words * r
        est = estimate_cumulant(words, mats, r, cfg)
        if sum(w.n for w in words) <= ENGINE_CAP and d >= sum(w.n for w in words):
            exact = cumulant_expression(words, d).evaluate(mats or MatrixSet(d, {}))
    else:
        est = estimate_moment(words, mats, cfg)
        if total_n <= ENGINE_CAP and d >= total_n:
            exact = expected_trace(merge(*words), d).evaluate(mats or MatrixSet(d, {}))
    payload = {**est.to_json(), "d": d, "seed": args.seed, "cumulant": args.cumulant or None}
    if exact is not None:
        payload["exact"] = _frac(exact)
        payload["exact_float"] = float(exact)
        payload["z"] = (est.value - float(exact)) / est.stderr if est.stderr else 0.0
    text = f"estimate {est.value:.6g} +- {est.stderr:.3g} ({est.samples} samples, seed {args.seed})"
    if exact is not None:
        text += f"\nexact    {float(exact):.6g}"
    return payload, text


def cmd_verify(args):
    report = run_verify(args.suite, large=args.large)
    lines = []
    for c in report["checks"]:
        line = f"[{c['status'].upper():7}] {c['suite']}: {c['name']}"
        if c["status"] != "pass":
            line += f"  expected={c.get('expected')} actual={c.get('actual')}"
        lines.append(line)
    lines.append(f"{report['passed']} passed, {report['failed']} failed, {report['findings']} findings")
    return report, "\n".join(lines)


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="orthowg", description="Exact Haar orthogonal trace calculus.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, matrices=True):
        p.add_argument("--json", action="store_true", help="emit JSON")
        if matrices:
            p.add_argument("--matrices", metavar="FILE", help='JSON {"d": int, "matrices": {...}}')

    p = sub.add_parser("wg", help="Weingarten values by coset type")
    p.add_argument("--n", type=int, required=True, help="number of points (even)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--d", type=Fraction, help="evaluate at this dimension")
    mode.add_argument("--symbolic", action="store_true", help="rational functions of d (default)")
    p.add_argument("--large", action="store_true", help="allow symbolic n = 8")
    p.add_argument("--full", action="store_true", help="include the full table keyed by pairings")
    common(p, matrices=False)
    p.set_defaults(func=cmd_wg)

    p = sub.add_parser("moment", help="exact expectation of a product of traces")
    p.add_argument("--word", action="append", required=True)
    p.add_argument("--d", type=int, help="fix the dimension (implied by --matrices)")
    common(p)
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("cov", help="exact covariance of two trace words")
    p.add_argument("--word", action="append", required=True)
    p.add_argument("--word2", required=True)
    p.add_argument("--d", type=int, help="fix the dimension (implied by --matrices)")
    common(p)
    p.set_defaults(func=cmd_cov)

    p = sub.add_parser("cumulant", help="exact joint cumulant of trace words")
    p.add_argument("--word", action="append", required=True)
    p.add_argument("--d", type=int, help="fix the dimension (implied by --matrices)")
    common(p)
    p.set_defaults(func=cmd_cumulant)

    p = sub.add_parser("limit", help="large-d limit formulas")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cov-powers", nargs=2, type=int, metavar=("M", "N"))
    g.add_argument("--spoke", metavar="FILE", help="JSON with phi table and exponents k, l")
    common(p, matrices=False)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("mc", help="Monte Carlo estimate")
    p.add_argument("--word", action="append", required=True)
    p.add_argument("--word2")
    p.add_argument("--d", type=int)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--cumulant", type=int, metavar="R")
    common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("verify", help="run built-in verification suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--large", action="store_true", help="include n = 8 leading-term checks")
    common(p, matrices=False)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, text = args.func(args)
    except (WordSyntaxError, KeyError, ValueError, WeingartenCapError, ZeroDivisionError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        if getattr(args, "json", False):
            print(json.dumps({"error": str(msg)}))
        else:
            print(f"error: {msg}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(text)
    if args.command == "verify" and not payload["ok"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
