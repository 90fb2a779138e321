"""Command-line front end.

Exit codes: 0 success (or every claim holds on its sample), 1 usage error,
2 a violation was found, 3 indeterminate verdicts and no violation,
4 numeric domain error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

from . import __version__
from . import means as MN
from .audit import GENERATOR, ClaimVerdict, SearchConfig, audit_all, mn_convexity_probe, probe_config, report_header, search
from .claims import PreconditionError, ProbeFunction, catalog, evaluate_claim, get_claim, oracle_eval
from .curves import FAMILIES, ParamCurve, classify_curve, curve_table
from .report import audit_report, curve_csv, dumps, fmt_float, table_csv, verdict_json

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_INDETERMINATE, EXIT_DOMAIN = 0, 1, 2, 3, 4

MEAN_CHOICES = MN.CLASSICAL_KINDS + ("power", "weighted", "lehmer", "alzer")
PROBE_FUNCTIONS = ("identity", "exp", "log", "power") + tuple(f"{f}_curve" for f in FAMILIES)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(s):
    v = _decimal(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive decimal, got {s!r}")
    return v


def _decimal(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a decimal, got {s!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite decimal, got {s!r}")
    return v


def _seed(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {s!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _count(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("count must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", help="output file (default: standard output)")

    point = argparse.ArgumentParser(add_help=False)
    point.add_argument("--a", type=_positive)
    point.add_argument("--b", type=_positive)
    point.add_argument("--p", type=_decimal)
    point.add_argument("--q", type=_decimal)
    point.add_argument("--omega", type=_decimal)
    point.add_argument("--nu", type=_decimal)
    point.add_argument("--variant", choices=MN.ALZER_VARIANTS, default="paper")

    search_opts = argparse.ArgumentParser(add_help=False)
    search_opts.add_argument("--seed", type=_seed, default=42)
    search_opts.add_argument("--random", type=_count, help="random points per claim (default 2000)")
    search_opts.add_argument("--rounds", type=_count, help="refinement rounds (default 6)")

    parser = _Parser(prog="meanaudit", description="Evaluate two-argument means and audit inequalities between them.")
    parser.add_argument("--version", action="version", version=f"meanaudit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common, point], help="evaluate one mean")
    p.add_argument("--mean", choices=MEAN_CHOICES, required=True)

    p = sub.add_parser("curve", parents=[common, point], help="tabulate a parameter curve")
    p.add_argument("--family", "--mean", dest="family", choices=FAMILIES, required=True)
    p.add_argument("--from", dest="lo", type=_decimal, required=True)
    p.add_argument("--to", dest="hi", type=_decimal, required=True)
    p.add_argument("--samples", type=_count, default=64)

    sub.add_parser("claims-list", parents=[common], help="list the claim catalog")

    p = sub.add_parser("claims-verify", parents=[common, point, search_opts], help="verify one claim")
    p.add_argument("--id", required=True)
    p.add_argument("--samples", type=_count, help="alias for --random")

    sub.add_parser("claims-audit", parents=[common, search_opts], help="audit the whole catalog")

    p = sub.add_parser("probe", parents=[common, point, search_opts], help="MN-convexity probe")
    p.add_argument("--function", choices=PROBE_FUNCTIONS, required=True)
    p.add_argument("--c", type=_decimal, default=1.0, help="exponent for --function power")
    p.add_argument("--inner", choices=("A", "G", "H", "L", "I"), required=True, help="mean M applied to the arguments")
    p.add_argument("--outer", choices=("A", "G", "H", "L", "I"), required=True, help="mean N applied to the values")
    p.add_argument("--from", dest="lo", type=_decimal, required=True)
    p.add_argument("--to", dest="hi", type=_decimal, required=True)
    p.add_argument("--samples", type=_count, default=24, help="grid points per coordinate")
    return parser


# ---------------------------------------------------------------- commands


def _mean_spec(args):
    m = args.mean
    if m in MN.CLASSICAL_KINDS:
        return MN.Classical(m)
    if args.p is None:
        raise UsageError(f"--mean {m} needs --p")
    if m == "power":
        return MN.Power(args.p)
    if m == "lehmer":
        return MN.Lehmer(args.p)
    if m == "alzer":
        return MN.Alzer(args.p, args.variant)
    if args.omega is None:
        raise UsageError("--mean weighted needs --omega")
    return MN.WeightedPower(args.p, args.omega)


def _need_pair(args):
    if args.a is None or args.b is None:
        raise UsageError("--a and --b are required")
    return MN.PositivePair(args.a, args.b)


def cmd_eval(args):
    pair = _need_pair(args)
    spec = _mean_spec(args)
    r = MN.evaluate(spec, pair)
    if args.format == "json":
        doc = {
            "version": __version__,
            "mean": args.mean,
            "a": pair.a,
            "b": pair.b,
            "p": args.p if args.mean not in MN.CLASSICAL_KINDS else None,
            "omega": args.omega if args.mean == "weighted" else None,
            "variant": args.variant if args.mean == "alzer" else None,
            "value": r.value,
            "log_value": r.log_value,
            "error_bound": r.abs_error_bound,
            "path": r.path,
            "outside_paper_domain": r.outside_paper_domain,
        }
        return dumps(doc), EXIT_OK
    if args.format == "csv":
        row = (pair.a, pair.b, r.value, r.log_value, r.abs_error_bound, r.path)
        return table_csv(("a", "b", "value", "log_value", "error_bound", "path"), [row]), EXIT_OK
    note = "  (outside the stated parameter domain)" if r.outside_paper_domain else ""
    return f"{args.mean}({fmt_float(pair.a)}, {fmt_float(pair.b)}) = {fmt_float(r.value)}  +/- {r.abs_error_bound:.3g}  [{r.path}]{note}\n", EXIT_OK


def cmd_curve(args):
    pair = _need_pair(args)
    if args.family == "weighted" and args.p is None:
        raise UsageError("--family weighted needs --p (the fixed order)")
    curve = ParamCurve(args.family, pair, args.p if args.family == "weighted" else None, args.variant)
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    ts, value, log_value, d1, d2 = curve_table(curve, args.lo, args.hi, args.samples)
    rows = [tuple(map(float, r)) for r in zip(ts, value, log_value, d1, d2)]
    report = None
    if args.samples >= 16 and args.lo < args.hi:
        report = classify_curve(curve, (args.lo, args.hi), args.samples)
    if args.format == "csv":
        return curve_csv(rows), EXIT_OK
    if args.format == "json":
        doc = {
            "version": __version__,
            "family": args.family,
            "a": pair.a,
            "b": pair.b,
            "p": curve.p,
            "variant": args.variant if args.family == "alzer" else None,
            "from": args.lo,
            "to": args.hi,
            "samples": args.samples,
            "monotonicity": None if report is None else report.monotonicity,
            "log_shape": None if report is None else report.log_shape,
            "rows": [dict(zip(("param", "value", "log_value", "d1", "d2"), r)) for r in rows],
        }
        return dumps(doc), EXIT_OK
    lines = [f"{'param':>24} {'value':>24} {'log_value':>24} {'d1':>24} {'d2':>24}"]
    lines += [" ".join(f"{fmt_float(x):>24}" for x in r) for r in rows]
    if report is not None:
        lines.append(f"monotonicity: {report.monotonicity}; log-shape: {report.log_shape}")
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_claims_list(args):
    cs = catalog()
    if args.format == "json":
        doc = {
            "version": __version__,
            "claims": [
                {"id": c.id, "statement": c.statement(), "hypothesis": c.hypothesis.text, "variables": list(c.variables), "depends_on": list(c.depends_on)}
                for c in cs
            ],
        }
        return dumps(doc), EXIT_OK
    if args.format == "csv":
        rows = [(c.id, c.statement(), c.hypothesis.text, " ".join(c.depends_on)) for c in cs]
        return table_csv(("id", "statement", "hypothesis", "depends_on"), [tuple(_csv_quote(x) for x in r) for r in rows]), EXIT_OK
    lines = [f"{c.id:<6} {c.statement()}   [if {c.hypothesis.text}]" for c in cs]
    return "\n".join(lines) + "\n", EXIT_OK


def _csv_quote(s):
    return '"' + s.replace('"', '""') + '"' if any(ch in s for ch in ',"\n') else s


def _config(args) -> SearchConfig:
    cfg = SearchConfig(seed=args.seed)
    rnd = getattr(args, "random", None)
    if rnd is None:
        rnd = getattr(args, "samples", None)
    if rnd is not None:
        cfg = replace(cfg, random_count=rnd)
    if getattr(args, "rounds", None) is not None:
        cfg = replace(cfg, refinement_rounds=args.rounds)
    return cfg


def _exit_for(statuses):
    if "violated" in statuses:
        return EXIT_VIOLATION
    if "indeterminate" in statuses:
        return EXIT_INDETERMINATE
    return EXIT_OK


def _verdict_text(d):
    w = d["witness"]
    pt = " ".join(f"{k}={fmt_float(v)}" for k, v in (d.get("point") or w).items() if v is not None)
    deps = d["depends_on_status"]
    dep = ("  depends on " + ", ".join(f"{k}:{v}" for k, v in deps.items())) if deps else ""
    if d["margin"] is None:
        return f"{d['id']:<6} {d['status']:<16} (no sample satisfied the hypothesis){dep}"
    return f"{d['id']:<6} {d['status']:<16} margin={fmt_float(d['margin'])} +/- {d['error_bound']:.3g} at {pt}{dep}"


def _point_verdict(claim, args):
    """Verdict at a single user-supplied point, confirmed by the oracle."""
    point = {v: getattr(args, v) for v in claim.variables}
    w = evaluate_claim(claim, point)
    ext = oracle_eval(claim, point)
    if ext.margin < -ext.error_bound and w.margin < -w.error_bound:
        status, shown = "violated", ext
    elif w.is_decisive() and w.margin > 0:
        status, shown = "holds_on_sample", w
    else:
        status, shown = "indeterminate", w
    return ClaimVerdict(claim.id, status, shown, shown, 1, 0, "point")


def _render_report(doc, args):
    if args.format == "json":
        return dumps(doc)
    if args.format == "csv":
        header = ("id", "status", "a", "b", "p", "q", "omega", "nu", "lhs", "rhs", "margin", "error_bound", "samples_evaluated")
        rows = []
        for d in doc["verdicts"]:
            w = d["witness"]
            vals = [w[k] for k in ("a", "b", "p", "q", "omega", "nu")] + [d["lhs"], d["rhs"], d["margin"], d["error_bound"]]
            rows.append((d["id"], d["status"], *("" if v is None else float(v) for v in vals), d["samples_evaluated"]))
        return table_csv(header, rows)
    head = f"meanaudit {doc['version']}  generator={doc['generator']}  seed={doc['seed']}"
    return head + "\n" + "\n".join(_verdict_text(d) for d in doc["verdicts"]) + "\n"


def cmd_claims_verify(args):
    try:
        claim = get_claim(args.id)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    given = [v for v in claim.variables if getattr(args, v, None) is not None]
    cfg = _config(args)
    if given and len(given) < len(claim.variables):
        missing = [v for v in claim.variables if v not in given]
        raise UsageError(f"point for {claim.id} is incomplete; missing {' '.join('--' + m for m in missing)}")
    v = _point_verdict(claim, args) if given else search(claim, cfg)
    doc = audit_report([v], cfg)
    return _render_report(doc, args), _exit_for([v.status])


def cmd_claims_audit(args):
    cfg = _config(args)
    verdicts = audit_all(cfg)
    doc = audit_report(verdicts, cfg)
    return _render_report(doc, args), _exit_for([v.status for v in verdicts])


def cmd_probe(args):
    if not args.lo < args.hi:
        raise UsageError("--from must be smaller than --to")
    kw = {"kind": args.function, "c": args.c, "variant": args.variant}
    if args.function.endswith("_curve"):
        pair = _need_pair(args)
        kw.update(a=pair.a, b=pair.b, p=args.p)
        fam = args.function[: -len("_curve")]
        # validate the curve and its parameter range up front
        curve = ParamCurve(fam, pair, args.p if fam == "weighted" else None, args.variant)
        curve_table(curve, args.lo, args.hi, 2)
    f = ProbeFunction(**kw)
    rnd = 500 if args.random is None else args.random
    rounds = 4 if args.rounds is None else args.rounds
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    cfg = probe_config(args.lo, args.hi, args.samples, rnd, args.seed, rounds)
    pv = mn_convexity_probe(f, args.inner, args.outer, (args.lo, args.hi), cfg)
    head = report_header(cfg)
    doc = {
        "version": head["version"],
        "generator": GENERATOR,
        "seed": args.seed,
        "function": str(f),
        "inner": args.inner,
        "outer": args.outer,
        "interval": [args.lo, args.hi],
        "classification": pv.classification,
        "verdicts": [
            verdict_json(pv.convex, f"f({args.inner}(x,y)) <= {args.outer}(f(x),f(y))", "x>0 and y>0"),
            verdict_json(pv.concave, f"f({args.inner}(x,y)) >= {args.outer}(f(x),f(y))", "x>0 and y>0"),
        ],
        "fingerprint": head["fingerprint"],
    }
    if args.format == "json":
        return dumps(doc), EXIT_OK
    if args.format == "csv":
        return _render_report(doc, args), EXIT_OK
    lines = [f"{f} on [{fmt_float(args.lo)}, {fmt_float(args.hi)}] with M={args.inner}, N={args.outer}: {pv.classification}"]
    lines += [_verdict_text(d) for d in doc["verdicts"]]
    return "\n".join(lines) + "\n", EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "curve": cmd_curve,
    "claims-list": cmd_claims_list,
    "claims-verify": cmd_claims_verify,
    "claims-audit": cmd_claims_audit,
    "probe": cmd_probe,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        text, code = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"meanaudit: error: {e}", file=stderr)
        return EXIT_USAGE
    except (MN.DomainError, PreconditionError) as e:
        print(f"meanaudit: domain error: {e}", file=stderr)
        return EXIT_DOMAIN
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
        stdout.flush()
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
