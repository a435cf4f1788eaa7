"""
Command-line front end.

Exit codes: 0 success (or every axiom passed), 1 usage error, 2 data error,
3 an axiom check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import measures as M
from .axioms import check_axioms, majorization_compare
from .errors import CatSpreadError
from .estimation import Method, estimate, jackknife
from .io import (ParseError, format_number, json_number, parse_measure,
                 read_pmf, read_sample)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_AXIOM = 0, 1, 2, 3

DYADIC_CASE = (1 / 2, 1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 32)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def build_parser():
    parser = _Parser(prog="catspread",
                     description="Spread measures for categorical distributions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="evaluate a spread measure on a pmf file")
    p.add_argument("pmf_file")
    p.add_argument("measure", help="e.g. dvar, gini, tsallis:m=2, geom:w=sin,l=1,p=1")
    p.add_argument("--alpha", type=float, help="alpha-power distance (dvar only)")
    p.add_argument("--sigma2", type=float, help="Gaussian kernel bandwidth (dvar only)")
    p.add_argument("--c1", type=float, help="distance between equal categories")
    p.add_argument("--c2", type=float, help="distance between different categories")
    p.add_argument("--renormalize", action="store_true",
                   help="divide probabilities by their sum (sum within [0.5, 2])")

    p = sub.add_parser("estimate", help="estimate squared distance variance")
    p.add_argument("sample_file")
    p.add_argument("--method", choices=[m.value for m in Method], default="ustat")
    p.add_argument("--ci", type=float, metavar="LEVEL",
                   help="jackknife confidence interval at this level")

    p = sub.add_parser("axioms", help="check the spread-measure axioms")
    p.add_argument("--measure", required=True)
    p.add_argument("--kmin", type=int, default=2)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-zero-probs", action="store_true")
    p.add_argument("--additivity", action="store_true",
                   help="also probe Shannon-type additivity")
    p.add_argument("--report", choices=["json", "text"], default="json")

    p = sub.add_parser("majorize", help="compare two pmfs under majorization")
    p.add_argument("pmf_a")
    p.add_argument("pmf_b")
    p.add_argument("--renormalize", action="store_true")
    p.add_argument("--verbose", action="store_true",
                   help="print the witness index for every verdict")

    p = sub.add_parser("figures", help="write plot-ready CSV data")
    p.add_argument("--which", type=int, choices=[2, 3], required=True)
    p.add_argument("--out", help="output path (default: standard output)")
    return parser


def _measure_from_args(args):
    try:
        measure = parse_measure(args.measure)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    flags = {k: getattr(args, k) for k in ("alpha", "sigma2", "c1", "c2")
             if getattr(args, k) is not None}
    if not flags:
        return measure
    if not isinstance(measure, M.DistanceVariance) or measure.spec != M.Euclidean():
        raise UsageError("distance flags need a plain 'dvar' measure")
    try:
        if set(flags) == {"alpha"}:
            spec = M.AlphaPower(flags["alpha"])
        elif set(flags) == {"sigma2"}:
            spec = M.GaussianKernel(flags["sigma2"])
        elif set(flags) == {"c1", "c2"}:
            spec = M.TwoConstant(flags["c1"], flags["c2"])
        else:
            raise UsageError("use exactly one of --alpha, --sigma2 or --c1/--c2")
    except CatSpreadError as exc:
        raise UsageError(str(exc)) from None
    return M.DistanceVariance(spec)


def cmd_measure(args, out):
    measure = _measure_from_args(args)
    pmf = read_pmf(args.pmf_file, renormalize=args.renormalize)
    out.write(format_number(measure(pmf)) + "\n")
    return EXIT_OK


def cmd_estimate(args, out):
    sample = read_sample(args.sample_file)
    if args.ci is not None:
        if not 0 < args.ci < 1:
            raise UsageError("--ci must lie in (0, 1)")
        if sample.n < 5:
            raise CatSpreadError("--ci needs at least n = 5 observations, got %d"
                                 % sample.n)
        res = jackknife(sample, args.method, confidence=args.ci)
    else:
        if sample.n < 4:
            raise CatSpreadError("estimation needs at least n = 4 observations, got %d"
                                 % sample.n)
        res = estimate(sample, args.method)
    doc = res.to_dict()
    for key in ("estimate", "se"):
        if key in doc:
            doc[key] = json_number(doc[key])
    if "ci" in doc:
        doc["ci"] = [json_number(v) for v in doc["ci"]]
    out.write(json.dumps(doc) + "\n")
    return EXIT_OK


def cmd_axioms(args, out):
    try:
        measure = parse_measure(args.measure)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    if not 2 <= args.kmin <= args.kmax <= 12:
        raise UsageError("need 2 <= kmin <= kmax <= 12")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    report = check_axioms(measure, args.kmin, args.kmax, args.trials, args.seed,
                          allow_zero_probs=args.allow_zero_probs,
                          additivity=args.additivity)
    if args.report == "json":
        out.write(json.dumps(report.to_dict(), indent=2) + "\n")
    else:
        out.write(report.format_text() + "\n")
    return EXIT_OK if report.passed else EXIT_AXIOM


def cmd_majorize(args, out):
    a = read_pmf(args.pmf_a, renormalize=args.renormalize)
    b = read_pmf(args.pmf_b, renormalize=args.renormalize)
    verdict = majorization_compare(a, b)
    if args.verbose and verdict.witness_index is not None:
        out.write("%s %d\n" % (verdict.relation.value, verdict.witness_index))
    else:
        out.write(str(verdict) + "\n")
    return EXIT_OK


def figure_rows(which):
    """Rows (with header) of the figure data, computed from the library."""
    if which == 2:
        rows = [("K", "distance_variance")]
        for K in range(1, 5):
            rows.append((str(K), format_number(M.distance_variance(M.Pmf.uniform(K)))))
        return rows
    if which == 3:
        return [("case", "distance_variance"),
                ("case1", format_number(M.distance_variance(DYADIC_CASE))),
                ("case2", format_number(M.distance_variance(M.Pmf.uniform(6))))]
    raise UsageError("unknown figure %r" % which)


def cmd_figures(args, out):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(figure_rows(args.which))
    if args.out is None:
        out.write(buf.getvalue())
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise CatSpreadError("cannot write %s: %s" % (args.out, exc.strerror)) from None
    return EXIT_OK


COMMANDS = {"measure": cmd_measure, "estimate": cmd_estimate,
            "axioms": cmd_axioms, "majorize": cmd_majorize,
            "figures": cmd_figures}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print("catspread: usage error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except CatSpreadError as exc:
        print("catspread: error: %s" % exc, file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
