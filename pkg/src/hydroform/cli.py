"""
Command-line interface.

Quantum numbers on the command line are principal numbers (ni, nf >= 1);
they are converted to n = principal - 1 internally.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""
import argparse
import csv
from fractions import Fraction
import json
import math
import sys

import gmpy2

from . import __version__
from .errors import HydroformError
from .exactmath import PrecisionContext, _to_mpfr
from .formfactor import BoundLabel, TransitionSpec, form_factor, gos_scan
from .pcoeff import PIndex, admissible_indices, p_value

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _digits(ctx):
    return int(math.ceil(ctx.bits * math.log10(2))) + 1


def _dec(x, ctx):
    """Full-precision decimal string of an mpfr, in d.ddd...e+XX form."""
    x = gmpy2.mpfr(x)
    if x == 0:
        return "0.0e+00"
    mant, exp, _ = x.digits(10, _digits(ctx))
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    # digits() returns 0.mant * 10^exp
    return "%s%s.%se%+03d" % (sign, mant[0], mant[1:], exp - 1)


def _context(args):
    if args.precision_bits is not None:
        return PrecisionContext(bits=args.precision_bits)
    return PrecisionContext.from_env()


def _transition(args):
    ini = BoundLabel.from_principal(args.ni, args.li, args.mi)
    fin = BoundLabel.from_principal(args.nf, args.lf, args.mf)
    if args.mode == "hydrogen":
        return TransitionSpec.hydrogen(Fraction(args.Z), ini, fin)
    if args.alpha is None or args.beta is None:
        raise UsageError("sturmian mode needs --alpha and --beta")
    return TransitionSpec.sturmian(args.alpha, args.beta, ini, fin)


def _transition_record(t, args):
    rec = {"mode": t.mode,
           "initial": {"n": t.initial.principal, "l": t.initial.l, "m": t.initial.m},
           "final": {"n": t.final.principal, "l": t.final.l, "m": t.final.m},
           "alpha": str(t.channel.alpha), "beta": str(t.channel.beta)}
    if t.mode == "hydrogen":
        rec["Z"] = args.Z
    return rec


def _kvec(args, ctx):
    with ctx.local():
        k = _to_mpfr(args.k)
        if k < 0:
            raise UsageError("--k must be nonnegative")
        th, ph = _to_mpfr(args.theta), _to_mpfr(args.phi)
        if th == 0 and ph == 0:
            return (0, 0, k)
        s = gmpy2.sin(th)
        return (k * s * gmpy2.cos(ph), k * s * gmpy2.sin(ph), k * gmpy2.cos(th))


def cmd_compute(args, out):
    ctx = _context(args)
    t = _transition(args)
    kvec = _kvec(args, ctx)
    F = form_factor(t, kvec, ctx, args.backend)
    with ctx.local():
        partials = {str(l2): _dec(gmpy2.norm(part), ctx) for l2, part in F.l2_terms}
        rec = {"schema": SCHEMA,
               "transition": _transition_record(t, args),
               "kinematics": {"k": _dec(F.kin.kmag, ctx), "theta": str(args.theta), "phi": str(args.phi),
                              "u": _dec(F.kin.u, ctx), "v": _dec(F.kin.v, ctx), "w": _dec(F.kin.w, ctx)},
               "F_real": _dec(F.value.real, ctx),
               "F_imag": _dec(F.value.imag, ctx),
               "absF2": _dec(F.abs2, ctx),
               "l2_partials": partials,
               "backend": args.backend,
               "precision_bits": ctx.bits}
    out.write(json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


def _grid(args):
    lo, hi = Fraction(args.lnk_min), Fraction(args.lnk_max)
    if not lo < hi:
        raise UsageError("--lnk-min must be smaller than --lnk-max")
    if args.points < 1:
        raise UsageError("--points must be at least 1")
    if args.points == 1:
        return [lo]
    return [lo + (hi - lo) * i / (args.points - 1) for i in range(args.points)]


def cmd_scan(args, out):
    ctx = _context(args)
    t = _transition(args)
    grid = _grid(args)
    rows = gos_scan(t, grid, ctx, args.backend)
    width = t.initial.l + t.final.l + 1
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["lnk", "k", "absF2"] + ["l2_%d" % j for j in range(width)])
        for r in rows:
            w.writerow(["%.17e" % float(x) for x in [r.lnk, r.k, r.absF2] + list(r.partials)])
    else:
        with ctx.local():
            for r in rows:
                rec = {"schema": SCHEMA, "transition": _transition_record(t, args),
                       "lnk": _dec(r.lnk, ctx), "k": _dec(r.k, ctx), "absF2": _dec(r.absF2, ctx),
                       "l2_partials": [_dec(p, ctx) for p in r.partials],
                       "backend": args.backend, "precision_bits": ctx.bits}
                out.write(json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_validate(args, out):
    from .suites import run_suite
    ctx = _context(args)
    try:
        checks = run_suite(args.suite, args.nmax, ctx)
    except HydroformError as exc:
        out.write("FAIL  suite %s aborted: %s: %s\n" % (args.suite, type(exc).__name__, exc))
        return EXIT_FAIL
    for c in checks:
        out.write("%s  %-55s residual=%.3e threshold=%.3e count=%d\n"
                  % ("PASS" if c.passed else "FAIL", c.name, c.residual, c.threshold, c.count))
    failed = sum(not c.passed for c in checks)
    out.write("%d checks, %d failed\n" % (len(checks), failed))
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _table_indices(args):
    single = [args.n, args.l, args.n3, args.l3, args.l2]
    if any(x is not None for x in single):
        if any(x is None for x in single):
            raise UsageError("a single index needs all of --n --l --n3 --l3 --l2")
        idx = PIndex(*single)
        idx.validate()
        return [idx]
    if args.nmax is None:
        raise UsageError("give either a single index or --nmax")
    n3max = args.n3max if args.n3max is not None else args.nmax
    return admissible_indices(args.nmax, n3max, physical=args.physical)


def cmd_table(args, out):
    ctx = _context(args)
    idxs = _table_indices(args)
    rows = []
    for idx in idxs:
        pv = p_value(idx, args.u, args.w, ctx, args.backend)
        rows.append((idx, pv))
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "l", "n3", "l3", "l2", "u", "w", "value", "backend"])
        for idx, pv in rows:
            w.writerow(list(idx.as_tuple()) + [args.u, args.w, "%.17e" % float(pv.value), args.backend])
    else:
        with ctx.local():
            for idx, pv in rows:
                rec = {"schema": SCHEMA, "index": list(idx.as_tuple()), "u": args.u, "w": args.w,
                       "value": _dec(pv.value, ctx), "backend": args.backend, "precision_bits": ctx.bits}
                out.write(json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


def _add_common(p):
    p.add_argument("--precision-bits", type=int, default=None,
                   help="working precision in bits (default 128, or HYDROFORM_PRECISION_BITS)")
    p.add_argument("--backend", choices=["series", "gegenbauer", "auto"], default="auto",
                   help="P backend; auto evaluates both and checks agreement (default)")


def _add_transition(p):
    p.add_argument("--mode", choices=["hydrogen", "sturmian"], default="hydrogen")
    p.add_argument("--Z", default="1", help="nuclear charge in hydrogen mode (alpha = Z/ni, beta = Z/nf)")
    p.add_argument("--alpha", default=None, help="initial screening parameter in sturmian mode")
    p.add_argument("--beta", default=None, help="final screening parameter in sturmian mode")
    for side, name in (("i", "initial"), ("f", "final")):
        p.add_argument("--n" + side, type=int, required=True,
                       help="principal quantum number of the %s state (>= 1)" % name)
        p.add_argument("--l" + side, type=int, default=0, help="orbital quantum number of the %s state" % name)
        p.add_argument("--m" + side, type=int, default=0, help="magnetic quantum number of the %s state" % name)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hydroform",
        description="Hydrogen and Sturmian form factors through four-dimensional harmonics. "
                    "Principal quantum numbers are given on the command line (n >= 1) and "
                    "converted internally to n - 1.")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="one m-resolved form factor as a JSON record")
    _add_common(p)
    _add_transition(p)
    p.add_argument("--k", default="0", help="magnitude of the momentum transfer")
    p.add_argument("--theta", default="0", help="polar angle of k (radians)")
    p.add_argument("--phi", default="0", help="azimuth of k (radians)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("scan", help="generalized oscillator strength scan over ln k")
    _add_common(p)
    _add_transition(p)
    p.add_argument("--lnk-min", default="-3")
    p.add_argument("--lnk-max", default="3")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("validate", help="run a validation suite")
    _add_common(p)
    p.add_argument("--suite", choices=["backends", "recurrences", "orthogonality", "oracle", "expansion", "all"],
                   required=True)
    p.add_argument("--nmax", type=int, default=None, help="size of the sweep (suite-specific default)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("table", help="P coefficients over an index lattice")
    _add_common(p)
    for name in ("n", "l", "n3", "l3", "l2"):
        p.add_argument("--" + name, type=int, default=None)
    p.add_argument("--nmax", type=int, default=None, help="lattice bound on n")
    p.add_argument("--n3max", type=int, default=None, help="lattice bound on n3 (default nmax)")
    p.add_argument("--physical", action="store_true", help="restrict to l2 <= l + l3")
    p.add_argument("--u", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None, out=None):
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, HydroformError, ValueError) as exc:
        sys.stderr.write("hydroform %s: error: %s\n" % (args.command, exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
