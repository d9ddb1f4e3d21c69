"""Command-line front end: every pipeline behind reproducible subcommands.

Each run writes its outputs plus a manifest echoing the fully resolved
configuration and a sha256 of every output file; `--from-manifest`
re-executes a manifest byte-identically.

Exit codes: 0 success / all checks passed, 1 verification failure,
2 usage error, 3 numerical failure, 4 existence (degenerate form),
5 Painleve pole hit.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from fractions import Fraction

from mpmath import mpc, mpf

from .errors import (
    DegenerateForm,
    DomainError,
    NumericalError,
    PoleHit,
)
from .contours import region_sign_map, trace_phase_curve, trace_steepest
from .orthopoly import (
    BilinearFormSpec,
    compute_moments,
    freud_lattice,
    freud_residual,
    stieltjes_recurrence,
)
from .painleve import PainleveParameters, solve_painleve
from .potential import PhiFunction
from .precision import PrecisionContext
from .rendering import region_figure, write_svg
from .serialize import (
    curve_to_csv_rows,
    mpc_to_pair,
    mpf_to_str,
    painleve_to_csv_rows,
    painleve_to_json,
    parse_t,
    read_json,
    recurrence_to_csv_rows,
    recurrence_to_json,
    sha256_of_file,
    t_to_str,
    write_csv,
    write_json,
)
from .verify import ScalingExperiment, run_critical, run_regular

EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_EXISTENCE = 4
EXIT_POLE = 5

_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?"
    r"\s*(?P<im>[+-]\s*\d*(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*(?P<i>[ij])?\s*$"
)


def parse_complex(s):
    """Parse 're+imi' syntax: '0.5', '0.5+0.3i', '-1i', '1/4' (rational re)."""
    s = str(s).strip()
    if "/" in s and "i" not in s and "j" not in s:
        f = Fraction(s)
        return mpc(mpf(f.numerator) / f.denominator)
    if s.endswith(("i", "j")):
        body = s[:-1]
        for split in range(len(body) - 1, 0, -1):
            if body[split] in "+-" and body[split - 1] not in "eE":
                re_part, im_part = body[:split], body[split:]
                if im_part in ("+", "-"):
                    im_part += "1"
                return mpc(mpf(re_part), mpf(im_part))
        if body in ("", "+", "-"):
            body += "1"
        return mpc(0, mpf(body))
    return mpc(mpf(s))


def _out_dir(args):
    d = args.out_dir or os.environ.get("QPAIN_OUTDIR", ".")
    os.makedirs(d, exist_ok=True)
    return d


def _write_manifest(out_dir, command, config, outputs):
    manifest = {
        "command": command,
        "config": config,
        "outputs": {os.path.basename(p): sha256_of_file(p) for p in outputs},
    }
    path = os.path.join(out_dir, "manifest.json")
    write_json(path, manifest)
    return path


def _ctx(args):
    kwargs = {}
    if getattr(args, "quad_tol", None):
        kwargs["quad_tol"] = mpf(args.quad_tol)
    if getattr(args, "ode_tol", None):
        kwargs["ode_tol"] = mpf(args.ode_tol)
    return PrecisionContext(args.digits, **kwargs)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_moments(args):
    ctx = _ctx(args)
    t = parse_t(args.t)
    spec = BilinearFormSpec(t, args.N, parse_complex(args.alpha), parse_complex(args.beta))
    with ctx.workdps():
        mom = compute_moments(spec, args.kmax, ctx)
        out_dir = _out_dir(args)
        path = os.path.join(out_dir, "moments.json")
        write_json(
            path,
            {
                "spec": {
                    "t": t_to_str(t),
                    "N": spec.N,
                    "alpha": mpc_to_pair(spec.alpha, ctx.digits),
                    "beta": mpc_to_pair(spec.beta, ctx.digits),
                    "digits": ctx.digits,
                },
                "k_max": mom.k_max,
                "moments": [mpc_to_pair(v, ctx.digits) for v in mom.m],
                "errors": [mpf_to_str(e, ctx.digits) for e in mom.error_estimates],
            },
        )
    _write_manifest(out_dir, "moments", _config_echo(args), [path])
    return 0


def cmd_recurrence(args):
    ctx = _ctx(args)
    t = parse_t(args.t)
    spec = BilinearFormSpec(t, args.N, parse_complex(args.alpha), parse_complex(args.beta))
    with ctx.workdps():
        k_max = args.kmax or (2 * args.n + 2)
        mom = compute_moments(spec, k_max, ctx)
        table = stieltjes_recurrence(mom, args.n, ctx)
        out_dir = _out_dir(args)
        jpath = os.path.join(out_dir, "recurrence.json")
        write_json(jpath, recurrence_to_json(spec, mom, table))
        header, rows = recurrence_to_csv_rows(table, ctx.digits)
        cpath = write_csv(os.path.join(out_dir, "recurrence.csv"), header, rows)
    _write_manifest(out_dir, "recurrence", _config_echo(args), [jpath, cpath])
    return 0


def cmd_freud(args):
    ctx = _ctx(args)
    t = parse_t(args.t)
    alpha = parse_complex(args.alpha)
    spec = BilinearFormSpec(t, args.N, alpha, alpha)
    with ctx.workdps():
        mom = compute_moments(spec, 2 * args.n + 2, ctx)
        table = stieltjes_recurrence(mom, args.n, ctx)
        residual = freud_residual(table, t, args.N)
        lat, growth = freud_lattice(t, args.N, table.a[1], table.a[2], args.n, ctx)
        diffs = [
            mpf_to_str(abs(lat[k] - table.a[k]), ctx.digits)
            for k in range(1, min(len(lat), args.n + 1))
            if table.a[k] is not None
        ]
        out_dir = _out_dir(args)
        path = os.path.join(out_dir, "freud.json")
        write_json(
            path,
            {
                "t": t_to_str(t),
                "N": args.N,
                "alpha": mpc_to_pair(alpha, ctx.digits),
                "digits": ctx.digits,
                "freud_residual": mpf_to_str(residual, ctx.digits),
                "lattice_vs_stieltjes": diffs,
                "lattice_growth_estimate": [mpf_to_str(g, 20) for g in growth],
                "a": [None if a is None else mpc_to_pair(a, ctx.digits) for a in table.a],
            },
        )
    _write_manifest(out_dir, "freud", _config_echo(args), [path])
    return 0


def cmd_painleve(args):
    ctx = _ctx(args)
    params = PainleveParameters(parse_complex(args.alpha), x0=mpf(args.x0))
    with ctx.workdps():
        samples = [mpf(s) for s in args.samples.split(",")] if args.samples else None
        sol = solve_painleve(
            params, mpf(args.x), ctx, samples=samples, blowup_ceiling=args.ceiling
        )
        out_dir = _out_dir(args)
        jpath = os.path.join(out_dir, "solution.json")
        write_json(jpath, painleve_to_json(sol))
        header, rows = painleve_to_csv_rows(sol)
        cpath = write_csv(os.path.join(out_dir, "solution.csv"), header, rows)
    _write_manifest(out_dir, "painleve", _config_echo(args), [jpath, cpath])
    return 0


def cmd_contours(args):
    ctx = _ctx(args)
    with ctx.workdps():
        phi = PhiFunction("critical_cr") if args.t is None else PhiFunction("regular", t=parse_t(args.t))
        out_dir = _out_dir(args)
        outputs = []
        curves = []
        if args.figure in ("regions", "full"):
            bbox = (-6, 6, -6, 6)
            rows = region_sign_map(phi, bbox, args.resolution, ctx)
        else:
            bbox, rows = (-6, 6, -6, 6), []
        if args.figure in ("curves", "full"):
            for quadrant in (1, 2, 3, 4):
                curves.append(trace_steepest(quadrant, phi, ctx, arc_budget=8, stop_radius=8))
            if phi.variant == "critical_cr":
                curves.append(trace_phase_curve(+1, phi, ctx, arc_budget=3, stop_radius=8))
                curves.append(trace_phase_curve(-1, phi, ctx, arc_budget=3, stop_radius=8))
        svg = region_figure(rows, bbox, curves)
        spath = write_svg(os.path.join(out_dir, args.out or "figure.svg"), svg)
        outputs.append(spath)
        for curve in curves:
            header, rows_csv = curve_to_csv_rows(curve, ctx.digits)
            outputs.append(
                write_csv(os.path.join(out_dir, f"curve_{curve.label}.csv"), header, rows_csv)
            )
    _write_manifest(out_dir, "contours", _config_echo(args), outputs)
    return 0


def cmd_verify_regular(args):
    ctx = _ctx(args)
    exp = ScalingExperiment(
        "regular",
        parse_complex(args.alpha),
        parse_complex(args.beta),
        n_list=tuple(int(n) for n in args.n.split(",")),
        t=parse_t(args.t),
        digits=args.digits,
    )
    report = run_regular(exp, ctx)
    return _emit_report(args, report, "verify-regular")


def cmd_verify_critical(args):
    ctx = _ctx(args)
    exp = ScalingExperiment(
        "critical",
        parse_complex(args.alpha),
        parse_complex(args.beta),
        n_list=tuple(int(n) for n in args.n.split(",")),
        x=mpf(args.x),
        digits=args.digits,
    )
    report = run_critical(exp, ctx)
    return _emit_report(args, report, "verify-critical")


def _emit_report(args, report, command):
    out_dir = _out_dir(args)
    path = os.path.join(out_dir, "report.json")
    write_json(path, report.to_json())
    sys.stdout.write(report.text_table() + "\n")
    _write_manifest(out_dir, command, _config_echo(args), [path])
    return 0 if report.all_pass() else EXIT_VERIFY_FAIL


def _config_echo(args):
    skip = {"func", "from_manifest", "command"}
    return {k: (v if isinstance(v, (int, float, str, bool, type(None))) else str(v))
            for k, v in sorted(vars(args).items()) if k not in skip}


# --------------------------------------------------------------------------
# argument plumbing
# --------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--digits", type=int, default=60, help="working precision (decimal digits)")
    p.add_argument("--quad-tol", dest="quad_tol", default=None, help="relative quadrature tolerance")
    p.add_argument("--ode-tol", dest="ode_tol", default=None, help="local ODE error tolerance")
    p.add_argument("--out-dir", dest="out_dir", default=None, help="output directory (default $QPAIN_OUTDIR or .)")
    p.add_argument("--threads", type=int, default=1,
                   help="reserved; evaluation is serial and results are independent of this flag")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="qpain",
        description="High-precision lab for quartic-weight orthogonal polynomials and Painleve I asymptotics",
    )
    ap.add_argument("--from-manifest", default=None, help="re-run the command recorded in a manifest")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("moments", help="moment table of the bilinear form")
    p.add_argument("--t", required=True, help="quartic coefficient (rational like -1/12 or decimal)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--kmax", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("recurrence", help="recurrence coefficients a_n, b_n")
    p.add_argument("--t", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kmax", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_recurrence)

    p = sub.add_parser("freud", help="Freud residual and lattice cross-check (alpha = beta)")
    p.add_argument("--t", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--alpha", default="0.5")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_freud)

    p = sub.add_parser("painleve", help="solve one Painleve I trajectory y_alpha")
    p.add_argument("--alpha", required=True)
    p.add_argument("--x", required=True, help="integration target")
    p.add_argument("--x0", default="-30", help="seed anchor (<= -10)")
    p.add_argument("--samples", default=None, help="comma-separated sample points")
    p.add_argument("--ceiling", type=float, default=1e8, help="blowup ceiling")
    _add_common(p)
    p.set_defaults(func=cmd_painleve)

    p = sub.add_parser("contours", help="steepest-descent geometry figures")
    p.add_argument("--figure", choices=("regions", "curves", "full"), default="full")
    p.add_argument("--t", default=None, help="regular-case t; default critical phi")
    p.add_argument("--resolution", type=int, default=32)
    p.add_argument("--out", default=None, help="SVG filename")
    _add_common(p)
    p.set_defaults(func=cmd_contours)

    p = sub.add_parser("verify-regular", help="Theorem-1-style regular verification")
    p.add_argument("--t", required=True)
    p.add_argument("--alpha", default="0.5")
    p.add_argument("--beta", default="0.5")
    p.add_argument("--n", default="8,12,16,24")
    _add_common(p)
    p.set_defaults(func=cmd_verify_regular)

    p = sub.add_parser("verify-critical", help="Theorem-2-style critical verification")
    p.add_argument("--x", required=True)
    p.add_argument("--alpha", default="0.5")
    p.add_argument("--beta", default="0.5")
    p.add_argument("--n", default="16,32,64")
    _add_common(p)
    p.set_defaults(func=cmd_verify_critical)

    return ap


_COMMANDS = {
    "moments": cmd_moments,
    "recurrence": cmd_recurrence,
    "freud": cmd_freud,
    "painleve": cmd_painleve,
    "contours": cmd_contours,
    "verify-regular": cmd_verify_regular,
    "verify-critical": cmd_verify_critical,
}


def _rerun_manifest(path):
    manifest = read_json(path)
    command = manifest["command"]
    config = manifest["config"]
    argv = [command]
    for key, value in sorted(config.items()):
        if key in ("command",) or value is None:
            continue
        if isinstance(value, bool):
            continue
        flag = "--" + key.replace("_", "-")
        # single-token --flag=value form keeps values with leading '-' parseable
        argv.append(f"{flag}={value}")
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.from_manifest:
            return _rerun_manifest(args.from_manifest)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except PoleHit as exc:
        sys.stderr.write(f"pole: {exc}\n")
        return EXIT_POLE
    except DegenerateForm as exc:
        sys.stderr.write(f"existence: {exc}\n")
        return EXIT_EXISTENCE
    except (NumericalError, DomainError, ValueError) as exc:
        sys.stderr.write(f"numerical: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
