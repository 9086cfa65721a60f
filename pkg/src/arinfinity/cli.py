"""Command-line front end: ``arinfinity <subcommand> ...``.

Every subcommand prints one JSON document (or CSV where it makes sense)
and exits 0 when all requested assertions pass, 1 on a failure, 2 when the
window is too small to decide, and 64 on bad usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import hodge
from .lattice import (
    Window,
    enumerate_region,
    kappa_cut,
    n_shift_injective,
    n_shift_oracle,
    n_shift_surjective,
)
from .scalars import GaussianRational

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
DEFAULT_WINDOW = Window(-6, 6, 12)
SCHEMA = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _threads() -> int:
    raw = os.environ.get("ARINF_THREADS", "")
    try:
        return max(1, int(raw)) if raw else min(4, os.cpu_count() or 1)
    except ValueError:
        raise UsageError(f"ARINF_THREADS must be an integer, got {raw!r}")


def parallel_map(fn, items):
    """Ordered map, at most ARINF_THREADS workers."""
    items = list(items)
    workers = _threads()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- encoding


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return x.real if x.imag == 0 else [x.real, x.imag]
    if isinstance(x, (Fraction, GaussianRational)):
        return str(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    if hasattr(x, "as_dict"):
        return _plain(x.as_dict())
    return str(x)


def emit(doc: dict, out, fmt: str = "json", rows=None) -> None:
    if fmt == "csv" and rows is not None:
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _plain(v) for k, v in row.items()})
        out.write(buf.getvalue())
        return
    out.write(json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n")


def _report(command: str, args, **body) -> dict:
    doc = {"schema": SCHEMA, "command": command}
    window = getattr(args, "window", None)
    if window is not None:
        doc["window"] = window.as_dict()
    doc.update(body)
    return doc


# ---------------------------------------------------------------- argument helpers


def _window(text: str) -> Window:
    try:
        return Window.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _samples(text: str):
    """'lam:s,lam:s,...' with rationals, e.g. '2:1,-1:0,3/2:5/3'."""
    out = []
    for item in text.split(","):
        try:
            lam, s = item.split(":")
            lam, s = Fraction(lam), Fraction(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad sample {item!r}; use LAMBDA:S")
        if lam == 0:
            raise argparse.ArgumentTypeError("lambda must be nonzero")
        out.append((lam, s))
    return tuple(out)


def _load_spec(text: str):
    try:
        return hodge.resolve(text)
    except FileNotFoundError:
        raise UsageError(f"no Hodge datum file or shipped name {text!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read Hodge datum {text!r}: {exc}")


# ---------------------------------------------------------------- subcommands


def cmd_validate(args, out) -> int:
    datum = _load_spec(args.spec)
    violations = hodge.validate(datum)
    emit(_report("validate", args, spec=args.spec, name=datum.name, valid=not violations,
                 violations=violations), out)
    return EXIT_OK if not violations else EXIT_FAIL


def cmd_lattice(args, out) -> int:
    p, q, w = args.p, args.q, args.window
    if p < 0 or q < 0:
        raise UsageError("p and q must be nonnegative")
    points = enumerate_region(p, q, w)
    columns = []
    discrepancies = unresolved = 0
    for r in range(w.rmin, w.rmax + 1):
        surj, inj = n_shift_oracle(p, q, r, w.kmax)
        cs, ci = n_shift_surjective(p, q, r), n_shift_injective(p, q, r)
        for got, want in ((surj, cs), (inj, ci)):
            if got is None:
                unresolved += 1
            elif got != want:
                discrepancies += 1
        columns.append({"r": r, "kappa": kappa_cut(p, q, r), "surjective": cs, "injective": ci,
                        "oracle_surjective": surj, "oracle_injective": inj})
    rows = [{"p": pt.p, "q": pt.q, "r": pt.r, "k": pt.k} for pt in points]
    doc = _report("lattice", args, p=p, q=q, region_size=len(points), columns=columns,
                  discrepancies=discrepancies, unresolved=unresolved)
    emit(doc, out, args.format, rows)
    if discrepancies:
        return EXIT_FAIL
    return EXIT_INCONCLUSIVE if unresolved else EXIT_OK


def cmd_dims(args, out) -> int:
    from .tcomplex import build_truncation, dims_by_K, dims_by_t, k_complex_dim

    datum = _load_spec(args.spec)
    space = build_truncation(datum, args.window)
    by_t = dims_by_t(space)
    by_K = dims_by_K(space)
    mismatches = []
    # K^{i,j,k} restricted to the window's r-range and kmax
    for (i, j, k), d in sorted(by_K.items()):
        if d != k_complex_dim(datum, i, j, k):
            mismatches.append({"i": i, "j": j, "k": k, "window": d, "formula": k_complex_dim(datum, i, j, k)})
    rows = [{"i": i, "m": m, "two_r": tr, "dim": d} for (i, m, tr), d in sorted(by_t.items())]
    doc = _report("dims", args, name=datum.name, total=space.dim, by_t=rows,
                  by_K=[{"i": i, "j": j, "k": k, "dim": d} for (i, j, k), d in sorted(by_K.items())],
                  mismatches=mismatches)
    emit(doc, out, args.format, rows)
    return EXIT_OK if not mismatches else EXIT_FAIL


def cmd_check(args, out) -> int:
    from . import operators
    from .tcomplex import build_truncation, cone_cohomology_check

    datum = _load_spec(args.spec)
    space = build_truncation(datum, args.window)
    groups = [g.strip() for g in args.relations.split(",")]
    known = {"sl2", "weyl", "fn", "dualities", "cone"}
    if not set(groups) <= known:
        raise UsageError(f"unknown relation group(s): {sorted(set(groups) - known)}")
    results = []
    inconclusive = 0
    op_groups = tuple(g for g in groups if g != "cone")
    if op_groups:
        rep = operators.check_relations(space, args.samples, groups=op_groups)
        results += [r.as_dict() for r in rep["results"]]
    if "cone" in groups:
        cone = cone_cohomology_check(datum, args.window)
        inconclusive += cone["inconclusive"]
        results.append({"name": "cone pairing", "passed": cone["ok"], "residual": float(cone["failed"]),
                        "checked": cone["passed"] + cone["failed"],
                        "detail": f"ker violations below: {len(cone['ker_violations_below'])}"})
    vacuous = [r["name"] for r in results if r["checked"] == 0]
    ok = all(r["passed"] for r in results)
    doc = _report("check", args, name=datum.name, groups=groups, samples=[[str(a), str(b)] for a, b in args.samples],
                  tolerances={"exact": 0, "fn_relative": 1e-12}, results=results, vacuous=vacuous,
                  inconclusive=inconclusive, ok=ok)
    emit(doc, out)
    if not ok:
        return EXIT_FAIL
    return EXIT_INCONCLUSIVE if (inconclusive or vacuous) else EXIT_OK


def cmd_factors(args, out) -> int:
    from .factors import alternating_product, local_factor

    datum = _load_spec(args.spec)
    s = args.s
    try:
        if args.alternating:
            value = {"alternating": alternating_product(datum, s)}
        elif args.all_m:
            value = {f"m={m}": local_factor(datum, m, s) for m in range(2 * datum.n + 1)}
        else:
            if args.m is None:
                raise UsageError("give --m, --all-m or --alternating")
            value = {f"m={args.m}": local_factor(datum, args.m, s)}
    except ValueError as exc:
        raise UsageError(str(exc))
    if len(value) == 1:
        body = next(iter(value.values())).as_dict()
    else:
        body = {"factors": {k: v.as_dict() for k, v in value.items()}}
    emit(_report("factors", args, name=datum.name, s=s, **body), out)
    return EXIT_OK


def cmd_regdet(args, out) -> int:
    from .regdet import check_alternating, check_deninger, parse_grid

    datum = _load_spec(args.spec)
    try:
        grid = parse_grid(args.s_grid)
    except ValueError as exc:
        raise UsageError(str(exc))
    if datum.field != "C":
        raise UsageError("determinant checks are only set up for complex data")
    if args.alternating:
        reports = [check_alternating(datum, grid, args.tol)]
    elif args.m is not None:
        reports = [check_deninger(datum, args.m, grid, args.tol)]
    else:
        ms = [m for m in range(2 * datum.n + 1) if datum.betti(m)]
        reports = parallel_map(lambda m: check_deninger(datum, m, grid, args.tol), ms)
    ok = all(r["ok"] for r in reports)
    emit(_report("regdet-check", args, name=datum.name, grid=grid, tolerance=args.tol, reports=reports, ok=ok), out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_birkhoff(args, out) -> int:
    from . import birkhoff as bk
    from .operators import monodromy_N
    from .tcomplex import build_truncation

    if bool(args.n_matrix) == bool(args.from_spec):
        raise UsageError("give exactly one of --n-matrix and --from-spec")
    exact_op = None
    if args.n_matrix:
        try:
            with open(args.n_matrix) as fh:
                N = bk.NilpotentOp(np.array(json.load(fh), dtype=complex))
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad N matrix: {exc}")
    else:
        datum = _load_spec(args.from_spec)
        space = build_truncation(datum, args.window)
        N = bk.NilpotentOp.from_space(space)
        exact_op = monodromy_N(space)
    mu, lam = args.mu, args.lam
    if mu == 0 or lam <= 0:
        raise UsageError("need mu != 0 and lambda > 0")
    eps_seq = [float(x) for x in args.eps_seq.split(",")]
    radius, points = args.contour.split(",")
    radius, points = float(radius), int(points)
    tol = args.tol
    checks = []

    def add(name, value, limit, extra=None):
        checks.append({"name": name, "value": value, "tolerance": limit, "passed": value <= limit, **(extra or {})})

    kmax = min(4, max(1, N.nu - 1))
    for k in range(1, kmax + 1):
        r = bk.dk_oracle(N, k, seed=args.seed)
        add(f"d_{k} iterated integral ({r['method']})", r["abs_error"], 1e-6 if k <= 3 else 1e-3)
    lau = bk.laurent_coefficients(N, kmax, points=max(64, 2 * N.nu + 8))
    lau_err = max(bk._max_abs(lau[k] - N.power(k) / math.factorial(k), N.interior) for k in range(kmax + 1))
    add("Laurent coefficients of exp(N/z)", lau_err, 1e-8)
    add("loop = phi_minus^-1 phi_plus", bk.loop_factorization_residual(N, mu, 0.5), tol)
    sc = bk.scaling_consistency(N, lam, mu, eps_seq[0])
    add("scaling consistency", sc["residual"], tol)
    rg = bk.renorm_group(N, lam, eps_seq)
    add("renormalization group limit", rg["final_distance"], 1e-5,
        {"distances": rg["distances"], "extrapolated_distance": rg["limit_distance"]})
    con = bk.connection_residue(N, mu, radius, points)
    add("connection residue = N", con["error"], 1e-8, {"branch_flag": con["branch_flag"],
                                                        "radius_agreement": con["radius_agreement"]})
    gauge = bk.gauge_residue(N, mu, radius, points)
    add("gauge potential residue = -log pi(gamma)", gauge["error"], 1e-8)
    # float round trip: partial sums of the log series carry terms up to
    # (2 pi)^(nu-1), so roundoff scales with it; the exact check below is authoritative
    add("(1/2 pi i) log exp(-2 pi i N) = -N (float)",
        bk._max_abs(bk.log_recovery(bk.monodromy_rep(N)) + N.matrix, N.interior),
        1e-15 * (2 * math.pi) ** max(N.nu - 1, 1))
    if exact_op is not None:
        ex = bk.log_recovery_exact_operator(exact_op)
        add("log exp(cN) = cN (exact)", 0.0 if ex["exact"] else 1.0, 0.0)
    ok = all(c["passed"] for c in checks)
    emit(_report("birkhoff", args, size=N.size, nilpotency=N.nu, mu=mu, lam=lam, eps=eps_seq,
                 contour={"radius": radius, "points": points}, seed=args.seed, checks=checks, ok=ok), out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_triple(args, out) -> int:
    from . import triple as tr

    datum = _load_spec(args.spec)
    if args.u < 0:
        raise UsageError("u must be nonnegative")
    tu = tr.build_Tu(datum, args.u, args.window)
    body = {"name": datum.name, "u": args.u}
    status = EXIT_OK
    if args.layers:
        rows = tr.layer_table(tu)
        emit(_report("triple", args, **body, layers=rows), out, args.format, rows)
        return EXIT_OK
    if args.spectrum or not (args.zeta is not None or args.probe or args.zetal_check):
        spec = tr.dirac_spectrum(tu)
        bound = tr.multiplicity_bound(tu)
        body["spectrum"] = [{"r": r, "eigenvalue": -r, "multiplicity": m, "sigmaL_w2": spec.weighted[r]}
                            for r, m in sorted(spec.multiplicities.items())]
        body["inconclusive_r"] = spec.inconclusive
        body["tails"] = {"upper": spec.upper_tail, "lower": spec.lower_tail}
        body["bound"] = bound
        body["max_multiplicity"] = max(spec.multiplicities.values(), default=0)
        if spec.inconclusive:
            status = EXIT_INCONCLUSIVE
    if args.zeta is not None:
        try:
            body["zeta"] = tr.zeta_dirac(tu, args.zeta)
        except tr.WindowTooSmall as exc:
            body["zeta_error"] = str(exc)
            status = EXIT_INCONCLUSIVE
    if args.probe:
        probe = tr.dimension_spectrum_probe(tu)
        body["probe"] = probe
        if probe["status"] != "ok":
            status = EXIT_INCONCLUSIVE
    if args.zetal_check:
        from .regdet import parse_grid

        if datum.field != "C":
            raise UsageError("the determinant comparison is only set up for complex data")
        rep = tr.connect_prop_zetaL(datum, parse_grid(args.s_grid), args.window, args.tol)
        body["zetal_check"] = rep
        if not rep["ok"]:
            status = EXIT_FAIL
    emit(_report("triple", args, **body), out)
    return status


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="arinfinity", description="Checks and computations for cutoff complexes of Hodge data.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def with_window(p):
        p.add_argument("--window", type=_window, default=DEFAULT_WINDOW, help="rmin,rmax,kmax (default -6,6,12)")

    p = sub.add_parser("validate", help="check a Hodge datum")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("lattice", help="cutoff region and N-range verdicts for one (p, q)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    with_window(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("dims", help="graded dimensions of a truncation")
    p.add_argument("--spec", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    with_window(p)
    p.set_defaults(func=cmd_dims)

    from .operators import DEFAULT_SAMPLES

    p = sub.add_parser("check", help="exact operator relations on a truncation")
    p.add_argument("--spec", required=True)
    p.add_argument("--relations", default="sl2,weyl,fn,dualities",
                   help="comma list of sl2, weyl, fn, dualities, cone")
    p.add_argument("--samples", type=_samples, default=DEFAULT_SAMPLES, help="LAMBDA:S pairs, comma separated")
    with_window(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("factors", help="archimedean Gamma factors")
    p.add_argument("--spec", required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--s", type=_complex, required=True, help="RE or RE,IM")
    p.add_argument("--all-m", action="store_true")
    p.add_argument("--alternating", action="store_true")
    p.set_defaults(func=cmd_factors)

    p = sub.add_parser("regdet-check", help="regularized determinants against Gamma factors")
    p.add_argument("--spec", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--m", type=int)
    g.add_argument("--alternating", action="store_true")
    p.add_argument("--s-grid", default="1.5:4:0.5", help="a:b:step or comma list")
    p.add_argument("--tol", type=_positive, default=1e-8)
    p.set_defaults(func=cmd_regdet)

    p = sub.add_parser("birkhoff", help="Birkhoff factors, RG and connection residues")
    p.add_argument("--n-matrix", help="JSON array-of-arrays")
    p.add_argument("--from-spec", help="take N and Phi from a truncation of this datum")
    p.add_argument("--mu", type=_complex, default=complex(2))
    p.add_argument("--lambda", dest="lam", type=float, default=math.e)
    p.add_argument("--eps-seq", default="1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")
    p.add_argument("--contour", default="0.25,2048", help="RADIUS,POINTS")
    p.add_argument("--tol", type=_positive, default=1e-10)
    p.add_argument("--seed", type=int, default=20240607)
    with_window(p)
    p.set_defaults(func=cmd_birkhoff)

    p = sub.add_parser("triple", help="spectral triple: spectrum, zeta, dimension spectrum")
    p.add_argument("--spec", required=True)
    p.add_argument("--u", type=int, default=0)
    p.add_argument("--spectrum", action="store_true")
    p.add_argument("--zeta", type=_complex)
    p.add_argument("--probe", action="store_true")
    p.add_argument("--zetal-check", action="store_true")
    p.add_argument("--layers", action="store_true", help="list both parts basis by basis")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--s-grid", default="1.5:4:0.5")
    p.add_argument("--tol", type=_positive, default=1e-7)
    with_window(p)
    p.set_defaults(func=cmd_triple)
    return parser


_VALUE_OPTIONS = ("--window", "--s", "--mu", "--zeta", "--samples", "--s-grid", "--eps-seq")


def _glue_negative_values(argv):
    """Allow '--window -4,4,8': argparse would read the value as an option."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2].isdigit():
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(_glue_negative_values(argv))
        if not getattr(args, "command", None):
            raise UsageError("missing subcommand")
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"arinfinity: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
