"""Command-line front end.

Primary output goes to stdout as CSV or JSON, preceded by one comment line
"# generated ..." that carries the timestamp; everything after it is
deterministic for a fixed set of flags. Diagnostics go to stderr.

Exit codes: 0 ok, 1 unexpected violations, 2 usage or domain error.
"""
import argparse
import csv
from dataclasses import dataclass
import datetime
from fractions import Fraction
from importlib import resources
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from .errors import AbundancyError

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    limit: int
    format: str = "csv"
    threads: int = 1
    envelope_variant: str = "corrected"
    cache_dir: Optional[str] = None

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.limit < 2:
            raise ValueError("limit must be >= 2")


@dataclass
class Report:
    columns: list
    rows: list
    summary: dict
    violations: list  # (criterion, n) pairs found by the run


# -- formatting -----------------------------------------------------------------------

def fmt(v):
    """15 significant digits for floats, num/den for rationals."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.15g}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _json_value(v):
    s = fmt(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return float(s) if math.isfinite(float(v)) else s
    if isinstance(v, (int, np.integer)):
        return int(v)
    return s


def render(report, form):
    if form == "json":
        doc = {"columns": report.columns,
               "rows": [[_json_value(v) for v in row] for row in report.rows],
               "summary": {k: _json_value(v) for k, v in report.summary.items()}}
        return json.dumps(doc) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.columns)
    for row in report.rows:
        w.writerow([fmt(v) for v in row])
    if report.summary:
        buf.write("\n")
        w.writerow(["key", "value"])
        for k, v in report.summary.items():
            w.writerow([k, fmt(v)])
    return buf.getvalue()


# -- expectations ----------------------------------------------------------------------

def load_expectations(path=None):
    """criterion -> set of n (strings), '*' meaning any n."""
    if path is None:
        text = resources.files("abundancy").joinpath("data/expected.csv").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    out = {}
    for row in csv.DictReader(io.StringIO(text)):
        out.setdefault(row["criterion"].strip(), set()).add(row["n"].strip())
    return out


def unexpected(violations, expected):
    bad = []
    for crit, n in violations:
        allowed = expected.get(crit, set())
        if "*" not in allowed and str(n) not in allowed:
            bad.append((crit, n))
    return bad


# -- subcommands -----------------------------------------------------------------------

def _scan_report(res, violators_only, modulus=1, residue=0):
    if modulus > 1:
        res = res.where(res.n % modulus == residue % modulus)
    mask = ~res.holds if violators_only else np.ones(len(res), dtype=bool)
    idx = np.nonzero(mask)[0]
    rows = [(int(res.n[i]), res.criterion, bool(res.holds[i]), float(res.margin[i]), res.mode)
            for i in idx]
    viol = [(res.criterion, int(n)) for n in res.violators()]
    summary = {"scanned": len(res), "violations": len(viol),
               "indeterminate": int(res.indeterminate.sum())}
    return Report(["n", "criterion", "holds", "margin", "mode"], rows, summary, viol)


def cmd_scan_robin(cfg, args):
    from .criteria import robin_scan
    res = robin_scan(cfg.limit, args.variant, threads=cfg.threads)
    return _scan_report(res, args.violators, args.modulus, args.residue)


def cmd_scan_lagarias(cfg, args):
    from .criteria import lagarias_scan
    res = lagarias_scan(cfg.limit, threads=cfg.threads)
    return _scan_report(res, args.violators, args.modulus, args.residue)


def cmd_scan_totient(cfg, args):
    from .criteria import rs_totient_scan
    res = rs_totient_scan(cfg.limit, threads=cfg.threads)
    return _scan_report(res, args.violators, args.modulus, args.residue)


def _table(cfg):
    from .primes import build_table
    return build_table(cfg.limit, cache_dir=cfg.cache_dir)


def cmd_primorials(cfg, args):
    from .criteria import nicolas_scan, primorial_probe_scan, rs_primorial_scan
    table = _table(cfg)
    probe = primorial_probe_scan(table)
    nic = nicolas_scan(table)
    rs = rs_primorial_scan(table)
    viol = [("nicolas", int(k)) for k in nic.violators()]
    for k in rs.violators():
        k = int(k)
        n = math.prod(int(p) for p in table.primes[:k]) if k <= 40 else f"N_{k}"
        viol.append(("rs_totient", n))
    cols = ["k", "p_k", "log_N", "delta", "tail", "lhs12", "rhs12"]
    keys = ["k", "p_k", "log_N", "delta", "tail", "lhs_12", "rhs_12"]
    step = max(1, args.every)
    rows = [tuple(probe[key][i] for key in keys) for i in range(0, len(probe["k"]), step)]
    if args.violators:
        rows = [r for r in rows if not r[3] > 0]
    summary = {"primorials": len(nic), "nicolas_min_margin": float(nic.margin[1:].min()),
               "nicolas_violations": int((~nic.holds).sum()),
               "rs_exceptions_k": " ".join(str(int(k)) for k in rs.violators()),
               "delta_min": float(probe["delta"].min())}
    return Report(cols, rows, summary, viol)


def _log_grid(lo, hi, n):
    return np.minimum(np.exp(np.linspace(math.log(lo), math.log(hi), n)), hi)


def cmd_mertens_grid(cfg, args):
    from .mertens import prime_sum_grid
    table = _table(cfg)
    xs = _log_grid(286, cfg.limit, args.points)
    kw = {"a": args.residue, "q": args.modulus} if args.variant == "ap" else {}
    rows = [(s.x, s.empirical, s.main_term, s.residual, s.envelope, s.within)
            for s in prime_sum_grid(table, xs, args.variant, cfg.envelope_variant, **kw)]
    fails = sum(not r[-1] for r in rows)
    return Report(["x", "empirical", "main_term", "residual", "envelope", "within"], rows,
                  {"variant": args.variant, "envelope": cfg.envelope_variant, "outside": fails}, [])


def cmd_products_grid(cfg, args):
    from .mertens import euler_product_grid
    table = _table(cfg)
    xs = _log_grid(286, cfg.limit, args.points)
    rows, viol = [], []
    for variant in ("one_minus", "p_over_pm1", "one_plus"):
        for s in euler_product_grid(table, xs, variant):
            rows.append((variant, s.x, s.empirical, s.main_term, s.residual, s.envelope, s.within))
            if variant != "one_plus" and not s.within:
                viol.append((f"product_{variant}", fmt(s.x)))
    return Report(["variant", "x", "empirical", "main_term", "residual", "envelope", "within"],
                  rows, {}, viol)


def cmd_constants(cfg, args):
    from .mertens import estimate_constants
    table = _table(cfg)
    rows = [(e.name, e.method, e.value, "" if e.reference is None else e.reference,
             "" if e.abs_error is None else e.abs_error) for e in estimate_constants(table)]
    return Report(["name", "method", "value", "reference", "abs_error"], rows, {}, [])


def cmd_extremal(cfg, args):
    from .extremal import record_scan
    rows = []
    for kind in ("highly_composite", "superabundant"):
        for r in record_scan(cfg.limit, kind):
            k = Fraction(r.key)
            rows.append((r.n, k.numerator, k.denominator, kind))
    return Report(["n", "key_numerator", "key_denominator", "kind"], rows, {}, [])


def cmd_ca(cfg, args):
    from .extremal import ca_grid, ca_oracle, colossally_abundant, sigma_ratio
    eps_list = [args.eps] if args.eps is not None else list(ca_grid())
    rows, viol = [], []
    for eps in eps_list:
        F = colossally_abundant(eps)
        logN, log_ab = sigma_ratio(F)
        oracle = ""
        if args.oracle_limit and F.value <= args.oracle_limit:
            oracle = ca_oracle(eps, args.oracle_limit)
            if oracle != F.value:
                viol.append(("ca_oracle", fmt(eps)))
        rows.append((eps, str(F), logN, log_ab, oracle))
    return Report(["eps", "n", "log_N", "log_sigma_over_N", "oracle"], rows, {}, viol)


def cmd_erdos_kac(cfg, args):
    from .stats import erdos_kac
    res = erdos_kac(cfg.limit, args.bins)
    h = res["histogram"]
    rows = [(lo, hi, m) for lo, hi, m in zip(h.bin_edges[:-1], h.bin_edges[1:], h.masses)]
    return Report(["bin_lo", "bin_hi", "mass"], rows,
                  {"x": cfg.limit, "samples": h.sample_count, "ks_distance": res["ks_distance"]}, [])


def cmd_averages(cfg, args):
    from .stats import average_order
    rows = []
    specs = [("sigma0", 1), ("sigma_s", 1), ("sigma_s", 2), ("sigma_s", 3), ("phi", 1), ("omega", 1)]
    for fn, s in specs:
        r = average_order(cfg.limit, fn, s)
        alt_name, (alt_main, alt_res) = next(iter(r.alternatives.items()), ("", ("", "")))
        rows.append((r.x, r.fn, r.empirical_sum, r.main_term, r.fitted_constant, r.residual,
                     alt_name, alt_main, alt_res))
    return Report(["x", "fn", "empirical_sum", "main_term", "fitted_constant", "residual",
                   "alt_main_name", "alt_main_term", "alt_residual"], rows, {}, [])


def cmd_r4(cfg, args):
    from .foursquares import r4_bound, r4_jacobi, r4_odd_exceptions, r4_table
    viol = []
    summary = {}
    if args.oracle_limit:
        T = r4_table(args.oracle_limit)
        mism = [n for n in range(1, args.oracle_limit + 1) if r4_jacobi(n).r4 != T[n]]
        summary["oracle_limit"] = args.oracle_limit
        summary["oracle_mismatches"] = len(mism)
        viol += [("r4_oracle", n) for n in mism]
    rows = []
    if cfg.limit >= 17:
        exc, _ = r4_odd_exceptions(cfg.limit)
        for n in exc:
            n = int(n)
            bound, branch = r4_bound(n)
            rows.append((n, r4_jacobi(n).r4, branch, bound, False))
        viol += [("r4_bound_odd", int(n)) for n in exc]
        summary["odd_exceptions"] = len(exc)
        summary["largest_exception"] = int(exc[-1]) if len(exc) else 0
    return Report(["n", "r4", "branch", "bound", "holds"], rows, summary, viol)


def cmd_density(cfg, args):
    from .stats import density_search
    tol = args.eps if args.eps is not None else 1e-3
    n = density_search(args.target, tol, cfg.limit)
    return Report(["target", "tol", "budget", "n"],
                  [(args.target, tol, cfg.limit, "not-found" if n is None else n)], {}, [])


def cmd_identities(cfg, args):
    from .arith import factor_int, identity_suite
    counts, first, errata = {}, {}, {}
    for n in range(1, cfg.limit + 1):
        rep = identity_suite(factor_int(n))
        for name, res in rep.items():
            counts.setdefault(name, 0)
            errata[name] = res.erratum
            if not res.holds and not res.skipped:
                counts[name] += 1
                first.setdefault(name, n)
    rows = [(name, cfg.limit, counts[name], first.get(name, ""), errata[name]) for name in counts]
    viol = [(f"identity_{name}", first[name]) for name in counts
            if counts[name] and not errata[name]]
    return Report(["identity", "checked_upto", "failures", "first_failure", "printed_form"],
                  rows, {}, viol)


def cmd_errata(cfg, args):
    from .errata import collect
    rows = [(e.name, e.printed, e.corrected, e.evidence, e.confirmed) for e in collect(cfg.limit)]
    return Report(["item", "printed", "corrected", "evidence", "confirmed"], rows, {}, [])


COMMANDS = {
    "scan-robin": (cmd_scan_robin, 10**4, "strict or unconditional Robin scan over n <= limit"),
    "scan-lagarias": (cmd_scan_lagarias, 10**4, "Lagarias scan over n <= limit"),
    "scan-totient": (cmd_scan_totient, 10**4, "N/phi(N) upper-bound scan over n <= limit"),
    "primorials": (cmd_primorials, 10**5, "Nicolas, totient bound and probe over primorials"),
    "mertens-grid": (cmd_mertens_grid, 10**6, "prime reciprocal sums against their envelope"),
    "products-grid": (cmd_products_grid, 10**6, "Euler products against their envelopes"),
    "constants": (cmd_constants, 10**6, "estimates of gamma, B, A+- and progression constants"),
    "extremal": (cmd_extremal, 10**4, "highly composite and superabundant record scans"),
    "ca": (cmd_ca, 10**5, "colossally abundant numbers on an eps grid"),
    "erdos-kac": (cmd_erdos_kac, 10**5, "standardised omega histogram and KS distance"),
    "averages": (cmd_averages, 10**5, "average orders of sigma0, sigma_s, phi, omega"),
    "r4": (cmd_r4, 10**3, "four-square counts: oracle check and bound exceptions"),
    "density": (cmd_density, 10**5, "search for sigma(n)/(e^g n loglog n) near a target"),
    "identities": (cmd_identities, 10**3, "exact divisor/totient identity suite"),
    "errata": (cmd_errata, 10**6, "misprinted formulas with computed evidence"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="abundancy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, default_limit, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--limit", type=int, default=default_limit)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--envelope", choices=("printed", "corrected"), default="corrected")
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--modulus", type=int, default=1)
        p.add_argument("--residue", type=int, default=0)
        p.add_argument("--violators", action="store_true")
        p.add_argument("--expect", default=None, help="CSV of expected violations (criterion,n)")
        p.add_argument("--oracle-limit", type=int, default=0)
        if name == "scan-robin":
            p.add_argument("--variant", choices=("strict", "unconditional"), default="strict")
        if name == "primorials":
            p.add_argument("--every", type=int, default=1, help="emit every k-th row")
        if name in ("mertens-grid", "products-grid"):
            p.add_argument("--points", type=int, default=200)
        if name == "mertens-grid":
            p.add_argument("--variant", default="inv_p",
                           choices=("inv_p", "inv_p_minus_1", "inv_p_plus_1", "ap"))
        if name == "erdos-kac":
            p.add_argument("--bins", type=int, default=40)
        if name == "density":
            p.add_argument("--target", type=float, default=0.5)
    return parser


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = RunConfig(args.limit, args.format, args.threads, args.envelope,
                        os.environ.get("ABUNDANCY_CACHE_DIR"))
        handler = COMMANDS[args.command][0]
        report = handler(cfg, args)
        expected = load_expectations(args.expect)
    except (AbundancyError, ValueError, OSError) as exc:
        print(f"abundancy: {exc}", file=stderr)
        return EXIT_USAGE
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    stdout.write(f"# generated {stamp} by abundancy {args.command}\n")
    stdout.write(render(report, cfg.format))
    bad = unexpected(report.violations, expected)
    for crit, n in bad:
        print(f"unexpected violation: {crit} n={n}", file=stderr)
    return EXIT_VIOLATIONS if bad else EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
