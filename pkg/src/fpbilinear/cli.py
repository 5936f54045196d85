"""Command-line interface.

Every subcommand emits a JSON envelope

    {"meta": {version, p, seed, config, timestamp, timing},
     "results": [...], "assertions": [{name, pass, observed, bound}, ...]}

and exits 0 when every assertion passed, 1 otherwise (2 on usage
errors).  All randomness flows from --seed; wall-clock data lives only
in meta.timing/meta.timestamp, so identical invocations produce
byte-identical output outside the envelope timing fields.  --format csv
flattens the results rows instead.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__, backend
from .fp_core import make_field
from .gauss import kernel_brute, kernel_closed
from .kernels import k1_brute, k1_reduced
from .operator import cauchy_chain_check, decomposition_terms, estimate_norm
from .roth import count_progressions, density_sweep, sample_set
from .selftest import run_selftest
from .spectral import GridFunction, norm
from .verify import scan_char_sum, scan_k1, scan_k2, scaling_fit


def _threads(args) -> int:
    if args.threads:
        return args.threads
    env = os.environ.get("FPBILINEAR_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return os.cpu_count() or 1


def _emit(args, meta, results, assertions, timing) -> int:
    payload = {
        "meta": {
            "version": __version__,
            "backend": backend.backend_name(),
            "seed": args.seed,
            "config": {
                k: v
                for k, v in sorted(vars(args).items())
                if k not in ("func", "output", "format") and v is not None
            },
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "timing": timing,
        },
        "results": results,
        "assertions": assertions,
    }
    if args.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    else:
        buf = io.StringIO()
        rows = results if isinstance(results, list) else [results]
        flat_rows = []
        for row in rows:
            if isinstance(row, dict):
                flat_rows.append(
                    {k: v for k, v in row.items() if np.isscalar(v) or v is None}
                )
        if not flat_rows:
            flat_rows = [{"note": "no flat results"}]
        writer = csv.DictWriter(
            buf, fieldnames=sorted({k for r in flat_rows for k in r})
        )
        writer.writeheader()
        writer.writerows(flat_rows)
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        print(text)
    failed = [a for a in assertions if not a["pass"]]
    for a in assertions:
        status = "PASS" if a["pass"] else "FAIL"
        print(
            f"[{status}] {a.get('criterion', a['name'])}: {a['name']} "
            f"observed={a['observed']:.6g} bound={a['bound']:.6g}",
            file=sys.stderr,
        )
    return 1 if failed else 0


def _cmd_gauss_check(args) -> int:
    t0 = time.perf_counter()
    ctx = make_field(args.p)
    p = ctx.p
    worst = 0.0
    worst_mod = 0.0
    for a in range(p):
        for b in range(p):
            kc = kernel_closed(ctx, a, b).value
            kb = kernel_brute(ctx, a, b).value
            worst = max(worst, abs(kc - kb))
            if a != 0:
                worst_mod = max(worst_mod, abs(abs(kc) * np.sqrt(p) - 1))
    assertions = [
        {"name": "closed-vs-brute-max-abs-diff", "pass": worst <= 1e-10,
         "observed": worst, "bound": 1e-10},
        {"name": "kernel-modulus-deviation", "pass": worst_mod <= 1e-10,
         "observed": worst_mod, "bound": 1e-10},
    ]
    results = [{"p": p, "max_abs_diff": worst, "modulus_deviation": worst_mod}]
    return _emit(args, {}, results, assertions,
                 {"gauss-check": time.perf_counter() - t0})


def _cmd_kernel_scan(args) -> int:
    t0 = time.perf_counter()
    ctx = make_field(args.p)
    if args.which == "k1":
        rep = scan_k1(ctx, samples=args.samples, seed=args.seed)
        assertions = [
            {"name": "k1-nondegenerate-exactness",
             "pass": rep.extras["sup_nondegenerate_deviation"] <= 1e-6,
             "observed": rep.extras["sup_nondegenerate_deviation"], "bound": 1e-6},
            {"name": "k1-covered-degenerate-bound",
             "pass": rep.extras["sup_covered_degenerate_p_k1"] <= 1.0 + 1e-6,
             "observed": rep.extras["sup_covered_degenerate_p_k1"],
             "bound": 1.0 + 1e-6},
        ]
    else:
        rep = scan_k2(ctx, pair_samples=args.pairs, tau=args.tau,
                      seed=args.seed, threads=_threads(args))
        assertions = [
            {"name": "k2-exceptional-count",
             "pass": rep.extras["max_exceptional_count"] <= 3,
             "observed": rep.extras["max_exceptional_count"], "bound": 3},
        ]
    results = [rep.to_dict()]
    return _emit(args, {}, results, assertions,
                 {"kernel-scan": rep.wall_time, "total": time.perf_counter() - t0})


def _cmd_identity_check(args) -> int:
    t0 = time.perf_counter()
    ctx = make_field(args.p)
    rng = np.random.default_rng(args.seed)
    rows = []
    all_ok = True
    worst = 0.0
    for trial in range(args.trials):
        f1 = GridFunction(rng.standard_normal(ctx.p) + 1j * rng.standard_normal(ctx.p), ctx)
        f2 = GridFunction(rng.standard_normal(ctx.p) + 1j * rng.standard_normal(ctx.p), ctx)
        terms = decomposition_terms(ctx, f1, f2)
        scale = norm(f1, 2.0) ** 2 * norm(f2, 2.0) ** 2
        report = cauchy_chain_check(ctx, f1, f2)
        all_ok = all_ok and report.ok
        worst = max(worst, terms["residual"] / scale)
        rows.append(
            {
                "trial": trial,
                "decomposition_residual_rel": terms["residual"] / scale,
                "chain_ok": report.ok,
                "checks": [
                    {"name": c.name, "kind": c.kind, "pass": c.passed,
                     "residual": c.residual}
                    for c in report.checks
                ],
            }
        )
    assertions = [
        {"name": "decomposition-residual", "pass": worst <= 1e-8,
         "observed": worst, "bound": 1e-8},
        {"name": "cauchy-chain-all-checks", "pass": all_ok,
         "observed": 0 if all_ok else 1, "bound": 0},
    ]
    return _emit(args, {}, rows, assertions,
                 {"identity-check": time.perf_counter() - t0})


def _cmd_operator_norm(args) -> int:
    t0 = time.perf_counter()
    ctx = make_field(args.p)
    est = estimate_norm(ctx, restarts=args.restarts, seed=args.seed,
                        threads=_threads(args))
    from .operator import apply_T

    t = apply_T(ctx, est.witness_f1, est.witness_f2)
    realized = norm(t, 2.0) / (
        norm(est.witness_f1, 2.0) * norm(est.witness_f2, 2.0)
    )
    assertions = [
        {"name": "estimate-realized-by-witnesses",
         "pass": abs(realized - est.value) <= 1e-9,
         "observed": abs(realized - est.value), "bound": 1e-9},
    ]
    results = [
        {"p": args.p, "estimate": est.value, "converged": est.converged,
         "restarts": est.restarts,
         "normalized_by_p_3_16": est.value * args.p ** (3 / 16),
         "normalized_by_p_1_8": est.value * args.p ** (1 / 8)},
    ]
    return _emit(args, {}, results, assertions,
                 {"operator-norm": time.perf_counter() - t0})


def _cmd_scaling_fit(args) -> int:
    t0 = time.perf_counter()
    primes = [int(x) for x in args.primes.split(",")]
    rep = scaling_fit(primes, restarts=args.restarts, seed=args.seed)
    slope = rep.extras["slope"]
    assertions = [
        {"name": "scaling-slope", "pass": slope <= -0.05,
         "observed": slope, "bound": -0.05},
    ]
    rows = [
        {"p": r["p"], "estimate": r["estimate"], "log_p": float(np.log(r["p"])),
         "log_estimate": float(np.log(r["estimate"]))}
        for r in rep.extras["rows"]
    ]
    results = rows + [
        {"slope": slope, "intercept": rep.extras["intercept"],
         "fit_residual": rep.constant_fit[2],
         **{f"reference_{k}": v
            for k, v in rep.extras["reference_exponents"].items()}}
    ]
    return _emit(args, {}, results, assertions,
                 {"scaling-fit": rep.wall_time, "total": time.perf_counter() - t0})


def _cmd_roth_count(args) -> int:
    t0 = time.perf_counter()
    ctx = make_field(args.p)
    assertions = []
    if args.densities:
        densities = [float(x) for x in args.densities.split(",")]
        rep = density_sweep(ctx, args.set, densities, trials=args.trials,
                            seed=args.seed)
        results = rep.extras["rows"]
    else:
        if args.set == "full":
            ind = sample_set(ctx, "interval", 1.0, args.seed)
        else:
            ind = sample_set(ctx, args.set, args.density, args.seed)
        pc = count_progressions(ctx, ind)
        results = [
            {"p": args.p, "set": args.set, "cardinality": ind.cardinality,
             "density": ind.density, "count": pc.count,
             "heuristic": pc.heuristic}
        ]
        if args.set == "full":
            expected = args.p * (args.p - 1)
            assertions.append(
                {"name": "full-field-count", "pass": pc.count == expected,
                 "observed": pc.count, "bound": expected}
            )
    return _emit(args, {}, results, assertions,
                 {"roth-count": time.perf_counter() - t0})


def _cmd_charsum_scan(args) -> int:
    t0 = time.perf_counter()
    ctx = make_field(args.p)
    rep = scan_char_sum(ctx, samples=args.samples, seed=args.seed)
    assertions = [
        {"name": "char-sum-nondegenerate-sup", "pass": rep.normalized_sup <= 4.0,
         "observed": rep.normalized_sup, "bound": 4.0},
    ]
    return _emit(args, {}, [rep.to_dict()], assertions,
                 {"charsum-scan": rep.wall_time, "total": time.perf_counter() - t0})


def _cmd_selftest(args) -> int:
    out = run_selftest(seed=args.seed, scale=args.scale, threads=_threads(args))
    assertions = out["assertions"]
    results = [{"passed": out["passed"], "failed": out["failed"],
                "scale": out["scale"], "backend": out["backend"]}]
    return _emit(args, {}, results, assertions, out["timing"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpbilinear",
        description="Numerical verification of Gauss-sum kernel estimates over F_p",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, p_default=None):
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--threads", type=int, default=0,
                        help="0 = auto (FPBILINEAR_THREADS or cpu count)")
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--output", default=None, help="write report here")
        if p_default is not None:
            sp.add_argument("--p", type=int, default=p_default)

    sp = sub.add_parser("gauss-check", help="closed form vs brute force on a full grid")
    common(sp, p_default=13)
    sp.set_defaults(func=_cmd_gauss_check)

    sp = sub.add_parser("kernel-scan", help="normalised kernel sweeps")
    common(sp, p_default=11)
    sp.add_argument("--which", choices=["k1", "k2"], required=True)
    sp.add_argument("--samples", type=int, default=100_000,
                    help="k1 samples above the full-grid cap")
    sp.add_argument("--pairs", type=int, default=200, help="k2 (u1,u2) pairs")
    sp.add_argument("--tau", type=float, default=2.0,
                    help="k2 exceedance threshold on p^(5/2)|K2|")
    sp.set_defaults(func=_cmd_kernel_scan)

    sp = sub.add_parser("identity-check",
                        help="norm decomposition and proof-chain identities")
    common(sp, p_default=7)
    sp.add_argument("--trials", type=int, default=50)
    sp.set_defaults(func=_cmd_identity_check)

    sp = sub.add_parser("operator-norm", help="alternating lower-bound estimate")
    common(sp, p_default=31)
    sp.add_argument("--restarts", type=int, default=32)
    sp.set_defaults(func=_cmd_operator_norm)

    sp = sub.add_parser("scaling-fit", help="norm estimates across primes")
    common(sp)
    sp.add_argument("--primes", default="11,31,101,211,499")
    sp.add_argument("--restarts", type=int, default=32)
    sp.set_defaults(func=_cmd_scaling_fit)

    sp = sub.add_parser("roth-count", help="quadratic progression counts")
    common(sp, p_default=7)
    sp.add_argument("--set", default="full",
                    choices=["full", "random", "interval", "quadratic_residues"])
    sp.add_argument("--density", type=float, default=0.3)
    sp.add_argument("--densities", default=None,
                    help="comma list; runs a density sweep instead")
    sp.add_argument("--trials", type=int, default=20)
    sp.set_defaults(func=_cmd_roth_count)

    sp = sub.add_parser("charsum-scan", help="one-dimensional character sum scan")
    common(sp, p_default=101)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.set_defaults(func=_cmd_charsum_scan)

    sp = sub.add_parser("selftest", help="run the whole acceptance battery")
    common(sp)
    sp.add_argument("--scale", choices=["full", "quick"], default="full")
    sp.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        parser.exit(2, f"error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
