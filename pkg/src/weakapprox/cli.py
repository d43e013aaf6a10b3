"""Command line front end.

    weakapprox price --scheme nv --n 12 --sampler qmc --samples 200000
    weakapprox price --scheme nv --n 4+2 --sampler qmc --samples 200000
    weakapprox convergence --scheme nv --n 1,2,4,8,16 --samples 1048576
    weakapprox mc-vs-qmc --scheme nv --n 12 --samples 1000,10000,100000
    weakapprox table --mc-samples 100000

Exit status: 0 on success, 2 on configuration errors, 3 when a scheme step
fails (the CSV still carries a FAILED row).
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

from . import bench
from .errors import ConfigurationError, ContractError
from .heston import PARAMS_ENV, load_params

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STEP_FAILURE = 3


def _common(p: argparse.ArgumentParser, n_help: str, samples_help: str):
    p.add_argument("--scheme", default="nv", choices=["em", "cub3", "nv"])
    p.add_argument("--romberg", action="store_true", help="Romberg extrapolation over (n, 2n)")
    p.add_argument("--n", default="12", help=n_help)
    p.add_argument("--n2", type=int, default=None, help="fine level of a Romberg pair (must be 2n)")
    p.add_argument("--sampler", default="qmc", help="mc, qmc (mc-vs-qmc accepts a comma list)")
    p.add_argument("--seed", type=int, default=0, help="PRNG seed for mc")
    p.add_argument("--skip", type=int, default=1, help="leading Sobol points skipped for qmc")
    p.add_argument("--samples", default="200000", help=samples_help)
    p.add_argument("--params", default=None, help=f"key=value parameter file (default ${PARAMS_ENV})")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.add_argument("--policy", default="truncate", choices=["reject", "truncate"],
                   help="Euler-Maruyama handling of negative variance")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--block", type=int, default=bench.DEFAULT_BLOCK)
    p.add_argument("--reference", type=float, default=None, help="override the reference price")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakapprox", description="Weak SDE approximation benchmarks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("price", help="one price estimate"), "steps, or a Romberg pair a+b", "sample count")
    _common(sub.add_parser("convergence", help="error against n"), "comma-separated list of n", "sample count")
    mq = sub.add_parser("mc-vs-qmc", help="error against sample count")
    _common(mq, "steps, or a+b", "comma-separated ascending sample counts")
    mq.set_defaults(sampler="mc,qmc", samples="1000,10000,100000")
    t = sub.add_parser("table", help="method comparison table")
    _common(t, "ignored", "ignored")
    t.add_argument("--mc-samples", type=int, default=10**5, help="cap on MC sample counts")
    t.add_argument("--qmc-samples", type=int, default=None, help="optional cap on QMC sample counts")
    return parser


def _int_list(text):
    return [int(float(p)) for p in str(text).split(",") if p.strip()]


def _base_spec(args, n=None, romberg=False, sampler=None, m=None) -> bench.RunSpec:
    params = load_params(args.params)
    kwargs = dict(
        scheme=args.scheme,
        romberg=romberg or args.romberg,
        sampler=sampler or args.sampler,
        seed=args.seed,
        skip=args.skip,
        params=params,
        policy=args.policy,
        threads=args.threads,
        block=args.block,
    )
    if n is not None:
        kwargs["n"] = n
    if m is not None:
        kwargs["m"] = m
    if args.reference is not None:
        kwargs["reference"] = args.reference
    return bench.RunSpec(**kwargs)


def _single_n(args):
    n, pair = bench.parse_n(args.n, args.n2)
    return n, pair or args.romberg


def cmd_price(args, out) -> int:
    n, romberg = _single_n(args)
    spec = _base_spec(args, n=n, romberg=romberg, m=int(float(args.samples)))
    result = bench.price(spec)
    bench.write_csv(out, bench.PRICE_COLUMNS, [bench.price_row(result)])
    return EXIT_OK if result.ok else EXIT_STEP_FAILURE


def cmd_convergence(args, out) -> int:
    ns = _int_list(args.n)
    spec = _base_spec(args, m=int(float(args.samples)))
    results, slope = bench.convergence(spec, ns)
    bench.write_csv(out, bench.PRICE_COLUMNS, [bench.price_row(r) for r in results],
                    [f"slope={bench.fmt(slope)}"])
    return EXIT_OK if all(r.ok for r in results) else EXIT_STEP_FAILURE


def cmd_mc_vs_qmc(args, out) -> int:
    n, romberg = _single_n(args)
    samplers = [s.strip() for s in args.sampler.split(",") if s.strip()]
    ms = _int_list(args.samples)
    spec = _base_spec(args, n=n, romberg=romberg, sampler=samplers[0], m=ms[0])
    results = bench.mc_vs_qmc(spec, ms, samplers)
    bench.write_csv(out, bench.MC_QMC_COLUMNS, [bench.price_row(r) for r in results])
    return EXIT_OK if all(r.ok for r in results) else EXIT_STEP_FAILURE


def cmd_table(args, out) -> int:
    base = _base_spec(args)
    rows = bench.table(base, mc_samples=args.mc_samples, qmc_samples=args.qmc_samples)
    checks = bench.table_checks(rows)
    bench.write_csv(out, bench.TABLE_COLUMNS, [bench.table_row(row, r) for row, r in rows],
                    [f"{k}: {bench.fmt(v)}" for k, v in checks.items()])
    return EXIT_OK if all(r.ok for _, r in rows) else EXIT_STEP_FAILURE


COMMANDS = {
    "price": cmd_price,
    "convergence": cmd_convergence,
    "mc-vs-qmc": cmd_mc_vs_qmc,
    "table": cmd_table,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        with contextlib.ExitStack() as stack:
            out = sys.stdout if args.out is None else stack.enter_context(open(args.out, "w", newline=""))
            return COMMANDS[args.command](args, out)
    except (ConfigurationError, ContractError, ValueError) as exc:
        print(f"weakapprox: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
