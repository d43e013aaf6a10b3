"""Method comparison table at desk scale.

MC rows are capped (default 10**5 samples); QMC rows use their full counts.

    python scripts/table1.py [--quick] [--mc-samples N]
"""

from _common import parser, save
from weakapprox import bench


def main():
    p = parser(__doc__)
    p.add_argument("--mc-samples", type=int, default=10**5)
    args = p.parse_args()
    mc = 10**4 if args.quick else args.mc_samples
    qmc = 2 * 10**5 if args.quick else None
    rows = bench.table(bench.RunSpec(), mc_samples=mc, qmc_samples=qmc)
    for row, r in rows:
        print(f"{row.method:24s} m={r.spec.m:>9d} error={r.abs_error:.2e} seconds={r.wall_seconds:.2f}")
    checks = bench.table_checks(rows)
    for k, v in checks.items():
        print(f"{k}: {v}")
    save(args.out_dir / "table1.csv", bench.TABLE_COLUMNS, [bench.table_row(row, r) for row, r in rows],
         [f"{k}: {bench.fmt(v)}" for k, v in checks.items()])


if __name__ == "__main__":
    main()
