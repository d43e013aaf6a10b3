"""Error against sample count for MC and QMC with the NV scheme at n=12.

    python scripts/figure2_mc_vs_qmc.py [--quick]
"""

from _common import parser, save
from weakapprox import bench


def main():
    args = parser(__doc__).parse_args()
    ms = [10**3, 10**4, 10**5] if args.quick else [10**3, 3 * 10**3, 10**4, 3 * 10**4, 10**5, 3 * 10**5, 10**6]
    spec = bench.RunSpec(scheme="nv", n=12)
    results = bench.mc_vs_qmc(spec, ms)
    save(args.out_dir / "figure2_mc_vs_qmc.csv", bench.MC_QMC_COLUMNS, [bench.price_row(r) for r in results])


if __name__ == "__main__":
    main()
