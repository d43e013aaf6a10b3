"""Discretization error against n for EM, NV and their Romberg versions (QMC).

    python scripts/figure1_discretization.py [--quick]
"""

from _common import parser, save
from weakapprox import bench

SERIES = {
    "em": (False, [8, 16, 32, 64, 128]),
    "em+romberg": (True, [4, 8, 16, 32, 64]),
    "nv": (False, [1, 2, 4, 8, 16]),
    "nv+romberg": (True, [1, 2, 4, 8]),
}


def main():
    args = parser(__doc__).parse_args()
    m = 2**16 if args.quick else 2**20
    rows, slopes = [], []
    for label, (romberg, ns) in SERIES.items():
        spec = bench.RunSpec(scheme=label.split("+")[0], romberg=romberg, sampler="qmc", m=m)
        results, slope = bench.convergence(spec, ns)
        rows += [bench.price_row(r) for r in results]
        slopes.append(f"{label} slope={bench.fmt(slope)}")
        print(slopes[-1])
    save(args.out_dir / "figure1_discretization.csv", bench.PRICE_COLUMNS, rows, slopes)


if __name__ == "__main__":
    main()
