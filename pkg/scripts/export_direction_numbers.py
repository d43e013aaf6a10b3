"""Write the Joe-Kuo direction numbers bundled with scipy as a plain text table.

Usage: python scripts/export_direction_numbers.py [DIMS] [OUT]

The output uses the usual layout: a header line, then one row per dimension
``d s a m_1 ... m_s`` starting at d=2 (dimension 1 is the van der Corput
sequence and needs no row).
"""

import os
import sys

import numpy as np
import scipy.stats

DEFAULT_OUT = os.path.join(
    os.path.dirname(__file__), "..", "src", "weakapprox", "data", "joe_kuo_6_4096.txt"
)


def main(dims=4096, out=DEFAULT_OUT):
    path = os.path.join(os.path.dirname(scipy.stats.__file__), "_sobol_direction_numbers.npz")
    tables = np.load(path)
    poly, vinit = tables["poly"], tables["vinit"]
    lines = ["d s a m_i"]
    for j in range(1, dims):
        p = int(poly[j])
        s = p.bit_length() - 1
        a = (p >> 1) & ((1 << (s - 1)) - 1)
        m = " ".join(str(int(v)) for v in vinit[j, :s])
        lines.append(f"{j + 1} {s} {a} {m}")
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    args = sys.argv[1:]
    main(int(args[0]) if args else 4096, args[1] if len(args) > 1 else DEFAULT_OUT)
