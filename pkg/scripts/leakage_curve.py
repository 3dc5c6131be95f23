"""How much a sub-threshold coalition learns, as a function of squeezing.

For each subset of fewer than k shares, prints the fidelity between the
coalition's reduced states for two secrets.  A value of 1 means the two
secrets are indistinguishable.
"""

import argparse
import itertools

import numpy as np

from cvqss import scheme as sch
from cvqss.cli import format_table, write_atomic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--n", type=int, default=None)
    ap.add_argument("--alpha0", type=complex, default=0j)
    ap.add_argument("--alpha1", type=complex, default=1 + 0j)
    ap.add_argument("--r-max", type=float, default=4.0)
    ap.add_argument("--points", type=int, default=17)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    spec = sch.ThresholdSchemeSpec(args.k, args.n or 2 * args.k - 1)
    subsets = [s for size in range(1, args.k) for s in itertools.combinations(spec.shares, size)]
    rows = []
    for r in np.linspace(0, args.r_max, args.points):
        enc = sch.encode(args.alpha0, spec, r)
        rows.append([r] + [sch.leakage(enc, s, args.alpha0, args.alpha1) for s in subsets])
    header = ["r"] + ["F_" + "_".join(map(str, s)) for s in subsets]
    write_atomic(args.out, format_table(header, rows))


if __name__ == "__main__":
    main()
