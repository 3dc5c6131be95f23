"""Reconstruction fidelity against dealer squeezing for every pair in the (2,3) scheme.

Writes r, then one column per collaborator pair, then the (1+tanh r)/2 reference.
"""

import argparse
import itertools
import math

import numpy as np

from cvqss import scheme as sch
from cvqss.cli import format_table, write_atomic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=complex, default=1 + 0j)
    ap.add_argument("--r-max", type=float, default=3.0)
    ap.add_argument("--points", type=int, default=61)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    spec = sch.ThresholdSchemeSpec(2, 3)
    pairs = list(itertools.combinations(spec.shares, 2))
    rows = []
    for r in np.linspace(0, args.r_max, args.points):
        F = [sch.roundtrip_fidelity(args.alpha, spec, p, r) for p in pairs]
        rows.append([r, *F, (1 + math.tanh(r)) / 2])
    header = ["r"] + [f"F_{a}{b}" for a, b in pairs] + ["tanh_law"]
    write_atomic(args.out, format_table(header, rows))


if __name__ == "__main__":
    main()
