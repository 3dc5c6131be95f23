"""Compare the Gaussian pipeline with the truncated Fock simulator on random (2,3) roundtrips."""

import argparse
import itertools

import numpy as np

from cvqss import fock as f
from cvqss import gaussian as g
from cvqss import scheme as sch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--cutoff", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    spec = sch.ThresholdSchemeSpec(2, 3)
    print("r,alpha,pair,moment_err,F_gauss,F_fock")
    worst = 0.0
    for _ in range(args.samples):
        r = float(rng.uniform(0, 0.5))
        alpha = rng.uniform(0, 1) * np.exp(2j * np.pi * rng.uniform())
        for pair in itertools.combinations(spec.shares, 2):
            _, out, F_fock = f.roundtrip_23(alpha, r, pair, N=args.cutoff)
            modes = [i - 1 for i in pair]
            ref = g.apply(sch.solve_T(spec, pair).S, sch.encode(alpha, spec, r).state, modes)
            mean, cov = f.moments(out)
            err = max(np.abs(mean - ref.mean).max(), np.abs(cov - ref.cov).max())
            worst = max(worst, err)
            F_gauss = sch.roundtrip_fidelity(alpha, spec, pair, r)
            print(f"{r:.6f},{alpha:.6f},{pair[0]}{pair[1]},{err:.3e},{F_gauss:.12g},{F_fock:.12g}")
    print(f"# worst moment error {worst:.3e}")


if __name__ == "__main__":
    main()
