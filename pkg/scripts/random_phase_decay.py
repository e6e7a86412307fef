"""Mean DJ success probability under random phases as the register grows.

With a forward second call, case A succeeds with probability
|sum_x exp(i theta_x)|^2 / 4^n whose mean is 2^-n.  Prints a CSV of
n, trials, mean, stderr, 2^-n and the inverse-call mean for comparison.
"""

import argparse
import csv
import math
import sys

import numpy as np

from phaseoracle import rng
from phaseoracle.oracle import MembershipTable, OracleSpec, make_phase_profile
from phaseoracle.protocols import DJConfig, dj_run


def sweep(max_n: int, trials: int, seed: int):
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["n", "trials", "forward_mean", "forward_stderr", "two_pow_minus_n", "inverse_mean"])
    for n in range(1, max_n + 1):
        m = MembershipTable(n, np.ones(1 << n, np.uint8))
        forward, inverse = [], []
        for t in range(trials):
            o = OracleSpec(m, make_phase_profile(n, "uniform_random", seed=rng.derive_seed(seed, t)))
            forward.append(dj_run(o, DJConfig("sign_flip", "forward_U")).probability)
            inverse.append(dj_run(o, DJConfig("sign_flip", "inverse_U")).probability)
        f = np.array(forward)
        writer.writerow([
            n, trials, repr(float(f.mean())), repr(float(f.std(ddof=1) / math.sqrt(trials))),
            repr(2.0**-n), repr(float(np.mean(inverse))),
        ])


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--max-n", type=int, default=10)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=1994)
    args = parser.parse_args()
    sweep(args.max_n, args.trials, args.seed)
