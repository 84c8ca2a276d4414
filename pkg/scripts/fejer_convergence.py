"""Convergence of Walsh-Fejer means and partial sums in L^phi for random inputs."""

import argparse

import numpy as np

from mohardy.harness import fejer_convergence
from mohardy.harness.generators import leaf_sample
from mohardy.phispec import parse


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--phi", default="power:p=2")
    ap.add_argument("--resolution", type=int, default=8)
    ap.add_argument("--law", default="gaussian")
    ap.add_argument("--samples", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    phi = parse(args.phi)
    for i in range(args.samples):
        f = leaf_sample(args.law, args.resolution, np.random.default_rng([args.seed, i]))
        table = fejer_convergence(f, phi)
        print(f"sample {i}: ||f|| = {table.norm_f:.4f}")
        print("  order  sigma_error     partial_error")
        for n, se, pe in table.rows():
            print(f"  {n:5d}  {se:.6e}  {pe:.6e}")
        print(f"  limit  {table.limit_sigma_error:.3e}   nonincreasing: sigma {table.sigma_nonincreasing()}, "
              f"partial {table.partial_nonincreasing()}")


if __name__ == "__main__":
    main()
