"""Pairwise Hardy-norm brackets (H^M, H^S, H^s, P, Q) across resolutions."""

import argparse
import json

from mohardy.harness import five_space_campaign


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--phi", default="power:p=2")
    ap.add_argument("--resolutions", default="6,8,10")
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--base-dir", default=".", help="directory holding weight CSVs referenced by --phi")
    ap.add_argument("--json", default=None, help="write the full bracket table here")
    args = ap.parse_args()

    camp = five_space_campaign(args.phi, tuple(int(x) for x in args.resolutions.split(",")), args.trials, args.seed,
                               base_dir=args.base_dir)
    for N, pairs in camp.brackets.items():
        print(f"N={N}")
        for pair, (lo, hi) in pairs.items():
            print(f"  {pair:12s} [{lo:.4f}, {hi:.4f}]")
    print(f"worst drift {camp.worst_drift:.4f} (stable: {camp.stable()})")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(camp.to_json(), fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
