"""Validate atomic decompositions of random martingales for every kind."""

import argparse
import json

from mohardy.harness import AtomCampaignConfig, atom_campaign


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--phi", default="power:p=2")
    ap.add_argument("--kinds", default="s,P,Q,M,S")
    ap.add_argument("--resolution", type=int, default=8)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--no-fejer", action="store_true", help="skip the maximal Fejer quantity for kind M")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    for kind in args.kinds.split(","):
        rep = atom_campaign(AtomCampaignConfig(kind, args.phi, args.resolution, args.trials, args.seed, args.r,
                                               fejer=not args.no_fejer))
        if args.json:
            print(json.dumps(rep.to_json()))
            continue
        line = (f"kind {kind}: {rep.atoms_checked} atoms, {rep.validation_failures} invalid, "
                f"reconstruction {rep.worst_reconstruction_error:.1e}, "
                f"atomic/direct norm in [{rep.norm_ratio_min:.3f}, {rep.norm_ratio_max:.3f}]")
        if rep.s_bound_violations is not None:
            line += f", s-bound violations {rep.s_bound_violations}"
        if rep.fejer_ratio_max is not None:
            line += f", Fejer ratio max {rep.fejer_ratio_max:.3f}"
        print(line)


if __name__ == "__main__":
    main()
