"""Run a sweep of inequality campaigns and write one CSV/JSON pair per (inequality, phi)."""

import argparse
from pathlib import Path

from mohardy.harness import ExperimentConfig, verify, write_report
from mohardy.harness.campaigns import CAMPAIGNS

DEFAULT_PHIS = ("power:p=2", "power:p=1.5", "power:p=0.8", "loggrow:alpha=1.5")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--inequalities", default=",".join(sorted(CAMPAIGNS)))
    ap.add_argument("--phis", default=";".join(DEFAULT_PHIS), help="semicolon-separated phi specs")
    ap.add_argument("--resolutions", default="6,8,10")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--outdir", default="results/campaigns")
    ap.add_argument("--exploratory", action="store_true")
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    resolutions = tuple(int(x) for x in args.resolutions.split(","))
    for name in args.inequalities.split(","):
        for spec in args.phis.split(";"):
            cfg = ExperimentConfig(name, spec, resolutions, args.trials, args.seed, strict=not args.exploratory)
            rep = verify(cfg)
            stem = f"{name}__{spec.replace(':', '_').replace(',', '_').replace('=', '')}"
            write_report(rep, out / f"{stem}.csv")
            status = "REJECTED" if rep.rejected else ("PASS" if rep.passed else "FAIL")
            worst = max((r.max_ratio for r in rep.rows), default=float("nan"))
            print(f"{name:16s} {spec:28s} {status:8s} max_ratio={worst:.4f} drift={rep.stability_ratio:.3f}")


if __name__ == "__main__":
    main()
