#!/usr/bin/env python3
"""Resistivity sweep on the ABC field: one run directory per mu, each with
budget.csv whose helicity column decays as exp(-2 mu t).  The CSVs double
as fixtures for the plotting front end."""

import argparse
from pathlib import Path

from emhd.cli import main as emhd_main


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="mu_sweep")
    ap.add_argument("--mus", default="0.1,0.05,0.025")
    ap.add_argument("--t-end", type=float, default=1.0)
    args = ap.parse_args()

    root = Path(args.out)
    root.mkdir(parents=True, exist_ok=True)
    for mu in (float(m) for m in args.mus.split(",")):
        run_dir = root / f"mu_{mu:g}"
        cfg = root / f"mu_{mu:g}.cfg"
        cfg.write_text(
            f"n = 32\nmu = {mu:g}\nd_i = 1.0\ndt = 1e-3\nt_end = {args.t_end:g}\n"
            f"init = abc\nsnapshot_every = 50\nout_dir = {run_dir}\n"
        )
        code = emhd_main(["run", str(cfg)])
        print(f"mu={mu:g}: exit {code}, budget at {run_dir / 'budget.csv'}")


if __name__ == "__main__":
    main()
