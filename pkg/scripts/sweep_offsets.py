"""Flux error against source offset for the linear (n=8) and Gaussian (n=16)
boundary bases, plus the order-0 quadrature error zeros for both rules.

    python scripts/sweep_offsets.py [--jobs 4] [--elements 40] [--outdir results]
"""
import argparse
from pathlib import Path

from radial_bem.cli import main

p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
p.add_argument("--jobs", default="1")
p.add_argument("--elements", default="40")
p.add_argument("--outdir", default="results")
args = p.parse_args()
out = Path(args.outdir)
out.mkdir(parents=True, exist_ok=True)

for n in ("8", "16"):
    main(["optimal-points", "--nodes", n, "--out", str(out / f"zeros_n{n}.csv")])
    main(["error-profile", "--nodes", n, "--out", str(out / f"err_profile_n{n}.csv")])
for basis, n in (("linear", "8"), ("linear", "16"), ("gaussian", "16")):
    for exact in ("poly", "expcos"):
        main(["sweep-s", "--basis", basis, "--nodes", n, "--elements", args.elements, "--exact", exact,
              "--jobs", args.jobs, "--out", str(out / f"sweep_{basis}_n{n}_{exact}.csv")])
