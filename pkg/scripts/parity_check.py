"""Gauss-rule versus graded reference element integrals for the linear basis.

    python scripts/parity_check.py [--elements 40] [--outdir results]
"""
import argparse
from pathlib import Path

from radial_bem.cli import main

p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
p.add_argument("--elements", default="40")
p.add_argument("--outdir", default="results")
args = p.parse_args()
out = Path(args.outdir)
out.mkdir(parents=True, exist_ok=True)

for exact in ("poly", "expcos"):
    main(["parity", "--exact", exact, "--elements", args.elements, "--out", str(out / f"parity_{exact}.csv")])
