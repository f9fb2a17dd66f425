"""Interior-error tables for the square and flower domains.

    python scripts/reproduce_tables.py [--jobs 4] [--outdir results]
"""
import argparse
from pathlib import Path

from radial_bem.cli import main

p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
p.add_argument("--jobs", default="1")
p.add_argument("--outdir", default="results")
args = p.parse_args()
out = Path(args.outdir)
out.mkdir(parents=True, exist_ok=True)

main(["table", "--domain", "square", "--exact", "expcos", "--offset", "0.43",
      "--jobs", args.jobs, "--out", str(out / "table_square.csv")])
main(["table", "--domain", "flower", "--exact", "expcos", "--offset", "0.43", "--sizes", "16,32,64,128",
      "--jobs", args.jobs, "--out", str(out / "table_flower.csv")])
