"""Gaussian versus linear boundary basis on advection-diffusion problems with
exact solution exp(x + y), on both domains.

    python scripts/compare_advdiff.py [--jobs 4] [--outdir results]
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

for domain in ("square", "flower"):
    main(["compare", "--domain", domain, "--h-values", "0,0;1,0;1,1",
          "--jobs", args.jobs, "--out", str(out / f"compare_{domain}.csv")])
