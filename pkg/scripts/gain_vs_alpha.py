"""Processing gain versus alpha for ESN and Wiener filter.

Thin wrapper over ``esn-denoise sweep``; results land in --out as gains.csv,
summary.csv, manifest.json and a gnuplot script (plot.gp).
"""
import sys

from esn_denoise.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep", *sys.argv[1:]]))
