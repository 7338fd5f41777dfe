"""Level statistics: <r> and spacing histogram at the chaotic and integrable points, plus the N=14 heatmap."""

import argparse

from scramblab.cli import main


def call(argv):
    code = main(argv)
    if code:
        raise SystemExit(code)


def run(out, n, grid_n):
    call(["rstats", "--n", str(n), "--preset", "nnn", "--format", "csv", "--format", "json",
          "--format", "svg", "--out", f"{out}/rstats_nnn_N{n}"])
    call(["rstats", "--n", str(n), "--lambda", "0", "--f", "1", "--g", "0", "--format", "csv",
          "--format", "json", "--format", "svg", "--out", f"{out}/rstats_tfim_N{n}"])
    call(["sweep", "--n", str(grid_n), "--format", "csv", "--format", "json", "--format", "svg",
          "--out", f"{out}/sweep_N{grid_n}"])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/level_statistics")
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--grid-n", type=int, default=14)
    a = ap.parse_args()
    run(a.out, a.n, a.grid_n)
