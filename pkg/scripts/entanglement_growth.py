"""Half-chain entropy after a quench from the x-polarized state, NN and NNN presets side by side."""

import argparse

from scramblab.cli import main


def call(argv):
    code = main(argv)
    if code:
        raise SystemExit(code)

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/entropy")
    ap.add_argument("--n", type=int, default=12)
    a = ap.parse_args()
    call(["entropy", "--n", str(a.n), "--tmax", "10", "--tstep", "0.05",
          "--format", "csv", "--format", "json", "--format", "svg", "--out", f"{a.out}/N{a.n}"])
