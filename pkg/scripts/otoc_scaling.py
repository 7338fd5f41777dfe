"""OTOC growth at one size and the finite-size scaling of C(t*, r=N) and t*."""

import argparse

from scramblab.cli import main


def call(argv):
    code = main(argv)
    if code:
        raise SystemExit(code)

FMT = ["--format", "csv", "--format", "json", "--format", "svg"]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/otoc")
    ap.add_argument("--n", type=int, default=14, help="size for the single OTOC curve")
    ap.add_argument("--ns", default="9:15", help="size range for the scaling run")
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    call(["otoc", "--n", str(a.n), "--preset", "nnn", "--tmax", "10", "--tstep", "0.1", "--log-y",
          "--seed", str(a.seed), *FMT, "--out", f"{a.out}/curve_N{a.n}"])
    call(["scaling", "--n", a.ns, "--preset", "nnn", "--tmax", "2", "--tstep", "0.05",
          "--seed", str(a.seed), *FMT, "--out", f"{a.out}/scaling"])
