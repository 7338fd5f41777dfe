"""Command-line entry point: one subcommand per figure plus manifest replay.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    FitError,
    NoCrossing,
    fit_exponential_decay,
    fit_exponential_window,
    fit_power_law,
    scaling_study,
    scrambling_time,
)
from .basis import BasisError, build_sector_basis
from .dynamics import EvolutionEngine, EvolutionError, default_samples, otoc_curve
from .entanglement import entropy_curve
from .hamiltonian import PRESETS, ModelParams, build_sector_hamiltonian
from .spectral import SpectralError, diagonalize, poisson_spacing, r_statistics, references, wigner_surmise
from .sweep import THREADS_ENV, default_parallelism, grid_argmax, r_heatmap
from . import svg

log = logging.getLogger("scramblab")

EXIT_USAGE = 1
EXIT_NUMERIC = 2
MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Outputs:
    """Tracks written files so a failed command leaves nothing behind."""

    def __init__(self, directory: Path, formats: set[str]):
        self.dir = directory
        self.formats = formats
        self.written: list[Path] = []

    def wants(self, fmt: str) -> bool:
        return fmt in self.formats

    def _path(self, name):
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / name
        self.written.append(p)
        return p

    def csv(self, name, header, rows):
        if not self.wants("csv"):
            return
        with open(self._path(name), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(v) for v in row])

    def json(self, name, obj, force=False):
        if not (force or self.wants("json")):
            return
        with open(self._path(name), "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def svg(self, name, text):
        if not self.wants("svg"):
            return
        self._path(name).write_text(text)

    def cleanup(self):
        for p in self.written:
            p.unlink(missing_ok=True)
        self.written.clear()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _num(v):
    """JSON-safe float (NaN becomes null)."""
    if v is None:
        return None
    v = float(v)
    return v if np.isfinite(v) else None


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# --- argument helpers -------------------------------------------------------

def _range_arg(text: str) -> list[int]:
    """``9:15`` (inclusive) or ``9,11,13``."""
    try:
        if ":" in text:
            lo, hi = (int(x) for x in text.split(":"))
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N range {text!r}")


def _axis_arg(text: str) -> np.ndarray:
    try:
        lo, hi, num = text.split(":")
        return np.linspace(float(lo), float(hi), int(num))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad axis {text!r}, expected MIN:MAX:COUNT")


def _grid_arg(text: str):
    try:
        lam, f = text.split(",")
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}, expected LMIN:LMAX:NL,FMIN:FMAX:NF")
    return _axis_arg(lam), _axis_arg(f)


def _model_params(args, n_sites: int) -> ModelParams:
    name = args.preset or "nnn"
    lam, f, g = PRESETS[name]
    lam = lam if args.lam is None else args.lam
    f = f if args.f is None else args.f
    g = g if args.g is None else args.g
    return ModelParams(lam, f, g, n_sites)


def _model_label(args) -> str:
    if args.lam is None and args.f is None and args.g is None:
        return args.preset or "nnn"
    return "custom"


def _engine(args) -> EvolutionEngine:
    return EvolutionEngine(args.engine, args.krylov_tol, args.krylov_dim, args.dt)


def _times(args) -> np.ndarray:
    if args.tstep <= 0 or args.tmax <= 0:
        raise UsageError("--tmax and --tstep must be positive")
    n = int(round(args.tmax / args.tstep))
    return np.round(np.arange(n + 1) * args.tstep, 12)


# --- commands ---------------------------------------------------------------

def cmd_rstats(args, out: Outputs) -> dict:
    params = _model_params(args, args.n)
    basis = build_sector_basis(args.n)
    spec = diagonalize(build_sector_hamiltonian(params, basis))
    st = r_statistics(spec, args.degeneracy_tol, args.trim, args.bins)
    out.csv("spectrum.csv", ["index", "energy"], enumerate(spec.energies))
    out.csv("r_values.csv", ["n", "r"], enumerate(st.r_values))
    width = np.diff(st.hist_edges)
    dens = st.hist_counts / (st.hist_counts.sum() * width)
    out.csv("histogram.csv", ["bin_lo", "bin_hi", "count", "density"],
            zip(st.hist_edges[:-1], st.hist_edges[1:], st.hist_counts, dens))
    summary = {
        "command": "rstats",
        "params": params.as_dict(),
        "model": _model_label(args),
        "sector": {"momentum": 0, "parity": 1, "dim": basis.dim},
        "mean_r": st.mean_r,
        "n_levels": st.n_levels,
        "n_r_values": int(len(st.r_values)),
        "mean_spacing": st.mean_spacing,
        "small_spacing_fraction": st.small_spacing_fraction(),
        "trim": args.trim,
        "references": references(),
    }
    out.json("summary.json", summary)
    s = np.linspace(st.hist_edges[0], st.hist_edges[-1], 200)
    out.svg("histogram.svg", svg.histogram_plot(
        st.hist_edges, dens, [("Wigner (GOE)", s, wigner_surmise(s)), ("Poisson", s, poisson_spacing(s))],
        title=f"N={args.n}  <r>={st.mean_r:.4f}"))
    return summary


def cmd_otoc(args, out: Outputs) -> dict:
    params = _model_params(args, args.n)
    r = args.r if args.r is not None else args.n
    samples = args.samples if args.samples is not None else default_samples(args.n)
    curve = otoc_curve(params, r, _times(args), samples, args.seed, _engine(args))
    out.csv("otoc.csv", ["t", "C", "stderr"], zip(curve.times, curve.values, curve.stderr))
    summary = {
        "command": "otoc",
        "params": params.as_dict(),
        "model": _model_label(args),
        "r": r,
        "n_samples": samples,
        "seed": args.seed,
        "threshold": args.threshold,
        "t_star": None,
        "growth_rate": None,
        "growth_r_squared": None,
        "final_value": float(curve.values[-1]),
        "max_value": float(curve.values.max()),
    }
    try:
        t_star = scrambling_time(curve, args.threshold).t_star
        summary["t_star"] = t_star
        # early window: first clearly positive sample up to half the maximum
        pos = curve.times[(curve.values > 1e-8) & (curve.times > 0)]
        half = curve.times[np.argmax(curve.values >= 0.5 * curve.values.max())]
        if pos.size:
            rate, r2 = fit_exponential_window(curve, (pos[0], max(half, t_star)))
            summary["growth_rate"], summary["growth_r_squared"] = rate, r2
    except (NoCrossing, FitError) as exc:
        log.warning("%s", exc)
    out.json("summary.json", summary)
    out.svg("otoc.svg", svg.line_plot(
        [(f"r={r}", curve.times, curve.values)], "t", "C(t, r)",
        f"OTOC N={args.n}", log_y=args.log_y))
    return summary


def _read_points(path) -> list[tuple[float, float]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        return [(float(r["N"]), float(r["C"])) for r in rows]
    except (KeyError, ValueError):
        raise UsageError(f"{path}: expected CSV columns N,C")


def cmd_scaling(args, out: Outputs) -> dict:
    summary = {"command": "scaling", "threshold": args.threshold, "mode": args.fixed_time}
    if args.points:
        pts = _read_points(args.points)
        fit = fit_power_law(pts)
        summary.update(source="points", params=None, fixed_time=None, t_star_fit=None)
        out.csv("scaling.csv", ["N", "t_star", "t_eval", "C", "stderr"],
                [(n, "", "", c, "") for n, c in pts])
        exp_r2 = None
        try:
            exp_r2 = fit_exponential_decay(pts).r_squared
        except FitError:
            pass
        summary["power_law"] = {"alpha": fit.exponent_alpha, "prefactor": fit.prefactor,
                                "r_squared": fit.r_squared}
        summary["exponential_r_squared"] = exp_r2
        out.json("scaling.json", summary)
        out.svg("scaling.svg", svg.line_plot([("C", [p[0] for p in pts], [p[1] for p in pts])],
                                             "N", "C", "N-scaling", log_x=True, log_y=True, markers=True))
        return summary

    ns = args.ns
    if min(ns) < 5:
        raise UsageError("all N must be >= 5")
    params = _model_params(args, ns[-1])
    res = scaling_study(ns, params.lam, params.f, params.g, _times(args), args.threshold,
                        args.samples, args.seed, _engine(args), args.fixed_time)
    rows = []
    for n in res.ns:
        t_eval = res.fixed_time if res.mode == "largest" else res.t_stars[n]
        rows.append((n, res.t_stars[n], t_eval, res.fixed_values[n], res.fixed_stderr[n]))
        c = res.curves[n]
        out.csv(f"otoc_N{n}.csv", ["t", "C", "stderr"], zip(c.times, c.values, c.stderr))
    out.csv("scaling.csv", ["N", "t_star", "t_eval", "C", "stderr"], rows)
    pl = res.power_law
    summary.update(
        source="pipeline",
        params={k: v for k, v in params.as_dict().items() if k != "n_sites"},
        ns=res.ns,
        seed=args.seed,
        fixed_time=_num(res.fixed_time),
        power_law=None if pl is None else {
            "alpha": pl.exponent_alpha, "prefactor": pl.prefactor, "r_squared": pl.r_squared},
        exponential_r_squared=None if res.exponential is None else res.exponential.r_squared,
        t_star_fit=None if res.log_fit is None else {
            "slope": res.log_fit.slope, "intercept": res.log_fit.intercept,
            "r_squared": res.log_fit.r_squared},
    )
    out.json("scaling.json", summary)
    out.svg("scaling.svg", svg.line_plot(
        [("C(t_eval, r=N)", res.ns, [res.fixed_values[n] for n in res.ns])],
        "N", "C", "N-scaling", log_x=True, log_y=True, markers=True))
    return summary


def cmd_entropy(args, out: Outputs) -> dict:
    if args.lam is not None or args.f is not None or args.g is not None:
        labels = ["custom"]
    elif args.preset in (None, "both"):
        labels = ["nn", "nnn"]
    else:
        labels = [args.preset]
    times = _times(args)
    scale = 1.0 / np.log(2.0) if args.bits else 1.0
    summary = {"command": "entropy", "n_sites": args.n, "units": "bits" if args.bits else "nats",
               "level": args.level, "curves": {}}
    rows, series = [], []
    for label in labels:
        if label == "custom":
            params = _model_params(args, args.n)
        else:
            lam, f, g = PRESETS[label]
            params = ModelParams(lam, f, g, args.n)
        curve = entropy_curve(params, times, _engine(args), args.cut, label)
        S = curve.entropies * scale
        rows += [(label, t, s) for t, s in zip(curve.times, S)]
        series.append((label, curve.times, S))
        tail = S[len(S) // 2:]
        summary["curves"][label] = {
            "params": params.as_dict(),
            "cut": curve.cut,
            "time_to_level": curve.first_time_reaching(args.level),
            "late_mean": float(tail.mean()),
            "max": float(S.max()),
            "bound": curve.cut * np.log(2.0) * scale,
        }
    out.csv("entropy.csv", ["preset", "t", "S"], rows)
    out.json("summary.json", summary)
    out.svg("entropy.svg", svg.line_plot(series, "t", "S", f"half-cut entropy N={args.n}"))
    return summary


def cmd_sweep(args, out: Outputs) -> dict:
    lam_ax, f_ax = args.grid
    grid = r_heatmap(lam_ax, f_ax, args.g if args.g is not None else 1.0, args.n, args.parallelism)
    fail = {(x["lambda"], x["f"]): x["error"] for x in grid.failures}
    rows = [(lam, f, grid.mean_r[i, j], fail.get((lam, f), ""))
            for i, lam in enumerate(grid.lambda_axis) for j, f in enumerate(grid.f_axis)]
    out.csv("sweep.csv", ["lambda", "f", "mean_r", "failure"], rows)
    summary = {"command": "sweep", "g": grid.g, "n_sites": grid.n_sites,
               "lambda_axis": [float(x) for x in grid.lambda_axis],
               "f_axis": [float(x) for x in grid.f_axis],
               "failures": [{"lambda": float(x["lambda"]), "f": float(x["f"]), "error": x["error"]}
                            for x in grid.failures],
               "argmax": None}
    try:
        lam, f, v = grid_argmax(grid)
        summary["argmax"] = {"lambda": lam, "f": f, "mean_r": v}
    except ValueError:
        raise SpectralError("every grid point failed")
    out.json("sweep.json", summary)
    out.svg("sweep.svg", svg.heatmap_plot(grid.lambda_axis, grid.f_axis, grid.mean_r, "lambda", "f",
                                          f"<r>  g={grid.g}  N={grid.n_sites}", mark=(lam, f)))
    return summary


COMMANDS = {"rstats": cmd_rstats, "otoc": cmd_otoc, "scaling": cmd_scaling,
            "entropy": cmd_entropy, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", action="append", choices=["csv", "json", "svg"],
                        help="output formats (repeatable; default csv and json)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--parallelism", type=int, default=None,
                        help=f"worker processes (default: ${THREADS_ENV} or CPU count)")
    common.add_argument("-v", "--verbose", action="store_true")

    def model_parent(presets):
        parent = argparse.ArgumentParser(add_help=False)
        parent.add_argument("--preset", choices=presets)
        parent.add_argument("--lambda", dest="lam", type=float)
        parent.add_argument("--f", type=float)
        parent.add_argument("--g", type=float)
        return parent

    model = model_parent(["nn", "nnn"])

    dyn = argparse.ArgumentParser(add_help=False)
    dyn.add_argument("--engine", choices=["auto", "eigen", "krylov"], default="auto")
    dyn.add_argument("--dt", type=float, default=0.05, help="Krylov substep")
    dyn.add_argument("--krylov-dim", type=int, default=30)
    dyn.add_argument("--krylov-tol", type=float, default=1e-8)
    dyn.add_argument("--tmax", type=float, default=10.0)
    dyn.add_argument("--tstep", type=float, default=0.25)

    p = _Parser(prog="scramblab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("rstats", parents=[common, model], help="sector level statistics")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trim", type=float, default=0.0)
    s.add_argument("--bins", type=int, default=50)
    s.add_argument("--degeneracy-tol", type=float, default=None)

    s = sub.add_parser("otoc", parents=[common, model, dyn], help="C(t, r) curve")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, default=None, help="probe site (default N)")
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--threshold", type=float, default=0.1)
    s.add_argument("--log-y", action="store_true")

    s = sub.add_parser("scaling", parents=[common, model, dyn], help="C(t*, r=N) against N")
    s.add_argument("--n", dest="ns", type=_range_arg, default=list(range(9, 16)),
                   help="N range, e.g. 9:15 or 9,11,13")
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--threshold", type=float, default=0.1)
    s.add_argument("--fixed-time", choices=["largest", "per-n"], default="largest")
    s.add_argument("--points", help="fit (N, C) pairs from this CSV instead of running dynamics")

    s = sub.add_parser("entropy", parents=[common, model_parent(["nn", "nnn", "both"]), dyn],
                       help="half-cut entropy growth")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--cut", type=int, default=None)
    s.add_argument("--bits", action="store_true", help="report entropy in bits")
    s.add_argument("--level", type=float, default=1.0, help="entropy level for crossing times")

    s = sub.add_parser("sweep", parents=[common, model], help="<r> heatmap over (lambda, f)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--grid", type=_grid_arg, default=_grid_arg("0:1.5:21,0.3:1.5:21"),
                   help="LMIN:LMAX:NL,FMIN:FMAX:NF")

    s = sub.add_parser("replay", help="re-run a command from its manifest")
    s.add_argument("manifest")
    s.add_argument("--out", default=None)
    return p


def _run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        manifest = json.loads(Path(args.manifest).read_text())
        out_dir = args.out if args.out is not None else str(Path(args.manifest).parent)
        return _run(list(manifest["argv"]) + ["--out", out_dir])

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.parallelism is not None and args.parallelism < 1:
        parser.error("--parallelism must be >= 1")
    if args.parallelism is None and args.command == "sweep":
        args.parallelism = default_parallelism()
    formats = set(args.format or ["csv", "json"])
    out = Outputs(Path(args.out), formats)
    try:
        COMMANDS[args.command](args, out)
        canonical = _strip_out(argv)
        written = list(out.written)
        manifest = {
            "tool": "scramblab",
            "version": __version__,
            "command": args.command,
            "argv": canonical,
            "seed": args.seed,
            "config": {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in ("out",)},
            "outputs": {p.name: _sha256(p) for p in written},
        }
        out.json(MANIFEST, manifest, force=True)
    except (UsageError, BasisError, ValueError) as exc:
        out.cleanup()
        if isinstance(exc, (SpectralError, EvolutionError, FitError, NoCrossing)):
            print(f"scramblab: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"scramblab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        out.cleanup()
        print(f"scramblab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BaseException:
        out.cleanup()
        raise
    return 0


def _strip_out(argv):
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--out":
            skip = True
        elif not a.startswith("--out="):
            out.append(a)
    return out


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, (list, dict, str, int, float, bool)) or v is None:
        return v
    return repr(v)


def main(argv: list[str] | None = None) -> int:
    return _run(list(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    sys.exit(main())
