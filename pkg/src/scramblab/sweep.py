"""Parallel (lambda, f) scan of the sector <r> at fixed g."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import SectorBasis, build_sector_basis
from .hamiltonian import ModelParams

log = logging.getLogger(__name__)

THREADS_ENV = "SCRAMBLAB_THREADS"


def default_parallelism() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class HeatmapGrid:
    lambda_axis: np.ndarray
    f_axis: np.ndarray
    g: float
    n_sites: int
    mean_r: np.ndarray
    failures: list = field(default_factory=list)


def _point(lam, f, g, basis: SectorBasis):
    from .spectral import sector_r_statistics

    params = ModelParams(lam, f, g, basis.n_sites)
    return sector_r_statistics(params, basis)[1].mean_r


_WORKER_BASIS = None


def _init_worker(basis):
    global _WORKER_BASIS
    _WORKER_BASIS = basis


def _worker(task):
    i, j, lam, f, g = task
    try:
        return i, j, _point(lam, f, g, _WORKER_BASIS), None
    except Exception as exc:  # recorded, the grid carries on
        return i, j, float("nan"), f"{type(exc).__name__}: {exc}"


def _check_axis(axis, name):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise ValueError(f"{name} axis must be a non-empty 1-d sequence")
    if np.any(np.diff(axis) <= 0):
        raise ValueError(f"{name} axis must be strictly increasing")
    return axis


def r_heatmap(lambda_axis, f_axis, g: float, n_sites: int, parallelism: int | None = None,
              basis: SectorBasis | None = None) -> HeatmapGrid:
    lam_ax = _check_axis(lambda_axis, "lambda")
    f_ax = _check_axis(f_axis, "f")
    if basis is None:
        basis = build_sector_basis(n_sites)
    parallelism = parallelism or default_parallelism()
    tasks = [(i, j, float(lam), float(f), float(g))
             for i, lam in enumerate(lam_ax) for j, f in enumerate(f_ax)]
    grid = np.full((len(lam_ax), len(f_ax)), np.nan)
    failures = []
    if parallelism == 1:
        _init_worker(basis)
        results = map(_worker, tasks)
    else:
        pool = ProcessPoolExecutor(parallelism, initializer=_init_worker, initargs=(basis,))
        results = pool.map(_worker, tasks, chunksize=max(1, len(tasks) // (4 * parallelism)))
    try:
        for i, j, value, err in results:
            grid[i, j] = value
            if err is not None:
                failures.append({"lambda": lam_ax[i], "f": f_ax[j], "error": err})
                log.warning("grid point (%g, %g) failed: %s", lam_ax[i], f_ax[j], err)
    finally:
        if parallelism != 1:
            pool.shutdown()
    return HeatmapGrid(lam_ax, f_ax, float(g), n_sites, grid, failures)


def grid_argmax(grid: HeatmapGrid) -> tuple[float, float, float]:
    """Largest finite entry; ties go to smaller lambda, then smaller f."""
    best = None
    for i, lam in enumerate(grid.lambda_axis):
        for j, f in enumerate(grid.f_axis):
            v = grid.mean_r[i, j]
            if np.isfinite(v) and (best is None or v > best[2]):
                best = (float(lam), float(f), float(v))
    if best is None:
        raise ValueError("grid has no finite entries")
    return best
