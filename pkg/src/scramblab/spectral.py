"""Diagonalization and level-spacing statistics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

# <r> for large GOE matrices (Atas et al. numerics); the 3x3 surmise gives 4 - 2*sqrt(3).
GOE_R = 0.5307
GOE_R_QUOTED = 0.54
GOE_R_SURMISE_3X3 = 4.0 - 2.0 * np.sqrt(3.0)
POISSON_R = 2.0 * np.log(2.0) - 1.0


class SpectralError(ArithmeticError):
    pass


class DiagonalizationError(SpectralError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    energies: np.ndarray
    vectors: np.ndarray | None = None

    def __len__(self):
        return len(self.energies)

    @property
    def width(self) -> float:
        return float(self.energies[-1] - self.energies[0]) if len(self) else 0.0


@dataclass(frozen=True, eq=False)
class RStats:
    r_values: np.ndarray
    spacings: np.ndarray
    hist_counts: np.ndarray
    hist_edges: np.ndarray
    n_levels: int
    mean_spacing: float
    mean_r: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mean_r", float(np.mean(self.r_values)))

    @property
    def normalized_spacings(self) -> np.ndarray:
        return self.spacings / self.mean_spacing

    def small_spacing_fraction(self, cutoff: float = 0.08) -> float:
        """Fraction of spacings below ``cutoff`` times the mean spacing."""
        return float(np.mean(self.normalized_spacings < cutoff))


def goe_reference() -> float:
    return GOE_R


def references() -> dict:
    return {
        "goe": GOE_R,
        "goe_quoted": GOE_R_QUOTED,
        "goe_surmise_3x3": float(GOE_R_SURMISE_3X3),
        "poisson": float(POISSON_R),
    }


def wigner_surmise(s):
    s = np.asarray(s, dtype=float)
    return 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s**2)


def poisson_spacing(s):
    return np.exp(-np.asarray(s, dtype=float))


def diagonalize(matrix: np.ndarray, eigenvectors: bool = False, check: bool = True) -> Spectrum:
    """Eigen-decompose a dense real symmetric (or Hermitian) matrix.

    With ``eigenvectors=True`` and ``check`` the residual
    ``max ||H v - E v||`` is verified against ``1e-8 * ||H||``.
    """
    H = np.asarray(matrix)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise DiagonalizationError(f"non-finite entries in {H.shape[0]}x{H.shape[0]} matrix")
    try:
        if eigenvectors:
            E, V = scipy.linalg.eigh(H)
        else:
            E, V = scipy.linalg.eigh(H, eigvals_only=True), None
    except np.linalg.LinAlgError as exc:
        raise DiagonalizationError(f"eigh failed for dimension {H.shape[0]}: {exc}") from exc
    if V is not None and check and H.size:
        scale = max(np.linalg.norm(H, 2), 1.0)
        resid = np.linalg.norm(H @ V - V * E, axis=0).max()
        if resid > 1e-8 * scale:
            raise DiagonalizationError(
                f"dimension {H.shape[0]}: residual {resid:.3e} exceeds 1e-8*||H||"
            )
    return Spectrum(np.asarray(E), V)


def level_spacings(energies, degeneracy_tol: float | None = None) -> np.ndarray:
    """Consecutive spacings with (near-)degenerate levels merged."""
    E = np.sort(np.asarray(energies, dtype=float))
    if len(E) < 2:
        raise SpectralError("need at least two levels")
    width = E[-1] - E[0]
    if width <= 0:
        raise SpectralError("all levels are degenerate")
    tol = 1e-10 * width if degeneracy_tol is None else degeneracy_tol
    s = np.diff(E)
    return s[s > tol]


def r_statistics(
    spectrum,
    degeneracy_tol: float | None = None,
    trim: float = 0.0,
    bins: int = 50,
    hist_range: tuple[float, float] = (0.0, 4.0),
) -> RStats:
    """Ratio of consecutive spacings and the normalized spacing histogram.

    ``trim`` drops that fraction of levels from each spectral edge before
    anything else is computed. Spacings are normalized by their mean, no
    unfolding.
    """
    E = spectrum.energies if isinstance(spectrum, Spectrum) else np.asarray(spectrum, dtype=float)
    E = np.sort(E)
    if trim:
        k = int(trim * len(E))
        E = E[k: len(E) - k]
    s = level_spacings(E, degeneracy_tol)
    if len(s) < 2:
        raise SpectralError(f"too few distinct levels ({len(s) + 1}) for an r statistic")
    r = np.minimum(s[1:], s[:-1]) / np.maximum(s[1:], s[:-1])
    mean_s = float(s.mean())
    counts, edges = np.histogram(s / mean_s, bins=bins, range=hist_range)
    return RStats(r, s, counts, edges, len(s) + 1, mean_s)


def sector_r_statistics(params, basis=None, **kwargs) -> tuple[Spectrum, RStats]:
    """Build, diagonalize and analyse the k=0, p=+ sector of ``params``."""
    from .basis import build_sector_basis
    from .hamiltonian import build_sector_hamiltonian

    if basis is None:
        basis = build_sector_basis(params.n_sites)
    spec = diagonalize(build_sector_hamiltonian(params, basis))
    return spec, r_statistics(spec, **kwargs)
