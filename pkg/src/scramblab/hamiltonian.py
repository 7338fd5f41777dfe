"""Mixed-field Ising chain with nearest and next-nearest neighbour ZZ couplings.

    H = -1/(1+lam) * (sum_i Z_i Z_{i+1} + lam * sum_i Z_i Z_{i+2})
        - f * sum_i X_i - g * sum_i Z_i

with periodic sums over i = 1..N. States are complex numpy arrays of length
2^N indexed by configuration bits (see :mod:`scramblab.basis`).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numba
import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from .basis import MAX_SITES, SectorBasis, check_n_sites, orbit_data


@dataclass(frozen=True)
class ModelParams:
    lam: float
    f: float
    g: float
    n_sites: int

    def __post_init__(self):
        if not 1.0 + self.lam > 0.0:
            raise ValueError(f"1 + lambda must be positive, got lambda={self.lam}")

    def with_n(self, n_sites: int) -> "ModelParams":
        return replace(self, n_sites=n_sites)

    def as_dict(self) -> dict:
        return {"lambda": self.lam, "f": self.f, "g": self.g, "n_sites": self.n_sites}


PRESETS = {
    "nn": (0.0, 1.05, 0.5),
    "nnn": (0.9, 0.84, 1.0),
}


def preset(name: str, n_sites: int) -> ModelParams:
    lam, f, g = PRESETS[name]
    return ModelParams(lam, f, g, n_sites)


def z_values(states: np.ndarray, n_sites: int) -> np.ndarray:
    """(len(states), N) array of Z eigenvalues, column j for site j+1."""
    states = np.asarray(states, dtype=np.int64)
    bits = (states[:, None] >> np.arange(n_sites)) & 1
    return 1 - 2 * bits


def diagonal_energies(params: ModelParams, states: np.ndarray | None = None) -> np.ndarray:
    """Z-only part of H evaluated on configurations (all 2^N by default)."""
    n = params.n_sites
    if states is None:
        states = np.arange(1 << n, dtype=np.int64)
    z = z_values(states, n).astype(float)
    nn = (z * np.roll(z, -1, axis=1)).sum(axis=1)
    nnn = (z * np.roll(z, -2, axis=1)).sum(axis=1)
    return -(nn + params.lam * nnn) / (1.0 + params.lam) - params.g * z.sum(axis=1)


def flip_site(psi: np.ndarray, bit: int) -> np.ndarray:
    """Copy of ``psi`` with amplitudes permuted by flipping ``bit`` (0-based).

    ``psi`` may carry trailing axes (e.g. several column vectors).
    """
    rest = psi.shape[1:]
    view = psi.reshape((-1, 2, 1 << bit) + rest)
    return view[:, ::-1].reshape(psi.shape)


@numba.njit(cache=True)
def _apply_kernel(diag, f, n_sites, psi, out):
    for s in range(psi.shape[0]):
        flips = 0j
        for i in range(n_sites):
            flips += psi[s ^ (1 << i)]
        out[s] = diag[s] * psi[s] - f * flips
    return out


@dataclass(frozen=True, eq=False)
class SparseHamiltonian:
    """Full-space H: a diagonal plus -f times the sum of single-bit flips."""

    params: ModelParams
    diagonal: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.params.n_sites

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def apply(self, psi: np.ndarray) -> np.ndarray:
        if psi.shape[0] != self.dim:
            raise ValueError(f"state has length {psi.shape[0]}, expected {self.dim}")
        if psi.ndim == 1:
            psi = np.ascontiguousarray(psi, dtype=complex)
            return _apply_kernel(self.diagonal, self.params.f, self.n_sites, psi, np.empty_like(psi))
        d = self.diagonal.reshape((-1,) + (1,) * (psi.ndim - 1))
        out = d * psi
        f = self.params.f
        if f != 0.0:
            for i in range(self.n_sites):
                out -= f * flip_site(psi, i)
        return out

    __matmul__ = apply

    def norm_bound(self) -> float:
        """Cheap upper bound on the operator norm."""
        return float(np.abs(self.diagonal).max() + self.n_sites * abs(self.params.f))

    def to_linear_operator(self) -> LinearOperator:
        return LinearOperator(
            (self.dim, self.dim), matvec=self.apply, matmat=self.apply, dtype=complex
        )

    def to_csr(self) -> sp.csr_matrix:
        n = self.n_sites
        states = np.arange(self.dim)
        rows = [states]
        cols = [states]
        vals = [self.diagonal]
        for i in range(n):
            rows.append(states)
            cols.append(states ^ (1 << i))
            vals.append(np.full(self.dim, -self.params.f))
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.dim, self.dim),
        )

    def to_dense(self) -> np.ndarray:
        if self.n_sites > 14:
            raise ValueError("dense full-space matrix refused for N > 14")
        return self.to_csr().toarray()


def build_full_hamiltonian(params: ModelParams, cap: int = MAX_SITES) -> SparseHamiltonian:
    check_n_sites(params.n_sites, cap)
    return SparseHamiltonian(params, diagonal_energies(params))


def build_sector_hamiltonian(params: ModelParams, basis: SectorBasis) -> np.ndarray:
    """Dense real symmetric H restricted to the k=0, p=+ sector.

    With |a~> the normalized orbit sum of representative a,
    <b~|H|a~> = sqrt(|O_a| / |O_b|) * sum_{d in O_b} <d|H|a>.
    """
    n = params.n_sites
    if basis.n_sites != n:
        raise ValueError(f"basis has N={basis.n_sites} but params have N={n}")
    reps = basis.representatives
    dim = basis.dim
    H = np.zeros((dim, dim))
    H[np.arange(dim), np.arange(dim)] = diagonal_energies(params, reps)
    if params.f != 0.0:
        cols = np.arange(dim)
        orbit_a = basis.orbit_sizes.astype(float)
        for i in range(n):
            flipped = reps ^ (1 << i)
            rep_b, orbit_b = orbit_data(n, flipped)
            rows = basis.index(rep_b)
            np.add.at(H, (rows, cols), -params.f * np.sqrt(orbit_a / orbit_b))
    # copy the upper triangle down so that H[i, j] == H[j, i] bit for bit
    return np.triu(H) + np.triu(H, 1).T


def pauli_x(site: int, state: np.ndarray) -> np.ndarray:
    """X on 1-based ``site``: flips bit ``site - 1`` of every configuration."""
    n = int(state.shape[0]).bit_length() - 1
    if not 1 <= site <= n:
        raise ValueError(f"site {site} out of range 1..{n}")
    return flip_site(state, site - 1)


def pauli_z(site: int, state: np.ndarray) -> np.ndarray:
    n = int(state.shape[0]).bit_length() - 1
    if not 1 <= site <= n:
        raise ValueError(f"site {site} out of range 1..{n}")
    signs = 1 - 2 * ((np.arange(1 << n) >> (site - 1)) & 1)
    return signs.reshape((-1,) + (1,) * (state.ndim - 1)) * state
