"""Half-cut entanglement entropy after a quench from the x-polarized product state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import EvolutionEngine
from .hamiltonian import ModelParams, build_full_hamiltonian


@dataclass(frozen=True, eq=False)
class EntropyCurve:
    times: np.ndarray
    entropies: np.ndarray
    cut: int
    n_sites: int
    preset_label: str = ""
    params: ModelParams | None = None

    def in_bits(self) -> np.ndarray:
        return self.entropies / np.log(2.0)

    def first_time_reaching(self, level: float) -> float | None:
        """Linearly interpolated first time with S >= level, or None."""
        S = self.entropies
        hit = np.flatnonzero(S >= level)
        if hit.size == 0:
            return None
        k = hit[0]
        if k == 0:
            return float(self.times[0])
        t0, t1 = self.times[k - 1], self.times[k]
        return float(t0 + (level - S[k - 1]) * (t1 - t0) / (S[k] - S[k - 1]))


def paramagnetic_state(n_sites: int) -> np.ndarray:
    dim = 1 << n_sites
    return np.full(dim, 2.0 ** (-n_sites / 2), dtype=complex)


def schmidt_values(state: np.ndarray, cut: int) -> np.ndarray:
    """Singular values across sites 1..cut | cut+1..N."""
    n = int(state.shape[0]).bit_length() - 1
    if not 1 <= cut <= n - 1:
        raise ValueError(f"cut={cut} must lie in 1..{n - 1}")
    # sites 1..cut are the low bits, so they run along the fast (column) axis
    M = state.reshape(1 << (n - cut), 1 << cut).T
    return np.linalg.svd(M, compute_uv=False)


def half_cut_entropy(state: np.ndarray, cut: int | None = None) -> float:
    """Von Neumann entropy (natural log) of sites 1..cut."""
    n = int(state.shape[0]).bit_length() - 1
    if cut is None:
        cut = n // 2
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"state is not normalized (norm {norm:.8f})")
    p = schmidt_values(state, cut) ** 2
    p = p[p > 0]
    return float(max(-np.sum(p * np.log(p)), 0.0))


def entropy_curve(
    params: ModelParams,
    times,
    engine: EvolutionEngine | None = None,
    cut: int | None = None,
    preset_label: str = "",
    H=None,
) -> EntropyCurve:
    times = np.asarray(times, dtype=float)
    if len(times) == 0 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must start at 0 and increase strictly")
    engine = engine or EvolutionEngine()
    n = params.n_sites
    cut = n // 2 if cut is None else cut
    prop = engine.bind(H if H is not None else build_full_hamiltonian(params))
    psi = paramagnetic_state(n)
    S = np.empty(len(times))
    t_prev = 0.0
    for i, t in enumerate(times):
        psi = prop.evolve(psi, t - t_prev)
        t_prev = t
        S[i] = half_cut_entropy(psi, cut)
    return EntropyCurve(times, S, cut, n, preset_label, params)
