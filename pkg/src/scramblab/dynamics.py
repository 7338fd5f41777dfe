"""Real-time evolution and the out-of-time-order correlator.

    C(t, r) = 1 - Re <psi| X_1(t) X_r X_1(t) X_r |psi>,   X_1(t) = e^{iHt} X_1 e^{-iHt}

evaluated in Haar-random states on the full 2^N space. Local X operators do
not commute with translations, so the symmetry sector is not used here.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .hamiltonian import ModelParams, SparseHamiltonian, build_full_hamiltonian, pauli_x

log = logging.getLogger(__name__)

EIGEN_MAX_SITES = 12
AUTO_EIGEN_MAX_SITES = 10


class EvolutionError(ArithmeticError):
    pass


def haar_state(n_sites: int, seed) -> np.ndarray:
    """Haar-random pure state on 2^N amplitudes.

    Real and imaginary parts are independent standard normals drawn from
    ``numpy.random.default_rng(seed)`` (PCG64), real parts first, then the
    vector is normalized. ``seed`` may be an int or a sequence of ints.
    """
    rng = np.random.default_rng(seed)
    dim = 1 << n_sites
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def _dimension(H) -> int:
    return H.dim if isinstance(H, SparseHamiltonian) else H.shape[0]


def _matvec(H):
    if isinstance(H, SparseHamiltonian):
        return H.apply
    H = np.asarray(H)
    return lambda v: H @ v


def lanczos_expm_step(matvec, v, dt, m_max=30, tol=1e-8):
    """One Krylov step: returns ``exp(-i dt H) v`` or ``None`` if ``m_max``
    vectors do not reach the error estimate ``tol * ||v||``.

    Full reorthogonalization; the a posteriori estimate is
    ``||v|| * beta_m * |e_m^T exp(-i dt T_m) e_1|``.
    """
    beta0 = np.linalg.norm(v)
    if beta0 == 0.0:
        return np.zeros_like(v)
    n = v.shape[0]
    m_max = min(m_max, n)
    V = np.empty((m_max, n), dtype=complex)
    V[0] = v / beta0
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)
    for j in range(m_max):
        w = matvec(V[j])
        alpha[j] = np.vdot(V[j], w).real
        w = w - alpha[j] * V[j]
        if j > 0:
            w -= beta[j - 1] * V[j - 1]
        w -= V[: j + 1].T @ (V[: j + 1].conj() @ w)
        b = np.linalg.norm(w)
        k = j + 1
        if k == 1:
            evals, evecs = alpha[:1], np.ones((1, 1))
        else:
            evals, evecs = scipy.linalg.eigh_tridiagonal(alpha[:k], beta[: k - 1])
        y = evecs @ (np.exp(-1j * dt * evals) * evecs[0].conj())
        happy = b <= 1e-13 * max(abs(alpha[: k]).max(), 1.0)
        if happy or b * abs(y[-1]) <= tol or k == n:
            return beta0 * (y @ V[:k])
        if k < m_max:
            beta[j] = b
            V[k] = w / b
    return None


@dataclass(frozen=True)
class EvolutionEngine:
    """How e^{-iHt} is applied.

    mode: ``"eigen"`` (dense full diagonalization, N <= 12), ``"krylov"``
    (Lanczos substeps of length ``step``) or ``"auto"`` (eigen for N <= 10).
    """

    mode: str = "auto"
    tol: float = 1e-8
    max_krylov_dim: int = 30
    step: float = 0.05
    min_step: float = 1e-6

    def __post_init__(self):
        if self.mode not in ("auto", "eigen", "krylov"):
            raise ValueError(f"unknown engine mode {self.mode!r}")

    def resolve(self, n_sites: int) -> str:
        if self.mode == "auto":
            return "eigen" if n_sites <= AUTO_EIGEN_MAX_SITES else "krylov"
        return self.mode

    def bind(self, H) -> "Propagator":
        dim = _dimension(H)
        n_sites = dim.bit_length() - 1
        mode = self.resolve(n_sites)
        if mode == "eigen":
            return EigenPropagator(H, self)
        return KrylovPropagator(H, self)


class Propagator:
    def __init__(self, H, engine: EvolutionEngine):
        self.H = H
        self.engine = engine
        self.dim = _dimension(H)

    def _check(self, state):
        if state.shape[0] != self.dim:
            raise ValueError(f"state has length {state.shape[0]}, expected {self.dim}")

    def evolve(self, state: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError


class EigenPropagator(Propagator):
    def __init__(self, H, engine):
        super().__init__(H, engine)
        n_sites = self.dim.bit_length() - 1
        if isinstance(H, SparseHamiltonian):
            if n_sites > EIGEN_MAX_SITES:
                raise ValueError(f"eigen mode limited to N <= {EIGEN_MAX_SITES}")
            dense = H.to_dense()
        else:
            dense = np.asarray(H)
        self.energies, self.vectors = scipy.linalg.eigh(dense)

    def evolve(self, state, t):
        self._check(state)
        if t == 0:
            return np.array(state, dtype=complex)
        c = self.vectors.conj().T @ state
        return self.vectors @ (np.exp(-1j * t * self.energies) * c)


class KrylovPropagator(Propagator):
    def __init__(self, H, engine):
        super().__init__(H, engine)
        self.matvec = _matvec(H)

    def evolve(self, state, t):
        self._check(state)
        psi = np.array(state, dtype=complex)
        if t == 0:
            return psi
        eng = self.engine
        sign = 1.0 if t > 0 else -1.0
        remaining = abs(t)
        dt = eng.step
        while remaining > 1e-14 * max(abs(t), 1.0):
            h = min(dt, remaining)
            new = lanczos_expm_step(self.matvec, psi, sign * h, eng.max_krylov_dim, eng.tol)
            if new is None:
                dt = h / 2
                log.debug("Krylov step %.3g not converged, retrying with %.3g", h, dt)
                if dt < eng.min_step:
                    raise EvolutionError(
                        f"Krylov evolution failed to converge (dim {self.dim}, step {h:.3g})"
                    )
                continue
            psi = new
            remaining -= h
        return psi


def evolve(engine: EvolutionEngine, H, state: np.ndarray, t: float) -> np.ndarray:
    """exp(-iHt)|state> using ``engine``."""
    return engine.bind(H).evolve(state, t)


def _otoc_from_evolved(prop, state, forward_state, forward_flipped, t, r):
    """C(t, r) given e^{-iHt}|psi> and e^{-iHt}X_r|psi>."""
    phi = prop.evolve(pauli_x(1, forward_flipped), -t)  # X_1(t) X_r |psi>
    chi = pauli_x(r, prop.evolve(pauli_x(1, forward_state), -t))  # X_r X_1(t) |psi>
    return 1.0 - np.vdot(chi, phi).real


def otoc(H, r: int, t: float, state: np.ndarray, engine: EvolutionEngine | None = None) -> float:
    """1 - Re <X_1(t) X_r X_1(t) X_r> in ``state`` (full-space H)."""
    engine = engine or EvolutionEngine()
    prop = H if isinstance(H, Propagator) else engine.bind(H)
    n = prop.dim.bit_length() - 1
    if not 1 <= r <= n:
        raise ValueError(f"site r={r} out of range 1..{n}")
    a = prop.evolve(state, t)
    b = prop.evolve(pauli_x(r, state), t)
    return _otoc_from_evolved(prop, state, a, b, t, r)


def default_samples(n_sites: int) -> int:
    return 8 if n_sites <= 12 else (4 if n_sites == 13 else 1)


@dataclass(frozen=True, eq=False)
class OTOCCurve:
    times: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    r: int
    n_sites: int
    n_samples: int
    seed: int
    params: ModelParams | None = None
    samples: np.ndarray = field(default=None, repr=False)

    def value_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))


def sample_seed(seed: int, k: int) -> list[int]:
    """Seed of the k-th Haar sample of a run with master ``seed``."""
    return [int(seed), int(k)]


def otoc_series(prop: Propagator, r: int, times, state: np.ndarray) -> np.ndarray:
    """C(t, r) on an increasing time grid for one state.

    The forward legs are stepped incrementally; the backward legs are
    recomputed for every time.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    out = np.empty(len(times))
    a = np.array(state, dtype=complex)
    b = pauli_x(r, state)
    t_prev = 0.0
    for i, t in enumerate(times):
        a = prop.evolve(a, t - t_prev)
        b = prop.evolve(b, t - t_prev)
        t_prev = t
        out[i] = _otoc_from_evolved(prop, state, a, b, t, r)
    return out


def otoc_curve(
    params: ModelParams,
    r: int,
    times,
    n_samples: int | None = None,
    seed: int = 0,
    engine: EvolutionEngine | None = None,
    H=None,
) -> OTOCCurve:
    """Haar-averaged C(t, r) on a time grid."""
    engine = engine or EvolutionEngine()
    n = params.n_sites
    if not 1 <= r <= n:
        raise ValueError(f"site r={r} out of range 1..{n}")
    if n_samples is None:
        n_samples = default_samples(n)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    times = np.asarray(times, dtype=float)
    prop = engine.bind(H if H is not None else build_full_hamiltonian(params))
    samples = np.empty((n_samples, len(times)))
    for k in range(n_samples):
        psi = haar_state(n, sample_seed(seed, k))
        samples[k] = otoc_series(prop, r, times, psi)
        log.info("otoc N=%d r=%d sample %d/%d done", n, r, k + 1, n_samples)
    values = samples.mean(axis=0)
    if n_samples > 1:
        stderr = samples.std(axis=0, ddof=1) / np.sqrt(n_samples)
    else:
        stderr = np.zeros(len(times))
    return OTOCCurve(times, values, stderr, r, n, n_samples, seed, params, samples)


def otoc_average(params, r, t, n_samples=None, seed=0, engine=None, H=None):
    """Haar average of C(t, r) at a single time; returns (mean, stderr)."""
    curve = otoc_curve(params, r, [t], n_samples, seed, engine, H)
    return float(curve.values[0]), float(curve.stderr[0])
