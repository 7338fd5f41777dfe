"""Computational basis and the zero-momentum, positive-parity sector of a periodic chain.

Conventions
-----------
Site ``i`` (1-based) is stored in bit ``i - 1`` of an integer configuration.
Bit value 0 is the Z = +1 eigenstate, bit value 1 is Z = -1.
The chain is periodic: site N + 1 is site 1.

Parity is spatial reflection ``i -> N + 1 - i``. Global spin flip is not a
symmetry once the longitudinal field is switched on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_SITES = 5
MAX_SITES = 24


class BasisError(ValueError):
    pass


def check_n_sites(n_sites: int, cap: int = MAX_SITES) -> None:
    if n_sites < MIN_SITES:
        raise BasisError(
            f"n_sites={n_sites} < {MIN_SITES}: next-nearest-neighbour bonds would be counted twice"
        )
    if n_sites > cap:
        raise BasisError(f"n_sites={n_sites} exceeds the address budget (cap N={cap})")


@dataclass(frozen=True)
class SpinConfiguration:
    bits: int
    n_sites: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.n_sites):
            raise BasisError(f"bits={self.bits} out of range for N={self.n_sites}")

    def z(self, site: int) -> int:
        """Z eigenvalue (+1 or -1) of 1-based ``site``, wrapping periodically."""
        i = (site - 1) % self.n_sites
        return 1 - 2 * ((self.bits >> i) & 1)


def translate_bits(bits, n_sites: int):
    """Cyclic shift: bit i of the result is bit i-1 (mod N) of the input.

    Works on Python ints and on integer numpy arrays.
    """
    mask = (1 << n_sites) - 1
    return ((bits << 1) | (bits >> (n_sites - 1))) & mask


def reflect_bits(bits, n_sites: int):
    """Mirror: bit i of the result is bit N-1-i of the input."""
    if isinstance(bits, np.ndarray):
        out = np.zeros_like(bits)
    else:
        out = 0
    for i in range(n_sites):
        out = out | (((bits >> i) & 1) << (n_sites - 1 - i))
    return out


def translate(config: SpinConfiguration) -> SpinConfiguration:
    return SpinConfiguration(translate_bits(config.bits, config.n_sites), config.n_sites)


def reflect(config: SpinConfiguration) -> SpinConfiguration:
    return SpinConfiguration(reflect_bits(config.bits, config.n_sites), config.n_sites)


def group_images(states: np.ndarray, n_sites: int):
    """Yield the images of ``states`` under all 2N elements T^j and T^j R."""
    cur = np.asarray(states, dtype=np.int64)
    mirrored = reflect_bits(cur, n_sites)
    for _ in range(n_sites):
        yield cur
        yield mirrored
        cur = translate_bits(cur, n_sites)
        mirrored = translate_bits(mirrored, n_sites)


def orbit_data(n_sites: int, states: np.ndarray | None = None):
    """Representative (minimum image) and orbit size for each state.

    Returns ``(rep, orbit)`` arrays aligned with ``states`` (all 2^N states by
    default).
    """
    if states is None:
        states = np.arange(1 << n_sites, dtype=np.int64)
    rep = states.copy()
    stab = np.zeros(states.shape, dtype=np.int64)
    for img in group_images(states, n_sites):
        np.minimum(rep, img, out=rep)
        stab += img == states
    orbit = (2 * n_sites) // stab
    return rep, orbit


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Orbit representatives of the k=0, p=+1 sector.

    The sector vector of representative ``a`` is ``(1/norms[a]) * sum_g g|a>``
    over the 2N group elements, which equals the uniform superposition over the
    orbit of ``a``. ``norms[a] = sqrt(2N * |stabilizer(a)|)``.
    """

    n_sites: int
    representatives: np.ndarray
    orbit_sizes: np.ndarray
    momentum_index: int = 0
    parity_sign: int = 1

    @property
    def dim(self) -> int:
        return len(self.representatives)

    @property
    def group_order(self) -> int:
        return 2 * self.n_sites

    @property
    def norms(self) -> np.ndarray:
        stab = self.group_order // self.orbit_sizes
        return np.sqrt(self.group_order * stab.astype(float))

    def index(self, rep_bits) -> np.ndarray:
        """Row index of representative(s); -1 where absent."""
        rep_bits = np.asarray(rep_bits, dtype=np.int64)
        pos = np.searchsorted(self.representatives, rep_bits)
        pos = np.clip(pos, 0, self.dim - 1)
        return np.where(self.representatives[pos] == rep_bits, pos, -1)

    def configurations(self) -> list[SpinConfiguration]:
        return [SpinConfiguration(int(b), self.n_sites) for b in self.representatives]

    def embedding(self) -> np.ndarray:
        """Dense 2^N x dim isometry whose columns are the sector vectors.

        Only meant for small N (tests, oracles).
        """
        rep, _ = orbit_data(self.n_sites)
        cols = self.index(rep)
        V = np.zeros((1 << self.n_sites, self.dim))
        V[np.arange(1 << self.n_sites), cols] = 1.0 / np.sqrt(self.orbit_sizes[cols])
        return V


def build_sector_basis(n_sites: int, cap: int = MAX_SITES) -> SectorBasis:
    check_n_sites(n_sites, cap)
    rep, orbit = orbit_data(n_sites)
    states = np.arange(1 << n_sites, dtype=np.int64)
    is_rep = rep == states
    # With trivial characters every orbit survives the projection; the zero-norm
    # filter only guards against that assumption breaking.
    reps = states[is_rep]
    sizes = orbit[is_rep]
    keep = sizes > 0
    return SectorBasis(n_sites, reps[keep], sizes[keep])
