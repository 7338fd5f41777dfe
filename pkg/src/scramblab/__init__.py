"""Scrambling diagnostics for the mixed-field Ising chain with NN and NNN couplings."""

__version__ = "0.1.0"

from .basis import SectorBasis, SpinConfiguration, build_sector_basis, reflect, translate
from .hamiltonian import (
    PRESETS,
    ModelParams,
    SparseHamiltonian,
    build_full_hamiltonian,
    build_sector_hamiltonian,
    pauli_x,
    preset,
)
from .spectral import RStats, Spectrum, diagonalize, goe_reference, r_statistics
from .dynamics import EvolutionEngine, OTOCCurve, evolve, haar_state, otoc, otoc_curve
from .entanglement import EntropyCurve, entropy_curve, half_cut_entropy, paramagnetic_state
from .analysis import (
    PowerLawFit,
    ScramblingTime,
    fit_exponential_window,
    fit_power_law,
    scrambling_time,
)
from .sweep import HeatmapGrid, grid_argmax, r_heatmap
