import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scramblab.dynamics import EvolutionEngine, haar_state
from scramblab.entanglement import (
    EntropyCurve,
    entropy_curve,
    half_cut_entropy,
    paramagnetic_state,
    schmidt_values,
)
from scramblab.hamiltonian import pauli_x, preset
from oracles import reduced_density_entropy


def product_state(local_states):
    """Site 1 is the rightmost Kronecker factor."""
    out = np.ones(1, dtype=complex)
    for v in local_states[::-1]:
        out = np.kron(out, v)
    return out


def test_paramagnetic_state():
    np.testing.assert_allclose(paramagnetic_state(2), [0.5, 0.5, 0.5, 0.5])
    psi = paramagnetic_state(9)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-15)
    for site in range(1, 10):
        assert np.vdot(psi, pauli_x(site, psi)).real == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=20)
@given(st.integers(5, 9), st.integers(0, 2**31))
def test_product_states_have_zero_entropy(n, seed):
    rng = np.random.default_rng(seed)
    locals_ = [rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(n)]
    locals_ = [v / np.linalg.norm(v) for v in locals_]
    psi = product_state(locals_)
    for cut in range(1, n):
        assert half_cut_entropy(psi, cut) == pytest.approx(0.0, abs=1e-10)


def test_bell_pair_across_cut():
    n, cut = 6, 3
    # Bell pair on sites 3 and 4, everything else |0>
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[(1 << 2) | (1 << 3)] = 1 / np.sqrt(2)
    assert half_cut_entropy(psi, cut) == pytest.approx(np.log(2), abs=1e-12)
    # the same pair entirely on one side carries no cut entropy
    assert half_cut_entropy(psi, 4) == pytest.approx(0.0, abs=1e-12)


def test_ghz():
    psi = np.zeros(64, dtype=complex)
    psi[0] = psi[63] = 1 / np.sqrt(2)
    assert half_cut_entropy(psi, 3) == pytest.approx(np.log(2), abs=1e-12)
    assert half_cut_entropy(psi, 3) == pytest.approx(reduced_density_entropy(psi, 3, 6), abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_matches_partial_trace_oracle(seed):
    n = 8
    psi = haar_state(n, seed)
    for cut in range(1, n):
        assert half_cut_entropy(psi, cut) == pytest.approx(
            reduced_density_entropy(psi, cut, n), abs=1e-10
        )


@pytest.mark.parametrize("seed", range(3))
def test_cut_symmetry_and_bound(seed):
    n = 9
    psi = haar_state(n, seed)
    for cut in range(1, n):
        S = half_cut_entropy(psi, cut)
        # subsystem B: sites cut+1..N through the transposed reshape
        M = psi.reshape(2 ** (n - cut), 2**cut)
        p = np.linalg.svd(M, compute_uv=False) ** 2
        assert S == pytest.approx(-np.sum(p * np.log(p)), abs=1e-10)
        assert S <= min(cut, n - cut) * np.log(2) + 1e-9


def test_phase_and_local_relabeling_invariance():
    n, cut = 8, 4
    psi = haar_state(n, 12)
    S = half_cut_entropy(psi, cut)
    assert half_cut_entropy(np.exp(0.7j) * psi, cut) == pytest.approx(S, abs=1e-12)
    rng = np.random.default_rng(0)
    for _ in range(3):
        perm = rng.permutation(2**cut)
        M = psi.reshape(2 ** (n - cut), 2**cut)[:, perm]
        assert half_cut_entropy(M.reshape(-1), cut) == pytest.approx(S, abs=1e-10)


def test_rejects_unnormalized_and_bad_cut():
    psi = 2 * paramagnetic_state(6)
    with pytest.raises(ValueError):
        half_cut_entropy(psi, 3)
    with pytest.raises(ValueError):
        schmidt_values(paramagnetic_state(6), 6)


def test_entropy_curve_basic():
    times = np.linspace(0, 6, 31)
    curve = entropy_curve(preset("nnn", 8), times, EvolutionEngine("eigen"), preset_label="nnn")
    assert isinstance(curve, EntropyCurve)
    assert curve.cut == 4 and curve.preset_label == "nnn"
    assert abs(curve.entropies[0]) < 1e-10
    assert np.all(curve.entropies <= 4 * np.log(2) + 1e-9)
    np.testing.assert_allclose(curve.in_bits(), curve.entropies / np.log(2))


def test_entropy_curve_engines_agree():
    times = np.linspace(0, 3, 7)
    a = entropy_curve(preset("nn", 8), times, EvolutionEngine("eigen"))
    b = entropy_curve(preset("nn", 8), times, EvolutionEngine("krylov"))
    np.testing.assert_allclose(a.entropies, b.entropies, atol=1e-7)


def test_entropy_curve_requires_zero_start():
    with pytest.raises(ValueError):
        entropy_curve(preset("nn", 6), [0.5, 1.0])


def test_first_time_reaching():
    c = EntropyCurve(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.5, 1.5]), 3, 6)
    assert c.first_time_reaching(1.0) == pytest.approx(1.5)
    assert c.first_time_reaching(2.0) is None


def test_odd_chain_cut():
    curve = entropy_curve(preset("nnn", 9), [0.0, 1.0])
    assert curve.cut == 4


def test_plateau_band_chaotic_n10():
    times = np.linspace(0, 20, 81)
    curve = entropy_curve(preset("nnn", 10), times)
    late = curve.entropies[times >= 10].mean()
    cut_max = 5 * np.log(2)
    assert 0.5 * cut_max < late < cut_max
