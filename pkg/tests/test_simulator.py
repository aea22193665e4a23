import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schwinger_vqe.errors import UsageError
from schwinger_vqe.model import from_couplings, total_charge
from schwinger_vqe.pauli import PauliSum, to_matrix
from schwinger_vqe.simulator import (
    Counts,
    NoiseModel,
    StateVector,
    apply_gate,
    counts_expectation,
    expectation,
    gate_matrix,
    gate_r,
    gate_rz,
    gate_uxy,
    gate_x,
    gate_zz,
    run_noisy,
    sample_pauli_basis,
)


def random_state(rng, q=4):
    amps = rng.normal(size=2**q) + 1j * rng.normal(size=2**q)
    amps /= np.linalg.norm(amps)
    return StateVector(amps, q)


angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False)


def test_rz_changes_no_probabilities():
    state = StateVector.computational_basis(1)
    out = apply_gate(state, gate_rz(0, 1.234))
    assert np.allclose(out.probabilities(), state.probabilities())


def test_uxy_half_pi_swaps_with_phase():
    state = StateVector.computational_basis(2, (0, 1))
    out = apply_gate(state, gate_uxy(0, 1, math.pi / 2))
    expected = np.zeros(4, dtype=complex)
    expected[0b10] = -1j
    assert np.max(np.abs(out.amplitudes - expected)) < 1e-12


def test_uxy_leaves_00_alone():
    state = StateVector.computational_basis(2, (0, 0))
    for theta in (0.3, 1.1, 2.9):
        out = apply_gate(state, gate_uxy(0, 1, theta))
        assert np.max(np.abs(out.amplitudes - state.amplitudes)) < 1e-12


def test_gate_index_out_of_range():
    state = StateVector.computational_basis(2)
    with pytest.raises(UsageError):
        apply_gate(state, gate_x(2))
    with pytest.raises(UsageError):
        apply_gate(state, gate_uxy(0, 0, 0.5))


@settings(max_examples=60, deadline=None)
@given(angles, angles, st.integers(0, 3))
def test_single_qubit_gates_preserve_norm(theta, phi, qubit):
    rng = np.random.default_rng(17)
    state = random_state(rng)
    for gate in (gate_r(qubit, theta, phi), gate_rz(qubit, theta), gate_x(qubit)):
        out = apply_gate(state, gate)
        assert abs(out.norm() - 1.0) < 1e-10


@settings(max_examples=60, deadline=None)
@given(angles, st.sampled_from([(0, 1), (1, 2), (2, 3), (0, 3)]))
def test_two_qubit_gates_preserve_norm_and_unitarity(theta, pair):
    rng = np.random.default_rng(3)
    state = random_state(rng)
    for gate in (gate_uxy(*pair, theta), gate_zz(*pair, theta)):
        out = apply_gate(state, gate)
        assert abs(out.norm() - 1.0) < 1e-10
        u = gate_matrix(gate)
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12


def test_uxy_preserves_charge_sector():
    params = from_couplings(2, 2, 16.0, (0.0, 0.0), (0.0, 0.0))
    q2 = to_matrix(total_charge(params) @ total_charge(params))
    rng = np.random.default_rng(11)
    # a random state inside the neutral sector stays there
    qd = np.diag(to_matrix(total_charge(params))).real
    amps = np.where(np.abs(qd) < 1e-9, rng.normal(size=16) + 1j * rng.normal(size=16), 0.0)
    amps = amps / np.linalg.norm(amps)
    state = StateVector(amps, 4)
    for pair in ((0, 1), (1, 2), (2, 3)):
        out = apply_gate(state, gate_uxy(*pair, 1.37))
        leak = np.real(np.vdot(out.amplitudes, q2 @ out.amplitudes))
        assert leak < 1e-10


def test_expectation_basics():
    state = StateVector.computational_basis(1)
    assert expectation(state, PauliSum(1, {"Z": 1.0})) == pytest.approx(1.0)


def test_expectation_matches_dense_ground_state():
    params = from_couplings(2, 2, 16.0, (0.0, 0.0), (0.0, 0.0))
    from schwinger_vqe.model import build_hamiltonian

    w = build_hamiltonian(params)
    wm = to_matrix(w)
    vals, vecs = np.linalg.eigh(wm)
    ground = StateVector(vecs[:, 0], 4)
    assert expectation(ground, w) == pytest.approx(vals[0], abs=1e-9)


def test_expectation_linearity():
    rng = np.random.default_rng(2)
    state = random_state(rng)
    a = PauliSum(4, {"XZYI": 1.0, "ZZII": 0.5})
    b = PauliSum(4, {"IYZX": -2.0, "IIII": 1.0})
    combo = a * 0.7 + b * (-1.3)
    lhs = expectation(state, combo)
    rhs = 0.7 * expectation(state, a) - 1.3 * expectation(state, b)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_expectation_rejects_non_hermitian():
    state = StateVector.computational_basis(1)
    with pytest.raises(UsageError):
        expectation(state, PauliSum(1, {"X": 1j}))


def test_sampling_z_basis_deterministic_state():
    state = StateVector.computational_basis(4, (0, 1, 0, 1))
    counts = sample_pauli_basis(state, "ZZZZ", 250, seed=9)
    assert counts.outcomes == {"0101": 250}


def test_sampling_x_basis_binomial_bound():
    state = StateVector.computational_basis(1)
    counts = sample_pauli_basis(state, "X", 10000, seed=21)
    mean = counts_expectation(counts, "X")
    assert abs(mean) < 4.0 / math.sqrt(10000)


def test_sampling_determinism_and_counts_contract():
    rng = np.random.default_rng(7)
    state = random_state(rng)
    c1 = sample_pauli_basis(state, "XZYI", 500, seed=123)
    c2 = sample_pauli_basis(state, "XZYI", 500, seed=123)
    assert c1 == c2
    assert sum(c1.outcomes.values()) == 500
    with pytest.raises(UsageError):
        sample_pauli_basis(state, "XZYI", 0, seed=1)


def test_counts_json_round_trip_fields():
    c = Counts("ZZII", 10, {"0000": 4, "1100": 6}, seed=3)
    d = c.to_json_dict()
    assert d == {"basis": "ZZII", "shots": 10, "seed": 3, "outcomes": {"0000": 4, "1100": 6}}


def test_counts_invariant():
    with pytest.raises(UsageError):
        Counts("Z", 5, {"0": 3}, seed=0)


def build_test_circuit(theta=0.7):
    return [
        gate_x(1),
        gate_x(3),
        gate_uxy(0, 1, theta),
        gate_uxy(2, 3, 0.4),
        gate_uxy(1, 2, 1.2),
        gate_rz(0, 0.3),
    ]


def test_run_noisy_zero_noise_is_pure():
    circuit = build_test_circuit()
    rho = run_noisy(circuit, NoiseModel(0.0, 0.0), 4, mode="exact")
    state = StateVector.computational_basis(4)
    for g in circuit:
        state = apply_gate(state, g)
    assert np.max(np.abs(rho.matrix - state.projector())) < 1e-10
    rho.validate()


def test_purity_decreases_with_noise():
    circuit = build_test_circuit()
    purities = []
    for p in (0.0, 0.01, 0.05):
        rho = run_noisy(circuit, NoiseModel(p, 0.0), 4, mode="exact")
        purities.append(rho.purity())
    assert purities[0] > purities[1] > purities[2]


def test_trajectories_converge_to_exact_populations():
    circuit = build_test_circuit()
    noise = NoiseModel(0.05, 0.01)
    exact = run_noisy(circuit, noise, 4, mode="exact")
    traj = run_noisy(circuit, noise, 4, mode="trajectories", n_trajectories=10000, seed=5)
    bound = 5.0 / math.sqrt(10000)
    assert np.max(np.abs(exact.populations() - traj.populations())) < bound


def test_noise_model_from_hardware_figures():
    nm = NoiseModel.from_hardware_figures(gate_fidelity=0.990, spam_error=0.005)
    assert nm.p_twoqubit == pytest.approx(0.04 / 3)
    assert nm.p_spam == 0.005
    with pytest.raises(UsageError):
        NoiseModel(-0.1, 0.0)
