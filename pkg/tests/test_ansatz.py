import math

import numpy as np
import pytest

from schwinger_vqe.ansatz import (
    AnsatzParams,
    Circuit,
    build_ansatz_circuit,
    charge_leakage,
    circuit_unitary,
    decompose_to_native,
    export_qasm,
    import_qasm,
    initial_occupations,
    prepare_trial_state,
    unitary_distance,
)
from schwinger_vqe.errors import UsageError
from schwinger_vqe.model import ModelParams, build_hamiltonian, from_couplings, total_charge
from schwinger_vqe.pauli import to_matrix
from schwinger_vqe.simulator import expectation, gate_rz, gate_uxy


@pytest.fixture(scope="module")
def params():
    return from_couplings(2, 2, 16.0, (0.0, 0.0), (0.0, 0.0))


def test_zero_angles_give_initial_state(params):
    state = prepare_trial_state(params, AnsatzParams((0.0,) * 7))
    expected = np.zeros(16, dtype=complex)
    expected[0b0101] = 1.0
    overlap = abs(np.vdot(expected, state.amplitudes))
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_angle_count_enforced(params):
    with pytest.raises(UsageError):
        prepare_trial_state(params, AnsatzParams((0.0,) * 6))


def test_initial_occupations_general():
    assert initial_occupations(ModelParams(2, 2, 1.0, (0, 0), (0, 0))) == (0, 1, 0, 1)
    assert initial_occupations(ModelParams(4, 1, 1.0, (0,), (0,))) == (0, 1, 0, 1)
    # odd sites with two flavors: alternating pattern is charged; fall back to
    # occupying odd lattice sites entirely
    occ = initial_occupations(ModelParams(3, 2, 1.0, (0, 0), (0, 0)))
    assert occ == (0, 0, 1, 1, 0, 0)


def test_random_trial_states_stay_neutral(params):
    rng = np.random.default_rng(4)
    for _ in range(100):
        theta = AnsatzParams(tuple(rng.uniform(0, 2 * math.pi, 7)))
        state = prepare_trial_state(params, theta)
        assert charge_leakage(params, state) < 1e-10


def test_dense_optimizer_reaches_reference_minimum(params):
    from scipy.optimize import minimize

    w = build_hamiltonian(params)

    def cost(t):
        return expectation(prepare_trial_state(params, AnsatzParams(tuple(t))), w)

    best = np.inf
    for s in range(8):
        rng = np.random.default_rng(s)
        res = minimize(
            cost, rng.uniform(0, 2 * math.pi, 7), method="Nelder-Mead",
            options={"maxiter": 3000, "xatol": 1e-9, "fatol": 1e-11},
        )
        best = min(best, res.fun)
    assert best <= -30.5


def test_exchange_generators_commute_with_total_charge(params):
    from schwinger_vqe.pauli import PauliSum

    q_tot = to_matrix(total_charge(params))
    for i in (0, 1, 2):
        gen = PauliSum(4)
        x_pair = "I" * i + "XX" + "I" * (2 - i)
        y_pair = "I" * i + "YY" + "I" * (2 - i)
        gen.add_term(x_pair, 1.0)
        gen.add_term(y_pair, 1.0)
        g = to_matrix(gen)
        assert np.max(np.abs(g @ q_tot - q_tot @ g)) < 1e-12


def test_periodicity_properties(params):
    rng = np.random.default_rng(8)
    base = rng.uniform(0, 2 * math.pi, 7)
    s0 = prepare_trial_state(params, AnsatzParams(tuple(base)))
    # 2π-periodic in z-rotation angles (up to global phase)
    shifted = base.copy()
    shifted[4] += 2 * math.pi
    s1 = prepare_trial_state(params, AnsatzParams(tuple(shifted)))
    assert abs(abs(np.vdot(s0.amplitudes, s1.amplitudes)) - 1.0) < 1e-10
    # π-periodic in exchange angles at the level of probabilities
    shifted = base.copy()
    shifted[1] += math.pi
    s2 = prepare_trial_state(params, AnsatzParams(tuple(shifted)))
    assert np.max(np.abs(s0.probabilities() - s2.probabilities())) < 1e-10


def test_decompose_empty_circuit():
    out = decompose_to_native(Circuit(4, ()))
    assert out.gates == ()


def test_decompose_single_uxy_equivalence():
    c = Circuit(4, (gate_uxy(1, 2, 0.873),))
    native = decompose_to_native(c)
    assert all(g.name in ("x", "r", "rz", "zz") for g in native.gates)
    assert sum(1 for g in native.gates if g.name == "zz") == 2
    d = unitary_distance(circuit_unitary(c), circuit_unitary(native))
    assert d < 1e-9


def test_decompose_full_ansatz_equivalence(params):
    rng = np.random.default_rng(12)
    for _ in range(10):
        theta = AnsatzParams(tuple(rng.uniform(0, 2 * math.pi, 7)))
        c = build_ansatz_circuit(params, theta)
        native = decompose_to_native(c)
        d = unitary_distance(circuit_unitary(c), circuit_unitary(native))
        assert d < 1e-9


def test_decompose_rejects_unknown(params):
    from schwinger_vqe.simulator import Gate

    with pytest.raises(UsageError):
        Gate("h", (0,))


def test_qasm_empty_circuit():
    text = export_qasm(Circuit(4, ()))
    assert text.splitlines() == [
        "OPENQASM 3.0;",
        'include "stdgates.inc";',
        "qubit[4] q;",
    ]


def test_qasm_single_rz():
    text = export_qasm(Circuit(4, (gate_rz(2, 0.5),)))
    assert "rz(0.5) q[2];" in text


def test_qasm_round_trip_byte_identical(params):
    theta = AnsatzParams(tuple(np.linspace(0.1, 2.9, 7)))
    native = decompose_to_native(build_ansatz_circuit(params, theta))
    text1 = export_qasm(native)
    text2 = export_qasm(import_qasm(text1))
    assert text1 == text2
    assert import_qasm(text1).gates == native.gates


def test_qasm_rejects_non_native(params):
    with pytest.raises(UsageError):
        export_qasm(Circuit(4, (gate_uxy(0, 1, 0.3),)))


def test_circuit_json_round_trip(params):
    from schwinger_vqe.ansatz import circuit_from_json, circuit_to_json

    theta = AnsatzParams(tuple(np.linspace(0.2, 2.2, 7)))
    circuit = build_ansatz_circuit(params, theta)
    back = circuit_from_json(circuit_to_json(circuit))
    assert back == circuit
    with pytest.raises(UsageError):
        circuit_from_json({"gates": [{"name": "x"}]})
