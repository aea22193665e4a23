"""Seedable statevector / density-matrix engine with the trapped-ion gate set.

Amplitude indexing: bitstring q0 q1 … q_{n-1} maps to the integer index with
q0 as the most significant bit. Gate applications return new states; nothing
mutates shared arrays, so values can be handed between threads freely.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin, sqrt, pi
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceCapError, UsageError
from .pauli import PauliSum
from .rng import derive_seed, make_rng

DENSITY_QUBIT_CAP = 8

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)

# basis-change V with V·σ·V† = Z, applied before a computational-basis readout
_BASIS_ROTATION = {"X": _H, "Y": _H @ _SDG, "Z": np.eye(2, dtype=complex)}


@dataclass(frozen=True)
class Gate:
    """One native or ansatz-level gate: name, qubit tuple, parameter tuple."""

    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.name not in ("x", "r", "rz", "uxy", "zz", "barrier"):
            raise UsageError(f"unknown gate {self.name!r}")


def gate_x(q: int) -> Gate:
    return Gate("x", (q,))


def gate_r(q: int, theta: float, phi: float) -> Gate:
    return Gate("r", (q,), (float(theta), float(phi)))


def gate_rz(q: int, theta: float) -> Gate:
    return Gate("rz", (q,), (float(theta),))


def gate_uxy(i: int, j: int, theta: float) -> Gate:
    return Gate("uxy", (i, j), (float(theta),))


def gate_zz(i: int, j: int, theta: float = pi / 2) -> Gate:
    return Gate("zz", (i, j), (float(theta),))


def barrier() -> Gate:
    return Gate("barrier", ())


def gate_matrix(gate: Gate) -> np.ndarray:
    """Unitary of the gate on its own qubits (2x2 or 4x4)."""
    if gate.name == "x":
        return _X
    if gate.name == "r":
        theta, phi = gate.params
        c, s = cos(theta / 2), sin(theta / 2)
        return np.array(
            [[c, -1j * s * np.exp(-1j * phi)], [-1j * s * np.exp(1j * phi), c]],
            dtype=complex,
        )
    if gate.name == "rz":
        (theta,) = gate.params
        return np.array(
            [[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]],
            dtype=complex,
        )
    if gate.name == "uxy":
        (theta,) = gate.params
        c, s = cos(theta), sin(theta)
        m = np.eye(4, dtype=complex)
        m[1, 1] = m[2, 2] = c
        m[1, 2] = m[2, 1] = -1j * s
        return m
    if gate.name == "zz":
        (theta,) = gate.params
        e_m, e_p = np.exp(-1j * theta / 2), np.exp(1j * theta / 2)
        return np.diag([e_m, e_p, e_p, e_m]).astype(complex)
    raise UsageError(f"gate {gate.name!r} has no matrix")


@dataclass(frozen=True)
class StateVector:
    """Pure state over `num_qubits` qubits; amplitudes kept unit-norm."""

    amplitudes: np.ndarray
    num_qubits: int

    @classmethod
    def computational_basis(cls, num_qubits: int, bits: Sequence[int] | None = None) -> "StateVector":
        dim = 2**num_qubits
        amps = np.zeros(dim, dtype=complex)
        idx = 0
        if bits is not None:
            if len(bits) != num_qubits:
                raise UsageError("bit pattern length mismatch")
            for b in bits:
                idx = (idx << 1) | (1 if b else 0)
        amps[idx] = 1.0
        return cls(amps, num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def _check_qubits(gate: Gate, num_qubits: int) -> None:
    if len(set(gate.qubits)) != len(gate.qubits):
        raise UsageError("gate qubits must be distinct")
    for q in gate.qubits:
        if not 0 <= q < num_qubits:
            raise UsageError(f"qubit {q} out of range for {num_qubits} qubits")


def _apply_matrix(amps: np.ndarray, m: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    k = len(qubits)
    tensor = amps.reshape([2] * n)
    moved = np.moveaxis(tensor, qubits, range(k))
    shaped = moved.reshape(2**k, -1)
    out = (m @ shaped).reshape([2] * n)
    return np.moveaxis(out, range(k), qubits).reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate; returns a new normalized StateVector."""
    if gate.name == "barrier":
        return state
    _check_qubits(gate, state.num_qubits)
    amps = _apply_matrix(state.amplitudes, gate_matrix(gate), gate.qubits, state.num_qubits)
    return StateVector(amps, state.num_qubits)


def apply_circuit(state: StateVector, gates: Iterable[Gate]) -> StateVector:
    for g in gates:
        state = apply_gate(state, g)
    return state


def _pauli_phases_and_flip(label: str, num_qubits: int) -> tuple[np.ndarray, int]:
    """Per-index phase array and flip mask so that P|b⟩ = phase[b]·|b xor flip⟩."""
    dim = 2**num_qubits
    idx = np.arange(dim)
    flip = 0
    parity = np.zeros(dim, dtype=np.int64)
    n_y = 0
    for p, c in enumerate(label):
        shift = num_qubits - 1 - p
        if c in ("X", "Y"):
            flip |= 1 << shift
        if c in ("Y", "Z"):
            parity ^= (idx >> shift) & 1
        if c == "Y":
            n_y += 1
    phases = (1j**n_y) * np.where(parity, -1.0, 1.0)
    return phases.astype(complex), flip


def apply_pauli_string(state: StateVector, label: str) -> StateVector:
    phases, flip = _pauli_phases_and_flip(label, state.num_qubits)
    src = np.arange(len(state.amplitudes)) ^ flip
    out = (phases * state.amplitudes)[src]
    return StateVector(out, state.num_qubits)


def expectation(state: StateVector, obs: PauliSum) -> float:
    """Exact ⟨ψ|O|ψ⟩ without materializing the dense matrix."""
    if obs.num_qubits != state.num_qubits:
        raise UsageError("observable register size mismatch")
    if not obs.is_hermitian():
        raise UsageError("expectation requires a Hermitian observable")
    total = 0.0 + 0.0j
    psi = state.amplitudes
    for label, coeff in obs.simplify().terms.items():
        phases, flip = _pauli_phases_and_flip(label, state.num_qubits)
        src = np.arange(len(psi)) ^ flip
        total += coeff * np.vdot(psi, (phases * psi)[src])
    return float(total.real)


@dataclass(frozen=True)
class Counts:
    """Shot outcomes for one measured Pauli basis."""

    basis: str
    shots: int
    outcomes: dict[str, int]
    seed: int

    def __post_init__(self) -> None:
        total = sum(self.outcomes.values())
        if abs(total - self.shots) > 1e-9:
            raise UsageError(f"counts sum {total} does not match shots {self.shots}")

    def to_json_dict(self) -> dict:
        return {
            "basis": self.basis,
            "shots": self.shots,
            "seed": self.seed,
            "outcomes": dict(sorted(self.outcomes.items())),
        }


def _rotate_to_basis(state: StateVector, basis: str) -> StateVector:
    amps = state.amplitudes
    for p, c in enumerate(basis):
        if c == "Z" or c == "I":
            continue
        amps = _apply_matrix(amps, _BASIS_ROTATION[c], (p,), state.num_qubits)
    return StateVector(amps, state.num_qubits)


def _sample_from_probs(probs: np.ndarray, num_qubits: int, shots: int, seed: int) -> dict[str, int]:
    rng = make_rng(seed)
    probs = np.clip(probs.real, 0.0, None)
    probs = probs / probs.sum()
    draws = rng.choice(len(probs), size=shots, p=probs)
    values, counts = np.unique(draws, return_counts=True)
    return {format(int(v), f"0{num_qubits}b"): int(c) for v, c in zip(values, counts)}


def sample_pauli_basis(state: StateVector, basis: str, shots: int, seed: int) -> Counts:
    """Measure `shots` outcomes in the rotated product basis given by `basis`.

    The all-identity basis is trivial: every shot reads the all-zeros string.
    Identical inputs and seed give identical Counts.
    """
    if shots < 1:
        raise UsageError("shots must be positive")
    if len(basis) != state.num_qubits:
        raise UsageError("basis length mismatch")
    if all(c == "I" for c in basis):
        return Counts(basis, shots, {"0" * state.num_qubits: shots}, seed)
    rotated = _rotate_to_basis(state, basis)
    outcomes = _sample_from_probs(rotated.probabilities(), state.num_qubits, shots, seed)
    return Counts(basis, shots, outcomes, seed)


def counts_expectation(counts: Counts, label: str) -> float:
    """Reconstruct ⟨label⟩ for a group member from its group-basis Counts."""
    support = [p for p, c in enumerate(label) if c != "I"]
    if not support:
        return 1.0
    total = 0.0
    for bits, n in counts.outcomes.items():
        sign = 1.0
        for p in support:
            if bits[p] == "1":
                sign = -sign
        total += sign * n
    return total / counts.shots


# -- mixed states and noise ----------------------------------------------------


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing two-qubit gates plus SPAM bit flips.

    `p_twoqubit` is the depolarizing probability of the channel
    ρ → (1−p)ρ + p·(I/4 ⊗ tr_pair ρ) applied after every two-qubit gate;
    `p_spam` is an independent bit-flip probability per qubit at preparation
    and again before readout.
    """

    p_twoqubit: float
    p_spam: float

    def __post_init__(self) -> None:
        for v in (self.p_twoqubit, self.p_spam):
            if not 0.0 <= v <= 1.0:
                raise UsageError("noise probabilities must lie in [0, 1]")

    @classmethod
    def from_hardware_figures(cls, gate_fidelity: float = 0.990, spam_error: float = 0.005) -> "NoiseModel":
        """Depolarizing parameter matching an average two-qubit gate fidelity.

        For the d=4 depolarizing channel F_avg = 1 − p(d−1)/d, so
        p = (1 − F_avg)·d/(d−1).
        """
        p = (1.0 - gate_fidelity) * 4.0 / 3.0
        return cls(p_twoqubit=p, p_spam=spam_error)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    num_qubits: int

    def validate(self, tol: float = 1e-9) -> None:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise UsageError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > tol:
            raise UsageError("density matrix trace is not 1")
        if np.linalg.eigvalsh(m).min() < -tol:
            raise UsageError("density matrix has a negative eigenvalue")

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def populations(self) -> np.ndarray:
        return np.diag(self.matrix).real.copy()


def _embed_unitary(m: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Full 2^n unitary with `m` acting on `qubits`."""
    dim = 2**n
    full = np.eye(dim, dtype=complex)
    return _apply_matrix_columns(full, m, qubits, n)


def _apply_matrix_columns(mat: np.ndarray, m: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    out = np.empty_like(mat)
    for col in range(mat.shape[1]):
        out[:, col] = _apply_matrix(np.ascontiguousarray(mat[:, col]), m, qubits, n)
    return out


_TWO_QUBIT_PAULIS = [
    np.kron(a, b)
    for a in (np.eye(2, dtype=complex), _X, np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0]).astype(complex))
    for b in (np.eye(2, dtype=complex), _X, np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0]).astype(complex))
]


def _depolarize_pair(rho: np.ndarray, pair: tuple[int, int], p: float, n: int) -> np.ndarray:
    if p == 0.0:
        return rho
    mix = np.zeros_like(rho)
    for pm in _TWO_QUBIT_PAULIS:
        u = _embed_unitary(pm, pair, n)
        mix += u @ rho @ u.conj().T
    return (1.0 - p) * rho + (p / 16.0) * mix


def _bitflip_channel(rho: np.ndarray, q: int, p: float, n: int) -> np.ndarray:
    if p == 0.0:
        return rho
    u = _embed_unitary(_X, (q,), n)
    return (1.0 - p) * rho + p * (u @ rho @ u.conj().T)


def flip_all_qubits(rho: np.ndarray, p: float, n: int) -> np.ndarray:
    for q in range(n):
        rho = _bitflip_channel(rho, q, p, n)
    return rho


def run_noisy(
    circuit: Iterable[Gate],
    noise: NoiseModel,
    num_qubits: int,
    mode: str = "exact",
    n_trajectories: int = 1000,
    seed: int = 0,
    apply_readout_flips: bool = True,
) -> DensityMatrix:
    """Propagate |0…0⟩ through the gate list under the noise model.

    exact mode applies the two-qubit depolarizing channel after every
    two-qubit gate and bit-flip channels at preparation (and, unless
    `apply_readout_flips` is disabled for callers that rotate the basis
    first, before readout). Trajectory mode averages `n_trajectories`
    stochastically unraveled pure runs and converges to the exact result.
    """
    gates = [g for g in circuit if g.name != "barrier"]
    if mode == "exact":
        if num_qubits > DENSITY_QUBIT_CAP:
            raise ResourceCapError(
                f"{num_qubits} qubits exceeds the exact-density cap of {DENSITY_QUBIT_CAP}"
            )
        dim = 2**num_qubits
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        for q in range(num_qubits):
            rho = _bitflip_channel(rho, q, noise.p_spam, num_qubits)
        for g in gates:
            u = _embed_unitary(gate_matrix(g), g.qubits, num_qubits)
            rho = u @ rho @ u.conj().T
            if len(g.qubits) == 2:
                rho = _depolarize_pair(rho, g.qubits, noise.p_twoqubit, num_qubits)
        if apply_readout_flips:
            rho = flip_all_qubits(rho, noise.p_spam, num_qubits)
        return DensityMatrix(rho, num_qubits)

    if mode == "trajectories":
        if n_trajectories < 1:
            raise UsageError("need at least one trajectory")
        dim = 2**num_qubits
        acc = np.zeros((dim, dim), dtype=complex)
        # identity survives with 1 − 15p/16; each non-identity Pauli has p/16
        p_err = 15.0 * noise.p_twoqubit / 16.0
        for t in range(n_trajectories):
            rng = make_rng(derive_seed(seed, "traj", t))
            state = StateVector.computational_basis(num_qubits)
            for q in range(num_qubits):
                if rng.random() < noise.p_spam:
                    state = apply_gate(state, gate_x(q))
            for g in gates:
                state = apply_gate(state, g)
                if len(g.qubits) == 2 and rng.random() < p_err:
                    k = int(rng.integers(1, 16))
                    amps = _apply_matrix(
                        state.amplitudes, _TWO_QUBIT_PAULIS[k], g.qubits, num_qubits
                    )
                    state = StateVector(amps, num_qubits)
            if apply_readout_flips:
                for q in range(num_qubits):
                    if rng.random() < noise.p_spam:
                        state = apply_gate(state, gate_x(q))
            acc += state.projector()
        return DensityMatrix(acc / n_trajectories, num_qubits)

    raise UsageError(f"unknown mode {mode!r}")


def density_expectation(rho: DensityMatrix, obs_matrix: np.ndarray) -> float:
    return float(np.trace(rho.matrix @ obs_matrix).real)


def rotate_density_to_basis(rho: DensityMatrix, basis: str) -> DensityMatrix:
    m = rho.matrix
    n = rho.num_qubits
    for p, c in enumerate(basis):
        if c in ("Z", "I"):
            continue
        u = _embed_unitary(_BASIS_ROTATION[c], (p,), n)
        m = u @ m @ u.conj().T
    return DensityMatrix(m, n)


def sample_density_pauli_basis(
    rho: DensityMatrix, basis: str, shots: int, seed: int, p_readout: float = 0.0
) -> Counts:
    """Shot-sample a density matrix in a Pauli product basis.

    Readout bit flips (probability `p_readout` per qubit) act after the
    basis-change rotations, matching the physical measurement order.
    """
    if shots < 1:
        raise UsageError("shots must be positive")
    if len(basis) != rho.num_qubits:
        raise UsageError("basis length mismatch")
    rotated = rotate_density_to_basis(rho, basis)
    m = flip_all_qubits(rotated.matrix, p_readout, rho.num_qubits)
    outcomes = _sample_from_probs(np.diag(m).real, rho.num_qubits, shots, seed)
    return Counts(basis, shots, outcomes, seed)


def exact_basis_probabilities(
    source: StateVector | DensityMatrix, basis: str, p_readout: float = 0.0
) -> np.ndarray:
    """Born probabilities in a rotated basis, with optional readout flips."""
    if isinstance(source, StateVector):
        rotated = _rotate_to_basis(source, basis)
        if p_readout == 0.0:
            return rotated.probabilities()
        rho = DensityMatrix(rotated.projector(), source.num_qubits)
        m = flip_all_qubits(rho.matrix, p_readout, source.num_qubits)
        return np.diag(m).real.copy()
    rotated = rotate_density_to_basis(source, basis)
    m = flip_all_qubits(rotated.matrix, p_readout, source.num_qubits)
    return np.diag(m).real.copy()
