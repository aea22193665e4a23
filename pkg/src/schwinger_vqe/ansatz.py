"""Charge-conserving ansatz circuit, native-gate decomposition, QASM export.

The single-layer ansatz acts on the alternating-occupation initial state with
fermionic exchange gates on even pairs, then odd pairs, then one z-rotation
per qubit: 2·N·F − 1 free angles in total. Exchange generators commute with
the total staggered charge, so trial states stay in the zero-charge sector.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
import numpy as np

from .errors import UsageError
from .model import ModelParams, total_charge
from .pauli import to_matrix
from .simulator import (
    Gate,
    StateVector,
    apply_circuit,
    barrier,
    gate_r,
    gate_rz,
    gate_uxy,
    gate_x,
    gate_zz,
)

_HALF_PI = math.pi / 2


@dataclass(frozen=True)
class AnsatzParams:
    """Angle vector: indices 0…NF−2 are exchange angles for pairs (i, i+1),
    indices NF−1…2NF−2 are z-rotation angles for qubits 0…NF−1."""

    theta: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))

    @staticmethod
    def num_parameters(num_qubits: int) -> int:
        return 2 * num_qubits - 1

    def exchange_angle(self, pair_index: int) -> float:
        return self.theta[pair_index]

    def z_angle(self, qubit: int, num_qubits: int) -> float:
        return self.theta[num_qubits - 1 + qubit]


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self) -> None:
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise UsageError(f"gate qubit {q} outside register")

    def without_barriers(self) -> "Circuit":
        return Circuit(self.num_qubits, tuple(g for g in self.gates if g.name != "barrier"))


def initial_occupations(params: ModelParams) -> tuple[int, ...]:
    """Alternating qubit-occupation pattern 0101…, falling back to the
    fully occupied odd sites whenever the alternating pattern is not
    charge neutral (odd N with even F)."""
    q = params.num_qubits
    pattern = tuple(p % 2 for p in range(q))
    odd_sites = params.num_sites // 2
    if sum(pattern) == params.num_flavors * odd_sites:
        return pattern
    return tuple(1 if (p // params.num_flavors) % 2 else 0 for p in range(q))


def build_ansatz_circuit(params: ModelParams, theta: AnsatzParams) -> Circuit:
    q = params.num_qubits
    expected = AnsatzParams.num_parameters(q)
    if len(theta.theta) != expected:
        raise UsageError(f"expected {expected} angles, got {len(theta.theta)}")
    gates: list[Gate] = [gate_x(p) for p, occ in enumerate(initial_occupations(params)) if occ]
    gates.append(barrier())
    for i in range(0, q - 1, 2):
        gates.append(gate_uxy(i, i + 1, theta.exchange_angle(i)))
    gates.append(barrier())
    for i in range(1, q - 1, 2):
        gates.append(gate_uxy(i, i + 1, theta.exchange_angle(i)))
    gates.append(barrier())
    for p in range(q):
        gates.append(gate_rz(p, theta.z_angle(p, q)))
    return Circuit(q, tuple(gates))


def prepare_trial_state(params: ModelParams, theta: AnsatzParams) -> StateVector:
    circuit = build_ansatz_circuit(params, theta)
    state = StateVector.computational_basis(params.num_qubits)
    return apply_circuit(state, circuit.gates)


def charge_leakage(params: ModelParams, state: StateVector) -> float:
    """⟨ψ|Q_tot²|ψ⟩, zero (to rounding) for states in the neutral sector."""
    q2 = to_matrix(total_charge(params) @ total_charge(params))
    return float(np.real(np.vdot(state.amplitudes, q2 @ state.amplitudes)))


# -- native decomposition -------------------------------------------------------
#
# The exchange gate is compiled with exactly two ZZ(π/2) gates:
#   Uxy(θ)_{ij} = L† · CNOT_{ij} · (Ry_i(θ) ⊗ Ry_j(θ)) · CNOT_{ij} · L
# with L = H·S† on qubit i. Conjugating by CNOT maps the two Ry generators
# onto the commuting pair {Y_i X_j, Z_i Y_j}, which L maps back to
# {X_i X_j, Y_i Y_j}. Correctness is locked by the unitary-equivalence tests
# rather than by construction.


def _h_gates(q: int) -> list[Gate]:
    # H = X · Ry(π/2)
    return [gate_r(q, _HALF_PI, _HALF_PI), gate_x(q)]


def _cnot_gates(ctrl: int, tgt: int) -> list[Gate]:
    # CNOT = (I⊗H) · CZ · (I⊗H), CZ = ZZ(π/2) with -π/2 local z-rotations
    gates = _h_gates(tgt)
    gates.append(gate_zz(ctrl, tgt, _HALF_PI))
    gates.append(gate_rz(ctrl, -_HALF_PI))
    gates.append(gate_rz(tgt, -_HALF_PI))
    gates.extend(_h_gates(tgt))
    return gates


def _uxy_native(i: int, j: int, theta: float) -> list[Gate]:
    gates: list[Gate] = [gate_rz(i, -_HALF_PI)]  # S† then H make L
    gates.extend(_h_gates(i))
    gates.extend(_cnot_gates(i, j))
    gates.append(gate_r(i, theta, _HALF_PI))
    gates.append(gate_r(j, theta, _HALF_PI))
    gates.extend(_cnot_gates(i, j))
    gates.extend(_h_gates(i))  # L† = H then S
    gates.append(gate_rz(i, _HALF_PI))
    return gates


def _angle_is_trivial(theta: float) -> bool:
    return abs(math.remainder(theta, 2.0 * math.pi)) < 1e-12


def _try_merge(a: Gate, b: Gate) -> list[Gate] | None:
    """Merge two adjacent gates on identical qubits, or None."""
    if a.qubits != b.qubits:
        return None
    if a.name == "x" and b.name == "x":
        return []
    if a.name == "rz" and b.name == "rz":
        theta = a.params[0] + b.params[0]
        return [] if _angle_is_trivial(theta) else [gate_rz(a.qubits[0], theta)]
    if a.name == "r" and b.name == "r" and abs(a.params[1] - b.params[1]) < 1e-15:
        theta = a.params[0] + b.params[0]
        return [] if _angle_is_trivial(theta) else [gate_r(a.qubits[0], theta, a.params[1])]
    return None


def _peephole(gates: list[Gate]) -> list[Gate]:
    """Cancel adjacent inverse/mergeable local rotations until stable."""
    changed = True
    while changed:
        changed = False
        out: list[Gate] = []
        for g in gates:
            if _angle_is_trivial_gate(g):
                changed = True
                continue
            merged = False
            for k in range(len(out) - 1, -1, -1):
                prev = out[k]
                if not set(prev.qubits) & set(g.qubits):
                    continue
                replacement = _try_merge(prev, g)
                if replacement is not None:
                    out[k : k + 1] = replacement
                    merged = True
                    changed = True
                break
            if not merged:
                out.append(g)
        gates = out
    return gates


def _angle_is_trivial_gate(g: Gate) -> bool:
    if g.name in ("rz", "r") and _angle_is_trivial(g.params[0]):
        return True
    return False


_NATIVE_NAMES = ("x", "r", "rz", "zz")


def decompose_to_native(circuit: Circuit) -> Circuit:
    """Rewrite onto {R(θ,φ), Rz(θ), X, ZZ(π/2)}; equal up to global phase."""
    gates: list[Gate] = []
    for g in circuit.gates:
        if g.name == "barrier":
            continue
        if g.name in _NATIVE_NAMES:
            gates.append(g)
        elif g.name == "uxy":
            gates.extend(_uxy_native(g.qubits[0], g.qubits[1], g.params[0]))
        else:
            raise UsageError(f"cannot decompose gate {g.name!r}")
    return Circuit(circuit.num_qubits, tuple(_peephole(gates)))


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the circuit (test-scale registers only)."""
    dim = 2**circuit.num_qubits
    u = np.eye(dim, dtype=complex)
    for col in range(dim):
        state = StateVector(np.ascontiguousarray(u[:, col]), circuit.num_qubits)
        u[:, col] = apply_circuit(state, circuit.gates).amplitudes
    return u


def unitary_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Max-modulus deviation after aligning the optimal global phase."""
    overlap = np.trace(u.conj().T @ v)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(u - v / phase)))


# -- OpenQASM 3 export / import -------------------------------------------------

_QASM_HEADER = ['OPENQASM 3.0;', 'include "stdgates.inc";']
_QASM_DEFS = {
    "r": "gate r(theta, phi) a { U(theta, phi - pi/2, pi/2 - phi) a; }",
    "zz": "gate zz(theta) a, b { cx a, b; rz(theta) b; cx a, b; }",
}


def export_qasm(circuit: Circuit) -> str:
    """Deterministic OpenQASM 3 text for a native-gate circuit."""
    used = {g.name for g in circuit.gates if g.name != "barrier"}
    unsupported = used - set(_NATIVE_NAMES)
    if unsupported:
        raise UsageError(f"non-native gates in export: {sorted(unsupported)}")
    lines = list(_QASM_HEADER)
    for name in ("r", "zz"):
        if name in used:
            lines.append(_QASM_DEFS[name])
    lines.append(f"qubit[{circuit.num_qubits}] q;")
    for g in circuit.gates:
        if g.name == "barrier":
            lines.append("barrier q;")
        elif g.name == "x":
            lines.append(f"x q[{g.qubits[0]}];")
        elif g.name == "rz":
            lines.append(f"rz({g.params[0]!r}) q[{g.qubits[0]}];")
        elif g.name == "r":
            lines.append(f"r({g.params[0]!r}, {g.params[1]!r}) q[{g.qubits[0]}];")
        elif g.name == "zz":
            lines.append(f"zz({g.params[0]!r}) q[{g.qubits[0]}], q[{g.qubits[1]}];")
    return "\n".join(lines) + "\n"


_STMT_RE = re.compile(
    r"^(?P<name>x|rz|r|zz)\s*(?:\((?P<args>[^)]*)\))?\s+(?P<qubits>q\[\d+\](?:\s*,\s*q\[\d+\])*);$"
)


def import_qasm(text: str) -> Circuit:
    """Parse circuits produced by :func:`export_qasm`."""
    num_qubits: int | None = None
    gates: list[Gate] = []
    for raw in text.splitlines():
        line = raw.strip()
        if (
            not line
            or line.startswith("OPENQASM")
            or line.startswith("include")
            or line.startswith("gate ")
        ):
            continue
        m = re.match(r"^qubit\[(\d+)\] q;$", line)
        if m:
            num_qubits = int(m.group(1))
            continue
        if line == "barrier q;":
            gates.append(barrier())
            continue
        m = _STMT_RE.match(line)
        if not m:
            raise UsageError(f"cannot parse QASM line: {raw!r}")
        name = m.group("name")
        args = [float(a) for a in m.group("args").split(",")] if m.group("args") else []
        qubits = tuple(int(x) for x in re.findall(r"q\[(\d+)\]", m.group("qubits")))
        if name == "x":
            gates.append(gate_x(qubits[0]))
        elif name == "rz":
            gates.append(gate_rz(qubits[0], args[0]))
        elif name == "r":
            gates.append(gate_r(qubits[0], args[0], args[1]))
        elif name == "zz":
            gates.append(gate_zz(qubits[0], qubits[1], args[0]))
    if num_qubits is None:
        raise UsageError("QASM text lacks a qubit register declaration")
    return Circuit(num_qubits, tuple(gates))


def random_angles(num_qubits: int, rng: np.random.Generator) -> AnsatzParams:
    n = AnsatzParams.num_parameters(num_qubits)
    return AnsatzParams(tuple(rng.uniform(0.0, 2.0 * math.pi, size=n)))


def circuit_to_json(circuit: Circuit) -> dict:
    """JSON-ready gate list: {num_qubits, gates: [{name, qubits, params}]}."""
    return {
        "num_qubits": circuit.num_qubits,
        "gates": [
            {"name": g.name, "qubits": list(g.qubits), "params": list(g.params)}
            for g in circuit.gates
        ],
    }


def circuit_from_json(payload: dict) -> Circuit:
    try:
        gates = tuple(
            Gate(g["name"], tuple(int(q) for q in g["qubits"]),
                 tuple(float(p) for p in g["params"]))
            for g in payload["gates"]
        )
        return Circuit(int(payload["num_qubits"]), gates)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed circuit JSON: {exc}") from exc
