"""Exact-diagonalization oracle, phase-energy decomposition, critical points.

Physical states obey Gauss' law with zero total staggered charge, so the
oracle diagonalizes within the Q_tot = 0 eigenspace when given the charge
operator; the charge-conserving ansatz explores exactly that sector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ansatz import AnsatzParams, prepare_trial_state
from .errors import ResourceCapError, UsageError
from .model import (
    ModelParams,
    cached_hamiltonian,
    nu_from_kappa,
    particle_number,
    total_charge,
)
from .pauli import PauliSum, to_matrix
from .rng import derive_seed
from .simulator import StateVector, expectation, sample_pauli_basis

ORACLE_QUBIT_CAP = 12


@dataclass(frozen=True)
class PhasePoint:
    """One sampled point of the phase diagram."""

    K: float
    nu: tuple[float, ...]
    energy: float
    particle_numbers: tuple[float, ...]
    rounded_numbers: tuple[int, ...]
    energy_exact: float
    energy_stderr: float = 0.0
    num_sites: int = 2

    def __post_init__(self) -> None:
        target = self.num_sites * len(self.rounded_numbers) // 2
        if sum(self.rounded_numbers) != target:
            raise UsageError(
                f"rounded particle numbers sum {sum(self.rounded_numbers)} "
                f"violates charge neutrality (expected {target})"
            )


def exact_ground_state(
    h: PauliSum,
    restrict_to_zero_of: PauliSum | None = None,
    qubit_cap: int = ORACLE_QUBIT_CAP,
) -> tuple[float, StateVector, float]:
    """Lowest eigenvalue, its eigenvector, and the gap E1 − E0.

    When `restrict_to_zero_of` is given (a diagonal symmetry operator such as
    the total charge), diagonalization runs inside its zero eigenspace and the
    returned vector is embedded back into the full register.
    """
    if h.num_qubits > qubit_cap:
        raise ResourceCapError(
            f"{h.num_qubits} qubits exceeds the oracle cap of {qubit_cap}"
        )
    matrix = to_matrix(h, qubit_cap=qubit_cap)
    dim = matrix.shape[0]
    if restrict_to_zero_of is not None:
        sym = to_matrix(restrict_to_zero_of, qubit_cap=qubit_cap)
        off_diag = sym - np.diag(np.diag(sym))
        if np.max(np.abs(off_diag)) > 1e-12:
            raise UsageError("sector restriction requires a diagonal operator")
        mask = np.abs(np.diag(sym).real) < 1e-9
        if not mask.any():
            raise UsageError("restriction operator has no zero eigenspace")
        sub = matrix[np.ix_(mask, mask)]
        vals, vecs = np.linalg.eigh(sub)
        ground = np.zeros(dim, dtype=complex)
        ground[mask] = vecs[:, 0]
    else:
        vals, vecs = np.linalg.eigh(matrix)
        ground = vecs[:, 0]
    e0 = float(vals[0])
    gap = float(vals[1] - vals[0]) if len(vals) > 1 else math.inf
    return e0, StateVector(ground, h.num_qubits), gap


def neutral_ground_state(params: ModelParams) -> tuple[float, StateVector, float]:
    """Ground state of W within the physical zero-charge sector."""
    return exact_ground_state(cached_hamiltonian(params), total_charge(params))


def phase_offset(energy: float, nu: Sequence[float], n_rounded: Sequence[int]) -> float:
    """Constant phase offset E_min = E − ν·N."""
    return float(energy) - float(np.dot(nu, n_rounded))


def round_particle_numbers(
    measured: Sequence[float], params: ModelParams
) -> tuple[int, ...]:
    """Round to integers, then repair the entry with the largest rounding
    residual until the total matches the charge-neutral value N·F/2."""
    target = params.num_sites * params.num_flavors // 2
    measured = np.asarray(measured, dtype=float)
    rounded = np.rint(measured).astype(int)
    while rounded.sum() != target:
        residual = rounded - measured
        if rounded.sum() > target:
            rounded[int(np.argmax(residual))] -= 1
        else:
            rounded[int(np.argmin(residual))] += 1
    return tuple(int(v) for v in rounded)


def critical_point(p1: PhasePoint, p2: PhasePoint, x: float) -> float:
    """Critical chemical-potential difference between two neighboring phases,
    in κ/g units: [(E₁ − ν₁·N₁) − (E₂ − ν₂·N₂)] / (N0₂ − N0₁) / (2√x)."""
    n1, n2 = p1.rounded_numbers, p2.rounded_numbers
    if n1[0] == n2[0]:
        raise UsageError("phases are degenerate: rounded N0 values coincide")
    e_min_1 = phase_offset(p1.energy, p1.nu, n1)
    e_min_2 = phase_offset(p2.energy, p2.nu, n2)
    nu_crit = (e_min_1 - e_min_2) / (n2[0] - n1[0])
    return nu_crit / (2.0 * math.sqrt(x))


def critical_point_stderr(p1: PhasePoint, p2: PhasePoint, x: float) -> float:
    """Propagated uncertainty of `critical_point` from the energy stderrs."""
    dn = p2.rounded_numbers[0] - p1.rounded_numbers[0]
    return math.sqrt(p1.energy_stderr**2 + p2.energy_stderr**2) / abs(dn) / (2.0 * math.sqrt(x))


def _params_at_k(base: ModelParams, k: float) -> ModelParams:
    nu = (nu_from_kappa(base.x, k),) + (0.0,) * (base.num_flavors - 1)
    return ModelParams(base.num_sites, base.num_flavors, base.x, base.mu, nu)


def _measured_particle_numbers(
    params: ModelParams, theta: AnsatzParams, shots: int, seed: int
) -> tuple[float, ...]:
    """Estimate every N_f from one all-Z measurement of the trial circuit."""
    state = prepare_trial_state(params, theta)
    counts = sample_pauli_basis(state, "Z" * params.num_qubits, shots, seed)
    occ = np.zeros(params.num_qubits)
    for bits, n in counts.outcomes.items():
        for p, b in enumerate(bits):
            if b == "1":
                occ[p] += n
    occ /= shots
    return tuple(
        float(sum(occ[params.qubit(n, f)] for n in range(params.num_sites)))
        for f in range(params.num_flavors)
    )


def scan(
    params: ModelParams,
    k_values: Sequence[float],
    mode: str = "exact",
    spsa_config=None,
    backend=None,
    particle_shots: int = 400,
    seed: int = 0,
    restarts: int = 3,
) -> list[PhasePoint]:
    """Phase-diagram scan over chemical-potential differences K.

    exact mode reads energies and particle numbers from the neutral-sector
    oracle; vqe mode runs the optimizer per point (taking the best of
    `restarts` independently seeded runs, by measured energy) and measures
    particle numbers from an additional all-Z sampling of the optimal
    circuit. Points come back ordered by K.
    """
    from .vqe import Backend, SpsaConfig, spsa_run  # deferred to avoid a cycle

    if not list(k_values):
        raise UsageError("need at least one K value")
    if mode not in ("exact", "vqe"):
        raise UsageError(f"unknown scan mode {mode!r}")

    points = []
    for k in sorted(k_values):
        params_k = _params_at_k(params, k)
        e_exact, ground, _ = neutral_ground_state(params_k)
        if mode == "exact":
            numbers = tuple(
                expectation(ground, particle_number(f, params_k))
                for f in range(params_k.num_flavors)
            )
            energy, stderr = e_exact, 0.0
        else:
            from dataclasses import replace as _replace

            if restarts < 1:
                raise UsageError("need at least one VQE restart per point")
            cfg = spsa_config if spsa_config is not None else SpsaConfig()
            bk = backend if backend is not None else Backend("sampled")
            result = None
            for r in range(restarts):
                cfg_k = _replace(cfg, seed=derive_seed(seed, "scan", k, "restart", r))
                candidate = spsa_run(cfg_k, params_k, bk)
                if result is None or candidate.e_min_measured < result.e_min_measured:
                    result = candidate
            energy = result.e_min_measured
            best = min(result.records, key=lambda r: r.energy_measured)
            stderr = best.stderr
            numbers = _measured_particle_numbers(
                params_k,
                AnsatzParams(result.theta_opt),
                particle_shots,
                derive_seed(seed, "particles", k),
            )
        points.append(
            PhasePoint(
                K=float(k),
                nu=params_k.nu,
                energy=float(energy),
                particle_numbers=tuple(float(v) for v in numbers),
                rounded_numbers=round_particle_numbers(numbers, params_k),
                energy_exact=float(e_exact),
                energy_stderr=float(stderr),
                num_sites=params_k.num_sites,
            )
        )
    return points


def critical_points_from_scan(points: Sequence[PhasePoint], x: float) -> list[dict]:
    """Critical K between each pair of adjacent phases in a scan.

    The scan is segmented into runs of equal rounded N0; for every adjacent
    pair of segments the two points straddling the boundary are fed to
    `critical_point`, and energy stderrs propagate into the estimate.
    """
    if not points:
        return []
    segments: list[list[PhasePoint]] = [[points[0]]]
    for pt in points[1:]:
        if pt.rounded_numbers[0] == segments[-1][-1].rounded_numbers[0]:
            segments[-1].append(pt)
        else:
            segments.append([pt])
    results = []
    for left, right in zip(segments, segments[1:]):
        p1, p2 = left[-1], right[0]
        results.append(
            {
                "K_crit": critical_point(p1, p2, x),
                "K_crit_stderr": critical_point_stderr(p1, p2, x),
                "N0_left": p1.rounded_numbers[0],
                "N0_right": p2.rounded_numbers[0],
                "K_left": p1.K,
                "K_right": p2.K,
            }
        )
    return results
