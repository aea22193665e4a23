"""SPSA-driven variational loop with grouped, shot-sampled energy estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .ansatz import AnsatzParams, build_ansatz_circuit, decompose_to_native, prepare_trial_state
from .errors import UsageError
from .model import ModelParams, cached_hamiltonian
from .pauli import MeasurementGroup, qubitwise_commuting_groups
from .rng import derive_seed, make_rng
from .simulator import (
    Counts,
    NoiseModel,
    expectation,
    run_noisy,
    sample_density_pauli_basis,
    sample_pauli_basis,
)

#: fallback step size when calibration sees a flat landscape
FALLBACK_A0 = 0.1

#: target first-update magnitude per parameter, in radians
CALIBRATION_TARGET_STEP = 0.1


@dataclass(frozen=True)
class Backend:
    """Energy-evaluation backend: exact expectations, shot sampling, or
    shot sampling from the noisy-circuit density matrix."""

    kind: str = "exact"
    noise: NoiseModel | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("exact", "sampled", "noisy"):
            raise UsageError(f"unknown backend kind {self.kind!r}")
        if self.kind == "noisy" and self.noise is None:
            raise UsageError("noisy backend needs a NoiseModel")


@dataclass(frozen=True)
class SpsaConfig:
    iterations: int = 150
    c0: float = 0.1
    a0: float | None = None  # None -> calibrate from probe evaluations
    alpha: float = 0.602
    gamma: float = 0.101
    stability: float | None = None  # SPSA constant A; None -> iterations/10
    gradient_resamplings: int = 3
    gradient_mode: str = "pairs"  # "pairs" | "one_sided"
    eval_shots: int = 100
    calibration_probes: int = 20
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise UsageError("iterations must be non-negative")
        if self.c0 <= 0:
            raise UsageError("perturbation c0 must be positive")
        if self.gradient_resamplings < 1:
            raise UsageError("need at least one gradient resampling")
        if self.gradient_mode not in ("pairs", "one_sided"):
            raise UsageError(f"unknown gradient mode {self.gradient_mode!r}")
        if self.eval_shots < 1:
            raise UsageError("eval_shots must be positive")

    @property
    def A(self) -> float:
        return self.iterations / 10.0 if self.stability is None else self.stability


def paper_faithful_config(**overrides) -> SpsaConfig:
    """Preset with three one-sided probe vectors plus the recorded evaluation
    (four parameter vectors, i.e. 4 × 5 group measurements per iteration)."""
    base = dict(gradient_resamplings=3, gradient_mode="one_sided")
    base.update(overrides)
    return SpsaConfig(**base)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    theta: tuple[float, ...]
    energy_measured: float
    energy_simulated: float
    stderr: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.energy_measured) and math.isfinite(self.energy_simulated)):
            raise UsageError("non-finite energy in iteration record")


class ConvergenceStats(NamedTuple):
    delta_w: float
    spread_w: float
    delta_w_sim: float
    spread_w_sim: float


@dataclass(frozen=True)
class VqeResult:
    records: tuple[IterationRecord, ...]
    theta_opt: tuple[float, ...]
    e_min_measured: float
    e_min_simulated: float
    stats: ConvergenceStats
    e_exact: float


class _EnergyEstimator:
    """Caches the Hamiltonian, measurement groups, and noisy-circuit plumbing
    for one (params, backend) pair."""

    def __init__(self, params: ModelParams, backend: Backend):
        self.params = params
        self.backend = backend
        self.hamiltonian = cached_hamiltonian(params)
        self.identity = self.hamiltonian.identity_coefficient().real
        labels = self.hamiltonian.non_identity_labels()
        self.groups: tuple[MeasurementGroup, ...] = tuple(qubitwise_commuting_groups(labels))
        self.coeffs = {l: self.hamiltonian.terms[l].real for l in labels}

    def _group_values(self, counts: Counts, group: MeasurementGroup) -> tuple[float, float]:
        """Mean and standard error of the group's summed contribution."""
        values = []
        weights = []
        for bits, n in counts.outcomes.items():
            v = 0.0
            for label in group.members:
                sign = 1.0
                for p, c in enumerate(label):
                    if c != "I" and bits[p] == "1":
                        sign = -sign
                v += self.coeffs[label] * sign
            values.append(v)
            weights.append(n)
        values = np.asarray(values)
        weights = np.asarray(weights, dtype=float)
        shots = weights.sum()
        mean = float(np.sum(weights * values) / shots)
        if shots < 2:
            return mean, 0.0
        var = float(np.sum(weights * (values - mean) ** 2) / (shots - 1))
        return mean, math.sqrt(var / shots)

    def estimate(self, theta: AnsatzParams, shots: int, seed: int) -> tuple[float, float]:
        if self.backend.kind == "exact":
            state = prepare_trial_state(self.params, theta)
            return expectation(state, self.hamiltonian), 0.0

        if self.backend.kind == "sampled":
            state = prepare_trial_state(self.params, theta)
            energy = self.identity
            var_total = 0.0
            for group in self.groups:
                counts = sample_pauli_basis(
                    state, group.basis, shots, derive_seed(seed, "group", group.basis)
                )
                mean, err = self._group_values(counts, group)
                energy += mean
                var_total += err**2
            return energy, math.sqrt(var_total)

        # noisy: exact-density propagation of the native circuit, then sampling
        noise = self.backend.noise
        circuit = decompose_to_native(build_ansatz_circuit(self.params, theta))
        rho = run_noisy(
            circuit.gates, noise, self.params.num_qubits, mode="exact",
            apply_readout_flips=False,
        )
        energy = self.identity
        var_total = 0.0
        for group in self.groups:
            counts = sample_density_pauli_basis(
                rho, group.basis, shots, derive_seed(seed, "group", group.basis),
                p_readout=noise.p_spam,
            )
            mean, err = self._group_values(counts, group)
            energy += mean
            var_total += err**2
        return energy, math.sqrt(var_total)

    def estimate_ungrouped(self, theta: AnsatzParams, shots: int, seed: int) -> tuple[float, float]:
        """Measure every Hamiltonian string in its own basis (no grouping);
        used to check that grouping is unbiased."""
        state = prepare_trial_state(self.params, theta)
        energy = self.identity
        var_total = 0.0
        for label in sorted(self.coeffs):
            counts = sample_pauli_basis(
                state, label, shots, derive_seed(seed, "single", label)
            )
            mean, err = self._group_values(counts, MeasurementGroup(label, (label,)))
            energy += mean
            var_total += err**2
        return energy, math.sqrt(var_total)


@lru_cache(maxsize=16)
def _estimator(params: ModelParams, backend: Backend) -> _EnergyEstimator:
    return _EnergyEstimator(params, backend)


def estimate_energy(
    theta: AnsatzParams,
    params: ModelParams,
    shots: int,
    backend: Backend,
    seed: int = 0,
) -> tuple[float, float]:
    """Grouped energy estimate ⟨W⟩ and its propagated shot-noise stderr."""
    if backend.kind != "exact" and shots < 1:
        raise UsageError("sampled backends need shots >= 1")
    return _estimator(params, backend).estimate(theta, shots, seed)


def exact_reference_energy(params: ModelParams) -> float:
    """Neutral-sector ground energy used for convergence statistics."""
    from .phase import neutral_ground_state  # local import to avoid a cycle

    e0, _, _ = neutral_ground_state(params)
    return e0


def spsa_calibrate(
    energy_fn: Callable[[np.ndarray, int], float],
    theta0: np.ndarray,
    c0: float,
    probes: int,
    seed: int = 0,
    target_step: float = CALIBRATION_TARGET_STEP,
) -> float:
    """Probe the landscape around theta0 and pick a0 so that the first SPSA
    update moves each parameter by about `target_step` radians.

    The gradient magnitude per parameter is ~ mean|ΔE|/(2 c0), so
    a0 = target_step · 2 c0 / mean|ΔE|. A flat landscape falls back to a
    documented constant.
    """
    if probes < 10:
        raise UsageError("need at least 10 calibration probes")
    rng = make_rng(derive_seed(seed, "calibrate"))
    diffs = []
    for i in range(probes):
        delta = rng.integers(0, 2, size=len(theta0)) * 2 - 1
        e_plus = energy_fn(theta0 + c0 * delta, derive_seed(seed, "cal", i, "+"))
        e_minus = energy_fn(theta0 - c0 * delta, derive_seed(seed, "cal", i, "-"))
        diffs.append(abs(e_plus - e_minus))
    mean_diff = float(np.mean(diffs))
    if mean_diff <= 0.0:
        return FALLBACK_A0
    return target_step * 2.0 * c0 / mean_diff


def spsa_minimize(
    energy_fn: Callable[[np.ndarray, int], float],
    theta0: np.ndarray,
    config: SpsaConfig,
) -> list[tuple[np.ndarray, float]]:
    """Generic SPSA core; returns the evaluated (theta, energy) trajectory,
    one entry for the start plus one per iteration."""
    theta = np.asarray(theta0, dtype=float).copy()
    seed = config.seed
    a0 = config.a0
    if a0 is None:
        a0 = spsa_calibrate(
            energy_fn, theta, config.c0, config.calibration_probes, seed=seed
        ) * (1.0 + config.A) ** config.alpha

    trajectory = [(theta.copy(), energy_fn(theta, derive_seed(seed, "record", 0)))]
    for k in range(config.iterations):
        a_k = a0 / (k + 1 + config.A) ** config.alpha
        c_k = config.c0 / (k + 1) ** config.gamma
        grad = np.zeros_like(theta)
        rng = make_rng(derive_seed(seed, "delta", k))
        for j in range(config.gradient_resamplings):
            delta = rng.integers(0, 2, size=len(theta)) * 2 - 1
            if config.gradient_mode == "pairs":
                e_plus = energy_fn(theta + c_k * delta, derive_seed(seed, "eval", k, j, "+"))
                e_minus = energy_fn(theta - c_k * delta, derive_seed(seed, "eval", k, j, "-"))
                grad += (e_plus - e_minus) / (2.0 * c_k) * delta
            else:
                e_base = trajectory[-1][1]
                e_probe = energy_fn(theta + c_k * delta, derive_seed(seed, "eval", k, j, "+"))
                grad += (e_probe - e_base) / c_k * delta
        grad /= config.gradient_resamplings
        theta = theta - a_k * grad
        trajectory.append((theta.copy(), energy_fn(theta, derive_seed(seed, "record", k + 1))))
    return trajectory


def spsa_run(config: SpsaConfig, params: ModelParams, backend: Backend) -> VqeResult:
    """Full VQE loop; every iteration records the measured energy, the exact
    expectation at the same angles, and the propagated shot-noise stderr."""
    est = _estimator(params, backend)
    exact_backend = _estimator(params, Backend("exact"))
    n_par = AnsatzParams.num_parameters(params.num_qubits)
    rng = make_rng(derive_seed(config.seed, "theta0"))
    theta0 = rng.uniform(0.0, 2.0 * math.pi, size=n_par)

    stderr_log: dict[tuple[float, ...], float] = {}

    def energy_fn(theta_vec: np.ndarray, seed: int) -> float:
        e, err = est.estimate(AnsatzParams(tuple(theta_vec)), config.eval_shots, seed)
        stderr_log[tuple(theta_vec)] = err
        return e

    trajectory = spsa_minimize(energy_fn, theta0, config)
    records = []
    for k, (theta_vec, e_meas) in enumerate(trajectory):
        theta = AnsatzParams(tuple(theta_vec))
        e_sim, _ = exact_backend.estimate(theta, 1, 0)
        records.append(
            IterationRecord(k, tuple(theta_vec), e_meas, e_sim, stderr_log[tuple(theta_vec)])
        )

    e_exact = exact_reference_energy(params)
    if len(records) >= 2:
        stats = convergence_stats(records, e_exact)
    else:
        # a zero-iteration run echoes the initial evaluation; spreads degenerate
        only = records[0]
        stats = ConvergenceStats(
            only.energy_measured - e_exact, 0.0, only.energy_simulated - e_exact, 0.0
        )
    best = min(records, key=lambda r: r.energy_measured)
    return VqeResult(
        records=tuple(records),
        theta_opt=best.theta,
        e_min_measured=best.energy_measured,
        e_min_simulated=min(r.energy_simulated for r in records),
        stats=stats,
        e_exact=e_exact,
    )


def convergence_stats(
    records: Sequence[IterationRecord],
    exact_energy: float,
    window_fraction: float = 0.25,
) -> ConvergenceStats:
    """Trailing-window offsets (mean − exact) and spreads (sample stddev)."""
    if not 0.0 < window_fraction <= 1.0:
        raise UsageError("window_fraction must lie in (0, 1]")
    n_window = max(2, round(window_fraction * len(records)))
    window = list(records)[-n_window:]
    if len(window) < 2:
        raise UsageError("need at least two records in the convergence window")
    measured = np.array([r.energy_measured for r in window])
    simulated = np.array([r.energy_simulated for r in window])
    return ConvergenceStats(
        delta_w=float(measured.mean() - exact_energy),
        spread_w=float(measured.std(ddof=1)),
        delta_w_sim=float(simulated.mean() - exact_energy),
        spread_w_sim=float(simulated.std(ddof=1)),
    )


def mean_window_stderr(records: Sequence[IterationRecord], window_fraction: float = 0.25) -> float:
    n_window = max(2, round(window_fraction * len(records)))
    return float(np.mean([r.stderr for r in list(records)[-n_window:]]))
