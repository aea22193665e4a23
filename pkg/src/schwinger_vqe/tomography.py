"""Full Pauli-basis state tomography, physical projection, fidelity, QMI,
and parametric-bootstrap uncertainties."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import UsageError
from .pauli import string_matrix
from .rng import derive_seed
from .simulator import (
    Counts,
    DensityMatrix,
    StateVector,
    apply_pauli_string,
    counts_expectation,
    sample_density_pauli_basis,
    sample_pauli_basis,
)

EIGENVALUE_FLOOR = 1e-12


def all_full_bases(num_qubits: int) -> list[str]:
    """The 3^q Pauli product bases without identity letters, sorted."""
    return ["".join(p) for p in itertools.product("XYZ", repeat=num_qubits)]


@dataclass(frozen=True)
class TomographyDataset:
    """Counts for every full-weight Pauli basis, uniform shots per basis."""

    num_qubits: int
    shots: int
    seed: int
    counts: dict[str, Counts]

    def __post_init__(self) -> None:
        expected = all_full_bases(self.num_qubits)
        if sorted(self.counts) != expected:
            raise UsageError(
                f"dataset must contain exactly the {len(expected)} full bases"
            )
        for c in self.counts.values():
            if c.shots != self.shots:
                raise UsageError("per-basis shot counts must be uniform")

    def to_json_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "shots_per_basis": self.shots,
            "seed": self.seed,
            "bases": {b: self.counts[b].to_json_dict() for b in sorted(self.counts)},
        }


@dataclass(frozen=True)
class Bipartition:
    """Subset A of qubit indices versus its complement."""

    subset_a: tuple[int, ...]
    num_qubits: int

    def __post_init__(self) -> None:
        a = tuple(sorted(set(self.subset_a)))
        object.__setattr__(self, "subset_a", a)
        if not a or len(a) >= self.num_qubits:
            raise UsageError("bipartition subset must be nonempty and proper")
        if any(not 0 <= q < self.num_qubits for q in a):
            raise UsageError("bipartition qubit out of range")

    @property
    def subset_b(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.num_qubits) if q not in self.subset_a)

    @property
    def label(self) -> str:
        return "".join(str(q) for q in self.subset_a) + "|" + "".join(
            str(q) for q in self.subset_b
        )


def two_by_two_bipartitions(num_qubits: int = 4) -> list[Bipartition]:
    """The three balanced bipartitions of four qubits: (01|23), (02|13), (03|12)."""
    if num_qubits != 4:
        raise UsageError("balanced two-by-two bipartitions are defined for 4 qubits")
    return [Bipartition((0, k), 4) for k in (1, 2, 3)]


def tomography_measure(
    source: StateVector | DensityMatrix,
    shots: int,
    seed: int,
    p_readout: float = 0.0,
) -> TomographyDataset:
    """Sample every full Pauli basis independently with derived seeds."""
    if shots < 1:
        raise UsageError("shots must be positive")
    q = source.num_qubits
    counts: dict[str, Counts] = {}
    for basis in all_full_bases(q):
        basis_seed = derive_seed(seed, "tomo", basis)
        if isinstance(source, StateVector) and p_readout == 0.0:
            counts[basis] = sample_pauli_basis(source, basis, shots, basis_seed)
        else:
            rho = (
                source
                if isinstance(source, DensityMatrix)
                else DensityMatrix(source.projector(), q)
            )
            counts[basis] = sample_density_pauli_basis(
                rho, basis, shots, basis_seed, p_readout=p_readout
            )
    return TomographyDataset(q, shots, seed, counts)


def pauli_expectations(dataset: TomographyDataset) -> dict[str, float]:
    """Estimate ⟨P⟩ for every Pauli label, identities by marginalization.

    A weight-w label is contained in 3^(q−w) full bases; the estimate
    averages over all of them.
    """
    q = dataset.num_qubits
    sums: dict[str, float] = {}
    hits: dict[str, int] = {}
    positions = list(range(q))
    for basis, counts in dataset.counts.items():
        for mask in itertools.product((0, 1), repeat=q):
            label = "".join(basis[p] if mask[p] else "I" for p in positions)
            sums[label] = sums.get(label, 0.0) + counts_expectation(counts, label)
            hits[label] = hits.get(label, 0) + 1
    return {label: sums[label] / hits[label] for label in sums}


@lru_cache(maxsize=4)
def _pauli_matrix_table(num_qubits: int) -> dict[str, np.ndarray]:
    labels = ["".join(p) for p in itertools.product("IXYZ", repeat=num_qubits)]
    return {l: string_matrix(l) for l in labels}


def _assemble(expectations: dict[str, float], num_qubits: int) -> np.ndarray:
    table = _pauli_matrix_table(num_qubits)
    dim = 2**num_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    for label, value in expectations.items():
        rho += value * table[label]
    return rho / dim


def linear_inversion(dataset: TomographyDataset) -> np.ndarray:
    """Hermitian, trace-one (generally non-PSD) estimate
    ρ = 2^−q Σ_P ⟨P⟩ P from empirical Pauli expectations."""
    return _assemble(pauli_expectations(dataset), dataset.num_qubits)


def exact_pauli_expectations(source: StateVector | DensityMatrix) -> dict[str, float]:
    """Infinite-statistics moments, for the exact-probability mode."""
    q = source.num_qubits
    labels = ["".join(p) for p in itertools.product("IXYZ", repeat=q)]
    out = {}
    if isinstance(source, StateVector):
        for label in labels:
            shifted = apply_pauli_string(source, label)
            out[label] = float(np.vdot(source.amplitudes, shifted.amplitudes).real)
    else:
        table = _pauli_matrix_table(q)
        for label in labels:
            out[label] = float(np.trace(source.matrix @ table[label]).real)
    return out


def linear_inversion_exact(source: StateVector | DensityMatrix) -> np.ndarray:
    return _assemble(exact_pauli_expectations(source), source.num_qubits)


def project_to_physical(hermitian: np.ndarray) -> DensityMatrix:
    """Nearest physical state by eigenvalue clipping: negative eigenvalues are
    zeroed and their mass is redistributed uniformly over the remaining
    positive ones, iterating until the spectrum is nonnegative."""
    h = np.asarray(hermitian, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) > 1e-9:
        raise UsageError("physical projection expects a Hermitian matrix")
    vals, vecs = np.linalg.eigh(h)
    vals = vals.astype(float).copy()
    while (vals < -EIGENVALUE_FLOOR).any():
        negative = vals < 0.0
        mass = vals[negative].sum()
        vals[negative] = 0.0
        positive = vals > 0.0
        vals[positive] += mass / positive.sum()
    vals = np.clip(vals, 0.0, None)
    vals /= vals.sum()
    rho = (vecs * vals) @ vecs.conj().T
    n = int(round(math.log2(h.shape[0])))
    return DensityMatrix(rho, n)


def fidelity(rho: DensityMatrix | np.ndarray, psi: StateVector) -> float:
    """Pure-state overlap ⟨ψ|ρ|ψ⟩."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if m.shape[0] != len(psi.amplitudes):
        raise UsageError("dimension mismatch in fidelity")
    value = complex(np.vdot(psi.amplitudes, m @ psi.amplitudes))
    if abs(value.imag) > 1e-9:
        raise UsageError("fidelity came out non-real; rho is not Hermitian")
    return float(value.real)


def partial_trace(matrix: np.ndarray, keep: Sequence[int], num_qubits: int) -> np.ndarray:
    """Reduced density matrix over the `keep` qubits (sorted order)."""
    keep = sorted(keep)
    t = matrix.reshape([2] * (2 * num_qubits))
    traced = [q for q in range(num_qubits) if q not in keep]
    current = list(range(num_qubits))
    for q in traced:
        pos = current.index(q)
        t = np.trace(t, axis1=pos, axis2=pos + len(current))
        current.remove(q)
    dim = 2 ** len(keep)
    return t.reshape(dim, dim)


def von_neumann_entropy(matrix: np.ndarray) -> float:
    """Entropy in bits; eigenvalues below the floor contribute zero."""
    vals = np.linalg.eigvalsh(matrix)
    vals = vals[vals > EIGENVALUE_FLOOR]
    return float(-np.sum(vals * np.log2(vals)))


def qmi(rho: DensityMatrix, part: Bipartition) -> float:
    """Quantum mutual information S_A + S_B − S_AB in bits."""
    if part.num_qubits != rho.num_qubits:
        raise UsageError("bipartition register size mismatch")
    s_a = von_neumann_entropy(partial_trace(rho.matrix, part.subset_a, rho.num_qubits))
    s_b = von_neumann_entropy(partial_trace(rho.matrix, part.subset_b, rho.num_qubits))
    s_ab = von_neumann_entropy(rho.matrix)
    return s_a + s_b - s_ab


def reconstruct(dataset: TomographyDataset) -> DensityMatrix:
    """Linear inversion followed by the physical projection."""
    return project_to_physical(linear_inversion(dataset))


def magnitude_table(rho: DensityMatrix) -> tuple[list[str], list[list[float]]]:
    """Absolute values |ρ_ij| with basis-state labels |0…0⟩ … |1…1⟩
    (q0 as the most significant bit), for bar-grid style plots."""
    q = rho.num_qubits
    labels = [format(i, f"0{q}b") for i in range(2**q)]
    rows = [[float(abs(v)) for v in row] for row in rho.matrix]
    return labels, rows


def bootstrap(
    rho: DensityMatrix,
    metric: Callable[[DensityMatrix], float],
    resamples: int = 200,
    shots: int = 400,
    seed: int = 0,
) -> tuple[float, float]:
    """Parametric bootstrap: resample synthetic datasets from ρ, reconstruct,
    and evaluate the metric; returns (mean, sample stddev)."""
    if resamples < 2:
        raise UsageError("need at least two bootstrap resamples")
    values = []
    for r in range(resamples):
        ds = tomography_measure(rho, shots, derive_seed(seed, "bootstrap", r))
        values.append(metric(reconstruct(ds)))
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std(ddof=1))
