"""Exact symbolic algebra over tensor products of Pauli operators.

Labels are strings over {I, X, Y, Z} with qubit 0 as the leftmost character.
All values are immutable after construction and all operations are pure
functions, so they are safe to share between threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import ResourceCapError, UsageError

PAULI_LETTERS = "IXYZ"

#: coefficients below this magnitude are dropped during simplification
PRUNE_EPS = 1e-12

#: dense matrices are refused above this register size
MATRIX_QUBIT_CAP = 12

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# single-qubit products a·b = phase·c, keyed by the letter pair
_PRODUCT: dict[str, tuple[complex, str]] = {
    "II": (1, "I"), "IX": (1, "X"), "IY": (1, "Y"), "IZ": (1, "Z"),
    "XI": (1, "X"), "XX": (1, "I"), "XY": (1j, "Z"), "XZ": (-1j, "Y"),
    "YI": (1, "Y"), "YX": (-1j, "Z"), "YY": (1, "I"), "YZ": (1j, "X"),
    "ZI": (1, "Z"), "ZX": (1j, "Y"), "ZY": (-1j, "X"), "ZZ": (1, "I"),
}


def _check_label(label: str) -> None:
    if not label or any(c not in PAULI_LETTERS for c in label):
        raise UsageError(f"invalid Pauli label {label!r}")


@dataclass(frozen=True)
class PauliString:
    """A single weighted Pauli string, e.g. 0.5·XZYI."""

    ops: str
    coefficient: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        _check_label(self.ops)

    @property
    def num_qubits(self) -> int:
        return len(self.ops)

    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(1 for c in self.ops if c != "I")

    def __repr__(self) -> str:
        return f"{self.coefficient}*{self.ops}"


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Product of two Pauli strings: matrix(a)·matrix(b) = matrix(result)."""
    if len(a.ops) != len(b.ops):
        raise UsageError(
            f"length mismatch: {len(a.ops)} vs {len(b.ops)} qubits"
        )
    phase: complex = 1.0
    letters = []
    for ca, cb in zip(a.ops, b.ops):
        p, c = _PRODUCT[ca + cb]
        phase *= p
        letters.append(c)
    return PauliString("".join(letters), a.coefficient * b.coefficient * phase)


class PauliSum:
    """Weighted sum of Pauli strings over a fixed register size.

    Terms are kept in a label → coefficient map. Construction does not
    prune or collect; call :meth:`simplify` (or the module function) to get
    the canonical form with like terms merged and dust below
    ``PRUNE_EPS`` removed.
    """

    __slots__ = ("terms", "num_qubits")

    def __init__(self, num_qubits: int, terms: dict[str, complex] | None = None):
        if num_qubits < 1:
            raise UsageError("num_qubits must be positive")
        self.num_qubits = num_qubits
        self.terms: dict[str, complex] = {}
        if terms:
            for label, coeff in terms.items():
                self.add_term(label, coeff)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, num_qubits: int) -> "PauliSum":
        return cls(num_qubits)

    @classmethod
    def identity(cls, num_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(num_qubits, {"I" * num_qubits: coeff})

    @classmethod
    def from_strings(cls, strings: Iterable[PauliString]) -> "PauliSum":
        strings = list(strings)
        if not strings:
            raise UsageError("cannot infer register size from an empty iterable")
        s = cls(strings[0].num_qubits)
        for ps in strings:
            s.add_term(ps.ops, ps.coefficient)
        return s

    @classmethod
    def single(cls, num_qubits: int, qubit: int, letter: str, coeff: complex = 1.0) -> "PauliSum":
        """A one-letter string embedded in an identity background."""
        if not 0 <= qubit < num_qubits:
            raise UsageError(f"qubit {qubit} out of range for {num_qubits} qubits")
        label = "I" * qubit + letter + "I" * (num_qubits - qubit - 1)
        return cls(num_qubits, {label: coeff})

    def add_term(self, label: str, coeff: complex) -> None:
        _check_label(label)
        if len(label) != self.num_qubits:
            raise UsageError(
                f"label {label!r} does not match register size {self.num_qubits}"
            )
        self.terms[label] = self.terms.get(label, 0.0) + complex(coeff)

    # -- algebra ---------------------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.num_qubits != other.num_qubits:
            raise UsageError("register size mismatch in addition")
        out = PauliSum(self.num_qubits, dict(self.terms))
        for label, coeff in other.terms.items():
            out.add_term(label, coeff)
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (other * -1.0)

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(
            self.num_qubits, {l: c * scalar for l, c in self.terms.items()}
        )

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, expanded term by term via `multiply`."""
        if self.num_qubits != other.num_qubits:
            raise UsageError("register size mismatch in product")
        out = PauliSum(self.num_qubits)
        for la, ca in self.terms.items():
            for lb, cb in other.terms.items():
                ps = multiply(PauliString(la, ca), PauliString(lb, cb))
                out.add_term(ps.ops, ps.coefficient)
        return out

    def adjoint(self) -> "PauliSum":
        return PauliSum(
            self.num_qubits, {l: c.conjugate() for l, c in self.terms.items()}
        )

    def simplify(self, eps: float = PRUNE_EPS) -> "PauliSum":
        """Collect like terms, drop dust below `eps`, prune imaginary dust."""
        out = PauliSum(self.num_qubits)
        for label, coeff in self.terms.items():
            c = complex(coeff)
            if abs(c.real) < eps:
                c = complex(0.0, c.imag)
            if abs(c.imag) < eps:
                c = complex(c.real, 0.0)
            if abs(c) < eps:
                continue
            out.terms[label] = c
        return out

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self.simplify().terms.values())

    def identity_coefficient(self) -> complex:
        return self.terms.get("I" * self.num_qubits, 0.0 + 0.0j)

    def labels(self) -> list[str]:
        return sorted(self.terms)

    def non_identity_labels(self) -> list[str]:
        ident = "I" * self.num_qubits
        return sorted(l for l in self.terms if l != ident)

    def __iter__(self) -> Iterator[PauliString]:
        for label in sorted(self.terms):
            yield PauliString(label, self.terms[label])

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*{l}" for l, c in sorted(self.terms.items()))
        return f"PauliSum({self.num_qubits}q: {body or '0'})"


def simplify(s: PauliSum, eps: float = PRUNE_EPS) -> PauliSum:
    return s.simplify(eps)


def to_matrix(s: PauliSum, qubit_cap: int = MATRIX_QUBIT_CAP) -> np.ndarray:
    """Dense 2^q × 2^q matrix of the sum. Refuses registers above `qubit_cap`."""
    q = s.num_qubits
    if q > qubit_cap:
        raise ResourceCapError(
            f"{q} qubits exceeds the dense-matrix cap of {qubit_cap}"
        )
    dim = 2**q
    out = np.zeros((dim, dim), dtype=complex)
    for label, coeff in s.terms.items():
        m = np.array([[coeff]], dtype=complex)
        for c in label:
            m = np.kron(m, _MATRICES[c])
        out += m
    return out


def string_matrix(label: str) -> np.ndarray:
    """Dense matrix of a single unit-coefficient Pauli string."""
    return to_matrix(PauliSum(len(label), {label: 1.0}))


class MeasurementGroup(NamedTuple):
    """A qubit-wise commuting group and the single basis that measures it."""

    basis: str
    members: tuple[str, ...]


def _qubitwise_compatible(label: str, basis: str) -> bool:
    return all(a == "I" or b == "I" or a == b for a, b in zip(label, basis))


def _join(label: str, basis: str) -> str:
    return "".join(b if a == "I" else a for a, b in zip(label, basis))


def qubitwise_commuting_groups(labels: Iterable[str]) -> list[MeasurementGroup]:
    """Partition labels into qubit-wise commuting groups.

    Greedy first-fit over labels sorted by descending non-identity weight
    (ties broken by descending label order), scanning existing groups in
    creation order. Every input label lands in exactly one group, and each
    group's basis is the position-wise join of its members.
    """
    labels = list(labels)
    if not labels:
        return []
    size = len(labels[0])
    for label in labels:
        _check_label(label)
        if len(label) != size:
            raise UsageError("labels must share one register size")

    def sort_key(label: str) -> tuple[int, str]:
        return (sum(1 for c in label if c != "I"), label)

    ordered = sorted(set(labels), key=sort_key, reverse=True)
    bases: list[str] = []
    groups: list[list[str]] = []
    for label in ordered:
        for i, basis in enumerate(bases):
            if _qubitwise_compatible(label, basis):
                bases[i] = _join(label, basis)
                groups[i].append(label)
                break
        else:
            bases.append(label)
            groups.append([label])
    return [MeasurementGroup(b, tuple(g)) for b, g in zip(bases, groups)]


# -- textual format -----------------------------------------------------------
#
# One term per line: "<complex coeff> <label>". Coefficients are written with
# Python's shortest round-trip repr, so emit → parse → emit is byte-identical.
# Lines starting with '#' are comments and are skipped on parse.


def to_text(s: PauliSum) -> str:
    lines = [f"{complex(s.terms[label])!r} {label}" for label in sorted(s.terms)]
    return "\n".join(lines) + ("\n" if lines else "")


def from_text(text: str, num_qubits: int | None = None) -> PauliSum:
    terms: dict[str, complex] = {}
    size = num_qubits
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            coeff_str, label = line.split()
            coeff = complex(coeff_str)
        except ValueError as exc:
            raise UsageError(f"bad Pauli-sum line {lineno}: {raw!r}") from exc
        _check_label(label)
        if size is None:
            size = len(label)
        elif len(label) != size:
            raise UsageError(f"label size mismatch on line {lineno}")
        terms[label] = terms.get(label, 0.0) + coeff
    if size is None:
        raise UsageError("empty Pauli-sum text requires an explicit num_qubits")
    return PauliSum(size, terms)
