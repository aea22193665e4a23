"""Spin Hamiltonian of the multi-flavor lattice Schwinger model.

Conventions fixed here and used everywhere else:

* Qubit layout: site n, flavor f maps to qubit p = n·F + f.
* Occupation: basis label '1' means occupied, i.e. n̂ = (I − Z)/2 with
  Z|0⟩ = +|0⟩. With this choice |0101⟩ is the charge-neutral four-qubit
  initial state.
* Open chain with zero incoming electric flux, so the field on link n is
  the cumulative staggered charge Σ_{k≤n} Q_k.

The hopping term is expanded symbolically from raising/lowering operators
with the intervening Z string; no hand-derived coefficient table is used.
For two flavors this produces the mixed-letter strings XZYI, YZXI, IXZY,
IYZX (one Y per string) alongside the diagonal Z terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import UsageError
from .pauli import PauliSum

HAMILTONIAN_PRUNE_EPS = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless couplings of an N-site, F-flavor lattice."""

    num_sites: int
    num_flavors: int
    x: float
    mu: tuple[float, ...]
    nu: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.num_sites < 2:
            raise UsageError("need at least two lattice sites")
        if self.num_flavors < 1:
            raise UsageError("need at least one flavor")
        if self.x < 0:
            raise UsageError("x must be non-negative")
        if len(self.mu) != self.num_flavors or len(self.nu) != self.num_flavors:
            raise UsageError("mu and nu must have one entry per flavor")
        object.__setattr__(self, "mu", tuple(float(v) for v in self.mu))
        object.__setattr__(self, "nu", tuple(float(v) for v in self.nu))

    @property
    def num_qubits(self) -> int:
        return self.num_sites * self.num_flavors

    def qubit(self, n: int, f: int) -> int:
        if not 0 <= n < self.num_sites:
            raise UsageError(f"site {n} out of range")
        return qubit_index(n, f, self.num_flavors)


def qubit_index(n: int, f: int, num_flavors: int) -> int:
    """Flat qubit index p = n·F + f of site n, flavor f."""
    if n < 0:
        raise UsageError(f"site {n} out of range")
    if not 0 <= f < num_flavors:
        raise UsageError(f"flavor {f} out of range for {num_flavors} flavors")
    return n * num_flavors + f


def nu_from_kappa(x: float, kappa_over_g: float) -> float:
    """ν = 2√x · κ/g."""
    return 2.0 * math.sqrt(x) * kappa_over_g


@dataclass(frozen=True)
class ChemicalPotentialPoint:
    """A chemical-potential setting given in κ/g units, with derived ν."""

    x: float
    kappa_over_g: tuple[float, ...]

    @property
    def nu(self) -> tuple[float, ...]:
        return tuple(nu_from_kappa(self.x, k) for k in self.kappa_over_g)

    @property
    def K(self) -> float:
        """Difference κ0/g − κ1/g driving the two-flavor transitions."""
        if len(self.kappa_over_g) < 2:
            raise UsageError("K requires at least two flavors")
        return self.kappa_over_g[0] - self.kappa_over_g[1]


def from_couplings(
    num_sites: int,
    num_flavors: int,
    x: float,
    m_over_g: tuple[float, ...],
    kappa_over_g: tuple[float, ...],
) -> ModelParams:
    """Build ModelParams from raw coupling ratios: μ = 2√x·m/g, ν = 2√x·κ/g."""
    if x < 0:
        raise UsageError("x must be non-negative")
    mu = tuple(2.0 * math.sqrt(x) * m for m in m_over_g)
    nu = tuple(2.0 * math.sqrt(x) * k for k in kappa_over_g)
    return ModelParams(num_sites, num_flavors, x, mu, nu)


def occupation(p: int, num_qubits: int) -> PauliSum:
    """Occupation-number operator n̂_p = (I − Z_p)/2."""
    s = PauliSum.identity(num_qubits, 0.5)
    return s + PauliSum.single(num_qubits, p, "Z", -0.5)


def staggered_charge(n: int, params: ModelParams) -> PauliSum:
    """Q_n = Σ_f n̂_{n,f} − (F/2)(1 − (−1)^n)."""
    if not 0 <= n < params.num_sites:
        raise UsageError(f"site {n} out of range")
    q = params.num_qubits
    s = PauliSum.zero(q)
    for f in range(params.num_flavors):
        s = s + occupation(params.qubit(n, f), q)
    offset = -(params.num_flavors / 2.0) * (1 - (-1) ** n)
    s = s + PauliSum.identity(q, offset)
    return s.simplify()


def total_charge(params: ModelParams) -> PauliSum:
    s = PauliSum.zero(params.num_qubits)
    for n in range(params.num_sites):
        s = s + staggered_charge(n, params)
    return s.simplify()


def electric_field(n: int, params: ModelParams) -> PauliSum:
    """Field on link n for zero incoming flux: L_n = Σ_{k≤n} Q_k."""
    if not 0 <= n < params.num_sites - 1:
        raise UsageError(f"link {n} out of range")
    s = PauliSum.zero(params.num_qubits)
    for k in range(n + 1):
        s = s + staggered_charge(k, params)
    return s.simplify()


def particle_number(f: int, params: ModelParams) -> PauliSum:
    """N_f = Σ_n n̂_{n,f}; diagonal with eigenvalues 0…N."""
    if not 0 <= f < params.num_flavors:
        raise UsageError(f"flavor {f} out of range")
    q = params.num_qubits
    s = PauliSum.zero(q)
    for n in range(params.num_sites):
        s = s + occupation(params.qubit(n, f), q)
    return s.simplify()


def _ladder(p: int, num_qubits: int, sign: int) -> PauliSum:
    """σ± at qubit p: (X ± iY)/2. sign=+1 lowers occupation, −1 raises."""
    s = PauliSum.single(num_qubits, p, "X", 0.5)
    return s + PauliSum.single(num_qubits, p, "Y", sign * 0.5j)


def _hopping_term(params: ModelParams, n: int, f: int) -> PauliSum:
    """Jordan-Wigner image of φ†_{n,f} φ_{n+1,f} (creation on the left site)."""
    q = params.num_qubits
    p, p2 = params.qubit(n, f), params.qubit(n + 1, f)
    # creation at p is σ− = (X − iY)/2 in the '1'-is-occupied convention;
    # the Z string between p and p2 survives after the JW tails cancel
    term = _ladder(p, q, -1)
    for mid in range(p + 1, p2):
        term = term @ PauliSum.single(q, mid, "Z")
    return term @ _ladder(p2, q, +1)


def build_hamiltonian(params: ModelParams) -> PauliSum:
    """Dimensionless Hamiltonian W: hopping + mass/chemical + electric energy."""
    q = params.num_qubits
    w = PauliSum.zero(q)

    # hopping: −ix Σ (φ†_{n,f} φ_{n+1,f} − h.c.)
    for n in range(params.num_sites - 1):
        for f in range(params.num_flavors):
            hop = _hopping_term(params, n, f)
            w = w + (hop - hop.adjoint()) * (-1j * params.x)

    # mass and chemical potential: Σ (μ_f(−1)^n + ν_f) n̂_{n,f}
    for n in range(params.num_sites):
        for f in range(params.num_flavors):
            coeff = params.mu[f] * (-1) ** n + params.nu[f]
            if coeff != 0.0:
                w = w + occupation(params.qubit(n, f), q) * coeff

    # electric energy: Σ_n (Σ_{k≤n} Q_k)², identity offset retained
    cumulative = PauliSum.zero(q)
    for n in range(params.num_sites - 1):
        cumulative = cumulative + staggered_charge(n, params)
        w = w + cumulative @ cumulative

    w = w.simplify(HAMILTONIAN_PRUNE_EPS)
    if not w.is_hermitian():
        raise AssertionError("hamiltonian expansion produced non-real coefficients")
    return w


@lru_cache(maxsize=32)
def cached_hamiltonian(params: ModelParams) -> PauliSum:
    """Memoized build for hot loops; ModelParams is hashable and frozen."""
    return build_hamiltonian(params)
