"""Spin-model and transmon-resonator Hamiltonians.

Spin models are built as weighted Pauli strings and materialized dense.
The device model is two (or more) multilevel transmons coupled to a common
resonator mode without the rotating-wave approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import HilbertSpace, elementary, embed, kron_all

TWO_PI = 2.0 * math.pi

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class PauliString:
    """coefficient * product of single-site Paulis; factors maps site -> axis."""

    coefficient: float
    factors: tuple[tuple[int, str], ...]

    def __init__(self, coefficient: float, factors) -> None:
        if not math.isfinite(coefficient):
            raise ValueError("coefficient must be finite")
        items = tuple(sorted(dict(factors).items()))
        for site, axis in items:
            if site < 0 or axis not in _AXES:
                raise ValueError(f"bad factor ({site}, {axis})")
        object.__setattr__(self, "coefficient", float(coefficient))
        object.__setattr__(self, "factors", items)

    def dense(self, n_sites: int) -> np.ndarray:
        space = HilbertSpace([2] * n_sites)
        if not self.factors:
            return self.coefficient * np.eye(space.dim, dtype=complex)
        mats = [elementary(f"pauli-{axis}") for _, axis in self.factors]
        sites = [site for site, _ in self.factors]
        return self.coefficient * embed(kron_all(mats) if len(mats) > 1 else mats[0], sites, space)


@dataclass
class SpinHamiltonian:
    """Weighted sum of Pauli strings on n_sites two-level sites."""

    n_sites: int
    terms: list[PauliString] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        for t in self.terms:
            if any(site >= self.n_sites for site, _ in t.factors):
                raise ValueError("term references a site >= n_sites")

    def dense(self) -> np.ndarray:
        h = np.zeros((2**self.n_sites,) * 2, dtype=complex)
        for t in self.terms:
            h += t.dense(self.n_sites)
        return h

    def to_dict(self) -> dict:
        """JSON form with coefficients converted to Hz."""
        return {
            "n_sites": self.n_sites,
            "terms": [
                {
                    "coefficient_hz": t.coefficient / TWO_PI,
                    "factors": {str(site): axis for site, axis in t.factors},
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpinHamiltonian":
        terms = [
            PauliString(
                TWO_PI * float(t["coefficient_hz"]),
                {int(site): axis for site, axis in t["factors"].items()},
            )
            for t in d["terms"]
        ]
        return cls(int(d["n_sites"]), terms)


@dataclass(frozen=True)
class DeviceParams:
    """Transmon-resonator model parameters (angular frequencies, rad/s)."""

    n_transmons: int = 2
    levels_per_transmon: int = 3
    omega1: float = TWO_PI * 5.0e9
    alpha_r: float = -0.1
    omega_r: float = TWO_PI * 7.5e9
    g0: float = TWO_PI * 200.0e6
    fock_cutoff: int = 5

    def __post_init__(self) -> None:
        if self.n_transmons < 1:
            raise ValueError("n_transmons must be >= 1")
        if self.levels_per_transmon < 2:
            raise ValueError("levels_per_transmon must be >= 2")
        if self.fock_cutoff < 2:
            raise ValueError("fock_cutoff must be >= 2")
        if self.omega1 <= 0 or self.omega_r <= 0 or self.g0 < 0:
            raise ValueError("omega1, omega_r must be > 0 and g0 >= 0")

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace([self.levels_per_transmon] * self.n_transmons + [self.fock_cutoff])

    def level_energy(self, i: int) -> float:
        # level 1 at omega1, level 2 at (2 + alpha_r) * omega1; general levels
        # follow the weakly anharmonic ladder with transition omega1*(1 + alpha_r*k)
        return self.omega1 * (i + self.alpha_r * i * (i - 1) / 2.0)


def heisenberg(n: int, j: float, boundary: str = "open") -> SpinHamiltonian:
    """Nearest-neighbor isotropic Heisenberg chain, J(xx + yy + zz) per bond."""
    if n < 2:
        raise ValueError("heisenberg needs n >= 2")
    pairs = _bonds(n, boundary)
    terms = [PauliString(j, {a: ax, b: ax}) for (a, b) in pairs for ax in _AXES]
    return SpinHamiltonian(n, terms)


def xy_pair(i: int, j: int, coupling: float, n_sites: int | None = None) -> SpinHamiltonian:
    """Exchange interaction (J/2)(xx + yy) between sites i and j."""
    if i == j:
        raise ValueError("xy_pair needs distinct sites")
    n = n_sites if n_sites is not None else max(i, j) + 1
    half = coupling / 2.0
    return SpinHamiltonian(n, [PauliString(half, {i: "x", j: "x"}), PauliString(half, {i: "y", j: "y"})])


def rotated_xy_pair(i: int, j: int, coupling: float, variant: str, n_sites: int | None = None) -> SpinHamiltonian:
    """Local-rotation images of the xy pair: xz, yz, or x_minus_y.

    x_minus_y keeps the J/2 scale, so xy + x_minus_y adds up to J*xx exactly.
    """
    if i == j:
        raise ValueError("rotated_xy_pair needs distinct sites")
    n = n_sites if n_sites is not None else max(i, j) + 1
    half = coupling / 2.0
    if variant == "xz":
        terms = [PauliString(half, {i: "x", j: "x"}), PauliString(half, {i: "z", j: "z"})]
    elif variant == "yz":
        terms = [PauliString(half, {i: "y", j: "y"}), PauliString(half, {i: "z", j: "z"})]
    elif variant == "x_minus_y":
        terms = [PauliString(half, {i: "x", j: "x"}), PauliString(-half, {i: "y", j: "y"})]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return SpinHamiltonian(n, terms)


def ising(n: int, j: float, boundary: str = "open") -> SpinHamiltonian:
    """xx Ising couplings; n=3 periodic is the all-pair frustrated triangle."""
    if n < 2:
        raise ValueError("ising needs n >= 2")
    pairs = _bonds(n, boundary)
    return SpinHamiltonian(n, [PauliString(j, {a: "x", b: "x"}) for (a, b) in pairs])


def tfim(n: int, j: float, b: float, boundary: str = "open") -> SpinHamiltonian:
    """Ising couplings plus a transverse field B*sigma_y on every site."""
    h = ising(n, j, boundary)
    h.terms.extend(PauliString(b, {k: "y"}) for k in range(n))
    return h


def _bonds(n: int, boundary: str) -> list[tuple[int, int]]:
    if boundary not in ("open", "periodic"):
        raise ValueError("boundary must be 'open' or 'periodic'")
    pairs = [(k, k + 1) for k in range(n - 1)]
    if boundary == "periodic" and n > 2:
        pairs.append((0, n - 1))
    return pairs


def device_hamiltonian(p: DeviceParams) -> np.ndarray:
    """Full multilevel transmon-resonator Hamiltonian, no RWA.

    H = sum_ij omega_i |i><i|_j + omega_r a'a
        + sum_j g_{i,i+1} (|i><i+1|_j + h.c.)(a + a')
    with g_{i,i+1} = sqrt(i+1) g0 and identical transmons.
    """
    d = p.levels_per_transmon
    space = p.space
    res_index = p.n_transmons
    a = elementary("annihilation", p.fock_cutoff)
    x_res = a + a.conj().T
    energies = np.diag([p.level_energy(i) for i in range(d)]).astype(complex)
    lower = sum(math.sqrt(i + 1) * elementary("ladder", d, i) for i in range(d - 1))
    coupling = p.g0 * (lower + lower.conj().T)

    h = p.omega_r * embed(a.conj().T @ a, [res_index], space)
    for t in range(p.n_transmons):
        h += embed(energies, [t], space)
        h += embed(kron_all([coupling, x_res]), [t, res_index], space)
    return h


def dispersive_xy_rate(p: DeviceParams) -> float:
    """Second-order effective exchange g0^2 omega1 / (omega1^2 - omega_r^2).

    Signed: negative whenever omega1 < omega_r. The compiler uses the
    magnitude; the sign amounts to a redefinition of the simulated phase.
    """
    if p.omega1 == p.omega_r:
        raise ValueError("dispersive rate undefined at resonance omega1 == omega_r")
    return p.g0**2 * p.omega1 / (p.omega1**2 - p.omega_r**2)
