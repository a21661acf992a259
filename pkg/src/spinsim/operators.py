"""Dense tensor-product operator construction and state utilities.

Convention used everywhere: subsystem 0 is the leftmost tensor factor.
All operators are dense complex numpy arrays in row-major order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

DIM_CAP = 4096

_PAULI = {
    "pauli-x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "pauli-y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "pauli-z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    "pauli-plus": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
    "pauli-minus": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex),
}


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered tensor factorization; dims[0] is the leftmost factor."""

    dims: tuple[int, ...]

    def __init__(self, dims) -> None:
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 2 for d in dims):
            raise ValueError("all subsystem dimensions must be >= 2")
        if int(np.prod(dims)) > DIM_CAP:
            raise ValueError(f"total dimension {np.prod(dims)} exceeds cap {DIM_CAP}")
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.dims)


@dataclass
class QuantumState:
    """Pure state vector or density matrix over an explicit HilbertSpace."""

    space: HilbertSpace
    kind: str  # "pure" | "density"
    data: np.ndarray

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=complex)
        d = self.space.dim
        if self.kind == "pure":
            if self.data.shape != (d,):
                raise ValueError(f"pure state must be a length-{d} vector")
            nrm = float(np.linalg.norm(self.data))
            if abs(nrm - 1.0) > 1e-10:
                raise ValueError(f"pure state norm {nrm} deviates from 1 beyond 1e-10")
        elif self.kind == "density":
            if self.data.shape != (d, d):
                raise ValueError(f"density matrix must be {d}x{d}")
            tr = complex(np.trace(self.data))
            if abs(tr - 1.0) > 1e-10:
                raise ValueError(f"density trace {tr} deviates from 1 beyond 1e-10")
            if np.max(np.abs(self.data - self.data.conj().T)) > 1e-10:
                raise ValueError("density matrix is not Hermitian")
            evals = np.linalg.eigvalsh(self.data)
            if evals.min() < -1e-8:
                # larger violations are hard errors: catches integrator blow-up
                raise ValueError(f"density matrix has eigenvalue {evals.min()} < -1e-8")
        else:
            raise ValueError("kind must be 'pure' or 'density'")

    def density(self) -> np.ndarray:
        """Density-matrix form of the state as a plain array."""
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the package-wide dimension cap enforced."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > DIM_CAP:
        raise ValueError("kron result exceeds dimension cap")
    return np.kron(a, b)


def kron_all(mats) -> np.ndarray:
    return reduce(kron, mats)


def elementary(kind: str, d: int = 2, i: int = 0) -> np.ndarray:
    """Standard single-subsystem operators.

    kind: pauli-x|pauli-y|pauli-z|pauli-plus|pauli-minus|annihilation|ladder.
    annihilation(d)[i, i+1] = sqrt(i+1); ladder(d, i) = |i><i+1|.
    """
    if kind in _PAULI:
        return _PAULI[kind].copy()
    if d < 2:
        raise ValueError("dimension must be >= 2")
    if kind == "annihilation":
        return np.diag(np.sqrt(np.arange(1.0, d)), 1).astype(complex)
    if kind == "ladder":
        if not 0 <= i < d - 1:
            raise ValueError(f"ladder index {i} out of range for dimension {d}")
        m = np.zeros((d, d), dtype=complex)
        m[i, i + 1] = 1.0
        return m
    raise ValueError(f"unknown operator kind {kind!r}")


def embed(op: np.ndarray, sites: list[int], space: HilbertSpace) -> np.ndarray:
    """Extend op on the listed subsystems by identity on all other factors.

    sites must be strictly increasing; op dimension must equal the product of
    the dims at sites. Works for non-adjacent sites via an index permutation.
    """
    op = np.asarray(op, dtype=complex)
    sites = list(sites)
    dims = space.dims
    n = len(dims)
    if not sites or sites != sorted(set(sites)) or any(not 0 <= s < n for s in sites):
        raise ValueError("sites must be strictly increasing and in range")
    dsub = int(np.prod([dims[s] for s in sites]))
    if op.shape != (dsub, dsub):
        raise ValueError(f"operator dimension {op.shape} does not match sites {sites}")
    rest = [s for s in range(n) if s not in sites]
    drest = int(np.prod([dims[s] for s in rest])) if rest else 1
    full = np.kron(op, np.eye(drest, dtype=complex))
    # full currently acts on factor order sites + rest; permute back to 0..n-1
    order = sites + rest
    perm = [order.index(s) for s in range(n)]
    shaped = full.reshape([dims[s] for s in order] * 2)
    shaped = shaped.transpose(perm + [n + p for p in perm])
    return np.ascontiguousarray(shaped.reshape(space.dim, space.dim))


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h via spectral decomposition."""
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise ValueError("expm_hermitian requires a Hermitian matrix")
    evals, vecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * t)
    return (vecs * phases) @ vecs.conj().T


def state_fidelity(rho, psi) -> float:
    """<psi|rho|psi>, real part, negative round-off clamped to 0."""
    r = rho.density() if isinstance(rho, QuantumState) else np.asarray(rho)
    v = psi.data if isinstance(psi, QuantumState) else np.asarray(psi)
    if r.ndim == 1:
        # pure-pure overlap squared
        ov = np.vdot(v, r)
        return float(max(0.0, min(1.0, abs(ov) ** 2)))
    if r.shape[0] != v.shape[0]:
        raise ValueError("state dimensions do not match")
    val = float(np.real(v.conj() @ r @ v))
    return max(0.0, val)


def partial_trace(rho, keep: list[int], space: HilbertSpace | None = None) -> np.ndarray:
    """Trace out every subsystem not listed in keep. Preserves the trace."""
    if isinstance(rho, QuantumState):
        space = rho.space
        r = rho.density()
    else:
        if space is None:
            raise ValueError("space required when rho is a raw array")
        r = np.asarray(rho, dtype=complex)
    keep = list(keep)
    dims = space.dims
    n = len(dims)
    if not keep or any(not 0 <= k < n for k in keep) or keep != sorted(set(keep)):
        raise ValueError("keep must be nonempty, sorted, in range")
    shaped = r.reshape(dims * 2)
    traced = [s for s in range(n) if s not in keep]
    for s in sorted(traced, reverse=True):
        shaped = np.trace(shaped, axis1=s, axis2=s + shaped.ndim // 2)
    dkeep = int(np.prod([dims[k] for k in keep]))
    return shaped.reshape(dkeep, dkeep)


def expectation(state, op: np.ndarray) -> float:
    """Tr(rho op) or <psi|op|psi>; discards imaginary part below 1e-8."""
    op = np.asarray(op, dtype=complex)
    if np.max(np.abs(op - op.conj().T)) > 1e-10:
        raise ValueError("expectation requires a Hermitian operator")
    if isinstance(state, QuantumState):
        data = state.data
    else:
        data = np.asarray(state, dtype=complex)
    if data.ndim == 1:
        if data.shape[0] != op.shape[0]:
            raise ValueError("state and operator dimensions do not match")
        val = complex(np.vdot(data, op @ data))
    else:
        if data.shape[0] != op.shape[0]:
            raise ValueError("state and operator dimensions do not match")
        val = complex(np.trace(data @ op))
    if abs(val.imag) > 1e-8:
        raise ValueError(f"expectation has imaginary part {val.imag}")
    return float(val.real)


def dag(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T
