"""Ideal and open-system execution of gate sequences.

The Lindblad integrator is fixed-step RK4 on the master equation
  drho/dt = -i[H, rho] + sum_k rate_k * (2 A rho A' - A'A rho - rho A'A)/2
with Hermitian symmetrization each step; trajectories are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .compiler import Gate, GateSequence
from .operators import HilbertSpace, dag, elementary, embed, expm_hermitian

DEFAULT_DT = 2.0e-12
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class NoiseParams:
    """Resonator decay, qubit dephasing and qubit decay rates (rad/s)."""

    kappa: float = TWO_PI * 10.0e3
    gamma_phi: float = TWO_PI * 20.0e3
    gamma_minus: float = TWO_PI * 20.0e3

    def __post_init__(self) -> None:
        if min(self.kappa, self.gamma_phi, self.gamma_minus) < 0:
            raise ValueError("noise rates must be >= 0")

    def any_nonzero(self) -> bool:
        return max(self.kappa, self.gamma_phi, self.gamma_minus) > 0


@dataclass
class TrajectorySample:
    theta: float
    wall_time_s: float
    fidelity: float
    observables: dict


@dataclass
class Trajectory:
    """theta-ordered record of fidelity and observables from a sequence run."""

    samples: list[TrajectorySample] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def validate(self) -> None:
        thetas = [s.theta for s in self.samples]
        if any(b < a for a, b in zip(thetas, thetas[1:])):
            raise ValueError("trajectory thetas must be non-decreasing")
        for s in self.samples:
            if not -1e-8 <= s.fidelity <= 1.0 + 1e-8:
                raise ValueError(f"fidelity {s.fidelity} outside [0, 1]")

    def column_names(self) -> list[str]:
        obs = list(self.samples[0].observables) if self.samples else []
        return ["theta", "wall_time_s", "fidelity"] + obs

    def rows(self) -> list[list[float]]:
        names = self.column_names()[3:]
        return [
            [s.theta, s.wall_time_s, s.fidelity] + [s.observables[k] for k in names]
            for s in self.samples
        ]

    def to_dict(self) -> dict:
        return {
            "metadata": dict(self.metadata),
            "columns": self.column_names(),
            "rows": self.rows(),
        }


def evolve_unitary(h: np.ndarray, t: float, state):
    """exp(-i h t) applied to a vector or conjugated onto a density matrix."""
    u = expm_hermitian(h, t)
    data = np.asarray(state, dtype=complex)
    if data.ndim == 1:
        if data.shape[0] != u.shape[0]:
            raise ValueError("state and Hamiltonian dimensions do not match")
        return u @ data
    if data.shape != u.shape:
        raise ValueError("state and Hamiltonian dimensions do not match")
    return u @ data @ dag(u)


def gate_unitary(gate: Gate, n_sites: int) -> np.ndarray:
    """Dense ideal unitary of one gate on the n_sites qubit register."""
    space = HilbertSpace([2] * n_sites)
    if gate.kind == "xy_evolution":
        sx, sy = elementary("pauli-x"), elementary("pauli-y")
        h2 = 0.5 * (np.kron(sx, sx) + np.kron(sy, sy))
        return embed(expm_hermitian(h2, gate.phase), sorted(gate.targets), space)
    if gate.kind == "rotation":
        s = elementary(f"pauli-{gate.axis}")
        u1 = math.cos(gate.angle) * np.eye(2) - 1j * math.sin(gate.angle) * s
    else:  # ideal_field
        s = elementary(f"pauli-{gate.axis}")
        u1 = expm_hermitian(s, gate.phase)
    u = np.eye(space.dim, dtype=complex)
    for t in gate.targets:
        u = embed(u1, [t], space) @ u
    return u


def sequence_unitary(seq: GateSequence) -> np.ndarray:
    u = np.eye(2**seq.n_sites, dtype=complex)
    for g in seq.gates:
        u = gate_unitary(g, seq.n_sites) @ u
    return u


def run_sequence_ideal(seq: GateSequence, state) -> tuple[np.ndarray, np.ndarray]:
    """Apply every gate exactly; returns (final state, composed unitary)."""
    u = sequence_unitary(seq)
    data = np.asarray(state, dtype=complex)
    if data.ndim == 1:
        if data.shape[0] != u.shape[0]:
            raise ValueError("state dimension does not match the sequence")
        return u @ data, u
    return u @ data @ dag(u), u


class LindbladDiagnostics(RuntimeError):
    """Integrator abort: carries the offending step and measured violation."""


def lindblad_rhs_operators(h: np.ndarray, channels) -> tuple[np.ndarray, np.ndarray]:
    """Precompute K = -iH - (1/2) sum A'A and the rate-folded channel stack."""
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    k = -1j * h.astype(complex)
    ops = []
    for a, rate in channels:
        if rate < 0:
            raise ValueError("channel rates must be >= 0")
        if rate == 0.0:
            continue
        a = np.asarray(a, dtype=complex)
        k -= 0.5 * rate * (dag(a) @ a)
        ops.append(math.sqrt(rate) * a)
    stack = np.stack(ops) if ops else np.zeros((0, d, d), dtype=complex)
    return k, stack


def _rhs(r: np.ndarray, k: np.ndarray, stack: np.ndarray, stack_dag: np.ndarray) -> np.ndarray:
    out = k @ r + r @ dag(k)
    if stack.shape[0]:
        out += (stack @ r @ stack_dag).sum(axis=0)
    return out


def lindblad_evolve(
    h: np.ndarray,
    channels,
    rho: np.ndarray,
    duration: float,
    dt: float,
    max_steps: int = 10_000_000,
    check_every: int = 2000,
    eig_tol: float = 1e-6,
) -> np.ndarray:
    """Fixed-step RK4 integration of the master equation for `duration`.

    channels: iterable of (operator, rate) pairs. The trailing partial step
    uses the leftover dt. Trace drift beyond 1e-8 or a density eigenvalue
    below -eig_tol aborts with diagnostics. eig_tol needs headroom on stiff
    spectra: the one-step RK4 map damps each coherence by |R(i w dt)| <= 1,
    which is not completely positive, so O(1e-4) negativity accumulates over
    1e4+ steps when max|w|*dt approaches 1.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if duration < 0:
        raise ValueError("duration must be >= 0")
    r = np.array(rho, dtype=complex)
    if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape != np.asarray(h).shape:
        raise ValueError("rho must be a square density matrix matching h")
    n_full = int(math.floor(duration / dt + 1e-9))
    rem = duration - n_full * dt
    if rem < 1e-9 * dt:
        rem = 0.0
    if n_full + (1 if rem else 0) > max_steps:
        raise LindbladDiagnostics(
            f"step count {n_full} exceeds cap {max_steps} (duration {duration}, dt {dt})"
        )
    k, stack = lindblad_rhs_operators(h, channels)
    stack_dag = np.conj(np.transpose(stack, (0, 2, 1)))
    tr0 = float(np.real(np.trace(r)))
    step = 0
    for step in range(1, n_full + 1):
        r = _rk4_step(r, dt, k, stack, stack_dag)
        if step % check_every == 0:
            _check_health(r, tr0, step, eig_tol)
    if rem:
        r = _rk4_step(r, rem, k, stack, stack_dag)
        step += 1
    _check_health(r, tr0, step, eig_tol)
    return r


def _rk4_step(r, dt, k, stack, stack_dag):
    k1 = _rhs(r, k, stack, stack_dag)
    k2 = _rhs(r + (0.5 * dt) * k1, k, stack, stack_dag)
    k3 = _rhs(r + (0.5 * dt) * k2, k, stack, stack_dag)
    k4 = _rhs(r + dt * k3, k, stack, stack_dag)
    r = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (r + r.conj().T)


def _check_health(r: np.ndarray, tr0: float, step: int, eig_tol: float = 1e-6) -> None:
    tr = float(np.real(np.trace(r)))
    if abs(tr - tr0) > 1e-8:
        raise LindbladDiagnostics(f"trace drifted by {tr - tr0:.3e} at step {step}")
    emin = float(np.linalg.eigvalsh(r)[0])
    if emin < -eig_tol:
        raise LindbladDiagnostics(
            f"density eigenvalue {emin:.3e} < -{eig_tol:g} at step {step}")


def digital_error_curve(model, compile_family, theta_grid, l_list, initial_state) -> dict:
    """Fidelity loss 1 - |<psi_exact|psi_digital>|^2 per (theta, l).

    Model coefficients are treated as dimensionless, so theta doubles as the
    evolution time (J*t with J folded into the coefficients).
    """
    h = model.dense() if hasattr(model, "dense") else np.asarray(model, dtype=complex)
    psi0 = np.asarray(initial_state, dtype=complex)
    evals, vecs = np.linalg.eigh(h)
    rot0 = vecs.conj().T @ psi0
    losses: dict[int, np.ndarray] = {}
    for l in l_list:
        out = np.empty(len(theta_grid))
        for i, theta in enumerate(theta_grid):
            exact = vecs @ (np.exp(-1j * evals * theta) * rot0)
            seq = compile_family(theta, l)
            digital, _ = run_sequence_ideal(seq, psi0)
            out[i] = 1.0 - min(1.0, abs(np.vdot(exact, digital)) ** 2)
        losses[int(l)] = out
    return losses


def accumulated_gate_error(epsilon: float, l: int) -> float:
    """Linear accumulation l * epsilon (the horizontal gate-error lines)."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    if l < 0:
        raise ValueError("l must be >= 0")
    return l * epsilon
