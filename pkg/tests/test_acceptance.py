"""Acceptance gate: every headline claim of the package, one test per criterion.

Each test prints a single pass/fail line (collected again in the terminal
summary) and enforces both the numerical tolerance and the runtime budget.
"""

import math
import time

import numpy as np
import scipy.linalg

from spinsim import (
    DeviceParams,
    GateTimes,
    NoiseParams,
    compile_heisenberg_chain,
    compile_heisenberg_pair,
    compile_ising_frustrated,
    compile_tfim,
    digital_error_curve,
    dispersive_xy_rate,
    elementary,
    evolve_unitary,
    execution_time,
    gate_counts,
    heisenberg,
    ising,
    lindblad_evolve,
    run_sequence_on_device,
    sequence_fidelity_estimate,
    sequence_unitary,
    tfim,
    trotter_error_bound,
)
from spinsim.cli import main as cli_main
from spinsim.hamiltonians import TWO_PI


def op_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b, 2))


def test_criterion_1_pair_protocol_exact(criterion):
    t0 = time.perf_counter()
    h = heisenberg(2, 1.0).dense()
    worst = 0.0
    for theta in np.linspace(0.0, math.pi / 4, 8):
        u = sequence_unitary(compile_heisenberg_pair(float(theta)))
        want = scipy.linalg.expm(-1j * theta * h)
        worst = max(worst, op_distance(u, want))
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and dt < 1.0
    criterion(1, "two-site exchange protocol is exact", ok,
              f"max operator distance {worst:.3e} over 8 thetas in [0, pi/4], {dt:.2f} s")


def test_criterion_2_frustrated_protocol_exact(criterion):
    t0 = time.perf_counter()
    h = ising(3, 1.0, boundary="periodic").dense()
    worst = 0.0
    for theta in np.linspace(0.0, math.pi / 4, 8):
        u = sequence_unitary(compile_ising_frustrated(float(theta)))
        want = scipy.linalg.expm(-1j * theta * h)
        worst = max(worst, op_distance(u, want))
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and dt < 1.0
    criterion(2, "frustrated-triangle protocol is exact", ok,
              f"max operator distance {worst:.3e} over 8 thetas in [0, pi/4], {dt:.2f} s")


def test_criterion_3_trotter_bound_and_scaling(criterion):
    t0 = time.perf_counter()
    grid = np.linspace(math.pi / 8, math.pi / 4, 5)
    l_list = [2, 3, 4, 6, 8]
    cases = [
        ("heisenberg", "open", heisenberg(3, 1.0, boundary="open"),
         lambda th, l: compile_heisenberg_chain(3, th, l, "open")),
        ("tfim", "periodic", tfim(3, 1.0, 1.0, boundary="periodic"),
         lambda th, l: compile_tfim(3, th, th, l, "periodic")),
    ]
    psi0 = np.zeros(8, dtype=complex)
    psi0[2] = 1.0  # |up down up>
    bound_ok = True
    ratios = []
    for model_name, boundary, model, family in cases:
        losses = digital_error_curve(model, family, grid, l_list, psi0)
        for l in (2, 3, 4):
            for th, loss in zip(grid, losses[l]):
                if loss > trotter_error_bound(model_name, 3, boundary, float(th), l):
                    bound_ok = False
            ratios.extend(np.sqrt(losses[l] / losses[2 * l]))
    ratio_ok = all(1.7 <= r <= 2.3 for r in ratios)
    dt = time.perf_counter() - t0
    ok = bound_ok and ratio_ok and dt < 10.0
    criterion(3, "digital error under closed-form bound, halves per depth doubling", ok,
              f"bounds hold: {bound_ok}; sqrt-loss ratios in [{min(ratios):.3f}, "
              f"{max(ratios):.3f}] for l in {{2,3,4}} vs 2l, {dt:.2f} s")


def test_criterion_4_dispersive_rate(criterion):
    t0 = time.perf_counter()
    rate = dispersive_xy_rate(DeviceParams())
    exact = abs(rate / TWO_PI + 6.4e6) < 1e-3
    rounded_dev = abs(abs(rate) - TWO_PI * 6.0e6) / (TWO_PI * 6.0e6)
    dt = time.perf_counter() - t0
    ok = exact and rounded_dev <= 0.10 and dt < 1.0
    criterion(4, "dispersive exchange rate at stock parameters", ok,
              f"rate = {rate / TWO_PI / 1e6:+.4f} MHz (x 2pi), "
              f"{rounded_dev * 100:.1f}% from the rounded 6 MHz figure, {dt:.2f} s")


def test_criterion_5_fidelity_budgets(criterion):
    t0 = time.perf_counter()
    pair = sequence_fidelity_estimate(compile_heisenberg_pair(math.pi / 4))
    fr_seq = compile_ising_frustrated(math.pi / 4)
    frustrated = sequence_fidelity_estimate(fr_seq)
    counts = gate_counts(fr_seq)
    dt = time.perf_counter() - t0
    ok = 0.75 <= pair <= 0.80 and 0.62 <= frustrated <= 0.72 and dt < 1.0
    criterion(5, "product-model fidelity budgets", ok,
              f"exchange pair {pair:.4f} in [0.75, 0.80]; frustrated {frustrated:.4f} "
              f"in [0.62, 0.72] with counts {counts}, {dt:.2f} s")


def test_criterion_6_step_timing(criterion):
    t0 = time.perf_counter()
    times = GateTimes()
    t_h = execution_time("heisenberg", 3, "open", math.pi / 4, 1, times)
    t_i = execution_time("tfim", 3, "periodic", math.pi / 4, 1, times)
    dev_h = abs(t_h - 0.16e-6) / 0.16e-6
    dev_i = abs(t_i - 190e-9) / 190e-9
    dt = time.perf_counter() - t0
    ok = dev_h <= 0.20 and dev_i <= 0.20 and dt < 1.0
    criterion(6, "single-step wall times", ok,
              f"open 3-site exchange step {t_h * 1e9:.1f} ns ({dev_h * 100:.1f}% from 160 ns); "
              f"periodic 3-site transverse-field step {t_i * 1e9:.1f} ns "
              f"({dev_i * 100:.1f}% from 190 ns); tau_s={times.tau_s * 1e9:.0f} ns, "
              f"j_rate={times.j_rate / TWO_PI / 1e6:.1f} MHz (x 2pi), "
              f"g_phi={times.g_phi / TWO_PI / 1e6:.0f} MHz (x 2pi), {dt:.2f} s")


def test_criterion_7_lindblad_checks(criterion):
    t0 = time.perf_counter()
    errs = []

    gamma = TWO_PI * 20e3
    lower = elementary("ladder", 2, 0)
    rho0 = np.array([[0.2, 0.4], [0.4, 0.8]], dtype=complex)
    t = 10e-6
    rho = lindblad_evolve(np.zeros((2, 2)), [(lower, gamma)], rho0, t, dt=1e-9)
    errs.append(abs(rho[1, 1] - 0.8 * math.exp(-gamma * t)) / (0.8 * math.exp(-gamma * t)))
    trace_err = abs(np.trace(rho).real - 1.0)

    sz = np.diag([1.0, -1.0]).astype(complex)
    rho0 = np.full((2, 2), 0.5, dtype=complex)
    t = 8e-6
    rho = lindblad_evolve(np.zeros((2, 2)), [(sz, gamma)], rho0, t, dt=1e-9)
    coh = 0.5 * math.exp(-2.0 * gamma * t)
    errs.append(abs(rho[0, 1] - coh) / coh)
    trace_err = max(trace_err, abs(np.trace(rho).real - 1.0))

    h = TWO_PI * 6.4e6 * heisenberg(2, 1.0).dense()
    psi0 = np.array([0, 1.0, 0, 0], dtype=complex)
    t = 100e-9
    rho = lindblad_evolve(h, [], np.outer(psi0, psi0.conj()), t, dt=1e-10)
    psi = evolve_unitary(h, t, psi0)
    fid = float(np.real(psi.conj() @ rho @ psi))

    dt = time.perf_counter() - t0
    ok = (max(errs) < 1e-4 and trace_err < 1e-8 and fid > 1.0 - 1e-6 and dt < 30.0)
    criterion(7, "noise integrator against analytic channels", ok,
              f"decay/dephasing rel errors {errs[0]:.2e}/{errs[1]:.2e}, trace drift "
              f"{trace_err:.2e}, zero-noise fidelity 1-{1.0 - fid:.2e}, {dt:.2f} s")


def test_criterion_8_device_run(criterion):
    t0 = time.perf_counter()
    seq = compile_heisenberg_pair(1.0)
    noise = NoiseParams()
    grid = np.linspace(0.0, math.pi / 4, 25)
    traj = run_sequence_on_device(seq, DeviceParams(), noise,
                                  sample_grid=grid, dt=2e-12)
    fid = np.array([s.fidelity for s in traj.samples])

    f0_ok = fid[0] > 0.999
    floor_ok = bool(np.min(fid) > 0.8)
    # first 13 grid points are exactly linspace(0, pi/8, 13)
    diffs = np.diff(fid[:13])
    extrema = int(np.sum(diffs[:-1] * diffs[1:] < 0))
    osc_ok = extrema >= 3

    detuned = DeviceParams(omega_r=TWO_PI * 9.0e9)
    grid13 = np.linspace(0.0, math.pi / 8, 13)
    traj2 = run_sequence_on_device(seq, detuned, noise, sample_grid=grid13, dt=2e-12)
    fid2 = np.array([s.fidelity for s in traj2.samples])
    detune_ok = bool(np.mean(fid2) > np.mean(fid[:13]))

    dt = time.perf_counter() - t0
    ok = f0_ok and floor_ok and osc_ok and detune_ok and dt < 600.0
    criterion(8, "full device model reproduces the measured-fidelity picture", ok,
              f"F(0)={fid[0]:.6f}, min F={np.min(fid):.4f} on [0, pi/4], {extrema} local "
              f"extrema on [0, pi/8], mean F {np.mean(fid[:13]):.4f} -> {np.mean(fid2):.4f} "
              f"when detuned to 9 GHz, {dt:.0f} s")


def test_criterion_9_deterministic_output(criterion, tmp_path):
    t0 = time.perf_counter()
    outs = []
    for sub in ("one", "two"):
        d = tmp_path / sub
        assert cli_main(["fig2-heisenberg", "--out", str(d)]) == 0
        outs.append(d)
    same = all(
        (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
        for name in ("fig2_heisenberg_panel_a.csv", "fig2_heisenberg_panel_b.csv")
    )
    dt = time.perf_counter() - t0
    ok = same and dt < 60.0
    criterion(9, "re-running an experiment is byte-identical", ok,
              f"two fig2-heisenberg runs compared over both panel CSVs, {dt:.2f} s")
