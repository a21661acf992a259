import math

import numpy as np
import pytest

from spinsim.compiler import Gate, GateSequence, compile_heisenberg_pair
from spinsim.device import (
    RK4Propagator,
    _embed_qubit_state,
    _resolve_rho0,
    calibrate_device,
    device_channels,
    extract_qubit_block,
    run_sequence_on_device,
)
from spinsim.dynamics import NoiseParams, lindblad_evolve
from spinsim.hamiltonians import TWO_PI, DeviceParams, device_hamiltonian

SMALL = DeviceParams(fock_cutoff=3)  # 27-dim, cheap propagator builds
TINY = DeviceParams(levels_per_transmon=2, fock_cutoff=2)  # 8-dim


class TestCalibration:
    def test_default_exchange_and_shift(self):
        cal = calibrate_device(DeviceParams(), mode="calibrated")
        assert cal.exchange / TWO_PI / 1e6 == pytest.approx(-19.04190415289256, rel=1e-9)
        shift = (cal.qubit_freq - DeviceParams().omega1) / TWO_PI / 1e6
        assert shift == pytest.approx(-19.29766754544915, rel=1e-9)

    def test_detuned_exchange_and_shift(self):
        p = DeviceParams(omega_r=TWO_PI * 9.0e9)
        cal = calibrate_device(p, mode="calibrated")
        assert cal.exchange / TWO_PI / 1e6 == pytest.approx(-12.831845344998973, rel=1e-9)
        shift = (cal.qubit_freq - p.omega1) / TWO_PI / 1e6
        assert shift == pytest.approx(-13.035165168249229, rel=1e-9)

    def test_detuning_weakens_exchange(self):
        near = calibrate_device(DeviceParams(), mode="calibrated")
        far = calibrate_device(DeviceParams(omega_r=TWO_PI * 9.0e9), mode="calibrated")
        assert abs(far.exchange) < abs(near.exchange)

    def test_formula_mode(self):
        cal = calibrate_device(DeviceParams(), mode="formula")
        assert cal.exchange / TWO_PI == pytest.approx(-6.4e6, rel=1e-12)

    def test_rounded_mode(self):
        cal = calibrate_device(DeviceParams(), mode="rounded")
        assert cal.exchange / TWO_PI == pytest.approx(-6.0e6, rel=1e-12)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            calibrate_device(DeviceParams(), mode="guess")


class TestChannels:
    def test_channel_set(self):
        chans = device_channels(SMALL, NoiseParams())
        assert len(chans) == 5  # resonator decay + (dephasing, decay) per transmon
        rates = sorted(r for _, r in chans)
        assert rates[0] == pytest.approx(TWO_PI * 10e3)
        assert rates[-1] == pytest.approx(TWO_PI * 20e3)

    def test_decay_lowers_excited_level(self):
        chans = device_channels(SMALL, NoiseParams())
        # qubit decay operators map level 1 -> level 0 on their transmon
        decay_ops = [op for op, r in chans if abs(r - TWO_PI * 20e3) < 1.0
                     and np.allclose(np.diag(op), 0.0)]
        assert len(decay_ops) == 2


class TestPropagator:
    def test_matches_stepwise(self):
        h = device_hamiltonian(SMALL)
        chans = device_channels(SMALL, NoiseParams())
        psi = _embed_qubit_state(np.array([0, 1.0, 0, 0], dtype=complex), SMALL)
        rho0 = np.outer(psi, psi.conj())
        dt = 2e-12
        duration = 2.0e-9
        prop = RK4Propagator(h, chans, dt)
        r_fast = prop.apply(rho0, duration)
        r_slow = lindblad_evolve(h, chans, rho0, duration, dt, eig_tol=1e-3)
        assert np.max(np.abs(r_fast - r_slow)) < 1e-10

    def test_trailing_partial_step(self):
        h = device_hamiltonian(TINY)
        chans = device_channels(TINY, NoiseParams())
        psi = _embed_qubit_state(np.array([0, 0, 1.0, 0], dtype=complex), TINY)
        rho0 = np.outer(psi, psi.conj())
        dt = 2e-12
        duration = 10.5 * dt
        prop = RK4Propagator(h, chans, dt)
        r_fast = prop.apply(rho0, duration)
        r_slow = lindblad_evolve(h, chans, rho0, duration, dt)
        assert np.max(np.abs(r_fast - r_slow)) < 1e-12

    def test_power_cap(self):
        from spinsim.dynamics import LindbladDiagnostics

        h = device_hamiltonian(TINY)
        prop = RK4Propagator(h, [], 1e-15)
        with pytest.raises(LindbladDiagnostics):
            prop.apply(np.eye(8, dtype=complex) / 8.0, 1e-6)


class TestEmbedExtract:
    def test_round_trip_random_state(self):
        rng = np.random.default_rng(3)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        dev = _embed_qubit_state(psi, SMALL)
        rho = np.outer(dev, dev.conj())
        block = extract_qubit_block(rho, SMALL)
        assert np.max(np.abs(block - np.outer(psi, psi.conj()))) < 1e-14
        assert abs(np.trace(block) - 1.0) < 1e-14

    def test_index_convention(self):
        # spin up is qubit index 0 but transmon level 1
        psi = np.zeros(4, dtype=complex)
        psi[1] = 1.0  # |up, down>
        dev = _embed_qubit_state(psi, SMALL)
        d, f = SMALL.levels_per_transmon, SMALL.fock_cutoff
        idx = (1 * d + 0) * f + 0  # level (1, 0), vacuum
        assert dev[idx] == 1.0
        block = extract_qubit_block(np.outer(dev, dev.conj()), SMALL)
        assert block[1, 1] == pytest.approx(1.0)

    def test_leakage_outside_block(self):
        # population parked in transmon level 2 disappears from the block trace
        dev = np.zeros(SMALL.space.dim, dtype=complex)
        d, f = SMALL.levels_per_transmon, SMALL.fock_cutoff
        dev[(2 * d + 0) * f + 0] = 1.0
        block = extract_qubit_block(np.outer(dev, dev.conj()), SMALL)
        assert abs(np.trace(block)) < 1e-14


class TestResolveRho0:
    def test_qubit_vector(self):
        psi = np.array([0, 1.0, 0, 0], dtype=complex)
        psi_q, rho_dev = _resolve_rho0(psi, SMALL)
        assert np.allclose(psi_q, psi)
        assert rho_dev is None

    def test_qubit_pure_density(self):
        psi = np.array([0.6, 0.8j, 0, 0], dtype=complex)
        rho = np.outer(psi, psi.conj())
        psi_q, rho_dev = _resolve_rho0(rho, SMALL)
        overlap = abs(np.vdot(psi_q, psi))
        assert overlap == pytest.approx(1.0, abs=1e-12)

    def test_device_vector(self):
        psi = np.array([0, 0, 1.0, 0], dtype=complex)
        dev = _embed_qubit_state(psi, SMALL)
        psi_q, rho_dev = _resolve_rho0(dev, SMALL)
        assert np.allclose(psi_q, psi)
        assert rho_dev is not None and rho_dev.shape == (27, 27)

    def test_mixed_qubit_density_rejected(self):
        with pytest.raises(ValueError):
            _resolve_rho0(np.diag([0.5, 0.5, 0, 0]).astype(complex), SMALL)


class TestRunSequence:
    def test_theta_zero_is_identity(self):
        seq = compile_heisenberg_pair(1.0)
        traj = run_sequence_on_device(seq, TINY, NoiseParams(0, 0, 0), None,
                                      [0.0], integrator="stepwise")
        s = traj.samples[0]
        assert s.fidelity == pytest.approx(1.0, abs=1e-12)
        assert s.observables["leakage"] == pytest.approx(0.0, abs=1e-12)
        assert s.wall_time_s == 0.0

    def test_small_device_run_properties(self):
        seq = compile_heisenberg_pair(1.0)
        traj = run_sequence_on_device(seq, TINY, NoiseParams(), None,
                                      [0.0, 0.2, 0.4], dt=1e-12)
        fids = [s.fidelity for s in traj.samples]
        assert fids[0] == pytest.approx(1.0, abs=1e-9)
        assert all(0.0 <= f <= 1.0 + 1e-9 for f in fids)
        leaks = [s.observables["leakage"] for s in traj.samples]
        assert all(lk < 0.2 for lk in leaks)
        assert traj.metadata["calibration"]["wall_rate_hz"] == pytest.approx(6.4e6)
        names = list(traj.samples[0].observables)
        assert names == ["sx_1_ideal", "sx_1_device", "sx_2_ideal", "sx_2_device", "leakage"]

    def test_threads_match_serial(self):
        seq = compile_heisenberg_pair(1.0)
        grid = [0.1, 0.3]
        kw = dict(dt=1e-12)
        t1 = run_sequence_on_device(seq, TINY, NoiseParams(), None, grid, **kw)
        t2 = run_sequence_on_device(seq, TINY, NoiseParams(), None, grid, threads=2, **kw)
        for a, b in zip(t1.samples, t2.samples):
            assert a.fidelity == pytest.approx(b.fidelity, abs=1e-12)

    def test_rejects_ideal_field(self):
        g = Gate("ideal_field", (0, 1), axis="y", phase=0.1)
        seq = GateSequence(2, (g,), trotter_steps=1, metadata={"theta": 0.1})
        with pytest.raises(ValueError):
            run_sequence_on_device(seq, TINY, NoiseParams(), None, [0.1])

    def test_rejects_negative_theta(self):
        seq = compile_heisenberg_pair(1.0)
        with pytest.raises(ValueError):
            run_sequence_on_device(seq, TINY, NoiseParams(), None, [-0.1])

    def test_rejects_zero_template_with_nonzero_grid(self):
        seq = compile_heisenberg_pair(0.0)
        with pytest.raises(ValueError):
            run_sequence_on_device(seq, TINY, NoiseParams(), None, [0.3])

    def test_custom_reference_exchange(self):
        seq = compile_heisenberg_pair(1.0)
        traj = run_sequence_on_device(seq, TINY, NoiseParams(0, 0, 0), None, [0.0],
                                      integrator="stepwise",
                                      reference_exchange=-TWO_PI * 5e6)
        assert traj.metadata["calibration"]["reference_exchange_hz"] == pytest.approx(-5e6)
