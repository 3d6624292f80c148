import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import equal_up_to_phase, random_state
from oracles import embed, pauli_matrix
from qfluid.circuits import build_qft
from qfluid.pauli import PauliString
from qfluid.statevector import (
    Circuit,
    Gate,
    QuantumState,
    apply_circuit,
    apply_gate,
    expectation_pauli,
    fidelity,
    overlap,
    ry,
    rz,
    sample_counts,
)

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def random_gate(draw_kind, rng, n):
    q = list(rng.permutation(n))
    if draw_kind in ("U3",):
        return Gate("U3", (q[0],), tuple(rng.uniform(-np.pi, np.pi, 3)))
    if draw_kind in ("RZ", "RX", "RY"):
        return Gate(draw_kind, (q[0],), (rng.uniform(-np.pi, np.pi),))
    if draw_kind == "RPHI":
        return Gate("RPHI", (q[0],), tuple(rng.uniform(-np.pi, np.pi, 2)))
    if draw_kind == "H":
        return Gate("H", (q[0],))
    if draw_kind in ("ZZ", "CP"):
        return Gate(draw_kind, (q[0], q[1]), (rng.uniform(-np.pi, np.pi),))
    if draw_kind == "DIAG":
        return Gate("DIAG", (q[0], q[1]), tuple(np.exp(1j * rng.uniform(-np.pi, np.pi, 4))))
    return Gate(draw_kind, (q[0], q[1]))


KINDS = ["U3", "RZ", "RX", "RY", "RPHI", "H", "CZ", "CNOT", "ZZ", "CP", "SWAP", "DIAG"]


def random_circuit(rng, n, length):
    return Circuit(n, [random_gate(KINDS[rng.integers(len(KINDS))], rng, n) for _ in range(length)])


class TestQuantumState:
    def test_norm_invariant_enforced(self):
        with pytest.raises(ValueError):
            QuantumState(1, [1, 1])

    def test_length_invariant_enforced(self):
        with pytest.raises(ValueError):
            QuantumState(2, [1, 0, 0])

    def test_from_vector_normalizes(self):
        s = QuantumState.from_vector([3, 4j])
        assert np.allclose(s.amplitudes, [0.6, 0.8j])

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            QuantumState.from_vector([0, 0])


class TestGateMatrices:
    @given(angles)
    def test_zz_equals_cnot_rz_cnot(self, theta):
        ref = CNOT @ np.kron(np.eye(2), rz(theta)) @ CNOT
        assert np.max(np.abs(Gate("ZZ", (0, 1), (theta,)).matrix() - ref)) < 1e-12

    @given(angles, angles, angles)
    def test_u3_is_zyz(self, t, p, l):
        assert np.max(np.abs(Gate("U3", (0,), (t, p, l)).matrix() - rz(p) @ ry(t) @ rz(l))) < 1e-12

    def test_every_kind_is_unitary(self, rng):
        for kind in KINDS:
            m = random_gate(kind, rng, 3).matrix()
            assert np.max(np.abs(m.conj().T @ m - np.eye(len(m)))) < 1e-12

    def test_non_unitary_diagonal_rejected(self):
        with pytest.raises(ValueError):
            Gate("DIAG", (0,), (1.0, 0.5))

    def test_repeated_target_rejected(self):
        with pytest.raises(ValueError):
            Gate("CZ", (1, 1))

    def test_inverse(self, rng):
        for kind in KINDS:
            g = random_gate(kind, rng, 3)
            assert np.allclose(g.inverse().matrix() @ g.matrix(), np.eye(2 ** g.num_qubits), atol=1e-12)


class TestApplyGate:
    def test_u3_pi_flips(self):
        out = apply_gate(QuantumState.zero(1), Gate("U3", (0,), (np.pi, 0, np.pi)))
        assert equal_up_to_phase(out.amplitudes, [0, 1], 1e-12)

    def test_cz_signs(self):
        for idx in range(4):
            out = apply_gate(QuantumState.basis(2, idx), Gate("CZ", (0, 1)))
            expected = -1 if idx == 3 else 1
            assert out.amplitudes[idx] == expected

    @given(angles, st.integers(0, 2 ** 31))
    def test_zz_gate_by_gate(self, theta, seed):
        s = random_state(np.random.default_rng(seed), 2)
        a = apply_gate(s, Gate("ZZ", (0, 1), (theta,)))
        b = s
        for g in (Gate("CNOT", (0, 1)), Gate("RZ", (1,), (theta,)), Gate("CNOT", (0, 1))):
            b = apply_gate(b, g)
        assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-12

    def test_matches_dense_embedding(self, rng):
        n = 4
        for kind in KINDS:
            g = random_gate(kind, rng, n)
            s = random_state(rng, n)
            dense = embed(n, g.matrix(), g.targets)
            assert np.max(np.abs(apply_gate(s, g).amplitudes - dense @ s.amplitudes)) < 1e-12

    def test_out_of_range_target(self):
        with pytest.raises(ValueError):
            apply_gate(QuantumState.zero(2), Gate("H", (2,)))

    def test_norm_preserved_per_gate(self, rng):
        s = random_state(rng, 5)
        for kind in KINDS:
            s = apply_gate(s, random_gate(kind, rng, 5))
            assert abs(np.linalg.norm(s.amplitudes) - 1) < 1e-13


class TestApplyCircuit:
    def test_empty_circuit_identity(self, rng):
        s = random_state(rng, 3)
        assert np.array_equal(apply_circuit(s, Circuit(3)).amplitudes, s.amplitudes)

    @given(st.integers(0, 2 ** 31), st.integers(1, 5), st.integers(0, 60))
    def test_inverse_round_trip(self, seed, n, length):
        rng = np.random.default_rng(seed)
        n = max(n, 2)
        c = random_circuit(rng, n, length)
        s = random_state(rng, n)
        back = apply_circuit(apply_circuit(s, c), c.inverse())
        assert np.max(np.abs(back.amplitudes - s.amplitudes)) < 1e-10

    @given(st.integers(0, 2 ** 31), st.integers(0, 200))
    def test_norm_preserved(self, seed, length):
        rng = np.random.default_rng(seed)
        out = apply_circuit(random_state(rng, 4), random_circuit(rng, 4, length))
        assert abs(1 - np.sum(np.abs(out.amplitudes) ** 2)) < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_qft_of_zero_is_uniform(self, n):
        out = apply_circuit(QuantumState.zero(n), build_qft(n))
        assert np.max(np.abs(out.amplitudes - 2 ** (-n / 2))) < 1e-12

    def test_unitary_matches_application(self, rng):
        c = random_circuit(rng, 3, 30)
        c.global_phase = 0.3
        u = c.unitary()
        assert np.max(np.abs(u.conj().T @ u - np.eye(8))) < 1e-10
        s = random_state(rng, 3)
        assert np.allclose(apply_circuit(s, c).amplitudes, u @ s.amplitudes, atol=1e-12)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            apply_circuit(QuantumState.zero(2), Circuit(3))


class TestDepth:
    def test_disjoint_layers(self):
        c = Circuit(3)
        c.append("H", (0,)).append("H", (1,)).append("CZ", (0, 1)).append("H", (2,))
        assert c.depth() == 2

    def test_aligned_separates_kinds(self):
        c = Circuit(3)
        c.append("CZ", (0, 1)).append("H", (2,))
        assert c.depth() == 1
        assert c.aligned_depth() == 2

    @given(st.integers(0, 2 ** 31), st.integers(0, 40))
    def test_depth_is_minimal_disjoint_layering(self, seed, length):
        # brute-force ASAP levels equal the longest dependency chain
        rng = np.random.default_rng(seed)
        c = random_circuit(rng, 4, length)
        longest = [1] * len(c.gates)
        for i, g in enumerate(c.gates):
            for j in range(i):
                if set(g.targets) & set(c.gates[j].targets):
                    longest[i] = max(longest[i], longest[j] + 1)
        assert c.depth() == max(longest, default=0)


class TestOverlap:
    def test_self_and_orthogonal(self, rng):
        s = random_state(rng, 3)
        assert abs(overlap(s, s) - 1) < 1e-12
        assert overlap(QuantumState.basis(1, 0), QuantumState.basis(1, 1)) == 0

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            overlap(QuantumState.zero(1), QuantumState.zero(2))

    @given(st.integers(0, 2 ** 31))
    def test_fidelity_bounded(self, seed):
        rng = np.random.default_rng(seed)
        f = fidelity(random_state(rng, 3), random_state(rng, 3))
        assert 0 <= f <= 1 + 1e-12


class TestSampling:
    def test_basis_state_deterministic(self):
        counts = sample_counts(QuantumState.basis(1, 1), 1000, seed=3)
        assert counts == {"1": 1000}

    def test_bitstring_order_msb_first(self):
        assert sample_counts(QuantumState.basis(3, 1), 10, seed=0) == {"001": 10}

    def test_zero_shots_rejected(self):
        with pytest.raises(ValueError):
            sample_counts(QuantumState.zero(1), 0, seed=0)

    def test_uniform_within_5_sigma(self):
        s = QuantumState.from_vector(np.ones(4))
        counts = sample_counts(s, 10 ** 5, seed=11)
        sigma = np.sqrt(10 ** 5 * 0.25 * 0.75)
        assert sum(counts.values()) == 10 ** 5
        for b in ("00", "01", "10", "11"):
            assert abs(counts[b] - 25000) < 5 * sigma

    def test_seed_determinism(self, rng):
        s = random_state(rng, 4)
        assert sample_counts(s, 5000, seed=9) == sample_counts(s, 5000, seed=9)

    def test_frequency_standard_error(self, rng):
        # spread of frequencies over 100 seeds within 1.1 x binomial SE (checked at 5 sigma)
        s = random_state(rng, 2)
        p = s.probabilities()
        shots = 2000
        freqs = np.array([[sample_counts(s, shots, seed).get(format(i, "02b"), 0) / shots for i in range(4)]
                          for seed in range(100)])
        se = np.sqrt(p * (1 - p) / shots)
        assert np.all(np.abs(freqs.mean(axis=0) - p) < 5 * se / np.sqrt(100))
        assert np.all(freqs.std(axis=0, ddof=1) <= 1.1 * se)


class TestExpectation:
    def test_simple_cases(self):
        assert expectation_pauli(QuantumState.zero(1), PauliString("Z")) == 1
        plus = QuantumState.from_vector([1, 1])
        assert abs(expectation_pauli(plus, PauliString("X")) - 1) < 1e-15

    def test_all_4q_strings_match_dense(self, rng):
        s = random_state(rng, 4)
        for ops in itertools.product("IXYZ", repeat=4):
            ops = "".join(ops)
            dense = np.vdot(s.amplitudes, pauli_matrix(ops) @ s.amplitudes).real
            assert abs(expectation_pauli(s, PauliString(ops)) - dense) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            expectation_pauli(QuantumState.zero(2), PauliString("Z"))
