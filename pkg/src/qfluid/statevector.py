"""Dense statevector simulation.

Qubit 0 is the most significant bit of the basis index, so reshaping the
amplitude vector to ``(2,) * n`` in C order puts qubit ``q`` on axis ``q``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliString, matrix_element_phase

NORM_TOL = 1e-12

SINGLE_QUBIT_KINDS = {"U3", "RZ", "RX", "RY", "RPHI", "H"}
TWO_QUBIT_KINDS = {"CZ", "CNOT", "ZZ", "CP", "SWAP"}
_NUM_PARAMS = {"U3": 3, "RZ": 1, "RX": 1, "RY": 1, "RPHI": 2, "H": 0,
               "CZ": 0, "CNOT": 0, "ZZ": 1, "CP": 1, "SWAP": 0}


def rz(theta):
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def u3(theta, phi, lam):
    """Generic single-qubit gate Rz(phi) Ry(theta) Rz(lam)."""
    return rz(phi) @ ry(theta) @ rz(lam)


def rphi(phi, theta):
    """Rotation by ``theta`` about the equatorial axis at angle ``phi`` from x."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s * np.exp(-1j * phi)],
                     [-1j * s * np.exp(1j * phi), c]])


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT_MATRIX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP_MATRIX = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """A gate instance.

    ``params`` holds angles in radians, except for ``DIAG`` where it holds the
    unit-modulus diagonal entries (complex) over ``2**len(targets)`` states.
    For controlled gates the first target is the control.
    """

    kind: str
    targets: tuple
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "params", tuple(self.params))
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{self.kind}: repeated target in {self.targets}")
        if self.kind == "DIAG":
            entries = np.asarray(self.params, dtype=complex)
            if entries.size != 2 ** len(self.targets):
                raise ValueError("DIAG needs 2**len(targets) entries")
            if np.max(np.abs(np.abs(entries) - 1)) > 1e-12:
                raise ValueError("DIAG entries must have unit modulus")
            return
        if self.kind not in _NUM_PARAMS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = 1 if self.kind in SINGLE_QUBIT_KINDS else 2
        if len(self.targets) != arity or len(self.params) != _NUM_PARAMS[self.kind]:
            raise ValueError(f"{self.kind}: bad targets {self.targets} or params {self.params}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @property
    def num_qubits(self) -> int:
        return len(self.targets)

    def matrix(self) -> np.ndarray:
        k, p = self.kind, self.params
        if k == "U3":
            return u3(*p)
        if k == "RZ":
            return rz(p[0])
        if k == "RX":
            return rx(p[0])
        if k == "RY":
            return ry(p[0])
        if k == "RPHI":
            return rphi(*p)
        if k == "H":
            return HADAMARD.copy()
        if k == "CZ":
            return np.diag([1, 1, 1, -1]).astype(complex)
        if k == "CNOT":
            return CNOT_MATRIX.copy()
        if k == "SWAP":
            return SWAP_MATRIX.copy()
        if k == "ZZ":
            a = np.exp(-0.5j * p[0])
            return np.diag([a, a.conjugate(), a.conjugate(), a])
        if k == "CP":
            return np.diag([1, 1, 1, np.exp(1j * p[0])])
        return np.diag(np.asarray(p, dtype=complex))

    def is_diagonal(self) -> bool:
        return self.kind in {"RZ", "CZ", "ZZ", "CP", "DIAG"}

    def inverse(self) -> "Gate":
        k, p = self.kind, self.params
        if k == "U3":
            return Gate(k, self.targets, (-p[0], -p[2], -p[1]))
        if k in {"RZ", "RX", "RY", "ZZ", "CP"}:
            return Gate(k, self.targets, (-p[0],))
        if k == "RPHI":
            return Gate(k, self.targets, (p[0], -p[1]))
        if k == "DIAG":
            return Gate(k, self.targets, tuple(np.conj(p)))
        return self

    def remap(self, mapping) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.targets), self.params)


@dataclass
class Circuit:
    """Ordered gate list over ``num_qubits`` qubits.

    The represented unitary is ``exp(i * global_phase)`` times the gate
    product; gates never realize the global phase themselves.
    """

    num_qubits: int
    gates: list = field(default_factory=list)
    name: str = ""
    global_phase: float = 0.0
    metadata: dict = field(default_factory=dict)

    def append(self, kind, targets=(), params=()):
        """Append a gate given as a :class:`Gate` or as (kind, targets, params)."""
        gate = kind if isinstance(kind, Gate) else Gate(kind, tuple(targets), tuple(params))
        if any(q < 0 or q >= self.num_qubits for q in gate.targets):
            raise ValueError(f"target out of range in {gate}")
        self.gates.append(gate)
        return self

    def extend(self, other: "Circuit", mapping=None):
        """Append ``other``'s gates, optionally relabelling its qubits."""
        for g in other.gates:
            g = g.remap(mapping) if mapping is not None else g
            if any(q >= self.num_qubits for q in g.targets):
                raise ValueError(f"target out of range in {g}")
            self.gates.append(g)
        self.global_phase += other.global_phase
        return self

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, [g.inverse() for g in reversed(self.gates)],
                       name=f"{self.name}_inv" if self.name else "", global_phase=-self.global_phase,
                       metadata=dict(self.metadata))

    def __len__(self):
        return len(self.gates)

    def count_by_kind(self) -> dict:
        return dict(Counter(g.kind for g in self.gates))

    def depth(self) -> int:
        """Minimum layer count with disjoint-qubit layers, for the given gate order."""
        front = [0] * self.num_qubits
        for g in self.gates:
            level = max(front[q] for q in g.targets) + 1
            for q in g.targets:
                front[q] = level
        return max(front, default=0)

    def aligned_depth(self) -> int:
        """Depth when every layer holds only single-qubit or only two-qubit gates."""
        kinds = []
        front = [0] * self.num_qubits
        for g in self.gates:
            want = 1 if g.num_qubits == 1 else 2
            level = max(front[q] for q in g.targets)
            while level < len(kinds) and kinds[level] != want:
                level += 1
            if level == len(kinds):
                kinds.append(want)
            for q in g.targets:
                front[q] = level + 1
        return len(kinds)

    def unitary(self) -> np.ndarray:
        dim = 2 ** self.num_qubits
        mat = np.eye(dim, dtype=complex).reshape((2,) * self.num_qubits + (dim,))
        for g in self.gates:
            mat = _apply(mat, g, self.num_qubits)
        return np.exp(1j * self.global_phase) * mat.reshape(dim, dim)


@dataclass
class QuantumState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.size != 2 ** self.num_qubits:
            raise ValueError(f"expected {2 ** self.num_qubits} amplitudes, got {self.amplitudes.size}")
        norm = np.vdot(self.amplitudes, self.amplitudes).real
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state not normalized (norm^2 = {norm!r})")

    @classmethod
    def from_vector(cls, vec) -> "QuantumState":
        """Normalize ``vec`` into a state; the length must be a power of two."""
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        n = int(np.log2(vec.size))
        if vec.size != 2 ** n:
            raise ValueError("length must be a power of two")
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("zero vector")
        return cls(n, vec / norm)

    @classmethod
    def zero(cls, n: int) -> "QuantumState":
        vec = np.zeros(2 ** n, dtype=complex)
        vec[0] = 1
        return cls(n, vec)

    @classmethod
    def basis(cls, n: int, index: int) -> "QuantumState":
        vec = np.zeros(2 ** n, dtype=complex)
        vec[index] = 1
        return cls(n, vec)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "QuantumState":
        return _state(self.num_qubits, self.amplitudes.copy())


def _state(n, amps):
    # skips the norm check: used on outputs of unitary updates
    s = object.__new__(QuantumState)
    s.num_qubits = n
    s.amplitudes = amps
    return s


def _apply(tensor, gate, n):
    """Apply ``gate`` to the leading ``n`` qubit axes of ``tensor``."""
    t = gate.targets
    if gate.is_diagonal():
        shape = [1] * tensor.ndim
        for q in t:
            shape[q] = 2
        # broadcast along target axes; targets may be listed out of order
        diag = np.diagonal(gate.matrix()).reshape((2,) * len(t))
        diag = np.transpose(diag, np.argsort(t)).reshape(shape)
        return tensor * diag
    k = len(t)
    moved = np.moveaxis(tensor, t, range(k))
    shape = moved.shape
    out = (gate.matrix() @ moved.reshape(2 ** k, -1)).reshape(shape)
    return np.moveaxis(out, range(k), t)


def apply_matrix(state: QuantumState, matrix: np.ndarray, targets) -> QuantumState:
    """Apply an arbitrary unitary ``matrix`` to ``targets`` (first target = MSB)."""
    n = state.num_qubits
    t = tuple(targets)
    k = len(t)
    psi = state.amplitudes.reshape((2,) * n)
    moved = np.moveaxis(psi, t, range(k))
    out = (matrix @ moved.reshape(2 ** k, -1)).reshape(moved.shape)
    return _state(n, np.moveaxis(out, range(k), t).reshape(-1))


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    n = state.num_qubits
    if any(q < 0 or q >= n for q in gate.targets):
        raise ValueError(f"gate {gate.kind} targets {gate.targets} outside {n}-qubit register")
    psi = _apply(state.amplitudes.reshape((2,) * n), gate, n)
    return _state(n, psi.reshape(-1))


def apply_circuit(state: QuantumState, circuit: Circuit) -> QuantumState:
    n = state.num_qubits
    if circuit.num_qubits != n:
        raise ValueError(f"circuit has {circuit.num_qubits} qubits, state has {n}")
    psi = state.amplitudes.reshape((2,) * n)
    for gate in circuit.gates:
        if any(q < 0 or q >= n for q in gate.targets):
            raise ValueError(f"gate {gate.kind} targets {gate.targets} outside {n}-qubit register")
        psi = _apply(psi, gate, n)
    psi = psi.reshape(-1)
    if circuit.global_phase:
        psi = psi * np.exp(1j * circuit.global_phase)
    return _state(n, np.ascontiguousarray(psi))


def overlap(a: QuantumState, b: QuantumState) -> complex:
    """<a|b>."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("states have different qubit counts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    return abs(overlap(a, b)) ** 2


def sample_histogram(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Multinomial outcome counts indexed by basis state."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.clip(probs, 0, None)
    return rng.multinomial(shots, p / p.sum())


def sample_counts(state: QuantumState, shots: int, seed: int) -> dict:
    """Measure all qubits ``shots`` times; bitstrings list qubit 0 first."""
    hist = sample_histogram(state.probabilities(), shots, np.random.default_rng(seed))
    n = state.num_qubits
    return {format(int(i), f"0{n}b"): int(hist[i]) for i in np.flatnonzero(hist)}


def expectation_pauli(state: QuantumState, pauli: PauliString) -> float:
    """Exact <psi|P|psi> (coefficient not applied)."""
    n = state.num_qubits
    if pauli.num_qubits != n:
        raise ValueError(f"string of length {pauli.num_qubits} on {n} qubits")
    x, z = pauli.x_mask, pauli.z_mask
    idx = np.arange(2 ** n)
    psi = state.amplitudes
    val = np.sum(np.conj(psi[idx ^ x]) * matrix_element_phase(x, z, idx) * psi)
    return float(val.real)
