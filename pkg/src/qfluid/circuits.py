"""Circuit builders for free evolution on a periodic grid.

Registers follow the basis label ``k + 2**n_x * l``: the y register holds the
most significant qubits ``0 .. n_y - 1`` and the x register the least
significant ``n_y .. n_y + n_x - 1``. Inside each register the first qubit is
the most significant bit of the coordinate index.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .pauli import parity_sign
from .statevector import Circuit, Gate, QuantumState, HADAMARD, rx, rz, u3

# ---------------------------------------------------------------------------
# wavenumbers


def wavenumber_diagonal(n: int) -> np.ndarray:
    """(0, 1, ..., 2^(n-1) - 1, -2^(n-1), ..., -1) as integers."""
    if n < 1:
        raise ValueError("need at least one qubit")
    idx = np.arange(2 ** n)
    return np.where(idx < 2 ** (n - 1), idx, idx - 2 ** n)


@dataclass(frozen=True)
class WavenumberSpec:
    n: int
    diagonal: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "diagonal", wavenumber_diagonal(self.n))


@dataclass(frozen=True)
class WavenumberDecomposition:
    """Wavenumber operator as ``identity * I + sum_j z[j] * Z_j`` (Z_0 on the MSB)."""

    identity: Fraction
    z: tuple

    @property
    def n(self) -> int:
        return len(self.z)

    def diagonal(self) -> np.ndarray:
        """Evaluate the operator on every basis state using exact rationals."""
        out = []
        for b in range(2 ** self.n):
            val = self.identity
            for j, c in enumerate(self.z):
                bit = (b >> (self.n - 1 - j)) & 1
                val += c if bit == 0 else -c
            out.append(val)
        return np.array(out, dtype=object)


def decompose_wavenumber(n: int) -> WavenumberDecomposition:
    """Pauli-Z expansion of the signed wavenumber diagonal.

    Starting from ``diag(0..2^n-1) = ((2^n-1) I - sum_j 2^(n-j) Z_j) / 2`` and
    subtracting ``2^(n-1) (I - Z_1)`` gives coefficients
    ``-1/2`` on I, ``-2^(n-j)/2`` on Z_j, plus ``2^(n-1)`` extra on Z_1.
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    z = [Fraction(-(2 ** (n - j)), 2) for j in range(1, n + 1)]
    z[0] += 2 ** (n - 1)
    return WavenumberDecomposition(Fraction(-1, 2), tuple(z))


def counting_diagonal_from_z(n: int) -> np.ndarray:
    """Evaluate ((2^n - 1) I - sum_j 2^(n-j) Z_j) / 2 term by term."""
    total = np.full(2 ** n, 2 ** n - 1, dtype=np.int64)
    for j in range(1, n + 1):
        zj = np.kron(np.kron(np.ones(2 ** (j - 1), dtype=np.int64), np.array([1, -1])),
                     np.ones(2 ** (n - j), dtype=np.int64))
        total -= 2 ** (n - j) * zj
    assert np.all(total % 2 == 0)
    return total // 2


# ---------------------------------------------------------------------------
# QFT and evolution


def build_qft(n: int, inverse: bool = False) -> Circuit:
    """QFT with kernel exp(+2 pi i j k / 2^n); ``inverse`` gives its adjoint."""
    if n < 1:
        raise ValueError("need at least one qubit")
    circ = Circuit(n, name="qft")
    for j in range(n):
        circ.append("H", (j,))
        for k in range(j + 1, n):
            circ.append("CP", (k, j), (2 * np.pi / 2 ** (k - j + 1),))
    for j in range(n // 2):
        circ.append("SWAP", (j, n - 1 - j))
    if inverse:
        circ = circ.inverse()
        circ.name = "qft_inv"
    return circ


def build_phase_evolution(n: int, t: float) -> Circuit:
    """exp(-i k^2 t / 2) on an n-qubit wavenumber register, as RZ and ZZ gates.

    Squaring ``c0 + sum c_j Z_j`` gives a constant (dropped into
    ``global_phase``), single-Z terms ``2 c0 c_j`` and pair terms ``2 c_i c_j``.
    """
    dec = decompose_wavenumber(n)
    c0 = float(dec.identity)
    c = [float(x) for x in dec.z]
    circ = Circuit(n, name="phase")
    for j in range(n):
        circ.append("RZ", (j,), (2 * c0 * c[j] * t,))
    for i in range(n):
        for j in range(i + 1, n):
            circ.append("ZZ", (i, j), (2 * c[i] * c[j] * t,))
    const = c0 ** 2 + sum(x * x for x in c)
    circ.global_phase = -0.5 * t * const
    circ.metadata["dropped_global_phase"] = circ.global_phase
    return circ


def axis_qubits(n_x: int, n_y: int):
    """(x qubits, y qubits) in MSB-first order within each register."""
    return list(range(n_y, n_y + n_x)), list(range(n_y))


def build_axis_evolution(n: int, t: float) -> Circuit:
    """QFT, phase, inverse QFT on one register."""
    circ = Circuit(n, name="axis_evolution")
    circ.extend(build_qft(n))
    circ.extend(build_phase_evolution(n, t))
    circ.extend(build_qft(n, inverse=True))
    return circ


def build_evolution(n_x: int, n_y: int, t: float) -> Circuit:
    """Free evolution for time ``t`` on the full (n_x + n_y)-qubit grid register."""
    if n_x < 1 or n_y < 1:
        raise ValueError("both axes need at least one qubit")
    xq, yq = axis_qubits(n_x, n_y)
    circ = Circuit(n_x + n_y, name=f"evolution_t={t:g}")
    circ.extend(build_axis_evolution(n_x, t), mapping=xq)
    circ.extend(build_axis_evolution(n_y, t), mapping=yq)
    circ.metadata.update(n_x=n_x, n_y=n_y, t=t, dropped_global_phase=circ.global_phase)
    return circ


# ---------------------------------------------------------------------------
# exact state preparation

_ANGLE_EPS = 1e-14


def _gray(i):
    return i ^ (i >> 1)


def uniformly_controlled_rotation(kind: str, angles, controls, target) -> list:
    """Gate list applying rotation ``angles[s]`` on ``target`` when ``controls`` read ``s``.

    ``controls[0]`` is the most significant bit of ``s``. Uses the Gray-code
    construction with 2^k rotations and 2^k CNOTs, then strips zero rotations
    and cancels CNOT pairs that meet.
    """
    angles = np.asarray(angles, dtype=float)
    k = len(controls)
    size = 2 ** k
    if np.all(np.abs(angles - angles[0]) < _ANGLE_EPS):
        return [] if abs(angles[0]) < _ANGLE_EPS else [Gate(kind, (target,), (angles[0],))]
    s = np.arange(size)
    gray = _gray(s)
    signs = parity_sign(s[:, None] & gray[None, :])
    theta = signs.T @ angles / size
    gates = []
    for i in range(size):
        if abs(theta[i]) > _ANGLE_EPS:
            gates.append(Gate(kind, (target,), (theta[i],)))
        changed = _gray(i) ^ _gray((i + 1) % size)
        bit = changed.bit_length() - 1
        gates.append(Gate("CNOT", (controls[k - 1 - bit], target)))
    return _cancel_cnots(gates, target)


def _cancel_cnots(gates, target):
    # CNOTs sharing a target commute, so inside each run only control parity matters
    out, run = [], {}
    for g in gates + [None]:
        if g is not None and g.kind == "CNOT":
            run[g.targets[0]] = run.get(g.targets[0], 0) ^ 1
            continue
        out.extend(Gate("CNOT", (c, target)) for c, odd in run.items() if odd)
        run = {}
        if g is not None:
            out.append(g)
    return out


def amplitude_encode(target) -> Circuit:
    """Circuit over {RY, RZ, CNOT} taking |0...0> to ``target`` exactly.

    Magnitudes come from a tree of uniformly controlled RY rotations; the
    phases are peeled off as uniformly controlled RZ rotations from the last
    qubit upward, leaving one global phase.
    """
    amps = target.amplitudes if isinstance(target, QuantumState) else np.asarray(target, dtype=complex)
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("zero-norm target")
    amps = amps / norm
    n = int(np.log2(amps.size))
    if amps.size != 2 ** n:
        raise ValueError("length must be a power of two")
    circ = Circuit(n, name="amplitude_encode")
    mags = np.abs(amps)
    for q in range(n):
        block = mags.reshape(2 ** q, 2, -1)
        nrm = np.linalg.norm(block, axis=2)
        angles = 2 * np.arctan2(nrm[:, 1], nrm[:, 0])
        circ.gates.extend(uniformly_controlled_rotation("RY", angles, list(range(q)), q))
    phases = np.where(mags > 0, np.angle(amps), 0.0)
    for m in range(n, 0, -1):
        pairs = phases.reshape(-1, 2)
        circ.gates.extend(uniformly_controlled_rotation(
            "RZ", pairs[:, 1] - pairs[:, 0], list(range(m - 1)), m - 1))
        phases = pairs.mean(axis=1)
    circ.global_phase = float(phases[0])
    return circ


# ---------------------------------------------------------------------------
# topology and transpilation


@dataclass(frozen=True)
class Topology:
    num_qubits: int
    edges: frozenset

    def __post_init__(self):
        edges = frozenset(frozenset(e) for e in self.edges)
        for e in edges:
            if len(e) != 2:
                raise ValueError(f"self edge {set(e)}")
            if any(q < 0 or q >= self.num_qubits for q in e):
                raise ValueError(f"edge {set(e)} outside register")
        object.__setattr__(self, "edges", edges)

    def adjacent(self, a, b) -> bool:
        return frozenset((a, b)) in self.edges

    def neighbors(self, q):
        return sorted(next(iter(e - {q})) for e in self.edges if q in e)

    def shortest_path(self, a, b):
        prev = {a: None}
        queue = deque([a])
        while queue:
            v = queue.popleft()
            if v == b:
                break
            for w in self.neighbors(v):
                if w not in prev:
                    prev[w] = v
                    queue.append(w)
        if b not in prev:
            raise ValueError(f"qubits {a} and {b} are not connected")
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return path[::-1]

    def is_connected(self) -> bool:
        seen, stack = {0}, [0]
        while stack:
            for w in self.neighbors(stack.pop()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_qubits

    @classmethod
    def line(cls, n):
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def ladder(cls, cols=5):
        """Two rows of ``cols`` qubits, neighbours along rows and rungs between them."""
        edges = [(i, i + 1) for i in range(cols - 1)]
        edges += [(cols + i, cols + i + 1) for i in range(cols - 1)]
        edges += [(i, cols + i) for i in range(cols)]
        return cls(2 * cols, frozenset(edges))

    @classmethod
    def all_to_all(cls, n):
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def u3_params(mat):
    """Return (theta, phi, lam, gamma) with mat = exp(i gamma) U3(theta, phi, lam)."""
    mat = np.asarray(mat, dtype=complex)
    gamma = np.angle(np.linalg.det(mat)) / 2
    su = mat * np.exp(-1j * gamma)
    a, c, d = su[0, 0], su[1, 0], su[1, 1]
    theta = 2 * np.arctan2(abs(c), abs(a))
    if abs(c) < 1e-12:
        phi, lam = 0.0, 2 * np.angle(d)
    elif abs(a) < 1e-12:
        phi, lam = 2 * np.angle(c), 0.0
    else:
        phi, lam = np.angle(d) + np.angle(c), np.angle(d) - np.angle(c)
    recon = u3(theta, phi, lam)
    i, j = np.unravel_index(np.argmax(np.abs(recon)), recon.shape)
    gamma = float(np.angle(mat[i, j] / recon[i, j]))
    return float(theta), float(phi), float(lam), gamma


# single-qubit matrix on qubit, or ("CZ", a, b)
def _decompose(g: Gate):
    """Primitive ops for ``g`` plus the global phase they omit."""
    k, t, p = g.kind, g.targets, g.params
    if g.num_qubits == 1:
        return [(g.matrix(), t[0])], 0.0
    if k == "CZ":
        return [("CZ", t[0], t[1])], 0.0
    if k == "CNOT":
        c, x = t
        return [(HADAMARD, x), ("CZ", c, x), (HADAMARD, x)], 0.0
    if k == "ZZ":
        a, b = t
        return [(HADAMARD, b), ("CZ", a, b), (rx(p[0]), b), ("CZ", a, b), (HADAMARD, b)], 0.0
    if k == "CP":
        c, x = t
        ops = [(rz(p[0] / 2), c), (rz(p[0] / 2), x)]
        ops += _decompose(Gate("ZZ", t, (-p[0] / 2,)))[0]
        return ops, p[0] / 4
    if k == "SWAP":
        a, b = t
        ops = []
        for c, x in ((a, b), (b, a), (a, b)):
            ops += _decompose(Gate("CNOT", (c, x)))[0]
        return ops, 0.0
    if k == "DIAG":
        return _decompose_diagonal(g)
    raise ValueError(f"cannot decompose {k}")


def _decompose_diagonal(g: Gate):
    # exp(i sum_m w_m Z^m): each parity term via a CNOT ladder and one RZ
    t = g.targets
    k = len(t)
    phases = np.angle(np.asarray(g.params, dtype=complex))
    s = np.arange(2 ** k)
    signs = parity_sign(s[:, None] & s[None, :])
    w = signs @ phases / 2 ** k
    ops = []
    for m in range(1, 2 ** k):
        if abs(w[m]) < _ANGLE_EPS:
            continue
        qubits = [t[k - 1 - b] for b in range(k) if (m >> b) & 1]
        last = qubits[-1]
        ladder = []
        for q in qubits[:-1]:
            ladder += _decompose(Gate("CNOT", (q, last)))[0]
        ops += ladder + [(rz(-2 * w[m]), last)] + ladder[::-1]
    return ops, float(w[0])


def _merge_single(ops):
    """Fuse runs of single-qubit matrices on the same qubit within one gate's ops."""
    out = []
    pending = {}
    for op in ops:
        if isinstance(op[0], str):
            for q in op[1:]:
                if q in pending:
                    out.append((pending.pop(q), q))
            out.append(op)
        else:
            mat, q = op
            pending[q] = mat @ pending[q] if q in pending else mat
    out.extend((m, q) for q, m in pending.items())
    return out


def transpile(circuit: Circuit, topology: Topology, layout=None) -> Circuit:
    """Rewrite ``circuit`` over {U3, CZ} with every CZ on a topology edge.

    ``layout[q]`` is the physical qubit holding logical qubit ``q`` (identity by
    default). Non-adjacent pairs are brought together with SWAPs along a
    shortest path, which are undone right after, so the layout is unchanged.
    """
    if not topology.is_connected():
        raise ValueError("topology is disconnected")
    if topology.num_qubits < circuit.num_qubits:
        raise ValueError("topology smaller than circuit")
    layout = list(range(circuit.num_qubits)) if layout is None else list(layout)
    out = Circuit(topology.num_qubits, name=circuit.name, global_phase=circuit.global_phase,
                  metadata=dict(circuit.metadata))

    def emit(ops):
        for op in _merge_single(ops):
            if isinstance(op[0], str):
                out.append("CZ", op[1:])
            else:
                theta, phi, lam, gamma = u3_params(op[0])
                out.append("U3", (op[1],), (theta, phi, lam))
                out.global_phase += gamma

    swap_ops = lambda a, b: _decompose(Gate("SWAP", (a, b)))[0]
    for g in circuit.gates:
        ops, phase = _decompose(g.remap(layout))
        out.global_phase += phase
        for op in _merge_single(ops):
            if not isinstance(op[0], str):
                emit([op])
                continue
            a, b = op[1], op[2]
            if topology.adjacent(a, b):
                emit([op])
                continue
            path = topology.shortest_path(a, b)
            hops = list(zip(path[:-2], path[1:-1]))
            for u, v in hops:
                emit(swap_ops(u, v))
            emit([("CZ", path[-2], b)])
            for u, v in reversed(hops):
                emit(swap_ops(u, v))
    out.metadata["topology_edges"] = sorted(tuple(sorted(e)) for e in topology.edges)
    return out


def gate_count_report(circuit: Circuit) -> dict:
    single = sum(1 for g in circuit.gates if g.num_qubits == 1)
    return {
        "single_qubit": single,
        "two_qubit": len(circuit.gates) - single,
        "total": len(circuit.gates),
        "depth": circuit.depth(),
        "aligned_depth": circuit.aligned_depth(),
        "by_kind": circuit.count_by_kind(),
    }


# ---------------------------------------------------------------------------
# text format


def dumps(circuit: Circuit) -> str:
    """One gate per line: ``KIND targets... params...``; DIAG params are (re, im) pairs."""
    lines = [f"# qubits {circuit.num_qubits}",
             f"# name {circuit.name}",
             f"# global_phase {circuit.global_phase!r}"]
    for g in circuit.gates:
        params = g.params
        if g.kind == "DIAG":
            params = np.asarray(g.params, dtype=complex).view(float)
        fields = [g.kind, *map(str, g.targets), *(repr(float(p)) for p in params)]
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    header, gates = {}, []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(" ")
            header[key] = value
            continue
        kind, *tokens = line.split()
        if kind == "DIAG":
            k = next(k for k in range(1, len(tokens)) if k + 2 ** (k + 1) == len(tokens))
            targets = [int(x) for x in tokens[:k]]
            params = np.array([float(x) for x in tokens[k:]]).view(complex)
        else:
            arity = 1 if kind in {"U3", "RZ", "RX", "RY", "RPHI", "H"} else 2
            targets = [int(x) for x in tokens[:arity]]
            params = [float(x) for x in tokens[arity:]]
        gates.append(Gate(kind, tuple(targets), tuple(params)))
    if "qubits" not in header:
        raise ValueError("missing '# qubits' header")
    return Circuit(int(header["qubits"]), gates, name=header.get("name", ""),
                   global_phase=float(header.get("global_phase", 0.0)))
