"""Coherent gate-error injection and error-pattern diagnostics."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .statevector import SINGLE_QUBIT_KINDS, Circuit, Gate

MODES = ("fixed-single-qubit", "random-all-qubits")


@dataclass
class ErrorModel:
    """Error gate appended after single-qubit gates.

    ``fixed-single-qubit``: the gate ``kind(params)`` (e.g. RX(0.025)) after
    every single-qubit gate on ``targets``.
    ``random-all-qubits``: U3 after every single-qubit gate on any qubit, each
    angle drawn from U[-amplitude, amplitude] per insertion from a generator
    seeded by ``seed``.
    """

    mode: str = "fixed-single-qubit"
    kind: str = "RX"
    params: tuple = (0.025,)
    targets: tuple = ()
    amplitude: float = 0.045
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown error mode {self.mode!r}; choose from {MODES}")
        self.params = tuple(float(p) for p in self.params)
        self.targets = tuple(int(q) for q in self.targets)
        if self.mode == "fixed-single-qubit":
            if self.kind not in SINGLE_QUBIT_KINDS:
                raise ValueError(f"error gate must be single-qubit, got {self.kind!r}")
            if not self.targets:
                raise ValueError("fixed mode needs at least one target qubit")
        if not (np.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ValueError("amplitude must be finite and non-negative")
        if not all(np.isfinite(self.params)):
            raise ValueError("error-gate angles must be finite")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ErrorModel":
        data = json.loads(text)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown error-model keys: {sorted(unknown)}")
        return cls(**data)


def inject(circuit: Circuit, model: ErrorModel, stream=()) -> Circuit:
    """Copy of ``circuit`` with error gates after targeted single-qubit gates.

    Random angles come from a generator seeded by ``[model.seed, *stream]``,
    so distinct circuits of one run can draw independent errors.
    """
    fixed = model.mode == "fixed-single-qubit"
    targets = set(model.targets) if fixed else set(range(circuit.num_qubits))
    if any(q < 0 or q >= circuit.num_qubits for q in targets):
        raise ValueError("error-model target outside the circuit")
    rng = np.random.default_rng([model.seed, *stream])
    out = Circuit(circuit.num_qubits, name=f"{circuit.name}+noise",
                  global_phase=circuit.global_phase, metadata=dict(circuit.metadata))
    for g in circuit.gates:
        out.append(g)
        if g.kind in SINGLE_QUBIT_KINDS and g.targets[0] in targets:
            if fixed:
                out.append(Gate(model.kind, g.targets, model.params))
            else:
                angles = rng.uniform(-model.amplitude, model.amplitude, size=3)
                out.append(Gate("U3", g.targets, tuple(angles)))
    return out


def equivalent_error_rate(error) -> dict:
    """Infidelities of a single-qubit error (Gate or 2x2 unitary) against the identity.

    Returns the average gate infidelity ``1 - (|Tr E|^2/2 + 1)/3`` and the
    process (entanglement) infidelity ``1 - |Tr E|^2/4``.
    """
    mat = error.matrix() if isinstance(error, Gate) else np.asarray(error, dtype=complex)
    if mat.shape != (2, 2):
        raise ValueError("expected a single-qubit error")
    if not np.allclose(mat.conj().T @ mat, np.eye(2), atol=1e-10):
        raise ValueError("error gate is not unitary")
    tr2 = abs(np.trace(mat)) ** 2
    return {"average_infidelity": float(1 - (tr2 / 2 + 1) / 3),
            "process_infidelity": float(1 - tr2 / 4)}


def stripe_spectrum(error_field, axis: str = "x"):
    """Dominant nonzero frequency of an error field along ``axis``.

    The field (shape (N_y, N_x)) is averaged over the other axis and Fourier
    transformed; power at +k and -k is folded together. Returns the non-DC
    frequency index with the most power and that power as a fraction of the
    total (DC included) profile power.
    """
    a = np.asarray(error_field, dtype=float)
    if a.ndim != 2:
        raise ValueError("error field must be 2-D")
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    profile = a.mean(axis=0) if axis == "x" else a.mean(axis=1)
    power = np.abs(np.fft.fft(profile)) ** 2
    n = power.size
    if n < 2:
        raise ValueError("need at least two samples along the axis")
    folded = power[1:n // 2 + 1].copy()
    folded[: (n - 1) // 2] += power[n - 1:n // 2:-1]
    total = power.sum()
    if total == 0:
        return 0, 0.0
    k = int(np.argmax(folded))
    return k + 1, float(folded[k] / total)


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError("fields differ in shape")
    if np.std(a) == 0 or np.std(b) == 0:
        raise ValueError("zero-variance field; correlation undefined")
    return float(np.corrcoef(a, b)[0, 1])


def correlation_report(measured, exact) -> dict:
    """Pearson r of rho, J_x and J_y between two FlowFields."""
    return {"r_rho": pearson(measured.rho, exact.rho),
            "r_jx": pearson(measured.J[0], exact.J[0]),
            "r_jy": pearson(measured.J[1], exact.J[1])}
