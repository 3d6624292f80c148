"""Encode, evolve, optionally corrupt, and measure a flow on the circuit path."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import circuits, hydro, measurement, noise
from .statevector import Circuit, QuantumState, apply_circuit

TOPOLOGIES = ("all-to-all", "ladder", "line")


def make_topology(name: str, num_qubits: int) -> circuits.Topology:
    if name == "all-to-all":
        return circuits.Topology.all_to_all(num_qubits)
    if name == "line":
        return circuits.Topology.line(num_qubits)
    if name == "ladder":
        if num_qubits % 2:
            raise ValueError("ladder topology needs an even qubit count")
        return circuits.Topology.ladder(num_qubits // 2)
    raise ValueError(f"unknown topology {name!r}; choose from {TOPOLOGIES}")


def full_circuit(state0: QuantumState, grid: hydro.Grid2D, t: float) -> Circuit:
    """State preparation followed by free evolution, in the builder gate set."""
    circ = Circuit(grid.num_qubits, name=f"prep+evolution_t={t:g}")
    circ.extend(circuits.amplitude_encode(state0.amplitudes))
    circ.extend(circuits.build_evolution(grid.n_x, grid.n_y, t))
    return circ


def native_circuit(state0, grid, t, topology="all-to-all") -> Circuit:
    """:func:`full_circuit` rewritten over {U3, CZ} for ``topology``."""
    return circuits.transpile(full_circuit(state0, grid, t), make_topology(topology, grid.num_qubits))


def run_circuit(circ: Circuit, error_model=None, stream=()) -> QuantumState:
    if error_model is not None:
        circ = noise.inject(circ, error_model, stream)
    return apply_circuit(QuantumState.zero(circ.num_qubits), circ)


@dataclass
class Measured:
    """Fields from the combined estimates plus one FlowFields per repeat."""

    fields: hydro.FlowFields
    repeats: list
    estimates: list  # per component; None on the exact path


def measure(states, norms, grid, scheme, shots=None, repeats=1, seed=0, plan=None) -> Measured:
    """Reconstruct flow fields from final states.

    ``shots=None`` evaluates every string exactly; otherwise every basis of
    ``plan`` (default: the full density + momentum plan) is sampled, with
    component ``c`` seeded by ``[*seed, c]``.
    """
    dec = measurement.decompose_momentum_set(grid, scheme)
    if shots is None:
        probs = [s.probabilities() for s in states]
        evs = [measurement.exact_expectations(s, dec.x_masks, dec.z_masks) for s in states]
        f = measurement.reconstruct_fields(probs, evs, dec, norms)
        return Measured(f, [f], [None] * len(states))
    plan = measurement.full_plan(grid, scheme) if plan is None else plan
    seed = list(np.atleast_1d(seed).tolist())
    ests = [measurement.estimate(s, plan, shots, repeats, seed + [c], strings=dec.strings)
            for c, s in enumerate(states)]
    per_repeat = [measurement.reconstruct_fields([e.density[r] for e in ests],
                                                 [e.values[r] for e in ests], dec, norms)
                  for r in range(repeats)]
    mean = measurement.reconstruct_fields([e.density.mean(axis=0) for e in ests],
                                          [e.mean for e in ests], dec, norms)
    return Measured(mean, per_repeat, ests)
