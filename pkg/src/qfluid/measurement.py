"""Density and momentum observables, their Pauli expansions, and shot-based estimation."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from . import hydro
from .hydro import Grid2D
from .pauli import PauliString, masks_to_ops, matrix_element_phase, parity_sign, popcount
from .statevector import HADAMARD, QuantumState, apply_matrix, sample_histogram

_SDG = np.diag([1, -1j])
BASIS_ROTATIONS = {"X": HADAMARD, "Y": HADAMARD @ _SDG, "Z": None}
COEF_TOL = 1e-13


@dataclass
class SparseHermitian:
    """Sparse 2^n x 2^n Hermitian matrix stored as {(row, col): value}."""

    num_qubits: int
    entries: dict = field(default_factory=dict)

    def add(self, row, col, value):
        key = (int(row), int(col))
        self.entries[key] = self.entries.get(key, 0) + value
        return self

    def is_hermitian(self, tol=1e-14) -> bool:
        for (r, c), v in self.entries.items():
            if abs(v - np.conj(self.entries.get((c, r), 0))) > tol:
                return False
        return True

    def dense(self) -> np.ndarray:
        dim = 2 ** self.num_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for (r, c), v in self.entries.items():
            out[r, c] += v
        return out

    def expectation(self, state: QuantumState) -> float:
        psi = state.amplitudes
        return float(sum(np.conj(psi[r]) * v * psi[c] for (r, c), v in self.entries.items()).real)


# ---------------------------------------------------------------------------
# observables; (m, l) = (y index, x index), basis index 2^n_x m + l


def _check_point(grid, m, l):
    if not (0 <= m < grid.N_y and 0 <= l < grid.N_x):
        raise ValueError(f"grid point (m={m}, l={l}) outside {grid.N_y} x {grid.N_x} grid")


def density_observable(grid: Grid2D, m: int, l: int) -> SparseHermitian:
    _check_point(grid, m, l)
    p = grid.N_x * m + l
    return SparseHermitian(grid.num_qubits, {(p, p): 1.0})


def _add_hop(op, p, q, weight):
    # weight * Im(psi_p^* psi_q) as a Hermitian matrix
    op.add(q, p, 0.5j * weight)
    op.add(p, q, -0.5j * weight)


def _axis_hops(p, pos, size, stride, spacing, scheme):
    """(neighbour index, weight) pairs for one axis at coordinate ``pos``."""
    fwd = p + stride if pos + 1 < size else p - (size - 1) * stride
    bwd = p - stride if pos > 0 else p + (size - 1) * stride
    if scheme == "one-sided-at-boundary" and pos == 0:
        return [(fwd, 1 / spacing)]
    if scheme == "one-sided-at-boundary" and pos == size - 1:
        return [(bwd, -1 / spacing)]
    return [(fwd, 1 / (2 * spacing)), (bwd, -1 / (2 * spacing))]


def momentum_observable(grid: Grid2D, m: int, l: int, scheme: str = "periodic-central"):
    """(J_x, J_y) operators at grid point (m, l); they reproduce :func:`hydro.momentum_fd`."""
    hydro.check_scheme(scheme)
    _check_point(grid, m, l)
    p = grid.N_x * m + l
    ops = []
    for pos, size, stride, spacing in ((l, grid.N_x, 1, grid.dx), (m, grid.N_y, grid.N_x, grid.dy)):
        op = SparseHermitian(grid.num_qubits)
        for q, w in _axis_hops(p, pos, size, stride, spacing, scheme):
            if q != p:
                _add_hop(op, p, q, w)
        op.entries = {k: v for k, v in op.entries.items() if v != 0}
        ops.append(op)
    return tuple(ops)


# ---------------------------------------------------------------------------
# Pauli decomposition


def decompose_masks(op: SparseHermitian):
    """Nonzero Pauli coefficients of ``op`` as arrays (x_masks, z_masks, coefficients).

    Only x-masks equal to ``row ^ col`` of a stored entry can appear; for each
    such mask every z-mask is scored, so the cost is (#distinct masks) * 2^n.
    """
    if not op.is_hermitian():
        raise ValueError("operator is not Hermitian")
    n = op.num_qubits
    dim = 2 ** n
    z = np.arange(dim)
    groups = {}
    for (r, c), v in op.entries.items():
        groups.setdefault(r ^ c, []).append((r, v))
    xs, zs, cs = [], [], []
    for x, items in sorted(groups.items()):
        acc = np.zeros(dim, dtype=complex)
        for r, v in items:
            # coefficient = sum_rc O_rc <c|P|r> / 2^n with c = r ^ x
            acc += v * matrix_element_phase(x, z, r)
        acc /= dim
        if np.max(np.abs(acc.imag)) > 1e-12:
            raise ValueError("complex Pauli coefficient; operator not Hermitian")
        keep = np.abs(acc.real) > COEF_TOL
        xs.append(np.full(keep.sum(), x, dtype=np.int64))
        zs.append(z[keep])
        cs.append(acc.real[keep])
    if not xs:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
    return np.concatenate(xs), np.concatenate(zs), np.concatenate(cs)


def pauli_decompose(op: SparseHermitian) -> list:
    xs, zs, cs = decompose_masks(op)
    return [PauliString(masks_to_ops(int(x), int(z), op.num_qubits), float(c))
            for x, z, c in zip(xs, zs, cs)]


def reconstruct_dense(strings, n: int) -> np.ndarray:
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for s in strings:
        out += s.coefficient * s.matrix()
    return out


@dataclass
class MomentumDecomposition:
    """Pauli expansion of every J_x and J_y point operator on a grid.

    ``cx[point, i]`` is the coefficient of ``strings[i]`` in J_x at flat grid
    index ``point``; likewise ``cy``.
    """

    grid: Grid2D
    scheme: str
    strings: list
    x_masks: np.ndarray
    z_masks: np.ndarray
    cx: sp.csr_matrix
    cy: sp.csr_matrix

    def pauli_strings(self) -> list:
        """Unique strings with coefficients summed in absolute value over all points."""
        weight = np.asarray(abs(self.cx).sum(axis=0) + abs(self.cy).sum(axis=0)).ravel()
        return [PauliString(s, float(w)) for s, w in zip(self.strings, weight)]


@lru_cache(maxsize=8)
def decompose_momentum_set(grid: Grid2D, scheme: str = "one-sided-at-boundary") -> MomentumDecomposition:
    n = grid.num_qubits
    rows = {0: [], 1: []}
    for m in range(grid.N_y):
        for l in range(grid.N_x):
            point = grid.N_x * m + l
            for axis, op in enumerate(momentum_observable(grid, m, l, scheme)):
                xs, zs, cs = decompose_masks(op)
                rows[axis].append((point, xs, zs, cs))
    keys = np.concatenate([xs * (1 << n) + zs for ax in rows.values() for _, xs, zs, _ in ax])
    unique = np.unique(keys)
    x_masks, z_masks = unique >> n, unique & ((1 << n) - 1)

    def matrix(axis):
        pts, cols, vals = [], [], []
        for point, xs, zs, cs in rows[axis]:
            pts.append(np.full(len(cs), point))
            cols.append(np.searchsorted(unique, xs * (1 << n) + zs))
            vals.append(cs)
        shape = (grid.N_x * grid.N_y, len(unique))
        return sp.csr_matrix((np.concatenate(vals), (np.concatenate(pts), np.concatenate(cols))), shape=shape)

    strings = [masks_to_ops(int(x), int(z), n) for x, z in zip(x_masks, z_masks)]
    return MomentumDecomposition(grid, scheme, strings, x_masks, z_masks, matrix(0), matrix(1))


# ---------------------------------------------------------------------------
# grouping


def _masks(ops: str):
    n = len(ops)
    x = z = 0
    for j, c in enumerate(ops):
        bit = 1 << (n - 1 - j)
        if c in "XY":
            x |= bit
        if c in "ZY":
            z |= bit
    return x, z


def covers(basis: str, string: str) -> bool:
    """True when every non-I letter of ``string`` matches ``basis``."""
    return all(s == "I" or s == b for s, b in zip(string, basis))


@dataclass
class MeasurementPlan:
    """Global measurement bases and the basis assigned to each string."""

    bases: list
    assignment: dict  # string -> basis index

    @property
    def num_qubits(self) -> int:
        return len(self.bases[0]) if self.bases else 0

    def strings_for(self, index: int) -> list:
        return [s for s, b in self.assignment.items() if b == index]

    def to_json(self) -> dict:
        return {"bases": list(self.bases), "assignment": dict(self.assignment)}

    @classmethod
    def from_json(cls, data) -> "MeasurementPlan":
        return cls(list(data["bases"]), {k: int(v) for k, v in data["assignment"].items()})


def group_bases(strings) -> MeasurementPlan:
    """Greedy qubit-wise cover of ``strings`` by global X/Y/Z bases.

    Strings are visited by descending weight, then descending |coefficient|
    (summed over duplicates), then lexicographically. Each string joins the
    first basis that agrees with it wherever both are non-I, fixing the
    basis letters it uses; otherwise it opens a new basis. Positions no
    string fixes are measured in Z.
    """
    weight = {}
    for s in strings:
        ops, coef = (s.ops, s.coefficient) if isinstance(s, PauliString) else (s, 1.0)
        weight[ops] = weight.get(ops, 0.0) + abs(coef)
    if not weight:
        return MeasurementPlan([], {})
    n = len(next(iter(weight)))
    if any(len(s) != n for s in weight):
        raise ValueError("strings have different lengths")
    order = sorted(weight, key=lambda s: (-sum(c != "I" for c in s), -weight[s], s))
    # each basis as (x mask, z mask, fixed-position mask)
    groups, assignment = [], {}
    for s in order:
        sx, sz = _masks(s)
        support = sx | sz
        for idx, (bx, bz, fixed) in enumerate(groups):
            if ((sx ^ bx) | (sz ^ bz)) & support & fixed == 0:
                groups[idx] = (bx | sx, bz | sz, fixed | support)
                assignment[s] = idx
                break
        else:
            groups.append((sx, sz, support))
            assignment[s] = len(groups) - 1
    full = (1 << n) - 1
    bases = [masks_to_ops(bx, bz | (full & ~fixed), n) for bx, bz, fixed in groups]
    return MeasurementPlan(bases, assignment)


def full_plan(grid: Grid2D, scheme: str = "one-sided-at-boundary") -> MeasurementPlan:
    """Momentum bases plus the all-Z density basis (index 0)."""
    dec = decompose_momentum_set(grid, scheme)
    mom = group_bases(dec.pauli_strings())
    zbasis = "Z" * grid.num_qubits
    bases = [zbasis] + [b for b in mom.bases if b != zbasis]
    index = {b: i for i, b in enumerate(bases)}
    assignment = {s: index[mom.bases[i]] for s, i in mom.assignment.items()}
    return MeasurementPlan(bases, assignment)


# ---------------------------------------------------------------------------
# estimation


def rotate_to_basis(state: QuantumState, basis: str) -> QuantumState:
    for q, letter in enumerate(basis):
        mat = BASIS_ROTATIONS[letter]
        if mat is not None:
            state = apply_matrix(state, mat, (q,))
    return state


def parity_expectations(hist, strings) -> np.ndarray:
    """Signed parity averages over each string's non-I positions."""
    hist = np.asarray(hist, dtype=float)
    idx = np.arange(hist.size)
    supports = np.array([_masks(s)[0] | _masks(s)[1] for s in strings], dtype=np.int64)
    if supports.size == 0:
        return np.zeros(0)
    signs = parity_sign(supports[:, None] & idx[None, :])
    return signs @ hist / hist.sum()


def basis_rng(seed, repeat: int, basis_index: int) -> np.random.Generator:
    """Per-(repeat, basis) stream, independent of evaluation order.

    ``seed`` is an int or a sequence of non-negative ints.
    """
    return np.random.default_rng([*np.atleast_1d(seed).tolist(), repeat, basis_index])


@dataclass
class Estimates:
    """Shot-based results: ``values[r, i]`` estimates ``strings[i]`` in repeat ``r``."""

    strings: list
    values: np.ndarray
    density: np.ndarray  # (repeats, 2^n) Z-basis frequencies
    basis_of: list
    shots: int

    @property
    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    @property
    def std(self) -> np.ndarray:
        if self.values.shape[0] < 2:
            return np.sqrt(np.clip(1 - self.mean ** 2, 0, None) / self.shots)
        return self.values.std(axis=0, ddof=1)

    @property
    def stderr(self) -> np.ndarray:
        if self.values.shape[0] < 2:
            return self.std
        return self.std / np.sqrt(self.values.shape[0])

    def as_dict(self) -> dict:
        return dict(zip(self.strings, self.mean))


def estimate(state: QuantumState, plan: MeasurementPlan, shots: int, repeats: int = 1,
             seed=0, strings=None) -> Estimates:
    """Sample every basis of ``plan`` and evaluate the strings assigned to it.

    ``strings`` fixes the output order (default: plan assignment order). The
    Z-basis frequencies for the density come from the all-Z basis, which is
    sampled even if the plan lacks it (seeded as basis ``len(plan.bases)``).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if plan.num_qubits and plan.num_qubits != state.num_qubits:
        raise ValueError("plan and state sizes differ")
    strings = list(plan.assignment) if strings is None else list(strings)
    missing = [s for s in strings if s not in plan.assignment]
    if missing:
        raise ValueError(f"{len(missing)} strings have no basis, e.g. {missing[0]}")
    pos = {s: i for i, s in enumerate(strings)}
    per_basis = {}
    for s in strings:
        per_basis.setdefault(plan.assignment[s], []).append(s)
    zbasis = "Z" * state.num_qubits
    z_index = plan.bases.index(zbasis) if zbasis in plan.bases else len(plan.bases)

    values = np.zeros((repeats, len(strings)))
    density = np.zeros((repeats, 2 ** state.num_qubits))
    rotated = {b: rotate_to_basis(state, plan.bases[b]).probabilities() for b in per_basis}
    if z_index not in rotated:
        rotated[z_index] = state.probabilities()
    for r in range(repeats):
        for b, probs in rotated.items():
            hist = sample_histogram(probs, shots, basis_rng(seed, r, b))
            if b == z_index:
                density[r] = hist / shots
            if b in per_basis:
                cols = [pos[s] for s in per_basis[b]]
                values[r, cols] = parity_expectations(hist, per_basis[b])
    basis_of = [plan.assignment[s] for s in strings]
    return Estimates(strings, values, density, basis_of, shots)


def exact_expectations(state: QuantumState, x_masks, z_masks) -> np.ndarray:
    """Noiseless <P> for strings given as mask arrays."""
    psi = state.amplitudes
    idx = np.arange(psi.size)
    out = np.empty(len(x_masks))
    for x in np.unique(x_masks):
        sel = np.flatnonzero(x_masks == x)
        w = np.conj(psi[idx ^ x]) * psi
        zs = np.asarray(z_masks)[sel]
        phase = (1j) ** (popcount(int(x) & zs) % 4)
        signs = parity_sign(zs[:, None] & idx[None, :])
        out[sel] = (phase * (signs @ w)).real
    return out


def reconstruct_fields(density_probs, expectations, decomposition: MomentumDecomposition,
                       norms=(1.0,)) -> hydro.FlowFields:
    """Flow fields from per-component Z-basis frequencies and string expectations.

    ``expectations[c]`` must be ordered like ``decomposition.strings``.
    Components are weighted by their squared norms, giving unit-norm units.
    """
    g = decomposition.grid
    if not (len(density_probs) == len(expectations) == len(norms)):
        raise ValueError("need one density table, expectation vector and norm per component")
    rhos, Js = [], []
    for probs, ev in zip(density_probs, expectations):
        ev = np.asarray(ev, dtype=float)
        if ev.shape != (len(decomposition.strings),) or np.any(np.isnan(ev)):
            raise ValueError("missing string expectations")
        rhos.append(np.asarray(probs, dtype=float).reshape(g.shape))
        Js.append(np.stack([(decomposition.cx @ ev).reshape(g.shape),
                            (decomposition.cy @ ev).reshape(g.shape)]))
    rho, J = hydro.combine_components(rhos, Js, norms)
    return hydro.fields_from_rho_J(rho, J, g)
