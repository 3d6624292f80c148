"""Flow fields on the periodic grid [-pi, pi)^2 and the Madelung map to wave functions.

Arrays are indexed ``[l, k]`` (y row, x column), so flattening in C order
gives the basis label ``k + N_x * l``. Units: hbar = m = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import QuantumState

SCHEMES = ("periodic-central", "one-sided-at-boundary")
VELOCITY_FLOOR = 1e-6


@dataclass(frozen=True)
class Grid2D:
    n_x: int
    n_y: int

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("need at least one qubit per axis")

    @property
    def N_x(self) -> int:
        return 2 ** self.n_x

    @property
    def N_y(self) -> int:
        return 2 ** self.n_y

    @property
    def shape(self):
        return (self.N_y, self.N_x)

    @property
    def num_qubits(self) -> int:
        return self.n_x + self.n_y

    @property
    def dx(self) -> float:
        return 2 * np.pi / self.N_x

    @property
    def dy(self) -> float:
        return 2 * np.pi / self.N_y

    @property
    def x(self) -> np.ndarray:
        return -np.pi + np.arange(self.N_x) * self.dx

    @property
    def y(self) -> np.ndarray:
        return -np.pi + np.arange(self.N_y) * self.dy

    def mesh(self):
        """(X, Y) arrays of shape (N_y, N_x)."""
        return np.meshgrid(self.x, self.y, indexing="xy")

    def flat_index(self, k, l):
        return k + self.N_x * l


@dataclass
class WaveField:
    """One or two complex components sampled on ``grid`` (unnormalized)."""

    grid: Grid2D
    components: tuple
    norm_constants: tuple = ()

    def __post_init__(self):
        self.components = tuple(np.asarray(c, dtype=complex).reshape(self.grid.shape)
                                for c in self.components)
        if len(self.components) not in (1, 2):
            raise ValueError("expected one or two components")
        if not self.norm_constants:
            self.norm_constants = tuple(float(np.linalg.norm(c)) for c in self.components)

    @property
    def total_norm(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(c) ** 2 for c in self.components)))

    def normalized(self) -> "WaveField":
        """Divide every component by the joint L2 norm (sum over grid points)."""
        total = self.total_norm
        if total == 0:
            raise ValueError("zero field")
        return WaveField(self.grid, tuple(c / total for c in self.components), self.norm_constants)


@dataclass
class FlowFields:
    rho: np.ndarray
    J: np.ndarray  # (2, N_y, N_x): x then y
    u: np.ndarray
    omega: np.ndarray
    mask: np.ndarray  # True where u is defined (rho above the floor)


# ---------------------------------------------------------------------------
# initial conditions


def init_diverging(grid: Grid2D, varrho: float = 1.0) -> WaveField:
    """exp(-y^2 / (2 varrho^2) + i x): density exp(-y^2/varrho^2), velocity e_x."""
    if varrho <= 0:
        raise ValueError("varrho must be positive")
    X, Y = grid.mesh()
    return WaveField(grid, (np.exp(-Y ** 2 / (2 * varrho ** 2) + 1j * X),))


VORTEX_VARIANTS = ("double-f", "single-f")


def init_vortex(grid: Grid2D, r0: float = 3.0, variant: str = "double-f") -> WaveField:
    """Two-component vortex built from the rational-map pair (u, v).

    ``variant="double-f"`` uses v = i (r^2 + 1 - 2 f) / (1 + r^2);
    ``"single-f"`` uses ``f`` in place of ``2 f``.
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    if variant not in VORTEX_VARIANTS:
        raise ValueError(f"unknown vortex variant {variant!r}")
    X, Y = grid.mesh()
    r2 = X ** 2 + Y ** 2
    f = np.exp(-(np.sqrt(r2) / r0) ** 4)
    scale = 2.0 if variant == "double-f" else 1.0
    u = 2 * (X + 1j * Y) * f / (1 + r2)
    v = 1j * (r2 + 1 - scale * f) / (1 + r2)
    den = np.sqrt(np.abs(u) ** 2 + np.abs(v) ** 4)
    # the single-f pair vanishes at the origin; the field is set to zero there
    safe = np.where(den > 0, den, 1.0)
    return WaveField(grid, (np.where(den > 0, u / safe, 0), np.where(den > 0, v ** 2 / safe, 0)))


# ---------------------------------------------------------------------------
# encoding


def encode(field: WaveField):
    """One unit-norm state per component, plus the component norms."""
    states, norms = [], []
    for comp in field.components:
        norm = float(np.linalg.norm(comp))
        if norm == 0:
            raise ValueError("zero field component")
        states.append(QuantumState(field.grid.num_qubits, comp.reshape(-1) / norm))
        norms.append(norm)
    return states, tuple(norms)


def decode(states, grid: Grid2D, norms) -> WaveField:
    """Inverse of :func:`encode`; accepts a single state and norm too."""
    if isinstance(states, QuantumState):
        states, norms = [states], [norms]
    comps = []
    for s, norm in zip(states, norms):
        if s.amplitudes.size != grid.N_x * grid.N_y:
            raise ValueError(f"state dimension {s.amplitudes.size} does not match grid {grid.shape}")
        comps.append(s.amplitudes.reshape(grid.shape) * norm)
    return WaveField(grid, tuple(comps), tuple(float(n) for n in norms))


# ---------------------------------------------------------------------------
# Madelung fields


def density(field: WaveField) -> np.ndarray:
    return sum(np.abs(c) ** 2 for c in field.components)


def _hop_products(psi, axis, scheme):
    """Per point, Im(psi* dpsi) times the spacing, for the chosen difference."""
    fwd = np.roll(psi, -1, axis=axis)
    bwd = np.roll(psi, 1, axis=axis)
    out = np.imag(np.conj(psi) * (fwd - bwd)) / 2
    if scheme == "one-sided-at-boundary":
        first = [slice(None)] * 2
        last = [slice(None)] * 2
        first[axis], last[axis] = 0, -1
        first, last = tuple(first), tuple(last)
        out[first] = np.imag(np.conj(psi[first]) * (fwd[first] - psi[first]))
        out[last] = np.imag(np.conj(psi[last]) * (psi[last] - bwd[last]))
    return out


def check_scheme(scheme):
    if scheme not in SCHEMES:
        raise ValueError(f"unknown difference scheme {scheme!r}; choose from {SCHEMES}")


def momentum_fd(field: WaveField, scheme: str = "periodic-central") -> np.ndarray:
    """J = sum_c Im(psi_c* grad psi_c) with finite differences; shape (2, N_y, N_x)."""
    check_scheme(scheme)
    g = field.grid
    jx = sum(_hop_products(c, 1, scheme) for c in field.components) / g.dx
    jy = sum(_hop_products(c, 0, scheme) for c in field.components) / g.dy
    return np.stack([jx, jy])


def velocity(rho, J, floor: float = VELOCITY_FLOOR):
    """u = J / rho where rho >= floor * max(rho), else 0; returns (u, mask)."""
    mask = rho >= floor * np.max(rho)
    u = np.zeros_like(J)
    u[:, mask] = J[:, mask] / rho[mask]
    return u, mask


def ddx(a, grid, axis):
    step = grid.dx if axis == 1 else grid.dy
    return (np.roll(a, -1, axis=axis) - np.roll(a, 1, axis=axis)) / (2 * step)


def vorticity(u, grid: Grid2D) -> np.ndarray:
    """du_y/dx - du_x/dy, central differences with periodic wrap."""
    return ddx(u[1], grid, 1) - ddx(u[0], grid, 0)


def flow_fields(field: WaveField, scheme: str = "periodic-central") -> FlowFields:
    """Madelung fields of ``field`` in unit-norm units."""
    nf = field.normalized()
    rho = density(nf)
    J = momentum_fd(nf, scheme)
    return fields_from_rho_J(rho, J, field.grid)


def fields_from_rho_J(rho, J, grid) -> FlowFields:
    u, mask = velocity(rho, J)
    return FlowFields(rho=rho, J=J, u=u, omega=vorticity(u, grid), mask=mask)


def combine_components(rhos, Js, norms):
    """Joint unit-norm density and momentum from per-component unit-norm results."""
    w = np.asarray(norms, dtype=float) ** 2
    w = w / w.sum()
    rho = sum(wi * r for wi, r in zip(w, rhos))
    J = sum(wi * j for wi, j in zip(w, Js))
    return rho, J


# ---------------------------------------------------------------------------
# spin diagnostics


def spin_diagnostics(field: WaveField, floor: float = VELOCITY_FLOOR) -> dict:
    """Spin vector s, zeta, quantum pressure p, effective potential U_F and body force f (V = 0)."""
    if len(field.components) != 2:
        raise ValueError("spin diagnostics need a two-component field")
    g = field.grid
    a, b = field.components
    cross = np.conj(a) * b
    s = np.stack([np.abs(a) ** 2 - np.abs(b) ** 2, -2 * cross.imag, 2 * cross.real])
    rho = density(field)
    mask = rho >= floor * np.max(rho)
    inv_rho = np.where(mask, 1 / np.where(mask, rho, 1), 0.0)
    grad = np.stack([[ddx(si, g, 1), ddx(si, g, 0)] for si in s])  # (3, 2, Ny, Nx)
    zeta = -0.25 * np.stack([ddx(grad[i, 0] * inv_rho, g, 1) + ddx(grad[i, 1] * inv_rho, g, 0)
                             for i in range(3)])
    p = np.sum(zeta * s, axis=0)
    grad_sq = np.sum(grad ** 2, axis=(0, 1))
    U_F = -grad_sq * inv_rho ** 2 / 8
    f = np.stack([np.sum(grad[:, alpha] * zeta, axis=0) * inv_rho for alpha in range(2)])
    return {"s": s, "zeta": zeta, "p": p, "U_F": U_F, "f": f, "mask": mask}


# ---------------------------------------------------------------------------
# profiles and integrals


def x_average(a) -> np.ndarray:
    """Mean over x at each y (last axis)."""
    return np.asarray(a).mean(axis=-1)


def theta_average(a, grid: Grid2D, center=(0.0, 0.0)):
    """Radial-bin average about ``center``; bins of width dx centred at (i + 1/2) dx.

    Returns (bin centres, means, counts); empty bins give NaN.
    """
    X, Y = grid.mesh()
    r = np.hypot(X - center[0], Y - center[1])
    idx = np.floor(r / grid.dx).astype(int).ravel()
    nbins = idx.max() + 1
    counts = np.bincount(idx, minlength=nbins)
    sums = np.bincount(idx, weights=np.asarray(a, dtype=float).ravel(), minlength=nbins)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return (np.arange(nbins) + 0.5) * grid.dx, means, counts


def kinetic_energy(fields: FlowFields, grid: Grid2D) -> float:
    return float(np.sum(0.5 * fields.rho * np.sum(fields.u ** 2, axis=0)) * grid.dx * grid.dy)


def enstrophy(fields: FlowFields, grid: Grid2D) -> float:
    return float(np.sum(fields.omega ** 2) * grid.dx * grid.dy)


def total_mass(rho, grid: Grid2D) -> float:
    return float(np.sum(rho) * grid.dx * grid.dy)


def profiles_and_integrals(fields: FlowFields, grid: Grid2D) -> dict:
    r, omega_theta, counts = theta_average(fields.omega, grid)
    return {
        "y": grid.y,
        "rho_x": x_average(fields.rho),
        "Jx_x": x_average(fields.J[0]),
        "Jy_x": x_average(fields.J[1]),
        "r": r,
        "omega_theta": omega_theta,
        "bin_counts": counts,
        "kinetic_energy": kinetic_energy(fields, grid),
        "enstrophy": enstrophy(fields, grid),
        "mass": total_mass(fields.rho, grid),
    }
