"""Acceptance checks; each prints one PASS/FAIL line.

Run under pytest, or directly with ``python3 tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest

from qfluid import circuits, hydro, measurement, noise, oracle, pipeline
from qfluid.hydro import Grid2D
from qfluid.noise import ErrorModel
from qfluid.statevector import QuantumState, apply_circuit

G32 = Grid2D(5, 5)
TIMES = (0.0, np.pi / 4, np.pi / 2)
SCHEME = "one-sided-at-boundary"

AMPLITUDE_TOL = 1e-10
CASE_SECONDS = 5.0
MAX_BASES = 70
SAMPLED_SECONDS = 120.0
SHOTS, REPEATS = 10 ** 5, 5
R_RHO_MIN = 0.999
SIGMAS = 3.0
OMEGA_TOL = 1e-6
MASS_TOL = 1e-10
NOISE_SEEDS = range(20)
R2_MIN = 0.99


def phase_aligned_deviation(a, b):
    i = np.argmax(np.abs(b))
    phase = a[i] / b[i]
    return float(np.max(np.abs(a - phase / abs(phase) * b)))


def report(number, ok, detail):
    line = f"[acceptance {number}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    return ok, line


# ---------------------------------------------------------------------------


def check_1():
    """Prep + evolution circuits from |0>, per flow and time, against the spectral oracle."""
    worst_dev, worst_time = 0.0, 0.0
    for flow in oracle.FLOWS:
        field0 = oracle.initial_field(flow, G32)
        states0, norms = hydro.encode(field0)
        for t in TIMES:
            start = time.perf_counter()
            ref = oracle.spectral_evolve(field0, t)
            for s0, norm, comp in zip(states0, norms, ref.components):
                final = pipeline.run_circuit(pipeline.native_circuit(s0, G32, t))
                worst_dev = max(worst_dev, phase_aligned_deviation(final.amplitudes, comp.ravel() / norm))
            worst_time = max(worst_time, time.perf_counter() - start)
    ok = worst_dev < AMPLITUDE_TOL and worst_time < CASE_SECONDS
    return report(1, ok, f"max amplitude deviation {worst_dev:.2e} (< {AMPLITUDE_TOL:g}), "
                         f"slowest case {worst_time:.2f} s (< {CASE_SECONDS:g} s)")


def check_2():
    bad = []
    for n in range(1, 7):
        target = [j if j < 2 ** (n - 1) else j - 2 ** n for j in range(2 ** n)]
        if [v for v in circuits.decompose_wavenumber(n).diagonal()] != target:
            bad.append(f"wavenumber n={n}")
        if list(circuits.counting_diagonal_from_z(n)) != list(range(2 ** n)):
            bad.append(f"counting identity n={n}")
    return report(2, not bad, "exact for n = 1..6" if not bad else "mismatch: " + ", ".join(bad))


def check_3():
    dec = measurement.decompose_momentum_set(G32, SCHEME)
    plan = measurement.full_plan(G32, SCHEME)
    n_bases = len(plan.bases) - 1
    ok = len(dec.strings) == 5120 and n_bases <= MAX_BASES
    return report(3, ok, f"{len(dec.strings)} strings, {n_bases} momentum bases "
                         f"(+1 density basis = {len(plan.bases)}); target 5120 / 62, <= {MAX_BASES} accepted")


def check_4():
    worst = 0.0
    for flow in oracle.FLOWS:
        for scheme in hydro.SCHEMES:
            field = oracle.spectral_evolve(oracle.initial_field(flow, G32), np.pi / 4)
            states, norms = hydro.encode(field)
            got = pipeline.measure(states, norms, G32, scheme).fields
            unit = field.normalized()
            worst = max(worst, np.max(np.abs(got.rho - hydro.density(unit))),
                        np.max(np.abs(got.J - hydro.momentum_fd(unit, scheme))))
    return report(4, worst < AMPLITUDE_TOL, f"max deviation {worst:.2e} (< {AMPLITUDE_TOL:g}), both flows and schemes")


def check_5():
    """Sampled diverging flow at t = pi/4 with the full plan.

    sigma at each y is the spread (ddof=1) of the per-repeat x-averaged J_x
    profiles, the error-bar convention of the plotted profiles.
    """
    t = np.pi / 4
    field0 = hydro.init_diverging(G32)
    ref = hydro.flow_fields(oracle.spectral_evolve(field0, t), SCHEME)
    states0, norms = hydro.encode(field0)
    start = time.perf_counter()
    finals = [pipeline.run_circuit(pipeline.native_circuit(s, G32, t)) for s in states0]
    res = pipeline.measure(finals, norms, G32, SCHEME, SHOTS, REPEATS, seed=[0, 1])
    elapsed = time.perf_counter() - start
    r_rho = noise.pearson(res.fields.rho, ref.rho)
    profiles = np.array([hydro.x_average(f.J[0]) for f in res.repeats])
    sigma = profiles.std(axis=0, ddof=1)
    z = np.abs(profiles.mean(axis=0) - hydro.x_average(ref.J[0])) / sigma
    ok = r_rho >= R_RHO_MIN and np.all(z < SIGMAS) and elapsed < SAMPLED_SECONDS
    return report(5, ok, f"r(rho) = {r_rho:.5f} (>= {R_RHO_MIN}), max |dJx|/sigma = {z.max():.2f} "
                         f"(< {SIGMAS:g}), runtime {elapsed:.1f} s (< {SAMPLED_SECONDS:g} s)")


def check_6():
    parts = []
    # (a) potential flow stays irrotational
    worst_omega = 0.0
    for t in TIMES:
        f = oracle.reference_run("diverging", G32, [t], SCHEME)[0]
        region = f.rho > 0.01 * f.rho.max()
        worst_omega = max(worst_omega, np.max(np.abs(f.omega[region])))
    parts.append((worst_omega < OMEGA_TOL, f"(a) max|omega| {worst_omega:.1e}"))
    # (b) mass through the circuit path
    drift = 0.0
    for flow in oracle.FLOWS:
        field0 = oracle.initial_field(flow, G32)
        states0, norms = hydro.encode(field0)
        m0 = hydro.total_mass(hydro.density(field0.normalized()), G32)
        for t in TIMES:
            finals = [apply_circuit(s, circuits.build_evolution(G32.n_x, G32.n_y, t)) for s in states0]
            rho = pipeline.measure(finals, norms, G32, SCHEME).fields.rho
            drift = max(drift, abs(hydro.total_mass(rho, G32) - m0))
    parts.append((drift < MASS_TOL, f"(b) mass drift {drift:.1e}"))
    # (c) vortex energy and enstrophy rise then fall on [0, pi/2]
    ts = np.linspace(0, np.pi / 2, 21)
    runs = oracle.reference_run("vortex", G32, ts, SCHEME)
    for name, series in (("energy", [hydro.kinetic_energy(f, G32) for f in runs]),
                         ("enstrophy", [hydro.enstrophy(f, G32) for f in runs])):
        peak = int(np.argmax(series))
        ok = 0 < peak < len(ts) - 1 and series[peak] > max(series[0], series[-1])
        parts.append((ok, f"(c) {name} {series[0]:.4g} -> peak {series[peak]:.4g} at t={ts[peak]:.3f} "
                          f"-> {series[-1]:.4g}"))
    # (d) theta-averaged vorticity peak decays
    v0, v1 = oracle.reference_run("vortex", G32, [0.0, np.pi / 2], SCHEME)
    p0 = np.nanmax(hydro.theta_average(v0.omega, G32)[1])
    p1 = np.nanmax(hydro.theta_average(v1.omega, G32)[1])
    parts.append((p1 < p0, f"(d) <omega>_theta peak {p0:.3f} -> {p1:.3f}"))
    ok = all(p for p, _ in parts)
    return report(6, ok, "; ".join(d for _, d in parts))


def check_7():
    t = np.pi / 2
    field0 = hydro.init_diverging(G32)
    ref = hydro.flow_fields(oracle.spectral_evolve(field0, t), SCHEME)
    states0, norms = hydro.encode(field0)
    circ = pipeline.native_circuit(states0[0], G32, t)
    # stripes: sampled Z-basis density, three measurement seeds per qubit
    zplan = measurement.MeasurementPlan(["Z" * G32.num_qubits], {})
    freqs = {}
    for q in circuits.axis_qubits(G32.n_x, G32.n_y)[0]:
        final = pipeline.run_circuit(circ, ErrorModel(targets=(q,)))
        seen = set()
        for seed in range(3):
            est = measurement.estimate(final, zplan, SHOTS, REPEATS, seed=[seed, q])
            seen.add(noise.stripe_spectrum(est.density.mean(axis=0).reshape(G32.shape) - ref.rho)[0])
        freqs[q] = seen
    stable = all(len(v) == 1 for v in freqs.values())
    distinct = len({min(v) for v in freqs.values()}) == len(freqs)
    # J_y sensitivity: exact path over noise seeds
    r = np.array([list(noise.correlation_report(pipeline.measure(
        [pipeline.run_circuit(circ, ErrorModel(mode="random-all-qubits", amplitude=0.045, seed=s))],
        norms, G32, SCHEME).fields, ref).values()) for s in NOISE_SEEDS])
    med = np.median(r, axis=0)
    ok = stable and distinct and med[2] < med[1]
    mapping = ", ".join(f"q{q}->{sorted(v)}" for q, v in freqs.items())
    return report(7, ok, f"stripe frequency per x qubit {mapping}; median over {len(NOISE_SEEDS)} seeds "
                         f"r(rho, Jx, Jy) = {med[0]:.3f}, {med[1]:.3f}, {med[2]:.3f}")


def check_8():
    ns = np.arange(2, 9)
    totals = np.array([len(circuits.build_evolution(n, n, 0.3).gates) for n in ns])
    coef = np.polyfit(ns, totals, 2)
    resid = totals - np.polyval(coef, ns)
    r2 = 1 - np.sum(resid ** 2) / np.sum((totals - totals.mean()) ** 2)
    return report(8, r2 > R2_MIN and coef[0] > 0, f"totals {totals.tolist()}, quadratic R^2 = {r2:.6f} (> {R2_MIN})")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8]


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i + 1}" for i in range(len(CHECKS))])
def test_acceptance(check, capsys):
    ok, line = check()
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [c()[0] for c in CHECKS]
    print(f"{sum(results)}/{len(results)} criteria pass")
