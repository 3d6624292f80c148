"""Command-line driver: run, report, noise-sweep, plan, circuit.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import circuits, hydro, io, measurement, noise, oracle, pipeline

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
FIELD_COLUMNS = ("rho", "jx", "jy", "ux", "uy", "omega")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    flow: str = "diverging"
    n_x: int = 5
    n_y: int = 5
    times: tuple = (0.0, math.pi / 4, math.pi / 2)
    shots: int = 100_000
    repeats: int = 5
    seed: int = 0
    scheme: str = "one-sided-at-boundary"
    error_model: dict | None = None
    out: str = "runs/out"
    exact: bool = False
    topology: str = "all-to-all"
    varrho: float = 1.0
    r0: float = 3.0
    variant: str = "double-f"
    qubits: tuple | None = None  # noise sweep; default x register
    seeds: tuple = (0,)  # noise sweep

    def __post_init__(self):
        self.times = tuple(float(t) for t in self.times)
        self.seeds = tuple(int(s) for s in self.seeds)
        if self.qubits is not None:
            self.qubits = tuple(int(q) for q in self.qubits)
        if self.flow not in oracle.FLOWS:
            raise ConfigError(f"unknown flow {self.flow!r}; choose from {oracle.FLOWS}")
        if self.n_x < 1 or self.n_y < 1:
            raise ConfigError("n_x and n_y must be >= 1")
        if not self.times or not all(math.isfinite(t) for t in self.times):
            raise ConfigError("times must be a nonempty list of finite numbers")
        if not self.exact and (self.shots < 1 or self.repeats < 1):
            raise ConfigError("shots and repeats must be >= 1 when sampling")
        if self.seed < 0 or any(s < 0 for s in self.seeds):
            raise ConfigError("seeds must be non-negative")
        if self.scheme not in hydro.SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose from {hydro.SCHEMES}")
        if self.topology not in pipeline.TOPOLOGIES:
            raise ConfigError(f"unknown topology {self.topology!r}; choose from {pipeline.TOPOLOGIES}")
        if self.error_model is not None:
            self.model()

    @property
    def grid(self) -> hydro.Grid2D:
        return hydro.Grid2D(self.n_x, self.n_y)

    def flow_params(self) -> dict:
        if self.flow == "diverging":
            return {"varrho": self.varrho}
        return {"r0": self.r0, "variant": self.variant}

    def model(self):
        if self.error_model is None:
            return None
        try:
            return noise.ErrorModel(**self.error_model)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid error model: {exc}") from None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if "config" in data and isinstance(data["config"], dict):
            data = data["config"]  # a run manifest
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# argument parsing

_NUM = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*(pi)?\s*(?:/\s*(\d+\.?\d*))?$")


def parse_number(text: str) -> float:
    """Accepts plain numbers and multiples of pi such as ``pi/4`` or ``-3*pi/4``."""
    m = _NUM.match(text.strip())
    if not m or not (m.group(1) not in ("", "+", "-") or m.group(2)):
        raise ConfigError(f"cannot parse number {text!r}")
    coef = m.group(1)
    value = float(coef + "1") if coef in ("", "+", "-") else float(coef)
    if m.group(2):
        value *= math.pi
    if m.group(3):
        value /= float(m.group(3))
    return value


def parse_list(text: str, conv=int):
    """Comma list, or ``a:b`` for range(a, b)."""
    text = text.strip()
    if re.fullmatch(r"\d+:\d+", text):
        a, b = map(int, text.split(":"))
        return tuple(range(a, b))
    return tuple(conv(t) for t in text.split(",") if t.strip())


_FLAG_KEYS = {"flow": "flow", "nx": "n_x", "ny": "n_y", "times": "times", "shots": "shots",
              "repeats": "repeats", "seed": "seed", "scheme": "scheme", "out": "out",
              "exact": "exact", "topology": "topology", "varrho": "varrho", "r0": "r0",
              "variant": "variant", "qubits": "qubits", "seeds": "seeds"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfluid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config (or run manifest); overrides flags")
        p.add_argument("--flow", choices=oracle.FLOWS)
        p.add_argument("--nx", type=int)
        p.add_argument("--ny", type=int)
        p.add_argument("--times", help="comma list, e.g. 0,pi/4,pi/2")
        p.add_argument("--shots", type=int)
        p.add_argument("--repeats", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--scheme", choices=hydro.SCHEMES)
        p.add_argument("--error-model", dest="error_model", help="error-model JSON file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--exact", action="store_true", default=None, help="skip sampling")
        p.add_argument("--topology", choices=pipeline.TOPOLOGIES)
        p.add_argument("--varrho", type=float)
        p.add_argument("--r0", type=float)
        p.add_argument("--variant", choices=hydro.VORTEX_VARIANTS)

    p = sub.add_parser("run", help="circuit and oracle paths; writes fields and profiles")
    common(p)
    p = sub.add_parser("report", help="summarize a finished run directory")
    p.add_argument("run_dir")
    p = sub.add_parser("noise-sweep", help="inject errors over a qubit/seed grid")
    common(p)
    p.add_argument("--qubits", help="physical qubits, e.g. 5,6,7,8,9 (default: x register)")
    p.add_argument("--seeds", help="seed list or range a:b")
    p = sub.add_parser("plan", help="emit the measurement plan")
    common(p)
    p = sub.add_parser("circuit", help="emit serialized circuits and gate counts")
    common(p)
    return parser


def config_from_args(args) -> RunConfig:
    data = {}
    for flag, key in _FLAG_KEYS.items():
        v = getattr(args, flag, None)
        if v is None:
            continue
        if key == "times":
            v = tuple(parse_number(t) for t in v.split(","))
        elif key in ("qubits", "seeds"):
            v = parse_list(v)
        data[key] = v
    if getattr(args, "error_model", None):
        try:
            data["error_model"] = json.loads(Path(args.error_model).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read error model: {exc}") from None
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if "config" in loaded and isinstance(loaded["config"], dict):
            loaded = loaded["config"]
        data.update(loaded)
    return RunConfig.from_dict(data)


# ---------------------------------------------------------------------------
# commands


def _prepare_out(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise RuntimeError(f"output path not writable: {exc}") from None
    return out


def _field_columns(f: hydro.FlowFields) -> dict:
    return dict(zip(FIELD_COLUMNS, (f.rho, f.J[0], f.J[1], f.u[0], f.u[1], f.omega)))


def correlations(got, ref) -> dict:
    """Pearson r per field; None where the reference field is flat (e.g. J_y at t=0)."""
    out = {}
    scale = max(np.abs(ref.rho).max(), np.abs(ref.J).max())
    for key, a, b in (("r_rho", got.rho, ref.rho), ("r_jx", got.J[0], ref.J[0]), ("r_jy", got.J[1], ref.J[1])):
        if np.std(b) <= 1e-10 * scale:
            out[key] = None
            continue
        try:
            out[key] = noise.pearson(a, b)
        except ValueError:
            out[key] = None
    return out


def _fmt_r(v) -> str:
    return f"{v:.5f}" if v is not None else "n/a"


def _std(arrays):
    arrays = np.asarray(arrays)
    return arrays.std(axis=0, ddof=1) if arrays.shape[0] > 1 else np.zeros(arrays.shape[1:])


def cmd_run(cfg: RunConfig, log=print) -> Path:
    out = _prepare_out(cfg.out)
    grid = cfg.grid
    model = cfg.model()
    field0 = oracle.initial_field(cfg.flow, grid, **cfg.flow_params())
    states0, norms = hydro.encode(field0)
    dec = measurement.decompose_momentum_set(grid, cfg.scheme)
    plan = measurement.full_plan(grid, cfg.scheme)
    io.write_json(out / "plan.json", plan.to_json())
    mass0 = hydro.total_mass(hydro.flow_fields(field0, cfg.scheme).rho, grid)
    summary = {"plan": {"strings": len(dec.strings), "bases": len(plan.bases),
                        "momentum_bases": len(plan.bases) - 1}, "times": []}
    for i, t in enumerate(cfg.times):
        ref = hydro.flow_fields(oracle.spectral_evolve(field0, t), cfg.scheme)
        finals, counts = [], []
        for c, s0 in enumerate(states0):
            circ = pipeline.native_circuit(s0, grid, t, cfg.topology)
            counts.append({k: v for k, v in circuits.gate_count_report(circ).items() if k != "by_kind"})
            finals.append(pipeline.run_circuit(circ, model, (i, c)))
        shots = None if cfg.exact else cfg.shots
        res = pipeline.measure(finals, norms, grid, cfg.scheme, shots, cfg.repeats, [cfg.seed, i], plan)
        got = res.fields
        io.write_field_csv(out / f"oracle_t{i}.csv", grid, _field_columns(ref))
        io.write_field_csv(out / f"circuit_t{i}.csv", grid, _field_columns(got))
        prof = [hydro.profiles_and_integrals(f, grid) for f in res.repeats]
        pmean = hydro.profiles_and_integrals(got, grid)
        pref = hydro.profiles_and_integrals(ref, grid)
        io.write_table_csv(out / f"profiles_t{i}.csv", {
            "y": grid.y,
            **{f"{k}": pmean[k] for k in ("rho_x", "Jx_x", "Jy_x")},
            **{f"{k}_std": _std([p[k] for p in prof]) for k in ("rho_x", "Jx_x", "Jy_x")},
            **{f"{k}_oracle": pref[k] for k in ("rho_x", "Jx_x", "Jy_x")}})
        io.write_table_csv(out / f"vorticity_t{i}.csv", {
            "r": pmean["r"], "omega_theta": pmean["omega_theta"],
            "omega_theta_std": _std([p["omega_theta"] for p in prof]),
            "omega_theta_oracle": pref["omega_theta"], "bin_count": pmean["bin_counts"]})
        if shots is not None:
            for c, est in enumerate(res.estimates):
                io.write_results_csv(out / f"results_t{i}_c{c}.csv", est, plan.bases)
        entry = {
            "index": i, "t": t, "gate_counts": counts,
            "correlations": correlations(got, ref),
            "mass": pmean["mass"], "mass_oracle": pref["mass"],
            "conservation_residual": abs(pmean["mass"] - mass0),
            "max_dev_rho": float(np.abs(got.rho - ref.rho).max()),
            "max_dev_J": float(np.abs(got.J - ref.J).max()),
            "kinetic_energy": pmean["kinetic_energy"], "kinetic_energy_oracle": pref["kinetic_energy"],
            "enstrophy": pmean["enstrophy"], "enstrophy_oracle": pref["enstrophy"],
        }
        summary["times"].append(entry)
        log(f"t={t:.6g}: r_rho={_fmt_r(entry['correlations']['r_rho'])} "
            f"max|drho|={entry['max_dev_rho']:.3e} max|dJ|={entry['max_dev_J']:.3e}")
    io.write_json(out / "summary.json", summary)
    io.write_manifest(out, cfg.to_dict(), cfg.seed, {"norms": list(norms)})
    return out


def load_run(run_dir):
    run_dir = Path(run_dir)
    try:
        manifest = io.read_json(run_dir / "manifest.json")
        summary = io.read_json(run_dir / "summary.json")
    except (OSError, json.JSONDecodeError):
        raise RuntimeError(f"incomplete run: {run_dir} lacks a readable manifest.json/summary.json") from None
    for name, digest in manifest.get("files", {}).items():
        p = run_dir / name
        if not p.is_file() or io.file_digest(p) != digest:
            raise RuntimeError(f"incomplete run: {name} missing or modified")
    return manifest, summary


def cmd_report(run_dir, log=print) -> list:
    manifest, summary = load_run(run_dir)
    cfg = manifest["config"]
    lines = [f"run {run_dir}: flow={cfg['flow']} grid={2 ** cfg['n_x']}x{2 ** cfg['n_y']} "
             f"scheme={cfg['scheme']} exact={cfg['exact']} seed={manifest['seed']}",
             f"plan: {summary['plan']['strings']} strings, {summary['plan']['momentum_bases']} momentum bases "
             f"(+1 density basis = {summary['plan']['bases']})"]
    header = f"{'t':>9} {'1q':>6} {'2q':>6} {'depth':>6} {'r_rho':>9} {'r_jx':>9} {'r_jy':>9} {'mass_resid':>11}"
    lines.append(header)
    for e in summary["times"]:
        g = e["gate_counts"][0]
        r = e["correlations"]
        lines.append(f"{e['t']:9.5f} {g['single_qubit']:6d} {g['two_qubit']:6d} {g['depth']:6d} "
                     f"{_fmt_r(r['r_rho']):>9} {_fmt_r(r['r_jx']):>9} {_fmt_r(r['r_jy']):>9} "
                     f"{e['conservation_residual']:11.3e}")
    for line in lines:
        log(line)
    return lines


def default_x_qubits(cfg: RunConfig):
    return tuple(circuits.axis_qubits(cfg.n_x, cfg.n_y)[0])


def cmd_noise_sweep(cfg: RunConfig, log=print) -> Path:
    model = cfg.model()
    if model is None:
        raise ConfigError("noise-sweep needs an error model (--error-model)")
    out = _prepare_out(cfg.out)
    grid = cfg.grid
    t = cfg.times[-1]
    field0 = oracle.initial_field(cfg.flow, grid, **cfg.flow_params())
    states0, norms = hydro.encode(field0)
    ref = hydro.flow_fields(oracle.spectral_evolve(field0, t), cfg.scheme)
    circs = [pipeline.native_circuit(s, grid, t, cfg.topology) for s in states0]
    shots = None if cfg.exact else cfg.shots
    clean = pipeline.measure([pipeline.run_circuit(c) for c in circs], norms, grid, cfg.scheme,
                             shots, cfg.repeats, [cfg.seed, 0]).fields
    fixed = model.mode == "fixed-single-qubit"
    qubits = (cfg.qubits or default_x_qubits(cfg)) if fixed else ("all",)
    rows, profiles = [], []
    for q in qubits:
        for s in cfg.seeds:
            m = noise.ErrorModel(**{**asdict(model), "targets": (q,)}) if fixed else \
                noise.ErrorModel(**{**asdict(model), "seed": s})
            finals = [pipeline.run_circuit(c, m, (c_idx,)) for c_idx, c in enumerate(circs)]
            got = pipeline.measure(finals, norms, grid, cfg.scheme, shots, cfg.repeats, [cfg.seed, s]).fields
            freq, power = noise.stripe_spectrum(got.rho - ref.rho, "x")
            r = correlations(got, ref)
            rows.append((q, s, freq, power, r["r_rho"], r["r_jx"], r["r_jy"]))
            for y, a, b in zip(grid.y, hydro.x_average(got.J[1]), hydro.x_average(ref.J[1])):
                profiles.append((q, s, y, a, b))
            log(f"qubit={q} seed={s} freq={freq} power={power:.3f} r_rho={_fmt_r(r['r_rho'])} "
                f"r_jx={_fmt_r(r['r_jx'])} r_jy={_fmt_r(r['r_jy'])}")
    io.write_rows_csv(out / "sweep.csv", ["qubit", "seed", "freq", "power", "r_rho", "r_jx", "r_jy"], rows)
    io.write_rows_csv(out / "jy_profiles.csv", ["qubit", "seed", "y", "jy_x", "jy_x_oracle"], profiles)
    io.write_json(out / "noiseless.json", {"t": t, **correlations(clean, ref)})
    io.write_manifest(out, cfg.to_dict(), cfg.seed)
    return out


def cmd_plan(cfg: RunConfig, log=print) -> Path:
    out = _prepare_out(cfg.out)
    dec = measurement.decompose_momentum_set(cfg.grid, cfg.scheme)
    plan = measurement.full_plan(cfg.grid, cfg.scheme)
    io.write_json(out / "plan.json", plan.to_json())
    log(f"{cfg.scheme}: {len(dec.strings)} momentum strings -> {len(plan.bases) - 1} bases "
        f"(+1 density basis = {len(plan.bases)})")
    io.write_manifest(out, cfg.to_dict(), cfg.seed)
    return out


def cmd_circuit(cfg: RunConfig, log=print) -> Path:
    out = _prepare_out(cfg.out)
    grid = cfg.grid
    topo = pipeline.make_topology(cfg.topology, grid.num_qubits)
    field0 = oracle.initial_field(cfg.flow, grid, **cfg.flow_params())
    states0, _ = hydro.encode(field0)
    report = {"topology": cfg.topology, "evolution": [], "prep": []}
    for c, s in enumerate(states0):
        prep = circuits.amplitude_encode(s.amplitudes)
        native = circuits.transpile(prep, topo)
        (out / f"prep_c{c}.txt").write_text(circuits.dumps(prep))
        (out / f"prep_c{c}_native.txt").write_text(circuits.dumps(native))
        report["prep"].append({"component": c, "builder": circuits.gate_count_report(prep),
                               "native": circuits.gate_count_report(native)})
    for i, t in enumerate(cfg.times):
        evo = circuits.build_evolution(grid.n_x, grid.n_y, t)
        native = circuits.transpile(evo, topo)
        (out / f"evolution_t{i}.txt").write_text(circuits.dumps(evo))
        (out / f"evolution_t{i}_native.txt").write_text(circuits.dumps(native))
        entry = {"index": i, "t": t, "builder": circuits.gate_count_report(evo),
                 "native": circuits.gate_count_report(native)}
        report["evolution"].append(entry)
        n = entry["native"]
        log(f"t={t:.6g}: evolution {entry['builder']['total']} gates; native {n['single_qubit']} U3 + "
            f"{n['two_qubit']} CZ, depth {n['depth']}, aligned depth {n['aligned_depth']}")
    io.write_json(out / "gate_counts.json", report)
    io.write_manifest(out, cfg.to_dict(), cfg.seed)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "report":
            cmd_report(args.run_dir)
            return EXIT_OK
        cfg = config_from_args(args)
        {"run": cmd_run, "noise-sweep": cmd_noise_sweep, "plan": cmd_plan,
         "circuit": cmd_circuit}[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
