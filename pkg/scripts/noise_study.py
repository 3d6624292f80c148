"""Coherent-error study on the diverging flow at t = pi/2.

Fixed RX(0.025) on each x-register qubit (stripe frequencies, on two
topologies) and random U3 errors at amplitude 0.045 over a seed range.
"""

import argparse
import json
from pathlib import Path

import numpy as np

from qfluid import io
from qfluid.cli import RunConfig, cmd_noise_sweep


def sweep(out, model, seeds, topology, exact):
    cfg = RunConfig(flow="diverging", times=(np.pi / 2,), error_model=model, seeds=seeds,
                    topology=topology, exact=exact, out=str(out))
    cmd_noise_sweep(cfg, log=lambda *_: None)
    return io.read_rows_csv(out / "sweep.csv")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/noise")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--sampled", action="store_true", help="sample at the default shot budget")
    args = ap.parse_args()
    out = Path(args.out)
    fixed = {"mode": "fixed-single-qubit", "kind": "RX", "params": [0.025], "targets": [0]}
    summary = {}
    for topology in ("all-to-all", "ladder"):
        rows = sweep(out / f"stripes_{topology}", fixed, (0, 1), topology, not args.sampled)
        freq = {r["qubit"]: int(r["freq"]) for r in rows}
        summary[f"stripe_freq_{topology}"] = freq
        print(f"{topology}: dominant stripe frequency per x qubit {freq}")
    rows = sweep(out / "random", {"mode": "random-all-qubits", "amplitude": 0.045},
                 tuple(range(args.seeds)), "all-to-all", not args.sampled)
    r = np.array([[float(row[k]) for k in ("r_rho", "r_jx", "r_jy")] for row in rows])
    med = np.median(r, axis=0)
    summary["random_median_r"] = dict(zip(("rho", "jx", "jy"), med.tolist()))
    print(f"random U3, {args.seeds} seeds: median r(rho, Jx, Jy) = {med.round(3).tolist()}")
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
