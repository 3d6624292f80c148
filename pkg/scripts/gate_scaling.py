"""Gate counts of the evolution circuit versus per-axis qubit count, with a quadratic fit."""

import argparse
from pathlib import Path

import numpy as np

from qfluid import circuits, io, pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/gate_scaling.csv")
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()
    ns = np.arange(2, args.max_n + 1)
    cols = {"n": ns, "builder_total": [], "native_u3": [], "native_cz": [], "native_depth": []}
    for n in ns:
        evo = circuits.build_evolution(n, n, 0.3)
        native = circuits.gate_count_report(circuits.transpile(evo, pipeline.make_topology("all-to-all", 2 * n)))
        cols["builder_total"].append(len(evo.gates))
        cols["native_u3"].append(native["single_qubit"])
        cols["native_cz"].append(native["two_qubit"])
        cols["native_depth"].append(native["depth"])
    totals = np.array(cols["builder_total"])
    coef = np.polyfit(ns, totals, 2)
    r2 = 1 - np.sum((totals - np.polyval(coef, ns)) ** 2) / np.sum((totals - totals.mean()) ** 2)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    io.write_table_csv(args.out, cols)
    print(f"totals {totals.tolist()}; fit {coef.round(3).tolist()}, R^2 = {r2:.6f}")


if __name__ == "__main__":
    main()
