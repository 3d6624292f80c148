"""Shot-noise limits on the sampled diverging-flow run at t = pi/4.

Compares the measured r(rho) over many seeds with the binomial prediction
r^2 = var(p) / (var(p) + mean p(1-p) / shots), and reports how often the
x-averaged J_x profile stays within 3 sigma of the oracle.
"""

import argparse

import numpy as np

from qfluid import hydro, noise, oracle, pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--shots", type=int, default=100_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    grid, t, scheme = hydro.Grid2D(5, 5), np.pi / 4, "one-sided-at-boundary"
    field0 = hydro.init_diverging(grid)
    ref = hydro.flow_fields(oracle.spectral_evolve(field0, t), scheme)
    states, norms = hydro.encode(field0)
    finals = [pipeline.run_circuit(pipeline.native_circuit(s, grid, t)) for s in states]
    p = finals[0].probabilities()
    total = args.shots * args.repeats
    predicted = np.sqrt(p.var() / (p.var() + np.mean(p * (1 - p)) / total))
    refp = hydro.x_average(ref.J[0])
    rs, zs = [], []
    for k in range(args.seeds):
        res = pipeline.measure(finals, norms, grid, scheme, args.shots, args.repeats, seed=[k, 1])
        prof = np.array([hydro.x_average(f.J[0]) for f in res.repeats])
        zs.append(np.max(np.abs(prof.mean(axis=0) - refp) / prof.std(axis=0, ddof=1)))
        rs.append(noise.pearson(res.fields.rho, ref.rho))
    rs, zs = np.array(rs), np.array(zs)
    print(f"predicted r(rho) = {predicted:.5f}; measured median {np.median(rs):.5f}, "
          f"fraction >= 0.999: {np.mean(rs >= 0.999):.2f}")
    print(f"max |dJx|/sigma: median {np.median(zs):.2f}, fraction < 3: {np.mean(zs < 3):.2f}")


if __name__ == "__main__":
    main()
