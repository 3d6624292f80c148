"""Pauli-string and measurement-basis counts for the 10-qubit momentum set, per scheme."""

from qfluid import hydro, measurement


def main():
    grid = hydro.Grid2D(5, 5)
    for scheme in hydro.SCHEMES:
        dec = measurement.decompose_momentum_set(grid, scheme)
        plan = measurement.full_plan(grid, scheme)
        sizes = sorted((len(plan.strings_for(i)) for i in range(1, len(plan.bases))), reverse=True)
        print(f"{scheme}: {len(dec.strings)} strings -> {len(plan.bases) - 1} momentum bases "
              f"(+1 density basis); largest groups {sizes[:5]}")


if __name__ == "__main__":
    main()
