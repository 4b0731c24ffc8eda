#!/usr/bin/env python3
"""Regenerate the energy-Casimir bifurcation datasets.

Writes one CSV per RE family:

* equal masses, gravitational: the isosceles sheet plus the right-angled
  sheet attached along theta = pi/2,
* masses (3, 2), gravitational: the acute and obtuse sheets, with the fold
  curve of the obtuse sheet in a separate file,
* symmetric top (alpha = 2, gamma = 1): the hanging/upright sheet, the
  horizontal sheet and the two singular threads.

Run from the repository root:  python scripts/bifurcation_surfaces.py out/
"""

import math
import sys
from pathlib import Path

import numpy as np

from spheretop.energy_casimir import ec_csv, ec_surface, singular_thread
from spheretop.phase_space import MassParams, Potential
from spheretop.stability import fold_locus

GRID = (60, 60)
TAU = (-3.0, 3.0)


def write(path: Path, samples) -> None:
    path.write_text(ec_csv(samples))
    print(f"{path}  ({len(samples)} samples)")


def main(out_dir: str = "bifurcation_data") -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    m = MassParams(1.0, 1.0)
    pot = Potential.gravitational(m)
    res = ec_surface("isosceles", (0.1, math.pi - 0.1), TAU, GRID, m, pot)
    write(out / "equal_mass_isosceles.csv", res.samples)
    res = ec_surface("rightAngled", (0, 0), TAU, GRID, m, pot,
                     phi1_range=(0.08, math.pi / 2 - 0.08))
    write(out / "equal_mass_right_angled.csv", res.samples)

    m = MassParams(3.0, 2.0)
    pot = Potential.gravitational(m)
    for family, rng in (("acute", (0.1, math.pi / 2 - 0.05)),
                        ("obtuse", (math.pi / 2 + 0.05, math.pi - 0.1))):
        res = ec_surface(family, rng, TAU, GRID, m, pot)
        write(out / f"mass32_{family}.csv", res.samples)
        if res.failures:
            print(f"  {len(res.failures)} failed nodes recorded")
    rows = ["theta,tau,c0,jacobian_det"]
    for theta in np.linspace(math.pi / 2 + 0.02, 1.86, 40):
        fold = fold_locus(float(theta), m)
        if fold is not None:
            rows.append(f"{theta!r},{fold.tau!r},{fold.c0!r},{fold.jacobian_det!r}")
    (out / "mass32_fold_curve.csv").write_text("\n".join(rows) + "\n")
    print(out / "mass32_fold_curve.csv", f"({len(rows) - 1} fold points)")

    alpha, gamma = 2.0, 1.0
    m = MassParams(1.0 / alpha, 1.0 / alpha)
    pot = Potential.linear(gamma)
    res = ec_surface("isosceles", (0.1, math.pi - 0.1), TAU, GRID, m, pot)
    write(out / "top_polar_sheet.csv", res.samples)
    res = ec_surface("rightAngled", (0, 0), TAU, GRID, m, pot,
                     phi1_range=(-math.pi / 2 + 0.08, -0.08))
    write(out / "top_horizontal_sheet.csv", res.samples)
    write(out / "top_upright_thread.csv",
          singular_thread((0.05, 4.0), 120, m, gamma))
    write(out / "top_hanging_thread.csv",
          singular_thread((0.05, 4.0), 120, m, gamma, antipodal=True))
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
