#!/usr/bin/env python3
"""Sweep the position-operator spectrum over a rational frequency grid and
render the butterfly point cloud as SVG.

Coarser than the full 200x200 figure so it finishes in a couple of seconds;
bump Q_GRID / N_MAX for the real thing.
"""
import os
from pathlib import Path

from deformed_spectra import Truncation, build_position_operator, butterfly_sweep
from deformed_spectra.cli_output import write_csv, write_svg_scatter

Q_GRID = 80
N_MAX = 90

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

result = butterfly_sweep(
    Q_GRID, build_position_operator, Truncation(n_max=N_MAX), threads=os.cpu_count()
)

xs = [result.grid[i][0] / Q_GRID for i in result.row_index]
write_svg_scatter(out / "butterfly.svg", xs, result.row_eigenvalue)
write_csv(
    out / "butterfly.csv",
    ("p", "q", "omega_over_pi", "eigenvalue_index", "eigenvalue"),
    (
        (p, Q_GRID, p / Q_GRID, j, float(ev))
        for gi, (p, _) in enumerate(result.grid)
        for j, ev in enumerate(result.eigenvalues_at(gi))
    ),
)

print(f"swept {Q_GRID} frequencies x {N_MAX} eigenvalues")
print(f"wrote {out / 'butterfly.svg'}")
print(f"wrote {out / 'butterfly.csv'}")
for p in (Q_GRID // 4, Q_GRID // 2):
    ev = result.eigenvalues_at(p - 1)
    print(f"  omega = {p}/{Q_GRID} pi: spectrum in [{ev.min():+.4f}, {ev.max():+.4f}]")
