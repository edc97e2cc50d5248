"""
Sweeping the design space
=========================

Presets reproduce the usual parameter studies: cluster count against field
size, and base-station distance against head-set size.
"""

import sys

import numpy as np

from cbhrp import harness

rows = [r for r in harness.run_sweep(harness.preset("fig1")) if r["status"] == "ok"]
ks = sorted({r["k"] for r in rows})
diameters = sorted({r["network_diameter"] for r in rows})
grid = np.full((len(ks), len(diameters)), np.nan)
for r in rows:
    grid[ks.index(r["k"]), diameters.index(r["network_diameter"])] = r["e_round"]

print("energy per round (J), rows k, columns field size")
print("      " + "".join(f"{d:>9.0f}" for d in diameters))
for k, line in zip(ks, grid):
    print(f"{k:5d} " + "".join(f"{v:9.2f}" for v in line))
print("best k per field size:", [ks[i] for i in np.nanargmin(grid, axis=0)])

rows = [r for r in harness.run_sweep(harness.preset("fig2")) if r["status"] == "ok"]
print("\nenergy per round (J) as the base station moves away")
for m in sorted({r["m"] for r in rows}):
    series = sorted((r["d_bs"], r["e_round"]) for r in rows if r["m"] == m)
    print(f"m={m:2d}: " + " ".join(f"{e:6.2f}" for _, e in series))

# The same sweeps can add simulated lifetimes and go straight to CSV.
spec = harness.preset("fig3", seeds=(7,), mode="both")
harness.write_csv(harness.run_sweep(spec)[:3], sys.stdout, harness.HEADER)
