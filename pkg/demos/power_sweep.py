"""A small end-to-end experiment: secrecy rate versus transmit power.

Uses the experiment harness the same way the command line does: declare a
sweep, run every (method, power, seed) cell, write the table, read it
back, and summarize.  The CSV on disk is the deliverable — re-running the
same spec reproduces it byte for byte apart from wall-clock columns.

Run:  python3 demos/power_sweep.py
"""

import tempfile
from pathlib import Path
from statistics import median

from airsdm import (
    ExperimentSpec,
    SweepSpec,
    benchmark_scene,
    emit_results,
    read_results_csv,
    run_experiment,
)

spec = ExperimentSpec(
    sweep=SweepSpec("total_power_dbm", [10.0, 20.0, 30.0]),
    methods=["ldt-cffp", "nsp-mrr-pa/ES", "zero-reflection"],
    scene=benchmark_scene(n_irs=16, n1=8, n2=8, pl_ref_db=-55.0,
                          irs1_pos=(95.0, 15.0, 5.0),
                          irs2_pos=(115.0, 5.0, 5.0)),
    seeds=[1, 2, 3, 4, 5],
)

print("running", len(spec.sweep.values) * len(spec.methods) * len(spec.seeds),
      "cells (3 powers x 3 methods x 5 seeds) ...")
rows = run_experiment(spec)

out = Path(tempfile.mkdtemp()) / "power_sweep"
paths = emit_results(rows, out)
print("wrote", *paths)

back = read_results_csv(paths[0])
print(f"\n{'method':>15} | " + " | ".join(f"{p:>9.0f} dBm" for p in spec.sweep.values))
for method in spec.methods:
    meds = [median(r.sr_bits for r in back
                   if r.method == method and r.sweep_value == p)
            for p in spec.sweep.values]
    print(f"{method:>15} | " + " | ".join(f"{m:>13.4g}" for m in meds))
print("\n(median secrecy rate in bits over 5 seeds)")
print("every method climbs with power.  the surrogate ascent dominates by")
print("orders of magnitude; the blocked pipeline starts microscopic — its")
print("hard orthogonality constraints cost most of the surface's leverage —")
print("but climbs the fastest (~15x per 10 dB: transmit power raises both")
print("its incident signal and its amplification budget).")

flagged = {(r.method, r.sweep_value) for r in back if r.flags}
if flagged:
    print("\ncells with non-converged runs (flagged, kept, never hidden):")
    for m, p in sorted(flagged):
        n = sum(1 for r in back if r.method == m and r.sweep_value == p and r.flags)
        print(f"  {m} at {p:.0f} dBm: {n}/5 seeds hit the iteration cap")
else:
    print("\nflags seen: none — every run converged")
print("\nsame shape of sweep from the shell (default benchmark geometry):")
print("  python3 -m airsdm.cli sweep --power-dbm 10,20,30 --n 16 "
      "--method ldt-cffp,nsp-mrr-pa/ES,zero-reflection "
      "--seeds 1,2,3,4,5 --out sweep")
