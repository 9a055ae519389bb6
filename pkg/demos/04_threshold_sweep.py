"""
Suboptimality across a parameter sweep
======================================

Run the three selection algorithms against the exhaustive oracle over a
grid of instance sizes and error scales, store the per-instance records as
CSV, and render the per-cell average suboptimality ratio as charts.
"""

from pathlib import Path

from beamselect import (
    SweepSpec,
    run_sweep,
    save_result,
    soft_claim_violations,
    summarize,
)
from beamselect.plots import render_charts

spec = SweepSpec(
    n_values=(4, 5, 6),
    gamma_max_values=(1.0, 21.0, 41.0),
    beta_values=(0.6,),
    instances_per_cell=30,
    base_seed=0,
)
records = run_sweep(spec)
out = Path("sweep_demo.csv")
save_result(out, records)
print(f"wrote {len(records)} records to {out}")

# Per-cell summaries: in the well-localized regime (gamma_max = 1) greedy is
# provably optimal so its mean SR is exactly 1; the gap opens as the error
# scale grows and the cheap orderings start missing the best subset.
print("\nn  gamma_max  algorithm  mean SR   max SR")
for cell in summarize(records):
    print(f"{cell.n}  {cell.gamma_max:9g}  {cell.algorithm:9s}"
          f"  {cell.mean_sr:7.4f}  {cell.max_sr:7.4f}")

# The replication targets are soft claims: log any cell that strays rather
# than aborting the run.
violations = soft_claim_violations(summarize(records), "avg", spec.base_seed)
print(f"\nsoft-limit violations: {len(violations)}")

for path in render_charts(out, Path(".")):
    print(f"wrote {path}")
