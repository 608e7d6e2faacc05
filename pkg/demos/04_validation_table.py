"""Simulated versus observed crossing times for the five field records.

Each record is run ten times with consecutive seeds; the table reports the
mean cohort time, the observed time and the percent accuracy for each of
the three placement families.
"""

from pedcross.engine import estimate_crossing_time
from pedcross.scenario import accuracy, builtin_validation_scenarios

print(f"{'record':8s} {'observed':>8s}  " + "  ".join(f"{p:>15s}" for p in ("normal", "poisson", "t")))
per_family = {}
for placement in ("normal", "poisson", "t"):
    for rec in builtin_validation_scenarios(placement):
        per_family.setdefault(rec.name, {"actual": rec.actual_time})[placement] = estimate_crossing_time(rec.scenario, runs=10).mean

for name, row in per_family.items():
    cells = "  ".join(f"{row[p]:6.1f} ({accuracy(row[p], row['actual']):5.1f}%)" for p in ("normal", "poisson", "t"))
    print(f"{name:8s} {row['actual']:8.0f}  {cells}")
