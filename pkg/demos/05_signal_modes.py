"""Three ways to run the signals at a four-leg intersection.

Static uses a fixed 140 s cycle. Dynamic sizes each green from the queue it
serves. Dynamic-with-estimate also sizes each walk phase from a simulated
crossing of the crowd actually waiting. We compare waits at field demand and
then double the pedestrian flow.
"""

import sys

from pedcross.tls import compare_modes, field_demand

seeds = list(range(int(sys.argv[1]) if len(sys.argv) > 1 else 3))
base = field_demand()


def table(title, demand):
    print(f"\n{title} ({len(seeds)} seeds)")
    print(f"  {'mode':12s} {'vehicle_awt':>11s} {'ped_awt':>8s} {'ped_max':>8s} {'stranded':>8s}")
    rows = compare_modes(demand, seeds)
    for r in rows:
        print(f"  {r.mode:12s} {r.vehicle_awt:11.1f} {r.pedestrian_awt:8.1f} {r.pedestrian_max_wait:8.0f} {r.stranded_pedestrians:8d}")
    return {r.mode: r for r in rows}


field = table("field demand: 990 vehicles and 522 pedestrians per hour", base)
doubled = table("same traffic, twice the pedestrians", base.scaled(1.0, 2.0))

static = field["static"].vehicle_awt
print()
for mode in ("dynamic", "dynamic_pcs"):
    print(f"{mode}: vehicle wait {100 * (1 - field[mode].vehicle_awt / static):.0f}% below static")
for mode, r in doubled.items():
    print(f"{mode}: vehicle wait rises {r.vehicle_awt - field[mode].vehicle_awt:+.1f} s with twice the walkers")
