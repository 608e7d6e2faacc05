"""Where a waiting crowd stands before the light turns.

Positions are drawn around the middle of the waiting area, pushed back from
the curb, and then spread out until nobody overlaps. The three families share
a centre and spread but differ in their tails, which shows up in how many
raw draws land inside the waiting rectangle.
"""

import numpy as np

from pedcross.world import PlacementDistribution, Side, draw_raw_positions, make_layout, sample_initial_positions

layout = make_layout(beta=3.0, width=3.6, length=43.62, buffer=0.5)
rng = np.random.default_rng(7)

print("share of raw draws inside the 3.0 m x 3.6 m waiting area (200k draws each)")
for dist in PlacementDistribution:
    xy = draw_raw_positions(layout, Side.LEFT, 200_000, dist, rng)
    inside = (xy[:, 0] >= 0) & (xy[:, 0] <= layout.beta) & (xy[:, 1] >= 0) & (xy[:, 1] <= layout.width)
    print(f"  {dist.value:8s} {inside.mean():.4f}")

crowd = sample_initial_positions(layout, Side.LEFT, 40, PlacementDistribution.NORMAL, rng, radii=0.3)
xs = np.array([p.x for p in crowd])
ys = np.array([p.y for p in crowd])
d = np.hypot(xs[:, None] - xs[None], ys[:, None] - ys[None]) + np.eye(len(crowd)) * 1e9
print(f"\n40 walkers placed; closest pair {d.min():.3f} m apart (footprints need 0.600 m)")
print(f"deepest standing spot {layout.near_curb - xs.min():.2f} m behind the curb")

# a coarse picture: one character per 0.3 m cell, curb on the right
cells_x = np.arange(xs.min() - 0.3, layout.near_curb + 0.3, 0.3)
for row in reversed(np.arange(0, layout.width, 0.3)):
    line = "".join("o" if any((cx <= x < cx + 0.3) and (row <= y < row + 0.3) for x, y in zip(xs, ys)) else "." for cx in cells_x)
    print(f"  {line}|")
