"""How a walker picks a direction when someone stands in the way.

A mover at the origin wants to step 2 m forward (+x). A neighbour at (2, 0)
needs 2 m of clearance, so some headings are ruled out. We print the
forbidden arc, the two tangent positions and the chosen heading, then add
more neighbours to show how the free gaps shrink.
"""

import math

from pedcross.geometry import Point, best_angle, candidate_position, exclusion_interval, free_arcs, union

FORWARD = (1.0, 0.0)
ORIGIN = Point(0.0, 0.0)


def show(title, obstacles, step=2.0):
    arcs = [a for centre, clearance in obstacles for a in exclusion_interval(ORIGIN, step, FORWARD, centre, clearance)]
    excluded = union(arcs)
    theta = best_angle(excluded)
    print(f"\n{title}")
    for lo, hi in ((iv.lo, iv.hi) for iv in excluded.intervals):
        print(f"  forbidden  ({math.degrees(lo):7.2f}, {math.degrees(hi):7.2f}) deg")
    for lo, hi in free_arcs(excluded):
        print(f"  free       [{math.degrees(lo):7.2f}, {math.degrees(hi):7.2f}] deg")
    if theta is None:
        print("  blocked in every direction: the walker waits")
        return
    p = candidate_position(ORIGIN, step, FORWARD, theta)
    print(f"  heading {math.degrees(theta):+.2f} deg -> ({p.x:.4f}, {p.y:.4f}), forward progress {p.x:.4f} m")


show("one neighbour dead ahead", [(Point(2.0, 0.0), 2.0)])
show("ahead plus one slightly to the right", [(Point(2.0, 0.0), 2.0), (Point(1.2, -1.6), 0.6)])
show("boxed in", [(Point(2.0, 0.0), 2.0), (Point(0.5, -1.8), 1.2), (Point(0.5, 1.8), 1.2)])
print("\nOn a tie the right-hand heading wins, so the lone neighbour above sends the walker to -60 deg.")
