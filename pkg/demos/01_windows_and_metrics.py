"""Windows: finite pieces of infinite spaces with exact metrics.

Every generator marks a *frontier*: the points whose neighbourhoods were
cut off by truncation. The frontier is what downstream constructions use
to tell "this component runs off to infinity" from "this component is
genuinely bounded".
"""

from folnerflow import (
    cycle_window,
    disjoint_union,
    grid_window,
    growth_profile,
    regular_tree_window,
)

line = grid_window(1, -5, 5)
print(f"{line.label}: {line.n} points, frontier = {sorted(line.frontier)}")
print("  d(leftmost, rightmost) =", line.dist(0, line.n - 1))
print("  ball(centre, 2) has", len(line.ball(5, 2)), "points")

plane = grid_window(2, -3, 3)
profile = growth_profile(plane, [1, 2, 3])
print(f"\n{plane.label}: growth profile over interior points")
for r, v in sorted(profile.values.items()):
    print(f"  radius {r}: max ball size {v}")

tree = regular_tree_window(3, 4)
print(f"\n{tree.label}: {tree.n} points,", len(tree.frontier), "leaves on the frontier")
print("  ball(root, 2) =", len(tree.ball(0, 2)), "points (1 + 3 + 6)")

loop = cycle_window(9)
print(f"\n{loop.label}: frontier is empty -> a bounded space, nothing is truncated")

union = disjoint_union([cycle_window(3), cycle_window(9)], [6, 6])
print(f"\n{union.label}: cross distances are spacing + hops to each part's basepoint")
print("  d(part0 point 1, part1 point 4) =", union.dist(1, 3 + 4), "= 6 + 1 + 4")
