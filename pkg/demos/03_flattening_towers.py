"""Flattening: from weighted families to plain subset families.

A chain with weights above one carries "towers" -- extra copies stacked
on a point. Each shift step keeps one copy everywhere (the base) and
pushes every tower copy one flow edge downstream. The l1 norm never
changes, the support only grows, and after at most norm * tower-mass
steps the chain is 0,1-valued: a plain subset of the window.

Crucially, flattening never worsens the symmetric-difference over
intersection ratio of any pair, so a weighted family that satisfies the
ratio condition turns into a plain subset family that still satisfies it.
"""

from fractions import Fraction

from folnerflow import Chain, flatten, flatten_family, grid_window, shift_step, tent_family
from folnerflow.rips import build_flow, build_rips

line = grid_window(1, -60, 60)
flow = build_flow(line, build_rips(line, 1))

print("a tower of height 4 at one point, step by step:")
a = Chain({40: 4})
step = 0
while not a.is_flat():
    print(f"  step {step}: {dict(sorted(a.items()))}")
    a = shift_step(a, flow)
    step += 1
print(f"  step {step}: {dict(sorted(a.items()))}  <- 0,1-valued, a fixed point now")

b = Chain({40: 3, 41: 2})
flat, trace = flatten(b, flow)
print(f"\nflatten({dict(b)}): support {sorted(flat.support())},",
      f"{trace.steps} steps against budget {trace.bound}")

print("\ntent family: weight peaks at the index and slopes to 0")
fam = tent_family(line, 6, R=1, epsilon=Fraction(1, 4), core=range(75, 105))
x = 90
print("  member at one index:", dict(sorted(fam.chains[x].items())))
out, report = flatten_family(fam, flow)
print("  worst in-range ratio before:", report.worst_ratio_before)
print("  worst in-range ratio after: ", report.worst_ratio_after)
print("  new support radius bound:   ", report.new_S,
      f"(was {fam.params.S}, grew by one flow edge per step)")
print("  flat member at the same index:", sorted(out.chains[x].support()))
