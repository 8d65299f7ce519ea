"""Moving families across coarse maps.

Three transfer tools:
  * pushforward along an injective map: every target point borrows the
    member of the nearest image point;
  * the normalized coarse-map model: a section, a displacement bound S,
    a ball bound M, and an injection into (sub-window) x {0..M-1};
  * projection from a product with a finite interval: drop the level
    coordinate, paying at most a factor M in the intersection.
"""

from fractions import Fraction

from folnerflow import (
    Chain,
    CoarseMapModel,
    FamilyParams,
    IndexedFamily,
    ball_family,
    grid_window,
    project_family,
    product_with_interval,
    pushforward_injective,
    subspace,
    verify_family,
)

# pushforward: a 21-point line into the even sublattice of a 41-point line
X = grid_window(1, 0, 20)
big = grid_window(1, 0, 40)
Y = subspace(big, [2 * x for x in range(21)])
fam = ball_family(X, 2, R=1, epsilon=Fraction(2, 3))
out = pushforward_injective(fam, {x: x for x in range(21)}, Y, target_R=2)
print("pushforward along x -> 2x (bijective relabeling):")
print("  worst ratio in:", verify_family(fam).worst_ratio,
      "| out:", verify_family(out).worst_ratio)
print("  support radius in:", verify_family(fam).max_support_radius,
      "| out:", verify_family(out).max_support_radius, "(doubled with the metric)")

# the normalized model: collapse a line onto every third point
coarse = subspace(grid_window(1, 0, 12), [0, 3, 6, 9, 12])
f = {x: min(x // 3, 4) for x in range(13)}
model = CoarseMapModel.build(
    grid_window(1, 0, 12), coarse, f,
    rho_minus=[(0, 0)], rho_plus=[(d, 3 * d + 3) for d in range(13)],
)
print("\ncoarse-map model for 'divide by three':")
print("  displacement bound S =", model.S, "| ball bound M =", model.M)
print("  iota packs all 13 points injectively into", len(model.Z), "x", model.M, "slots")

# projection: a family on line x {0,1,2} collapses to the line; making
# the target epsilon = 1/4 work needs input ratios under (1/4)/M = 1/12,
# so the members are 26-column bands (adjacent ratio 2*M / (25*M) = 2/25)
base = grid_window(1, 0, 60)
M = 3
prod = product_with_interval(base, M)
chains = {
    z * M: Chain.from_set({w * M + i for w in range(z - 12, z + 14) for i in range(M)})
    for z in range(20, 31)
}
pf = IndexedFamily(space=prod, chains=chains,
                   params=FamilyParams(R=1, epsilon=Fraction(1, 12), S=16, M=0))
print("\nprojection from the product:")
print("  worst input ratio:", verify_family(pf).worst_ratio,
      "<", pf.params.epsilon, "as required")
projected = project_family(prod, pf)
print("  output promised <", projected.params.epsilon,
      "| worst output ratio:", verify_family(projected).worst_ratio)
