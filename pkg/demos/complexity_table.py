"""How the four precoders scale in cost as users are added.

Prints FLOPs per coherence interval for N=32 antennas, G=4 groups and T=100
symbols, then the savings of the grouped schemes relative to their
full-dimensional counterparts.
"""

from precode_lab.complexity import CostQuery, flops

SCHEMES = ("thp", "rzf", "hl-thp", "pgp-rzf")

print(f"{'K':>4}" + "".join(f"{s:>14}" for s in SCHEMES))
for K in (8, 16, 24, 32):
    costs = {s: flops(CostQuery(s, K=K, N=32, G=4, T=100)).flops for s in SCHEMES}
    print(f"{K:>4}" + "".join(f"{costs[s]:>14,.0f}" for s in SCHEMES))
    saving_thp = 1 - costs["hl-thp"] / costs["thp"]
    saving_rzf = 1 - costs["pgp-rzf"] / costs["rzf"]
    print(f"      grouping saves {saving_thp:.0%} over THP and {saving_rzf:.0%} over RZF")

# Where does the THP budget go?  The breakdown is additive.
result = flops(CostQuery("thp", K=16, N=32, T=100))
print("\nTHP at K=16 by operation:")
for name, value in result.breakdown.items():
    print(f"  {name:<24}{value:>12,.1f}")
