"""Star graphs, twist domains, and lattice diagnostics.

The recursion sums over star graphs: a central vertex holding the
distinguished marking, outer vertices joined by parallel edges carrying
positive twist variables.  Each graph contributes a polytope integral;
integrality of k times the twists links the integrals to lattice counts.
"""

from fractions import Fraction

from flatvol import (
    WeightVector,
    domain_of,
    enumerate_star_graphs,
    enumerate_k_twists,
    riemann_diagnostic,
)

for g, n in ((0, 4), (1, 1), (1, 2), (2, 1)):
    graphs = enumerate_star_graphs(g, tuple(range(1, n + 1)), 1)
    print(f"(g={g}, n={n}): {len(graphs)} graphs")
    for gph in graphs:
        print("   ", gph.encode())

# at a numeric weight vector the twist domain of each graph becomes
# a concrete cascade of simplices; some are empty and drop out
print("\ntwist domains at g=1, alpha=(1/2, 3/2):")
w = WeightVector(1, (Fraction(1, 2), Fraction(3, 2)))
for gph in enumerate_star_graphs(1, (1, 2), 1):
    dom = domain_of(gph, w.weight_map())
    levels = [str(lv) for lv in dom.levels]
    print(f"    {gph.encode(w.weight_map()):<40} levels {levels}")

# swapping which marking is distinguished relabels the expansion but
# not the value; at (3/2, 1/2) the two-edge graph survives with a
# one-dimensional twist domain
w2 = WeightVector(1, (Fraction(3, 2), Fraction(1, 2)))
two_edge = [
    gph for gph in enumerate_star_graphs(1, (1, 2), 1)
    if gph.outer and gph.outer[0].edges == 2
][0]
print(f"\nk-twists of {two_edge.encode(w2.weight_map())} at k=8:")
for pt in enumerate_k_twists(two_edge, w2.weight_map(), 8):
    print("   ", tuple(str(b) for b in pt[0]))

# k-twists: twist tuples whose entries become integral after scaling
# by k; counting them Riemann-approximates the polytope integral
print("\nlattice sum vs exact integral (errors shrink like 1/k^2):")
print(f"{'graph':<34} {'k':>4} {'lattice':>12} {'exact':>10} {'rel_error':>10}")
for row in riemann_diagnostic(w2, (20, 40, 80)):
    print(f"{row.graph:<34} {row.k:>4} {str(row.lattice):>12} "
          f"{str(row.exact):>10} {row.rel_error:>10.2e}")
