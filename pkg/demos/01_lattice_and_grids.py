"""Multi-index lattice arithmetic, grids, and the two workhorse sums.

Everything else in the library is built over Z_+^n with its coordinate-wise
order; this script walks the primitives.
"""

import numpy as np

from latticekms import (
    MultiIndex,
    enumerate_grid,
    geometric_grid_sum,
    inclusion_exclusion_sum,
)
from latticekms.lattice import brute_force_grid_sum

# --- lattice operations -----------------------------------------------------

x = MultiIndex((1, 0, 2))
y = MultiIndex((0, 3, 1))
print("x =", x, " y =", y)
print("join:", x.join(y), " meet:", x.meet(y), " degree |x| =", x.degree())
print("supports:", sorted(x.support()), sorted(y.support()), " orthogonal?", x.is_perp(y))
print("x <= y?", x.leq(y))

# --- grids F_m ---------------------------------------------------------------

print("\nF_1 in two dimensions (lexicographic, deterministic):")
print(" ", enumerate_grid(1, 2))
print("|F_3| in three dimensions:", len(enumerate_grid(3, 3)), "= (3+1)^3")

# --- the alternating inclusion-exclusion sum ----------------------------------

# With the full alternation pattern y = (1,...,1) the double sum telescopes
# onto the value at the origin, whatever the sequence is.
rng = np.random.default_rng(0)
pts = enumerate_grid(3, 2)
k = {w: complex(rng.standard_normal(), rng.standard_normal()) for w in pts}
got = inclusion_exclusion_sum(k, MultiIndex((1, 1)), m=3)
print("\nalternating sum:", got)
print("value at origin:", k[MultiIndex((0, 0))])

# With a partial pattern it collapses onto the levels supported away from
# the pattern instead:
partial = inclusion_exclusion_sum(k, MultiIndex((1, 0)), m=3)
check = sum(v for w, v in k.items() if w.support().isdisjoint({0}))
print("partial pattern:", partial, "== sum over w with w_1 = 0:", check)

# --- geometric sums over grids and their exact tails --------------------------

bb = [0.8, 1.4]
for m in (1, 3, 6):
    gs = geometric_grid_sum(bb, m)
    print(
        f"m={m}: partial {gs.partial_sum:.12f} brute {brute_force_grid_sum(bb, m):.12f} "
        f"tail <= {gs.tail_bound:.3e}"
    )
print("full sum:", geometric_grid_sum(bb, 1).full_sum)
