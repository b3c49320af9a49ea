"""Invariance ideals, injectivity, and the tail-adding dilation.

The running example is C^2 with the collapse (a, b) |-> (a, a): a unital,
non-injective system whose invariance ideal I_1 is the first coordinate.
"""

from latticekms import (
    BlockAlgebra,
    DynamicalSystem,
    MultiIndex,
    StarEndomorphism,
    TracialState,
    classify_injectivity,
    dilate,
    dilation_trace_functional,
    endomorphism_from_map,
    invariance_ideal,
    shift,
    unit_monomial,
)

A = BlockAlgebra([1, 1])
alpha = endomorphism_from_map(A, lambda e: A.element([e.blocks[0], e.blocks[0]]))
sys = DynamicalSystem(A, [alpha])

print("I_0 =", invariance_ideal(sys, MultiIndex((0,))))
for k in (1, 2, 5):
    print(f"I_{k} =", invariance_ideal(sys, MultiIndex((k,))), "(depends only on the support)")
print("injectivity:", classify_injectivity(sys))

# For a two-direction system the perp sweep is audited:
ident = StarEndomorphism.identity(A)
sys2 = DynamicalSystem(A, [alpha, ident])
ideal, level = invariance_ideal(sys2, MultiIndex((1, 0)), audit=True)
print("\nI_(1,0) =", ideal, "perp sweep stabilized at level", level)

# The truncated tail-adding dilation: B = A (+) A/I_1 (+) A/I_2 (+) ...
dil = dilate(sys, 3)
print("\ndilated algebra:", dil.algebra)
for lvl in dil.levels:
    tag = "  (boundary)" if lvl.index in dil.boundary else ""
    print("  level", tuple(lvl.index), "keeps blocks", lvl.retained_blocks, tag)
print("compression of the dilated action back to level 0 defect:", dil.compression_defects)
print("interior injectivity (min singular value):", dil.interior_min_singular)

# A compatible trace on the dilation induces a tracial functional on the
# monomial algebra; the constructor verifies traciality before returning.
tau = TracialState(dil.algebra, [1.0, 0.0, 0.0, 0.0, 0.0])
psi = dilation_trace_functional(sys, tau, dilation=dil, degree_bound=1)
print("\ninduced tracial functional:")
print("  psi(1) =", psi(unit_monomial(sys)))
for k in (1, 2):
    v = shift(sys, MultiIndex((k,)))
    from latticekms import multiply

    print(f"  psi(V{k} V{k}*) =", psi(multiply(v, v.adjoint())))
