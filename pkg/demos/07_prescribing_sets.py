"""Multivariable equilibrium conditions subject to prescribing sets.

A prescribing set chooses at which corner shifts the product order flips.
On the simplest two-direction system the classification shows how rigid
the multivariable condition is: away from one-variable reductions, every
choice is obstructed.
"""

from latticekms import (
    KmsParams,
    PrescribingSet,
    TracialState,
    check_multikms,
    classify_prescribing_sets,
    enumerate_corners,
    psi_tau_functional,
    sigma_invariance_check,
)

from _demo_systems import trivial

sys2 = trivial(2)
bb = [1.0, 1.0]
print("corners of betabar = (1, 1):")
for i, gamma in enumerate(enumerate_corners(bb)):
    print(f"  {i}: {gamma}")

table = classify_prescribing_sets(sys2, bb)
print("\nclassification of all prescribing sets:")
for row in table.rows:
    print(f"  {row.label:10s} -> {row.verdict}")
    print("     ", row.detail)

# Checking one set directly: both pure corners flipping is contradictory.
tau = TracialState.uniform(sys2.algebra)
psi = psi_tau_functional(sys2, tau, KmsParams(lam=(1.0, 1.0), beta=1.0))
violations = check_multikms(psi, PrescribingSet(bb, [1, 2]), degree=1, tol=1e-8, n_random=0)
print("\nviolations for the set {1,2}:", len(violations))
print("first witness:", violations[0].render())

# In one variable the prescribing condition is the classical one.
sys1 = trivial(1)
tau1 = TracialState.uniform(sys1.algebra)
psi1 = psi_tau_functional(sys1, tau1, KmsParams(lam=(1.0,), beta=1.0))
print("\none-variable set passes:", check_multikms(psi1, PrescribingSet([1.0], [1]), degree=2, tol=1e-8) == [])
print("gauge invariance of the verified functional:", sigma_invariance_check(psi1, (1.0,)))
