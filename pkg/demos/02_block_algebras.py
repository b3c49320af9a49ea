"""Block C*-algebras, certified endomorphisms, ideal calculus, and states."""

import numpy as np

from latticekms import (
    BlockAlgebra,
    Ideal,
    TracialState,
    endomorphism_from_map,
    is_tracial,
    kernel_ideal,
    preimage_ideal,
    quotient,
    validate_endomorphism,
)

# M_2 (+) C: a two-block algebra
A = BlockAlgebra([2, 1])
print(A, "coordinate dimension", A.coord_dim, "standard rep on C^%d" % A.rep_dim)

rng = np.random.default_rng(1)
a = A.random_element(rng)
print("norm of a random element:", a.norm())
print("||a - a**|| =", (a - a.adjoint().adjoint()).norm())

# A unital *-endomorphism: squeeze everything through the scalar block.
phi = endomorphism_from_map(A, lambda e: A.element([e.blocks[1][0, 0] * np.eye(2), e.blocks[1]]))
print("\ncertificate:", phi.certificate)
print("kernel ideal:", kernel_ideal(phi))
print("its annihilator:", kernel_ideal(phi).annihilator())
print("preimage of the scalar block:", preimage_ideal(phi, Ideal(A, frozenset({1}))))

# A linear map that is NOT multiplicative is reported as data, not raised.
bad = validate_endomorphism(BlockAlgebra([1, 1]), np.array([[1.0, 1.0], [0.0, 0.0]]))
print("\nnon-homomorphism report:", bad)

# Quotients drop blocks; quotienting by everything is flagged degenerate.
q = quotient(A, Ideal(A, frozenset({0})))
print("\nA /", sorted({0}), "=", q.algebra)

# States: general densities vs tracial block weights.
tau = TracialState(A, [0.75, 0.25])
print("\ntracial state weights:", tau.weights)
print("is_tracial of its density form:", is_tracial(tau.as_state()))
b = A.random_element(rng)
print("|tau(ab) - tau(ba)| =", abs(tau(a * b) - tau(b * a)))
