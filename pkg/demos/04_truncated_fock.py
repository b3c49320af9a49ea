"""The truncated Fock representation and its scoped relation checks.

Shifts on a finite grid are only partial isometries; every identity is
therefore asserted on the declared safe subspace, where the truncation
boundary is out of reach and the relations hold exactly.
"""

import numpy as np

from latticekms import (
    Monomial,
    MultiIndex,
    build_representation,
    multiply,
    operator_triples,
)

from _demo_systems import c2_collapse_id  # two directions on C^2

sys = c2_collapse_id()
rep = build_representation(sys, 4)
print("carrier dimension:", rep.dim, "=", rep.rep_dim, "x", len(rep.grid))

report = rep.check_nica_pair(1)
print("safe levels:", report.safe_levels)
print("isometry residuals:", report.isometry)
print("doubly-commuting residuals:", report.doubly_commuting)
print("covariance residuals:", report.covariance)

# Off the safe subspace the isometry relation fails by construction:
V1 = rep.shift(MultiIndex((1, 0)))
eye = np.eye(rep.dim)
print("global ||V*V - I|| =", np.linalg.norm((V1.conj().T @ V1).toarray() - eye, 2), "(truncation artifact)")

# Symbolic products agree with operator products on the safe part:
rng = np.random.default_rng(3)
f = Monomial(sys, MultiIndex((1, 0)), sys.algebra.random_element(rng), MultiIndex((0, 1)))
g = Monomial(sys, MultiIndex((0, 1)), sys.algebra.random_element(rng), MultiIndex((1, 1)))
sym = rep.operator_of(multiply(f, g)).toarray()
direct = (rep.operator_of(f) @ rep.operator_of(g)).toarray()
P = rep.safe_projector(2).toarray()
print("symbolic vs operator product on safe subspace:", np.linalg.norm((sym - direct) @ P, 2))

# Vacuum-induction peeling recovers the coefficients of a core combination:
levels = [MultiIndex((0, 0)), MultiIndex((1, 0)), MultiIndex((1, 1))]
coeffs = [sys.algebra.random_element(rng) for _ in levels]
res = rep.core_independence_check(levels, coeffs)
print("core combination independent:", res.independent, " recovery error:", res.max_error)

# Operators export as exact coordinate triples for external inspection:
print("\nV_(1,0) as triples (first three lines):")
print("\n".join(operator_triples(V1).splitlines()[:3]))
