"""Gibbs-type equilibrium functionals: evaluation, verification, recovery.

For a trace tau and all-positive betabar the functional

    psi_tau(V_x a V_y*) = delta_{x,y} e^{-<x, betabar>}
                          prod_i (1 - e^{-betabar_i}) sum_w e^{-<w, betabar>} tau(alpha_w(a))

satisfies the twisted trace condition, every value carrying a rigorous
series radius.  Compressing by the defect projection hands the trace back.
"""

import math

import numpy as np

from latticekms import (
    KmsParams,
    Monomial,
    MultiIndex,
    TracialState,
    defect_projection,
    eval_kms_infinity,
    pm_level_for,
    pm_mass,
    psi_tau_functional,
    recover_trace,
    verify_kms,
)

from _demo_systems import m2c

sys = m2c()
tau = TracialState(sys.algebra, [0.6, 0.4])
params = KmsParams(lam=(1.0,), beta=1.0, eps=1e-12)
psi = psi_tau_functional(sys, tau, params)

f = Monomial(sys, MultiIndex((1,)), sys.algebra.unit(), MultiIndex((1,)))
v = psi.evaluate(f)
print(f"psi(V1 V1*) = {v.value.real:.12f} +- {v.radius:.1e}  (exp(-beta) = {math.exp(-1.0):.12f})")

violations = verify_kms(psi, params, degree=2, tol=1e-8, rng=np.random.default_rng(0))
print("twisted-trace violations at degree 2:", len(violations))

# The defect projection P = prod (I - V_i V_i*) compresses psi back to tau:
P = defect_projection(sys)
measured = psi.evaluate(P)
print(f"psi(P) = {measured.value.real:.12f}  constant = {1 - math.exp(-1.0):.12f}")
recovered = recover_trace(psi, params)
print("recovered trace weights:", recovered.weights, " original:", tau.weights)

# Level masses of the shifted-projection sums converge to 1:
for m in (0, 2, 5):
    print(f"mass at level {m}: {pm_mass(params, m):.10f}")
m_star = pm_level_for(params, gap=1e-6)
print(f"level for a 1e-6 gap: {m_star} with mass {pm_mass(params, m_star):.10f}")

# As beta grows the values approach the infinite-temperature case split:
for beta in (2.0, 8.0, 16.0):
    p = KmsParams(lam=(1.0,), beta=beta, eps=1e-12)
    pb = psi_tau_functional(sys, tau, p)
    gap = max(
        abs(pb(Monomial(sys, x, e, x)) - eval_kms_infinity(tau, Monomial(sys, x, e, x)))
        for x in (MultiIndex((0,)), MultiIndex((1,)))
        for e in sys.algebra.basis()
    )
    print(f"beta = {beta:5.1f}: distance to the limit functional {gap:.3e} <= e^-beta = {math.exp(-beta):.3e}")
