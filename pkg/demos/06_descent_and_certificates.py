"""Descent to the quotient algebra and the no-states certificates.

A Gibbs-type functional factors through the quotient relations exactly
when its trace vanishes on the invariance ideal I_1; injective systems
admit no equilibrium states on the quotient away from beta = 0 at all.
"""

from latticekms import (
    KmsParams,
    TracialState,
    cnp_descent,
    dilate,
    dilation_trace_functional,
    no_kms_certificate,
    tracial_factorization_check,
)

from _demo_systems import c2_collapse, trivial

sys = c2_collapse()
params = KmsParams(lam=(1.0,), beta=1.0)

for weights in ([0.5, 0.5], [0.0, 1.0]):
    tau = TracialState(sys.algebra, weights)
    report = cnp_descent(tau, params, sys)
    print(f"tau = {weights}: descends = {report.descends}")
    print("  I_1 blocks:", report.ideal_blocks, " weights vanish:", report.weights_vanish)
    print("  max defect:", report.max_defect)
    for key, val in report.measured_constants:
        print(f"  measured psi(P_{key}) = {val:.12f}")

# Parameter obstructions, as machine-checkable inequality chains:
neg = no_kms_certificate(KmsParams(lam=(1.0, -1.0), beta=1.0), cnp=False, sys=trivial(2))
print("\nnegative-direction certificate:", neg.chain)
uni = no_kms_certificate(KmsParams(lam=(1.0,), beta=2.0), cnp=True, sys=trivial(1))
print("quotient unitarity certificate:", uni.chain)

# Tracial functionals kill the quotient relations; the dilation trace shows it.
dil = dilate(sys, 3)
tauB = TracialState(dil.algebra, [1.0, 0.0, 0.0, 0.0, 0.0])
psi = dilation_trace_functional(sys, tauB, dilation=dil, degree_bound=1)
check = tracial_factorization_check(psi, sys, degree=1, tol=1e-9)
print("\ndilation trace factorization: applicable =", check.applicable, " passed =", check.passed)
