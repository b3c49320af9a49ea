"""Equilibrium-state machinery on the monomial algebra.

The functionals handled here are the Gibbs-type states built from a trace
on the coefficient algebra,

    psi_tau(V_x a V_y*) = delta_{x,y} e^{-<x, betabar>}
                          * prod_i (1 - e^{-betabar_i})
                          * sum_w e^{-<w, betabar>} tau(alpha_w(a)),

their zero-temperature limits (the vacuum case split), the tracial
functionals induced by the tail-adding dilation, and arbitrary external
evaluators.  All series evaluation is truncated at a level chosen from
the exact multi-geometric tail bound, never by convergence heuristics,
and every value carries an explicit error radius; comparisons inflate
their tolerance by the radii involved.

"Verified" always means verified at a printed scope: a degree bound on
the monomial indices and a finite element family (matrix units plus a
seeded batch of random elements).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .algebra import AlgebraElement, State, TracialState
from .dynamics import (
    DilatedSystem,
    DynamicalSystem,
    classify_injectivity,
    invariance_ideal,
    trace_from_dilation,
)
from .errors import BudgetError, RegimeError, ScopeEscalationError
from .lattice import MultiIndex, enumerate_grid, geometric_grid_sum
from .monomial import Monomial, MonomialSum, defect_projection, embed, multiply, unit_monomial

MAX_SERIES_LEVEL = 100_000


@dataclass(frozen=True)
class KmsParams:
    """Frequencies lambda, inverse temperature beta, and a series tolerance.

    The derived vector betabar_i = lambda_i * beta drives every formula;
    the regime tag records which part of the theory applies.
    """

    lam: tuple[float, ...]
    beta: float
    eps: float = 1e-9

    def __post_init__(self):
        if not self.lam:
            raise ValueError("lambda must be non-empty")
        if self.eps <= 0:
            raise ValueError("series tolerance must be positive")

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def betabar(self) -> np.ndarray:
        return np.array([l * self.beta for l in self.lam], dtype=float)

    @property
    def regime(self) -> str:
        bb = self.betabar
        if any(b < 0 for b in bb):
            return "empty"
        if self.beta == 0:
            return "tracial"
        if any(l == 0 for l in self.lam):
            return "reduced"
        return "positive"

    def weight(self, x: MultiIndex, y: MultiIndex) -> float:
        """exp(-<x - y, lambda> beta), the KMS twist of the pair (x, y)."""
        return math.exp(-sum((xi - yi) * b for xi, yi, b in zip(x, y, self.betabar)))


class ValueWithRadius(NamedTuple):
    value: complex
    radius: float


class KmsFunctional:
    """A linear functional on monomials with provenance and error radii."""

    def __init__(
        self,
        system: DynamicalSystem,
        evaluator: Callable[[Monomial], ValueWithRadius],
        provenance: str,
    ):
        self.system = system
        self._evaluator = evaluator
        self.provenance = provenance
        unit = self.evaluate(unit_monomial(system))
        if abs(unit.value - 1.0) > 1e-8 + unit.radius:
            raise ValueError(
                f"functional is not normalized: value on the unit is {unit.value}"
            )

    def evaluate(self, f) -> ValueWithRadius:
        if isinstance(f, Monomial):
            return self._evaluator(f)
        if isinstance(f, MonomialSum):
            val = 0j
            rad = 0.0
            for t in f.terms():
                v = self._evaluator(t)
                val += v.value
                rad += v.radius
            return ValueWithRadius(val, rad)
        raise TypeError(f"cannot evaluate {type(f).__name__}")

    def __call__(self, f) -> complex:
        return self.evaluate(f).value


# -- Gibbs-type functionals from traces ---------------------------------------


def _series_level(betabar: np.ndarray, eps: float) -> tuple[int, float, float]:
    """A truncation level with rigorous tail C * tail_bound <= eps.

    The level comes from the exact multi-geometric tail formula (no
    convergence heuristics); returns (level, normalization C, unit-norm
    radius).
    """
    C = float(np.prod(1.0 - np.exp(-betabar)))
    level = 1
    while level <= MAX_SERIES_LEVEL:
        gs = geometric_grid_sum(betabar, level)
        if C * gs.tail_bound <= eps:
            return level, C, C * gs.tail_bound
        level = max(level + 1, int(level * 1.5))
    raise BudgetError(
        f"series tolerance {eps} unreachable within level {MAX_SERIES_LEVEL}; increase budget"
    )


def psi_tau_functional(sys: DynamicalSystem, tau: TracialState, params: KmsParams) -> KmsFunctional:
    """The Gibbs-type functional attached to a trace, positive regime only.

    The lattice series factorizes through the commuting generators, so the
    truncated sum is assembled as a product of per-direction geometric
    operator sums; the attached radius is the exact tail estimate
    prod_i (1 - e^{-betabar_i}) * tail * ||a||.
    """
    if params.n != sys.n:
        raise RegimeError(f"parameter dimension {params.n} != system dimension {sys.n}")
    if params.regime != "positive":
        raise RegimeError(
            f"Gibbs-type evaluation needs every lambda_k * beta > 0 (regime: {params.regime})"
        )
    if tau.algebra != sys.algebra:
        raise ValueError("trace lives in a different algebra")
    bb = params.betabar
    level, C, unit_radius = _series_level(bb, params.eps)

    D = sys.algebra.coord_dim
    series = np.eye(D, dtype=complex)
    for i, b in enumerate(bb):
        gen = sys.generators[i].matrix
        damped = math.exp(-b) * gen
        acc = np.eye(D, dtype=complex)
        term = np.eye(D, dtype=complex)
        for _ in range(level):
            term = damped @ term
            acc += term
        series = series @ acc
    covector = C * (tau.as_covector() @ series)

    bb_t = tuple(float(b) for b in bb)

    def evaluator(f: Monomial) -> ValueWithRadius:
        if f.x != f.y:
            return ValueWithRadius(0j, 0.0)
        damp = math.exp(-sum(xi * bi for xi, bi in zip(f.x, bb_t)))
        value = damp * complex(covector @ f.a.coords())
        return ValueWithRadius(value, unit_radius * f.a.norm())

    return KmsFunctional(sys, evaluator, provenance="from-trace")


def eval_psi_tau(tau: TracialState, params: KmsParams, f: Monomial) -> ValueWithRadius:
    """One-shot evaluation; build the functional once if evaluating many."""
    return psi_tau_functional(f.system, tau, params).evaluate(f)


# -- zero-temperature functionals ---------------------------------------------


def ground_functional(sys: DynamicalSystem, tau) -> KmsFunctional:
    """The vacuum case split: tau(a) at x = y = 0 and zero elsewhere.

    ``tau`` may be any state; traciality is not required for ground
    functionals.
    """
    if isinstance(tau, TracialState):
        sigma = tau.as_state()
    elif isinstance(tau, State):
        sigma = tau
    else:
        raise TypeError("tau must be a State or TracialState")
    if sigma.algebra != sys.algebra:
        raise ValueError("state lives in a different algebra")

    def evaluator(f: Monomial) -> ValueWithRadius:
        if f.x.is_zero() and f.y.is_zero():
            return ValueWithRadius(sigma(f.a), 0.0)
        return ValueWithRadius(0j, 0.0)

    return KmsFunctional(sys, evaluator, provenance="vacuum")


def kms_infinity_functional(sys: DynamicalSystem, tau: TracialState) -> KmsFunctional:
    """High-temperature-limit case split; tau must be tracial here."""
    if not isinstance(tau, TracialState):
        raise TypeError("the infinite-beta limit is parametrized by tracial states")
    out = ground_functional(sys, tau)
    return KmsFunctional(sys, out._evaluator, provenance="kms-infinity")


def eval_kms_infinity(tau: TracialState, f: Monomial) -> complex:
    return kms_infinity_functional(f.system, tau)(f)


def external_functional(
    sys: DynamicalSystem,
    fn: Callable[[Monomial], complex],
    provenance: str = "external",
    radius: float = 0.0,
) -> KmsFunctional:
    return KmsFunctional(sys, lambda f: ValueWithRadius(complex(fn(f)), radius), provenance)


def dilation_trace_functional(
    sys: DynamicalSystem,
    tau,
    dilation: DilatedSystem | None = None,
    degree_bound: int = 2,
    tol: float = 1e-9,
) -> KmsFunctional:
    """The tracial functional induced by a trace on the (dilated) algebra.

    The construction is verified tracial on monomial products up to the
    degree bound before being handed back; a trace that is not compatible
    with the dilated action fails here with a witness instead of leaking
    a non-tracial functional.
    """

    def evaluator(f: Monomial) -> ValueWithRadius:
        return ValueWithRadius(trace_from_dilation(sys, tau, f.x, f.a, f.y, dilation=dilation), 0.0)

    psi = KmsFunctional(sys, evaluator, provenance="dilation-trace")
    units = sys.algebra.basis()
    labels = sys.algebra.basis_labels()
    monos = [
        Monomial(sys, x, a, y)
        for x in enumerate_grid(degree_bound, sys.n)
        for y in enumerate_grid(degree_bound, sys.n)
        for a in units
    ]
    for f, g in itertools.combinations(monos, 2):
        lhs = psi(multiply(f, g))
        rhs = psi(multiply(g, f))
        if abs(lhs - rhs) > tol:
            raise ScopeEscalationError(
                f"dilation trace is not compatible with the action: "
                f"psi(fg)={lhs} != psi(gf)={rhs} for f={f.render()}, g={g.render()} "
                f"(labels within {labels})"
            )
    return psi


# -- verification -------------------------------------------------------------


@dataclass(frozen=True)
class KmsViolation:
    f: Monomial
    g: Monomial
    lhs: complex
    rhs: complex
    defect: float
    allowed: float

    def render(self) -> str:
        return (
            f"|psi(fg) - w*psi(gf)| = {self.defect:.6e} > {self.allowed:.6e} "
            f"for f = {self.f.render()}, g = {self.g.render()}"
        )


def scope_elements(
    sys: DynamicalSystem, rng: np.random.Generator | None = None, n_random: int = 2
) -> list[tuple[str, AlgebraElement]]:
    """Matrix units plus a seeded batch of random elements."""
    rng = rng if rng is not None else np.random.default_rng(0)
    out = list(zip(sys.algebra.basis_labels(), sys.algebra.basis()))
    for r in range(n_random):
        out.append((f"rand{r}", sys.algebra.random_element(rng, scale=0.5)))
    return out


def scope_monomials(
    sys: DynamicalSystem,
    degree: int,
    rng: np.random.Generator | None = None,
    n_random: int = 2,
) -> list[Monomial]:
    elements = scope_elements(sys, rng, n_random)
    grid = enumerate_grid(degree, sys.n)
    return [
        Monomial(sys, x, a, y) for x in grid for y in grid for _, a in elements
    ]


def verify_kms(
    psi: KmsFunctional,
    params: KmsParams,
    degree: int = 2,
    tol: float = 1e-8,
    rng: np.random.Generator | None = None,
    n_random: int = 2,
) -> list[KmsViolation]:
    """Check psi(fg) = e^{-<x-y, lambda> beta} psi(gf) over the scope.

    Pairs run over monomials with indices in F_degree and coefficients
    from the matrix-unit basis plus seeded random elements; products are
    formed symbolically.  Violations are findings, returned as data in
    deterministic pair order; an empty list means verified at this scope.
    """
    sys = psi.system
    if params.n != sys.n:
        raise RegimeError(f"parameter dimension {params.n} != system dimension {sys.n}")
    monos = scope_monomials(sys, degree, rng, n_random)
    violations: list[KmsViolation] = []
    for i, f in enumerate(monos):
        for g in monos[i:]:
            vfg = psi.evaluate(multiply(f, g))
            vgf = psi.evaluate(multiply(g, f))
            if g is f:
                checks = ((f, g, vfg, vgf),)
            else:
                checks = ((f, g, vfg, vgf), (g, f, vgf, vfg))
            for a, b, vab, vba in checks:
                w = params.weight(a.x, a.y)
                defect = abs(vab.value - w * vba.value)
                allowed = tol + vab.radius + w * vba.radius
                if defect > allowed:
                    violations.append(
                        KmsViolation(f=a, g=b, lhs=vab.value, rhs=vba.value, defect=defect, allowed=allowed)
                    )
    return violations


# -- obstruction certificates --------------------------------------------------


@dataclass(frozen=True)
class NoKmsCertificate:
    """A machine-checkable inequality chain ruling out equilibrium states."""

    kind: str  # 'negative-direction' | 'cnp-unitarity'
    direction: int
    betabar_k: float
    forced_value: float  # e^{-betabar_k}, the value the chain pins down
    chain: str

    def contradiction_holds(self) -> bool:
        if self.kind == "negative-direction":
            return self.forced_value > 1.0
        return self.forced_value != 1.0


def no_kms_certificate(
    params: KmsParams, cnp: bool, sys: DynamicalSystem
) -> NoKmsCertificate | None:
    """Obstructions to KMS states at these parameters.

    A negative betabar_k yields the chain
    1 = psi(1) >= psi(V_k V_k*) = e^{-betabar_k} > 1.  On the quotient
    algebra (cnp=True) an injective system makes the generating isometries
    unitary, so 1 = psi(U_k* U_k) = psi(U_k U_k*) = e^{-betabar_k} forces
    every lambda_k beta to vanish; with beta != 0 and lambda != 0 that is
    a contradiction.
    """
    bb = params.betabar
    for k, b in enumerate(bb):
        if b < 0:
            return NoKmsCertificate(
                kind="negative-direction",
                direction=k,
                betabar_k=float(b),
                forced_value=math.exp(-b),
                chain=(
                    f"1 = psi(1) >= psi(V_{k} V_{k}*) = e^(-{b:.17g}) = "
                    f"{math.exp(-b):.17g} > 1"
                ),
            )
    if cnp and params.beta != 0 and any(l != 0 for l in params.lam):
        if classify_injectivity(sys).injective:
            k = next(i for i, l in enumerate(params.lam) if l != 0)
            b = float(bb[k])
            return NoKmsCertificate(
                kind="cnp-unitarity",
                direction=k,
                betabar_k=b,
                forced_value=math.exp(-b),
                chain=(
                    f"U_{k} unitary: 1 = psi(U_{k}* U_{k}) = psi(U_{k} U_{k}*) = "
                    f"e^(-{b:.17g}) = {math.exp(-b):.17g} != 1"
                ),
            )
    return None


# -- trace recovery and level masses -------------------------------------------


def recover_trace(
    psi: KmsFunctional, params: KmsParams, tol: float = 1e-9
) -> TracialState:
    """Compress a verified functional back to a trace on the coefficients.

    Builds the full defect projection P, checks that psi(P) equals the
    constant prod_i (1 - e^{-betabar_i}) it must equal for every verified
    functional, and reads the trace off psi(P a P) / psi(P) on the
    matrix-unit basis.  A deviating psi(P) or a non-tracial result means
    psi was not KMS at the claimed scope and escalates.
    """
    sys = psi.system
    if params.regime != "positive":
        raise RegimeError(f"trace recovery needs the positive regime (regime: {params.regime})")
    C = float(np.prod(1.0 - np.exp(-params.betabar)))
    P = defect_projection(sys)
    psiP = psi.evaluate(P)
    if abs(psiP.value - C) > tol + psiP.radius:
        raise ScopeEscalationError(
            f"psi(P) = {psiP.value} deviates from the constant {C:.17g}; "
            "the functional was not KMS at scope"
        )
    alg = sys.algebra
    dens = [np.zeros((d, d), dtype=complex) for d in alg.block_dims]
    units = iter(alg.basis())
    for b, d in enumerate(alg.block_dims):
        for j in range(d):
            for k in range(d):
                e = next(units)
                val = psi.evaluate(P * embed(sys, e) * P).value / psiP.value
                dens[b][k, j] = val  # tau(e_jk) = rho[k, j]
    for b, (rho, d) in enumerate(zip(dens, alg.block_dims)):
        scalar = np.trace(rho) / d
        if np.linalg.norm(rho - scalar * np.eye(d), 2) > 10 * tol:
            raise ScopeEscalationError(f"recovered functional is not tracial on block {b}")
    weights = [max(float(np.trace(r).real), 0.0) for r in dens]
    return TracialState(alg, weights, mass_tol=1e-6)


def pm_mass(params: KmsParams, m: int) -> float:
    """Mass of the level-m sum of shifted defect projections, in closed form.

    Equals prod_i (1 - e^{-betabar_i}) * sum_{w in F_m} e^{-<w, betabar>};
    increasing in m with limit 1.
    """
    if params.regime != "positive":
        raise RegimeError(f"level masses need the positive regime (regime: {params.regime})")
    bb = params.betabar
    C = float(np.prod(1.0 - np.exp(-bb)))
    return C * geometric_grid_sum(bb, m).partial_sum


def pm_level_for(params: KmsParams, gap: float = 1e-6) -> int:
    """Smallest m with 1 - pm_mass(m) < gap, from the exact tail bound."""
    bb = params.betabar
    C = float(np.prod(1.0 - np.exp(-bb)))
    m = 0
    while m <= MAX_SERIES_LEVEL:
        if C * geometric_grid_sum(bb, m).tail_bound < gap:
            return m
        m += 1
    raise BudgetError(f"mass gap {gap} unreachable within level {MAX_SERIES_LEVEL}")


# -- descent to the quotient algebra -------------------------------------------


@dataclass(frozen=True)
class DescentDefect:
    y: MultiIndex
    label: str
    value: complex
    radius: float


@dataclass(frozen=True)
class DescentReport:
    ideal_blocks: tuple[int, ...]
    weights_vanish: bool
    defects: tuple[DescentDefect, ...]
    max_defect: float
    descends: bool
    measured_constants: tuple[tuple[str, float], ...]  # psi(P_S) per support S


def cnp_descent(
    tau: TracialState, params: KmsParams, sys: DynamicalSystem, tol: float = 1e-8
) -> DescentReport:
    """Does the Gibbs-type functional of tau descend to the quotient algebra?

    Descent holds iff tau vanishes on the invariance ideal I_1; the report
    carries both that block-weight test and the directly evaluated defect
    values psi_tau(a * prod_{i in supp y}(I - V_i V_i*)) for a spanning
    each I_y, y <= 1.  The proportionality constant linking those values
    to tau is measured numerically (on a = 1) rather than assumed.
    """
    psi = psi_tau_functional(sys, tau, params)
    ones = MultiIndex.ones(sys.n)
    I1 = invariance_ideal(sys, ones)
    weights_vanish = tau.vanishes_on(I1)
    defects: list[DescentDefect] = []
    constants: list[tuple[str, float]] = []
    worst = 0.0
    descends = weights_vanish
    for y in enumerate_grid(1, sys.n):
        if y.is_zero():
            continue
        S = y.support()
        P_S = defect_projection(sys, S)
        constants.append((str(sorted(S)), float(psi.evaluate(P_S).value.real)))
        Iy = invariance_ideal(sys, y)
        for a, lab in zip(sys.algebra.basis(), sys.algebra.basis_labels()):
            if not Iy.contains_element(a):
                continue
            v = psi.evaluate(embed(sys, a) * P_S)
            defects.append(DescentDefect(y=y, label=lab, value=v.value, radius=v.radius))
            worst = max(worst, abs(v.value))
            if abs(v.value) > tol + v.radius:
                descends = False
    return DescentReport(
        ideal_blocks=tuple(sorted(I1.blocks)),
        weights_vanish=weights_vanish,
        defects=tuple(defects),
        max_defect=worst,
        descends=descends,
        measured_constants=tuple(constants),
    )


@dataclass(frozen=True)
class TracialFactorizationReport:
    applicable: bool
    witness: KmsViolation | None
    passed: bool
    max_defect: float
    defects: tuple[DescentDefect, ...]


def tracial_factorization_check(
    psi: KmsFunctional,
    sys: DynamicalSystem,
    degree: int = 2,
    tol: float = 1e-8,
    rng: np.random.Generator | None = None,
    n_random: int = 2,
) -> TracialFactorizationReport:
    """Does a tracial functional kill the quotient relations?

    First re-verifies that psi is tracial at the scope (otherwise the
    check is not applicable and the witness pair is reported), then
    evaluates psi on the generators a * prod_{i in supp x}(I - V_i V_i*)
    for a spanning each I_x, x <= 1.  Every tracial functional must kill
    them; the values returned make the Cauchy-Schwarz argument concrete.
    """
    for f, g in itertools.combinations(scope_monomials(sys, degree, rng, n_random), 2):
        vfg = psi.evaluate(multiply(f, g))
        vgf = psi.evaluate(multiply(g, f))
        defect = abs(vfg.value - vgf.value)
        allowed = tol + vfg.radius + vgf.radius
        if defect > allowed:
            witness = KmsViolation(f=f, g=g, lhs=vfg.value, rhs=vgf.value, defect=defect, allowed=allowed)
            return TracialFactorizationReport(
                applicable=False, witness=witness, passed=False, max_defect=defect, defects=()
            )
    defects: list[DescentDefect] = []
    worst = 0.0
    for x in enumerate_grid(1, sys.n):
        if x.is_zero():
            continue
        P_S = defect_projection(sys, x.support())
        Ix = invariance_ideal(sys, x)
        for a, lab in zip(sys.algebra.basis(), sys.algebra.basis_labels()):
            if not Ix.contains_element(a):
                continue
            v = psi.evaluate(embed(sys, a) * P_S)
            defects.append(DescentDefect(y=x, label=lab, value=v.value, radius=v.radius))
            worst = max(worst, abs(v.value) - v.radius)
    return TracialFactorizationReport(
        applicable=True,
        witness=None,
        passed=worst <= tol,
        max_defect=worst,
        defects=tuple(defects),
    )
