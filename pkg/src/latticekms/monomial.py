"""Symbolic monomials V_x a V_y* and their finite sums.

This is the exact carrier every state functional is evaluated on,
independent of any Fock truncation.  Only one rewrite rule exists, the
Nica-covariant reduction used in products:

    (V_x a V_y*)(V_z b V_w*) =
        V_{x+z-u} alpha_{z-u}(a) alpha_{y-u}(b) V_{y+w-u}*,   u = y meet z.

Monomials are never normalized to disjoint-support (x, y) on storage;
reduction happens only inside ``multiply``, so gauge scalings stay exact
on arbitrary presentations.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import AlgebraElement
from .dynamics import DynamicalSystem
from .lattice import MultiIndex, enumerate_grid


@dataclass(frozen=True, eq=False)
class Monomial:
    """V_x a V_y* over a fixed system; complex coefficients live in ``a``.

    Instances compare by identity: the coefficient is float-valued data,
    so meaningful comparisons are the approximate ones on the fields.
    """

    system: DynamicalSystem
    x: MultiIndex
    a: AlgebraElement
    y: MultiIndex

    def __post_init__(self):
        n = self.system.n
        if self.x.n != n or self.y.n != n:
            raise ValueError("monomial indices must match the system dimension")
        if self.a.algebra != self.system.algebra:
            raise ValueError("coefficient lives in a different algebra")

    def adjoint(self) -> "Monomial":
        return Monomial(self.system, self.y, self.a.adjoint(), self.x)

    def degree(self) -> int:
        return max(self.x.degree(), self.y.degree())

    def scale(self, c: complex) -> "Monomial":
        return Monomial(self.system, self.x, complex(c) * self.a, self.y)

    def render(self) -> str:
        mats = "; ".join(
            np.array2string(blk, separator=",", formatter={"complex_kind": lambda z: f"{z.real:.6g}{z.imag:+.6g}i"})
            for blk in self.a.blocks
        )
        return f"V[{tuple(self.x)}] {mats} V*[{tuple(self.y)}]"

    def __str__(self) -> str:
        return self.render()


def unit_monomial(sys: DynamicalSystem) -> Monomial:
    z = MultiIndex.zero(sys.n)
    return Monomial(sys, z, sys.algebra.unit(), z)


def embed(sys: DynamicalSystem, a: AlgebraElement) -> Monomial:
    """a as the degree-zero monomial V_0 a V_0*."""
    z = MultiIndex.zero(sys.n)
    return Monomial(sys, z, a, z)


def shift(sys: DynamicalSystem, x: MultiIndex) -> Monomial:
    """The isometry V_x itself."""
    return Monomial(sys, x, sys.algebra.unit(), MultiIndex.zero(sys.n))


def multiply(f: Monomial, g: Monomial) -> Monomial:
    """The reduced product; the output is again a single monomial."""
    if f.system is not g.system:
        raise ValueError("monomials belong to different systems")
    sys = f.system
    u = f.y.meet(g.x)
    dl = g.x - u
    dr = f.y - u
    left = f.a if dl.is_zero() else sys.compose(dl).apply(f.a)
    right = g.a if dr.is_zero() else sys.compose(dr).apply(g.a)
    return Monomial(sys, f.x + dl, left * right, g.y + dr)


def gauge_scale(f: Monomial, z: Sequence[complex]) -> tuple[complex, Monomial]:
    """Analytic gauge scaling: coefficient exp(i <x - y, z>) for z in C^n.

    Real z gives the unitary point action; purely imaginary z = i*gamma
    gives the damping exp(-<x - y, gamma>) used in KMS conditions.
    """
    zv = [complex(c) for c in z]
    if len(zv) != f.system.n:
        raise ValueError(f"gauge vector has length {len(zv)}, expected {f.system.n}")
    phase = sum((xi - yi) * c for xi, yi, c in zip(f.x, f.y, zv))
    return cmath.exp(1j * phase), f


class MonomialSum:
    """A finite sum of monomials, merged on equal (x, y) index pairs."""

    def __init__(self, sys: DynamicalSystem, terms: Iterable[Monomial] = ()):
        self.system = sys
        self._terms: dict[tuple[MultiIndex, MultiIndex], AlgebraElement] = {}
        for t in terms:
            self._absorb(t)

    def _absorb(self, t: Monomial) -> None:
        if t.system is not self.system:
            raise ValueError("monomial belongs to a different system")
        key = (t.x, t.y)
        if key in self._terms:
            self._terms[key] = self._terms[key] + t.a
        else:
            self._terms[key] = t.a

    def terms(self) -> list[Monomial]:
        """Terms in deterministic (x, y) lexicographic order."""
        keys = sorted(self._terms, key=lambda k: (tuple(k[0]), tuple(k[1])))
        return [Monomial(self.system, x, self._terms[(x, y)], y) for x, y in keys]

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "MonomialSum") -> "MonomialSum":
        return MonomialSum(self.system, self.terms() + other.terms())

    def __mul__(self, other) -> "MonomialSum":
        if isinstance(other, Monomial):
            other = MonomialSum(other.system, [other])
        out = MonomialSum(self.system)
        for f in self.terms():
            for g in other.terms():
                out._absorb(multiply(f, g))
        return out

    def __rmul__(self, other) -> "MonomialSum":
        if isinstance(other, Monomial):
            return MonomialSum(other.system, [other]) * self
        return self.scale(other)

    def scale(self, c: complex) -> "MonomialSum":
        return MonomialSum(self.system, [t.scale(c) for t in self.terms()])

    def adjoint(self) -> "MonomialSum":
        return MonomialSum(self.system, [t.adjoint() for t in self.terms()])

    def prune(self, tol: float = 0.0) -> "MonomialSum":
        return MonomialSum(self.system, [t for t in self.terms() if t.a.norm() > tol])

    def render(self) -> str:
        return " + ".join(t.render() for t in self.terms()) or "0"


def defect_projection(sys: DynamicalSystem, directions: Iterable[int] | None = None) -> MonomialSum:
    """prod_{i in S} (I - V_i V_i*) expanded as an alternating monomial sum.

    With S the full direction set this is the projection whose compression
    recovers the underlying trace from a Gibbs-type functional; the
    expansion is sum over x in F_1 with supp x inside S of
    (-1)^|x| V_x V_x*.
    """
    n = sys.n
    S = frozenset(range(n)) if directions is None else frozenset(directions)
    if not S:
        raise ValueError("direction set must be nonempty")
    for i in S:
        if not 0 <= i < n:
            raise ValueError(f"direction {i} out of range for n={n}")
    unit = sys.algebra.unit()
    terms = []
    for x in enumerate_grid(1, n):
        if x.support() <= S:
            terms.append(Monomial(sys, x, ((-1.0) ** x.degree()) * unit, x))
    return MonomialSum(sys, terms)
