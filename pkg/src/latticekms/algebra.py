"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

An algebra here is A = M_{d_1} (+) ... (+) M_{d_B}; elements are lists of
complex blocks, the involution is the block-wise conjugate transpose, and
the norm is the maximum of the block operator norms.

Two structure facts carry the whole module and are relied on throughout:

* every closed two-sided ideal of such an algebra is a sub-sum of blocks,
  so ideal calculus reduces to boolean algebra on block subsets (this is
  asserted by a randomized closure test in the suite, not just assumed);
* every state is tr(rho . ) for a block-diagonal density rho, and the
  tracial states are exactly the convex combinations of the normalized
  block traces.

*-endomorphisms are stored as raw complex-linear maps on the coordinate
space (dimension sum d_b^2) together with a validation certificate:
unitality, multiplicativity on matrix-unit pairs, and adjoint preservation
are checked numerically at construction instead of committing to any
canonical decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

STRUCT_TOL = 1e-10  # structural certification
ARITH_TOL = 1e-12  # arithmetic identities


class BlockAlgebra:
    """(+)_b M_{d_b} with a fixed coordinate chart.

    Coordinates concatenate the blocks row-major, block by block; the
    coordinate dimension is sum d_b^2 and the standard representation
    acts on C^{sum d_b}.
    """

    def __init__(self, block_dims: Iterable[int], allow_degenerate: bool = False):
        dims = tuple(int(d) for d in block_dims)
        if not allow_degenerate and len(dims) == 0:
            raise ValueError("algebra needs at least one block")
        if any(d < 1 for d in dims):
            raise ValueError(f"block dimensions must be >= 1, got {dims}")
        self.block_dims = dims
        self._offsets = []
        off = 0
        for d in dims:
            self._offsets.append(off)
            off += d * d
        self.coord_dim = off
        self.rep_dim = sum(dims)
        self._basis_cache: list[AlgebraElement] | None = None

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def degenerate(self) -> bool:
        return self.num_blocks == 0

    def element(self, blocks: Sequence[np.ndarray]) -> "AlgebraElement":
        if len(blocks) != self.num_blocks:
            raise ValueError(f"expected {self.num_blocks} blocks, got {len(blocks)}")
        mats = []
        for d, blk in zip(self.block_dims, blocks):
            arr = np.asarray(blk, dtype=complex)
            if arr.shape != (d, d):
                raise ValueError(f"block shape {arr.shape} != ({d}, {d})")
            mats.append(arr.copy())
        return AlgebraElement(self, mats)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.zeros((d, d), dtype=complex) for d in self.block_dims])

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(d, dtype=complex) for d in self.block_dims])

    def central_projection(self, block: int) -> "AlgebraElement":
        """1_b: the unit of block ``block`` and zero elsewhere."""
        mats = [np.zeros((d, d), dtype=complex) for d in self.block_dims]
        mats[block] = np.eye(self.block_dims[block], dtype=complex)
        return AlgebraElement(self, mats)

    def basis(self) -> list["AlgebraElement"]:
        """Matrix units in block-major, row-major order."""
        if self._basis_cache is None:
            out = []
            for b, d in enumerate(self.block_dims):
                for j in range(d):
                    for k in range(d):
                        mats = [np.zeros((dd, dd), dtype=complex) for dd in self.block_dims]
                        mats[b][j, k] = 1.0
                        out.append(AlgebraElement(self, mats))
            self._basis_cache = out
        return list(self._basis_cache)

    def basis_labels(self) -> list[str]:
        out = []
        for b, d in enumerate(self.block_dims):
            for j in range(d):
                for k in range(d):
                    out.append(f"b{b}:e{j}{k}")
        return out

    def from_coords(self, vec: np.ndarray) -> "AlgebraElement":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.shape != (self.coord_dim,):
            raise ValueError(f"coordinate vector has length {vec.shape[0]}, expected {self.coord_dim}")
        mats = []
        for d, off in zip(self.block_dims, self._offsets):
            mats.append(vec[off : off + d * d].reshape(d, d).copy())
        return AlgebraElement(self, mats)

    def coord_slice(self, block: int) -> slice:
        d = self.block_dims[block]
        off = self._offsets[block]
        return slice(off, off + d * d)

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> "AlgebraElement":
        mats = [
            scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
            for d in self.block_dims
        ]
        return AlgebraElement(self, mats)

    def random_selfadjoint(self, rng: np.random.Generator, scale: float = 1.0) -> "AlgebraElement":
        a = self.random_element(rng, scale)
        return 0.5 * (a + a.adjoint())

    def __eq__(self, other) -> bool:
        return isinstance(other, BlockAlgebra) and self.block_dims == other.block_dims

    def __hash__(self) -> int:
        return hash(self.block_dims)

    def __repr__(self) -> str:
        if self.degenerate:
            return "BlockAlgebra(0)"
        return "BlockAlgebra(" + " + ".join(f"M{d}" for d in self.block_dims) + ")"


class AlgebraElement:
    """One element; arithmetic is block-wise, values are immutable."""

    __slots__ = ("algebra", "blocks", "_coords", "_norm")

    def __init__(self, algebra: BlockAlgebra, blocks: Sequence[np.ndarray]):
        self.algebra = algebra
        mats = tuple(np.asarray(b, dtype=complex) for b in blocks)
        for m in mats:
            m.setflags(write=False)
        self.blocks = mats
        self._coords = None
        self._norm = None

    def _check(self, other: "AlgebraElement") -> None:
        if self.algebra != other.algebra:
            raise ValueError("elements live in different algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])
        return AlgebraElement(self.algebra, [complex(other) * a for a in self.blocks])

    def __rmul__(self, other) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [complex(other) * a for a in self.blocks])

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [a.conj().T for a in self.blocks])

    def norm(self) -> float:
        """Max block spectral norm (the C*-norm)."""
        if self._norm is None:
            if not self.blocks:
                self._norm = 0.0
            else:
                self._norm = max(
                    float(np.linalg.norm(b, 2)) if b.shape[0] > 1 else abs(complex(b[0, 0]))
                    for b in self.blocks
                )
        return self._norm

    def coords(self) -> np.ndarray:
        if self._coords is None:
            if self.algebra.degenerate:
                self._coords = np.zeros(0, dtype=complex)
            else:
                self._coords = np.concatenate([b.reshape(-1) for b in self.blocks])
            self._coords.setflags(write=False)
        return self._coords

    def is_zero(self, tol: float = ARITH_TOL) -> bool:
        return self.norm() <= tol

    def approx_eq(self, other: "AlgebraElement", tol: float = ARITH_TOL) -> bool:
        return (self - other).norm() <= tol

    def __repr__(self) -> str:
        return f"AlgebraElement({self.algebra!r})"


@dataclass(frozen=True)
class Ideal:
    """A closed two-sided ideal, i.e. a subset of the blocks."""

    algebra: BlockAlgebra
    blocks: frozenset[int]

    def __post_init__(self):
        for b in self.blocks:
            if not 0 <= b < self.algebra.num_blocks:
                raise ValueError(f"block {b} out of range")

    @classmethod
    def empty(cls, algebra: BlockAlgebra) -> "Ideal":
        return cls(algebra, frozenset())

    @classmethod
    def full(cls, algebra: BlockAlgebra) -> "Ideal":
        return cls(algebra, frozenset(range(algebra.num_blocks)))

    @property
    def is_empty(self) -> bool:
        return not self.blocks

    @property
    def is_full(self) -> bool:
        return len(self.blocks) == self.algebra.num_blocks

    def annihilator(self) -> "Ideal":
        """The complementary block subset; an involution on ideals."""
        return Ideal(self.algebra, frozenset(range(self.algebra.num_blocks)) - self.blocks)

    def intersect(self, other: "Ideal") -> "Ideal":
        return Ideal(self.algebra, self.blocks & other.blocks)

    def union(self, other: "Ideal") -> "Ideal":
        return Ideal(self.algebra, self.blocks | other.blocks)

    def unit_element(self) -> AlgebraElement:
        """The central projection supported exactly on the ideal's blocks."""
        mats = [np.zeros((d, d), dtype=complex) for d in self.algebra.block_dims]
        for b in self.blocks:
            mats[b] = np.eye(self.algebra.block_dims[b], dtype=complex)
        return AlgebraElement(self.algebra, mats)

    def contains_element(self, a: AlgebraElement, tol: float = STRUCT_TOL) -> bool:
        """True iff the blocks of ``a`` outside the ideal vanish."""
        for b in range(self.algebra.num_blocks):
            if b not in self.blocks and np.linalg.norm(a.blocks[b], 2) > tol:
                return False
        return True

    def basis(self) -> list[AlgebraElement]:
        """Matrix units spanning the ideal."""
        out = []
        units = self.algebra.basis()
        labels = self.algebra.basis_labels()
        for u, lab in zip(units, labels):
            if int(lab[1 : lab.index(":")]) in self.blocks:
                out.append(u)
        return out

    def __repr__(self) -> str:
        return f"Ideal(blocks={sorted(self.blocks)})"


@dataclass(frozen=True)
class EndomorphismViolation:
    """Structured witness that a linear map is not a unital *-endomorphism."""

    kind: str  # 'shape' | 'unital' | 'multiplicative' | 'adjoint'
    detail: str
    defect: float

    def __str__(self) -> str:
        return f"{self.kind} violation ({self.detail}): defect {self.defect:.3e}"


@dataclass(frozen=True)
class ValidationCertificate:
    unital_defect: float
    multiplicative_defect: float
    adjoint_defect: float
    tol: float


class StarEndomorphism:
    """A certified unital *-endomorphism, stored as its coordinate matrix."""

    def __init__(self, algebra: BlockAlgebra, matrix: np.ndarray, certificate: ValidationCertificate):
        self.algebra = algebra
        mat = np.asarray(matrix, dtype=complex)
        mat.setflags(write=False)
        self.matrix = mat
        self.certificate = certificate

    @classmethod
    def identity(cls, algebra: BlockAlgebra) -> "StarEndomorphism":
        cert = ValidationCertificate(0.0, 0.0, 0.0, STRUCT_TOL)
        return cls(algebra, np.eye(algebra.coord_dim, dtype=complex), cert)

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        if a.algebra != self.algebra:
            raise ValueError("element lives in a different algebra")
        return self.algebra.from_coords(self.matrix @ a.coords())

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return self.apply(a)

    def compose(self, other: "StarEndomorphism") -> "StarEndomorphism":
        """self after other; composites of certified maps stay certified."""
        if self.algebra != other.algebra:
            raise ValueError("endomorphisms act on different algebras")
        cert = ValidationCertificate(
            self.certificate.unital_defect + other.certificate.unital_defect,
            self.certificate.multiplicative_defect + other.certificate.multiplicative_defect,
            self.certificate.adjoint_defect + other.certificate.adjoint_defect,
            max(self.certificate.tol, other.certificate.tol),
        )
        return StarEndomorphism(self.algebra, self.matrix @ other.matrix, cert)

    def is_injective(self, tol: float = STRUCT_TOL) -> bool:
        if self.algebra.coord_dim == 0:
            return True
        sv = np.linalg.svd(self.matrix, compute_uv=False)
        return bool(sv[-1] > tol)

    def inverse(self) -> "StarEndomorphism":
        """Exact inverse; only meaningful for automorphic maps.

        In finite dimension an injective *-endomorphism is automatically
        an automorphism, so injectivity is the only requirement.
        """
        if not self.is_injective():
            raise ValueError("endomorphism is not injective; no inverse")
        cert = ValidationCertificate(0.0, 0.0, 0.0, self.certificate.tol)
        return StarEndomorphism(self.algebra, np.linalg.inv(self.matrix), cert)


def validate_endomorphism(
    algebra: BlockAlgebra, matrix: np.ndarray, tol: float = STRUCT_TOL
) -> StarEndomorphism | EndomorphismViolation:
    """Certify a coordinate matrix as a unital *-endomorphism.

    Checks, on the matrix-unit basis: phi(1) = 1, phi(e f) = phi(e) phi(f)
    for all basis pairs, and phi(e*) = phi(e)*.  The first violation found
    is returned as data (not raised): callers decide whether a failed
    certification is an error.
    """
    mat = np.asarray(matrix, dtype=complex)
    D = algebra.coord_dim
    if mat.shape != (D, D):
        return EndomorphismViolation("shape", f"matrix shape {mat.shape} != ({D}, {D})", float("inf"))

    def image(a: AlgebraElement) -> AlgebraElement:
        return algebra.from_coords(mat @ a.coords())

    units = algebra.basis()
    labels = algebra.basis_labels()
    images = [image(e) for e in units]

    mult_defect = 0.0
    for i, (e, le) in enumerate(zip(units, labels)):
        for j, (f, lf) in enumerate(zip(units, labels)):
            d = (image(e * f) - images[i] * images[j]).norm()
            if d > tol:
                return EndomorphismViolation("multiplicative", f"phi({le}.{lf}) != phi({le})phi({lf})", d)
            mult_defect = max(mult_defect, d)

    adjoint_defect = 0.0
    for e, lab, ie in zip(units, labels, images):
        d = (image(e.adjoint()) - ie.adjoint()).norm()
        if d > tol:
            return EndomorphismViolation("adjoint", f"phi({lab}*) != phi({lab})*", d)
        adjoint_defect = max(adjoint_defect, d)

    unit = algebra.unit()
    unital_defect = (image(unit) - unit).norm()
    if unital_defect > tol:
        return EndomorphismViolation("unital", "phi(1) != 1", unital_defect)

    cert = ValidationCertificate(unital_defect, mult_defect, adjoint_defect, tol)
    return StarEndomorphism(algebra, mat, cert)


def endomorphism_from_map(
    algebra: BlockAlgebra,
    fn: Callable[[AlgebraElement], AlgebraElement],
    tol: float = STRUCT_TOL,
) -> StarEndomorphism:
    """Build and certify the linear map whose action on elements is ``fn``.

    Convenience for writing systems down pointwise, e.g.
    ``endomorphism_from_map(A, lambda a: A.element([a.blocks[0], a.blocks[0]]))``
    for (a, b) |-> (a, a) on C^2.  Raises if certification fails.
    """
    D = algebra.coord_dim
    mat = np.zeros((D, D), dtype=complex)
    for col, e in enumerate(algebra.basis()):
        mat[:, col] = fn(e).coords()
    out = validate_endomorphism(algebra, mat, tol=tol)
    if isinstance(out, EndomorphismViolation):
        raise ValueError(f"map is not a unital *-endomorphism: {out}")
    return out


def kernel_ideal(phi: StarEndomorphism, tol: float = STRUCT_TOL) -> Ideal:
    """Blocks killed by phi: b is in the kernel iff ||phi(1_b)|| <= tol."""
    alg = phi.algebra
    killed = frozenset(
        b for b in range(alg.num_blocks) if phi.apply(alg.central_projection(b)).norm() <= tol
    )
    return Ideal(alg, killed)


def preimage_ideal(phi: StarEndomorphism, ideal: Ideal, tol: float = STRUCT_TOL) -> Ideal:
    """phi^{-1}(I) as a block subset.

    Block b belongs to the preimage iff phi(1_b) has no component outside
    I, i.e. ||phi(1_b) (1 - 1_I)|| <= tol.
    """
    alg = phi.algebra
    outside = alg.unit() - ideal.unit_element()
    blocks = frozenset(
        b
        for b in range(alg.num_blocks)
        if (phi.apply(alg.central_projection(b)) * outside).norm() <= tol
    )
    return Ideal(alg, blocks)


@dataclass(frozen=True)
class Quotient:
    """A quotient algebra together with its projection data."""

    algebra: BlockAlgebra
    retained_blocks: tuple[int, ...]
    source: BlockAlgebra
    degenerate: bool

    def project(self, a: AlgebraElement) -> AlgebraElement:
        if a.algebra != self.source:
            raise ValueError("element lives in a different algebra")
        return AlgebraElement(self.algebra, [a.blocks[b] for b in self.retained_blocks])


def quotient(algebra: BlockAlgebra, ideal: Ideal) -> Quotient:
    """A/I: drop the ideal's blocks.

    Quotienting by the full algebra yields the zero algebra; that case is
    flagged degenerate but allowed (it arises when an invariance ideal is
    everything).
    """
    if ideal.algebra != algebra:
        raise ValueError("ideal belongs to a different algebra")
    retained = tuple(b for b in range(algebra.num_blocks) if b not in ideal.blocks)
    q_alg = BlockAlgebra([algebra.block_dims[b] for b in retained], allow_degenerate=True)
    return Quotient(q_alg, retained, algebra, degenerate=not retained)


class State:
    """tau(a) = sum_b tr(rho_b a_b) for block densities rho_b.

    Densities are normalized exactly on construction; inputs whose total
    mass deviates from 1 by more than ``mass_tol`` are rejected rather
    than silently rescaled.
    """

    def __init__(self, algebra: BlockAlgebra, densities: Sequence[np.ndarray], mass_tol: float = STRUCT_TOL):
        self.algebra = algebra
        mats = []
        for d, rho in zip(algebra.block_dims, densities):
            arr = np.asarray(rho, dtype=complex)
            if arr.shape != (d, d):
                raise ValueError(f"density shape {arr.shape} != ({d}, {d})")
            if np.linalg.norm(arr - arr.conj().T, 2) > STRUCT_TOL:
                raise ValueError("density block is not self-adjoint")
            if np.linalg.eigvalsh(arr).min() < -STRUCT_TOL:
                raise ValueError("density block is not positive semidefinite")
            mats.append(arr)
        if len(mats) != algebra.num_blocks:
            raise ValueError(f"expected {algebra.num_blocks} densities, got {len(mats)}")
        mass = sum(float(np.trace(r).real) for r in mats)
        if abs(mass - 1.0) > mass_tol:
            raise ValueError(f"state mass {mass} deviates from 1 beyond tolerance {mass_tol}")
        self.densities = tuple((r / mass) for r in mats)
        for r in self.densities:
            r.setflags(write=False)

    def __call__(self, a: AlgebraElement) -> complex:
        if a.algebra != self.algebra:
            raise ValueError("element lives in a different algebra")
        return complex(sum(np.trace(r @ blk) for r, blk in zip(self.densities, a.blocks)))

    def as_covector(self) -> np.ndarray:
        """Row vector v with tau(a) = v . coords(a)."""
        parts = [r.T.reshape(-1) for r in self.densities]  # tr(rho a) = sum rho[k,j] a[j,k]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


class TracialState:
    """tau(a) = sum_b w_b tr(a_b) / d_b for non-negative weights summing to 1."""

    def __init__(self, algebra: BlockAlgebra, weights: Iterable[float], mass_tol: float = STRUCT_TOL):
        self.algebra = algebra
        ws = np.asarray(list(weights), dtype=float)
        if ws.shape != (algebra.num_blocks,):
            raise ValueError(f"expected {algebra.num_blocks} weights, got {ws.shape}")
        if ws.min(initial=0.0) < -STRUCT_TOL:
            raise ValueError("weights must be non-negative")
        mass = float(ws.sum())
        if abs(mass - 1.0) > mass_tol:
            raise ValueError(f"trace mass {mass} deviates from 1 beyond tolerance {mass_tol}")
        self.weights = np.clip(ws / mass, 0.0, None)
        self.weights.setflags(write=False)

    @classmethod
    def uniform(cls, algebra: BlockAlgebra) -> "TracialState":
        B = algebra.num_blocks
        return cls(algebra, [1.0 / B] * B)

    @classmethod
    def random(cls, algebra: BlockAlgebra, rng: np.random.Generator) -> "TracialState":
        w = rng.random(algebra.num_blocks) + 1e-3
        return cls(algebra, w / w.sum(), mass_tol=1e-9)

    def __call__(self, a: AlgebraElement) -> complex:
        if a.algebra != self.algebra:
            raise ValueError("element lives in a different algebra")
        return complex(
            sum(w * np.trace(blk) / d for w, blk, d in zip(self.weights, a.blocks, self.algebra.block_dims))
        )

    def as_state(self) -> State:
        densities = [
            (w / d) * np.eye(d, dtype=complex) for w, d in zip(self.weights, self.algebra.block_dims)
        ]
        return State(self.algebra, densities)

    def as_covector(self) -> np.ndarray:
        return self.as_state().as_covector()

    def vanishes_on(self, ideal: Ideal, tol: float = ARITH_TOL) -> bool:
        return all(self.weights[b] <= tol for b in ideal.blocks)

    def __repr__(self) -> str:
        return f"TracialState(weights={np.array2string(self.weights, precision=6)})"


def is_tracial(sigma: State, tol: float = STRUCT_TOL) -> bool:
    """True iff every density block is a scalar multiple of the identity.

    Equivalent to sigma(ab) = sigma(ba) for all a, b.
    """
    for rho, d in zip(sigma.densities, sigma.algebra.block_dims):
        scalar = np.trace(rho) / d
        if np.linalg.norm(rho - scalar * np.eye(d), 2) > tol:
            return False
    return True


def state_to_tracial(sigma: State, tol: float = STRUCT_TOL) -> TracialState:
    if not is_tracial(sigma, tol):
        raise ValueError("state is not tracial")
    weights = [float(np.trace(r).real) for r in sigma.densities]
    return TracialState(sigma.algebra, weights)
