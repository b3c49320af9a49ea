"""Concrete truncated Fock representation on H (x) l^2(F_m).

H carries the standard representation of the block algebra; the lattice
part is truncated to the grid F_m.  The isometries act as level shifts
that annihilate anything leaving the grid, which makes them partial
isometries globally: every relation check is therefore scoped to the
declared safe subspace (levels w with w + d*(1,...,1) <= m*(1,...,1)),
where the shift algebra is exact and each assertion is literally true.

Operators are stored sparse; norms fall back to iterative estimates once
the carrier dimension is large enough that dense linear algebra stops
being free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .algebra import AlgebraElement, State, TracialState
from .dynamics import DynamicalSystem
from .errors import InvariantFault, SizeGuardError
from .lattice import MultiIndex, enumerate_grid, guard_grid
from .monomial import Monomial, MonomialSum

DENSE_NORM_CUTOFF = 2000


def _spectral_norm(op: sp.spmatrix) -> float:
    if min(op.shape) == 0:
        return 0.0
    if max(op.shape) <= DENSE_NORM_CUTOFF:
        return float(np.linalg.norm(op.toarray(), 2))
    sv = spla.svds(op.tocsc().astype(complex), k=1, return_singular_vectors=False)
    return float(sv[0])


@dataclass(frozen=True)
class NicaPairReport:
    """Operator-norm residuals of the covariance relations on the safe subspace."""

    m: int
    degree: int
    safe_levels: int
    isometry: tuple[float, ...]  # per direction: ||(V_i* V_i - I) P||
    doubly_commuting: tuple[float, ...]  # per i<j pair: ||(V_i V_j* - V_j* V_i) P||
    covariance: tuple[float, ...]  # per direction, max over basis elements

    def max_residual(self) -> float:
        vals = self.isometry + self.doubly_commuting + self.covariance
        return max(vals) if vals else 0.0


@dataclass(frozen=True)
class CoreIndependenceResult:
    independent: bool
    recovered: list[AlgebraElement]
    max_error: float


class TruncatedFock:
    """The orbit representation of one system at truncation level m."""

    def __init__(self, sys: DynamicalSystem, m: int, max_dim: int = 200_000):
        guard_grid(m, sys.n)
        self.system = sys
        self.m = m
        self.grid = enumerate_grid(m, sys.n)
        self._level_of = {x: i for i, x in enumerate(self.grid)}
        self.rep_dim = sys.algebra.rep_dim
        self.dim = self.rep_dim * len(self.grid)
        if self.dim > max_dim:
            raise SizeGuardError(f"Fock carrier dimension {self.dim} exceeds {max_dim}")
        self._shift_cache: dict[tuple[int, ...], sp.csr_matrix] = {}

    # -- basic operators -----------------------------------------------------

    def _std(self, a: AlgebraElement) -> np.ndarray:
        """The standard (faithful) representation of one element on H."""
        out = np.zeros((self.rep_dim, self.rep_dim), dtype=complex)
        off = 0
        for blk, d in zip(a.blocks, self.system.algebra.block_dims):
            out[off : off + d, off : off + d] = blk
            off += d
        return out

    def pi(self, a: AlgebraElement) -> sp.csr_matrix:
        """pi~(a): block-diagonal over levels, twisting by alpha_w at level w."""
        if a.algebra != self.system.algebra:
            raise ValueError("element lives in a different algebra")
        blocks = [self._std(self.system.compose(w).apply(a)) for w in self.grid]
        return sp.block_diag(blocks, format="csr", dtype=complex)

    def shift(self, y: MultiIndex) -> sp.csr_matrix:
        """V_y: level w -> level w + y, zero where the target leaves the grid."""
        if y.n != self.system.n:
            raise ValueError("index dimension mismatch")
        key = tuple(y)
        cached = self._shift_cache.get(key)
        if cached is not None:
            return cached
        rows, cols = [], []
        for w, wi in self._level_of.items():
            target = MultiIndex(tuple(a + b for a, b in zip(w, y)))
            ti = self._level_of.get(target)
            if ti is None:
                continue
            for h in range(self.rep_dim):
                rows.append(ti * self.rep_dim + h)
                cols.append(wi * self.rep_dim + h)
        V = sp.csr_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(self.dim, self.dim), dtype=complex
        )
        self._shift_cache[key] = V
        return V

    def monomial_operator(self, x: MultiIndex, a: AlgebraElement, y: MultiIndex) -> sp.csr_matrix:
        """V_x pi~(a) V_y*."""
        return self.shift(x) @ self.pi(a) @ self.shift(y).conj().T

    def operator_of(self, f) -> sp.csr_matrix:
        if isinstance(f, Monomial):
            return self.monomial_operator(f.x, f.a, f.y)
        if isinstance(f, MonomialSum):
            out = sp.csr_matrix((self.dim, self.dim), dtype=complex)
            for t in f.terms():
                out = out + self.monomial_operator(t.x, t.a, t.y)
            return out
        raise TypeError(f"cannot represent {type(f).__name__}")

    # -- safe subspace -------------------------------------------------------

    def safe_levels(self, degree: int) -> list[MultiIndex]:
        top = MultiIndex((self.m,) * self.system.n)
        pad = MultiIndex((degree,) * self.system.n)
        return [w for w in self.grid if (w + pad).leq(top)]

    def safe_projector(self, degree: int) -> sp.csr_matrix:
        levels = self.safe_levels(degree)
        if not levels:
            raise SizeGuardError(
                f"safe subspace for degree {degree} at m={self.m} is empty; increase m"
            )
        diag = np.zeros(self.dim)
        for w in levels:
            li = self._level_of[w]
            diag[li * self.rep_dim : (li + 1) * self.rep_dim] = 1.0
        return sp.diags(diag, format="csr", dtype=complex)

    def check_nica_pair(self, degree: int) -> NicaPairReport:
        """Residuals of isometry, double commutation, and covariance.

        All three relations are checked as operators restricted to the
        safe subspace, reported as operator norms.
        """
        sys = self.system
        P = self.safe_projector(degree)
        eye = sp.identity(self.dim, format="csr", dtype=complex)
        Vs = [self.shift(MultiIndex.unit(i, sys.n)) for i in range(sys.n)]

        isometry = tuple(
            _spectral_norm((V.conj().T @ V - eye) @ P) for V in Vs
        )
        doubly = []
        for i in range(sys.n):
            for j in range(sys.n):
                if i == j:
                    continue
                doubly.append(
                    _spectral_norm((Vs[i] @ Vs[j].conj().T - Vs[j].conj().T @ Vs[i]) @ P)
                )
        covariance = []
        for i in range(sys.n):
            worst = 0.0
            for e in sys.algebra.basis():
                lhs = self.pi(e) @ Vs[i]
                rhs = Vs[i] @ self.pi(sys.generators[i].apply(e))
                worst = max(worst, _spectral_norm((lhs - rhs) @ P))
            covariance.append(worst)
        return NicaPairReport(
            m=self.m,
            degree=degree,
            safe_levels=len(self.safe_levels(degree)),
            isometry=isometry,
            doubly_commuting=tuple(doubly),
            covariance=tuple(covariance),
        )

    # -- core combinations -----------------------------------------------------

    def core_independence_check(
        self,
        levels: list[MultiIndex],
        coefficients: list[AlgebraElement],
        tol: float = 1e-10,
    ) -> CoreIndependenceResult:
        """Vacuum-induction peeling of X = sum_w V_w pi~(a_w) V_w*.

        Walks the levels in increasing degree order, reading off one
        coefficient per step from the diagonal level block and subtracting
        its twisted contributions from deeper levels.  The verdict
        (does X = 0 force all a_w = 0?) is cross-checked against the rank
        of the assembled linear map; disagreement raises an invariant
        fault.
        """
        sys = self.system
        if len(levels) != len(coefficients):
            raise ValueError("levels and coefficients must pair up")
        if len(set(map(tuple, levels))) != len(levels):
            raise ValueError("levels must be distinct")
        for w in levels:
            if w not in self._level_of:
                raise ValueError(f"level {tuple(w)} outside F_{self.m}")

        X = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for w, a in zip(levels, coefficients):
            X = X + self.monomial_operator(w, a, w)
        Xd = X.toarray()

        order = sorted(range(len(levels)), key=lambda i: (levels[i].degree(), tuple(levels[i])))
        recovered: dict[int, AlgebraElement] = {}
        for i in order:
            z = levels[i]
            li = self._level_of[z]
            sl = slice(li * self.rep_dim, (li + 1) * self.rep_dim)
            block = Xd[sl, sl].copy()
            for j, aj in recovered.items():
                w = levels[j]
                if w.leq(z) and w != z:
                    block -= self._std(sys.compose(z - w).apply(aj))
            recovered[i] = self._unstd(block)
        rec_list = [recovered[i] for i in range(len(levels))]
        max_err = max(
            ((r - a).norm() for r, a in zip(rec_list, coefficients)), default=0.0
        )

        # independent direct solve: trivial kernel of the assembly map
        D = sys.algebra.coord_dim
        cols = []
        for w in levels:
            for e in sys.algebra.basis():
                cols.append(self.monomial_operator(w, e, w).toarray().reshape(-1))
        L = np.array(cols).T
        rank = np.linalg.matrix_rank(L, tol=1e-10)
        independent = rank == len(levels) * D

        if independent and max_err > tol:
            raise InvariantFault(
                f"peeling failed to recover coefficients (error {max_err:.3e}) "
                "although the assembly map has trivial kernel"
            )
        if not independent and max_err <= tol:
            raise InvariantFault("assembly map is rank deficient but peeling recovered everything")
        return CoreIndependenceResult(independent=independent, recovered=rec_list, max_error=max_err)

    def _unstd(self, mat: np.ndarray) -> AlgebraElement:
        """Read an element back off its standard-representation matrix."""
        blocks = []
        off = 0
        for d in self.system.algebra.block_dims:
            blocks.append(mat[off : off + d, off : off + d].copy())
            off += d
        return AlgebraElement(self.system.algebra, blocks)

    # -- vacuum functional ---------------------------------------------------

    def vacuum_functional(self, tau, f) -> complex:
        """<F (xi_tau (x) e_0), xi_tau (x) e_0> for the GNS vector of tau.

        The GNS representation of a block state is a multiplicity
        amplification of the standard representation, so the inner product
        splits over the eigenpairs of the density blocks and can be
        evaluated entirely inside this carrier.
        """
        if isinstance(tau, TracialState):
            tau = tau.as_state()
        if not isinstance(tau, State) or tau.algebra != self.system.algebra:
            raise ValueError("state lives in a different algebra")
        F = self.operator_of(f)
        li = self._level_of[MultiIndex.zero(self.system.n)]
        out = 0j
        off = 0
        for rho, d in zip(tau.densities, self.system.algebra.block_dims):
            evals, evecs = np.linalg.eigh(rho)
            for mu, col in zip(evals, evecs.T):
                if mu <= 1e-15:
                    continue
                vec = np.zeros(self.dim, dtype=complex)
                vec[li * self.rep_dim + off : li * self.rep_dim + off + d] = col
                out += mu * complex(np.vdot(vec, F @ vec))
            off += d
        return out


def build_representation(sys: DynamicalSystem, m: int) -> TruncatedFock:
    return TruncatedFock(sys, m)


def operator_triples(op: sp.spmatrix) -> str:
    """Coordinate-triple text export: one 'row col value' line per entry.

    Values render with 17 significant digits so the export is exact for
    double precision and byte-stable across runs.
    """
    coo = op.tocoo()
    entries = sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))
    lines = []
    for r, c, v in entries:
        z = complex(v)
        lines.append(f"{r} {c} {z.real:.17g}{z.imag:+.17g}i")
    return "\n".join(lines)
