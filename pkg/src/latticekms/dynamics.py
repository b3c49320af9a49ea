"""Commuting semigroup actions of Z_+^n, invariance ideals, and the
tail-adding dilation.

A ``DynamicalSystem`` is n pairwise-commuting certified unital
*-endomorphisms alpha_1, ..., alpha_n of a block algebra; composites
alpha_x = alpha_1^{x_1} ... alpha_n^{x_n} are cached.

For x != 0 the invariance ideal is

    I_x = intersection over y in x-perp of
          alpha_y^{-1}( (intersection over i in supp x of ker alpha_i)^perp ),

with I_0 = (0).  The perp intersection is computed by sweeping perp-grid
levels until the block subset is stable for one full extra level; the
lattice of block subsets is a finite descending chain, so the sweep
terminates, and the stabilization level is recorded for audit.

The tail-adding dilation replaces a non-injective system by the bigger
algebra B = (+)_{x in F_m} A/I_x carrying the two-case generator maps

    beta_i(q_x(a) (x) e_x) = q_x(alpha_i(a)) (x) e_x + q_{x+e_i}(a) (x) e_{x+e_i}   if x_i = 0,
                             q_x(a) (x) e_{x+e_i}                                    if x_i >= 1,

truncated to F_m: summands whose target leaves the grid are dropped and
the affected source levels are marked boundary.  Compression to the
0-level reproduces the original generators exactly; injectivity on the
interior levels is verified at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    Ideal,
    StarEndomorphism,
    TracialState,
    kernel_ideal,
    preimage_ideal,
    quotient,
)
from .errors import InvariantFault, TruncationDepthError
from .lattice import MultiIndex, enumerate_grid, enumerate_supported_grid, guard_grid


class DynamicalSystem:
    """n commuting certified unital *-endomorphisms of one block algebra."""

    def __init__(self, algebra: BlockAlgebra, generators: Sequence[StarEndomorphism], tol: float = 1e-10):
        if not generators:
            raise ValueError("a system needs at least one generator")
        for g in generators:
            if g.algebra != algebra:
                raise ValueError("generator acts on a different algebra")
        self.algebra = algebra
        self.generators = tuple(generators)
        self.commutation_defect = 0.0
        units = algebra.basis()
        for i in range(len(generators)):
            for j in range(i + 1, len(generators)):
                gi, gj = generators[i], generators[j]
                for e in units:
                    d = (gi.apply(gj.apply(e)) - gj.apply(gi.apply(e))).norm()
                    if d > tol:
                        raise ValueError(
                            f"generators {i} and {j} fail to commute: defect {d:.3e} > {tol}"
                        )
                    self.commutation_defect = max(self.commutation_defect, d)
        self._compose_cache: dict[tuple[int, ...], StarEndomorphism] = {}
        self._ideal_cache: dict[frozenset[int], tuple[Ideal, int]] = {}

    @property
    def n(self) -> int:
        return len(self.generators)

    def compose(self, x: MultiIndex) -> StarEndomorphism:
        """alpha_x = alpha_1^{x_1} o ... o alpha_n^{x_n}; order is immaterial."""
        if x.n != self.n:
            raise ValueError(f"index dimension {x.n} != {self.n}")
        key = tuple(x)
        cached = self._compose_cache.get(key)
        if cached is not None:
            return cached
        if x.is_zero():
            out = StarEndomorphism.identity(self.algebra)
        else:
            # peel one step off the first nonzero coordinate and recurse
            i = min(x.support())
            out = self.generators[i].compose(self.compose(x - MultiIndex.unit(i, self.n)))
        self._compose_cache[key] = out
        return out

    def __repr__(self) -> str:
        return f"DynamicalSystem(n={self.n}, algebra={self.algebra!r})"


def compose_action(sys: DynamicalSystem, x: MultiIndex) -> StarEndomorphism:
    return sys.compose(x)


def invariance_ideal(sys: DynamicalSystem, x: MultiIndex, audit: bool = False):
    """I_x as a block subset; I_0 is the zero ideal.

    The result depends only on supp x and is memoized by it.  With
    ``audit=True`` the perp-sweep stabilization level is returned as well
    (0 when no sweep was needed).
    """
    if x.n != sys.n:
        raise ValueError(f"index dimension {x.n} != {sys.n}")
    if x.is_zero():
        out = (Ideal.empty(sys.algebra), 0)
        return out if audit else out[0]

    supp = frozenset(x.support())
    cached = sys._ideal_cache.get(supp)
    if cached is None:
        kernels = [kernel_ideal(sys.generators[i]) for i in sorted(supp)]
        K = reduce(Ideal.intersect, kernels).annihilator()
        perp_dirs = sorted(set(range(sys.n)) - supp)
        if not perp_dirs:
            # x has full support: x-perp = {0} and alpha_0^{-1}(K) = K
            cached = (K, 0)
        else:
            current = K
            level = 1
            stable_at = None
            # the block-subset chain is finite and descending; one quiet
            # extra level is the (recorded) stop rule
            max_level = 2 * sys.algebra.num_blocks + 2
            while level <= max_level:
                nxt = current
                for y in enumerate_supported_grid(level, perp_dirs, sys.n):
                    nxt = nxt.intersect(preimage_ideal(sys.compose(y), K))
                if nxt.blocks == current.blocks and level > 1:
                    stable_at = level - 1
                    break
                current = nxt
                level += 1
            if stable_at is None:
                stable_at = max_level
            cached = (current, stable_at)
        sys._ideal_cache[supp] = cached
    return cached if audit else cached[0]


@dataclass(frozen=True)
class InjectivityReport:
    injective: bool
    kernel_witness: tuple[int, int] | None  # (direction, block) when non-injective


def classify_injectivity(sys: DynamicalSystem) -> InjectivityReport:
    """Injectivity via kernels, cross-checked against I_{e_i} = A.

    The two characterizations must agree; disagreement is an invariant
    fault (an implementation bug), not a property of the input.
    """
    witness = None
    by_kernels = True
    for i, g in enumerate(sys.generators):
        ker = kernel_ideal(g)
        if not ker.is_empty:
            by_kernels = False
            if witness is None:
                witness = (i, min(ker.blocks))
    by_ideals = all(
        invariance_ideal(sys, MultiIndex.unit(i, sys.n)).is_full for i in range(sys.n)
    )
    if by_kernels != by_ideals:
        raise InvariantFault(
            f"injectivity characterizations disagree: kernels say {by_kernels}, "
            f"generator ideals say {by_ideals}"
        )
    return InjectivityReport(injective=by_kernels, kernel_witness=witness)


@dataclass(frozen=True)
class DilationLevel:
    index: MultiIndex
    retained_blocks: tuple[int, ...]  # original block labels surviving the quotient
    block_offset: int  # position of this level's first block in the big algebra


class DilatedSystem:
    """The truncated tail-adding dilation B = (+)_{x in F_m} A/I_x."""

    def __init__(self, sys: DynamicalSystem, m: int):
        if m < 1:
            raise ValueError(f"dilation level must be >= 1, got {m}")
        guard_grid(m, sys.n)
        self.system = sys
        self.m = m
        self.grid = enumerate_grid(m, sys.n)
        A = sys.algebra

        self.levels: list[DilationLevel] = []
        big_dims: list[int] = []
        self._level_of: dict[MultiIndex, int] = {}
        for x in self.grid:
            q = quotient(A, invariance_ideal(sys, x))
            self._level_of[x] = len(self.levels)
            self.levels.append(
                DilationLevel(index=x, retained_blocks=q.retained_blocks, block_offset=len(big_dims))
            )
            big_dims.extend(A.block_dims[b] for b in q.retained_blocks)
        self.algebra = BlockAlgebra(big_dims, allow_degenerate=False)
        self.boundary = frozenset(x for x in self.grid if max(x) == m)

        self._coord_offsets = self._build_coord_offsets()
        self.beta_matrices = [self._build_beta(i) for i in range(sys.n)]
        self.compression_defects = [self._compression_defect(i) for i in range(sys.n)]
        for i, d in enumerate(self.compression_defects):
            if d > 1e-12:
                raise InvariantFault(f"dilation compression differs from the base action in direction {i}: {d:.3e}")
        self.interior_min_singular = [self._interior_injectivity(i) for i in range(sys.n)]
        for i, s in enumerate(self.interior_min_singular):
            if s <= 1e-10:
                raise InvariantFault(
                    f"dilated generator {i} is not injective on the interior span "
                    f"(min singular value {s:.3e})"
                )

    # -- coordinate plumbing -------------------------------------------------

    def _build_coord_offsets(self) -> list[int]:
        """Start of each level's coordinate range in the big algebra."""
        offs = []
        pos = 0
        A = self.system.algebra
        for lvl in self.levels:
            offs.append(pos)
            pos += sum(A.block_dims[b] * A.block_dims[b] for b in lvl.retained_blocks)
        return offs

    def _project_rows(self, level: int) -> np.ndarray:
        """Matrix taking A-coordinates to the level's retained coordinates."""
        A = self.system.algebra
        lvl = self.levels[level]
        rows = []
        for b in lvl.retained_blocks:
            sl = A.coord_slice(b)
            rows.extend(range(sl.start, sl.stop))
        P = np.zeros((len(rows), A.coord_dim), dtype=complex)
        for r, c in enumerate(rows):
            P[r, c] = 1.0
        return P

    def _lift_cols(self, level: int) -> np.ndarray:
        """Matrix lifting the level's coordinates back into A (zero-fill)."""
        return self._project_rows(level).T

    def level_slice(self, level: int) -> slice:
        start = self._coord_offsets[level]
        A = self.system.algebra
        width = sum(A.block_dims[b] ** 2 for b in self.levels[level].retained_blocks)
        return slice(start, start + width)

    def _build_beta(self, i: int) -> np.ndarray:
        sys = self.system
        D = self.algebra.coord_dim
        mat = np.zeros((D, D), dtype=complex)
        alpha_i = sys.generators[i].matrix
        e_i = MultiIndex.unit(i, sys.n)
        for li, lvl in enumerate(self.levels):
            x = lvl.index
            src = self.level_slice(li)
            lift = self._lift_cols(li)
            target_up = None
            if x[i] < self.m:
                target_up = self._level_of[x + e_i]
            if x[i] == 0:
                # stay at x with alpha_i applied, plus the tail copy at x + e_i
                proj_same = self._project_rows(li)
                mat[self.level_slice(li), src] += proj_same @ alpha_i @ lift
                if target_up is not None:
                    proj_up = self._project_rows(target_up)
                    mat[self.level_slice(target_up), src] += proj_up @ lift
            else:
                if target_up is not None:
                    proj_up = self._project_rows(target_up)
                    mat[self.level_slice(target_up), src] += proj_up @ lift
                # x_i = m: the shifted copy leaves the grid and is dropped
        return mat

    def _compression_defect(self, i: int) -> float:
        """Level-0 corner of beta_i against alpha_i (I_0 = 0, so level 0 is A)."""
        sl = self.level_slice(self._level_of[MultiIndex.zero(self.system.n)])
        corner = self.beta_matrices[i][sl, sl]
        return float(np.linalg.norm(corner - self.system.generators[i].matrix, 2))

    def _interior_injectivity(self, i: int) -> float:
        interior_cols: list[int] = []
        for li, lvl in enumerate(self.levels):
            if max(lvl.index) <= self.m - 1:
                sl = self.level_slice(li)
                interior_cols.extend(range(sl.start, sl.stop))
        if not interior_cols:
            return float("inf")
        sub = self.beta_matrices[i][:, interior_cols]
        sv = np.linalg.svd(sub, compute_uv=False)
        return float(sv[-1])

    # -- elements ------------------------------------------------------------

    def embed_at_zero(self, a: AlgebraElement) -> AlgebraElement:
        """a placed in the 0-summand of B (all other levels zero)."""
        if a.algebra != self.system.algebra:
            raise ValueError("element lives in a different algebra")
        vec = np.zeros(self.algebra.coord_dim, dtype=complex)
        li = self._level_of[MultiIndex.zero(self.system.n)]
        vec[self.level_slice(li)] = self._project_rows(li) @ a.coords()
        return self.algebra.from_coords(vec)

    def apply_beta(self, w: MultiIndex, b: AlgebraElement) -> AlgebraElement:
        """beta_w = beta_1^{w_1} ... beta_n^{w_n} applied to b."""
        if b.algebra != self.algebra:
            raise ValueError("element lives in a different algebra")
        vec = b.coords()
        for i, wi in enumerate(w):
            for _ in range(wi):
                vec = self.beta_matrices[i] @ vec
        return self.algebra.from_coords(vec)


def dilate(sys: DynamicalSystem, m: int) -> DilatedSystem:
    return DilatedSystem(sys, m)


def dilation_trace_value(
    dilation: DilatedSystem,
    tau: TracialState,
    x: MultiIndex,
    a: AlgebraElement,
    y: MultiIndex,
) -> complex:
    """delta_{x,y} tau(beta_{m*1 - x}(a (x) e_0)) on the truncated dilation.

    ``tau`` is read as the trace at the deepest stage m*1 of the inductive
    window; shallower stages pull back through the dilated action.  The
    query needs x <= m*1 so that every intermediate level stays inside the
    grid and no truncation drop can corrupt the value.
    """
    sys = dilation.system
    if tau.algebra != dilation.algebra:
        raise ValueError("trace lives on a different algebra than the dilation")
    if x != y:
        return 0j
    top = MultiIndex((dilation.m,) * sys.n)
    if not x.leq(top):
        raise TruncationDepthError(
            f"monomial index {tuple(x)} needs more tail room than level m={dilation.m}; increase m"
        )
    steps = top - x
    return tau(dilation.apply_beta(steps, dilation.embed_at_zero(a)))


def trace_from_dilation(
    sys: DynamicalSystem,
    tau,
    x: MultiIndex,
    a: AlgebraElement,
    y: MultiIndex,
    dilation: DilatedSystem | None = None,
) -> complex:
    """Value of the dilation-induced tracial functional on V_x a V_y*.

    For injective (hence automorphic) systems the exact inverse is used:
    the value is delta_{x,y} tau(alpha_x^{-1}(a)) with ``tau`` a tracial
    state on the base algebra.  Otherwise a truncated dilation must be
    supplied, ``tau`` must live on its algebra, and the evaluation window
    must be deep enough (see ``dilation_trace_value``); the operation
    refuses rather than answer from a corrupted window.

    The functional this induces is only as tracial as ``tau`` is
    compatible with the dilated action; use the kms-module constructor
    to get a verified functional.
    """
    if x.n != sys.n or y.n != sys.n:
        raise ValueError("index dimension mismatch")
    if classify_injectivity(sys).injective:
        if not isinstance(tau, TracialState) or tau.algebra != sys.algebra:
            raise ValueError("automorphic evaluation needs a tracial state on the base algebra")
        if x != y:
            return 0j
        return tau(sys.compose(x).inverse().apply(a))
    if dilation is None:
        raise TruncationDepthError(
            "non-injective system: supply a truncated dilation (increase m as needed)"
        )
    if dilation.system is not sys:
        raise ValueError("dilation was built from a different system")
    return dilation_trace_value(dilation, tau, x, a, y)
