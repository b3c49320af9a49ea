"""Multi-index arithmetic on Z_+^n and the grid combinatorics built on it.

Everything downstream consumes the lattice structure defined here: the
coordinate-wise partial order, joins/meets, supports and orthogonality,
the finite grids F_m = { y : y <= m*(1,...,1) }, the alternating
inclusion-exclusion sum over a grid, and the multi-geometric sums with
their exact tail bounds.

``MultiIndex`` subclasses ``tuple``; the built-in comparison operators
therefore keep their lexicographic (total) meaning, which is what the
deterministic enumeration order relies on.  The lattice partial order is
spelled ``leq`` to avoid any ambiguity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import SizeGuardError

# Desk-scale caps; |F_m| = (m+1)**n blows up quickly.
MAX_LEVEL = 12
MAX_DIM = 6


class MultiIndex(tuple):
    """An element of Z_+^n with lattice operations.

    Instances are immutable, hashable, and compare/sort lexicographically
    like plain tuples.  The coordinate-wise partial order is ``leq``.
    """

    def __new__(cls, coords: Iterable[int]) -> "MultiIndex":
        coords = tuple(int(c) for c in coords)
        if not coords:
            raise ValueError("multi-index needs at least one coordinate")
        if any(c < 0 for c in coords):
            raise ValueError(f"negative coordinate in {coords}")
        return super().__new__(cls, coords)

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, i: int, n: int) -> "MultiIndex":
        """The i-th standard generator e_i of Z_+^n (0-based i)."""
        if not 0 <= i < n:
            raise ValueError(f"direction {i} out of range for n={n}")
        return cls(tuple(1 if j == i else 0 for j in range(n)))

    @classmethod
    def ones(cls, n: int) -> "MultiIndex":
        return cls((1,) * n)

    @property
    def n(self) -> int:
        return len(self)

    def degree(self) -> int:
        """|x| = sum of the coordinates."""
        return sum(self)

    def support(self) -> frozenset[int]:
        """{ i : x_i != 0 } as 0-based directions."""
        return frozenset(i for i, c in enumerate(self) if c != 0)

    def leq(self, other: "MultiIndex") -> bool:
        """Coordinate-wise partial order x <= y."""
        self._check_dim(other)
        return all(a <= b for a, b in zip(self, other))

    def join(self, other: "MultiIndex") -> "MultiIndex":
        self._check_dim(other)
        # coordinates are already validated; bypass the checking constructor
        return tuple.__new__(MultiIndex, (max(a, b) for a, b in zip(self, other)))

    def meet(self, other: "MultiIndex") -> "MultiIndex":
        self._check_dim(other)
        return tuple.__new__(MultiIndex, (min(a, b) for a, b in zip(self, other)))

    def is_perp(self, other: "MultiIndex") -> bool:
        """True iff the supports are disjoint."""
        self._check_dim(other)
        return not (self.support() & other.support())

    def __add__(self, other):  # type: ignore[override]
        self._check_dim(other)
        return tuple.__new__(MultiIndex, (a + b for a, b in zip(self, other)))

    def __sub__(self, other) -> "MultiIndex":
        self._check_dim(other)
        diff = tuple(a - b for a, b in zip(self, other))
        if any(c < 0 for c in diff):
            raise ValueError(f"{tuple(self)} - {tuple(other)} leaves Z_+^n")
        return tuple.__new__(MultiIndex, diff)

    def scale(self, k: int) -> "MultiIndex":
        return MultiIndex(tuple(k * c for c in self))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self)

    def _check_dim(self, other) -> None:
        if len(self) != len(other):
            raise ValueError(
                f"dimension mismatch: {len(self)} vs {len(other)}"
            )

    def __repr__(self) -> str:
        return f"({', '.join(str(c) for c in self)})"


def guard_grid(m: int, n: int, max_level: int = MAX_LEVEL, max_dim: int = MAX_DIM) -> None:
    if m < 0:
        raise ValueError(f"truncation level must be >= 0, got {m}")
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if m > max_level or n > max_dim:
        raise SizeGuardError(
            f"grid F_{m} in dimension {n} exceeds the size guard "
            f"(m <= {max_level}, n <= {max_dim}); (m+1)^n = {(m + 1) ** n}"
        )


def enumerate_grid(m: int, n: int, max_level: int = MAX_LEVEL, max_dim: int = MAX_DIM) -> list[MultiIndex]:
    """All (m+1)**n points of F_m in lexicographic order.

    The order is part of the contract: reports and tests rely on the
    enumeration being byte-stable across runs.
    """
    guard_grid(m, n, max_level=max_level, max_dim=max_dim)
    return [MultiIndex(c) for c in itertools.product(range(m + 1), repeat=n)]


def enumerate_supported_grid(m: int, directions: Iterable[int], n: int) -> list[MultiIndex]:
    """Points of F_m supported on the given directions, lex order.

    Used for the perp-lattice sweeps: x_perp intersected with F_m is the
    grid over the complementary directions.
    """
    dirs = sorted(set(directions))
    for i in dirs:
        if not 0 <= i < n:
            raise ValueError(f"direction {i} out of range for n={n}")
    if not dirs:
        return [MultiIndex.zero(n)]
    out = []
    for combo in itertools.product(range(m + 1), repeat=len(dirs)):
        coords = [0] * n
        for i, c in zip(dirs, combo):
            coords[i] = c
        out.append(MultiIndex(coords))
    out.sort(key=tuple)
    return out


def inclusion_exclusion_sum(k: Mapping[MultiIndex, complex], y: MultiIndex, m: int) -> complex:
    """The literal alternating double sum over F_m.

    Returns sum_{0 <= x <= y} (-1)^|x| sum_{x <= w in F_m} k_w, evaluated
    term by term with no algebraic shortcut: the whole point of this
    routine is to serve as an oracle against the closed combinatorial
    identity (the value is k_0 when y = (1,...,1), and more generally the
    sum of k_w over the w with support disjoint from supp y).

    ``k`` must be defined on every point of F_m.
    """
    n = y.n
    if not y.leq(MultiIndex.ones(n)):
        raise ValueError(f"y must satisfy y <= (1,...,1), got {tuple(y)}")
    points = enumerate_grid(m, n)
    missing = [w for w in points if w not in k]
    if missing:
        raise ValueError(f"k is missing entries on F_{m}, e.g. {tuple(missing[0])}")
    total = 0j
    for x in enumerate_grid(1, n):
        if not x.leq(y):
            continue
        sign = (-1) ** x.degree()
        inner = 0j
        for w in points:
            if x.leq(w):
                inner += complex(k[w])
        total += sign * inner
    return total


@dataclass(frozen=True)
class GridGeometricSum:
    """Partial and full multi-geometric sums with the exact tail gap."""

    partial_sum: float
    full_sum: float
    tail_bound: float


def geometric_grid_sum(betabar: Iterable[float], m: int) -> GridGeometricSum:
    """Closed forms for sum_{w in F_m} exp(-<w, betabar>) and its limit.

    partial_sum = prod_i (1 - e^{-betabar_i (m+1)}) / (1 - e^{-betabar_i}),
    full_sum    = prod_i (1 - e^{-betabar_i})^{-1},
    tail_bound  = full_sum - partial_sum >= 0.

    Every betabar_i must be positive; otherwise the full series diverges.
    """
    bb = [float(b) for b in betabar]
    if m < 0:
        raise ValueError(f"level must be >= 0, got {m}")
    if not bb:
        raise ValueError("betabar must be non-empty")
    if any(b <= 0 for b in bb):
        bad = min(bb)
        raise ValueError(f"diverging series: betabar must be positive, got {bad}")
    partial = 1.0
    full = 1.0
    for b in bb:
        q = math.exp(-b)
        partial *= (1.0 - q ** (m + 1)) / (1.0 - q)
        full *= 1.0 / (1.0 - q)
    return GridGeometricSum(partial_sum=partial, full_sum=full, tail_bound=max(full - partial, 0.0))


def brute_force_grid_sum(betabar: Iterable[float], m: int) -> float:
    """Direct loop over F_m; oracle for the product closed form."""
    bb = [float(b) for b in betabar]
    total = 0.0
    for w in enumerate_grid(m, len(bb)):
        total += math.exp(-sum(wi * bi for wi, bi in zip(w, bb)))
    return total
