"""Example systems shared by the demo scripts."""

import numpy as np

from latticekms import BlockAlgebra, DynamicalSystem, StarEndomorphism, endomorphism_from_map


def trivial(n: int) -> DynamicalSystem:
    A = BlockAlgebra([1])
    return DynamicalSystem(A, [StarEndomorphism.identity(A)] * n)


def c2_collapse() -> DynamicalSystem:
    A = BlockAlgebra([1, 1])
    alpha = endomorphism_from_map(A, lambda e: A.element([e.blocks[0], e.blocks[0]]))
    return DynamicalSystem(A, [alpha])


def c2_collapse_id() -> DynamicalSystem:
    A = BlockAlgebra([1, 1])
    alpha = endomorphism_from_map(A, lambda e: A.element([e.blocks[0], e.blocks[0]]))
    return DynamicalSystem(A, [alpha, StarEndomorphism.identity(A)])


def m2c() -> DynamicalSystem:
    B = BlockAlgebra([2, 1])
    phi = endomorphism_from_map(
        B, lambda e: B.element([e.blocks[1][0, 0] * np.eye(2), e.blocks[1]])
    )
    return DynamicalSystem(B, [phi])
