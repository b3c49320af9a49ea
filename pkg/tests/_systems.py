"""The example systems the suite exercises throughout."""

import numpy as np

from latticekms import BlockAlgebra, DynamicalSystem, StarEndomorphism, endomorphism_from_map


def trivial_system(n: int) -> DynamicalSystem:
    """The trivial action of Z_+^n on C."""
    A = BlockAlgebra([1])
    return DynamicalSystem(A, [StarEndomorphism.identity(A)] * n)


def collapse_endo(A: BlockAlgebra) -> StarEndomorphism:
    """(a, b) |-> (a, a) on C^2."""
    return endomorphism_from_map(A, lambda e: A.element([e.blocks[0], e.blocks[0]]))


def c2_collapse_system() -> DynamicalSystem:
    """C^2 with the single non-injective generator (a, b) |-> (a, a)."""
    A = BlockAlgebra([1, 1])
    return DynamicalSystem(A, [collapse_endo(A)])


def c2_collapse_id_system() -> DynamicalSystem:
    """C^2 with (a, b) |-> (a, a) and the identity as second generator."""
    A = BlockAlgebra([1, 1])
    return DynamicalSystem(A, [collapse_endo(A), StarEndomorphism.identity(A)])


def m2c_system() -> DynamicalSystem:
    """M_2 (+) C with (A, c) |-> (c I_2, c); kernel is the matrix block."""
    B = BlockAlgebra([2, 1])
    phi = endomorphism_from_map(
        B, lambda e: B.element([e.blocks[1][0, 0] * np.eye(2), e.blocks[1]])
    )
    return DynamicalSystem(B, [phi])


def swap_system() -> DynamicalSystem:
    """C^2 with the coordinate swap, an automorphic (injective) system."""
    A = BlockAlgebra([1, 1])
    swap = endomorphism_from_map(A, lambda e: A.element([e.blocks[1], e.blocks[0]]))
    return DynamicalSystem(A, [swap])


def acceptance_systems() -> list[tuple[str, DynamicalSystem]]:
    return [
        ("trivial-C-n1", trivial_system(1)),
        ("trivial-C-n2", trivial_system(2)),
        ("C2-collapse-n1", c2_collapse_system()),
        ("C2-collapse-id-n2", c2_collapse_id_system()),
        ("M2+C-n1", m2c_system()),
    ]
