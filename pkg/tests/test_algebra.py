import numpy as np
import pytest

from latticekms import (
    BlockAlgebra,
    EndomorphismViolation,
    Ideal,
    State,
    StarEndomorphism,
    TracialState,
    endomorphism_from_map,
    is_tracial,
    kernel_ideal,
    preimage_ideal,
    quotient,
    validate_endomorphism,
)
from latticekms.algebra import state_to_tracial


@pytest.fixture
def c2():
    return BlockAlgebra([1, 1])


@pytest.fixture
def m2c():
    return BlockAlgebra([2, 1])


def collapse(c2):
    return endomorphism_from_map(c2, lambda e: c2.element([e.blocks[0], e.blocks[0]]))


def test_element_arithmetic(m2c):
    rng = np.random.default_rng(0)
    a = m2c.random_element(rng)
    b = m2c.random_element(rng)
    assert a.adjoint().adjoint().approx_eq(a)
    assert (m2c.unit() * a).approx_eq(a)
    assert (a * m2c.unit()).approx_eq(a)
    assert ((a + b) - b).approx_eq(a)
    assert ((2.0 * a) - a).approx_eq(a)


def test_norm_selfadjoint_block(m2c):
    a = m2c.element([np.array([[0, 1], [1, 0]]), np.zeros((1, 1))])
    # eigenvalue oracle for the spectral norm
    eig = max(abs(np.linalg.eigvalsh(np.array([[0, 1], [1, 0]], dtype=complex))))
    assert a.norm() == pytest.approx(eig) == pytest.approx(1.0)


def test_norm_is_max_over_blocks(m2c):
    a = m2c.element([np.eye(2), np.array([[3.0]])])
    assert a.norm() == pytest.approx(3.0)


def test_validate_identity(c2):
    out = validate_endomorphism(c2, np.eye(2))
    assert isinstance(out, StarEndomorphism)
    assert out.certificate.multiplicative_defect == 0.0


def test_validate_collapse_is_valid_but_not_injective(c2):
    phi = collapse(c2)
    assert isinstance(phi, StarEndomorphism)
    assert not phi.is_injective()


def test_validate_reports_multiplicativity_violation(c2):
    # (a, b) |-> (a + b, 0): phi(e1) phi(e2) = (1,0)(1,0) != phi(e1 e2) = 0
    mat = np.array([[1.0, 1.0], [0.0, 0.0]])
    out = validate_endomorphism(c2, mat)
    assert isinstance(out, EndomorphismViolation)
    assert out.kind == "multiplicative"
    assert "e" in out.detail  # names the offending basis pair
    assert out.defect > 1e-3


def test_validate_reports_unital_violation(c2):
    # multiplicative and adjoint-preserving, but kills the unit of block 2
    mat = np.diag([1.0, 0.0])
    out = validate_endomorphism(c2, mat)
    assert isinstance(out, EndomorphismViolation)
    assert out.kind == "unital"


def test_kernel_ideal(c2):
    assert kernel_ideal(StarEndomorphism.identity(c2)).is_empty
    assert sorted(kernel_ideal(collapse(c2)).blocks) == [1]
    A3 = BlockAlgebra([1, 1, 1])
    # kill the third coordinate, keep the first two
    phi = endomorphism_from_map(
        A3, lambda e: A3.element([e.blocks[0], e.blocks[1], e.blocks[1]])
    )
    assert sorted(kernel_ideal(phi).blocks) == [2]


def test_annihilator(c2):
    assert Ideal.empty(c2).annihilator().is_full
    assert Ideal.full(c2).annihilator().is_empty
    assert sorted(Ideal(c2, frozenset({1})).annihilator().blocks) == [0]
    for blocks in (frozenset(), frozenset({0}), frozenset({0, 1})):
        ideal = Ideal(c2, blocks)
        assert ideal.annihilator().annihilator() == ideal


def test_preimage_ideal(c2):
    phi = collapse(c2)
    assert preimage_ideal(phi, Ideal.full(c2)).is_full
    # phi(1_0) = (1, 1) is not inside {block 0}; phi(1_1) = 0 is
    assert sorted(preimage_ideal(phi, Ideal(c2, frozenset({0}))).blocks) == [1]
    ident = StarEndomorphism.identity(c2)
    for blocks in (frozenset(), frozenset({0}), frozenset({1})):
        ideal = Ideal(c2, blocks)
        assert preimage_ideal(ident, ideal) == ideal


def test_preimage_brute_force_oracle(c2):
    # block b is in the preimage iff every element of block b maps into I
    phi = collapse(c2)
    ideal = Ideal(c2, frozenset({0}))
    expected = set()
    for b in range(2):
        units = [e for e, lab in zip(c2.basis(), c2.basis_labels()) if lab.startswith(f"b{b}")]
        if all(ideal.contains_element(phi.apply(e)) for e in units):
            expected.add(b)
    assert preimage_ideal(phi, ideal).blocks == frozenset(expected)


def test_preimage_monotonicity():
    rng = np.random.default_rng(17)
    A = BlockAlgebra([1, 1, 1])
    maps = [
        endomorphism_from_map(A, lambda e, p=perm: A.element([e.blocks[i] for i in p]))
        for perm in ((0, 0, 1), (1, 1, 2), (2, 0, 0))
    ]
    for phi in maps:
        for _ in range(20):
            small = frozenset(int(b) for b in rng.choice(3, size=1))
            big = small | frozenset(int(b) for b in rng.choice(3, size=1))
            pre_small = preimage_ideal(phi, Ideal(A, small))
            pre_big = preimage_ideal(phi, Ideal(A, big))
            assert pre_small.blocks <= pre_big.blocks


def test_quotient(c2, m2c):
    q = quotient(c2, Ideal.empty(c2))
    assert q.algebra.block_dims == c2.block_dims
    q1 = quotient(c2, Ideal(c2, frozenset({0})))
    assert q1.algebra.block_dims == (1,)
    rng = np.random.default_rng(2)
    qm = quotient(m2c, Ideal(m2c, frozenset({1})))
    for _ in range(10):
        a = m2c.random_element(rng)
        b = m2c.random_element(rng)
        assert qm.project(a * b).approx_eq(qm.project(a) * qm.project(b))
    assert qm.project(m2c.unit()).approx_eq(qm.algebra.unit())


def test_quotient_by_everything_is_degenerate(c2):
    q = quotient(c2, Ideal.full(c2))
    assert q.degenerate
    assert q.algebra.num_blocks == 0


def test_is_tracial(m2c):
    tracial = TracialState(m2c, [0.5, 0.5]).as_state()
    assert is_tracial(tracial)
    rho = State(m2c, [np.diag([1.0, 0.0]), np.zeros((1, 1))])
    assert not is_tracial(rho)
    # witnessed: tau(e12 e21) != tau(e21 e12)
    e12 = m2c.element([np.array([[0, 1], [0, 0]]), np.zeros((1, 1))])
    e21 = e12.adjoint()
    assert abs(rho(e12 * e21) - rho(e21 * e12)) > 0.5
    comm = BlockAlgebra([1, 1, 1])
    any_state = State(comm, [np.array([[0.2]]), np.array([[0.3]]), np.array([[0.5]])])
    assert is_tracial(any_state)


def test_tracial_state_trace_property(m2c):
    rng = np.random.default_rng(4)
    tau = TracialState.random(m2c, rng)
    for _ in range(25):
        a = m2c.random_element(rng)
        b = m2c.random_element(rng)
        assert abs(tau(a * b) - tau(b * a)) <= 1e-12 * max(1.0, a.norm() * b.norm())


def test_state_roundtrip_and_covector(m2c):
    rng = np.random.default_rng(9)
    tau = TracialState.random(m2c, rng)
    sigma = tau.as_state()
    assert state_to_tracial(sigma).weights == pytest.approx(tau.weights)
    vec = sigma.as_covector()
    for _ in range(5):
        a = m2c.random_element(rng)
        assert complex(vec @ a.coords()) == pytest.approx(sigma(a))


def test_state_mass_rejection(c2):
    with pytest.raises(ValueError, match="mass"):
        TracialState(c2, [0.5, 0.6])
    with pytest.raises(ValueError, match="mass"):
        State(c2, [np.array([[0.7]]), np.array([[0.2]])])
    with pytest.raises(ValueError):
        TracialState(c2, [1.5, -0.5])


def test_state_rejects_bad_densities(m2c):
    with pytest.raises(ValueError, match="positive semidefinite"):
        State(m2c, [np.diag([1.5, -0.5]), np.zeros((1, 1))])
    with pytest.raises(ValueError, match="self-adjoint"):
        State(m2c, [np.array([[0.5, 1.0], [0.0, 0.5]]), np.zeros((1, 1))])


def test_kernel_empty_iff_full_rank(c2, m2c):
    for alg, builder in (
        (c2, lambda e: c2.element([e.blocks[1], e.blocks[0]])),
        (c2, lambda e: c2.element([e.blocks[0], e.blocks[0]])),
        (m2c, lambda e: m2c.element([e.blocks[1][0, 0] * np.eye(2), e.blocks[1]])),
    ):
        phi = endomorphism_from_map(alg, builder)
        assert kernel_ideal(phi).is_empty == phi.is_injective()


def test_block_subsets_are_ideals(m2c):
    # randomized closure test for the load-bearing structure assumption:
    # every block subset absorbs multiplication from both sides
    rng = np.random.default_rng(21)
    ideal = Ideal(m2c, frozenset({0}))
    for _ in range(20):
        a = m2c.random_element(rng)
        x = ideal.unit_element() * m2c.random_element(rng) * ideal.unit_element()
        assert ideal.contains_element(a * x)
        assert ideal.contains_element(x * a)
