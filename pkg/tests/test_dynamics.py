import numpy as np
import pytest

from latticekms import (
    BlockAlgebra,
    DynamicalSystem,
    MultiIndex,
    StarEndomorphism,
    TracialState,
    classify_injectivity,
    compose_action,
    dilate,
    endomorphism_from_map,
    invariance_ideal,
    kernel_ideal,
    trace_from_dilation,
)
from latticekms.errors import TruncationDepthError


def permutation_system(perms, dims=None):
    """Commuting coordinate-collapse maps on a commutative algebra."""
    k = len(perms[0])
    A = BlockAlgebra(dims or [1] * k)
    gens = [
        endomorphism_from_map(A, lambda e, p=p: A.element([e.blocks[i] for i in p]))
        for p in perms
    ]
    return DynamicalSystem(A, gens)


def test_compose_identity_and_generators(sys_c2id):
    n = sys_c2id.n
    ident = compose_action(sys_c2id, MultiIndex.zero(n))
    assert np.allclose(ident.matrix, np.eye(sys_c2id.algebra.coord_dim))
    for i in range(n):
        gi = compose_action(sys_c2id, MultiIndex.unit(i, n))
        assert np.allclose(gi.matrix, sys_c2id.generators[i].matrix)


def test_compose_additivity(sys_c2id):
    x = MultiIndex((1, 1))
    both = compose_action(sys_c2id, x)
    g0, g1 = sys_c2id.generators
    assert np.linalg.norm(both.matrix - g0.matrix @ g1.matrix, 2) < 1e-12
    assert np.linalg.norm(both.matrix - g1.matrix @ g0.matrix, 2) < 1e-12
    y = MultiIndex((2, 1))
    assert np.allclose(
        compose_action(sys_c2id, x + y).matrix,
        compose_action(sys_c2id, x).matrix @ compose_action(sys_c2id, y).matrix,
    )


def test_noncommuting_generators_rejected():
    A = BlockAlgebra([1, 1, 1])
    f = endomorphism_from_map(A, lambda e: A.element([e.blocks[0], e.blocks[0], e.blocks[2]]))
    g = endomorphism_from_map(A, lambda e: A.element([e.blocks[0], e.blocks[2], e.blocks[2]]))
    with pytest.raises(ValueError, match="commute"):
        DynamicalSystem(A, [f, g])


def test_invariance_ideal_basics(sys_c2, sys_swap):
    assert invariance_ideal(sys_c2, MultiIndex.zero(1)).is_empty
    assert sorted(invariance_ideal(sys_c2, MultiIndex((1,))).blocks) == [0]
    # full support: I_x = annihilator of the joint kernel, and I_x = I_1 for x >= 1
    for x in (MultiIndex((2,)), MultiIndex((5,))):
        assert invariance_ideal(sys_c2, x) == invariance_ideal(sys_c2, MultiIndex((1,)))
    assert invariance_ideal(sys_swap, MultiIndex((1,))).is_full


def test_injective_system_generator_ideals(sys_trivial2):
    for i in range(2):
        assert invariance_ideal(sys_trivial2, MultiIndex.unit(i, 2)).is_full


def test_ideal_depends_only_on_support():
    h = (0, 0, 1)
    h2 = tuple(h[i] for i in h)
    sys2 = permutation_system([h, h2])  # commuting powers of one collapse
    for x, y in [((1, 0), (3, 0)), ((0, 2), (0, 5)), ((1, 1), (4, 7))]:
        assert invariance_ideal(sys2, MultiIndex(x)) == invariance_ideal(sys2, MultiIndex(y))
        meet1 = MultiIndex(x).meet(MultiIndex.ones(2))
        assert invariance_ideal(sys2, MultiIndex(x)) == invariance_ideal(sys2, meet1)


def test_ideal_invariant_under_perp_action():
    rng = np.random.default_rng(33)
    h = (0, 0, 1)
    sys3 = permutation_system([h, tuple(h[i] for i in h)])
    for _ in range(30):
        x = MultiIndex([int(c) for c in rng.integers(0, 3, size=2)])
        if x.is_zero():
            continue
        ideal = invariance_ideal(sys3, x)
        for _ in range(4):
            yi = MultiIndex((0, 0))
            for i in range(2):
                if i not in x.support():
                    yi = yi + MultiIndex.unit(i, 2).scale(int(rng.integers(0, 3)))
            phi = compose_action(sys3, yi)
            for e in ideal.basis():
                assert ideal.contains_element(phi.apply(e))


def test_perp_sweep_audit_level():
    # alpha_1 = alpha_2^2 where alpha_2 shifts coordinates: the e_1 ideal
    # needs an actual sweep over the perp direction
    A = BlockAlgebra([1, 1, 1])
    a2 = endomorphism_from_map(A, lambda e: A.element([e.blocks[1], e.blocks[2], e.blocks[2]]))
    a1 = StarEndomorphism(A, a2.matrix @ a2.matrix, a2.certificate)
    sys2 = DynamicalSystem(A, [a1, a2])
    ideal, level = invariance_ideal(sys2, MultiIndex((1, 0)), audit=True)
    assert level >= 1
    # brute-force oracle over a generous perp window
    K = kernel_ideal(a1).annihilator()
    expected = K
    from latticekms.algebra import preimage_ideal
    from latticekms.lattice import enumerate_supported_grid

    for y in enumerate_supported_grid(6, [1], 2):
        expected = expected.intersect(preimage_ideal(compose_action(sys2, y), K))
    assert ideal == expected


def test_perp_sweep_needs_several_levels():
    # the ladder (a, b, c, d) |-> (a, a, b, c) pushes blocks upward one
    # step per application, so the perp intersection keeps shrinking for
    # three levels before emptying out
    A = BlockAlgebra([1, 1, 1, 1])
    ladder = endomorphism_from_map(
        A, lambda e: A.element([e.blocks[0], e.blocks[0], e.blocks[1], e.blocks[2]])
    )
    sys2 = DynamicalSystem(A, [ladder, ladder])
    ideal, level = invariance_ideal(sys2, MultiIndex((1, 0)), audit=True)
    assert ideal.is_empty
    assert level == 3
    # brute-force oracle over a generous perp window
    K = kernel_ideal(ladder).annihilator()
    expected = K
    from latticekms.algebra import preimage_ideal
    from latticekms.lattice import enumerate_supported_grid

    for y in enumerate_supported_grid(8, [1], 2):
        expected = expected.intersect(preimage_ideal(compose_action(sys2, y), K))
    assert ideal == expected


def test_classify_injectivity(sys_swap, sys_c2id, sys_trivial1):
    assert classify_injectivity(sys_swap).injective
    assert classify_injectivity(sys_trivial1).injective
    rep = classify_injectivity(sys_c2id)
    assert not rep.injective
    assert rep.kernel_witness == (0, 1)


def test_classify_injectivity_agreement_random():
    rng = np.random.default_rng(8)
    for _ in range(100):
        k = int(rng.integers(2, 5))
        h = tuple(int(i) for i in rng.integers(0, k, size=k))
        p, q = int(rng.integers(1, 3)), int(rng.integers(1, 3))

        def power(f, e):
            out = tuple(range(len(f)))
            for _ in range(e):
                out = tuple(f[i] for i in out)
            return out

        sys2 = permutation_system([power(h, p), power(h, q)])
        report = classify_injectivity(sys2)  # raises InvariantFault on disagreement
        assert report.injective == all(kernel_ideal(g).is_empty for g in sys2.generators)


def test_dilate_injective_collapses(sys_swap):
    dil = dilate(sys_swap, 2)
    assert dil.algebra.block_dims == sys_swap.algebra.block_dims
    assert all(not lvl.retained_blocks for lvl in dil.levels if not lvl.index.is_zero())


def test_dilate_c2_example(sys_c2):
    dil = dilate(sys_c2, 2)
    # A (+) C (+) C: level 0 keeps both blocks, deeper levels keep block 1
    assert dil.algebra.block_dims == (1, 1, 1, 1)
    assert dil.levels[0].retained_blocks == (0, 1)
    for lvl in dil.levels[1:]:
        assert lvl.retained_blocks == (1,)
    assert dil.boundary == frozenset({MultiIndex((2,))})
    assert max(dil.compression_defects) <= 1e-12
    assert min(dil.interior_min_singular) > 1e-10


def test_dilate_compression_recovers_action(sys_c2id):
    dil = dilate(sys_c2id, 1)
    for i, g in enumerate(sys_c2id.generators):
        zero_slice = dil.level_slice(0)
        corner = dil.beta_matrices[i][zero_slice, zero_slice]
        assert np.linalg.norm(corner - g.matrix, 2) <= 1e-12


def test_trace_from_dilation_automorphic(sys_swap):
    tau = TracialState(sys_swap.algebra, [0.25, 0.75])
    e0 = sys_swap.algebra.central_projection(0)
    x = MultiIndex((3,))
    # alpha is the swap, so alpha_x^{-1}(e0) alternates between the blocks
    got = trace_from_dilation(sys_swap, tau, x, e0, x)
    assert got == pytest.approx(tau(sys_swap.compose(x).inverse().apply(e0)))
    assert trace_from_dilation(sys_swap, tau, x, e0, MultiIndex((1,))) == 0


def test_trace_from_dilation_trivial(sys_trivial1):
    tau = TracialState.uniform(sys_trivial1.algebra)
    for k in range(4):
        x = MultiIndex((k,))
        val = trace_from_dilation(sys_trivial1, tau, x, sys_trivial1.algebra.unit(), x)
        assert val == pytest.approx(1.0)


def test_trace_from_dilation_depth_errors(sys_c2):
    tau_base = TracialState.uniform(sys_c2.algebra)
    with pytest.raises(TruncationDepthError, match="dilation"):
        trace_from_dilation(sys_c2, tau_base, MultiIndex((1,)), sys_c2.algebra.unit(), MultiIndex((1,)))
    dil = dilate(sys_c2, 2)
    tau = TracialState(dil.algebra, [1.0, 0.0, 0.0, 0.0])
    deep = MultiIndex((3,))
    with pytest.raises(TruncationDepthError, match="increase m"):
        trace_from_dilation(sys_c2, tau, deep, sys_c2.algebra.unit(), deep, dilation=dil)
