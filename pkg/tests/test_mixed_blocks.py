"""End-to-end coverage for genuinely non-commutative coefficient blocks.

The acceptance systems either are commutative or factor through the
scalar block; here a unitary-conjugation automorphism keeps the matrix
block in play through verification, recovery, and the config round trip.
"""

import math

import numpy as np
import pytest

import latticekms as lk
from latticekms.cli import run_job
from latticekms.config import parse_config


@pytest.fixture(scope="module")
def sys_twist():
    B = lk.BlockAlgebra([2, 1])
    theta = 0.7
    u = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]],
        dtype=complex,
    )
    phi = lk.endomorphism_from_map(
        B, lambda e: B.element([u @ e.blocks[0] @ u.conj().T, e.blocks[1]])
    )
    return lk.DynamicalSystem(B, [phi])


def test_twist_is_automorphic(sys_twist):
    assert lk.classify_injectivity(sys_twist).injective
    gen = sys_twist.generators[0]
    inv = gen.inverse()
    assert np.allclose(inv.matrix @ gen.matrix, np.eye(sys_twist.algebra.coord_dim))


def test_twist_gibbs_verifies_and_recovers(sys_twist):
    params = lk.KmsParams(lam=(1.3,), beta=0.9, eps=1e-12)
    tau = lk.TracialState(sys_twist.algebra, [0.35, 0.65])
    psi = lk.psi_tau_functional(sys_twist, tau, params)
    assert lk.verify_kms(psi, params, degree=2, tol=1e-8, rng=np.random.default_rng(0)) == []
    rec = lk.recover_trace(psi, params)
    assert np.allclose(rec.weights, tau.weights, atol=1e-9)


def test_twist_dilation_trace_uses_exact_inverse(sys_twist):
    tau = lk.TracialState(sys_twist.algebra, [0.5, 0.5])
    psi = lk.dilation_trace_functional(sys_twist, tau, degree_bound=1)
    e11 = sys_twist.algebra.basis()[0]
    x = lk.MultiIndex((2,))
    expected = tau(sys_twist.compose(x).inverse().apply(e11))
    assert psi(lk.Monomial(sys_twist, x, e11, x)) == pytest.approx(expected)


def test_anisotropic_frequencies(sys_trivial2):
    params = lk.KmsParams(lam=(0.5, 2.0), beta=1.0, eps=1e-12)
    tau = lk.TracialState.uniform(sys_trivial2.algebra)
    psi = lk.psi_tau_functional(sys_trivial2, tau, params)
    for x in lk.enumerate_grid(2, 2):
        f = lk.Monomial(sys_trivial2, x, sys_trivial2.algebra.unit(), x)
        want = math.exp(-(0.5 * x[0] + 2.0 * x[1]))
        got = psi.evaluate(f)
        assert abs(got.value - want) <= got.radius + 1e-13
    assert lk.verify_kms(psi, params, degree=1, tol=1e-9, rng=np.random.default_rng(1)) == []
    rec = lk.recover_trace(psi, params)
    assert rec.weights == pytest.approx([1.0])


def _matrix_to_config_rows(mat: np.ndarray) -> str:
    def fmt(z: complex) -> str:
        return f"{z.real:.17g}{z.imag:+.17g}i"

    return " / ".join(" ".join(fmt(z) for z in row) for row in mat)


def test_cli_round_trips_matrix_block_system(sys_twist, tmp_path):
    rows = _matrix_to_config_rows(np.asarray(sys_twist.generators[0].matrix))
    job = (
        "[system]\n"
        "n = 1\n"
        "blocks = 2 1\n"
        f"gen1 = {rows}\n"
        "[params]\n"
        "lambda = 1\n"
        "beta = 1\n"
        "m = 2\n"
        "d = 1\n"
        "[trace t]\n"
        "weights = 0.35 0.65\n"
        "[analyses]\n"
        "run = validate ideals fock-check kms-verify\n"
    )
    cfg = parse_config(job)
    assert np.allclose(cfg.generator_matrices[0], sys_twist.generators[0].matrix)
    rb = run_job(cfg, seed=3)
    out = rb.text()
    assert rb.faults == 0 and rb.findings == 0
    assert "gen1: valid" in out
    assert "injective = yes" in out
    assert "trace t: violations = 0" in out
